#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "flatneck/blowup_lab.hpp"
#include "flatneck/grid2d.hpp"

namespace flatneck {

// All floating-point text output uses 17 significant digits so parsed
// values round-trip exactly.
std::string format_g17(double v);

enum class FieldChart { flattened, physical };

// CSV snapshot: "# flatneck-field-csv schema_version=1" then
// r,{yn|xn},value rows in node order.
void write_field_csv(const std::string& path, const Field2D& field,
                     FieldChart chart = FieldChart::flattened);

// Structured-text header + raw little-endian float64 block:
//   flatneck-field-bin 1
//   name <name>
//   chart <flattened|physical>
//   nr <nr> nz <nz>
//   end
// followed by nr radial nodes, nz vertical nodes, nr*nz values (row-major).
void write_field_binary(const std::string& path, const Field2D& field,
                        FieldChart chart = FieldChart::flattened);

struct BinaryField {
  std::string name;
  std::string chart;
  std::vector<double> radial, vertical, values;
};
BinaryField read_field_binary(const std::string& path);

// Sweep CSV: "# flatneck-sweep-csv schema_version=1" then the column header
// epsilon,sup_grad,r_star,xn_star,osc_ratio,residual,wall_ms.
void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records);

nlohmann::json sweep_record_json(const SweepRecord& r);
nlohmann::json fit_json(const FitResult& f);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace flatneck
