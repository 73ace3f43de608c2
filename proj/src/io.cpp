#include "flatneck/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flatneck {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_field_csv(const std::string& path, const Field2D& field, FieldChart chart) {
  std::ofstream out = open_out(path);
  const Grid2D& g = *field.grid;
  out << "# flatneck-field-csv schema_version=1 name=" << field.name << "\n";
  out << "r," << (chart == FieldChart::flattened ? "yn" : "xn") << ",value\n";
  for (std::size_t i = 0; i < g.nr(); ++i)
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const double vert = chart == FieldChart::flattened ? g.yn()[j] : g.xn(i, j);
      out << format_g17(g.rho()[i]) << ',' << format_g17(vert) << ','
          << format_g17(field.at(i, j)) << "\n";
    }
}

void write_field_binary(const std::string& path, const Field2D& field,
                        FieldChart chart) {
  std::ofstream out = open_out(path, true);
  const Grid2D& g = *field.grid;
  out << "flatneck-field-bin 1\n"
      << "name " << field.name << "\n"
      << "chart " << (chart == FieldChart::flattened ? "flattened" : "physical") << "\n"
      << "nr " << g.nr() << " nz " << g.nz() << "\n"
      << "end\n";
  auto put = [&out](const double* p, std::size_t count) {
    out.write(reinterpret_cast<const char*>(p),
              static_cast<std::streamsize>(count * sizeof(double)));
  };
  put(g.rho().data(), g.nr());
  std::vector<double> vert(g.nz());
  for (std::size_t j = 0; j < g.nz(); ++j) vert[j] = g.yn()[j];
  put(vert.data(), vert.size());
  put(field.v.data(), field.v.size());
}

BinaryField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io: cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "flatneck-field-bin 1")
    throw std::runtime_error("io: bad field binary magic in '" + path + "'");
  BinaryField f;
  std::size_t nr = 0, nz = 0;
  while (std::getline(in, line) && line != "end") {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "name") ls >> f.name;
    else if (key == "chart") ls >> f.chart;
    else if (key == "nr") {
      std::string tag;
      ls >> nr >> tag >> nz;
    } else {
      throw std::runtime_error("io: unknown field binary header key '" + key + "'");
    }
  }
  if (nr == 0 || nz == 0) throw std::runtime_error("io: missing dimensions in '" + path + "'");
  auto get = [&in, &path](std::vector<double>& v, std::size_t count) {
    v.resize(count);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("io: truncated binary block in '" + path + "'");
  };
  get(f.radial, nr);
  get(f.vertical, nz);
  get(f.values, nr * nz);
  return f;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  std::ofstream out = open_out(path);
  out << "# flatneck-sweep-csv schema_version=1\n";
  out << "epsilon,sup_grad,r_star,xn_star,osc_ratio,residual,wall_ms\n";
  for (const SweepRecord& r : records) {
    out << format_g17(r.epsilon) << ',' << format_g17(r.sup_grad) << ','
        << format_g17(r.r_star) << ',' << format_g17(r.xn_star) << ','
        << format_g17(r.osc_ratio) << ',' << format_g17(r.residual) << ','
        << format_g17(r.wall_ms) << "\n";
  }
}

nlohmann::json sweep_record_json(const SweepRecord& r) {
  return {{"epsilon", r.epsilon},
          {"sup_grad", r.sup_grad},
          {"r_star", r.r_star},
          {"xn_star", r.xn_star},
          {"osc_ratio", r.osc_ratio},
          {"residual", r.residual},
          {"unknowns", r.unknowns},
          {"wall_ms", r.wall_ms},
          {"dyprime_stat", r.dyprime_stat},
          {"dn_stat", r.dn_stat}};
}

nlohmann::json fit_json(const FitResult& f) {
  return {{"exponent", f.exponent},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"residuals", f.residuals}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace flatneck
