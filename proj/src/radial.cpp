#include "flatneck/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flatneck {

namespace {

constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};

// Local spacing target used by the graded generator.
struct SpacingShape {
  double r0, h_r0, h_ax, h_lat, h_cap, beta;
  double operator()(double r) const {
    double h = h_cap;
    h = std::min(h, h_r0 + beta * std::abs(r - r0));
    h = std::min(h, h_ax + beta * r);
    h = std::min(h, h_lat + beta * (1.0 - r));
    return h;
  }
};

}  // namespace

RadialGrid::RadialGrid(std::vector<double> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("RadialGrid: need at least 2 nodes");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i] < nodes[i + 1]))
      throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
  if (nodes.front() < 0.0)
    throw std::invalid_argument("RadialGrid: nodes must be nonnegative");
  nodes_ = std::make_shared<const std::vector<double>>(std::move(nodes));
}

RadialGrid RadialGrid::graded(const RadialGridSpec& spec) {
  if (!(spec.r_min >= 0.0 && spec.r_min < spec.r_max))
    throw std::invalid_argument("RadialGrid::graded: bad range");
  if (spec.count < 8) throw std::invalid_argument("RadialGrid::graded: count too small");

  const double hmin_r0 = spec.transition_floor_scale * std::sqrt(spec.epsilon);
  SpacingShape shape{spec.r0,
                     hmin_r0,
                     /*h_ax=*/spec.r0 > 0.0 ? std::min(0.02, spec.r0 / 8.0) : hmin_r0,
                     /*h_lat=*/0.02,
                     /*h_cap=*/0.05,
                     spec.beta};

  // Anchors that must be exact nodes.
  std::vector<double> anchors{spec.r_min, spec.r_max};
  auto add_anchor = [&](double r) {
    if (r > spec.r_min + 1e-15 && r < spec.r_max - 1e-15) anchors.push_back(r);
  };
  add_anchor(spec.r0 / 2.0);
  add_anchor(spec.r0);
  add_anchor(0.75);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                anchors.end());

  // Measure each segment in units of 1/shape, then distribute the requested
  // count proportionally and place nodes at equal increments of the measure.
  const int fine = 4096;
  std::vector<double> seg_measure(anchors.size() - 1, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
    const double a = anchors[s], b = anchors[s + 1];
    double acc = 0.0;
    const double dr = (b - a) / fine;
    for (int j = 0; j < fine; ++j) {
      const double rm = a + (j + 0.5) * dr;
      acc += dr / shape(rm);
    }
    seg_measure[s] = acc;
    total += acc;
  }

  std::vector<double> nodes;
  nodes.push_back(anchors.front());
  for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
    const double a = anchors[s], b = anchors[s + 1];
    int cells = std::max(2, static_cast<int>(std::lround((spec.count - 1) * seg_measure[s] / total)));
    // invert the measure within the segment
    const double dr = (b - a) / fine;
    double acc = 0.0;
    int placed = 1;
    double target = seg_measure[s] * placed / cells;
    for (int j = 0; j < fine && placed < cells; ++j) {
      const double rm = a + (j + 0.5) * dr;
      acc += dr / shape(rm);
      while (placed < cells && acc >= target) {
        nodes.push_back(a + (j + 1) * dr);
        ++placed;
        target = seg_measure[s] * placed / cells;
      }
    }
    nodes.push_back(b);
  }
  // dedupe near-coincident nodes from the inversion
  std::vector<double> clean;
  clean.reserve(nodes.size());
  for (double r : nodes)
    if (clean.empty() || r - clean.back() > 1e-13) clean.push_back(r);
  return RadialGrid(std::move(clean));
}

std::size_t RadialGrid::interval_of(double r) const {
  const auto& v = *nodes_;
  if (r <= v.front()) return 0;
  if (r >= v.back()) return v.size() - 2;
  const auto it = std::upper_bound(v.begin(), v.end(), r);
  return static_cast<std::size_t>(it - v.begin()) - 1;
}

bool RadialGrid::has_node(double r, double tol) const {
  const auto& v = *nodes_;
  const auto it = std::lower_bound(v.begin(), v.end(), r - tol);
  return it != v.end() && std::abs(*it - r) <= tol;
}

std::size_t RadialGrid::index_of(double r, double tol) const {
  const auto& v = *nodes_;
  const auto it = std::lower_bound(v.begin(), v.end(), r - tol);
  if (it == v.end() || std::abs(*it - r) > tol)
    throw std::invalid_argument("RadialGrid::index_of: r is not a grid node");
  return static_cast<std::size_t>(it - v.begin());
}

RadialFunction::RadialFunction(RadialGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  const auto& r = grid_.nodes();
  if (values_.size() != r.size())
    throw std::invalid_argument("RadialFunction: values/grid size mismatch");
  const std::size_t n = r.size();
  slopes_.resize(n);
  if (n == 2) {
    slopes_[0] = slopes_[1] = (values_[1] - values_[0]) / (r[1] - r[0]);
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
    const double dl = (values_[i] - values_[i - 1]) / hl;
    const double dr = (values_[i + 1] - values_[i]) / hr;
    slopes_[i] = (hl * dr + hr * dl) / (hl + hr);
  }
  {  // one-sided three-point ends
    const double h0 = r[1] - r[0], h1 = r[2] - r[1];
    slopes_[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * values_[0] +
                 (h0 + h1) / (h0 * h1) * values_[1] -
                 h0 / (h1 * (h0 + h1)) * values_[2];
    const double hn = r[n - 1] - r[n - 2], hm = r[n - 2] - r[n - 3];
    slopes_[n - 1] = (2.0 * hn + hm) / (hn * (hn + hm)) * values_[n - 1] -
                     (hn + hm) / (hn * hm) * values_[n - 2] +
                     hn / (hm * (hn + hm)) * values_[n - 3];
  }
}

double RadialFunction::operator()(double r) const {
  const auto& x = grid_.nodes();
  const std::size_t i = grid_.interval_of(r);
  const double h = x[i + 1] - x[i];
  const double t = (r - x[i]) / h;
  if (t == 0.0) return values_[i];
  if (t == 1.0) return values_[i + 1];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
         (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
}

double RadialFunction::derivative(double r) const {
  const auto& x = grid_.nodes();
  const std::size_t i = grid_.interval_of(r);
  const double h = x[i + 1] - x[i];
  const double t = (r - x[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * values_[i] + (3 * t2 - 4 * t + 1) * h * slopes_[i] +
          (-6 * t2 + 6 * t) * values_[i + 1] + (3 * t2 - 2 * t) * h * slopes_[i + 1]) /
         h;
}

double RadialFunction::integrate(double lo, double hi) const {
  return gauss4_over_grid(grid_, lo, hi, [this](double r) { return (*this)(r); });
}

double gauss4_over_grid(const RadialGrid& grid, double lo, double hi,
                        const std::function<double(double)>& f) {
  if (hi < lo) return -gauss4_over_grid(grid, hi, lo, f);
  const auto& x = grid.nodes();
  double acc = 0.0;
  const std::size_t first = grid.interval_of(lo);
  const std::size_t last = grid.interval_of(hi);
  for (std::size_t i = first; i <= last; ++i) {
    const double a = std::max(lo, x[i]);
    const double b = std::min(hi, x[i + 1]);
    if (b <= a) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < 4; ++q) acc += half * kGaussW[q] * f(mid + half * kGaussX[q]);
  }
  return acc;
}

}  // namespace flatneck
