#include "gmlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmlab/errors.hpp"

namespace gmlab {

namespace {

double require_finite(const std::optional<double>& value, const char* name) {
  if (!value) throw InvalidParameter(name, "missing");
  if (!std::isfinite(*value)) throw InvalidParameter(name, "not finite");
  return *value;
}

}  // namespace

bool global_existence_condition(double p, double q, double alpha, double beta, int dim) {
  const double ratio = (p - 1.0) / alpha;
  return ratio < q / (beta + 1.0) && ratio < 2.0 / (static_cast<double>(dim) + 2.0);
}

ModelParams validate_params(const RawParams& raw) {
  ModelParams out;
  out.p = require_finite(raw.p, "p");
  out.q = require_finite(raw.q, "q");
  out.alpha = require_finite(raw.alpha, "alpha");
  out.beta = require_finite(raw.beta, "beta");
  out.sigma = require_finite(raw.sigma, "sigma");
  out.zeta = require_finite(raw.zeta, "zeta");
  out.domain_length = require_finite(raw.domain_length, "domain_length");
  if (!raw.dim) throw InvalidParameter("dim", "missing");
  out.dim = *raw.dim;

  if (out.p <= 1.0) throw InvalidParameter("p", "must be > 1");
  if (out.q <= 0.0) throw InvalidParameter("q", "must be > 0");
  if (out.alpha <= 0.0) throw InvalidParameter("alpha", "must be > 0");
  if (out.beta < 0.0) throw InvalidParameter("beta", "must be >= 0");
  if (out.sigma < 0.0) throw InvalidParameter("sigma", "must be >= 0");
  if (out.zeta <= 0.0) throw InvalidParameter("zeta", "must be > 0");
  if (out.dim < 1) throw InvalidParameter("dim", "must be >= 1");
  if (out.domain_length <= 0.0) throw InvalidParameter("domain_length", "must be > 0");

  // dim > 2 is accepted here so the exponent conditions can be evaluated for
  // any dimension; grids and solvers only support 1 and 2.
  out.global_ok = global_existence_condition(out.p, out.q, out.alpha, out.beta, out.dim);
  return out;
}

RawParams to_raw(const ModelParams& m) {
  RawParams raw;
  raw.p = m.p;
  raw.q = m.q;
  raw.alpha = m.alpha;
  raw.beta = m.beta;
  raw.sigma = m.sigma;
  raw.zeta = m.zeta;
  raw.dim = m.dim;
  raw.domain_length = m.domain_length;
  return raw;
}

ModelParams canonical_params(double sigma, double zeta) {
  RawParams raw{2.0, 1.0, 2.0, 0.0, sigma, zeta, 1, 1.0};
  return validate_params(raw);
}

Grid::Grid(std::size_t n, int dim, double length) : n_(n), dim_(dim), length_(length) {
  if (n < 4) throw InvalidParameter("n", "need at least 4 cells per axis");
  if (dim != 1 && dim != 2) throw InvalidParameter("dim", "grids support dim 1 or 2");
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidParameter("length", "must be > 0");
  h_ = length / static_cast<double>(n);
}

Grid make_grid(std::size_t n, int dim, double length) { return Grid(n, dim, length); }

double Field::min() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

double Field::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Field constant_field(const Grid& grid, double value) { return Field(grid.cell_count(), value); }

Field sample_field(const Grid& grid, const std::function<double(double, double)>& f) {
  Field out(grid.cell_count(), 0.0);
  const std::size_t n = grid.n();
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(grid.center(i), 0.0);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] = f(grid.center(j), grid.center(i));
  }
  return out;
}

double normalized_l2(const Field& u) {
  if (u.size() == 0) return 0.0;
  double acc = 0.0;
  for (double v : u.values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(u.size()));
}

}  // namespace gmlab
