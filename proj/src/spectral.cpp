#include "gmlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "gmlab/errors.hpp"

namespace gmlab {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> axis_eigenvalues(const Grid& grid, Spectrum spectrum) {
  const std::size_t n = grid.n();
  std::vector<double> lambda(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    if (spectrum == Spectrum::Continuum) {
      const double w = kk * std::numbers::pi / grid.length();
      lambda[k] = w * w;
    } else {
      const double s = 2.0 / grid.h() * std::sin(kk * std::numbers::pi / (2.0 * static_cast<double>(n)));
      lambda[k] = s * s;
    }
  }
  return lambda;
}

}  // namespace

SpectralWorkspace::SpectralWorkspace(const Grid& grid, Spectrum spectrum)
    : grid_(grid), spectrum_(spectrum) {
  const std::size_t n = grid.n();
  const std::size_t size = grid.cell_count();
  const auto axis = axis_eigenvalues(grid, spectrum);
  eigenvalues_.resize(size);
  if (grid.dim() == 1) {
    eigenvalues_ = axis;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) eigenvalues_[i * n + j] = axis[i] + axis[j];
  }

  buffer_in_ = fftw_alloc_real(size);
  buffer_out_ = fftw_alloc_real(size);
  const int ni = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  if (grid.dim() == 1) {
    plan_forward_ = fftw_plan_r2r_1d(ni, buffer_in_, buffer_out_, FFTW_REDFT10, FFTW_ESTIMATE);
    plan_inverse_ = fftw_plan_r2r_1d(ni, buffer_in_, buffer_out_, FFTW_REDFT01, FFTW_ESTIMATE);
    scale_ = 1.0 / (2.0 * n);
  } else {
    plan_forward_ = fftw_plan_r2r_2d(ni, ni, buffer_in_, buffer_out_, FFTW_REDFT10, FFTW_REDFT10,
                                     FFTW_ESTIMATE);
    plan_inverse_ = fftw_plan_r2r_2d(ni, ni, buffer_in_, buffer_out_, FFTW_REDFT01, FFTW_REDFT01,
                                     FFTW_ESTIMATE);
    scale_ = 1.0 / (4.0 * n * n);
  }
}

SpectralWorkspace::~SpectralWorkspace() {
  if (plan_forward_ || plan_inverse_) {
    std::lock_guard lock(planner_mutex());
    if (plan_forward_) fftw_destroy_plan(plan_forward_);
    if (plan_inverse_) fftw_destroy_plan(plan_inverse_);
  }
  fftw_free(buffer_in_);
  fftw_free(buffer_out_);
}

SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&& other) noexcept
    : grid_(other.grid_),
      spectrum_(other.spectrum_),
      eigenvalues_(std::move(other.eigenvalues_)),
      buffer_in_(std::exchange(other.buffer_in_, nullptr)),
      buffer_out_(std::exchange(other.buffer_out_, nullptr)),
      plan_forward_(std::exchange(other.plan_forward_, nullptr)),
      plan_inverse_(std::exchange(other.plan_inverse_, nullptr)),
      scale_(other.scale_),
      forcing_(std::move(other.forcing_)) {}

void SpectralWorkspace::forward(std::span<const double> values, std::span<double> coeffs) {
  const std::size_t size = eigenvalues_.size();
  std::copy_n(values.begin(), size, buffer_in_);
  fftw_execute(plan_forward_);
  for (std::size_t i = 0; i < size; ++i) coeffs[i] = buffer_out_[i] * scale_;
}

void SpectralWorkspace::inverse(std::span<const double> coeffs, std::span<double> values) {
  const std::size_t size = eigenvalues_.size();
  std::copy_n(coeffs.begin(), size, buffer_in_);
  fftw_execute(plan_inverse_);
  std::copy_n(buffer_out_, size, values.begin());
}

void SpectralWorkspace::apply_semigroup(std::span<double> values, double t) {
  const std::size_t size = eigenvalues_.size();
  std::copy_n(values.begin(), size, buffer_in_);
  fftw_execute(plan_forward_);
  for (std::size_t i = 0; i < size; ++i)
    buffer_in_[i] = buffer_out_[i] * scale_ * std::exp(-(1.0 + eigenvalues_[i]) * t);
  fftw_execute(plan_inverse_);
  std::copy_n(buffer_out_, size, values.begin());
}

void SpectralWorkspace::apply_exponential_step(std::span<double> values,
                                               std::span<const double> forcing, double t) {
  const std::size_t size = eigenvalues_.size();
  forcing_.resize(size);
  forward(forcing, forcing_);
  std::copy_n(values.begin(), size, buffer_in_);
  fftw_execute(plan_forward_);
  for (std::size_t i = 0; i < size; ++i) {
    const double lambda = 1.0 + eigenvalues_[i];
    buffer_in_[i] = buffer_out_[i] * scale_ * std::exp(-lambda * t) -
                    std::expm1(-lambda * t) / lambda * forcing_[i];
  }
  fftw_execute(plan_inverse_);
  std::copy_n(buffer_out_, size, values.begin());
}

SpectralWorkspace& thread_workspace(const Grid& grid, Spectrum spectrum) {
  using Key = std::tuple<std::size_t, int, double, int>;
  thread_local std::map<Key, std::unique_ptr<SpectralWorkspace>> cache;
  const Key key{grid.n(), grid.dim(), grid.length(), static_cast<int>(spectrum)};
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<SpectralWorkspace>(grid, spectrum);
  return *slot;
}

Field laplacian_neumann(const Field& u, const Grid& grid) {
  if (u.size() != grid.cell_count()) throw InvalidParameter("u", "size does not match grid");
  const std::size_t n = grid.n();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  Field out(u.size(), 0.0);
  // Mirrored ghost cell: the neighbour across a wall is the cell itself.
  auto second_difference = [&](std::size_t i, std::size_t stride, std::size_t pos) {
    const double c = u[i];
    const double left = pos == 0 ? c : u[i - stride];
    const double right = pos == n - 1 ? c : u[i + stride];
    return (left - 2.0 * c + right) * inv_h2;
  };
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = second_difference(i, 1, i);
  } else {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t i = r * n + c;
        out[i] = second_difference(i, 1, c) + second_difference(i, n, r);
      }
  }
  return out;
}

Field semigroup_apply(const Field& u, double t, const Grid& grid, Spectrum spectrum) {
  if (t < 0.0) throw InvalidParameter("t", "must be >= 0");
  if (u.size() != grid.cell_count()) throw InvalidParameter("u", "size does not match grid");
  Field out = u;
  if (t == 0.0) return out;
  thread_workspace(grid, spectrum).apply_semigroup(out.values, t);
  return out;
}

Field reaction(const Field& u, double xi, double p, double q) {
  if (!(xi > 0.0)) throw DegenerateInhibitor("reaction needs xi > 0, got " + std::to_string(xi));
  const double inv = 1.0 / power(xi, q);
  Field out(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = power(u[i], p) * inv;
  return out;
}

double spatial_mean_power(const Field& u, double alpha) {
  if (u.size() == 0) return 0.0;
  double acc = 0.0;
  for (double v : u.values) acc += power(v, alpha);
  return acc / static_cast<double>(u.size());
}

bool step_u_imex_inplace(std::span<double> u, double xi, double dt, const ModelParams& params,
                         SpectralWorkspace& workspace, double blowup_threshold) {
  if (!(xi > 0.0)) throw DegenerateInhibitor("activator step needs xi > 0");
  const double inv = 1.0 / power(xi, params.q);
  thread_local std::vector<double> forcing;
  forcing.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) forcing[i] = inv * power(u[i], params.p);
  workspace.apply_exponential_step(u, forcing, dt);
  bool saturated = false;
  for (double& v : u) {
    if (!std::isfinite(v) || v > blowup_threshold) saturated = true;
    // The truncated kernel and transform roundoff can leave tiny negatives.
    if (v < 0.0) v = 0.0;
  }
  return saturated;
}

ImexStep step_u_imex(const Field& u, double xi, double dt, const ModelParams& params,
                     const Grid& grid, double blowup_threshold, Spectrum spectrum) {
  if (!(dt > 0.0)) throw InvalidParameter("dt", "must be > 0");
  if (u.size() != grid.cell_count()) throw InvalidParameter("u", "size does not match grid");
  ImexStep out{u, false};
  out.saturated = step_u_imex_inplace(out.u.values, xi, dt, params,
                                      thread_workspace(grid, spectrum), blowup_threshold);
  return out;
}

}  // namespace gmlab
