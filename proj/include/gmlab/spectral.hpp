#pragma once

#include <fftw3.h>

#include <cmath>
#include <span>
#include <vector>

#include "gmlab/model.hpp"

namespace gmlab {

/// Which eigenvalues the cosine modes carry.
enum class Spectrum {
  /// lambda_k = (k pi / L)^2: exact for the continuous Neumann Laplacian on every
  /// resolved cosine mode.
  Continuum,
  /// lambda_k = (2/h sin(k pi / 2n))^2: exact exponential of the finite-difference
  /// Laplacian used by laplacian_neumann.
  Lattice,
};

/// Cosine-transform buffers, FFTW plans and per-mode eigenvalues for one grid.
/// Not thread-safe; hold one per worker (see thread_workspace).
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid& grid, Spectrum spectrum = Spectrum::Continuum);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;
  SpectralWorkspace(SpectralWorkspace&& other) noexcept;
  SpectralWorkspace& operator=(SpectralWorkspace&&) = delete;

  const Grid& grid() const noexcept { return grid_; }
  Spectrum spectrum() const noexcept { return spectrum_; }
  /// Eigenvalue of -Δ per cosine mode, flattened like the field (0 first).
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

  /// Cosine coefficients of `values`, scaled so that inverse(forward(x)) == x.
  void forward(std::span<const double> values, std::span<double> coeffs);
  void inverse(std::span<const double> coeffs, std::span<double> values);

  /// values <- exp((Δ - 1) t) values, in place.
  void apply_semigroup(std::span<double> values, double t);

  /// values <- S(t) values + int_0^t S(s) ds forcing, mode by mode:
  /// e^{-lambda t} v_k + (1 - e^{-lambda t}) / lambda f_k with lambda = 1 + eigenvalue.
  void apply_exponential_step(std::span<double> values, std::span<const double> forcing, double t);

 private:
  Grid grid_;
  Spectrum spectrum_;
  std::vector<double> eigenvalues_;
  double* buffer_in_ = nullptr;
  double* buffer_out_ = nullptr;
  fftw_plan plan_forward_ = nullptr;
  fftw_plan plan_inverse_ = nullptr;
  double scale_ = 1.0;
  std::vector<double> forcing_;
};

/// Workspace cached per thread and per (grid, spectrum).
SpectralWorkspace& thread_workspace(const Grid& grid, Spectrum spectrum = Spectrum::Continuum);

/// Second-order central difference with mirrored ghost cells.
Field laplacian_neumann(const Field& u, const Grid& grid);

/// S(t) u = exp((Δ - 1) t) u, evaluated mode by mode.
Field semigroup_apply(const Field& u, double t, const Grid& grid,
                      Spectrum spectrum = Spectrum::Continuum);

/// u^p / xi^q elementwise. Throws DegenerateInhibitor when xi <= 0.
Field reaction(const Field& u, double xi, double p, double q);

/// mean over the domain of u^alpha.
double spatial_mean_power(const Field& u, double alpha);

/// x^e with cheap paths for e = 1, 2.
inline double power(double x, double e) {
  if (e == 2.0) return x * x;
  if (e == 1.0) return x;
  return std::pow(x, e);
}

struct ImexStep {
  Field u;
  /// ‖u‖_∞ above the blow-up threshold, or a non-finite value appeared.
  bool saturated = false;
};

/// One exponential-Euler step of the activator mild form with the reaction frozen
/// at the start of the step: u <- S(dt) u + int_0^dt S(s) ds (u^p / xi^q).
/// Homogeneous fixed points of the reaction-decay balance are kept exactly.
/// Output is clamped at 0.
ImexStep step_u_imex(const Field& u, double xi, double dt, const ModelParams& params,
                     const Grid& grid, double blowup_threshold = 1e8,
                     Spectrum spectrum = Spectrum::Continuum);

/// In-place variant used by the integrators; returns the saturation flag.
bool step_u_imex_inplace(std::span<double> u, double xi, double dt, const ModelParams& params,
                         SpectralWorkspace& workspace, double blowup_threshold);

}  // namespace gmlab
