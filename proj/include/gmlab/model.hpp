#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace gmlab {

/// Unvalidated parameter record, e.g. straight from a config file.
/// Every field must be present before validation succeeds.
struct RawParams {
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> sigma;
  std::optional<double> zeta;
  std::optional<int> dim;
  std::optional<double> domain_length;
};

/// Exponents, noise amplitude and initial inhibitor of the shadow system
///
///   du = (Δu - u + u^p / xi^q) dt,
///   dxi = (-xi + mean(u^alpha) / xi^beta) dt + sigma xi dB,
///
/// with homogeneous Neumann conditions on a rectangular domain.
struct ModelParams {
  double p = 2.0;
  double q = 1.0;
  double alpha = 2.0;
  double beta = 0.0;
  double sigma = 0.0;
  double zeta = 1.0;
  int dim = 1;
  double domain_length = 1.0;
  /// (p-1)/alpha < q/(beta+1) and (p-1)/alpha < 2/(dim+2).
  bool global_ok = true;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// True iff both exponent conditions for global existence hold.
bool global_existence_condition(double p, double q, double alpha, double beta, int dim);

/// Throws InvalidParameter naming the first offending field. A failed exponent
/// condition is not an error: the result simply carries global_ok == false.
ModelParams validate_params(const RawParams& raw);

/// Converts back to the raw record (validate_params(to_raw(m)) == m).
RawParams to_raw(const ModelParams& params);

/// Reference exponents p=2, q=1, alpha=2, beta=0 in one dimension on [0,1].
ModelParams canonical_params(double sigma = 0.0, double zeta = 1.0);

/// Uniform cell-centred grid on [0, length]^dim.
class Grid {
 public:
  Grid(std::size_t n, int dim, double length);

  std::size_t n() const noexcept { return n_; }
  int dim() const noexcept { return dim_; }
  double length() const noexcept { return length_; }
  double h() const noexcept { return h_; }
  std::size_t cell_count() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
  double cell_volume() const noexcept { return dim_ == 1 ? h_ : h_ * h_; }
  double domain_measure() const noexcept { return dim_ == 1 ? length_ : length_ * length_; }
  /// Centre of cell i along one axis.
  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_;
  int dim_;
  double length_;
  double h_;
};

Grid make_grid(std::size_t n, int dim, double length);

/// Cell values on a Grid; row-major (x fastest is the last index) in 2D.
struct Field {
  std::vector<double> values;

  Field() = default;
  explicit Field(std::vector<double> v) : values(std::move(v)) {}
  Field(std::size_t size, double value) : values(size, value) {}

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

  friend bool operator==(const Field&, const Field&) = default;
};

Field constant_field(const Grid& grid, double value);

/// Samples f at cell centres; in 1D the second argument is always 0.
Field sample_field(const Grid& grid, const std::function<double(double, double)>& f);

/// Spatial L2 norm normalised by the domain measure: (mean(u^2))^{1/2}.
double normalized_l2(const Field& u);

/// Running values of M_delta(t) = int_0^t xi^{-delta} dB, one entry per step time.
struct MartingaleDiagnostics {
  double delta = 0.5;
  std::vector<double> m_delta;
  /// sup_s M_delta(s) over the run.
  double m_sup = 0.0;
  /// sup_s |M_delta(s)| over the run.
  double m_abs_sup = 0.0;
};

/// Output of a coupled run. Per-step series share the index of step_times;
/// u_frames are decimated and share the index of times.
struct Trajectory {
  ModelParams params;
  Grid grid{4, 1, 1.0};
  double dt = 0.0;
  double blowup_threshold = 1e8;

  std::vector<double> times;
  std::vector<Field> u_frames;

  std::vector<double> step_times;
  std::vector<double> xi_series;
  std::vector<double> eta_series;
  std::vector<double> ubar_alpha_series;
  /// Driving Brownian value B(t) (0 for noise-free runs).
  std::vector<double> noise_series;
  /// Control value h(t) (0 when no control).
  std::vector<double> control_series;
  std::vector<double> u_min_series;
  std::vector<double> u_max_series;
  std::vector<double> u_l2_series;

  MartingaleDiagnostics diagnostics;

  std::optional<double> blowup_time;
  double blowup_sup = 0.0;

  std::size_t step_count() const noexcept { return step_times.size(); }
  double final_time() const { return step_times.empty() ? 0.0 : step_times.back(); }
};

}  // namespace gmlab
