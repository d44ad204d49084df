#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gmlab {

/// Cameron-Martin path h(t) = int_0^t hdot(s) ds with hdot piecewise constant on
/// `intervals()` uniform cells of width dt_h. h is held constant past the last cell.
class CameronMartinControl {
 public:
  CameronMartinControl() = default;
  CameronMartinControl(std::vector<double> hdot, double dt_h);

  const std::vector<double>& hdot() const noexcept { return hdot_; }
  double dt_h() const noexcept { return dt_h_; }
  std::size_t intervals() const noexcept { return hdot_.size(); }
  double horizon() const noexcept { return dt_h_ * static_cast<double>(hdot_.size()); }
  bool empty() const noexcept { return hdot_.empty(); }

  /// h(t), exact for the piecewise-constant derivative.
  double value(double t) const;
  /// h at cell boundary k (k = 0 .. intervals()).
  double node(std::size_t k) const { return nodes_[k]; }
  /// hdot(t); zero outside [0, horizon).
  double rate(double t) const;
  /// ‖h‖_H = (sum hdot_i^2 dt_h)^{1/2}.
  double norm_h() const;

  friend bool operator==(const CameronMartinControl&, const CameronMartinControl&) = default;

 private:
  std::vector<double> hdot_;
  double dt_h_ = 0.0;
  std::vector<double> nodes_;
};

CameronMartinControl zero_control(std::size_t intervals, double horizon);
CameronMartinControl constant_control(double rate, std::size_t intervals, double horizon);

/// Cell averages of hdot from its antiderivative H (H(0) need not vanish), so h
/// matches H(t) - H(0) exactly at every cell boundary.
CameronMartinControl control_from_antiderivative(const std::function<double(double)>& H,
                                                 std::size_t intervals, double horizon);

}  // namespace gmlab
