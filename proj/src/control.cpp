#include "gmlab/control.hpp"

#include <algorithm>
#include <cmath>

#include "gmlab/errors.hpp"

namespace gmlab {

CameronMartinControl::CameronMartinControl(std::vector<double> hdot, double dt_h)
    : hdot_(std::move(hdot)), dt_h_(dt_h) {
  if (hdot_.empty()) throw InvalidParameter("hdot", "need at least one interval");
  if (!(dt_h_ > 0.0) || !std::isfinite(dt_h_)) throw InvalidParameter("dt_h", "must be > 0");
  for (double v : hdot_)
    if (!std::isfinite(v)) throw InvalidParameter("hdot", "values must be finite");
  nodes_.resize(hdot_.size() + 1);
  nodes_[0] = 0.0;
  for (std::size_t k = 0; k < hdot_.size(); ++k) nodes_[k + 1] = nodes_[k] + hdot_[k] * dt_h_;
}

double CameronMartinControl::value(double t) const {
  if (hdot_.empty() || t <= 0.0) return 0.0;
  const double pos = t / dt_h_;
  const std::size_t m = hdot_.size();
  if (pos >= static_cast<double>(m)) return nodes_[m];
  auto k = static_cast<std::size_t>(pos);
  // Hit cell boundaries exactly despite roundoff in t / dt_h.
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) <= 1e-9 * std::max(1.0, pos)) return nodes_[static_cast<std::size_t>(nearest)];
  k = std::min(k, m - 1);
  return nodes_[k] + hdot_[k] * (t - static_cast<double>(k) * dt_h_);
}

double CameronMartinControl::rate(double t) const {
  if (hdot_.empty() || t < 0.0) return 0.0;
  const auto k = static_cast<std::size_t>(t / dt_h_);
  return k < hdot_.size() ? hdot_[k] : 0.0;
}

double CameronMartinControl::norm_h() const {
  double acc = 0.0;
  for (double v : hdot_) acc += v * v;
  return std::sqrt(acc * dt_h_);
}

CameronMartinControl zero_control(std::size_t intervals, double horizon) {
  return constant_control(0.0, intervals, horizon);
}

CameronMartinControl constant_control(double rate, std::size_t intervals, double horizon) {
  if (intervals == 0) throw InvalidParameter("intervals", "must be >= 1");
  return CameronMartinControl(std::vector<double>(intervals, rate),
                              horizon / static_cast<double>(intervals));
}

CameronMartinControl control_from_antiderivative(const std::function<double(double)>& H,
                                                 std::size_t intervals, double horizon) {
  if (intervals == 0) throw InvalidParameter("intervals", "must be >= 1");
  const double dt_h = horizon / static_cast<double>(intervals);
  std::vector<double> hdot(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    const double a = static_cast<double>(k) * dt_h;
    const double b = static_cast<double>(k + 1) * dt_h;
    hdot[k] = (H(b) - H(a)) / dt_h;
  }
  return CameronMartinControl(std::move(hdot), dt_h);
}

}  // namespace gmlab
