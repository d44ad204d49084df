#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gmlab/control.hpp"
#include "gmlab/errors.hpp"
#include "gmlab/inhibitor.hpp"
#include "gmlab/rng.hpp"
#include "oracles.hpp"

using namespace gmlab;

namespace {

ModelParams with(double sigma, double beta = 0.0, double zeta = 1.0) {
  ModelParams m = canonical_params(sigma, zeta);
  m.beta = beta;
  return m;
}

// Runs the exact step along `path` with constant forcing c.
double terminal_xi(const BrownianPath& path, double c, const ModelParams& m) {
  XiState s = initial_xi_state(m.zeta, m.beta);
  for (std::size_t k = 0; k < path.steps(); ++k)
    s = step_xi_exact(s, c, path.dt, path.increment(k), 0.0, m.sigma, m);
  return s.xi;
}

}  // namespace

TEST(XiStep, ZeroForcingReproducesGeometricSolution) {
  const ModelParams m = with(1.0, 0.4, 1.3);
  const BrownianPath path = sample_brownian(1000, 1.0, 77);
  XiState s = initial_xi_state(m.zeta, m.beta);
  for (std::size_t k = 0; k < path.steps(); ++k) {
    s = step_xi_exact(s, 0.0, path.dt, path.increment(k), 0.0, m.sigma, m);
    const double t = path.dt * static_cast<double>(k + 1);
    const double exact = m.zeta * std::exp(-1.5 * t + path.values[k + 1]);
    EXPECT_NEAR(s.xi / exact, 1.0, 1e-10);
    EXPECT_NEAR(std::pow(s.xi, 1.0 + m.beta) / s.eta, 1.0, 1e-12);
  }
}

TEST(XiStep, ConstantForcingRelaxesToForcingLevel) {
  // beta = 0, sigma = 0: xi' = -xi + c. The forcing is integrated exactly against the
  // decay, so xi = c is a fixed point of the step itself.
  const ModelParams m = with(0.0, 0.0, 2.0);
  const double c = 2.0, dt = 1e-3;
  XiState s = initial_xi_state(c, 0.0);
  s = step_xi_exact(s, c, dt, 0.0, 0.0, 0.0, m);
  EXPECT_NEAR(s.xi, c, 1e-14);

  XiState far = initial_xi_state(0.1, 0.0);
  for (int k = 0; k < 1000; ++k) far = step_xi_exact(far, c, dt, 0.0, 0.0, 0.0, m);
  EXPECT_NEAR(far.xi, c + (0.1 - c) * std::exp(-1.0), 1e-12);
}

TEST(XiStep, ForcingWeightNeverExceedsLeftEndpointSum) {
  const ModelParams m = with(1.0, 0.5, 1.0);
  for (double dB : {-0.3, 0.0, 0.2}) {
    const XiState zero = initial_xi_state(1.0, 0.5);
    const XiState a = step_xi_exact(zero, 0.0, 0.01, dB, 0.0, 1.0, m);
    const XiState b = step_xi_exact(zero, 1.0, 0.01, dB, 0.0, 1.0, m);
    const double kick = std::exp(1.5 * dB);
    EXPECT_GT(b.eta - a.eta, 0.0);
    EXPECT_LE(b.eta - a.eta, 1.5 * kick * 0.01);
  }
}

TEST(XiStep, StaysPositiveUnderViolentNoise) {
  const ModelParams m = with(3.0, 1.0, 1e-3);
  const BrownianPath path = sample_brownian(5000, 5.0, 123);
  XiState s = initial_xi_state(m.zeta, m.beta);
  for (std::size_t k = 0; k < path.steps(); ++k) {
    s = step_xi_exact(s, 0.0, path.dt, path.increment(k), 0.0, m.sigma, m);
    ASSERT_GT(s.xi, 0.0);
  }
}

TEST(XiStep, PathwiseLowerBoundWithForcingAndControl) {
  const ModelParams m = with(0.8, 0.5, 0.7);
  const BrownianPath path = sample_brownian(800, 1.0, 31);
  const CameronMartinControl h = constant_control(-0.6, 16, 1.0);
  XiState s = initial_xi_state(m.zeta, m.beta);
  for (std::size_t k = 0; k < path.steps(); ++k) {
    const double t0 = path.dt * static_cast<double>(k), t1 = t0 + path.dt;
    s = step_xi_exact(s, 0.3 + std::sin(t0), path.dt, path.increment(k), h.value(t1) - h.value(t0),
                      m.sigma, m);
    const double bound = xi_closed_form_zero_forcing(m.zeta, t1, path.values[k + 1], h.value(t1),
                                                     m.sigma, m.beta);
    EXPECT_GE(s.xi, bound * (1.0 - 1e-10));
  }
}

TEST(XiStep, StrongErrorUnderBridgeRefinement) {
  // Constant forcing, sigma = 1: terminal xi at dt vs dt/2 on bridge-coupled paths.
  const ModelParams m = with(1.0);
  std::vector<double> hs, errs;
  for (std::size_t n : {16u, 32u, 64u, 128u}) {
    double acc = 0.0;
    const std::size_t paths = 400;
    for (std::size_t i = 0; i < paths; ++i) {
      const BrownianPath coarse = sample_brownian(n, 1.0, stream_seed(41, i));
      const BrownianPath fine = refine_bridge(coarse, stream_seed(42, i));
      acc += std::abs(terminal_xi(coarse, 1.0, m) - terminal_xi(fine, 1.0, m));
    }
    hs.push_back(1.0 / static_cast<double>(n));
    errs.push_back(acc / static_cast<double>(paths));
  }
  EXPECT_GE(oracle::fitted_order(hs, errs), 0.5);
}

TEST(XiClosedForm, ElementaryCases) {
  EXPECT_NEAR(xi_closed_form_zero_forcing(2.0, 0.7, 0.3, 0.0, 1.0, 0.0),
              2.0 * std::exp(-1.5 * 0.7 + 0.3), 1e-15);
  EXPECT_NEAR(xi_closed_form_zero_forcing(2.0, 0.7, 5.0, 0.0, 0.0, 0.0), 2.0 * std::exp(-0.7), 1e-15);
  // h(t) = t cancels the unit decay.
  EXPECT_NEAR(xi_closed_form_zero_forcing(1.7, 0.9, 0.0, 0.9, 0.0, 2.0), 1.7, 1e-15);
}

TEST(Martingale, ZeroNoiseAndUnitInhibitor) {
  XiState s = initial_xi_state(1.0, 0.0);
  for (int k = 0; k < 10; ++k) s = accumulate_martingale(s, 0.0, 0.5);
  EXPECT_EQ(s.m_delta, 0.0);

  const BrownianPath path = sample_brownian(100, 1.0, 8);
  XiState one = initial_xi_state(1.0, 0.0);
  for (std::size_t k = 0; k < path.steps(); ++k) {
    one = accumulate_martingale(one, path.increment(k), 0.5);
    EXPECT_NEAR(one.m_delta, path.values[k + 1], 1e-12);
  }
  EXPECT_NEAR(one.m_delta_abs_sup, path.sup_abs.back(), 1e-12);
  EXPECT_THROW(accumulate_martingale(one, 0.1, 0.0), InvalidParameter);
}
