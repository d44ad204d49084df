#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gmlab/errors.hpp"
#include "gmlab/model.hpp"

using namespace gmlab;

namespace {

RawParams canonical_raw(int dim = 1) {
  RawParams r;
  r.p = 2.0;
  r.q = 1.0;
  r.alpha = 2.0;
  r.beta = 0.0;
  r.sigma = 0.0;
  r.zeta = 1.0;
  r.dim = dim;
  r.domain_length = 1.0;
  return r;
}

}  // namespace

TEST(ValidateParams, CanonicalExponentsAreGlobalInOneDimension) {
  const ModelParams m = validate_params(canonical_raw(1));
  EXPECT_TRUE(m.global_ok);  // 1/2 < 1 and 1/2 < 2/3
  EXPECT_EQ(m, canonical_params());
}

TEST(ValidateParams, CanonicalExponentsFailInThreeDimensions) {
  EXPECT_FALSE(validate_params(canonical_raw(3)).global_ok);  // 1/2 > 2/5
}

TEST(ValidateParams, RejectsNonPositiveZeta) {
  RawParams r = canonical_raw();
  r.zeta = 0.0;
  try {
    validate_params(r);
    FAIL() << "expected InvalidParameter";
  } catch (const InvalidParameter& e) {
    EXPECT_EQ(e.field(), "zeta");
  }
}

TEST(ValidateParams, NamesMissingAndNonFiniteFields) {
  RawParams r = canonical_raw();
  r.q.reset();
  try {
    validate_params(r);
    FAIL();
  } catch (const InvalidParameter& e) {
    EXPECT_EQ(e.field(), "q");
  }
  r = canonical_raw();
  r.alpha = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(validate_params(r), InvalidParameter);
  r = canonical_raw();
  r.p = 1.0;
  EXPECT_THROW(validate_params(r), InvalidParameter);
  r = canonical_raw();
  r.sigma = -0.1;
  EXPECT_THROW(validate_params(r), InvalidParameter);
}

TEST(ValidateParams, IdempotentThroughRawRecord) {
  RawParams r = canonical_raw();
  r.sigma = 0.7;
  r.zeta = 2.5;
  r.beta = 0.3;
  const ModelParams once = validate_params(r);
  EXPECT_EQ(validate_params(to_raw(once)), once);
}

TEST(GlobalCondition, MonotoneInPAndAlpha) {
  // Scan a grid: lowering p or raising alpha must never turn true into false.
  for (double p = 1.1; p < 4.0; p += 0.1) {
    for (double alpha = 0.5; alpha < 4.0; alpha += 0.25) {
      const bool ok = global_existence_condition(p, 1.0, alpha, 0.5, 1);
      if (!ok) continue;
      EXPECT_TRUE(global_existence_condition(p - 0.05, 1.0, alpha, 0.5, 1));
      EXPECT_TRUE(global_existence_condition(p, 1.0, alpha + 0.1, 0.5, 1));
    }
  }
}

TEST(GlobalCondition, BlowupExponentsFail) {
  EXPECT_FALSE(global_existence_condition(5.0, 1.0, 1.0, 0.0, 1));
}

TEST(Grid, SpacingAndLayout) {
  EXPECT_DOUBLE_EQ(make_grid(4, 1, 1.0).h(), 0.25);
  EXPECT_DOUBLE_EQ(make_grid(128, 1, 1.0).h(), 1.0 / 128.0);
  EXPECT_THROW(make_grid(3, 1, 1.0), InvalidParameter);
  EXPECT_THROW(make_grid(8, 3, 1.0), InvalidParameter);
  EXPECT_THROW(make_grid(8, 1, 0.0), InvalidParameter);
  const Grid g = make_grid(8, 2, 2.0);
  EXPECT_EQ(g.cell_count(), 64u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.0625);
  EXPECT_DOUBLE_EQ(g.center(0), 0.125);
}

TEST(Field, SampleFieldRowMajorIn2D) {
  const Grid g = make_grid(4, 2, 1.0);
  const Field f = sample_field(g, [](double x, double y) { return x + 10.0 * y; });
  // Row i holds y = center(i); x runs fastest.
  EXPECT_DOUBLE_EQ(f[1], g.center(1) + 10.0 * g.center(0));
  EXPECT_DOUBLE_EQ(f[4], g.center(0) + 10.0 * g.center(1));
}

TEST(Field, NormsAndFiniteness) {
  Field f(std::vector<double>{-3.0, 1.0, 2.0});
  EXPECT_DOUBLE_EQ(f.min(), -3.0);
  EXPECT_DOUBLE_EQ(f.max(), 2.0);
  EXPECT_DOUBLE_EQ(f.max_abs(), 3.0);
  EXPECT_TRUE(f.all_finite());
  EXPECT_NEAR(normalized_l2(f), std::sqrt(14.0 / 3.0), 1e-15);
  f[1] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(f.all_finite());
}
