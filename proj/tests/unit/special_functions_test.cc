#include "contam/special_functions.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles/reference_values.h"

namespace contam {
namespace {

TEST(SpecialFunctions, TSfMatchesReferenceTable) {
  ASSERT_GE(reference::kTSf.size(), 20u);
  for (const auto& p : reference::kTSf) {
    EXPECT_NEAR(t_sf(p.t, p.df), p.sf, 1e-10) << "t=" << p.t << " df=" << p.df;
    // Far tails keep relative accuracy too.
    EXPECT_NEAR(t_sf(p.t, p.df) / p.sf, 1.0, 1e-9) << "t=" << p.t << " df=" << p.df;
  }
}

TEST(SpecialFunctions, Chi2SfMatchesReferenceTable) {
  ASSERT_GE(reference::kChi2Sf.size(), 20u);
  for (const auto& p : reference::kChi2Sf) {
    EXPECT_NEAR(chi2_sf(p.x, p.df), p.sf, 1e-10) << "x=" << p.x << " df=" << p.df;
    EXPECT_NEAR(chi2_sf(p.x, p.df) / p.sf, 1.0, 1e-9) << "x=" << p.x << " df=" << p.df;
  }
}

TEST(SpecialFunctions, TSfSymmetry) {
  for (double df : {1.0, 2.5, 10.0, 49.0, 200.0})
    for (double t : {0.1, 0.7, 1.5, 3.0, 8.0})
      EXPECT_NEAR(t_sf(-t, df), 1.0 - t_sf(t, df), 1e-14);
  EXPECT_DOUBLE_EQ(t_sf(0.0, 7.0), 0.5);
}

TEST(SpecialFunctions, TSfCauchyClosedForm) {
  for (double t : {-5.0, -1.0, 0.3, 2.0, 100.0})
    EXPECT_NEAR(t_sf(t, 1.0), 0.5 - std::atan(t) / std::numbers::pi, 1e-14);
}

TEST(SpecialFunctions, Chi2TwoDegreesClosedForm) {
  for (double x : {0.0, 0.01, 1.0, 5.99, 40.0, 700.0})
    EXPECT_NEAR(chi2_sf(x, 2.0), std::exp(-x / 2.0), 1e-15);
}

TEST(SpecialFunctions, InfiniteArguments) {
  EXPECT_EQ(t_sf(INFINITY, 5.0), 0.0);
  EXPECT_EQ(t_sf(-INFINITY, 5.0), 1.0);
  EXPECT_EQ(chi2_sf(INFINITY, 5.0), 0.0);
  EXPECT_EQ(chi2_sf(0.0, 5.0), 1.0);
}

TEST(SpecialFunctions, InvalidArgumentsGiveNaN) {
  EXPECT_TRUE(std::isnan(t_sf(1.0, 0.0)));
  EXPECT_TRUE(std::isnan(t_sf(NAN, 3.0)));
  EXPECT_TRUE(std::isnan(chi2_sf(1.0, -1.0)));
  EXPECT_TRUE(std::isnan(regularized_gamma_p(0.0, 1.0)));
}

TEST(SpecialFunctions, IncompleteBetaAndGammaIdentities) {
  // I_x(1, 1) = x;  I_x(a, b) = 1 - I_{1-x}(b, a);  P + Q = 1.
  for (double x : {0.0, 0.2, 0.5, 0.93, 1.0}) EXPECT_NEAR(regularized_beta(x, 1, 1), x, 1e-15);
  EXPECT_NEAR(regularized_beta(0.3, 2.5, 7.0), 1.0 - regularized_beta(0.7, 7.0, 2.5), 1e-14);
  for (double a : {0.5, 3.0, 40.0})
    for (double x : {0.1, 2.0, 39.0, 60.0})
      EXPECT_NEAR(regularized_gamma_p(a, x) + regularized_gamma_q(a, x), 1.0, 1e-14);
}

}  // namespace
}  // namespace contam
