// Sample moments and the one-sided Welch t-test against a frozen reference
// computed independently (scipy.stats.ttest_ind, equal_var=False).

#include "ctsim/stats.hpp"

#include <gtest/gtest.h>

namespace ctsim {
namespace {

TEST(Stats, MeanAndVarianceBasics) {
  EXPECT_DOUBLE_EQ(mean({2.0, 4.0, 6.0}), 4.0);
  EXPECT_DOUBLE_EQ(sample_variance({2.0, 4.0, 6.0}), 4.0);
  EXPECT_THROW(mean({}), std::invalid_argument);
  EXPECT_THROW(sample_variance({1.0}), std::invalid_argument);
}

TEST(Stats, WelchMatchesFrozenReference) {
  std::vector<double> a = {1.1, 2.3, 1.9, 2.8, 2.2, 1.7};
  std::vector<double> b = {0.9, 1.2, 0.5, 1.4, 1.1};
  // scipy: t = 3.4778898608396136, one-sided p = 0.003977520282252265
  EXPECT_NEAR(welch_p_value_greater(a, b), 0.003977520282252265, 1e-12);
}

TEST(Stats, WelchIsDirectional) {
  std::vector<double> hi = {5.0, 5.1, 4.9, 5.2};
  std::vector<double> lo = {1.0, 1.1, 0.9, 1.2};
  EXPECT_LT(welch_p_value_greater(hi, lo), 1e-6);
  EXPECT_GT(welch_p_value_greater(lo, hi), 1.0 - 1e-6);
}

TEST(Stats, IdenticalSamplesAreInconclusive) {
  std::vector<double> a = {1.0, 2.0, 3.0};
  EXPECT_NEAR(welch_p_value_greater(a, a), 0.5, 1e-12);
}

}  // namespace
}  // namespace ctsim
