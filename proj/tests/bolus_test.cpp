#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "glucoscope/bolus/advisor.hpp"

using namespace glucoscope;
using namespace glucoscope::bolus;

TEST(InsulinOnBoard, Examples) {
  std::vector<PriorDose> fresh{{4, 0}};
  EXPECT_EQ(insulin_on_board(fresh, 240), 4.0);
  std::vector<PriorDose> spent{{4, 240}};
  EXPECT_EQ(insulin_on_board(spent, 240), 0.0);
  std::vector<PriorDose> mixed{{4, 120}, {2, 60}};
  EXPECT_NEAR(insulin_on_board(mixed, 240), 3.5, 1e-12);
  std::vector<PriorDose> old{{4, 500}};
  EXPECT_EQ(insulin_on_board(old, 240), 0.0);
  EXPECT_EQ(insulin_on_board({}, 240), 0.0);
}

TEST(InsulinOnBoard, NegativeAgeIsAnError) {
  std::vector<PriorDose> future{{1, -1}};
  EXPECT_THROW(insulin_on_board(future, 240), std::invalid_argument);
}

TEST(Recommend, Examples) {
  PatientSettings s;
  EXPECT_EQ(recommend(40, s.g_target, s, {}).total, 4.0);
  EXPECT_EQ(recommend(0, s.g_target, s, {}).total, 0.0);

  std::vector<PriorDose> prior{{1.5, 0}};
  auto b = recommend(60, 12.5, s, prior);
  EXPECT_DOUBLE_EQ(b.meal_component, 6.0);
  EXPECT_DOUBLE_EQ(b.correction_component, 2.0);
  EXPECT_DOUBLE_EQ(b.iob_deduction, 1.5);
  EXPECT_EQ(b.total, 6.5);
}

TEST(Recommend, ClampsAtZeroBelowTarget) {
  PatientSettings s;
  auto b = recommend(0, 4.0, s, {});
  EXPECT_LT(b.correction_component, 0.0);
  EXPECT_EQ(b.total, 0.0);
}

TEST(RoundHalfUnit, NearestWithTiesUp) {
  EXPECT_EQ(round_half_unit(0.0), 0.0);
  EXPECT_EQ(round_half_unit(0.24), 0.0);
  EXPECT_EQ(round_half_unit(0.25), 0.5);
  EXPECT_EQ(round_half_unit(0.74), 0.5);
  EXPECT_EQ(round_half_unit(0.75), 1.0);
  EXPECT_EQ(round_half_unit(4.0), 4.0);
  // 35 / 10 and friends must not fall off a tie through representation error.
  EXPECT_EQ(round_half_unit(0.3 / 0.4), 1.0);
}

TEST(Recommend, Properties) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> carbs(0, 200), glucose(2, 25), units(0, 10), age(0, 300);
  PatientSettings s;
  for (int i = 0; i < 5000; ++i) {
    std::vector<PriorDose> prior;
    for (int k = 0; k < 3; ++k) prior.push_back({units(rng), age(rng)});
    const double c = carbs(rng), g = glucose(rng);
    auto b = recommend(c, g, s, prior);

    ASSERT_GE(b.total, 0.0);
    ASSERT_EQ(b.total * 2, std::floor(b.total * 2));
    const double raw = b.meal_component + b.correction_component - b.iob_deduction;
    if (raw > 0.25) {
      ASSERT_LE(std::abs(b.total - raw), 0.25 + 1e-9);
    }

    // More carbs or higher glucose never lowers the dose; more IOB never raises it.
    ASSERT_GE(recommend(c + 10, g, s, prior).total, b.total);
    ASSERT_GE(recommend(c, g + 1, s, prior).total, b.total);
    prior.push_back({units(rng), 0});
    ASSERT_LE(recommend(c, g, s, prior).total, b.total);
  }
}
