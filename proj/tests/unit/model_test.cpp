#include "welfare_order/model.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "welfare_order/errors.hpp"

namespace welfare_order {
namespace {

bool has_code(const std::vector<RuleViolation>& v, RuleViolation::Code code) {
  for (const auto& item : v) {
    if (item.code == code) return true;
  }
  return false;
}

TEST(Society, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(Society({}), ConfigError);
  EXPECT_THROW(Society({1.0, 0.0}), ConfigError);
  EXPECT_THROW(Society({1.0, -2.0}), ConfigError);
  EXPECT_THROW(Society({1.0, NAN}), ConfigError);
}

TEST(Society, BoundDefaultsToMaxAndIsEnforced) {
  EXPECT_EQ(Society({3, 7, 2}).size_bound(), 7.0);
  EXPECT_EQ(Society({3, 7}, 10.0).size_bound(), 10.0);
  EXPECT_THROW(Society({3, 7}, 5.0), ConfigError);
}

TEST(Society, RepeatPattern) {
  const std::vector<double> pattern{1, 2, 3};
  const auto society = Society::repeat_pattern(pattern, 7);
  const std::vector<double> expected{1, 2, 3, 1, 2, 3, 1};
  EXPECT_EQ(std::vector<double>(society.sizes().begin(), society.sizes().end()),
            expected);
}

TEST(Society, DrawFromLimitIsReproducibleAndOnSupport) {
  const LimitDistribution limit({1, 2, 3}, {0.2, 0.3, 0.5});
  const auto a = Society::draw_from(limit, 2000, 11);
  const auto b = Society::draw_from(limit, 2000, 11);
  ASSERT_EQ(a.group_count(), 2000u);
  int threes = 0;
  for (std::size_t i = 0; i < a.group_count(); ++i) {
    EXPECT_EQ(a.sizes()[i], b.sizes()[i]);
    EXPECT_TRUE(a.sizes()[i] == 1 || a.sizes()[i] == 2 || a.sizes()[i] == 3);
    threes += a.sizes()[i] == 3;
  }
  EXPECT_NEAR(threes / 2000.0, 0.5, 0.05);
  EXPECT_TRUE(a.limit_dist().has_value());
}

TEST(LimitDistribution, Validation) {
  EXPECT_THROW(LimitDistribution({1, 2}, {0.5, 0.4}), ConfigError);
  EXPECT_THROW(LimitDistribution({0, 2}, {0.5, 0.5}), ConfigError);
  EXPECT_THROW(LimitDistribution({1, 2}, {0.5}), ConfigError);
  EXPECT_NO_THROW(LimitDistribution({1, 2, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
}

TEST(SizeLaw, Evaluation) {
  EXPECT_EQ(SizeLaw::proportional()(4.0), 4.0);
  EXPECT_EQ(SizeLaw::constant()(4.0), 1.0);
  EXPECT_DOUBLE_EQ(SizeLaw::power(0.5)(4.0), 2.0);
  EXPECT_THROW(SizeLaw::power(-1.0), ConfigError);
  const auto table = SizeLaw::table({2.0, 5.0}, {1.0, 2.0, 4.0});
  EXPECT_EQ(table(1.0), 1.0);
  EXPECT_EQ(table(2.0), 2.0);  // right-continuous
  EXPECT_EQ(table(4.9), 2.0);
  EXPECT_EQ(table(5.0), 4.0);
  EXPECT_THROW(SizeLaw::table({2.0}, {1.0}), ConfigError);
}

TEST(MaterializeWeights, SpecExamples) {
  const auto prop = materialize_weights(
      Society({3, 2, 2}), WeightAllocation::from_law(SizeLaw::proportional()));
  EXPECT_EQ(prop, (std::vector<double>{3, 2, 2}));
  const auto root = materialize_weights(
      Society({4, 1}), WeightAllocation::from_law(SizeLaw::power(0.5)));
  EXPECT_DOUBLE_EQ(root[0], 2.0);
  EXPECT_DOUBLE_EQ(root[1], 1.0);
  const auto constant = materialize_weights(
      Society({1, 1}), WeightAllocation::from_law(SizeLaw::constant()));
  EXPECT_EQ(constant, (std::vector<double>{1, 1}));
}

TEST(MaterializeWeights, ExplicitIsIdempotent) {
  const Society society({5, 2, 2});
  const auto alloc = WeightAllocation::explicit_weights({1, 0.5, 2});
  const auto once = materialize_weights(society, alloc);
  const auto twice =
      materialize_weights(society, WeightAllocation::explicit_weights(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once, (std::vector<double>{1, 0.5, 2}));
}

TEST(MaterializeWeights, Errors) {
  EXPECT_THROW(materialize_weights(Society({1, 2}),
                                   WeightAllocation::explicit_weights({1, 2, 3})),
               ConfigError);
  EXPECT_THROW(WeightAllocation::explicit_weights({0, 0, 0}), ConfigError);
  EXPECT_THROW(WeightAllocation::explicit_weights({1, -1}), ConfigError);
  EXPECT_THROW(WeightAllocation::explicit_weights({1, 5}, 2.0), ConfigError);
  // A table law that is zero on the whole society.
  const auto zero_law =
      WeightAllocation::from_law(SizeLaw::table({10.0}, {0.0, 1.0}));
  EXPECT_THROW(materialize_weights(Society({1, 2}), zero_law), ConfigError);
}

TEST(MaterializeWeights, LawsAreClippedToBound) {
  const auto alloc = WeightAllocation::from_law(SizeLaw::proportional(), 3.0);
  EXPECT_EQ(materialize_weights(Society({1, 5}), alloc),
            (std::vector<double>{1, 3}));
}

TEST(Rule, Evaluation) {
  EXPECT_EQ(eval_rule(RepresentationRule::winner_take_all(), 0.3), 1.0);
  EXPECT_EQ(eval_rule(RepresentationRule::proportional(), -0.4), -0.4);
  const auto step = RepresentationRule::step({0.2, 0.6}, {0.3, 1.0});
  for (const auto& rule : {RepresentationRule::winner_take_all(),
                           RepresentationRule::proportional(), step}) {
    EXPECT_EQ(eval_rule(rule, 0.0), 0.0);
  }
  EXPECT_EQ(eval_rule(step, 0.1), 0.0);
  EXPECT_EQ(eval_rule(step, 0.2), 0.3);
  EXPECT_EQ(eval_rule(step, 0.59), 0.3);
  EXPECT_EQ(eval_rule(step, 0.6), 1.0);
  EXPECT_EQ(eval_rule(step, -0.6), -1.0);
  EXPECT_THROW(eval_rule(step, 1.5), std::domain_error);
}

TEST(Rule, OddOnGrid) {
  const std::vector<RepresentationRule> rules{
      RepresentationRule::winner_take_all(), RepresentationRule::proportional(),
      RepresentationRule::step({0.1, 0.35, 0.8}, {0.2, 0.5, 1.0})};
  for (const auto& rule : rules) {
    for (int j = 0; j <= 1000; ++j) {
      const double x = j / 1000.0;
      EXPECT_EQ(eval_rule(rule, -x), -eval_rule(rule, x)) << rule.describe();
    }
  }
}

TEST(ValidateRule, Examples) {
  EXPECT_TRUE(validate_rule(RepresentationRule::winner_take_all()).empty());
  EXPECT_TRUE(validate_rule(RepresentationRule::proportional()).empty());
  EXPECT_TRUE(has_code(
      validate_rule(RepresentationRule::step({0.2, 0.6}, {0.5, 0.3})),
      RuleViolation::Code::kDecreasing));
  EXPECT_TRUE(has_code(
      validate_rule(RepresentationRule::step({0.2, 0.6}, {0.0, 0.0})),
      RuleViolation::Code::kIdenticallyZero));
  EXPECT_TRUE(has_code(validate_rule(RepresentationRule::step({0.2}, {1.5})),
                       RuleViolation::Code::kOutOfRange));
  EXPECT_TRUE(has_code(
      validate_rule(RepresentationRule::step({0.6, 0.2}, {0.2, 0.5})),
      RuleViolation::Code::kMalformedTable));
  EXPECT_TRUE(has_code(validate_rule(RepresentationRule::step({0.2}, {})),
                       RuleViolation::Code::kMalformedTable));
}

TEST(Margin, SecondMoments) {
  EXPECT_EQ(MarginDistribution::rademacher().second_moment(), 1.0);
  EXPECT_DOUBLE_EQ(MarginDistribution::uniform().second_moment(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(MarginDistribution::symmetric_beta(2.0).second_moment(), 0.2);
  EXPECT_DOUBLE_EQ(
      MarginDistribution::discrete_symmetric({0.5, 1.0}, {0.5, 0.5})
          .second_moment(),
      0.5 * 0.25 + 0.5);
}

TEST(Margin, Validation) {
  EXPECT_THROW(MarginDistribution::symmetric_beta(0.0), ConfigError);
  EXPECT_THROW(MarginDistribution::discrete_symmetric({0.0}, {1.0}), ConfigError);
  EXPECT_THROW(MarginDistribution::discrete_symmetric({1.5}, {1.0}), ConfigError);
  EXPECT_THROW(MarginDistribution::discrete_symmetric({0.5, 0.5}, {0.5, 0.5}),
               ConfigError);
  EXPECT_THROW(MarginDistribution::discrete_symmetric({0.5}, {0.9}), ConfigError);
  EXPECT_NO_THROW(MarginDistribution::discrete_symmetric({0.0, 1.0}, {0.5, 0.5}));
}

TEST(Margin, DiscreteSupportIsMirrored) {
  const auto dist = MarginDistribution::discrete_symmetric({0.0, 0.5}, {0.2, 0.8});
  const auto support = dist.support();
  ASSERT_EQ(support.size(), 3u);
  EXPECT_EQ(support[0].value, -0.5);
  EXPECT_DOUBLE_EQ(support[0].probability, 0.4);
  EXPECT_EQ(support[1].value, 0.0);
  EXPECT_DOUBLE_EQ(support[1].probability, 0.2);
  EXPECT_EQ(support[2].value, 0.5);
  EXPECT_THROW(MarginDistribution::uniform().support(), std::logic_error);
}

TEST(SampleMargin, RademacherSupport) {
  CounterStream stream(1, 0);
  const auto dist = MarginDistribution::rademacher();
  for (int j = 0; j < 1000; ++j) {
    const double x = sample_margin(dist, stream);
    EXPECT_TRUE(x == 1.0 || x == -1.0);
  }
}

TEST(SampleMargin, UniformMean) {
  CounterStream stream(2, 0);
  const auto dist = MarginDistribution::uniform();
  double sum = 0;
  const int m = 1'000'000;
  for (int j = 0; j < m; ++j) sum += sample_margin(dist, stream);
  EXPECT_NEAR(sum / m, 0.0, 0.005);
}

TEST(SampleMargin, BetaSecondMoment) {
  CounterStream stream(3, 0);
  const auto dist = MarginDistribution::symmetric_beta(2.0);
  double sum2 = 0;
  const int m = 1'000'000;
  for (int j = 0; j < m; ++j) {
    const double x = sample_margin(dist, stream);
    sum2 += x * x;
  }
  EXPECT_NEAR(sum2 / m, 0.2, 0.005);
}

// Odd moments vanish and E[X^2] matches the accessor within 3 se.
TEST(SampleMargin, MomentsForEveryKind) {
  const std::vector<MarginDistribution> dists{
      MarginDistribution::rademacher(), MarginDistribution::uniform(),
      MarginDistribution::symmetric_beta(0.5), MarginDistribution::symmetric_beta(3.0),
      MarginDistribution::discrete_symmetric({0.0, 0.25, 1.0}, {0.1, 0.6, 0.3})};
  for (std::size_t k = 0; k < dists.size(); ++k) {
    CounterStream stream(4, k);
    const int m = 400'000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int j = 0; j < m; ++j) {
      const double x = dists[k].sample(stream);
      ASSERT_LE(std::abs(x), 1.0);
      s1 += x;
      s2 += x * x;
      s3 += x * x * x;
      s4 += x * x * x * x;
    }
    const double ex2 = dists[k].second_moment();
    EXPECT_NEAR(s1 / m, 0.0, 4.0 * std::sqrt(ex2 / m)) << dists[k].describe();
    EXPECT_NEAR(s3 / m, 0.0, 0.01) << dists[k].describe();
    const double sd2 = std::sqrt(std::max(s4 / m - ex2 * ex2, 1e-30) / m);
    EXPECT_NEAR(s2 / m, ex2, 3.0 * sd2 + 1e-12) << dists[k].describe();
  }
}

TEST(ExpectEven, MatchesClosedForms) {
  auto abs_x = [](double x) { return std::abs(x); };
  EXPECT_NEAR(MarginDistribution::uniform().expect_even(abs_x), 0.5, 1e-13);
  // E|2B - 1| for B ~ Beta(a, a) is Gamma(a + 1/2) / (sqrt(pi) Gamma(a + 1)).
  for (double a : {0.3, 0.5, 1.0, 2.0, 7.5}) {
    const double expected =
        std::exp(std::lgamma(a + 0.5) - std::lgamma(a + 1.0)) / std::sqrt(M_PI);
    EXPECT_NEAR(MarginDistribution::symmetric_beta(a).expect_even(abs_x, {}, 1e-12),
                expected, 1e-10)
        << a;
    EXPECT_NEAR(MarginDistribution::symmetric_beta(a).expect_even(
                    [](double) { return 1.0; }, {}, 1e-12),
                1.0, 1e-10)
        << a;
  }
}

}  // namespace
}  // namespace welfare_order
