#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracle/enumeration.hpp"
#include "support.hpp"
#include "trajirl/error.hpp"
#include "trajirl/visitation.hpp"

using namespace trajirl;

namespace {

Policy one_hot(const GridSpec& spec, int action) {
  Policy p{spec, std::vector<double>(spec.num_states() * kNumActions, 0.0)};
  for (std::size_t s = 0; s < spec.num_states(); ++s) {
    p.probs[s * kNumActions + static_cast<std::size_t>(action)] = 1.0;
  }
  return p;
}

Policy uniform(const GridSpec& spec) {
  return Policy{spec, std::vector<double>(spec.num_states() * kNumActions, 1.0 / kNumActions)};
}

Policy random_policy(const GridSpec& spec, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Policy p{spec, std::vector<double>(spec.num_states() * kNumActions)};
  for (std::size_t s = 0; s < spec.num_states(); ++s) {
    double sum = 0.0;
    for (int a = 0; a < kNumActions; ++a) sum += p.probs[s * kNumActions + a] = u(gen);
    for (int a = 0; a < kNumActions; ++a) p.probs[s * kNumActions + a] /= sum;
  }
  return p;
}

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(ForwardPass, AlwaysEastMarchesIntoGoal) {
  const GridSpec spec = GridSpec::unit(4, 1);
  const auto field = forward_pass(one_hot(spec, 2), spec, {0, 0, 0}, {3, 0, 0}, 3);
  EXPECT_EQ(field.d, (std::vector<double>{1.0, 1.0, 1.0, 0.0}));
  EXPECT_EQ(field.absorbed, 0.0);
  const auto longer = forward_pass(one_hot(spec, 2), spec, {0, 0, 0}, {3, 0, 0}, 6);
  EXPECT_EQ(longer.d, (std::vector<double>{1.0, 1.0, 1.0, 0.0}));
  EXPECT_EQ(longer.absorbed, 1.0);
}

TEST(ForwardPass, SingleStepIsStartOnly) {
  const GridSpec spec = GridSpec::unit(3, 3);
  const auto field = forward_pass(uniform(spec), spec, {1, 2, 0}, {0, 0, 0}, 1);
  for (std::size_t i = 0; i < spec.cells(); ++i) {
    EXPECT_EQ(field.d[i], i == spec.cell_index(1, 2) ? 1.0 : 0.0);
  }
}

TEST(ForwardPass, UniformTwoStepsMatchesEnumeration) {
  const GridSpec spec = GridSpec::unit(3, 3);
  const Policy policy = uniform(spec);
  const State start{1, 1, 0}, goal{2, 2, 0};
  // expand the 8 first actions by hand
  std::vector<double> expected(9, 0.0);
  double absorbed = 0.0;
  expected[spec.cell_index(1, 1)] += 1.0;
  for (const auto& a : kActions) {
    const State n = successor(start, a, spec);
    if (n == goal) {
      absorbed += 1.0 / 8;
      continue;
    }
    expected[spec.cell_index(n.x, n.y)] += 1.0 / 8;
  }
  const auto field = forward_pass(policy, spec, start, goal, 2);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(field.d[i], expected[i], 1e-15);
  EXPECT_EQ(field.absorbed, absorbed);
}

TEST(ForwardPass, MatchesBruteForceEnumeration) {
  std::mt19937 gen(8);
  for (int w : {3, 4}) {
    const GridSpec spec = GridSpec::unit(w, 3);
    for (int trial = 0; trial < 5; ++trial) {
      const Policy policy = random_policy(spec, gen);
      const State start{0, 1, 0}, goal{w - 1, 2, 0};
      for (int n = 1; n <= 5; ++n) {
        const auto want = oracle::brute_force_visitation(policy, start, goal, n);
        for (Exec exec : {Exec::serial, Exec::parallel}) {
          const auto got = forward_pass(policy, spec, start, goal, n, {false, exec});
          for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got.d[i], want[i], 1e-10);
        }
      }
    }
  }
}

TEST(ForwardPass, TimeAugmentedMatchesBruteForce) {
  std::mt19937 gen(12);
  const GridSpec spec = GridSpec::unit(3, 3, 5);
  const Policy policy = random_policy(spec, gen);
  const auto want = oracle::brute_force_visitation(policy, {0, 0, 0}, {2, 1, 0}, 5);
  const auto got = forward_pass(policy, spec, {0, 0, 0}, {2, 1, 0}, 5);
  ASSERT_EQ(got.d.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got.d[i], want[i], 1e-10);
  for (int z = 0; z < 5; ++z) {
    double layer = 0.0;
    for (std::size_t c = 0; c < 9; ++c) layer += got.d[static_cast<std::size_t>(z) * 9 + c];
    // one unit of mass per layer, removed only at the final goal
    EXPECT_NEAR(layer, z < 4 ? 1.0 : 1.0 - got.absorbed, 1e-12);
  }
  const auto planar = got.planar();
  EXPECT_EQ(planar.size(), 9u);
  EXPECT_NEAR(total(planar), total(got.d), 1e-12);
}

TEST(ForwardPass, MassNonIncreasingAndNonNegative) {
  std::mt19937 gen(31);
  const GridSpec spec = GridSpec::unit(6, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const Policy policy = random_policy(spec, gen);
    const auto field = forward_pass(policy, spec, {0, 0, 0}, {3, 2, 0}, 25, {true, Exec::parallel});
    ASSERT_EQ(field.per_step.size(), 25u);
    double prev = total(field.per_step[0]);
    for (std::size_t n = 1; n < field.per_step.size(); ++n) {
      const double mass = total(field.per_step[n]);
      EXPECT_LE(mass, prev + 1e-12);
      prev = mass;
    }
    for (double v : field.d) EXPECT_GE(v, 0.0);
    EXPECT_NEAR(total(field.per_step.back()) + field.absorbed, 1.0, 1e-12);
    EXPECT_EQ(field.d[spec.cell_index(3, 2)], 0.0);
  }
}

TEST(ForwardPass, StrictDecreaseExactlyWhenGoalReached) {
  const GridSpec spec = GridSpec::unit(5, 1);
  const auto field = forward_pass(one_hot(spec, 2), spec, {0, 0, 0}, {3, 0, 0}, 6, {true});
  std::vector<double> mass;
  for (const auto& step : field.per_step) mass.push_back(total(step));
  EXPECT_EQ(mass, (std::vector<double>{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}));
}

TEST(ForwardPass, Validation) {
  const GridSpec spec = GridSpec::unit(3, 3);
  EXPECT_THROW(forward_pass(uniform(spec), spec, {0, 0, 0}, {1, 1, 0}, 0), InvalidArgument);
  EXPECT_THROW(forward_pass(uniform(spec), spec, {3, 0, 0}, {1, 1, 0}, 2), OutOfBounds);
  EXPECT_THROW(forward_pass(uniform(GridSpec::unit(4, 3)), spec, {0, 0, 0}, {1, 1, 0}, 2),
               DimensionMismatch);
}
