#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "trajirl/error.hpp"
#include "trajirl/reward.hpp"

using namespace trajirl;

namespace {

// 2x1 map whose channels are constant, so the cell features are the given values.
FeatureMap constant_features(const std::vector<double>& f) {
  std::vector<std::vector<double>> channels;
  for (double v : f) channels.push_back({v, v});
  return FeatureMap(2, 1, channels);
}

}  // namespace

TEST(StateReward, SingleFeature) {
  EXPECT_DOUBLE_EQ(state_reward(State{0, 0, 0}, Theta({-1.0}), constant_features({0.5})), -0.5);
}

TEST(StateReward, ZeroFeatures) {
  EXPECT_EQ(state_reward(State{1, 0, 0}, Theta({-1.0, -2.0}), constant_features({0.0, 0.0})), 0.0);
}

TEST(StateReward, DotProduct) {
  EXPECT_NEAR(state_reward(State{0, 0, 0}, Theta({-0.5, -1.5}), constant_features({1.0, 0.2})),
              -0.8, 1e-15);
}

TEST(StateReward, DimensionMismatch) {
  EXPECT_THROW(state_reward(State{0, 0, 0}, Theta({-1.0}), constant_features({0.5, 0.5})),
               DimensionMismatch);
}

TEST(StateReward, LinearInTheta) {
  const GridSpec spec = GridSpec::unit(4, 4);
  const FeatureMap f = support::three_channel_features(spec);
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> w(-3.0, -0.1), c(0.1, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Theta t1({w(gen), w(gen), w(gen)}), t2({w(gen), w(gen), w(gen)});
    const double a = c(gen), b = c(gen);
    const Theta mix({a * t1[0] + b * t2[0], a * t1[1] + b * t2[1], a * t1[2] + b * t2[2]});
    for (std::size_t cell = 0; cell < spec.cells(); ++cell) {
      EXPECT_NEAR(state_reward(cell, mix, f),
                  a * state_reward(cell, t1, f) + b * state_reward(cell, t2, f), 1e-12);
      EXPECT_LE(state_reward(cell, t1, f), 0.0);
    }
  }
}

TEST(DistP, AxisMove) { EXPECT_EQ(dist_p({0, 0, 0}, {1, 0, 0}, 2.0), 1.0); }

TEST(DistP, DiagonalP2) { EXPECT_NEAR(dist_p({0, 0, 0}, {1, 1, 0}, 2.0), std::sqrt(2.0), 1e-12); }

TEST(DistP, DiagonalP3) {
  EXPECT_NEAR(dist_p({0, 0, 0}, {1, 1, 0}, 3.0), std::cbrt(2.0), 1e-12);
}

TEST(DistP, SelfTransitionIsOne) {
  EXPECT_EQ(dist_p({2, 2, 0}, {2, 2, 0}, 2.0), 1.0);
  EXPECT_EQ(dist_p({2, 2, 3}, {2, 2, 4}, 3.0), 1.0);
}

TEST(DistP, SymmetricAndReflectionInvariant) {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (const auto& a : kActions) {
      const State s{5, 5, 0}, n{5 + a.dx, 5 + a.dy, 0};
      const double d = dist_p(s, n, p);
      EXPECT_EQ(d, dist_p(n, s, p));
      EXPECT_EQ(d, dist_p({-s.x, s.y, 0}, {-n.x, n.y, 0}, p));
      EXPECT_EQ(d, dist_p({s.x, -s.y, 0}, {n.x, -n.y, 0}, p));
    }
  }
}

TEST(DistanceNorm, RejectsBadP) {
  EXPECT_THROW(DistanceNorm::lp(0.5), InvalidArgument);
  EXPECT_THROW(DistanceNorm::lp(NAN), InvalidArgument);
  EXPECT_NO_THROW(DistanceNorm::lp(1.0));
}

TEST(TransitionReward, DiagonalP2) {
  const FeatureMap f = FeatureMap(3, 3, {std::vector<double>(9, 1.0)});
  EXPECT_NEAR(transition_reward({0, 0, 0}, {1, 1, 0}, Theta({-1.0}), f, DistanceNorm::lp(2)),
              -1.0 / std::sqrt(2.0), 1e-12);
}

TEST(TransitionReward, AxisAnyP) {
  const FeatureMap f = FeatureMap(3, 3, {std::vector<double>(9, 1.0)});
  for (double p : {1.0, 2.0, 3.0, 7.5}) {
    EXPECT_EQ(transition_reward({1, 1, 0}, {1, 2, 0}, Theta({-1.0}), f, DistanceNorm::lp(p)), -1.0);
  }
}

TEST(TransitionReward, NoNormIsStateReward) {
  const GridSpec spec = GridSpec::unit(4, 4);
  const FeatureMap f = support::three_channel_features(spec);
  const Theta theta({-0.4, -1.2, -2.0});
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      for (const auto& a : kActions) {
        const State s{x, y, 0};
        const State n = successor(s, a, spec);
        EXPECT_EQ(transition_reward(s, n, theta, f, DistanceNorm::none()),
                  state_reward(s, theta, f));
      }
    }
  }
}

TEST(TransitionReward, DiagonalCheaperThanAxis) {
  const FeatureMap f = FeatureMap(3, 3, {std::vector<double>(9, 1.0)});
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> w(-50.0, -1e-6);
  for (double p : {1.0, 2.0, 3.0, 10.0}) {
    for (int i = 0; i < 200; ++i) {
      const Theta theta({w(gen)});
      const double diag =
          transition_reward({1, 1, 0}, {2, 2, 0}, theta, f, DistanceNorm::lp(p));
      const double axis =
          transition_reward({1, 1, 0}, {2, 1, 0}, theta, f, DistanceNorm::lp(p));
      EXPECT_LT(std::abs(diag), std::abs(axis));
    }
  }
}

TEST(TransitionReward, LengthScaledCostsMore) {
  const FeatureMap f = FeatureMap(3, 3, {std::vector<double>(9, 1.0)});
  const double diag = transition_reward({1, 1, 0}, {2, 2, 0}, Theta({-1.0}), f,
                                        DistanceNorm::path_length(2));
  EXPECT_NEAR(diag, -std::sqrt(2.0), 1e-12);
}

TEST(TransitionReward, TableMatchesPointwise) {
  const GridSpec spec = GridSpec::unit(5, 4);
  const FeatureMap f = support::three_channel_features(spec);
  const Theta theta({-0.4, -1.2, -2.0});
  const TransitionModel tm(spec);
  for (const DistanceNorm& norm : {DistanceNorm::none(), DistanceNorm::lp(2), DistanceNorm::lp(3)}) {
    const auto table = transition_reward_table(tm, theta, f, norm);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 5; ++x) {
        for (int a = 0; a < kNumActions; ++a) {
          const State s{x, y, 0};
          EXPECT_EQ(table[spec.cell_index(x, y) * kNumActions + a],
                    transition_reward(s, successor(s, kActions[a], spec), theta, f, norm));
        }
      }
    }
  }
}

TEST(FeatureMap, MinMaxScaling) {
  const FeatureMap f(2, 2, {{2.0, 4.0, 6.0, 10.0}, {3.0, 3.0, 3.0, 3.0}, {-1.0, -1.0, -1.0, -1.0}});
  EXPECT_EQ(f.value(0, 0), 0.0);
  EXPECT_EQ(f.value(1, 0), 0.25);
  EXPECT_EQ(f.value(3, 0), 1.0);
  EXPECT_EQ(f.value(2, 1), 1.0);
  EXPECT_EQ(f.value(2, 2), 0.0);
  for (std::size_t c = 0; c < 4; ++c) {
    for (double v : f.at(c)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(FeatureMap, Validation) {
  EXPECT_THROW(FeatureMap(2, 2, {}), InvalidArgument);
  EXPECT_THROW(FeatureMap(2, 2, {{1.0, 2.0, 3.0}}), DimensionMismatch);
  EXPECT_THROW(FeatureMap(2, 2, {{1.0, 2.0, NAN, 3.0}}), NonFinite);
  EXPECT_THROW(FeatureMap(2, 2, {{1.0, 2.0, 3.0, 4.0}}, {"a", "b"}), DimensionMismatch);
}

TEST(FeatureMap, JoinKeepsChannels) {
  const FeatureMap a(2, 1, {{0.0, 1.0}}, {"a"});
  const FeatureMap b(2, 1, {{5.0, 7.0}, {1.0, 1.0}}, {"b", "c"});
  const FeatureMap j = a.join(b);
  EXPECT_EQ(j.n_features(), 3u);
  EXPECT_EQ(j.names(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(j.channel(1), (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(a.join(FeatureMap(1, 2, {{0.0, 1.0}})), DimensionMismatch);
}

TEST(FeatureMap, DistanceChannel) {
  const GridSpec spec = GridSpec::unit(3, 3);
  const auto d = distance_channel(spec, {1, 1, 0});
  EXPECT_EQ(d[spec.cell_index(1, 1)], 0.0);
  EXPECT_EQ(d[spec.cell_index(1, 2)], 1.0);
  EXPECT_NEAR(d[spec.cell_index(0, 0)], std::sqrt(2.0), 1e-15);
}

TEST(Theta, StrictlyNegativeAndFinite) {
  EXPECT_THROW(Theta({}), InvalidArgument);
  EXPECT_THROW(Theta({-1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(Theta({0.5}), InvalidArgument);
  EXPECT_THROW(Theta({-INFINITY}), NonFinite);
  EXPECT_EQ(Theta::filled(3, -1.0).weights(), (std::vector<double>{-1.0, -1.0, -1.0}));
}
