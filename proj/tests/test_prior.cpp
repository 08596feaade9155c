#include <gtest/gtest.h>

#include <cmath>

#include "wavebvs/prior.hpp"
#include "wavebvs/wavelet_index.hpp"

namespace {

using namespace wavebvs;

WaveletIndex detail_at(int j) { return WaveletIndex::detail(Orientation::Vertical, j, 0, 0); }

TEST(Prior, PriorOneAtLevelTwo) {
  const auto s = PriorSchedule::builtin(PriorKind::Prior1, 0.9);
  EXPECT_NEAR(inclusion_prob(s, Block::A, detail_at(2)), 0.405, 1e-12);
  EXPECT_NEAR(inclusion_prob(s, Block::B, detail_at(2)), 0.405, 1e-12);
}

TEST(Prior, PriorThreeAtLevelOne) {
  const auto s = PriorSchedule::builtin(PriorKind::Prior3, 0.9);
  EXPECT_NEAR(inclusion_prob(s, Block::A, detail_at(1)), 0.5 * std::pow(0.9, 8), 1e-15);
  EXPECT_NEAR(inclusion_prob(s, Block::A, detail_at(1)), 0.21523, 1e-5);
  EXPECT_DOUBLE_EQ(inclusion_prob(s, Block::B, detail_at(1)), 0.5);
}

TEST(Prior, PriorTwoDecaysOnlyInA) {
  const auto s = PriorSchedule::builtin(PriorKind::Prior2, 0.8);
  EXPECT_NEAR(inclusion_prob(s, Block::A, detail_at(3)), 0.5 * 0.512, 1e-12);
  EXPECT_DOUBLE_EQ(inclusion_prob(s, Block::B, detail_at(3)), 0.5);
}

TEST(Prior, PhiOneIsIndifferent) {
  for (PriorKind k : {PriorKind::Prior1, PriorKind::Prior2, PriorKind::Prior3}) {
    const auto s = PriorSchedule::builtin(k, 1.0);
    for (int j = 0; j <= 4; ++j) {
      EXPECT_DOUBLE_EQ(inclusion_prob(s, Block::A, detail_at(j)), 0.5);
      EXPECT_DOUBLE_EQ(inclusion_prob(s, Block::B, detail_at(j)), 0.5);
    }
  }
}

TEST(Prior, ScalingCoefficientIsAlwaysHalf) {
  for (PriorKind k : {PriorKind::Prior1, PriorKind::Prior2, PriorKind::Prior3}) {
    const auto s = PriorSchedule::builtin(k, 0.7);
    EXPECT_DOUBLE_EQ(inclusion_prob(s, Block::A, WaveletIndex::scaling()), 0.5);
    EXPECT_DOUBLE_EQ(inclusion_prob(s, Block::B, WaveletIndex::scaling()), 0.5);
  }
}

TEST(Prior, MonotoneInLevel) {
  for (PriorKind k : {PriorKind::Prior1, PriorKind::Prior2, PriorKind::Prior3}) {
    const auto s = PriorSchedule::builtin(k, 0.85);
    for (Block b : {Block::A, Block::B}) {
      for (int j = 1; j <= 6; ++j) {
        EXPECT_LE(inclusion_prob(s, b, detail_at(j)), inclusion_prob(s, b, detail_at(j - 1)));
      }
    }
  }
}

TEST(Prior, BlockBAgreementWithPriorOneOnlyAtPhiOne) {
  const auto p1 = PriorSchedule::builtin(PriorKind::Prior1, 0.9);
  const auto p3 = PriorSchedule::builtin(PriorKind::Prior3, 0.9);
  EXPECT_NE(inclusion_prob(p1, Block::B, detail_at(2)), inclusion_prob(p3, Block::B, detail_at(2)));
}

TEST(Prior, InvalidPhiRejected) {
  EXPECT_THROW(PriorSchedule::builtin(PriorKind::Prior1, 0.0), PriorError);
  EXPECT_THROW(PriorSchedule::builtin(PriorKind::Prior1, 1.5), PriorError);
}

TEST(PriorOdds, Examples) {
  EXPECT_DOUBLE_EQ(prior_odds_ratio(0.5), 1.0);
  EXPECT_NEAR(prior_odds_ratio(0.405), 0.595 / 0.405, 1e-12);
  EXPECT_NEAR(prior_odds_ratio(0.405), 1.46913, 1e-5);
  EXPECT_THROW(prior_odds_ratio(0.0), PriorError);
  EXPECT_THROW(prior_odds_ratio(1.0), PriorError);
}

TEST(PriorOdds, InverseIdentity) {
  for (double t = 0.01; t < 1.0; t += 0.07) EXPECT_NEAR(prior_odds_ratio(t) * t / (1.0 - t), 1.0, 1e-12);
}

TEST(PriorOdds, LogOddsVectorCoversBothBlocks) {
  const WaveletBasis basis(2);
  const auto s = PriorSchedule::builtin(PriorKind::Prior3, 0.8);
  const auto lo = log_prior_odds(s, basis);
  ASSERT_EQ(lo.size(), 2 * basis.size());
  EXPECT_DOUBLE_EQ(lo[0], 0.0);
  const std::size_t f = basis.flatten(detail_at(1));
  const double theta = 0.5 * std::pow(0.8, 8);
  EXPECT_NEAR(lo[f], std::log((1.0 - theta) / theta), 1e-12);
  EXPECT_DOUBLE_EQ(lo[basis.size() + f], 0.0);
}

TEST(Prior, CustomScheduleTable) {
  const WaveletBasis basis(0);
  const auto s = PriorSchedule::custom({0.5, 0.2, 0.3, 0.4}, {0.1, 0.6, 0.7, 0.8});
  EXPECT_DOUBLE_EQ(s.inclusion_prob(Block::A, detail_at(0), basis), 0.3);
  EXPECT_DOUBLE_EQ(s.inclusion_prob(Block::B, WaveletIndex::scaling(), basis), 0.1);
  EXPECT_THROW(s.inclusion_prob(Block::A, detail_at(0)), PriorError);
  EXPECT_THROW(PriorSchedule::custom({0.5, 1.2, 0.3, 0.4}, {0.1, 0.6, 0.7, 0.8}), PriorError);
}

TEST(Hyper, ValidateRejectsNonPositive) {
  EXPECT_NO_THROW((Hyperparams{6.0, 6.0, Model::I}.validate()));
  EXPECT_THROW((Hyperparams{0.0, 6.0, Model::I}.validate()), PriorError);
  EXPECT_THROW((Hyperparams{6.0, -1.0, Model::II}.validate()), PriorError);
}

TEST(Prior, ParseNames) {
  EXPECT_EQ(parse_model("II"), Model::II);
  EXPECT_EQ(parse_prior_kind("3"), PriorKind::Prior3);
  EXPECT_THROW(parse_model("III"), std::exception);
}

}  // namespace
