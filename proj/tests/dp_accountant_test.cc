// Copyright 2026 The Shufflestack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shufflestack/dp_accountant.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace shufflestack {
namespace {

// Golden values from a 50-digit mpmath evaluation of the same formulas.
constexpr double kRel = 1e-9;

void ExpectRel(double got, double want) {
  EXPECT_NEAR(got, want, std::abs(want) * kRel) << "want " << want;
}

TEST(EpsSampling, Goldens) {
  ExpectRel(EpsSampling(1, 0.25), 0.35737401950878853731);
  ExpectRel(EpsSampling(0.5, 0.1), 0.062854723473730381759);
  ExpectRel(EpsSampling(std::log(2.0), 0.5), std::log(1.5));
  EXPECT_DOUBLE_EQ(EpsSampling(1.7, 1), 1.7);
  EXPECT_DOUBLE_EQ(EpsSampling(1.7, 0), 0);
}

TEST(EpsSampling, DomainErrors) {
  EXPECT_THROW(EpsSampling(-0.1, 0.5), DomainError);
  EXPECT_THROW(EpsSampling(1, 1.5), DomainError);
  EXPECT_THROW(EpsSampling(INFINITY, 0.5), DomainError);
}

TEST(EpsSampling, MonotoneAndBoundedByEps0) {
  for (double e : {0.0, 0.1, 0.5, 1.0, 3.0}) {
    double prev = -1;
    for (double g = 0; g <= 1.0001; g += 0.1) {
      const double v = EpsSampling(e, std::min(g, 1.0));
      EXPECT_GE(v, prev);
      EXPECT_LE(v, e + 1e-15);
      EXPECT_GE(v, EpsSampling(e * 0.9, std::min(g, 1.0)));
      prev = v;
    }
  }
}

TEST(EpsClones, Goldens) {
  ExpectRel(EpsClones(1, 1e-6, 10000), 0.18000636773139651675);
  ExpectRel(EpsClones(1, 1e-6, 1000000), 0.019469866569472503956);
  EXPECT_LT(EpsClones(1, 1e-6, 1000000), EpsClones(1, 1e-6, 10000));
}

TEST(EpsClones, Precondition) {
  EXPECT_THROW(EpsClones(20, 1e-6, 100), PreconditionViolated);
  try {
    EpsClones(20, 1e-6, 100);
  } catch (const PreconditionViolated& e) {
    EXPECT_NE(std::string(e.what()).find("log(n / (8 log(2 / delta)) - 1)"), std::string::npos);
  }
  const double edge = EpsClonesMaxEps0(1e-6, 10000);
  EXPECT_NO_THROW(EpsClones(edge, 1e-6, 10000));
  EXPECT_THROW(EpsClones(edge + 1e-6, 1e-6, 10000), PreconditionViolated);
  EXPECT_THROW(EpsClones(1, 0, 10000), DomainError);
}

TEST(EpsClones, MonotoneGrid) {
  for (uint64_t n : {10000u, 100000u, 1000000u}) {
    double prev = -1;
    for (double e = 0; e <= 2; e += 0.25) {
      const double v = EpsClones(e, 1e-6, n);
      EXPECT_GT(v, prev);
      EXPECT_GT(EpsClones(e, 1e-6, n / 2) + 1e-15, v);
      prev = v;
    }
  }
}

// At h = 100 and delta = 1e-8 the clone-shuffling domain needs
// eps0 <= log(100 / (8 log(2e8)) - 1), which has no solution: the strict call
// refuses and the goldens below are formula evaluations outside the domain.
TEST(WeakAmp, StrictCallRefusesOutsideDomain) {
  EXPECT_THROW(WeakAmp(1, 1e-8, 1e-8, 100, 100), PreconditionViolated);
  AmpChain c;
  WeakAmp(1, 1e-8, 1e-8, 100, 100, &c, Domain::kEvaluateOnly);
  EXPECT_FALSE(c.in_domain);
  WeakAmp(1, 1e-8, 1e-8, 1000, 1000, &c);
  EXPECT_TRUE(c.in_domain);
}

TEST(WeakAmp, GoldenChain) {
  AmpChain c;
  auto b = WeakAmp(1, 1e-8, 1e-8, 100, 100, &c, Domain::kEvaluateOnly);
  ExpectRel(c.gamma, 0.069453159656380483178);
  ExpectRel(c.eps_s, 1.1975928019149904967);
  ExpectRel(c.eps_c, 0.14892421981333376871);
  ExpectRel(b.eps, 10.146142242113006816);
  ExpectRel(b.delta, 7.9453159656380483178e-8);
  EXPECT_EQ(b.source, "weak_amp");
}

TEST(WeakAmp, ScalingBetweenTenThousandAndAMillion) {
  const double small = WeakAmp(1, 1e-8, 1e-8, 100, 100, nullptr, Domain::kEvaluateOnly).eps;
  const double large = WeakAmp(1, 1e-8, 1e-8, 1000, 1000).eps;
  ExpectRel(large, 1.0205635362920427989);
  const double ratio = large / small;
  ExpectRel(ratio, 0.10058636198259163479);
  EXPECT_GE(ratio, 0.08);
  EXPECT_LE(ratio, 0.125);
}

TEST(WeakAmp, SingleColumnIsOneComposedTerm) {
  AmpChain c;
  auto b = WeakAmp(1, 1e-8, 1e-8, 10000, 1, &c);
  EXPECT_DOUBLE_EQ(c.gamma, 1);
  EXPECT_DOUBLE_EQ(c.eps_c, c.eps_s);
  EXPECT_DOUBLE_EQ(b.eps, c.eps_s * (std::sqrt(2 * std::log(1e8)) + std::tanh(c.eps_s / 2)));
}

TEST(WeakAmp, DecreasesInGridSide) {
  double prev = INFINITY;
  for (uint64_t k : {1000u, 2000u, 4000u, 8000u, 16000u}) {
    const double v = WeakAmp(1, 1e-8, 1e-8, k, k).eps;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(WeakAmp, AuditTraceRecomputes) {
  AmpChain c;
  WeakAmp(0.7, 1e-7, 1e-9, 3000, 250, &c);
  EXPECT_NEAR(c.gamma, std::exp(1.4) / (std::exp(1.4) + 249), 1e-15);
  EXPECT_DOUBLE_EQ(c.eps_s, EpsClones(0.7, 1e-7, 3000));
  EXPECT_DOUBLE_EQ(c.eps_c, EpsSampling(c.eps_s, c.gamma));
  const double w = 250;
  EXPECT_NEAR(c.eps_total,
              c.eps_c * (std::sqrt(2 * w * std::log(1e9)) +
                         w * (std::exp(c.eps_c) - 1) / (std::exp(c.eps_c) + 1)),
              1e-12);
  EXPECT_NEAR(c.delta_total, w * c.gamma * 1e-7 + 1e-9, 1e-20);
}

TEST(WeakAmp, SquareWrapper) {
  auto b = WeakAmpSquare(1, 1e-8, 1000000);
  auto ref = WeakAmp(1, 1e-8, 1e-8, 1000, 1000);
  EXPECT_DOUBLE_EQ(b.eps, ref.eps);
  EXPECT_THROW(WeakAmpSquare(1, 1e-8, 10001), NotSquare);
}

TEST(WeakAmpCorrupted, Golden) {
  CorruptedGrid g;
  auto b = WeakAmpCorrupted(1, 1e-8, 1e-8, 1e-8, 1e-8, 100, 100, 0.05, nullptr, &g,
                            Domain::kEvaluateOnly);
  ExpectRel(g.w_real, 63.007038407217410932);
  ExpectRel(g.h_real, 56.799877776208079651);
  EXPECT_EQ(g.w, 63u);
  EXPECT_EQ(g.h, 56u);
  ExpectRel(b.eps, 16.39781147604684743);
  ExpectRel(b.delta, 9.708702501572217147e-8);
}

TEST(WeakAmpCorrupted, ApproachesUncorruptedOnLargeGrids) {
  // Even at gamma = 0 the reduction subtracts log(1/delta_w) columns and
  // log(w/delta_h) rows, so closeness needs a grid much wider than those.
  auto b = WeakAmpCorrupted(1, 1e-8, 1e-12, 1e-12, 1e-8, 1000, 1000, 0);
  ExpectRel(b.eps, 1.0540824057669977741);
  const double ref = WeakAmp(1, 1e-8, 1e-8, 1000, 1000).eps;
  EXPECT_LT(std::abs(b.eps / ref - 1), 0.05);
  EXPECT_GT(b.eps, ref);
}

TEST(WeakAmpCorrupted, TooManyCorruptions) {
  EXPECT_THROW(WeakAmpCorrupted(1, 1e-8, 1e-8, 1e-8, 1e-8, 100, 100, 0.999),
               TooManyCorruptions);
}

TEST(WeakAmpCorrupted, MonotoneInGamma) {
  double prev = 0;
  for (double g : {0.0, 0.05, 0.1, 0.2}) {
    const double v = WeakAmpCorrupted(1, 1e-8, 1e-8, 1e-8, 1e-8, 4000, 4000, g).eps;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

// Natural log throughout: the accountant header has no base-2 logarithm.
TEST(Accountant, UsesNaturalLogarithms) {
  std::ifstream in(std::string(SHUFFLESTACK_SOURCE_DIR) +
                   "/include/shufflestack/dp_accountant.h");
  ASSERT_TRUE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str().find("log2"), std::string::npos);
  EXPECT_EQ(ss.str().find("log10"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Distinguishers.

TEST(Indistinguishability, IdenticalMechanisms) {
  std::function<int(Rng&)> coin = [](Rng& r) { return static_cast<int>(r.UniformBelow(2)); };
  auto a = EstimateIndistinguishability<int>(coin, coin, [](const int& v) { return v == 1; },
                                             20000, Rng(1));
  EXPECT_LT(a.advantage, 3 * a.std_err);
  EXPECT_LT(a.ci_low, 0);
  EXPECT_GT(a.ci_high, 0);
}

TEST(Indistinguishability, DeterministicOpposites) {
  std::function<int(Rng&)> zero = [](Rng&) { return 0; };
  std::function<int(Rng&)> one = [](Rng&) { return 1; };
  auto a = EstimateIndistinguishability<int>(one, zero, [](const int& v) { return v == 1; },
                                             100, Rng(1));
  EXPECT_DOUBLE_EQ(a.advantage, 1);
  EXPECT_DOUBLE_EQ(a.std_err, 0);
}

TEST(NoStrongAmp, LargeLocalEpsilonSeparates) {
  const double eps0 = std::log(1000.0);
  auto rep = AttackNoStrongAmp(4, eps0, 100000, Rng(7));
  const auto& e = rep.estimate;
  EXPECT_GE(e.p_a, 1 - 4.0 / 1001 - 3 * e.std_err_a);
  EXPECT_LE(e.p_b, 4.0 / 1001 + 3 * e.std_err_b);
  EXPECT_GE(rep.gap(), 0.98);
}

TEST(NoStrongAmp, FairCoinDoesNotSeparate) {
  auto rep = AttackNoStrongAmp(4, 0, 20000, Rng(8));
  EXPECT_LT(rep.estimate.advantage, 3 * rep.estimate.std_err);
}

TEST(NoStrongAmp, SingleCellMatchesRandomizer) {
  const double eps0 = 1;
  auto rep = AttackNoStrongAmp(1, eps0, 50000, Rng(9));
  const double keep = std::exp(eps0) / (1 + std::exp(eps0));
  EXPECT_NEAR(rep.estimate.p_a, keep, 3 * rep.estimate.std_err_a);
  EXPECT_NEAR(rep.estimate.p_b, 1 - keep, 3 * rep.estimate.std_err_b);
}

TEST(NoStrongAmp, MatchesHarnessSpecialization) {
  auto a = AttackNoStrongAmp(3, 2, 2000, Rng(10));
  auto b = AttackNoStrongAmp(3, 2, 2000, Rng(10));
  EXPECT_EQ(a.estimate.p_a, b.estimate.p_a);
  EXPECT_EQ(a.estimate.p_b, b.estimate.p_b);
  EXPECT_THROW(AttackNoStrongAmp(3, 2, 999, Rng(10)), PreconditionViolated);
}

TEST(NotDo, FourClients) {
  auto rep = AttackNotDo(4, 100000, Rng(11));
  EXPECT_GE(rep.success, 0.6 - 3 * rep.std_err);
  EXPECT_NEAR(rep.success, NotDoExactSuccess(4), 3 * rep.std_err);
  EXPECT_NEAR(rep.decided, 1.0 / 3, 0.01);
}

TEST(NotDo, NineClientsMatchExactRate) {
  auto rep = AttackNotDo(9, 100000, Rng(12));
  EXPECT_DOUBLE_EQ(NotDoExactSuccess(9), 0.75);
  EXPECT_NEAR(rep.success, 0.75, 3 * rep.std_err);
  EXPECT_NEAR(rep.decided, 0.5, 0.01);
}

TEST(NotDo, UniformShuffleControl) {
  auto rep = AttackNotDo(9, 100000, Rng(13), NotDoTarget::kUniform);
  EXPECT_LE(rep.success, 0.5 + 3 * rep.std_err);
  EXPECT_GE(rep.success, 0.5 - 3 * rep.std_err);
}

TEST(NotDo, Preconditions) {
  EXPECT_THROW(AttackNotDo(5, 100000, Rng(1)), NotSquare);
  EXPECT_THROW(AttackNotDo(4, 10, Rng(1)), PreconditionViolated);
}

}  // namespace
}  // namespace shufflestack
