// Copyright 2026 The catreverse Authors
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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "lattice.hpp"
#include "parallel.hpp"
#include "philox.hpp"

namespace catrev {
namespace {

// Continuum oracle: the real-valued map at grid points, re-quantized.
LatticePoint continuum_forward(const LatticePoint& p, const PhaseSpaceConfig& cfg) {
  return cell_of(map_forward_continuous(to_continuous(p, cfg), static_cast<double>(cfg.L())), cfg);
}

TEST(PhaseSpaceConfig, Geometry) {
  const PhaseSpaceConfig cfg(5, 8);
  EXPECT_EQ(cfg.N(), 32u);
  EXPECT_EQ(cfg.L(), 8u);
  EXPECT_EQ(cfg.LN(), 256u);
  EXPECT_EQ(cfg.LN(), cfg.L() * cfg.N());
  EXPECT_DOUBLE_EQ(cfg.x_of(0), -0.5);
  EXPECT_DOUBLE_EQ(cfg.y_of(0), -4.0);
  EXPECT_DOUBLE_EQ(cfg.y_of(128), 0.0);
}

TEST(PhaseSpaceConfig, RejectsInvalid) {
  EXPECT_THROW(PhaseSpaceConfig(1, 3), std::domain_error);
  EXPECT_THROW(PhaseSpaceConfig(3, 3), std::domain_error);
  EXPECT_THROW(PhaseSpaceConfig(4, 2), std::domain_error);
  EXPECT_NO_THROW(PhaseSpaceConfig(2, 3));
}

TEST(Lattice, ForwardExamples) {
  const PhaseSpaceConfig cfg(2, 3);
  EXPECT_EQ(map_forward_lattice({2, 4}, cfg), (LatticePoint{2, 4}));
  EXPECT_EQ(map_forward_lattice({1, 2}, cfg), (LatticePoint{2, 1}));
  EXPECT_EQ(map_forward_lattice({0, 0}, cfg), (LatticePoint{2, 6}));
  for (LatticePoint p : {LatticePoint{1, 2}, LatticePoint{0, 0}}) {
    EXPECT_EQ(map_forward_lattice(p, cfg), continuum_forward(p, cfg));
  }
}

TEST(Lattice, InverseExamples) {
  const PhaseSpaceConfig cfg(2, 3);
  EXPECT_EQ(map_inverse_lattice(map_forward_lattice({1, 2}, cfg), cfg), (LatticePoint{1, 2}));
  EXPECT_EQ(map_inverse_lattice({1, 2}, cfg), (LatticePoint{3, 1}));
  EXPECT_EQ(map_inverse_lattice({2, 4}, cfg), (LatticePoint{2, 4}));
  // Cross-check by exhaustive inversion of the forward map.
  for (uint64_t j = 0; j < cfg.LN(); ++j) {
    for (uint64_t i = 0; i < cfg.N(); ++i) {
      if (map_forward_lattice({i, j}, cfg) == LatticePoint{1, 2}) EXPECT_EQ((LatticePoint{i, j}), (LatticePoint{3, 1}));
    }
  }
}

TEST(Lattice, VelocityInversionExamples) {
  const PhaseSpaceConfig cfg(2, 3);
  EXPECT_EQ(invert_velocity_lattice({2, 4}, cfg), (LatticePoint{2, 4}));
  EXPECT_EQ(invert_velocity_lattice({2, 1}, cfg), (LatticePoint{1, 7}));
  // Continuum rule x' = (x - y) mod 1, y' = -y mod L, re-quantized.
  const ContinuousPoint c = to_continuous({2, 1}, cfg);
  const double L = static_cast<double>(cfg.L());
  EXPECT_EQ(cell_of({wrap(c.x - c.y, 1.0), wrap(-c.y, L)}, cfg), (LatticePoint{1, 7}));
  const LatticePoint conj = invert_velocity_lattice(
      map_forward_lattice(invert_velocity_lattice({1, 2}, cfg), cfg), cfg);
  EXPECT_EQ(conj, (LatticePoint{3, 1}));
  EXPECT_EQ(conj, map_inverse_lattice({1, 2}, cfg));
}

TEST(Lattice, RejectsInvalidPoints) {
  const PhaseSpaceConfig cfg(2, 3);
  EXPECT_THROW(map_forward_lattice({4, 0}, cfg), std::domain_error);
  EXPECT_THROW(map_inverse_lattice({0, 8}, cfg), std::domain_error);
  EXPECT_THROW(invert_velocity_lattice({9, 9}, cfg), std::domain_error);
}

class LatticeExhaustive : public ::testing::TestWithParam<std::pair<unsigned, unsigned>> {};

TEST_P(LatticeExhaustive, BijectionInvolutionConjugationConsistency) {
  const PhaseSpaceConfig cfg(GetParam().first, GetParam().second);
  std::set<LatticePoint> images;
  for (uint64_t j = 0; j < cfg.LN(); ++j) {
    for (uint64_t i = 0; i < cfg.N(); ++i) {
      const LatticePoint p{i, j};
      const LatticePoint f = map_forward_lattice(p, cfg);
      images.insert(f);
      ASSERT_EQ(map_inverse_lattice(f, cfg), p);
      ASSERT_EQ(invert_velocity_lattice(invert_velocity_lattice(p, cfg), cfg), p);
      ASSERT_EQ(invert_velocity_lattice(map_forward_lattice(invert_velocity_lattice(p, cfg), cfg), cfg),
                map_inverse_lattice(p, cfg));
      ASSERT_EQ(f, continuum_forward(p, cfg)) << "i=" << i << " j=" << j;
    }
  }
  EXPECT_EQ(images.size(), cfg.point_count());
}

INSTANTIATE_TEST_SUITE_P(SmallConfigs, LatticeExhaustive,
                         ::testing::Values(std::pair{2u, 3u}, std::pair{2u, 5u}, std::pair{3u, 4u},
                                           std::pair{3u, 6u}, std::pair{4u, 5u}, std::pair{4u, 6u}));

TEST(Wrap, FundamentalDomain) {
  EXPECT_DOUBLE_EQ(wrap(0.5, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(wrap(-0.5, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(wrap(4.0, 8.0), -4.0);
  EXPECT_DOUBLE_EQ(wrap(-0.75, 2.0), -0.75);
  EXPECT_DOUBLE_EQ(wrap(-1.0, 1.0), 0.0);
  for (double v : {-7.3, -0.5000000001, 0.4999999999, 3.99999999, 1e-300, -1e-17}) {
    const double w = wrap(v, 8.0);
    EXPECT_GE(w, -4.0);
    EXPECT_LT(w, 4.0);
  }
  const double tiny = wrap(-1e-17, 1.0);
  EXPECT_GE(tiny, -0.5);
  EXPECT_LT(tiny, 0.5);
}

TEST(Continuous, ForwardExamples) {
  EXPECT_EQ(map_forward_continuous({0.0, 0.0}, 8.0), (ContinuousPoint{0.0, 0.0}));
  const ContinuousPoint q = map_forward_continuous({-0.25, -0.5}, 2.0);
  EXPECT_EQ(q.x, 0.0);
  EXPECT_EQ(q.y, -0.75);
}

TEST(Continuous, ShortTimeReversibility) {
  ContinuousPoint p{0.1234567, -1.7654321};
  const ContinuousPoint start = p;
  for (int k = 0; k < 10; ++k) p = map_forward_continuous(p, 8.0);
  for (int k = 0; k < 10; ++k) p = map_inverse_continuous(p, 8.0);
  EXPECT_NEAR(p.x, start.x, 1e-12);
  EXPECT_NEAR(p.y, start.y, 1e-12);
}

TEST(Continuous, VelocityInversion) {
  PointStream rng(1, 2, 3);
  const ContinuousPoint p{0.3, -2.2};
  const ContinuousPoint once = invert_velocity_continuous(p, 8.0, {0.0}, rng);
  const ContinuousPoint twice = invert_velocity_continuous(once, 8.0, {0.0}, rng);
  EXPECT_NEAR(twice.x, p.x, 1e-14);
  EXPECT_NEAR(twice.y, p.y, 1e-14);
  EXPECT_EQ(invert_velocity_continuous({0.0, 0.0}, 8.0, {0.0}, rng), (ContinuousPoint{0.0, 0.0}));
  for (int k = 0; k < 1000; ++k) {
    PointStream s(7, static_cast<uint64_t>(k), 2);
    const ContinuousPoint noisy = invert_velocity_continuous(p, 8.0, {1e-8}, s);
    EXPECT_LE(std::abs(wrap(noisy.x - once.x, 1.0)), 1e-8);
    EXPECT_LE(std::abs(wrap(noisy.y - once.y, 8.0)), 1e-8);
  }
  Ensemble empty;
  EXPECT_THROW(invert_ensemble(empty, 8.0, {-1.0}), std::domain_error);
}

TEST(Ensemble, ZeroStepsAndFixedPoint) {
  const PhaseSpaceConfig cfg(4, 7);
  const std::vector<LatticePoint> px{{3, 60}, {8, 64}};
  Ensemble e = make_ensemble(px, cfg, 100, 9);
  const auto before = e.points;
  evolve_ensemble(e, 0, 8.0);
  EXPECT_EQ(e.points, before);
  EXPECT_EQ(e.t, 0u);
  Ensemble z;
  z.points = {{0.0, 0.0}};
  evolve_ensemble(z, 100, 8.0);
  EXPECT_EQ(z.points[0], (ContinuousPoint{0.0, 0.0}));
  EXPECT_EQ(z.t, 100u);
}

TEST(Ensemble, PointsStayInDomain) {
  const PhaseSpaceConfig cfg(4, 7);
  const std::vector<LatticePoint> px{{0, 0}, {15, 127}, {7, 64}};
  Ensemble e = make_ensemble(px, cfg, 5000, 3);
  evolve_ensemble(e, 50, 8.0);
  invert_ensemble(e, 8.0, {1e-4});
  evolve_ensemble(e, 5, 8.0);
  for (const auto& p : e.points) {
    ASSERT_GE(p.x, -0.5);
    ASSERT_LT(p.x, 0.5);
    ASSERT_GE(p.y, -4.0);
    ASSERT_LT(p.y, 4.0);
  }
}

TEST(Ensemble, DiffusionSlopeFromCentralCell) {
  const PhaseSpaceConfig cfg(5, 8);
  std::vector<LatticePoint> cell;
  for (uint64_t j = cfg.LN() / 2 - cfg.N() / 2; j < cfg.LN() / 2 + cfg.N() / 2; ++j) {
    for (uint64_t i = 0; i < cfg.N(); ++i) cell.push_back({i, j});
  }
  Ensemble e = make_ensemble(cell, cfg, 100000, 11);
  std::vector<double> t, y2;
  for (int s = 0; s <= 30; ++s) {
    if (s > 0) evolve_ensemble(e, 1, 8.0);
    t.push_back(s);
    y2.push_back(ensemble_moments(e).mean_y2);
  }
  // Least squares slope, independent of the analysis module.
  double mt = 0, mv = 0;
  for (size_t k = 0; k < t.size(); ++k) mt += t[k], mv += y2[k];
  mt /= t.size();
  mv /= t.size();
  double num = 0, den = 0;
  for (size_t k = 0; k < t.size(); ++k) num += (t[k] - mt) * (y2[k] - mv), den += (t[k] - mt) * (t[k] - mt);
  EXPECT_GE(num / den, 0.075);
  EXPECT_LE(num / den, 0.092);
}

TEST(Ensemble, DeterministicAcrossThreadCounts) {
  const PhaseSpaceConfig cfg(4, 7);
  const std::vector<LatticePoint> px{{3, 60}, {8, 64}, {1, 70}};
  auto run = [&](int threads) {
    set_thread_count(threads);
    Ensemble e = make_ensemble(px, cfg, 20001, 5);
    evolve_ensemble(e, 20, 8.0);
    invert_ensemble(e, 8.0, {1e-6});
    evolve_ensemble(e, 7, 8.0);
    return std::pair{e.points, ensemble_moments(e).mean_y2};
  };
  const auto a = run(1);
  const auto b = run(8);
  set_thread_count(1);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Ensemble, HistogramSumsToOne) {
  const PhaseSpaceConfig cfg(3, 5);
  Ensemble e = make_ensemble(std::vector<LatticePoint>{{1, 16}}, cfg, 1000, 1);
  const auto h = ensemble_histogram(e, cfg);
  EXPECT_EQ(h[flat_index({1, 16}, cfg)], 1.0);
  evolve_ensemble(e, 3, 4.0);
  double s = 0;
  for (double v : ensemble_histogram(e, cfg)) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Lyapunov, MatchesEigenvalue) {
  const double h = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  EXPECT_NEAR(h, 0.9624, 1e-4);
  const double a = lyapunov_exponent(1000);
  const double b = lyapunov_exponent(10000);
  EXPECT_NEAR(a, h, 0.01 * h);
  EXPECT_NEAR(a, b, 0.001 * b);
  EXPECT_NEAR(lyapunov_exponent(1000, 1.0, 0.0), lyapunov_exponent(1000, 0.0, 1.0), 1e-3);
  EXPECT_THROW(lyapunov_exponent(0), std::domain_error);
}

TEST(Philox, KnownAnswerVectors) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32(0)(B{0, 0, 0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32(~uint64_t{0})(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32(0x299f31d0a4093822ull)(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UnitMapsStayInRange) {
  EXPECT_GT(unit_open(0), 0.0);
  EXPECT_LT(unit_open(0xffffffffu), 1.0);
  EXPECT_EQ(unit_closed_open(0), 0.0);
  EXPECT_LT(unit_closed_open(~uint64_t{0}), 1.0);
  EXPECT_EQ(bounded_index(~uint64_t{0}, 7), 6u);
}

TEST(PointStream, IndependentOfCallOrder) {
  PointStream a(42, 7, 1);
  const double first = a.unit();
  const double second = a.unit();
  PointStream b(42, 7, 1);
  EXPECT_EQ(b.unit(), first);
  EXPECT_EQ(b.unit(), second);
  PointStream c(42, 8, 1);
  EXPECT_NE(c.unit(), first);
  for (int k = 0; k < 1000; ++k) {
    const double s = a.symmetric();
    ASSERT_GT(s, -1.0);
    ASSERT_LT(s, 1.0);
  }
}

}  // namespace
}  // namespace catrev
