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

#include "lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "philox.hpp"

namespace catrev {

PhaseSpaceConfig::PhaseSpaceConfig(unsigned n_q, unsigned n_q_prime)
    : n_q_(n_q), n_q_prime_(n_q_prime) {
  if (n_q < 2) {
    throw std::domain_error("n_q must be at least 2, got " + std::to_string(n_q));
  }
  if (n_q_prime < n_q + 1) {
    throw std::domain_error("n_q_prime must be at least n_q + 1 (L >= 2), got n_q=" +
                            std::to_string(n_q) + " n_q_prime=" + std::to_string(n_q_prime));
  }
  if (n_q_prime > 40) {
    throw std::domain_error("n_q_prime too large: " + std::to_string(n_q_prime));
  }
}

double PhaseSpaceConfig::x_of(uint64_t i) const noexcept {
  return -0.5 + static_cast<double>(i) / static_cast<double>(N());
}

double PhaseSpaceConfig::y_of(uint64_t j) const noexcept {
  return -0.5 * static_cast<double>(L()) + static_cast<double>(j) / static_cast<double>(N());
}

void check_point(const LatticePoint& p, const PhaseSpaceConfig& cfg) {
  if (p.i >= cfg.N() || p.j >= cfg.LN()) {
    throw std::domain_error("lattice point (" + std::to_string(p.i) + ", " +
                            std::to_string(p.j) + ") outside N=" + std::to_string(cfg.N()) +
                            " LN=" + std::to_string(cfg.LN()));
  }
}

LatticePoint map_forward_lattice(const LatticePoint& p, const PhaseSpaceConfig& cfg) {
  check_point(p, cfg);
  const uint64_t N = cfg.N();
  const uint64_t LN = cfg.LN();
  const uint64_t j = (p.j + p.i + LN - N / 2) % LN;
  const uint64_t i = (p.i + j + LN - LN / 2) % N;
  return {i, j};
}

LatticePoint map_inverse_lattice(const LatticePoint& p, const PhaseSpaceConfig& cfg) {
  check_point(p, cfg);
  const uint64_t N = cfg.N();
  const uint64_t LN = cfg.LN();
  // All operands are reduced first so the unsigned differences never wrap.
  const uint64_t i = (p.i + N - p.j % N + (LN / 2) % N) % N;
  const uint64_t j = (p.j + LN - i + N / 2) % LN;
  return {i, j};
}

LatticePoint invert_velocity_lattice(const LatticePoint& p, const PhaseSpaceConfig& cfg) {
  check_point(p, cfg);
  const uint64_t N = cfg.N();
  const uint64_t LN = cfg.LN();
  // x' = x - y carries the constant L/2, an integer, so only (i - j) survives.
  const uint64_t i = (p.i + N - p.j % N) % N;
  const uint64_t j = (LN - p.j) % LN;
  return {i, j};
}

double wrap(double v, double period) noexcept {
  const double half = 0.5 * period;
  double r = v - period * std::floor(v / period + 0.5);
  if (r >= half) r -= period;
  if (r < -half) r += period;
  return r;
}

ContinuousPoint map_forward_continuous(const ContinuousPoint& p, double L) noexcept {
  const double y = wrap(p.y + p.x, L);
  const double x = wrap(p.x + y, 1.0);
  return {x, y};
}

ContinuousPoint map_inverse_continuous(const ContinuousPoint& p, double L) noexcept {
  const double x = wrap(p.x - p.y, 1.0);
  const double y = wrap(p.y - x, L);
  return {x, y};
}

ContinuousPoint to_continuous(const LatticePoint& p, const PhaseSpaceConfig& cfg) {
  check_point(p, cfg);
  return {cfg.x_of(p.i), cfg.y_of(p.j)};
}

LatticePoint cell_of(const ContinuousPoint& p, const PhaseSpaceConfig& cfg) noexcept {
  const double n = static_cast<double>(cfg.N());
  auto clamp_index = [](double v, uint64_t hi) -> uint64_t {
    if (!(v >= 0.0)) return 0;
    const auto k = static_cast<uint64_t>(v);
    return k < hi ? k : hi - 1;
  };
  const double half_l = 0.5 * static_cast<double>(cfg.L());
  return {clamp_index(std::floor((p.x + 0.5) * n), cfg.N()),
          clamp_index(std::floor((p.y + half_l) * n), cfg.LN())};
}

uint64_t PointStream::bits64() {
  const Philox4x32 gen(seed_);
  const auto block = gen(index_, (purpose_ << 40) | counter_++);
  return combine(block[0], block[1]);
}

double PointStream::unit() { return unit_closed_open(bits64()); }

double PointStream::symmetric() {
  const Philox4x32 gen(seed_);
  const auto block = gen(index_, (purpose_ << 40) | counter_++);
  // Two independent halves of the block give 53 bits; the result is
  // symmetric around zero and never reaches +-1.
  const double u = unit_closed_open(combine(block[0], block[1]));
  return 2.0 * u - 1.0 + 0x1p-53;
}

ContinuousPoint invert_velocity_continuous(const ContinuousPoint& p, double L,
                                           InversionImprecision imp, PointStream& rng) {
  double x = wrap(p.x - p.y, 1.0);
  double y = wrap(-p.y, L);
  if (imp.epsilon > 0.0) {
    x = wrap(x + imp.epsilon * rng.symmetric(), 1.0);
    y = wrap(y + imp.epsilon * rng.symmetric(), L);
  }
  return {x, y};
}

namespace {
constexpr uint64_t kPurposePlacement = 1;
constexpr uint64_t kPurposeInversion = 2;
}  // namespace

Ensemble make_ensemble(std::span<const LatticePoint> pixels, const PhaseSpaceConfig& cfg,
                       uint64_t count, uint64_t master_seed) {
  if (pixels.empty()) throw std::domain_error("ensemble needs at least one pixel");
  for (const auto& p : pixels) check_point(p, cfg);
  Ensemble e;
  e.master_seed = master_seed;
  e.points.resize(count);
  const double cell = 1.0 / static_cast<double>(cfg.N());
  const double L = static_cast<double>(cfg.L());
  parallel_for(count, [&](uint64_t k) {
    PointStream rng(master_seed, k, kPurposePlacement);
    const LatticePoint& px = pixels[bounded_index(rng.bits64(), pixels.size())];
    const double x = cfg.x_of(px.i) + cell * rng.unit();
    const double y = cfg.y_of(px.j) + cell * rng.unit();
    e.points[k] = {wrap(x, 1.0), wrap(y, L)};
  });
  return e;
}

void evolve_ensemble(Ensemble& e, uint64_t steps, double L) {
  if (steps == 0) return;
  parallel_for(e.points.size(), [&](uint64_t k) {
    ContinuousPoint p = e.points[k];
    for (uint64_t s = 0; s < steps; ++s) p = map_forward_continuous(p, L);
    e.points[k] = p;
  });
  e.t += steps;
}

void invert_ensemble(Ensemble& e, double L, InversionImprecision imp) {
  if (imp.epsilon < 0.0) throw std::domain_error("inversion epsilon must be >= 0");
  const uint64_t purpose = kPurposeInversion + 2 * e.inversions;
  parallel_for(e.points.size(), [&](uint64_t k) {
    PointStream rng(e.master_seed, k, purpose);
    e.points[k] = invert_velocity_continuous(e.points[k], L, imp, rng);
  });
  ++e.inversions;
}

YMoments ensemble_moments(const Ensemble& e) {
  const uint64_t n = e.points.size();
  if (n == 0) return {};
  const double sy = deterministic_sum<double>(n, [&](uint64_t k) { return e.points[k].y; });
  const double sy2 = deterministic_sum<double>(
      n, [&](uint64_t k) { return e.points[k].y * e.points[k].y; });
  return {sy / static_cast<double>(n), sy2 / static_cast<double>(n)};
}

std::vector<double> ensemble_histogram(const Ensemble& e, const PhaseSpaceConfig& cfg) {
  std::vector<uint64_t> counts(cfg.point_count(), 0);
  for (const auto& p : e.points) ++counts[flat_index(cell_of(p, cfg), cfg)];
  std::vector<double> hist(counts.size());
  const double inv = e.points.empty() ? 0.0 : 1.0 / static_cast<double>(e.points.size());
  for (size_t k = 0; k < counts.size(); ++k) hist[k] = static_cast<double>(counts[k]) * inv;
  return hist;
}

double lyapunov_exponent(uint64_t steps, double tangent_x, double tangent_y) {
  if (steps == 0) throw std::domain_error("lyapunov_exponent needs at least one step");
  double norm = std::hypot(tangent_x, tangent_y);
  if (!(norm > 0.0)) throw std::domain_error("tangent vector must be nonzero");
  double dx = tangent_x / norm;
  double dy = tangent_y / norm;
  double log_growth = 0.0;
  for (uint64_t s = 0; s < steps; ++s) {
    const double ny = dx + dy;
    const double nx = dx + ny;
    norm = std::hypot(nx, ny);
    log_growth += std::log(norm);
    dx = nx / norm;
    dy = ny / norm;
  }
  return log_growth / static_cast<double>(steps);
}

}  // namespace catrev
