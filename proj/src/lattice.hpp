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

// Dynamics of the generalized cat map
//
//     y' = y + x   (mod L),     x' = x + y'   (mod 1)
//
// on the torus [-1/2, 1/2) x [-L/2, L/2), in two flavours: an exact
// permutation of the discretized phase space (x_i = -1/2 + i/N,
// y_j = -L/2 + j/N), and double-precision trajectories.

#ifndef CATREVERSE_LATTICE_HPP
#define CATREVERSE_LATTICE_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace catrev {

// Geometry of the discretized phase space and of the x/y registers.
class PhaseSpaceConfig {
 public:
  // Requires 2 <= n_q and n_q + 1 <= n_q_prime <= 40. Throws
  // std::domain_error otherwise.
  PhaseSpaceConfig(unsigned n_q, unsigned n_q_prime);

  unsigned n_q() const noexcept { return n_q_; }
  unsigned n_q_prime() const noexcept { return n_q_prime_; }
  uint64_t N() const noexcept { return uint64_t{1} << n_q_; }
  uint64_t L() const noexcept { return uint64_t{1} << (n_q_prime_ - n_q_); }
  uint64_t LN() const noexcept { return uint64_t{1} << n_q_prime_; }
  uint64_t point_count() const noexcept { return N() * LN(); }

  double x_of(uint64_t i) const noexcept;
  double y_of(uint64_t j) const noexcept;

  friend bool operator==(const PhaseSpaceConfig&, const PhaseSpaceConfig&) = default;

 private:
  unsigned n_q_;
  unsigned n_q_prime_;
};

struct LatticePoint {
  uint64_t i = 0;  // x index in [0, N)
  uint64_t j = 0;  // y index in [0, LN)
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

struct ContinuousPoint {
  double x = 0.0;  // [-1/2, 1/2)
  double y = 0.0;  // [-L/2, L/2)
  friend bool operator==(const ContinuousPoint&, const ContinuousPoint&) = default;
};

// Flattened (i, j) index used by probability tables: i + N * j.
inline uint64_t flat_index(const LatticePoint& p, const PhaseSpaceConfig& cfg) noexcept {
  return p.i + cfg.N() * p.j;
}

void check_point(const LatticePoint& p, const PhaseSpaceConfig& cfg);

LatticePoint map_forward_lattice(const LatticePoint& p, const PhaseSpaceConfig& cfg);
LatticePoint map_inverse_lattice(const LatticePoint& p, const PhaseSpaceConfig& cfg);

// Time reversal y -> -y taken half-way between kicks; an involution with
// invert . forward . invert == inverse.
LatticePoint invert_velocity_lattice(const LatticePoint& p, const PhaseSpaceConfig& cfg);

// Maps v onto [-period/2, period/2) as v - period * floor(v / period + 1/2).
double wrap(double v, double period) noexcept;

ContinuousPoint map_forward_continuous(const ContinuousPoint& p, double L) noexcept;
ContinuousPoint map_inverse_continuous(const ContinuousPoint& p, double L) noexcept;

// Exact continuum image of a lattice point and the lattice cell containing a
// continuum point.
ContinuousPoint to_continuous(const LatticePoint& p, const PhaseSpaceConfig& cfg);
LatticePoint cell_of(const ContinuousPoint& p, const PhaseSpaceConfig& cfg) noexcept;

struct InversionImprecision {
  double epsilon = 0.0;
};

// Per-point random stream derived from (master seed, point index, purpose).
class PointStream {
 public:
  PointStream(uint64_t master_seed, uint64_t point_index, uint64_t purpose) noexcept
      : seed_(master_seed), index_(point_index), purpose_(purpose) {}

  // Uniform value in (-1, 1); draws are consumed in order.
  double symmetric();
  // Uniform value in [0, 1).
  double unit();
  uint64_t bits64();

 private:
  uint64_t seed_;
  uint64_t index_;
  uint64_t purpose_;
  uint64_t counter_ = 0;
};

// x' = x - y (mod 1), y' = -y (mod L), then uniform noise in [-eps, eps]
// added to both coordinates (x first) and re-wrapped.
ContinuousPoint invert_velocity_continuous(const ContinuousPoint& p, double L,
                                           InversionImprecision imp, PointStream& rng);

struct Ensemble {
  std::vector<ContinuousPoint> points;
  uint64_t master_seed = 0;
  uint64_t t = 0;
  uint64_t inversions = 0;  // number of velocity inversions applied so far
};

// count points placed uniformly at random inside the lattice cells
// [x_i, x_i + 1/N) x [y_j, y_j + 1/N) of the given pixels.
Ensemble make_ensemble(std::span<const LatticePoint> pixels, const PhaseSpaceConfig& cfg,
                       uint64_t count, uint64_t master_seed);

void evolve_ensemble(Ensemble& e, uint64_t steps, double L);

// Inverts every point; the noise stream of point k depends only on
// (master_seed, k, inversion ordinal).
void invert_ensemble(Ensemble& e, double L, InversionImprecision imp);

struct YMoments {
  double mean_y = 0.0;
  double mean_y2 = 0.0;
};
YMoments ensemble_moments(const Ensemble& e);

// Normalized histogram over lattice cells, indexed by flat_index.
std::vector<double> ensemble_histogram(const Ensemble& e, const PhaseSpaceConfig& cfg);

// Largest Lyapunov exponent of the map from the tangent dynamics
// (dx, dy) -> (2dx + dy, dx + dy), renormalized every step.
double lyapunov_exponent(uint64_t steps, double tangent_x = 1.0, double tangent_y = 0.0);

}  // namespace catrev

#endif  // CATREVERSE_LATTICE_HPP
