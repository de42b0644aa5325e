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

// Reference laws for the diffusive regime and fits against them.

#ifndef CATREVERSE_ANALYSIS_HPP
#define CATREVERSE_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace catrev {

// Raised when a fit has too little usable data.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ln((3 + sqrt 5) / 2), the positive Lyapunov exponent of the map.
double cat_map_entropy() noexcept;

inline constexpr double kDiffusionCoefficient = 1.0 / 12.0;

struct YDistribution {
  PhaseSpaceConfig cfg;
  std::vector<double> p;  // one entry per j in [0, LN)

  // Throws std::domain_error on wrong length, negative entries, or a sum
  // further than 1e-9 from one.
  YDistribution(const PhaseSpaceConfig& config, std::vector<double> probabilities);
};

struct MomentRecord {
  double t = 0.0;
  double mean_y = 0.0;
  double mean_y2 = 0.0;
};
using MomentSeries = std::vector<MomentRecord>;

struct FidelityPoint {
  double t = 0.0;
  double f = 1.0;
};

struct FidelitySeries {
  unsigned n_q = 0;
  unsigned n_q_prime = 0;
  double epsilon = 0.0;
  uint64_t seed = 0;
  std::vector<FidelityPoint> points;
};

// Torus-periodized Gaussian sum_k w_g(y + kL, t) with
// w_g = exp(-(y - y0)^2 / (2Dt)) / sqrt(2 pi D t). Images are added until a
// term drops below 1e-12 of the peak.
double fokker_planck_gaussian(double y, double t, double y0, double D, double L);

// Probability per lattice row j: the density at y_j times the row width 1/N,
// renormalized to sum to one.
std::vector<double> fokker_planck_bins(const PhaseSpaceConfig& cfg, double t, double y0, double D);

double mean_y(const YDistribution& dist);
double second_moment(const YDistribution& dist);

// Least-squares slope of <y^2> against t over records with t in [t_lo, t_hi].
double fit_diffusion(const MomentSeries& series, double t_lo, double t_hi);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit least_squares_line(std::span<const double> t, std::span<const double> v);

// |ln eps| / h. Requires 0 < eps < 1.
double escape_time(double epsilon);

// C / (n_q eps^2).
double fidelity_timescale(unsigned n_q, double epsilon, double C);

// First f = 0.5 crossing of a run in the rescaled variable eps^2 n_q t,
// by linear interpolation; empty if the run never drops to 0.5.
std::optional<double> half_fidelity_crossing(const FidelitySeries& run);

struct CollapseFit {
  double c_fit = 0.0;
  double diagnostic = 0.0;  // max/min crossing ratio
  std::vector<double> crossings;
  std::vector<std::string> warnings;
};

// Median crossing over runs that reach f = 0.5. Throws FitError when fewer
// than min_runs distinct (n_q, eps) pairs are supplied or none cross.
CollapseFit fit_collapse_constant(std::span<const FidelitySeries> runs, size_t min_runs = 3);

// Sums consecutive groups of `factor` bins. factor must divide w.size().
std::vector<double> coarse_grain(std::span<const double> w, uint64_t factor);

// Total-variation distance (1/2) sum |a - b|.
double distribution_distance(const YDistribution& a, const YDistribution& b);
double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace catrev

#endif  // CATREVERSE_ANALYSIS_HPP
