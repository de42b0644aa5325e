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

#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

namespace catrev {

double cat_map_entropy() noexcept { return std::log((3.0 + std::sqrt(5.0)) / 2.0); }

YDistribution::YDistribution(const PhaseSpaceConfig& config, std::vector<double> probabilities)
    : cfg(config), p(std::move(probabilities)) {
  if (p.size() != cfg.LN()) throw std::domain_error("YDistribution: length must equal LN");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::domain_error("YDistribution: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("YDistribution: probabilities must sum to 1");
}

double fokker_planck_gaussian(double y, double t, double y0, double D, double L) {
  if (!(t > 0.0)) throw std::domain_error("fokker_planck_gaussian: t must be > 0");
  if (!(D > 0.0)) throw std::domain_error("fokker_planck_gaussian: D must be > 0");
  if (!(L > 0.0)) throw std::domain_error("fokker_planck_gaussian: L must be > 0");
  const double var = D * t;
  const double peak = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  auto term = [&](double k) {
    const double d = y + k * L - y0;
    return peak * std::exp(-d * d / (2.0 * var));
  };
  const double k0 = std::round((y0 - y) / L);
  double sum = term(k0);
  const double cutoff = 1e-12 * peak;
  for (double dk = 1.0;; dk += 1.0) {
    const double up = term(k0 + dk);
    const double down = term(k0 - dk);
    sum += up + down;
    if (up < cutoff && down < cutoff) break;
  }
  return sum;
}

std::vector<double> fokker_planck_bins(const PhaseSpaceConfig& cfg, double t, double y0, double D) {
  const double L = static_cast<double>(cfg.L());
  const double width = 1.0 / static_cast<double>(cfg.N());
  std::vector<double> w(cfg.LN());
  double sum = 0.0;
  for (uint64_t j = 0; j < cfg.LN(); ++j) {
    w[j] = fokker_planck_gaussian(cfg.y_of(j), t, y0, D, L) * width;
    sum += w[j];
  }
  for (double& v : w) v /= sum;
  return w;
}

double mean_y(const YDistribution& dist) {
  double acc = 0.0;
  for (uint64_t j = 0; j < dist.p.size(); ++j) acc += dist.p[j] * dist.cfg.y_of(j);
  return acc;
}

double second_moment(const YDistribution& dist) {
  double acc = 0.0;
  for (uint64_t j = 0; j < dist.p.size(); ++j) {
    const double y = dist.cfg.y_of(j);
    acc += dist.p[j] * y * y;
  }
  return acc;
}

LinearFit least_squares_line(std::span<const double> t, std::span<const double> v) {
  if (t.size() != v.size() || t.size() < 2) throw FitError("line fit needs at least two points");
  const auto n = static_cast<double>(t.size());
  double mt = 0.0;
  double mv = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    mt += t[k];
    mv += v[k];
  }
  mt /= n;
  mv /= n;
  double stt = 0.0;
  double stv = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - mt) * (t[k] - mt);
    stv += (t[k] - mt) * (v[k] - mv);
  }
  if (!(stt > 0.0)) throw FitError("line fit: all abscissae coincide");
  const double slope = stv / stt;
  return {slope, mv - slope * mt};
}

double fit_diffusion(const MomentSeries& series, double t_lo, double t_hi) {
  std::vector<double> t;
  std::vector<double> v;
  for (const auto& r : series) {
    if (r.t >= t_lo && r.t <= t_hi) {
      t.push_back(r.t);
      v.push_back(r.mean_y2);
    }
  }
  if (t.size() < 5) {
    throw FitError("fit_diffusion: need at least 5 records in [" + std::to_string(t_lo) + ", " +
                   std::to_string(t_hi) + "], have " + std::to_string(t.size()));
  }
  return least_squares_line(t, v).slope;
}

double escape_time(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("escape_time: need 0 < eps < 1");
  return std::abs(std::log(epsilon)) / cat_map_entropy();
}

double fidelity_timescale(unsigned n_q, double epsilon, double C) {
  if (n_q < 1 || !(epsilon > 0.0)) {
    throw std::domain_error("fidelity_timescale: need n_q >= 1 and eps > 0");
  }
  return C / (static_cast<double>(n_q) * epsilon * epsilon);
}

std::optional<double> half_fidelity_crossing(const FidelitySeries& run) {
  const double scale = run.epsilon * run.epsilon * static_cast<double>(run.n_q);
  for (size_t k = 0; k < run.points.size(); ++k) {
    const auto& cur = run.points[k];
    if (cur.f > 0.5) continue;
    if (k == 0) return scale * cur.t;
    const auto& prev = run.points[k - 1];
    const double frac = (prev.f - 0.5) / (prev.f - cur.f);
    return scale * (prev.t + frac * (cur.t - prev.t));
  }
  return std::nullopt;
}

CollapseFit fit_collapse_constant(std::span<const FidelitySeries> runs, size_t min_runs) {
  std::set<std::pair<unsigned, double>> distinct;
  for (const auto& r : runs) distinct.insert({r.n_q, r.epsilon});
  if (distinct.size() < min_runs) {
    throw FitError("fit_collapse_constant: need " + std::to_string(min_runs) +
                   " runs with distinct (n_q, eps), have " + std::to_string(distinct.size()));
  }
  CollapseFit fit;
  for (const auto& r : runs) {
    if (auto x = half_fidelity_crossing(r)) {
      fit.crossings.push_back(*x);
    } else {
      fit.warnings.push_back("run n_q=" + std::to_string(r.n_q) + " eps=" +
                             std::to_string(r.epsilon) + " never reaches f=0.5; excluded");
    }
  }
  if (fit.crossings.empty()) throw FitError("fit_collapse_constant: no run crosses f=0.5");
  std::vector<double> sorted = fit.crossings;
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  fit.c_fit = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  fit.diagnostic = sorted.front() > 0.0 ? sorted.back() / sorted.front() : INFINITY;
  return fit;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::domain_error("total_variation: size mismatch");
  double acc = 0.0;
  for (size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
  return 0.5 * acc;
}

std::vector<double> coarse_grain(std::span<const double> w, uint64_t factor) {
  if (factor == 0 || w.size() % factor != 0) {
    throw std::domain_error("coarse_grain: factor must divide the bin count");
  }
  std::vector<double> out(w.size() / factor, 0.0);
  for (size_t k = 0; k < w.size(); ++k) out[k / factor] += w[k];
  return out;
}

double distribution_distance(const YDistribution& a, const YDistribution& b) {
  if (!(a.cfg == b.cfg)) throw std::domain_error("distribution_distance: config mismatch");
  return total_variation(a.p, b.p);
}

}  // namespace catrev
