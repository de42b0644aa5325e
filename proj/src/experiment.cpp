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

#include "experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "analysis.hpp"
#include "circuits.hpp"
#include "image_io.hpp"
#include "parallel.hpp"
#include "philox.hpp"
#include "qsv.hpp"

#ifndef CATREVERSE_VERSION
#define CATREVERSE_VERSION "0.0.0"
#endif

namespace catrev {

const char* scenario_name(Scenario s) noexcept {
  switch (s) {
    case Scenario::Diffusion: return "diffusion";
    case Scenario::Profile: return "profile";
    case Scenario::Image: return "image";
    case Scenario::Fidelity: return "fidelity";
    case Scenario::Verify: return "verify";
    case Scenario::Resources: return "resources";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::Diffusion, Scenario::Profile, Scenario::Image, Scenario::Fidelity,
                     Scenario::Verify, Scenario::Resources}) {
    if (name == scenario_name(s)) return s;
  }
  throw ConfigError("unknown scenario '" + std::string(name) +
                    "' (expected diffusion, profile, image, fidelity, verify or resources)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const size_t a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  const size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* want) {
  throw ConfigError(fmt::format("{}: cannot parse '{}' as {}", key, value, want));
}

template <class T>
T parse_number(std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, std::is_floating_point_v<T> ? "a number" : "a non-negative integer");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) bad_value(key, v, "a finite number");
  }
  return out;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view raw) {
  std::vector<T> out;
  const std::string_view v = trim(raw);
  if (v.empty()) return out;
  size_t start = 0;
  while (start <= v.size()) {
    const size_t comma = v.find(',', start);
    const size_t end = comma == std::string_view::npos ? v.size() : comma;
    out.push_back(parse_number<T>(key, v.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    out += fmt::format("{}", values[k]);
  }
  return out;
}

}  // namespace

RunConfig default_config(Scenario s) {
  RunConfig cfg;
  cfg.scenario = s;
  if (s == Scenario::Verify) {
    cfg.n_q = 3;
    cfg.n_q_prime = 4;
  }
  return cfg;
}

void set_config_value(RunConfig& cfg, std::string_view key_raw, std::string_view value) {
  const std::string_view key = trim(key_raw);
  if (key == "scenario") {
    cfg.scenario = parse_scenario(trim(value));
  } else if (key == "n_q") {
    cfg.n_q = parse_number<unsigned>(key, value);
  } else if (key == "n_q_prime") {
    cfg.n_q_prime = parse_number<unsigned>(key, value);
  } else if (key == "epsilon_quantum") {
    cfg.epsilon_quantum = parse_number<double>(key, value);
  } else if (key == "epsilon_classical") {
    cfg.epsilon_classical = parse_list<double>(key, value);
  } else if (key == "t_total") {
    cfg.t_total = parse_number<uint64_t>(key, value);
  } else if (key == "t_r") {
    cfg.t_r = parse_number<uint64_t>(key, value);
  } else if (key == "orbit_count") {
    cfg.orbit_count = static_cast<uint64_t>(parse_number<double>(key, value));
  } else if (key == "seed") {
    cfg.seed = parse_number<uint64_t>(key, value);
  } else if (key == "out") {
    cfg.out = std::string(trim(value));
  } else if (key == "image") {
    cfg.image = std::string(trim(value));
  } else if (key == "threads") {
    cfg.threads = parse_number<int>(key, value);
  } else if (key == "profile_times") {
    cfg.profile_times = parse_list<uint64_t>(key, value);
  } else if (key == "profile_bin") {
    cfg.profile_bin = parse_number<uint64_t>(key, value);
  } else if (key == "fidelity_nq") {
    cfg.fidelity_nq = parse_list<unsigned>(key, value);
  } else if (key == "fidelity_eps") {
    cfg.fidelity_eps = parse_list<double>(key, value);
  } else if (key == "fidelity_seeds") {
    cfg.fidelity_seeds = parse_number<uint64_t>(key, value);
  } else if (key == "fidelity_t_max") {
    cfg.fidelity_t_max = parse_number<uint64_t>(key, value);
  } else if (key == "fidelity_stop") {
    cfg.fidelity_stop = parse_number<double>(key, value);
  } else if (key == "fidelity_min_runs") {
    cfg.fidelity_min_runs = parse_number<uint64_t>(key, value);
  } else if (key == "particles") {
    cfg.particles = parse_list<double>(key, value);
  } else if (key == "L") {
    cfg.L = parse_number<uint64_t>(key, value);
  } else if (key == "C") {
    cfg.C = parse_number<double>(key, value);
  } else if (key == "corrupt_adder") {
    cfg.corrupt_adder = parse_bool(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_override(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
}

void apply_full_preset(RunConfig& cfg) {
  cfg.n_q = 7;
  cfg.n_q_prime = 10;
  cfg.orbit_count = 1000000;
}

void validate(const RunConfig& cfg) {
  try {
    (void)cfg.phase_space();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.t_r > cfg.t_total) {
    throw ConfigError(fmt::format("t_r={} exceeds t_total={}", cfg.t_r, cfg.t_total));
  }
  if (!(cfg.epsilon_quantum >= 0.0)) throw ConfigError("epsilon_quantum must be >= 0");
  for (double e : cfg.epsilon_classical) {
    if (!(e >= 0.0)) throw ConfigError("epsilon_classical entries must be >= 0");
  }
  if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
  const unsigned qubits = cfg.n_q + 2 * cfg.n_q_prime - 1;
  switch (cfg.scenario) {
    case Scenario::Diffusion:
    case Scenario::Image:
    case Scenario::Profile:
      if (cfg.orbit_count == 0) throw ConfigError("orbit_count must be >= 1");
      if (cfg.epsilon_classical.empty()) throw ConfigError("epsilon_classical must not be empty");
      if (cfg.profile_bin == 0 || (uint64_t{1} << cfg.n_q_prime) % cfg.profile_bin != 0) {
        throw ConfigError("profile_bin must divide 2^n_q_prime");
      }
      if ((cfg.scenario != Scenario::Profile || cfg.epsilon_quantum > 0.0) && qubits > 34) {
        throw ConfigError(fmt::format("{} qubits exceed the simulator limit", qubits));
      }
      break;
    case Scenario::Fidelity:
      if (cfg.fidelity_nq.empty() || cfg.fidelity_eps.empty()) {
        throw ConfigError("fidelity_nq and fidelity_eps must not be empty");
      }
      if (cfg.fidelity_seeds == 0) throw ConfigError("fidelity_seeds must be >= 1");
      for (double e : cfg.fidelity_eps) {
        if (!(e >= 0.0)) throw ConfigError("fidelity_eps entries must be >= 0");
      }
      for (unsigned n : cfg.fidelity_nq) {
        const unsigned np = n + (cfg.n_q_prime - cfg.n_q);
        if (n < 2 || n + 2 * np - 1 > 34) {
          throw ConfigError(fmt::format("fidelity_nq entry {} is out of range", n));
        }
      }
      break;
    case Scenario::Verify:
      if (cfg.n_q > 4 || cfg.n_q_prime > 6) {
        throw ConfigError("verify enumerates every basis state; needs n_q <= 4 and n_q_prime <= 6");
      }
      break;
    case Scenario::Resources:
      if (cfg.particles.empty()) throw ConfigError("particles must not be empty");
      if (!(cfg.epsilon_quantum > 0.0)) throw ConfigError("resources needs epsilon_quantum > 0");
      if (cfg.L < 2 || (cfg.L & (cfg.L - 1)) != 0) throw ConfigError("L must be a power of two >= 2");
      break;
  }
}

std::string config_echo(const RunConfig& cfg) {
  std::string s;
  auto line = [&](std::string_view k, const std::string& v) { s += fmt::format("{}={}\n", k, v); };
  line("scenario", scenario_name(cfg.scenario));
  line("n_q", fmt::format("{}", cfg.n_q));
  line("n_q_prime", fmt::format("{}", cfg.n_q_prime));
  line("epsilon_quantum", fmt::format("{}", cfg.epsilon_quantum));
  line("epsilon_classical", join(cfg.epsilon_classical));
  line("t_total", fmt::format("{}", cfg.t_total));
  line("t_r", fmt::format("{}", cfg.t_r));
  line("orbit_count", fmt::format("{}", cfg.orbit_count));
  line("seed", fmt::format("{}", cfg.seed));
  line("image", cfg.image);
  line("profile_times", join(cfg.profile_times));
  line("profile_bin", fmt::format("{}", cfg.profile_bin));
  line("fidelity_nq", join(cfg.fidelity_nq));
  line("fidelity_eps", join(cfg.fidelity_eps));
  line("fidelity_seeds", fmt::format("{}", cfg.fidelity_seeds));
  line("fidelity_t_max", fmt::format("{}", cfg.fidelity_t_max));
  line("fidelity_stop", fmt::format("{}", cfg.fidelity_stop));
  line("fidelity_min_runs", fmt::format("{}", cfg.fidelity_min_runs));
  line("particles", join(cfg.particles));
  line("L", fmt::format("{}", cfg.L));
  line("C", fmt::format("{}", cfg.C));
  line("corrupt_adder", cfg.corrupt_adder ? "true" : "false");
  return s;
}

bool ScenarioResult::ok() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

uint64_t derive_seed(uint64_t master, uint64_t tag) noexcept {
  const auto b = Philox4x32(master)(tag, 0x7365656400000000ull);
  return combine(b[0], b[1]);
}

std::vector<LatticePoint> initial_points(const RunConfig& cfg, const PhaseSpaceConfig& ps) {
  if (!cfg.image.empty()) {
    std::ifstream in(cfg.image, std::ios::binary);
    if (!in) throw ConfigError("cannot open image '" + cfg.image + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const BinaryImage img = load_portable_bitmap(buf.str());
    if (img.width() != ps.N()) {
      throw ConfigError(fmt::format("image '{}' is {}x{} but N={}", cfg.image, img.width(),
                                    img.width(), ps.N()));
    }
    auto pts = image_to_points(img, ps);
    if (pts.empty()) throw ConfigError("image '" + cfg.image + "' has no set pixels");
    return pts;
  }
  if (ps.N() >= 16) return image_to_points(generate_demon_image(ps.N()), ps);
  BinaryImage img(ps.N());
  const uint64_t lo = ps.N() / 4;
  for (uint64_t r = lo; r < lo + ps.N() / 2; ++r) {
    for (uint64_t c = lo; c < lo + ps.N() / 2; ++c) img.set(r, c);
  }
  return image_to_points(img, ps);
}

std::vector<double> invert_density(const std::vector<double>& pxy, const PhaseSpaceConfig& cfg) {
  if (pxy.size() != cfg.point_count()) throw std::domain_error("density table has wrong size");
  std::vector<double> out(pxy.size(), 0.0);
  for (uint64_t j = 0; j < cfg.LN(); ++j) {
    for (uint64_t i = 0; i < cfg.N(); ++i) {
      const LatticePoint q = invert_velocity_lattice({i, j}, cfg);
      out[flat_index(q, cfg)] = pxy[i + cfg.N() * j];
    }
  }
  return out;
}

namespace {

namespace fs = std::filesystem;

constexpr uint64_t kTagEnsemble = 1;
constexpr uint64_t kTagGateNoise = 2;
constexpr uint64_t kTagFidelity = 3;

class Output {
 public:
  Output(const RunConfig& cfg, ScenarioResult& result) : dir_(cfg.out), result_(result) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + cfg.out + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    result_.files.push_back(name);
  }

 private:
  fs::path dir_;
  ScenarioResult& result_;
};

void check(ScenarioResult& r, std::string name, bool passed, std::string detail) {
  r.checks.push_back({std::move(name), passed, std::move(detail)});
}

std::string num(double v) { return fmt::format("{}", v); }

double points_mass(std::span<const double> pxy, std::span<const LatticePoint> pts,
                   const PhaseSpaceConfig& ps) {
  double mass = 0.0;
  for (const auto& p : pts) mass += pxy[flat_index(p, ps)];
  return mass;
}

std::vector<double> point_density(std::span<const LatticePoint> pts, const PhaseSpaceConfig& ps) {
  std::vector<double> pxy(ps.point_count(), 0.0);
  const double w = 1.0 / static_cast<double>(pts.size());
  for (const auto& p : pts) pxy[flat_index(p, ps)] += w;
  return pxy;
}

YMoments moments_of(std::span<const double> w, const PhaseSpaceConfig& ps) {
  YMoments m;
  for (uint64_t j = 0; j < w.size(); ++j) {
    const double y = ps.y_of(j);
    m.mean_y += w[j] * y;
    m.mean_y2 += w[j] * y * y;
  }
  return m;
}

// Exact velocity inversion of every orbit, used to bring a reversed ensemble
// back to the initial frame.
void invert_exactly(Ensemble& e, double L) {
  parallel_for(e.points.size(), [&](uint64_t k) {
    PointStream unused(0, 0, 0);
    e.points[k] = invert_velocity_continuous(e.points[k], L, {0.0}, unused);
  });
}

std::string classical_track(double eps) { return fmt::format("classical_eps={}", eps); }

// ---------------------------------------------------------------- diffusion

void run_diffusion(const RunConfig& cfg, ScenarioResult& r, Output& out) {
  const PhaseSpaceConfig ps = cfg.phase_space();
  const double L = static_cast<double>(ps.L());
  const auto pts = initial_points(cfg, ps);
  const bool returns = cfg.t_total == 2 * cfg.t_r;
  std::string csv = "t,track,mean_y,mean_y2\n";
  auto row = [&](uint64_t t, const std::string& track, YMoments m) {
    csv += fmt::format("{},{},{},{}\n", t, track, m.mean_y, m.mean_y2);
  };

  for (double eps : cfg.epsilon_classical) {
    const std::string track = classical_track(eps);
    Ensemble e = make_ensemble(pts, ps, cfg.orbit_count, derive_seed(cfg.seed, kTagEnsemble));
    MomentSeries series;
    auto record = [&](uint64_t t) {
      const YMoments m = ensemble_moments(e);
      series.push_back({static_cast<double>(t), m.mean_y, m.mean_y2});
      row(t, track, m);
    };
    if (cfg.t_r == 0) invert_ensemble(e, L, {eps});
    record(0);
    for (uint64_t t = 1; t <= cfg.t_total; ++t) {
      evolve_ensemble(e, 1, L);
      if (t == cfg.t_r) invert_ensemble(e, L, {eps});
      record(t);
    }
    if (cfg.t_total > cfg.t_r) {
      auto best = series.begin() + static_cast<std::ptrdiff_t>(cfg.t_r + 1);
      for (auto it = best; it != series.end(); ++it) {
        if (it->mean_y2 < best->mean_y2) best = it;
      }
      r.metrics[track + ".min_after_inversion"] = best->t - static_cast<double>(cfg.t_r);
    }
    if (cfg.t_r >= 30) r.metrics[track + ".D_fit"] = fit_diffusion(series, 5.0, 30.0);
    if (returns) {
      invert_exactly(e, L);
      r.metrics[track + ".recovery_overlap"] = points_mass(ensemble_histogram(e, ps), pts, ps);
    }
  }

  const RegisterLayout layout(ps);
  QuantumState state = prepare_uniform_superposition(layout, pts);
  LatticeWavefunction exact(ps, pts);
  NoiseModel noise(cfg.epsilon_quantum, derive_seed(cfg.seed, kTagGateNoise));
  std::vector<YMoments> exact_moments;
  std::vector<double> final_pxy;
  RunOptions opt;
  opt.steps = cfg.t_total;
  opt.invert_at = cfg.t_r;
  opt.noise = &noise;
  opt.reference = &exact;
  opt.observer = [&](uint64_t t, const QuantumState& s) {
    exact_moments.push_back(moments_of(marginal_y_from_xy(exact.probabilities(), ps), ps));
    if (t == cfg.t_total) final_pxy = marginal_xy(s);
  };
  const auto records = run_iterations(state, opt);
  for (const auto& rec : records) row(rec.t, "quantum", {rec.mean_y, rec.mean_y2});
  for (uint64_t t = 0; t < exact_moments.size(); ++t) row(t, "quantum_exact", exact_moments[t]);
  for (uint64_t t = 0; t <= cfg.t_total; ++t) {
    row(t, "theory", {0.0, kDiffusionCoefficient * static_cast<double>(t)});
  }

  const double f_end = *records.back().fidelity;
  r.metrics["quantum.fidelity_final"] = f_end;
  r.metrics["quantum.y2_initial"] = records.front().mean_y2;
  r.metrics["quantum.y2_final"] = records.back().mean_y2;
  if (returns) {
    r.metrics["quantum.recovery_overlap"] = points_mass(invert_density(final_pxy, ps), pts, ps);
  }

  const double norm = state.norm_squared();
  check(r, "state_norm_preserved", std::abs(norm - 1.0) <= 1e-9, "norm^2=" + num(norm));
  bool in_range = true;
  for (const auto& rec : records) in_range &= *rec.fidelity >= 0.0 && *rec.fidelity <= 1.0 + 1e-9;
  check(r, "fidelity_in_unit_interval", in_range, "final f=" + num(f_end));
  if (returns) {
    const double d = std::abs(exact_moments.back().mean_y2 - exact_moments.front().mean_y2);
    check(r, "exact_track_returns", d <= 1e-9, "|<y^2>(2t_r) - <y^2>(0)|=" + num(d));
  }
  if (cfg.epsilon_quantum == 0.0) {
    check(r, "noise_free_fidelity_is_one", std::abs(f_end - 1.0) <= 1e-9, "f=" + num(f_end));
  }
  out.write("moments.csv", csv);
}

// ---------------------------------------------------------------- profile

void run_profile(const RunConfig& cfg, ScenarioResult& r, Output& out) {
  const PhaseSpaceConfig ps = cfg.phase_space();
  const double L = static_cast<double>(ps.L());
  const auto pts = initial_points(cfg, ps);
  std::set<uint64_t> times(cfg.profile_times.begin(), cfg.profile_times.end());
  times.insert(cfg.t_r);
  const uint64_t t_end = *times.rbegin();
  const double y0 = moments_of(marginal_y_from_xy(point_density(pts, ps), ps), ps).mean_y;

  std::map<uint64_t, std::vector<double>> classical, exact, noisy;
  {
    Ensemble e = make_ensemble(pts, ps, cfg.orbit_count, derive_seed(cfg.seed, kTagEnsemble));
    LatticeWavefunction psi(ps, pts);
    for (uint64_t t = 0; t <= t_end; ++t) {
      if (t > 0) {
        evolve_ensemble(e, 1, L);
        psi.forward();
      }
      if (times.count(t)) {
        classical[t] = marginal_y_from_xy(ensemble_histogram(e, ps), ps);
        exact[t] = marginal_y_from_xy(psi.probabilities(), ps);
      }
    }
  }
  if (cfg.epsilon_quantum > 0.0) {
    const RegisterLayout layout(ps);
    QuantumState state = prepare_uniform_superposition(layout, pts);
    NoiseModel noise(cfg.epsilon_quantum, derive_seed(cfg.seed, kTagGateNoise));
    RunOptions opt;
    opt.steps = t_end;
    opt.noise = &noise;
    opt.observer = [&](uint64_t t, const QuantumState& s) {
      if (times.count(t)) noisy[t] = marginal_y(s);
    };
    run_iterations(state, opt);
  }

  std::string csv = "t,track,j,y,w\n";
  bool reference_normalized = true;
  for (uint64_t t : times) {
    auto emit = [&](const std::string& track, const std::vector<double>& w) {
      for (uint64_t j = 0; j < w.size(); ++j) {
        csv += fmt::format("{},{},{},{},{}\n", t, track, j, ps.y_of(j), w[j]);
      }
    };
    emit("classical", classical[t]);
    emit("quantum_exact", exact[t]);
    if (noisy.count(t)) emit("quantum", noisy[t]);
    if (t > 0) {
      const auto ref = fokker_planck_bins(ps, static_cast<double>(t), y0, kDiffusionCoefficient);
      double sum = 0.0;
      for (double v : ref) sum += v;
      reference_normalized &= std::abs(sum - 1.0) <= 1e-6;
      emit("fokker_planck", ref);
      r.metrics[fmt::format("profile.t{}.tv_exact_reference", t)] = total_variation(exact[t], ref);
      r.metrics[fmt::format("profile.t{}.tv_classical_reference", t)] =
          total_variation(classical[t], ref);
      if (cfg.profile_bin > 1) {
        r.metrics[fmt::format("profile.t{}.tv_exact_reference_binned", t)] = total_variation(
            coarse_grain(exact[t], cfg.profile_bin), coarse_grain(ref, cfg.profile_bin));
      }
    }
    r.metrics[fmt::format("profile.t{}.tv_exact_classical", t)] =
        total_variation(exact[t], classical[t]);
    if (noisy.count(t)) {
      r.metrics[fmt::format("profile.t{}.tv_noisy_exact", t)] = total_variation(noisy[t], exact[t]);
    }
  }
  r.metrics["profile.y0"] = y0;
  check(r, "reference_integrates_to_one", reference_normalized, "tolerance 1e-6");
  out.write("profile.csv", csv);
}

// ---------------------------------------------------------------- image

void run_image(const RunConfig& cfg, ScenarioResult& r, Output& out) {
  const PhaseSpaceConfig ps = cfg.phase_space();
  const double L = static_cast<double>(ps.L());
  const auto pts = initial_points(cfg, ps);
  const double eps_c = cfg.epsilon_classical.front();
  const uint64_t tr = cfg.t_r;

  auto render = [&](const std::string& name, const std::vector<double>& pxy, const CellRegion& region) {
    out.write(name, write_portable_graymap(density_to_image(pxy, ps, region), true));
  };

  Ensemble e = make_ensemble(pts, ps, cfg.orbit_count, derive_seed(cfg.seed, kTagEnsemble));
  render("classical_initial.pgm", ensemble_histogram(e, ps), central_cell(ps));
  evolve_ensemble(e, tr, L);
  render("classical_t_r.pgm", ensemble_histogram(e, ps), whole_phase_space(ps));
  invert_ensemble(e, L, {eps_c});
  evolve_ensemble(e, tr, L);
  invert_exactly(e, L);
  const auto classical_end = ensemble_histogram(e, ps);
  render("classical_2t_r.pgm", classical_end, central_two_cells(ps));
  const double classical_overlap = points_mass(classical_end, pts, ps);

  const RegisterLayout layout(ps);
  QuantumState state = prepare_uniform_superposition(layout, pts);
  LatticeWavefunction exact(ps, pts);
  NoiseModel noise(cfg.epsilon_quantum, derive_seed(cfg.seed, kTagGateNoise));
  NoiseModel* noise_ptr = cfg.epsilon_quantum > 0.0 ? &noise : nullptr;
  const Circuit map = build_map_circuit(ps, layout);
  const Circuit inversion = build_inversion_circuit(ps, layout);
  render("quantum_initial.pgm", marginal_xy(state), central_cell(ps));
  for (uint64_t t = 0; t < tr; ++t) {
    apply_circuit(state, map, noise_ptr);
    exact.forward();
  }
  render("quantum_t_r.pgm", marginal_xy(state), whole_phase_space(ps));
  apply_circuit(state, inversion, noise_ptr);
  exact.invert_velocity();
  for (uint64_t t = 0; t < tr; ++t) {
    apply_circuit(state, map, noise_ptr);
    exact.forward();
  }
  const auto quantum_end = invert_density(marginal_xy(state), ps);
  render("quantum_2t_r.pgm", quantum_end, central_two_cells(ps));
  const double quantum_overlap = points_mass(quantum_end, pts, ps);
  const double f = fidelity(state, exact);

  out.write("summary.csv", fmt::format("track,epsilon,recovery_overlap,fidelity\n"
                                       "classical,{},{},\nquantum,{},{},{}\n",
                                       eps_c, classical_overlap, cfg.epsilon_quantum,
                                       quantum_overlap, f));
  r.metrics["image.classical.recovery_overlap"] = classical_overlap;
  r.metrics["image.quantum.recovery_overlap"] = quantum_overlap;
  r.metrics["image.quantum.fidelity"] = f;
  const double norm = state.norm_squared();
  check(r, "state_norm_preserved", std::abs(norm - 1.0) <= 1e-9, "norm^2=" + num(norm));
  if (cfg.epsilon_quantum == 0.0) {
    check(r, "noise_free_recovery_is_exact", std::abs(quantum_overlap - 1.0) <= 1e-9,
          "overlap=" + num(quantum_overlap));
  }
}

// ---------------------------------------------------------------- fidelity

FidelitySeries fidelity_run(const RunConfig& cfg, unsigned n_q, double eps, uint64_t noise_seed) {
  const PhaseSpaceConfig ps(n_q, n_q + (cfg.n_q_prime - cfg.n_q));
  RunConfig shape = cfg;
  shape.image.clear();
  const auto pts = initial_points(shape, ps);
  const RegisterLayout layout(ps);
  QuantumState state = prepare_uniform_superposition(layout, pts);
  LatticeWavefunction exact(ps, pts);
  NoiseModel noise(eps, noise_seed);
  NoiseModel* noise_ptr = eps > 0.0 ? &noise : nullptr;
  const Circuit map = build_map_circuit(ps, layout);
  FidelitySeries run{n_q, ps.n_q_prime(), eps, noise_seed, {}};
  run.points.push_back({0.0, fidelity(state, exact)});
  for (uint64_t t = 1; t <= cfg.fidelity_t_max; ++t) {
    apply_circuit(state, map, noise_ptr);
    exact.forward();
    const double f = fidelity(state, exact);
    run.points.push_back({static_cast<double>(t), f});
    if (f < cfg.fidelity_stop) break;
  }
  return run;
}

void run_fidelity(const RunConfig& cfg, ScenarioResult& r, Output& out) {
  std::vector<FidelitySeries> runs;
  bool starts_at_one = true;
  bool in_range = true;
  bool noise_free_flat = true;
  for (size_t a = 0; a < cfg.fidelity_nq.size(); ++a) {
    for (size_t b = 0; b < cfg.fidelity_eps.size(); ++b) {
      const unsigned n_q = cfg.fidelity_nq[a];
      const double eps = cfg.fidelity_eps[b];
      std::vector<FidelitySeries> seeds;
      for (uint64_t s = 0; s < cfg.fidelity_seeds; ++s) {
        const uint64_t tag = (kTagFidelity << 48) | (uint64_t{n_q} << 32) | (uint64_t{b} << 16) | s;
        seeds.push_back(fidelity_run(cfg, n_q, eps, derive_seed(cfg.seed, tag)));
      }
      size_t len = seeds.front().points.size();
      for (const auto& s : seeds) len = std::min(len, s.points.size());
      FidelitySeries avg = seeds.front();
      avg.points.resize(len);
      for (size_t k = 0; k < len; ++k) {
        double acc = 0.0;
        for (const auto& s : seeds) acc += s.points[k].f;
        avg.points[k].f = acc / static_cast<double>(seeds.size());
      }
      starts_at_one &= std::abs(avg.points.front().f - 1.0) <= 1e-12;
      for (const auto& p : avg.points) {
        in_range &= p.f >= 0.0 && p.f <= 1.0 + 1e-9;
        if (eps == 0.0) noise_free_flat &= std::abs(p.f - 1.0) <= 1e-9;
      }
      runs.push_back(std::move(avg));
    }
  }

  std::string csv = "n_q,n_q_prime,epsilon,t,x,f\n";
  for (const auto& run : runs) {
    const double scale = run.epsilon * run.epsilon * run.n_q;
    for (const auto& p : run.points) {
      csv += fmt::format("{},{},{},{},{},{}\n", run.n_q, run.n_q_prime, run.epsilon, p.t, scale * p.t, p.f);
    }
  }
  out.write("fidelity.csv", csv);

  std::string report;
  std::vector<FidelitySeries> noisy;
  for (const auto& run : runs) {
    if (run.epsilon > 0.0) noisy.push_back(run);
  }
  try {
    const CollapseFit fit = fit_collapse_constant(noisy, cfg.fidelity_min_runs);
    r.metrics["fidelity.C_fit"] = fit.c_fit;
    r.metrics["fidelity.diagnostic"] = fit.diagnostic;
    report += fmt::format("C_fit={}\ndiagnostic={}\n", fit.c_fit, fit.diagnostic);
    for (const auto& run : noisy) {
      if (auto x = half_fidelity_crossing(run)) {
        report += fmt::format("crossing n_q={} epsilon={} x={}\n", run.n_q, run.epsilon, *x);
      }
    }
    for (const auto& w : fit.warnings) report += "warning: " + w + "\n";
  } catch (const FitError& e) {
    report += std::string("fit unavailable: ") + e.what() + "\n";
  }
  out.write("collapse.txt", report);
  r.report += report;

  check(r, "fidelity_starts_at_one", starts_at_one, "tolerance 1e-12");
  check(r, "fidelity_in_unit_interval", in_range, "");
  check(r, "noise_free_fidelity_is_one", noise_free_flat, "tolerance 1e-9");
}

// ---------------------------------------------------------------- verify

struct Mismatch {
  uint64_t count = 0;
  std::string first;
};

void note(Mismatch& m, uint64_t i, uint64_t j) {
  if (m.count++ == 0) m.first = fmt::format("first at (i={}, j={})", i, j);
}

void run_verify(const RunConfig& cfg, ScenarioResult& r, Output& out) {
  const PhaseSpaceConfig ps = cfg.phase_space();
  const RegisterLayout layout(ps);
  Circuit map = build_map_circuit(ps, layout);
  const Circuit inversion = build_inversion_circuit(ps, layout);
  if (cfg.corrupt_adder) map.erase_gate(map.gates().size() / 2);

  const uint64_t N = ps.N();
  const uint64_t P = ps.point_count();
  std::set<LatticePoint> images;
  Mismatch inverse, involution, conjugation, map_eq, map_ws, inv_eq, inv_ws, reversal;
  constexpr uint64_t kReversalSteps = 3;
  for (uint64_t j = 0; j < ps.LN(); ++j) {
    for (uint64_t i = 0; i < N; ++i) {
      const LatticePoint p{i, j};
      const LatticePoint f = map_forward_lattice(p, ps);
      const LatticePoint v = invert_velocity_lattice(p, ps);
      images.insert(f);
      if (map_inverse_lattice(f, ps) != p) note(inverse, i, j);
      if (invert_velocity_lattice(v, ps) != p) note(involution, i, j);
      if (invert_velocity_lattice(map_forward_lattice(v, ps), ps) != map_inverse_lattice(p, ps)) {
        note(conjugation, i, j);
      }

      const uint64_t in = layout.basis_index(i, j);
      const uint64_t m = apply_classical(map, in);
      if (m / P != 0) note(map_ws, i, j);
      if (LatticePoint{m % N, (m % P) / N} != f) note(map_eq, i, j);
      const uint64_t w = apply_classical(inversion, in);
      if (w / P != 0) note(inv_ws, i, j);
      if (LatticePoint{w % N, (w % P) / N} != v) note(inv_eq, i, j);

      uint64_t s = in;
      for (int pass = 0; pass < 2; ++pass) {
        for (uint64_t t = 0; t < kReversalSteps; ++t) s = apply_classical(map, s);
        s = apply_classical(inversion, s);
      }
      if (s != in) note(reversal, i, j);
    }
  }

  auto add = [&](const char* name, const Mismatch& m) {
    check(r, name, m.count == 0,
          m.count == 0 ? fmt::format("{} states", P) : fmt::format("{} of {} states differ, {}", m.count, P, m.first));
  };
  check(r, "forward_map_bijective", images.size() == P, fmt::format("{} distinct images of {}", images.size(), P));
  add("inverse_undoes_forward", inverse);
  add("inversion_involution", involution);
  add("inversion_conjugates_forward", conjugation);
  add("map_circuit_matches_oracle", map_eq);
  add("map_workspace_restored", map_ws);
  add("inversion_circuit_matches_oracle", inv_eq);
  add("inversion_workspace_restored", inv_ws);
  add("circuit_time_reversal", reversal);

  const auto mc = gate_count_report(map, ps, CircuitKind::Map);
  const auto ic = gate_count_report(inversion, ps, CircuitKind::Inversion);
  std::string report;
  for (const auto& c : r.checks) {
    report += fmt::format("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
  }
  auto counts = [&](const char* name, const GateCountReport& g) {
    report += fmt::format("{} gates: not={} cnot={} toffoli={} total={} reference={} ratio={:.3f}\n", name,
                          g.counts.nots, g.counts.cnots, g.counts.toffolis, g.counts.total(),
                          g.reference, g.ratio);
  };
  counts("map", mc);
  counts("inversion", ic);
  r.metrics["verify.map_gates"] = static_cast<double>(mc.counts.total());
  r.metrics["verify.inversion_gates"] = static_cast<double>(ic.counts.total());
  r.report += report;
  out.write("verify.txt", report);
}

// ---------------------------------------------------------------- resources

void run_resources(const RunConfig& cfg, ScenarioResult& r, Output& out) {
  std::string csv = "particles,L,n_q,n_q_prime,total_qubits,epsilon,C,t_f\n";
  auto row = [&](const std::string& label, double particles, uint64_t L) {
    const ResourceEstimate est = resource_estimate(particles, L);
    const double tf = fidelity_timescale(est.n_q, cfg.epsilon_quantum, cfg.C);
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", particles, L, est.n_q, est.n_q_prime,
                       est.total_qubits, cfg.epsilon_quantum, cfg.C, tf);
    r.metrics[label + ".total_qubits"] = est.total_qubits;
    r.metrics[label + ".t_f"] = tf;
  };
  for (size_t k = 0; k < cfg.particles.size(); ++k) {
    row(fmt::format("resources.{}", k), cfg.particles[k], cfg.L);
  }
  const PhaseSpaceConfig ps = cfg.phase_space();
  row("resources.config", std::ldexp(1.0, 2 * static_cast<int>(ps.n_q())), ps.L());
  out.write("resources.csv", csv);
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  ScenarioResult result;
  Output out(cfg, result);
  switch (cfg.scenario) {
    case Scenario::Diffusion: run_diffusion(cfg, result, out); break;
    case Scenario::Profile: run_profile(cfg, result, out); break;
    case Scenario::Image: run_image(cfg, result, out); break;
    case Scenario::Fidelity: run_fidelity(cfg, result, out); break;
    case Scenario::Verify: run_verify(cfg, result, out); break;
    case Scenario::Resources: run_resources(cfg, result, out); break;
  }
  std::string manifest = fmt::format("catreverse {}\n", CATREVERSE_VERSION);
  manifest += config_echo(cfg);
  for (const auto& c : result.checks) {
    manifest += fmt::format("check {}={}\n", c.name, c.passed ? "pass" : "fail");
  }
  out.write("manifest.txt", manifest);
  return result;
}

}  // namespace catrev
