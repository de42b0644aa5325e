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

// Scenario runner: key=value configuration, deterministic seeding, CSV/PGM
// outputs and a manifest per run.

#ifndef CATREVERSE_EXPERIMENT_HPP
#define CATREVERSE_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lattice.hpp"

namespace catrev {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { Diffusion, Profile, Image, Fidelity, Verify, Resources };

const char* scenario_name(Scenario s) noexcept;
Scenario parse_scenario(std::string_view name);

struct RunConfig {
  Scenario scenario = Scenario::Diffusion;
  unsigned n_q = 5;
  unsigned n_q_prime = 8;
  double epsilon_quantum = 0.01;
  std::vector<double> epsilon_classical{1e-8, 1e-4};
  uint64_t t_total = 70;
  uint64_t t_r = 35;
  uint64_t orbit_count = 100000;
  uint64_t seed = 1;
  std::string out = "out";
  std::string image;  // PBM path; empty selects the procedural demon
  int threads = 0;    // 0: library default

  std::vector<uint64_t> profile_times{20};  // t_r is always added
  uint64_t profile_bin = 1;                 // lattice rows per bin for binned distances

  std::vector<unsigned> fidelity_nq{4, 5, 6};
  std::vector<double> fidelity_eps{0.03, 0.1};
  uint64_t fidelity_seeds = 1;
  uint64_t fidelity_t_max = 200;
  double fidelity_stop = 0.35;  // a run ends once f drops below this; 0 disables
  uint64_t fidelity_min_runs = 3;

  std::vector<double> particles{6.022e23};
  uint64_t L = 8;  // torus length for resource estimates
  double C = 0.5;

  bool corrupt_adder = false;  // verify only: drops one adder gate

  PhaseSpaceConfig phase_space() const { return {n_q, n_q_prime}; }
};

// Defaults for a scenario; verify starts from the exhaustive (3, 4) lattice.
RunConfig default_config(Scenario s);

// Sets one key from its textual value. Throws ConfigError on an unknown key
// or a malformed value.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
// "key=value".
void apply_override(RunConfig& cfg, std::string_view assignment);
// Lines of key=value; '#' starts a comment; blank lines ignored.
void apply_config_text(RunConfig& cfg, std::string_view text);
// Large run: n_q=7, n_q'=10, 10^6 orbits.
void apply_full_preset(RunConfig& cfg);
// Throws ConfigError when the configuration cannot be run.
void validate(const RunConfig& cfg);
// Every key that influences outputs, one key=value per line. The output
// directory and thread count are left out.
std::string config_echo(const RunConfig& cfg);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioResult {
  std::vector<Check> checks;
  std::map<std::string, double> metrics;
  std::vector<std::string> files;  // relative to the output directory
  std::string report;

  bool ok() const noexcept;
};

// Runs the scenario and writes its files into cfg.out (created if needed).
ScenarioResult run_scenario(const RunConfig& cfg);

// Initial pixels: the configured PBM or the procedural demon (N >= 16), or a
// centered N/2 x N/2 square for smaller lattices.
std::vector<LatticePoint> initial_points(const RunConfig& cfg, const PhaseSpaceConfig& ps);

// Mixes a tag into a master seed.
uint64_t derive_seed(uint64_t master, uint64_t tag) noexcept;

// Relabels a lattice density through the velocity inversion. After forward
// evolution, one inversion and the same number of steps, the dynamics sit at
// Inv(initial); this brings them back to the initial frame for comparison.
std::vector<double> invert_density(const std::vector<double>& pxy, const PhaseSpaceConfig& cfg);

}  // namespace catrev

#endif  // CATREVERSE_EXPERIMENT_HPP
