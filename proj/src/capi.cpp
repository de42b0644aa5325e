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

#include "catreverse/catreverse.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "analysis.hpp"
#include "circuits.hpp"
#include "experiment.hpp"
#include "image_io.hpp"
#include "lattice.hpp"
#include "parallel.hpp"
#include "qsv.hpp"

struct catrev_circuit {
  catrev::Circuit circuit;
};

struct catrev_state {
  catrev::QuantumState state;
  std::optional<catrev::NoiseModel> noise;
};

struct catrev_run {
  catrev::RunConfig config;
  std::optional<catrev::ScenarioResult> result;
};

namespace {

thread_local std::string g_last_error;

catrev_status fail(catrev_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

// Maps exceptions from the core onto status codes.
template <class Fn>
catrev_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    return fn();
  } catch (const catrev::ConfigError& e) {
    return fail(CATREV_ERR_PARSE, e.what());
  } catch (const catrev::ParseError& e) {
    return fail(CATREV_ERR_PARSE, e.what());
  } catch (const catrev::FitError& e) {
    return fail(CATREV_ERR_FIT, e.what());
  } catch (const std::domain_error& e) {
    return fail(CATREV_ERR_DOMAIN, e.what());
  } catch (const std::out_of_range& e) {
    return fail(CATREV_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CATREV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CATREV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CATREV_ERR_INTERNAL, "unknown error");
  }
}

catrev_status null_arg(const char* name) {
  return fail(CATREV_ERR_NULL_ARGUMENT, std::string(name) + " must not be NULL");
}

catrev_status copy_out(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buffer == nullptr || capacity == 0) {
    return capacity == 0 && buffer == nullptr ? CATREV_OK : null_arg("buffer");
  }
  const size_t n = std::min(capacity - 1, text.size());
  std::memcpy(buffer, text.data(), n);
  buffer[n] = '\0';
  if (n < text.size()) return fail(CATREV_ERR_BUFFER_TOO_SMALL, "buffer too small");
  return CATREV_OK;
}

using PointMap = catrev::LatticePoint (*)(const catrev::LatticePoint&, const catrev::PhaseSpaceConfig&);

catrev_status lattice_call(PointMap fn, unsigned n_q, unsigned n_q_prime, uint64_t i, uint64_t j,
                           uint64_t* out_i, uint64_t* out_j) {
  if (!out_i) return null_arg("out_i");
  if (!out_j) return null_arg("out_j");
  return guarded([&] {
    const catrev::PhaseSpaceConfig cfg(n_q, n_q_prime);
    const auto p = fn({i, j}, cfg);
    *out_i = p.i;
    *out_j = p.j;
    return CATREV_OK;
  });
}

}  // namespace

extern "C" {

const char* catrev_version(void) { return CATREVERSE_VERSION; }

const char* catrev_status_string(catrev_status status) {
  switch (status) {
    case CATREV_OK: return "ok";
    case CATREV_ERR_NULL_ARGUMENT: return "null argument";
    case CATREV_ERR_DOMAIN: return "argument out of range";
    case CATREV_ERR_PARSE: return "parse error";
    case CATREV_ERR_IO: return "i/o error";
    case CATREV_ERR_FIT: return "fit error";
    case CATREV_ERR_CHECK_FAILED: return "check failed";
    case CATREV_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case CATREV_ERR_NOT_FOUND: return "not found";
    case CATREV_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* catrev_last_error(void) { return g_last_error.c_str(); }

catrev_status catrev_set_threads(int requested, int* in_effect) {
  return guarded([&] {
    const int n = catrev::set_thread_count(requested);
    if (in_effect) *in_effect = n;
    return CATREV_OK;
  });
}

catrev_status catrev_map_forward(unsigned n_q, unsigned n_q_prime, uint64_t i, uint64_t j,
                                 uint64_t* out_i, uint64_t* out_j) {
  return lattice_call(catrev::map_forward_lattice, n_q, n_q_prime, i, j, out_i, out_j);
}

catrev_status catrev_map_inverse(unsigned n_q, unsigned n_q_prime, uint64_t i, uint64_t j,
                                 uint64_t* out_i, uint64_t* out_j) {
  return lattice_call(catrev::map_inverse_lattice, n_q, n_q_prime, i, j, out_i, out_j);
}

catrev_status catrev_invert_velocity(unsigned n_q, unsigned n_q_prime, uint64_t i, uint64_t j,
                                     uint64_t* out_i, uint64_t* out_j) {
  return lattice_call(catrev::invert_velocity_lattice, n_q, n_q_prime, i, j, out_i, out_j);
}

catrev_status catrev_lyapunov_exponent(uint64_t steps, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = catrev::lyapunov_exponent(steps);
    return CATREV_OK;
  });
}

catrev_status catrev_resource_estimate(double particles, uint64_t L, unsigned* n_q,
                                       unsigned* n_q_prime, unsigned* total_qubits) {
  return guarded([&] {
    const auto est = catrev::resource_estimate(particles, L);
    if (n_q) *n_q = est.n_q;
    if (n_q_prime) *n_q_prime = est.n_q_prime;
    if (total_qubits) *total_qubits = est.total_qubits;
    return CATREV_OK;
  });
}

catrev_status catrev_fidelity_timescale(unsigned n_q, double epsilon, double C, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = catrev::fidelity_timescale(n_q, epsilon, C);
    return CATREV_OK;
  });
}

catrev_status catrev_escape_time(double epsilon, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = catrev::escape_time(epsilon);
    return CATREV_OK;
  });
}

catrev_status catrev_circuit_create(unsigned n_q, unsigned n_q_prime, catrev_circuit_kind kind,
                                    catrev_circuit** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const catrev::PhaseSpaceConfig cfg(n_q, n_q_prime);
    const catrev::RegisterLayout layout(cfg);
    switch (kind) {
      case CATREV_CIRCUIT_MAP:
        *out = new catrev_circuit{catrev::build_map_circuit(cfg, layout)};
        return CATREV_OK;
      case CATREV_CIRCUIT_INVERSION:
        *out = new catrev_circuit{catrev::build_inversion_circuit(cfg, layout)};
        return CATREV_OK;
    }
    return fail(CATREV_ERR_DOMAIN, "unknown circuit kind");
  });
}

void catrev_circuit_free(catrev_circuit* circuit) { delete circuit; }

catrev_status catrev_circuit_counts(const catrev_circuit* circuit, uint64_t* nots, uint64_t* cnots,
                                    uint64_t* toffolis) {
  if (!circuit) return null_arg("circuit");
  const auto& c = circuit->circuit.counts();
  if (nots) *nots = c.nots;
  if (cnots) *cnots = c.cnots;
  if (toffolis) *toffolis = c.toffolis;
  g_last_error.clear();
  return CATREV_OK;
}

catrev_status catrev_circuit_qubits(const catrev_circuit* circuit, unsigned* total) {
  if (!circuit) return null_arg("circuit");
  if (!total) return null_arg("total");
  *total = circuit->circuit.total_qubits();
  g_last_error.clear();
  return CATREV_OK;
}

catrev_status catrev_circuit_apply_classical(const catrev_circuit* circuit, uint64_t basis_state,
                                             uint64_t* out) {
  if (!circuit) return null_arg("circuit");
  if (!out) return null_arg("out");
  return guarded([&] {
    const unsigned q = circuit->circuit.total_qubits();
    if (q < 64 && (basis_state >> q) != 0) {
      return fail(CATREV_ERR_DOMAIN, "basis state has bits beyond the register");
    }
    *out = catrev::apply_classical(circuit->circuit, basis_state);
    return CATREV_OK;
  });
}

catrev_status catrev_circuit_dump(const catrev_circuit* circuit, char* buffer, size_t capacity,
                                  size_t* needed) {
  if (!circuit) return null_arg("circuit");
  return guarded([&] { return copy_out(circuit->circuit.dump(), buffer, capacity, needed); });
}

catrev_status catrev_state_create(unsigned n_q, unsigned n_q_prime, const uint64_t* ij, size_t count,
                                  catrev_state** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (!ij && count > 0) return null_arg("ij");
  return guarded([&] {
    const catrev::PhaseSpaceConfig cfg(n_q, n_q_prime);
    std::vector<catrev::LatticePoint> pts(count);
    for (size_t k = 0; k < count; ++k) pts[k] = {ij[2 * k], ij[2 * k + 1]};
    const catrev::RegisterLayout layout(cfg);
    *out = new catrev_state{catrev::prepare_uniform_superposition(layout, pts), std::nullopt};
    return CATREV_OK;
  });
}

void catrev_state_free(catrev_state* state) { delete state; }

catrev_status catrev_state_set_noise(catrev_state* state, double epsilon, uint64_t seed) {
  if (!state) return null_arg("state");
  return guarded([&] {
    if (!(epsilon >= 0.0)) return fail(CATREV_ERR_DOMAIN, "epsilon must be >= 0");
    if (epsilon == 0.0) {
      state->noise.reset();
    } else {
      state->noise.emplace(epsilon, seed);
    }
    return CATREV_OK;
  });
}

catrev_status catrev_state_apply(catrev_state* state, const catrev_circuit* circuit) {
  if (!state) return null_arg("state");
  if (!circuit) return null_arg("circuit");
  return guarded([&] {
    if (circuit->circuit.total_qubits() != state->state.layout().total_qubits()) {
      return fail(CATREV_ERR_DOMAIN, "circuit and state have different qubit counts");
    }
    catrev::apply_circuit(state->state, circuit->circuit, state->noise ? &*state->noise : nullptr);
    return CATREV_OK;
  });
}

catrev_status catrev_state_marginal_y(const catrev_state* state, double* out, size_t length) {
  if (!state) return null_arg("state");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto w = catrev::marginal_y(state->state);
    if (length != w.size()) {
      return fail(CATREV_ERR_DOMAIN, "length must equal 2^n_q_prime = " + std::to_string(w.size()));
    }
    std::copy(w.begin(), w.end(), out);
    return CATREV_OK;
  });
}

catrev_status catrev_state_fidelity(const catrev_state* a, const catrev_state* b, double* out) {
  if (!a) return null_arg("a");
  if (!b) return null_arg("b");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = catrev::fidelity(a->state, b->state);
    return CATREV_OK;
  });
}

catrev_status catrev_state_norm(const catrev_state* state, double* out) {
  if (!state) return null_arg("state");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = state->state.norm_squared();
    return CATREV_OK;
  });
}

catrev_status catrev_run_create(const char* scenario, catrev_run** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (!scenario) return null_arg("scenario");
  return guarded([&] {
    auto run = std::make_unique<catrev_run>();
    run->config = catrev::default_config(catrev::parse_scenario(scenario));
    *out = run.release();
    return CATREV_OK;
  });
}

void catrev_run_free(catrev_run* run) { delete run; }

catrev_status catrev_run_load(catrev_run* run, const char* path) {
  if (!run) return null_arg("run");
  if (!path) return null_arg("path");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fail(CATREV_ERR_IO, std::string("cannot open config '") + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const auto scenario = run->config.scenario;
    catrev::apply_config_text(run->config, buf.str());
    if (run->config.scenario != scenario) {
      return fail(CATREV_ERR_PARSE, std::string("config '") + path + "' is for scenario '" +
                                        catrev::scenario_name(run->config.scenario) + "'");
    }
    return CATREV_OK;
  });
}

catrev_status catrev_run_set(catrev_run* run, const char* assignment) {
  if (!run) return null_arg("run");
  if (!assignment) return null_arg("assignment");
  return guarded([&] {
    catrev::apply_override(run->config, assignment);
    return CATREV_OK;
  });
}

catrev_status catrev_run_full_preset(catrev_run* run) {
  if (!run) return null_arg("run");
  catrev::apply_full_preset(run->config);
  g_last_error.clear();
  return CATREV_OK;
}

catrev_status catrev_run_execute(catrev_run* run) {
  if (!run) return null_arg("run");
  return guarded([&] {
    run->result.reset();
    run->result = catrev::run_scenario(run->config);
    if (!run->result->ok()) {
      std::string failed;
      for (const auto& c : run->result->checks) {
        if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
      }
      return fail(CATREV_ERR_CHECK_FAILED, "failed checks: " + failed);
    }
    return CATREV_OK;
  });
}

catrev_status catrev_run_report(const catrev_run* run, char* buffer, size_t capacity, size_t* needed) {
  if (!run) return null_arg("run");
  return guarded([&] {
    if (!run->result) return fail(CATREV_ERR_NOT_FOUND, "scenario has not been executed");
    const auto& r = *run->result;
    std::string text;
    for (const auto& c : r.checks) {
      text += (c.passed ? "PASS " : "FAIL ") + c.name;
      if (!c.detail.empty()) text += ": " + c.detail;
      text += '\n';
    }
    for (const auto& [name, value] : r.metrics) {
      std::ostringstream v;
      v.precision(10);
      v << value;
      text += name + " = " + v.str() + '\n';
    }
    text += r.report;
    for (const auto& f : r.files) text += "wrote " + f + '\n';
    return copy_out(text, buffer, capacity, needed);
  });
}

catrev_status catrev_run_metric(const catrev_run* run, const char* name, double* out) {
  if (!run) return null_arg("run");
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] {
    if (!run->result) return fail(CATREV_ERR_NOT_FOUND, "scenario has not been executed");
    const auto it = run->result->metrics.find(name);
    if (it == run->result->metrics.end()) {
      return fail(CATREV_ERR_NOT_FOUND, std::string("no metric named '") + name + "'");
    }
    *out = it->second;
    return CATREV_OK;
  });
}

}  // extern "C"
