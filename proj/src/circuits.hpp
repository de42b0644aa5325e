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

// Reversible circuits for one map iteration and for velocity inversion,
// built from NOT/CNOT/TOFFOLI ripple-carry modular adders whose carries live
// in the workspace register.

#ifndef CATREVERSE_CIRCUITS_HPP
#define CATREVERSE_CIRCUITS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "qsv.hpp"

namespace catrev {

struct GateCounts {
  uint64_t nots = 0;
  uint64_t cnots = 0;
  uint64_t toffolis = 0;
  uint64_t total() const noexcept { return nots + cnots + toffolis; }
  friend bool operator==(const GateCounts&, const GateCounts&) = default;
};

class Circuit {
 public:
  explicit Circuit(unsigned total_qubits) : total_qubits_(total_qubits) {}

  // Appends a NOT/CNOT/TOFFOLI. An identical gate directly before it is
  // removed instead, since both are self-inverse.
  void append(const Gate& gate);
  void append(const Circuit& other);

  unsigned total_qubits() const noexcept { return total_qubits_; }
  std::span<const Gate> gates() const noexcept { return gates_; }
  const GateCounts& counts() const noexcept { return counts_; }
  // Sum over gates of the number of qubits each gate acts on.
  uint64_t touched_qubit_total() const noexcept { return touched_; }

  // Gate order reversed; the inverse circuit.
  Circuit reversed() const;

  // One gate per line: "KIND q1 [q2 [q3]]", controls before target.
  std::string dump() const;

  // Removes gate k. Only meant for negative-control tests.
  void erase_gate(size_t k);

 private:
  void count(const Gate& gate, int sign);

  unsigned total_qubits_;
  std::vector<Gate> gates_;
  GateCounts counts_;
  uint64_t touched_ = 0;
};

// Parses the dump() format. Throws std::invalid_argument on bad input.
Circuit parse_circuit(std::string_view text, unsigned total_qubits);

// Permutation of computational basis states implemented by the circuit.
uint64_t apply_classical(const Circuit& circuit, uint64_t basis_state);

void apply_circuit(QuantumState& state, const Circuit& circuit, NoiseModel* noise = nullptr);

// dst <- (dst + src + constant) mod 2^width(dst), with carries in the first
// width(dst) - 1 workspace qubits which are returned to |0>. Throws
// std::domain_error if the workspace is too small, the registers overlap, or
// the constant does not fit.
Circuit build_adder(RegisterSpan src, RegisterSpan dst, uint64_t constant,
                    const RegisterLayout& layout);

// Exact inverse of build_adder.
Circuit build_subtractor(RegisterSpan src, RegisterSpan dst, uint64_t constant,
                         const RegisterLayout& layout);

// One forward iteration: y += x - N/2 (mod LN), then x += y (mod N).
Circuit build_map_circuit(const PhaseSpaceConfig& cfg, const RegisterLayout& layout);

// Velocity inversion: y <- -y (mod LN), then x += y (mod N).
Circuit build_inversion_circuit(const PhaseSpaceConfig& cfg, const RegisterLayout& layout);

enum class CircuitKind { Map, Inversion };

// Side-by-side comparison of our gate count with the reference formulas
// 10 n_q + 6 n_q' - 17 (map) and 8 n_q + 4 n_q' - 13 (inversion).
struct GateCountReport {
  CircuitKind kind = CircuitKind::Map;
  unsigned n_q = 0;
  unsigned n_q_prime = 0;
  GateCounts counts;
  uint64_t touched = 0;
  int64_t reference = 0;
  double ratio = 0.0;  // counts.total() / reference
  // Count vectors have vanishing second differences around (n_q, n_q').
  bool affine = false;
};

int64_t reference_gate_count(CircuitKind kind, unsigned n_q, unsigned n_q_prime) noexcept;
GateCountReport gate_count_report(const Circuit& circuit, const PhaseSpaceConfig& cfg,
                                  CircuitKind kind);

struct ResourceEstimate {
  unsigned n_q = 0;
  unsigned n_q_prime = 0;
  unsigned total_qubits = 0;
};

// Smallest register sizes holding n_particles <= N^2 lattice points on a torus
// of length L (a power of two >= 2).
ResourceEstimate resource_estimate(double n_particles, uint64_t L);

struct IterationRecord {
  uint64_t t = 0;
  double mean_y = 0.0;
  double mean_y2 = 0.0;
  std::optional<double> fidelity;
};

struct RunOptions {
  uint64_t steps = 0;
  // Inversion inserted right after map step `invert_at` (0: before the first).
  std::optional<uint64_t> invert_at;
  NoiseModel* noise = nullptr;
  // Co-evolved noise-free reference; enables the fidelity column.
  LatticeWavefunction* reference = nullptr;
  // Called at t = 0 and after every step.
  std::function<void(uint64_t t, const QuantumState&)> observer;
};

std::vector<IterationRecord> run_iterations(QuantumState& state, const RunOptions& options);

}  // namespace catrev

#endif  // CATREVERSE_CIRCUITS_HPP
