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

// Dense state-vector simulator for the three-register machine:
//
//   qubits [0, n_q)                      x register, LSB first
//   qubits [n_q, n_q + n_q')             y register, LSB first
//   qubits [n_q + n_q', n_q + 2n_q' - 1) workspace
//
// so basis state (i, j, w) has index i + N*j + N*LN*w.

#ifndef CATREVERSE_QSV_HPP
#define CATREVERSE_QSV_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "lattice.hpp"

namespace catrev {

using Amplitude = std::complex<double>;

struct RegisterSpan {
  unsigned first = 0;
  unsigned width = 0;
  unsigned qubit(unsigned k) const noexcept { return first + k; }
  friend bool operator==(const RegisterSpan&, const RegisterSpan&) = default;
};

class RegisterLayout {
 public:
  explicit RegisterLayout(const PhaseSpaceConfig& cfg) : cfg_(cfg) {}

  const PhaseSpaceConfig& config() const noexcept { return cfg_; }
  unsigned total_qubits() const noexcept { return cfg_.n_q() + 2 * cfg_.n_q_prime() - 1; }
  RegisterSpan x() const noexcept { return {0, cfg_.n_q()}; }
  RegisterSpan y() const noexcept { return {cfg_.n_q(), cfg_.n_q_prime()}; }
  RegisterSpan work() const noexcept {
    return {cfg_.n_q() + cfg_.n_q_prime(), cfg_.n_q_prime() - 1};
  }
  uint64_t dimension() const noexcept { return uint64_t{1} << total_qubits(); }
  uint64_t basis_index(uint64_t i, uint64_t j, uint64_t w = 0) const noexcept {
    return i + cfg_.N() * j + cfg_.point_count() * w;
  }

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;

 private:
  PhaseSpaceConfig cfg_;
};

class QuantumState {
 public:
  // |0...0>.
  explicit QuantumState(const RegisterLayout& layout);

  const RegisterLayout& layout() const noexcept { return layout_; }
  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  Amplitude& operator[](uint64_t k) noexcept { return amps_[k]; }
  const Amplitude& operator[](uint64_t k) const noexcept { return amps_[k]; }

  double norm_squared() const;

 private:
  RegisterLayout layout_;
  std::vector<Amplitude> amps_;
};

// Amplitude 1/sqrt(K) on each (i, j, w=0) of K distinct points.
QuantumState prepare_uniform_superposition(const RegisterLayout& layout,
                                           std::span<const LatticePoint> points);

struct Axis {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

enum class GateKind : uint8_t { Not, Cnot, Toffoli, Rot };

const char* gate_name(GateKind kind) noexcept;

// Controls come first and the target last in `qubits`.
struct Gate {
  GateKind kind = GateKind::Not;
  std::array<unsigned, 3> qubits{};
  Axis axis{};
  double angle = 0.0;

  static Gate make_not(unsigned target) { return {GateKind::Not, {target, 0, 0}}; }
  static Gate make_cnot(unsigned control, unsigned target) {
    return {GateKind::Cnot, {control, target, 0}};
  }
  static Gate make_toffoli(unsigned c1, unsigned c2, unsigned target) {
    return {GateKind::Toffoli, {c1, c2, target}};
  }
  static Gate make_rot(unsigned target, Axis axis, double angle) {
    return {GateKind::Rot, {target, 0, 0}, axis, angle};
  }

  unsigned arity() const noexcept;
  unsigned target() const noexcept { return qubits[arity() - 1]; }
  std::span<const unsigned> touched() const noexcept { return {qubits.data(), arity()}; }

  friend bool operator==(const Gate& a, const Gate& b) noexcept;
};

// Throws std::domain_error on out-of-range or repeated qubits.
void check_gate(const Gate& gate, unsigned total_qubits);

// Random single-qubit rotations exp(-i angle n.sigma / 2) with the axis
// uniform on the sphere and the angle uniform in [-epsilon, epsilon]. The
// k-th draw depends only on (seed, k).
class NoiseModel {
 public:
  NoiseModel(double epsilon, uint64_t seed);

  double epsilon() const noexcept { return epsilon_; }
  uint64_t seed() const noexcept { return seed_; }
  uint64_t draw_counter() const noexcept { return draw_counter_; }

  struct Rotation {
    Axis axis;
    double angle;
  };
  Rotation draw();

 private:
  double epsilon_;
  uint64_t seed_;
  uint64_t draw_counter_ = 0;
};

void apply_gate(QuantumState& state, const Gate& gate);

// Exact gate followed by one random rotation on every touched qubit, in
// ascending qubit order. Runs as a single pass over the amplitudes.
void apply_gate_noisy(QuantumState& state, const Gate& gate, NoiseModel& noise);

// |<a|b>|^2. Throws std::domain_error on layout mismatch.
double fidelity(const QuantumState& a, const QuantumState& b);

// p(i, j) = sum_w |a(i, j, w)|^2, indexed by flat_index.
std::vector<double> marginal_xy(const QuantumState& state);

// w(j) = sum_{i, w} |a(i, j, w)|^2.
std::vector<double> marginal_y(const QuantumState& state);
std::vector<double> marginal_y_from_xy(std::span<const double> pxy, const PhaseSpaceConfig& cfg);

// Independent draws from marginal_xy.
std::vector<LatticePoint> sample_measurements(const QuantumState& state, uint64_t count,
                                              uint64_t seed);

// Noise-free evolution restricted to the workspace-clear subspace. Exact
// circuits act there as the lattice permutations, so the amplitudes are just
// relabelled.
class LatticeWavefunction {
 public:
  LatticeWavefunction(const PhaseSpaceConfig& cfg, std::span<const LatticePoint> points);

  const PhaseSpaceConfig& config() const noexcept { return cfg_; }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }

  void forward();
  void invert_velocity();

  std::vector<double> probabilities() const;
  QuantumState to_state() const;

 private:
  PhaseSpaceConfig cfg_;
  std::vector<Amplitude> amps_;
};

double fidelity(const QuantumState& noisy, const LatticeWavefunction& exact);

}  // namespace catrev

#endif  // CATREVERSE_QSV_HPP
