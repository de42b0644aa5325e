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

#include "qsv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "philox.hpp"

namespace catrev {
namespace {

struct Mat2 {
  Amplitude m00, m01, m10, m11;
};

Mat2 rotation_matrix(const Axis& n, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  return {{c, -s * n.z}, {-s * n.y, -s * n.x}, {s * n.y, -s * n.x}, {c, s * n.z}};
}

// Plain real arithmetic; std::complex operator* goes through the Annex G
// NaN-recovery path, which dominates the kernel otherwise.
inline Amplitude mul_add(const Amplitude& m, const Amplitude& a, const Amplitude& n,
                         const Amplitude& b) noexcept {
  return {m.real() * a.real() - m.imag() * a.imag() + n.real() * b.real() - n.imag() * b.imag(),
          m.real() * a.imag() + m.imag() * a.real() + n.real() * b.imag() + n.imag() * b.real()};
}

inline void apply_mat(const Mat2& m, Amplitude& a, Amplitude& b) noexcept {
  const Amplitude a0 = a;
  const Amplitude b0 = b;
  a = mul_add(m.m00, a0, m.m01, b0);
  b = mul_add(m.m10, a0, m.m11, b0);
}

inline uint64_t insert_zero_bit(uint64_t v, unsigned pos) noexcept {
  const uint64_t low = v & ((uint64_t{1} << pos) - 1);
  return ((v ^ low) << 1) | low;
}

// Touched qubits in ascending order together with their role.
struct GateFootprint {
  std::array<unsigned, 3> sorted{};
  unsigned k = 0;
  uint64_t control_mask = 0;  // global bit mask
  uint64_t target_bit = 0;    // global bit
  unsigned local_controls = 0;
  unsigned local_target = 0;
};

GateFootprint footprint(const Gate& gate) {
  GateFootprint fp;
  fp.k = gate.arity();
  std::copy_n(gate.qubits.begin(), fp.k, fp.sorted.begin());
  std::sort(fp.sorted.begin(), fp.sorted.begin() + fp.k);
  for (unsigned c = 0; c + 1 < fp.k; ++c) fp.control_mask |= uint64_t{1} << gate.qubits[c];
  fp.target_bit = uint64_t{1} << gate.target();
  for (unsigned r = 0; r < fp.k; ++r) {
    const uint64_t bit = uint64_t{1} << fp.sorted[r];
    if (bit == fp.target_bit) {
      fp.local_target = 1u << r;
    } else if (fp.control_mask & bit) {
      fp.local_controls |= 1u << r;
    }
  }
  return fp;
}

uint64_t deposit(uint64_t g, const GateFootprint& fp) noexcept {
  for (unsigned r = 0; r < fp.k; ++r) g = insert_zero_bit(g, fp.sorted[r]);
  return g;
}

constexpr uint64_t kKernelChunk = uint64_t{1} << 12;

void apply_permutation(QuantumState& state, const Gate& gate) {
  const GateFootprint fp = footprint(gate);
  Amplitude* const data = state.amplitudes().data();
  parallel_chunks(state.layout().dimension() >> fp.k, kKernelChunk, [&](uint64_t lo, uint64_t hi) {
    const GateFootprint f = fp;
    Amplitude* __restrict a = data;
    for (uint64_t g = lo; g < hi; ++g) {
      const uint64_t k = deposit(g, f) | f.control_mask;
      std::swap(a[k], a[k | f.target_bit]);
    }
  });
}

void apply_single_qubit(QuantumState& state, unsigned qubit, const Mat2& m) {
  Amplitude* const data = state.amplitudes().data();
  parallel_chunks(state.layout().dimension() >> 1, kKernelChunk, [&](uint64_t lo, uint64_t hi) {
    const Mat2 mm = m;
    const unsigned q = qubit;
    const uint64_t bit = uint64_t{1} << q;
    Amplitude* __restrict a = data;
    for (uint64_t g = lo; g < hi; ++g) {
      const uint64_t k = insert_zero_bit(g, q);
      apply_mat(mm, a[k], a[k | bit]);
    }
  });
}

// Index tables for one rotation stage of a K-qubit group: lo[r][p] is the
// p-th member of the group with bit r clear, hi[r][p] its partner.
template <unsigned K>
struct StageTables {
  static constexpr unsigned kPairs = 1u << (K - 1);
  std::array<std::array<unsigned, kPairs>, K> lo{};
  std::array<std::array<unsigned, kPairs>, K> hi{};
  constexpr StageTables() {
    for (unsigned r = 0; r < K; ++r) {
      unsigned p = 0;
      for (unsigned m = 0; m < (1u << K); ++m) {
        if (!(m & (1u << r))) {
          lo[r][p] = m;
          hi[r][p] = m | (1u << r);
          ++p;
        }
      }
    }
  }
};

// Permutation plus one rotation per touched qubit, on groups of 2^K
// amplitudes that differ only in the touched bits. Real and imaginary parts
// are held in separate arrays.
template <unsigned K>
void apply_fused(QuantumState& state, const GateFootprint& fp, const std::array<Mat2, 3>& mats) {
  constexpr unsigned kSize = 1u << K;
  constexpr unsigned kPairs = kSize / 2;
  static constexpr StageTables<K> kTables{};
  std::array<uint64_t, kSize> offsets{};
  std::array<unsigned, kSize> source{};  // permutation: v[m] <- old[source[m]]
  for (unsigned m = 0; m < kSize; ++m) {
    for (unsigned r = 0; r < K; ++r) {
      if (m & (1u << r)) offsets[m] |= uint64_t{1} << fp.sorted[r];
    }
    const bool flip = (m & fp.local_controls) == fp.local_controls;
    source[m] = flip ? m ^ fp.local_target : m;
  }
  // Matrix entries in split form: m00r, m00i, m01r, ... per stage.
  std::array<std::array<double, 8>, 3> coef{};
  for (unsigned r = 0; r < K; ++r) {
    const Mat2& m = mats[r];
    coef[r] = {m.m00.real(), m.m00.imag(), m.m01.real(), m.m01.imag(),
               m.m10.real(), m.m10.imag(), m.m11.real(), m.m11.imag()};
  }
  Amplitude* const data = state.amplitudes().data();
  parallel_chunks(state.layout().dimension() >> K, kKernelChunk, [&](uint64_t lo, uint64_t hi) {
    const GateFootprint f = fp;
    const auto off = offsets;
    const auto src = source;
    const auto c = coef;
    Amplitude* __restrict a = data;
    for (uint64_t g = lo; g < hi; ++g) {
      uint64_t base = g;
#pragma GCC unroll 3
      for (unsigned r = 0; r < K; ++r) base = insert_zero_bit(base, f.sorted[r]);
      double re[kSize];
      double im[kSize];
#pragma GCC unroll 8
      for (unsigned m = 0; m < kSize; ++m) {
        const Amplitude v = a[base | off[src[m]]];
        re[m] = v.real();
        im[m] = v.imag();
      }
#pragma GCC unroll 3
      for (unsigned r = 0; r < K; ++r) {
        double ar[kPairs], ai[kPairs], br[kPairs], bi[kPairs];
#pragma GCC unroll 4
        for (unsigned p = 0; p < kPairs; ++p) {
          ar[p] = re[kTables.lo[r][p]];
          ai[p] = im[kTables.lo[r][p]];
          br[p] = re[kTables.hi[r][p]];
          bi[p] = im[kTables.hi[r][p]];
        }
        const auto& k = c[r];
#pragma GCC unroll 4
        for (unsigned p = 0; p < kPairs; ++p) {
          re[kTables.lo[r][p]] = k[0] * ar[p] - k[1] * ai[p] + k[2] * br[p] - k[3] * bi[p];
          im[kTables.lo[r][p]] = k[0] * ai[p] + k[1] * ar[p] + k[2] * bi[p] + k[3] * br[p];
          re[kTables.hi[r][p]] = k[4] * ar[p] - k[5] * ai[p] + k[6] * br[p] - k[7] * bi[p];
          im[kTables.hi[r][p]] = k[4] * ai[p] + k[5] * ar[p] + k[6] * bi[p] + k[7] * br[p];
        }
      }
#pragma GCC unroll 8
      for (unsigned m = 0; m < kSize; ++m) a[base | off[m]] = {re[m], im[m]};
    }
  });
}

}  // namespace

QuantumState::QuantumState(const RegisterLayout& layout)
    : layout_(layout), amps_(layout.dimension(), Amplitude{}) {
  if (layout.total_qubits() > 34) {
    throw std::domain_error("state of " + std::to_string(layout.total_qubits()) +
                            " qubits is too large to simulate");
  }
  amps_[0] = 1.0;
}

double QuantumState::norm_squared() const {
  return deterministic_sum<double>(amps_.size(), [&](uint64_t k) { return std::norm(amps_[k]); });
}

QuantumState prepare_uniform_superposition(const RegisterLayout& layout,
                                           std::span<const LatticePoint> points) {
  if (points.empty()) throw std::domain_error("uniform superposition needs at least one point");
  const auto& cfg = layout.config();
  std::vector<uint64_t> idx;
  idx.reserve(points.size());
  for (const auto& p : points) {
    check_point(p, cfg);
    idx.push_back(layout.basis_index(p.i, p.j));
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    throw std::domain_error("uniform superposition points must be distinct");
  }
  QuantumState state(layout);
  state[0] = 0.0;
  const double a = 1.0 / std::sqrt(static_cast<double>(points.size()));
  for (uint64_t k : idx) state[k] = a;
  return state;
}

const char* gate_name(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::Not: return "NOT";
    case GateKind::Cnot: return "CNOT";
    case GateKind::Toffoli: return "TOFFOLI";
    case GateKind::Rot: return "ROT";
  }
  return "?";
}

unsigned Gate::arity() const noexcept {
  switch (kind) {
    case GateKind::Cnot: return 2;
    case GateKind::Toffoli: return 3;
    default: return 1;
  }
}

bool operator==(const Gate& a, const Gate& b) noexcept {
  if (a.kind != b.kind) return false;
  for (unsigned k = 0; k < a.arity(); ++k) {
    if (a.qubits[k] != b.qubits[k]) return false;
  }
  if (a.kind == GateKind::Rot) {
    return a.angle == b.angle && a.axis.x == b.axis.x && a.axis.y == b.axis.y &&
           a.axis.z == b.axis.z;
  }
  return true;
}

void check_gate(const Gate& gate, unsigned total_qubits) {
  const auto q = gate.touched();
  for (size_t a = 0; a < q.size(); ++a) {
    if (q[a] >= total_qubits) {
      throw std::domain_error(std::string(gate_name(gate.kind)) + " qubit " +
                              std::to_string(q[a]) + " out of range for " +
                              std::to_string(total_qubits) + " qubits");
    }
    for (size_t b = a + 1; b < q.size(); ++b) {
      if (q[a] == q[b]) {
        throw std::domain_error(std::string(gate_name(gate.kind)) + " repeats qubit " +
                                std::to_string(q[a]));
      }
    }
  }
}

NoiseModel::NoiseModel(double epsilon, uint64_t seed) : epsilon_(epsilon), seed_(seed) {
  if (!(epsilon >= 0.0)) throw std::domain_error("noise epsilon must be >= 0");
}

NoiseModel::Rotation NoiseModel::draw() {
  constexpr uint64_t kNoiseDomain = 0x6e6f697365ull;  // "noise"
  const auto block = Philox4x32(seed_)(draw_counter_++, kNoiseDomain);
  const double z = 2.0 * unit_open(block[0]) - 1.0;
  const double phi = 2.0 * std::numbers::pi * unit_open(block[1]);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double angle = epsilon_ * (2.0 * unit_open(block[2]) - 1.0);
  return {{r * std::cos(phi), r * std::sin(phi), z}, angle};
}

void apply_gate(QuantumState& state, const Gate& gate) {
  check_gate(gate, state.layout().total_qubits());
  if (gate.kind == GateKind::Rot) {
    apply_single_qubit(state, gate.qubits[0], rotation_matrix(gate.axis, gate.angle));
  } else {
    apply_permutation(state, gate);
  }
}

void apply_gate_noisy(QuantumState& state, const Gate& gate, NoiseModel& noise) {
  check_gate(gate, state.layout().total_qubits());
  if (gate.kind == GateKind::Rot) {
    throw std::domain_error("noisy application is defined for NOT/CNOT/TOFFOLI only");
  }
  const GateFootprint fp = footprint(gate);
  std::array<Mat2, 3> mats{};
  for (unsigned r = 0; r < fp.k; ++r) {
    const auto rot = noise.draw();
    mats[r] = rotation_matrix(rot.axis, rot.angle);
  }
  switch (fp.k) {
    case 1: apply_fused<1>(state, fp, mats); break;
    case 2: apply_fused<2>(state, fp, mats); break;
    default: apply_fused<3>(state, fp, mats); break;
  }
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (!(a.layout() == b.layout())) throw std::domain_error("fidelity: layout mismatch");
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  const Amplitude overlap =
      deterministic_sum<Amplitude>(x.size(), [&](uint64_t k) { return std::conj(x[k]) * y[k]; });
  return std::min(1.0, std::norm(overlap));
}

std::vector<double> marginal_xy(const QuantumState& state) {
  const uint64_t points = state.layout().config().point_count();
  const uint64_t slices = state.layout().dimension() / points;
  const auto amps = state.amplitudes();
  std::vector<double> p(points, 0.0);
  parallel_for(points, [&](uint64_t k) {
    double acc = 0.0;
    for (uint64_t w = 0; w < slices; ++w) acc += std::norm(amps[k + w * points]);
    p[k] = acc;
  });
  return p;
}

std::vector<double> marginal_y_from_xy(std::span<const double> pxy, const PhaseSpaceConfig& cfg) {
  const uint64_t N = cfg.N();
  std::vector<double> w(cfg.LN(), 0.0);
  for (uint64_t j = 0; j < cfg.LN(); ++j) {
    double acc = 0.0;
    for (uint64_t i = 0; i < N; ++i) acc += pxy[i + N * j];
    w[j] = acc;
  }
  return w;
}

std::vector<double> marginal_y(const QuantumState& state) {
  return marginal_y_from_xy(marginal_xy(state), state.layout().config());
}

std::vector<LatticePoint> sample_measurements(const QuantumState& state, uint64_t count,
                                              uint64_t seed) {
  if (count == 0) throw std::domain_error("sample_measurements: count must be >= 1");
  const auto& cfg = state.layout().config();
  const auto p = marginal_xy(state);
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (size_t k = 0; k < p.size(); ++k) cdf[k] = (acc += p[k]);
  const Philox4x32 gen(seed);
  std::vector<LatticePoint> out;
  out.reserve(count);
  for (uint64_t s = 0; s < count; ++s) {
    const auto block = gen(s, 0x6d65617375726500ull);
    const double u = unit_closed_open(combine(block[0], block[1])) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto k = static_cast<uint64_t>(std::min<ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    out.push_back({k % cfg.N(), k / cfg.N()});
  }
  return out;
}

LatticeWavefunction::LatticeWavefunction(const PhaseSpaceConfig& cfg,
                                         std::span<const LatticePoint> points)
    : cfg_(cfg), amps_(cfg.point_count(), Amplitude{}) {
  if (points.empty()) throw std::domain_error("lattice wavefunction needs at least one point");
  const double a = 1.0 / std::sqrt(static_cast<double>(points.size()));
  for (const auto& p : points) {
    check_point(p, cfg);
    auto& slot = amps_[flat_index(p, cfg)];
    if (slot != Amplitude{}) throw std::domain_error("lattice wavefunction points must be distinct");
    slot = a;
  }
}

void LatticeWavefunction::forward() {
  std::vector<Amplitude> next(amps_.size());
  const uint64_t N = cfg_.N();
  parallel_for(amps_.size(), [&](uint64_t k) {
    next[flat_index(map_forward_lattice({k % N, k / N}, cfg_), cfg_)] = amps_[k];
  });
  amps_ = std::move(next);
}

void LatticeWavefunction::invert_velocity() {
  std::vector<Amplitude> next(amps_.size());
  const uint64_t N = cfg_.N();
  parallel_for(amps_.size(), [&](uint64_t k) {
    next[flat_index(invert_velocity_lattice({k % N, k / N}, cfg_), cfg_)] = amps_[k];
  });
  amps_ = std::move(next);
}

std::vector<double> LatticeWavefunction::probabilities() const {
  std::vector<double> p(amps_.size());
  for (size_t k = 0; k < amps_.size(); ++k) p[k] = std::norm(amps_[k]);
  return p;
}

QuantumState LatticeWavefunction::to_state() const {
  QuantumState state{RegisterLayout(cfg_)};
  state[0] = 0.0;
  for (size_t k = 0; k < amps_.size(); ++k) state[k] = amps_[k];
  return state;
}

double fidelity(const QuantumState& noisy, const LatticeWavefunction& exact) {
  if (!(noisy.layout().config() == exact.config())) {
    throw std::domain_error("fidelity: layout mismatch");
  }
  const auto x = exact.amplitudes();
  const auto y = noisy.amplitudes();
  const Amplitude overlap =
      deterministic_sum<Amplitude>(x.size(), [&](uint64_t k) { return std::conj(x[k]) * y[k]; });
  return std::min(1.0, std::norm(overlap));
}

}  // namespace catrev
