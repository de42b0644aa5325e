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

#include "circuits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace catrev {

void Circuit::count(const Gate& gate, int sign) {
  switch (gate.kind) {
    case GateKind::Not: counts_.nots += sign; break;
    case GateKind::Cnot: counts_.cnots += sign; break;
    case GateKind::Toffoli: counts_.toffolis += sign; break;
    case GateKind::Rot: throw std::domain_error("circuits hold NOT/CNOT/TOFFOLI only");
  }
  touched_ += sign * static_cast<int64_t>(gate.arity());
}

void Circuit::append(const Gate& gate) {
  check_gate(gate, total_qubits_);
  if (!gates_.empty() && gates_.back() == gate) {
    count(gate, -1);
    gates_.pop_back();
    return;
  }
  count(gate, +1);
  gates_.push_back(gate);
}

void Circuit::append(const Circuit& other) {
  if (other.total_qubits_ != total_qubits_) {
    throw std::domain_error("cannot append circuits of different widths");
  }
  for (const Gate& g : other.gates_) append(g);
}

Circuit Circuit::reversed() const {
  Circuit out(total_qubits_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.append(*it);
  return out;
}

std::string Circuit::dump() const {
  std::string out;
  for (const Gate& g : gates_) {
    out += gate_name(g.kind);
    for (unsigned q : g.touched()) {
      out += ' ';
      out += std::to_string(q);
    }
    out += '\n';
  }
  return out;
}

void Circuit::erase_gate(size_t k) {
  if (k >= gates_.size()) throw std::out_of_range("erase_gate index");
  count(gates_[k], -1);
  gates_.erase(gates_.begin() + static_cast<ptrdiff_t>(k));
}

Circuit parse_circuit(std::string_view text, unsigned total_qubits) {
  Circuit c(total_qubits);
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    std::vector<unsigned> q;
    unsigned v = 0;
    while (fields >> v) q.push_back(v);
    if (!fields.eof()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": bad qubit index");
    }
    Gate g;
    if (kind == "NOT" && q.size() == 1) {
      g = Gate::make_not(q[0]);
    } else if (kind == "CNOT" && q.size() == 2) {
      g = Gate::make_cnot(q[0], q[1]);
    } else if (kind == "TOFFOLI" && q.size() == 3) {
      g = Gate::make_toffoli(q[0], q[1], q[2]);
    } else {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unrecognized gate '" +
                                  line + "'");
    }
    try {
      c.append(g);
    } catch (const std::domain_error& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

uint64_t apply_classical(const Circuit& circuit, uint64_t b) {
  auto bit = [&](unsigned q) { return (b >> q) & 1u; };
  for (const Gate& g : circuit.gates()) {
    switch (g.kind) {
      case GateKind::Not:
        b ^= uint64_t{1} << g.qubits[0];
        break;
      case GateKind::Cnot:
        if (bit(g.qubits[0])) b ^= uint64_t{1} << g.qubits[1];
        break;
      case GateKind::Toffoli:
        if (bit(g.qubits[0]) && bit(g.qubits[1])) b ^= uint64_t{1} << g.qubits[2];
        break;
      case GateKind::Rot:
        throw std::domain_error("apply_classical: rotation is not a permutation");
    }
  }
  return b;
}

void apply_circuit(QuantumState& state, const Circuit& circuit, NoiseModel* noise) {
  if (circuit.total_qubits() != state.layout().total_qubits()) {
    throw std::domain_error("circuit width does not match state");
  }
  const bool noisy = noise != nullptr && noise->epsilon() > 0.0;
  for (const Gate& g : circuit.gates()) {
    if (noisy) {
      apply_gate_noisy(state, g, *noise);
    } else {
      apply_gate(state, g);
    }
  }
}

namespace {

// One bit of the addend: a classical constant or the value of a qubit.
struct Literal {
  enum class Kind { Zero, One, Qubit } kind = Kind::Zero;
  unsigned qubit = 0;

  static Literal constant(bool v) { return {v ? Kind::One : Kind::Zero, 0}; }
  static Literal of(unsigned q) { return {Kind::Qubit, q}; }
};

// target ^= a
void xor_into(Circuit& c, unsigned target, Literal a) {
  switch (a.kind) {
    case Literal::Kind::Zero: break;
    case Literal::Kind::One: c.append(Gate::make_not(target)); break;
    case Literal::Kind::Qubit: c.append(Gate::make_cnot(a.qubit, target)); break;
  }
}

// target ^= a AND d
void and_into(Circuit& c, unsigned target, Literal a, unsigned d) {
  switch (a.kind) {
    case Literal::Kind::Zero: break;
    case Literal::Kind::One: c.append(Gate::make_cnot(d, target)); break;
    case Literal::Kind::Qubit: c.append(Gate::make_toffoli(a.qubit, d, target)); break;
  }
}

// dst <- dst + addend + carry_in (mod 2^m), m = dst.size(). carries[k - 1]
// holds the carry into bit k and starts and ends in |0>.
//
// Carry k+1 is computed as a.d XOR c.(a XOR d), leaving a XOR d in d. On the
// way back each carry is cleared using a.d = a.(a XOR d) XOR a, and the sum
// bit is finished by XORing in the carry.
void ripple_add(Circuit& c, std::span<const Literal> addend, std::span<const unsigned> dst,
                bool carry_in, std::span<const unsigned> carries) {
  const size_t m = dst.size();
  if (m == 0) return;
  auto carry = [&](size_t k) {
    return k == 0 ? Literal::constant(carry_in) : Literal::of(carries[k - 1]);
  };
  for (size_t k = 0; k + 1 < m; ++k) {
    const unsigned t = carries[k];
    and_into(c, t, addend[k], dst[k]);
    xor_into(c, dst[k], addend[k]);
    and_into(c, t, carry(k), dst[k]);
  }
  xor_into(c, dst[m - 1], addend[m - 1]);
  xor_into(c, dst[m - 1], carry(m - 1));
  for (size_t k = m - 1; k-- > 0;) {
    const unsigned t = carries[k];
    and_into(c, t, carry(k), dst[k]);
    and_into(c, t, addend[k], dst[k]);
    xor_into(c, t, addend[k]);
    xor_into(c, dst[k], carry(k));
  }
}

std::vector<unsigned> qubits_of(RegisterSpan r, unsigned count) {
  std::vector<unsigned> q(count);
  for (unsigned k = 0; k < count; ++k) q[k] = r.qubit(k);
  return q;
}

void check_disjoint(std::span<const unsigned> a, std::span<const unsigned> b, const char* what) {
  for (unsigned x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) {
      throw std::domain_error(std::string("adder registers overlap: ") + what);
    }
  }
}

}  // namespace

Circuit build_adder(RegisterSpan src, RegisterSpan dst, uint64_t constant,
                    const RegisterLayout& layout) {
  const unsigned m = dst.width;
  const unsigned w = src.width;
  const unsigned total = layout.total_qubits();
  if (m == 0 || m > 62) throw std::domain_error("adder destination width must be in [1, 62]");
  if (w > m) throw std::domain_error("adder source wider than destination");
  if (constant >> m) throw std::domain_error("adder constant does not fit the destination");
  if (src.first + w > total || dst.first + m > total) {
    throw std::domain_error("adder register outside the layout");
  }
  if (m - 1 > layout.work().width) {
    throw std::domain_error("adder needs " + std::to_string(m - 1) +
                            " workspace qubits, layout has " +
                            std::to_string(layout.work().width));
  }
  const auto s = qubits_of(src, w);
  const auto d = qubits_of(dst, m);
  const auto carries = qubits_of(layout.work(), m - 1);
  check_disjoint(s, d, "source/destination");
  check_disjoint(s, carries, "source/workspace");
  check_disjoint(d, carries, "destination/workspace");

  Circuit c(total);
  const uint64_t low_mask = w == 0 ? 0 : (w >= 64 ? ~uint64_t{0} : (uint64_t{1} << w) - 1);
  const uint64_t k_low = constant & low_mask;
  bool carry_in = false;
  if (k_low == 1) {
    carry_in = true;
  } else if (k_low != 0) {
    // Constant bits under the source register get their own pass.
    std::vector<Literal> lits(m);
    for (unsigned k = 0; k < m; ++k) lits[k] = Literal::constant((k_low >> k) & 1u);
    ripple_add(c, lits, d, false, carries);
  }
  std::vector<Literal> lits(m);
  for (unsigned k = 0; k < m; ++k) {
    lits[k] = k < w ? Literal::of(s[k]) : Literal::constant((constant >> k) & 1u);
  }
  ripple_add(c, lits, d, carry_in, carries);
  return c;
}

Circuit build_subtractor(RegisterSpan src, RegisterSpan dst, uint64_t constant,
                         const RegisterLayout& layout) {
  return build_adder(src, dst, constant, layout).reversed();
}

namespace {

void check_layout(const PhaseSpaceConfig& cfg, const RegisterLayout& layout) {
  if (!(layout.config() == cfg)) throw std::domain_error("register layout does not match config");
}

// x <- x + (low n_q bits of y) mod N.
void append_x_update(Circuit& c, const PhaseSpaceConfig& cfg, const RegisterLayout& layout) {
  const unsigned n = cfg.n_q();
  std::vector<Literal> lits(n);
  for (unsigned k = 0; k < n; ++k) lits[k] = Literal::of(layout.y().qubit(k));
  ripple_add(c, lits, qubits_of(layout.x(), n), false, qubits_of(layout.work(), n - 1));
}

}  // namespace

Circuit build_map_circuit(const PhaseSpaceConfig& cfg, const RegisterLayout& layout) {
  check_layout(cfg, layout);
  const unsigned n = cfg.n_q();
  const unsigned np = cfg.n_q_prime();
  Circuit c(layout.total_qubits());
  // i - N/2 is i with its top bit flipped, read as an n-bit two's-complement
  // number; sign-extending it to n' bits gives i + LN - N/2 (mod LN).
  const unsigned top = layout.x().qubit(n - 1);
  c.append(Gate::make_not(top));
  std::vector<Literal> lits(np);
  for (unsigned k = 0; k < np; ++k) lits[k] = Literal::of(k < n ? layout.x().qubit(k) : top);
  ripple_add(c, lits, qubits_of(layout.y(), np), false, qubits_of(layout.work(), np - 1));
  c.append(Gate::make_not(top));
  append_x_update(c, cfg, layout);
  return c;
}

Circuit build_inversion_circuit(const PhaseSpaceConfig& cfg, const RegisterLayout& layout) {
  check_layout(cfg, layout);
  const unsigned np = cfg.n_q_prime();
  Circuit c(layout.total_qubits());
  for (unsigned k = 0; k < np; ++k) c.append(Gate::make_not(layout.y().qubit(k)));
  std::vector<Literal> zeros(np, Literal::constant(false));
  ripple_add(c, zeros, qubits_of(layout.y(), np), true, qubits_of(layout.work(), np - 1));
  append_x_update(c, cfg, layout);
  return c;
}

int64_t reference_gate_count(CircuitKind kind, unsigned n_q, unsigned n_q_prime) noexcept {
  const auto n = static_cast<int64_t>(n_q);
  const auto np = static_cast<int64_t>(n_q_prime);
  return kind == CircuitKind::Map ? 10 * n + 6 * np - 17 : 8 * n + 4 * np - 13;
}

namespace {

struct CountVector {
  int64_t nots, cnots, toffolis, touched;
};

CountVector counts_at(CircuitKind kind, unsigned n, unsigned np) {
  const PhaseSpaceConfig cfg(n, np);
  const RegisterLayout layout(cfg);
  const Circuit c = kind == CircuitKind::Map ? build_map_circuit(cfg, layout)
                                             : build_inversion_circuit(cfg, layout);
  return {static_cast<int64_t>(c.counts().nots), static_cast<int64_t>(c.counts().cnots),
          static_cast<int64_t>(c.counts().toffolis),
          static_cast<int64_t>(c.touched_qubit_total())};
}

bool second_difference_zero(const CountVector& a, const CountVector& b, const CountVector& c,
                            const CountVector& d) {
  // a - b - c + d == 0 componentwise
  return a.nots - b.nots - c.nots + d.nots == 0 && a.cnots - b.cnots - c.cnots + d.cnots == 0 &&
         a.toffolis - b.toffolis - c.toffolis + d.toffolis == 0 &&
         a.touched - b.touched - c.touched + d.touched == 0;
}

}  // namespace

GateCountReport gate_count_report(const Circuit& circuit, const PhaseSpaceConfig& cfg,
                                  CircuitKind kind) {
  GateCountReport r;
  r.kind = kind;
  r.n_q = cfg.n_q();
  r.n_q_prime = cfg.n_q_prime();
  r.counts = circuit.counts();
  r.touched = circuit.touched_qubit_total();
  r.reference = reference_gate_count(kind, r.n_q, r.n_q_prime);
  r.ratio = r.reference > 0 ? static_cast<double>(r.counts.total()) / r.reference : 0.0;

  const unsigned n = r.n_q;
  const unsigned np = r.n_q_prime;
  const auto f00 = counts_at(kind, n, np);
  const auto f01 = counts_at(kind, n, np + 1);
  const auto f02 = counts_at(kind, n, np + 2);
  const auto f11 = counts_at(kind, n + 1, np + 1);
  const auto f12 = counts_at(kind, n + 1, np + 2);
  const auto f22 = counts_at(kind, n + 2, np + 2);
  // Second differences along n', along the diagonal, and mixed.
  r.affine = second_difference_zero(f02, f01, f01, f00) &&
             second_difference_zero(f22, f11, f11, f00) &&
             second_difference_zero(f12, f11, f02, f01);
  return r;
}

ResourceEstimate resource_estimate(double n_particles, uint64_t L) {
  if (!(n_particles >= 1.0) || !std::isfinite(n_particles)) {
    throw std::domain_error("resource_estimate: particle count must be a finite number >= 1");
  }
  if (L < 2 || !std::has_single_bit(L)) {
    throw std::domain_error("resource_estimate: L must be a power of two >= 2");
  }
  unsigned n_q = 2;
  while (std::ldexp(1.0, 2 * static_cast<int>(n_q)) < n_particles) ++n_q;
  const unsigned n_q_prime = n_q + static_cast<unsigned>(std::countr_zero(L));
  return {n_q, n_q_prime, n_q + 2 * n_q_prime - 1};
}

std::vector<IterationRecord> run_iterations(QuantumState& state, const RunOptions& options) {
  const RegisterLayout& layout = state.layout();
  const PhaseSpaceConfig& cfg = layout.config();
  if (options.invert_at && *options.invert_at > options.steps) {
    throw std::domain_error("invert_at is beyond the last step");
  }
  if (options.reference && !(options.reference->config() == cfg)) {
    throw std::domain_error("reference wavefunction does not match the state");
  }
  const Circuit map = build_map_circuit(cfg, layout);
  const Circuit inversion = build_inversion_circuit(cfg, layout);

  std::vector<IterationRecord> records;
  records.reserve(options.steps + 1);
  auto record = [&](uint64_t t) {
    const auto w = marginal_y(state);
    IterationRecord rec;
    rec.t = t;
    for (uint64_t j = 0; j < w.size(); ++j) {
      const double y = cfg.y_of(j);
      rec.mean_y += w[j] * y;
      rec.mean_y2 += w[j] * y * y;
    }
    if (options.reference) rec.fidelity = fidelity(state, *options.reference);
    records.push_back(rec);
    if (options.observer) options.observer(t, state);
  };
  auto invert = [&] {
    apply_circuit(state, inversion, options.noise);
    if (options.reference) options.reference->invert_velocity();
  };

  if (options.invert_at == 0u) invert();
  record(0);
  for (uint64_t t = 1; t <= options.steps; ++t) {
    apply_circuit(state, map, options.noise);
    if (options.reference) options.reference->forward();
    if (options.invert_at == t) invert();
    record(t);
  }
  return records;
}

}  // namespace catrev
