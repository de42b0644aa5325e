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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "circuits.hpp"
#include "image_io.hpp"
#include "parallel.hpp"
#include "qsv.hpp"

namespace catrev {
namespace {

using cd = std::complex<double>;

QuantumState random_state(const RegisterLayout& layout, uint32_t seed) {
  QuantumState s(layout);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double norm = 0.0;
  for (auto& a : s.amplitudes()) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto& a : s.amplitudes()) a /= std::sqrt(norm);
  return s;
}

// exp(-i theta n.sigma / 2) applied to one qubit, written out from the Pauli
// matrices without reusing the kernel code.
void reference_rotation(QuantumState& s, unsigned q, Axis n, double theta) {
  const cd c = std::cos(theta / 2);
  const cd is = cd(0, 1) * std::sin(theta / 2);
  const cd u00 = c - is * n.z;
  const cd u01 = -is * cd(n.x, -n.y);
  const cd u10 = -is * cd(n.x, n.y);
  const cd u11 = c + is * n.z;
  const uint64_t bit = uint64_t{1} << q;
  for (uint64_t k = 0; k < s.amplitudes().size(); ++k) {
    if (k & bit) continue;
    const cd a = s[k];
    const cd b = s[k | bit];
    s[k] = u00 * a + u01 * b;
    s[k | bit] = u10 * a + u11 * b;
  }
}

const PhaseSpaceConfig kSmall(2, 3);  // 7 qubits

TEST(Layout, Geometry) {
  const RegisterLayout l(PhaseSpaceConfig(5, 8));
  EXPECT_EQ(l.total_qubits(), 20u);
  EXPECT_EQ(l.x(), (RegisterSpan{0, 5}));
  EXPECT_EQ(l.y(), (RegisterSpan{5, 8}));
  EXPECT_EQ(l.work(), (RegisterSpan{13, 7}));
  EXPECT_EQ(l.basis_index(3, 2, 1), 3u + 32u * 2u + 32u * 256u);
  EXPECT_EQ(RegisterLayout(PhaseSpaceConfig(7, 10)).total_qubits(), 26u);
}

TEST(Prepare, Examples) {
  const RegisterLayout l(kSmall);
  const QuantumState one = prepare_uniform_superposition(l, std::vector<LatticePoint>{{0, 0}});
  EXPECT_EQ(one[0], cd(1.0));
  const QuantumState two = prepare_uniform_superposition(l, std::vector<LatticePoint>{{0, 0}, {3, 5}});
  EXPECT_NEAR(two[0].real(), 0.7071067811865476, 1e-15);
  EXPECT_NEAR(two[l.basis_index(3, 5)].real(), 0.7071067811865476, 1e-15);
  EXPECT_THROW(prepare_uniform_superposition(l, std::vector<LatticePoint>{}), std::domain_error);
  EXPECT_THROW(prepare_uniform_superposition(l, std::vector<LatticePoint>{{1, 1}, {1, 1}}), std::domain_error);
  EXPECT_THROW(prepare_uniform_superposition(l, std::vector<LatticePoint>{{4, 0}}), std::domain_error);
}

TEST(Prepare, DemonImageAmplitudes) {
  const PhaseSpaceConfig cfg(7, 8);
  const auto pts = image_to_points(generate_demon_image(128), cfg);
  const QuantumState s = prepare_uniform_superposition(RegisterLayout(cfg), pts);
  const double a = 1.0 / std::sqrt(static_cast<double>(pts.size()));
  for (const auto& p : pts) ASSERT_EQ(s[flat_index(p, cfg)], cd(a));
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
}

TEST(Gates, BasisExamples) {
  const RegisterLayout l(kSmall);
  QuantumState s(l);
  apply_gate(s, Gate::make_not(0));
  EXPECT_EQ(s[1], cd(1.0));
  QuantumState t(l);
  t[0] = 0;
  t[1] = 1;
  apply_gate(t, Gate::make_cnot(0, 1));
  EXPECT_EQ(t[3], cd(1.0));
  apply_gate(t, Gate::make_toffoli(0, 1, 6));
  EXPECT_EQ(t[3 + 64], cd(1.0));
}

TEST(Gates, ExhaustiveClassicalSemantics) {
  const RegisterLayout l(kSmall);
  const unsigned n = l.total_qubits();
  for (unsigned a = 0; a < n; ++a) {
    for (unsigned b = 0; b < n; ++b) {
      for (unsigned c = 0; c < n; ++c) {
        if (a == b || b == c || a == c) continue;
        const Gate g = Gate::make_toffoli(a, b, c);
        for (uint64_t x = 0; x < l.dimension(); x += 37) {
          QuantumState s(l);
          s[0] = 0;
          s[x] = 1;
          apply_gate(s, g);
          const uint64_t want = ((x >> a) & (x >> b) & 1) ? x ^ (uint64_t{1} << c) : x;
          ASSERT_EQ(s[want], cd(1.0));
        }
      }
      if (a == b) continue;
      QuantumState s(l);
      s[0] = 0;
      s[5] = 1;
      apply_gate(s, Gate::make_cnot(a, b));
      ASSERT_EQ(s[((5 >> a) & 1) ? 5 ^ (uint64_t{1} << b) : 5], cd(1.0));
    }
  }
}

TEST(Gates, Validation) {
  const RegisterLayout l(kSmall);
  QuantumState s(l);
  EXPECT_THROW(apply_gate(s, Gate::make_not(7)), std::domain_error);
  EXPECT_THROW(apply_gate(s, Gate::make_cnot(2, 2)), std::domain_error);
  EXPECT_THROW(apply_gate(s, Gate::make_toffoli(0, 1, 1)), std::domain_error);
  NoiseModel noise(0.1, 1);
  EXPECT_THROW(apply_gate_noisy(s, Gate::make_rot(0, {}, 0.1), noise), std::domain_error);
  EXPECT_THROW(NoiseModel(-0.1, 1), std::domain_error);
}

TEST(Gates, RotationMatchesPauliFormula) {
  const RegisterLayout l(kSmall);
  for (unsigned q : {0u, 3u, 6u}) {
    const Axis n{0.48, -0.6, 0.64};
    QuantumState a = random_state(l, q + 1);
    QuantumState b = a;
    apply_gate(a, Gate::make_rot(q, n, 0.37));
    reference_rotation(b, q, n, 0.37);
    for (uint64_t k = 0; k < l.dimension(); ++k) ASSERT_LT(std::abs(a[k] - b[k]), 1e-14);
  }
}

TEST(Gates, RotationComposes) {
  const RegisterLayout l(kSmall);
  QuantumState a = random_state(l, 3);
  QuantumState b = a;
  apply_gate(a, Gate::make_rot(2, {0, 0, 1}, 0.3));
  apply_gate(a, Gate::make_rot(2, {0, 0, 1}, 0.3));
  apply_gate(b, Gate::make_rot(2, {0, 0, 1}, 0.6));
  EXPECT_NEAR(fidelity(a, b), 1.0, 1e-12);
}

TEST(Noise, ZeroEpsilonIsExact) {
  const RegisterLayout l(kSmall);
  QuantumState a = random_state(l, 4);
  QuantumState b = a;
  NoiseModel noise(0.0, 9);
  apply_gate_noisy(a, Gate::make_toffoli(1, 4, 2), noise);
  apply_gate(b, Gate::make_toffoli(1, 4, 2));
  EXPECT_NEAR(fidelity(a, b), 1.0, 1e-15);
  EXPECT_EQ(noise.draw_counter(), 3u);
}

TEST(Noise, SingleNotWorstCase) {
  const RegisterLayout l(kSmall);
  for (uint64_t seed = 0; seed < 200; ++seed) {
    QuantumState a(l);
    QuantumState b(l);
    NoiseModel noise(0.1, seed);
    apply_gate_noisy(a, Gate::make_not(3), noise);
    apply_gate(b, Gate::make_not(3));
    ASSERT_GE(fidelity(a, b), std::pow(std::cos(0.05), 2) - 1e-15);
  }
}

TEST(Noise, FusedKernelEqualsSequentialRotations) {
  const RegisterLayout l(PhaseSpaceConfig(3, 6));  // 14 qubits, several kernel chunks
  const std::vector<Gate> gates{Gate::make_not(5), Gate::make_cnot(9, 2), Gate::make_cnot(1, 12),
                                Gate::make_toffoli(13, 0, 7), Gate::make_toffoli(4, 11, 6),
                                Gate::make_toffoli(3, 2, 1)};
  QuantumState a = random_state(l, 5);
  QuantumState b = a;
  NoiseModel fused(0.2, 17);
  NoiseModel draws(0.2, 17);
  for (const Gate& g : gates) {
    apply_gate_noisy(a, g, fused);
    apply_gate(b, g);
    std::vector<unsigned> q(g.touched().begin(), g.touched().end());
    std::sort(q.begin(), q.end());
    for (unsigned t : q) {
      const auto r = draws.draw();
      reference_rotation(b, t, r.axis, r.angle);
    }
  }
  for (uint64_t k = 0; k < l.dimension(); ++k) ASSERT_LT(std::abs(a[k] - b[k]), 1e-13);
}

TEST(Noise, DrawsAreUniform) {
  NoiseModel noise(0.5, 3);
  double sum_angle2 = 0, sum_z = 0, sum_x2 = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const auto r = noise.draw();
    ASSERT_LE(std::abs(r.angle), 0.5);
    ASSERT_NEAR(r.axis.x * r.axis.x + r.axis.y * r.axis.y + r.axis.z * r.axis.z, 1.0, 1e-12);
    sum_angle2 += r.angle * r.angle;
    sum_z += r.axis.z;
    sum_x2 += r.axis.x * r.axis.x;
  }
  EXPECT_NEAR(sum_angle2 / n, 0.25 / 3, 0.003);
  EXPECT_NEAR(sum_z / n, 0.0, 0.02);
  EXPECT_NEAR(sum_x2 / n, 1.0 / 3, 0.01);
}

// Monte-Carlo oracle for the per-draw fidelity loss. For a rotation by theta
// about a uniform axis: a computational-basis qubit keeps
// cos^2(theta/2) + sin^2(theta/2)/3, a maximally mixed qubit keeps
// cos^2(theta/2). Averaging theta over [-eps, eps]:
//   basis: 1 - (1 - sin(eps)/eps)/3  ~ 1 - eps^2/18
//   mixed: (1 + sin(eps)/eps)/2      ~ 1 - eps^2/12
TEST(Noise, SingleDrawFidelityOracle) {
  const double eps = 0.5;
  const double sinc = std::sin(eps) / eps;
  const RegisterLayout l(kSmall);
  const int runs = 4000;
  double basis = 0, mixed = 0, basis2 = 0, mixed2 = 0;
  QuantumState bell(l);
  bell[0] = std::sqrt(0.5);
  bell[3] = std::sqrt(0.5);
  QuantumState bell_ideal = bell;
  apply_gate(bell_ideal, Gate::make_not(0));
  QuantumState zero_ideal(l);
  apply_gate(zero_ideal, Gate::make_not(0));
  for (int k = 0; k < runs; ++k) {
    NoiseModel n1(eps, 1000 + k);
    QuantumState z(l);
    apply_gate_noisy(z, Gate::make_not(0), n1);
    const double fb = fidelity(z, zero_ideal);
    NoiseModel n2(eps, 1000 + k);
    QuantumState b = bell;
    apply_gate_noisy(b, Gate::make_not(0), n2);
    const double fm = fidelity(b, bell_ideal);
    basis += fb, basis2 += fb * fb, mixed += fm, mixed2 += fm * fm;
  }
  basis /= runs, mixed /= runs;
  const double se_b = std::sqrt((basis2 / runs - basis * basis) / runs);
  const double se_m = std::sqrt((mixed2 / runs - mixed * mixed) / runs);
  EXPECT_NEAR(basis, 1.0 - (1.0 - sinc) / 3.0, 4 * se_b + 1e-12);
  EXPECT_NEAR(mixed, (1.0 + sinc) / 2.0, 4 * se_m + 1e-12);
  EXPECT_NEAR(1.0 - (1.0 - std::sin(0.01) / 0.01) / 3.0, 1.0 - 1e-4 / 18, 1e-10);
  EXPECT_NEAR((1.0 + std::sin(0.01) / 0.01) / 2.0, 1.0 - 1e-4 / 12, 1e-10);
}

TEST(Noise, BasisStateGateSequenceDeficit) {
  // k noisy gates on a basis input: losses add, eps^2/18 per touched qubit.
  const RegisterLayout l(kSmall);
  const std::vector<Gate> seq{Gate::make_not(0), Gate::make_cnot(0, 1), Gate::make_toffoli(0, 1, 2)};
  const int repeats = 5;
  const double eps = 0.1;
  QuantumState ideal(l);
  for (int r = 0; r < repeats; ++r) {
    for (const Gate& g : seq) apply_gate(ideal, g);
  }
  const int runs = 2000;
  double sum = 0, sum2 = 0;
  for (int k = 0; k < runs; ++k) {
    QuantumState s(l);
    NoiseModel noise(eps, 77 + k);
    for (int r = 0; r < repeats; ++r) {
      for (const Gate& g : seq) apply_gate_noisy(s, g, noise);
    }
    const double f = fidelity(s, ideal);
    sum += f, sum2 += f * f;
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sum2 / runs - mean * mean) / runs);
  const double touched = repeats * 6.0;
  const double per_draw = (1.0 - std::sin(eps) / eps) / 3.0;
  EXPECT_NEAR(mean, 1.0 - touched * per_draw, 4 * se + 2e-5);
  EXPECT_NEAR(1.0 - mean, touched * eps * eps / 18, 0.1 * touched * eps * eps / 18);
}

TEST(Noise, FidelityDecreasesWithEpsilon) {
  const PhaseSpaceConfig cfg(2, 3);
  const RegisterLayout l(cfg);
  const Circuit map = build_map_circuit(cfg, l);
  const std::vector<LatticePoint> pts{{0, 3}, {1, 4}, {3, 4}};
  double previous = 1.0 + 1e-12;
  for (double eps : {0.0, 0.01, 0.05, 0.1, 0.2}) {
    double mean = 0;
    for (int k = 0; k < 100; ++k) {
      QuantumState s = prepare_uniform_superposition(l, pts);
      QuantumState ideal = s;
      NoiseModel noise(eps, 500 + k);
      for (int t = 0; t < 3; ++t) {
        apply_circuit(s, map, eps > 0 ? &noise : nullptr);
        apply_circuit(ideal, map);
      }
      mean += fidelity(s, ideal) / 100;
    }
    if (eps == 0.0) EXPECT_NEAR(mean, 1.0, 1e-12);
    EXPECT_LT(mean, previous);
    previous = mean;
  }
}

TEST(Noise, DeterministicAcrossThreadCounts) {
  const RegisterLayout l(PhaseSpaceConfig(3, 6));
  auto run = [&](int threads) {
    set_thread_count(threads);
    QuantumState s = random_state(l, 8);
    NoiseModel noise(0.05, 21);
    for (unsigned k = 0; k < 40; ++k) {
      apply_gate_noisy(s, Gate::make_toffoli(k % 14, (k + 5) % 14, (k + 9) % 14), noise);
      apply_gate_noisy(s, Gate::make_cnot((k + 1) % 14, (k + 3) % 14), noise);
    }
    return std::pair{std::vector<cd>(s.amplitudes().begin(), s.amplitudes().end()), s.norm_squared()};
  };
  const auto a = run(1);
  const auto b = run(8);
  set_thread_count(1);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Unitarity, TenThousandRandomGates) {
  const RegisterLayout l(kSmall);
  QuantumState s = random_state(l, 12);
  std::mt19937_64 rng(3);
  NoiseModel noise(0.3, 4);
  for (int k = 0; k < 10000; ++k) {
    const unsigned a = rng() % 7, b = (a + 1 + rng() % 6) % 7;
    unsigned c = (b + 1 + rng() % 6) % 7;
    if (c == a) c = (c + 1) % 7 == b ? (c + 2) % 7 : (c + 1) % 7;
    switch (rng() % 4) {
      case 0: apply_gate_noisy(s, Gate::make_not(a), noise); break;
      case 1: apply_gate_noisy(s, Gate::make_cnot(a, b), noise); break;
      case 2: apply_gate_noisy(s, Gate::make_toffoli(a, b, c), noise); break;
      default: apply_gate(s, Gate::make_rot(a, {0.6, 0.0, 0.8}, 1.1)); break;
    }
  }
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-9);
}

TEST(Fidelity, Examples) {
  const RegisterLayout l(kSmall);
  const QuantumState a = random_state(l, 2);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-12);
  QuantumState z(l);
  QuantumState one(l);
  apply_gate(one, Gate::make_not(0));
  EXPECT_EQ(fidelity(z, one), 0.0);
  QuantumState plus(l);
  plus[0] = plus[1] = std::sqrt(0.5);
  EXPECT_NEAR(fidelity(z, plus), 0.5, 1e-15);
  EXPECT_THROW(fidelity(z, QuantumState(RegisterLayout(PhaseSpaceConfig(2, 4)))), std::domain_error);
}

TEST(Marginals, Examples) {
  const PhaseSpaceConfig cfg(2, 3);
  const RegisterLayout l(cfg);
  const QuantumState s = prepare_uniform_superposition(l, std::vector<LatticePoint>{{1, 2}});
  auto pxy = marginal_xy(s);
  EXPECT_EQ(pxy[flat_index({1, 2}, cfg)], 1.0);
  EXPECT_EQ(marginal_y(s)[2], 1.0);

  const std::vector<LatticePoint> three{{0, 0}, {1, 5}, {3, 7}};
  const auto u = marginal_xy(prepare_uniform_superposition(l, three));
  for (const auto& p : three) EXPECT_NEAR(u[flat_index(p, cfg)], 1.0 / 3, 1e-15);

  QuantumState m = s;
  apply_circuit(m, build_map_circuit(cfg, l));
  const LatticePoint f = map_forward_lattice({1, 2}, cfg);
  EXPECT_NEAR(marginal_xy(m)[flat_index(f, cfg)], 1.0, 1e-15);
  EXPECT_NEAR(marginal_y(m)[f.j], 1.0, 1e-15);

  const QuantumState r = random_state(l, 6);
  double sum_xy = 0, sum_y = 0;
  for (double v : marginal_xy(r)) sum_xy += v;
  for (double v : marginal_y(r)) sum_y += v;
  EXPECT_NEAR(sum_xy, 1.0, 1e-9);
  EXPECT_NEAR(sum_y, 1.0, 1e-9);
}

TEST(Sampling, Examples) {
  const PhaseSpaceConfig cfg(3, 5);
  const RegisterLayout l(cfg);
  const auto basis = sample_measurements(prepare_uniform_superposition(l, std::vector<LatticePoint>{{5, 9}}), 100, 1);
  for (const auto& p : basis) ASSERT_EQ(p, (LatticePoint{5, 9}));

  const auto two = sample_measurements(
      prepare_uniform_superposition(l, std::vector<LatticePoint>{{1, 1}, {2, 2}}), 10000, 2);
  double hits = 0;
  for (const auto& p : two) hits += p == LatticePoint{1, 1};
  EXPECT_NEAR(hits / 10000, 0.5, 5 * 0.005);
  EXPECT_EQ(two, sample_measurements(prepare_uniform_superposition(l, std::vector<LatticePoint>{{1, 1}, {2, 2}}), 10000, 2));
}

TEST(Sampling, SecondMomentWithinStandardError) {
  const PhaseSpaceConfig cfg(3, 6);
  const RegisterLayout l(cfg);
  QuantumState s = prepare_uniform_superposition(l, std::vector<LatticePoint>{{2, 30}, {5, 33}, {7, 31}});
  const Circuit map = build_map_circuit(cfg, l);
  NoiseModel noise(0.2, 3);
  for (int t = 0; t < 12; ++t) apply_circuit(s, map, &noise);
  const auto w = marginal_y(s);
  double exact = 0, exact4 = 0;
  for (uint64_t j = 0; j < w.size(); ++j) {
    const double y = cfg.y_of(j);
    exact += w[j] * y * y;
    exact4 += w[j] * y * y * y * y;
  }
  const auto samples = sample_measurements(s, 10000, 9);
  double est = 0;
  for (const auto& p : samples) est += cfg.y_of(p.j) * cfg.y_of(p.j);
  est /= samples.size();
  const double se = std::sqrt((exact4 - exact * exact) / samples.size());
  EXPECT_NEAR(est, exact, 3 * se);
}

TEST(LatticeWavefunction, MatchesCircuitEvolution) {
  const PhaseSpaceConfig cfg(3, 5);
  const RegisterLayout l(cfg);
  const std::vector<LatticePoint> pts{{0, 12}, {3, 15}, {7, 17}, {4, 16}};
  QuantumState s = prepare_uniform_superposition(l, pts);
  LatticeWavefunction psi(cfg, pts);
  const Circuit map = build_map_circuit(cfg, l);
  const Circuit inv = build_inversion_circuit(cfg, l);
  for (int t = 0; t < 6; ++t) {
    apply_circuit(s, map);
    psi.forward();
  }
  apply_circuit(s, inv);
  psi.invert_velocity();
  apply_circuit(s, map);
  psi.forward();
  EXPECT_NEAR(fidelity(s, psi), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(s, psi.to_state()), 1.0, 1e-12);
  const auto p = psi.probabilities();
  const auto q = marginal_xy(s);
  for (size_t k = 0; k < p.size(); ++k) ASSERT_NEAR(p[k], q[k], 1e-15);
}

}  // namespace
}  // namespace catrev
