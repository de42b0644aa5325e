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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "catreverse/catreverse.h"

namespace {

namespace fs = std::filesystem;

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(catrev_version(), "0.1.0");
  EXPECT_STRNE(catrev_status_string(CATREV_ERR_DOMAIN), catrev_status_string(CATREV_OK));
  int threads = 0;
  EXPECT_EQ(catrev_set_threads(1, &threads), CATREV_OK);
  EXPECT_EQ(threads, 1);
}

TEST(CApi, LatticeMaps) {
  uint64_t i = 0, j = 0;
  ASSERT_EQ(catrev_map_forward(3, 4, 5, 3, &i, &j), CATREV_OK);
  EXPECT_EQ(i, 1u);
  EXPECT_EQ(j, 4u);
  uint64_t bi = 0, bj = 0;
  ASSERT_EQ(catrev_map_inverse(3, 4, i, j, &bi, &bj), CATREV_OK);
  EXPECT_EQ(bi, 5u);
  EXPECT_EQ(bj, 3u);
  ASSERT_EQ(catrev_invert_velocity(3, 4, 5, 3, &i, &j), CATREV_OK);
  EXPECT_EQ(i, 2u);
  EXPECT_EQ(j, 13u);
  EXPECT_EQ(catrev_map_forward(3, 4, 8, 0, &i, &j), CATREV_ERR_DOMAIN);
  EXPECT_STRNE(catrev_last_error(), "");
  EXPECT_EQ(catrev_map_forward(3, 3, 0, 0, &i, &j), CATREV_ERR_DOMAIN);
  EXPECT_EQ(catrev_map_forward(3, 4, 0, 0, nullptr, &j), CATREV_ERR_NULL_ARGUMENT);
  double h = 0;
  ASSERT_EQ(catrev_lyapunov_exponent(2000, &h), CATREV_OK);
  EXPECT_NEAR(h, 0.9624, 0.01);
}

TEST(CApi, Estimates) {
  unsigned n = 0, np = 0, total = 0;
  ASSERT_EQ(catrev_resource_estimate(6.022e23, 8, &n, &np, &total), CATREV_OK);
  EXPECT_EQ(total, 125u);
  EXPECT_EQ(catrev_resource_estimate(100, 3, &n, &np, &total), CATREV_ERR_DOMAIN);
  double t = 0;
  ASSERT_EQ(catrev_fidelity_timescale(40, 0.01, 0.5, &t), CATREV_OK);
  EXPECT_NEAR(t, 125.0, 1e-9);
  ASSERT_EQ(catrev_escape_time(1e-8, &t), CATREV_OK);
  EXPECT_NEAR(t, 19.14, 0.01);
  EXPECT_EQ(catrev_escape_time(2.0, &t), CATREV_ERR_DOMAIN);
}

TEST(CApi, Circuits) {
  catrev_circuit* map = nullptr;
  ASSERT_EQ(catrev_circuit_create(3, 4, CATREV_CIRCUIT_MAP, &map), CATREV_OK);
  unsigned qubits = 0;
  catrev_circuit_qubits(map, &qubits);
  EXPECT_EQ(qubits, 10u);
  uint64_t nots = 0, cnots = 0, toffolis = 0;
  ASSERT_EQ(catrev_circuit_counts(map, &nots, &cnots, &toffolis), CATREV_OK);
  EXPECT_GT(nots + cnots + toffolis, 0u);
  uint64_t out = 0;
  ASSERT_EQ(catrev_circuit_apply_classical(map, 5 + 8 * 3, &out), CATREV_OK);
  EXPECT_EQ(out, 1u + 8u * 4u);

  size_t needed = 0;
  ASSERT_EQ(catrev_circuit_dump(map, nullptr, 0, &needed), CATREV_OK);
  std::string text(needed, '\0');
  ASSERT_EQ(catrev_circuit_dump(map, text.data(), text.size(), &needed), CATREV_OK);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(nots + cnots + toffolis));
  char tiny[4];
  EXPECT_EQ(catrev_circuit_dump(map, tiny, sizeof tiny, &needed), CATREV_ERR_BUFFER_TOO_SMALL);
  EXPECT_EQ(tiny[3], '\0');
  catrev_circuit_free(map);
  catrev_circuit_free(nullptr);

  catrev_circuit* bad = nullptr;
  EXPECT_EQ(catrev_circuit_create(3, 2, CATREV_CIRCUIT_INVERSION, &bad), CATREV_ERR_DOMAIN);
  EXPECT_EQ(bad, nullptr);
}

TEST(CApi, StatesTimeReversal) {
  const uint64_t ij[] = {1, 14, 2, 15, 6, 17};
  catrev_state* a = nullptr;
  catrev_state* b = nullptr;
  ASSERT_EQ(catrev_state_create(3, 5, ij, 3, &a), CATREV_OK);
  ASSERT_EQ(catrev_state_create(3, 5, ij, 3, &b), CATREV_OK);
  catrev_circuit* map = nullptr;
  catrev_circuit* inv = nullptr;
  catrev_circuit_create(3, 5, CATREV_CIRCUIT_MAP, &map);
  catrev_circuit_create(3, 5, CATREV_CIRCUIT_INVERSION, &inv);
  for (int pass = 0; pass < 2; ++pass) {
    for (int t = 0; t < 4; ++t) ASSERT_EQ(catrev_state_apply(a, map), CATREV_OK);
    ASSERT_EQ(catrev_state_apply(a, inv), CATREV_OK);
  }
  double f = 0;
  ASSERT_EQ(catrev_state_fidelity(a, b, &f), CATREV_OK);
  EXPECT_NEAR(f, 1.0, 1e-12);

  ASSERT_EQ(catrev_state_set_noise(a, 0.1, 3), CATREV_OK);
  for (int t = 0; t < 4; ++t) catrev_state_apply(a, map);
  for (int t = 0; t < 4; ++t) catrev_state_apply(b, map);
  catrev_state_fidelity(a, b, &f);
  EXPECT_LT(f, 1.0);
  double norm = 0;
  catrev_state_norm(a, &norm);
  EXPECT_NEAR(norm, 1.0, 1e-12);
  std::vector<double> w(32);
  ASSERT_EQ(catrev_state_marginal_y(a, w.data(), w.size()), CATREV_OK);
  double sum = 0;
  for (double v : w) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(catrev_state_marginal_y(a, w.data(), 31), CATREV_ERR_DOMAIN);
  EXPECT_EQ(catrev_state_set_noise(a, -1.0, 3), CATREV_ERR_DOMAIN);

  catrev_state* c = nullptr;
  const uint64_t dup[] = {1, 1, 1, 1};
  EXPECT_EQ(catrev_state_create(3, 5, dup, 2, &c), CATREV_ERR_DOMAIN);
  catrev_state* other = nullptr;
  ASSERT_EQ(catrev_state_create(3, 4, ij, 1, &other), CATREV_OK);
  EXPECT_EQ(catrev_state_fidelity(a, other, &f), CATREV_ERR_DOMAIN);
  EXPECT_EQ(catrev_state_apply(other, map), CATREV_ERR_DOMAIN);
  catrev_state_free(other);
  catrev_state_free(a);
  catrev_state_free(b);
  catrev_circuit_free(map);
  catrev_circuit_free(inv);
}

TEST(CApi, RunsAndReports) {
  catrev_run* run = nullptr;
  EXPECT_EQ(catrev_run_create("dance", &run), CATREV_ERR_PARSE);
  ASSERT_EQ(catrev_run_create("resources", &run), CATREV_OK);
  const fs::path out = fs::temp_directory_path() / "catreverse_capi_resources";
  fs::remove_all(out);
  ASSERT_EQ(catrev_run_set(run, ("out=" + out.string()).c_str()), CATREV_OK);
  EXPECT_EQ(catrev_run_set(run, "nonsense=1"), CATREV_ERR_PARSE);
  double v = 0;
  EXPECT_EQ(catrev_run_metric(run, "resources.0.total_qubits", &v), CATREV_ERR_NOT_FOUND);
  ASSERT_EQ(catrev_run_execute(run), CATREV_OK);
  ASSERT_EQ(catrev_run_metric(run, "resources.0.total_qubits", &v), CATREV_OK);
  EXPECT_EQ(v, 125.0);
  EXPECT_EQ(catrev_run_metric(run, "no.such.metric", &v), CATREV_ERR_NOT_FOUND);
  size_t needed = 0;
  ASSERT_EQ(catrev_run_report(run, nullptr, 0, &needed), CATREV_OK);
  EXPECT_GT(needed, 1u);
  EXPECT_TRUE(fs::exists(out / "resources.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.txt"));

  const fs::path cfg = fs::temp_directory_path() / "catreverse_capi.cfg";
  std::ofstream(cfg) << "scenario=verify\n";
  EXPECT_EQ(catrev_run_load(run, cfg.string().c_str()), CATREV_ERR_PARSE);
  EXPECT_EQ(catrev_run_load(run, "/nonexistent.cfg"), CATREV_ERR_IO);
  catrev_run_free(run);
}

TEST(CApi, FailedChecksAreReported) {
  catrev_run* run = nullptr;
  ASSERT_EQ(catrev_run_create("verify", &run), CATREV_OK);
  const fs::path out = fs::temp_directory_path() / "catreverse_capi_verify";
  catrev_run_set(run, ("out=" + out.string()).c_str());
  catrev_run_set(run, "corrupt_adder=true");
  EXPECT_EQ(catrev_run_execute(run), CATREV_ERR_CHECK_FAILED);
  EXPECT_NE(std::string(catrev_last_error()).find("map_circuit_matches_oracle"), std::string::npos);
  catrev_run_free(run);
  catrev_run_free(nullptr);
}

}  // namespace
