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

// catreverse <scenario> [--config PATH] [--set key=value]... [--full]
//            [--seed S] [--out DIR] [--threads N]
//
// Exit status: 0 when every in-run check passes, 1 when a check fails,
// 2 on invalid configuration or any other error.

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "catreverse/catreverse.h"

namespace {

struct RunDeleter {
  void operator()(catrev_run* r) const { catrev_run_free(r); }
};

int report_error(const char* what) {
  std::fprintf(stderr, "catreverse: %s: %s\n", what, catrev_last_error());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time reversal of the generalized cat map: classical ensembles vs noisy quantum circuits"};
  app.set_version_flag("--version", std::string(catrev_version()));

  std::string scenario;
  std::string config_path;
  std::vector<std::string> overrides;
  bool full = false;
  std::string seed;
  std::string out;
  std::string threads;
  app.add_option("scenario", scenario, "diffusion | profile | image | fidelity | verify | resources")
      ->required();
  app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override one key (repeatable)")->allow_extra_args(false);
  app.add_flag("--full", full, "large run: n_q=7, n_q_prime=10, 10^6 orbits");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads (capped by CATREVERSE_THREADS)");
  CLI11_PARSE(app, argc, argv);

  catrev_run* raw = nullptr;
  if (catrev_run_create(scenario.c_str(), &raw) != CATREV_OK) return report_error("scenario");
  std::unique_ptr<catrev_run, RunDeleter> run(raw);

  if (full) catrev_run_full_preset(run.get());
  if (!config_path.empty() && catrev_run_load(run.get(), config_path.c_str()) != CATREV_OK) {
    return report_error("config");
  }
  std::vector<std::string> assignments = overrides;
  if (!seed.empty()) assignments.push_back("seed=" + seed);
  if (!out.empty()) assignments.push_back("out=" + out);
  if (!threads.empty()) assignments.push_back("threads=" + threads);
  for (const auto& a : assignments) {
    if (catrev_run_set(run.get(), a.c_str()) != CATREV_OK) return report_error("--set");
  }

  const catrev_status status = catrev_run_execute(run.get());
  if (status != CATREV_OK && status != CATREV_ERR_CHECK_FAILED) return report_error("run");
  const std::string failure = catrev_last_error();

  size_t needed = 0;
  catrev_run_report(run.get(), nullptr, 0, &needed);
  std::string text(needed, '\0');
  if (catrev_run_report(run.get(), text.data(), text.size(), &needed) == CATREV_OK) {
    text.resize(needed - 1);
    std::fputs(text.c_str(), stdout);
  }
  if (status == CATREV_ERR_CHECK_FAILED) {
    std::fprintf(stderr, "catreverse: %s\n", failure.c_str());
    return 1;
  }
  return 0;
}
