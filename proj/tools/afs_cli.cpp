// Copyright 2026 The AFS-Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// afs: run continual-learning experiments and render their reports.
//
//   afs run --config exp.cfg [--seed N] [--runs K] [--out DIR] [--method afs|er|offline|ablation:<flags>]
//   afs report --in DIR --format csv|json [--out DIR]
//
// `run` writes results.json (lossless) plus the CSV report into the output
// directory; `report` re-renders results.json in either format. The output
// directory defaults to $AFS_OUT_DIR, then ./afs-out.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "afs/error.hpp"
#include "afs/experiment.hpp"

namespace {

constexpr const char* kResultsFile = "results.json";

std::string default_out_dir() {
  if (const char* env = std::getenv("AFS_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "afs-out";
}

void write_results(const afs::ExperimentReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream os(std::filesystem::path(dir) / kResultsFile, std::ios::binary);
  if (!os) throw afs::IoError("cannot write results into '" + dir + "'");
  os << afs::report_to_json(report);
}

afs::ExperimentReport read_results(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / kResultsFile;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw afs::IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return afs::report_from_json(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive focus shifting lab for online class-incremental learning"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a seeded multi-run experiment");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::string out_dir;
  std::string method;
  run->add_option("--config", config_path, "Experiment config (key = value lines)")->required();
  run->add_option("--seed", seed, "Base seed; run i uses seed + i");
  run->add_option("--runs", runs, "Number of seeded runs");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--method", method, "afs | er | offline | ablation:<ce|fl|rfl>,<none|lsr|vkd>,<rv|norv>");

  auto* report = app.add_subcommand("report", "Render results.json as CSV or JSON");
  std::string in_dir;
  std::string format = "csv";
  std::string report_out;
  report->add_option("--in", in_dir, "Directory holding results.json")->required();
  report->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  report->add_option("--out", report_out, "Output directory (defaults to --in)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      afs::ExperimentConfig config = afs::parse_config_file(config_path);
      if (seed) config.seed = *seed;
      if (runs) config.runs = *runs;
      if (!method.empty()) config.method = afs::MethodSpec::parse(method);
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (config.out_dir.empty()) config.out_dir = default_out_dir();

      const afs::ExperimentReport result = afs::run_experiment(config);
      write_results(result, config.out_dir);
      afs::emit_report(result, afs::ReportFormat::kCsv, config.out_dir);

      const auto acc = result.accuracy();
      std::cout << result.method << " M=" << result.memory << " runs=" << result.runs.size()
                << " A_T=" << 100.0 * acc.mean;
      if (acc.half_width) std::cout << " +- " << 100.0 * *acc.half_width;
      std::cout << " -> " << config.out_dir << '\n';
      if (result.partial) {
        std::cerr << "afs: partial results (" << result.failure << ")\n";
        return 2;
      }
      return 0;
    }

    const afs::ExperimentReport result = read_results(in_dir);
    afs::emit_report(result, format == "json" ? afs::ReportFormat::kJson : afs::ReportFormat::kCsv,
                     report_out.empty() ? in_dir : report_out);
    return 0;
  } catch (const afs::Error& e) {
    std::cerr << "afs: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "afs: unexpected error: " << e.what() << '\n';
    return 1;
  }
}
