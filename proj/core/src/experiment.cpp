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

#include "afs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "afs/error.hpp"

namespace afs {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw InvalidConfig("config field '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("config field '" + key + "': expected a number, got '" + value + "'");
  }
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

AccuracyMatrix prefix(const AccuracyMatrix& m, std::size_t T) {
  AccuracyMatrix p(T);
  for (std::size_t i = 1; i <= T; ++i) {
    for (std::size_t j = 1; j <= i; ++j) p.set(i, j, m.at(i, j));
  }
  return p;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  if (values.size() == 1) {
    s.mean = values.front();
    return s;
  }
  const auto ci = confidence_interval(values);
  s.mean = ci.mean;
  s.half_width = ci.half_width;
  return s;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot write '" + p.string() + "'");
  return os;
}

json diag_to_json(const DiagnosticsRecord& d) {
  return json{{"task", d.task},
              {"mean_weight_old", d.mean_weight_old},
              {"mean_weight_new", d.mean_weight_new},
              {"mean_logit_old", d.mean_logit_old},
              {"mean_logit_new", d.mean_logit_new},
              {"hsi", d.count(DifficultyInterval::kHard)},
              {"asi", d.count(DifficultyInterval::kAmbiguous)},
              {"esi", d.count(DifficultyInterval::kEasy)}};
}

json summary_to_json(const MetricSummary& s) {
  json j{{"mean", s.mean}};
  j["ci"] = s.half_width ? json(*s.half_width) : json(nullptr);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// MethodSpec

MethodSpec MethodSpec::parse(const std::string& text) {
  MethodSpec m;
  if (text == "afs") {
    m.kind = Kind::kAfs;
    return m;
  }
  if (text == "er") {
    m.kind = Kind::kEr;
    return m;
  }
  if (text == "offline") {
    m.kind = Kind::kOffline;
    return m;
  }
  const std::string prefix = "ablation:";
  if (text.rfind(prefix, 0) != 0) {
    throw InvalidConfig("config field 'method': expected afs, er, offline or ablation:<flags>, got '" + text + "'");
  }
  m.kind = Kind::kAblation;
  const auto flags = split(text.substr(prefix.size()), ',');
  if (flags.size() != 3) {
    throw InvalidConfig("config field 'method': ablation needs <cls>,<reg>,<rv|norv>, got '" + text + "'");
  }
  if (flags[0] == "ce") m.cls = ClassTerm::kCrossEntropy;
  else if (flags[0] == "fl") m.cls = ClassTerm::kFocal;
  else if (flags[0] == "rfl") m.cls = ClassTerm::kRevisedFocal;
  else throw InvalidConfig("config field 'method': unknown classification term '" + flags[0] + "'");
  if (flags[1] == "none") m.reg = RegTerm::kNone;
  else if (flags[1] == "lsr") m.reg = RegTerm::kLabelSmoothing;
  else if (flags[1] == "vkd") m.reg = RegTerm::kVirtualDistill;
  else throw InvalidConfig("config field 'method': unknown regulariser '" + flags[1] + "'");
  if (flags[2] == "rv") m.review = true;
  else if (flags[2] == "norv") m.review = false;
  else throw InvalidConfig("config field 'method': review flag must be rv or norv, got '" + flags[2] + "'");
  return m;
}

std::string MethodSpec::label() const {
  switch (kind) {
    case Kind::kAfs:
      return "afs";
    case Kind::kEr:
      return "er";
    case Kind::kOffline:
      return "offline";
    case Kind::kAblation:
      break;
  }
  std::string s = "baseline";
  if (cls != ClassTerm::kCrossEntropy) s += "+" + std::string(afs::to_string(cls));
  if (reg != RegTerm::kNone) s += "+" + std::string(afs::to_string(reg));
  if (!review) s += "-norv";
  return s;
}

std::string MethodSpec::to_string() const {
  if (kind != Kind::kAblation) return label();
  return "ablation:" + std::string(afs::to_string(cls)) + "," + std::string(afs::to_string(reg)) + "," +
         (review ? "rv" : "norv");
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (num_tasks == 0) throw InvalidConfig("config field 'num_tasks': must be >= 1");
  if (memory == 0) throw InvalidConfig("config field 'memory': must be >= 1");
  if (runs == 0) throw InvalidConfig("config field 'runs': must be >= 1");
  for (std::size_t h : hidden) {
    if (h == 0) throw InvalidConfig("config field 'hidden': widths must be positive");
  }
  if (source == Source::kSynthetic) {
    if (synthetic.num_classes % num_tasks != 0) {
      throw InvalidConfig("config field 'num_tasks': does not divide synthetic.classes");
    }
    if (synthetic.num_classes != train.loss.num_classes) {
      throw InvalidConfig("config field 'synthetic.classes': inconsistent with loss class count");
    }
  } else if (idx_train_images.empty() || idx_train_labels.empty() || idx_test_images.empty() ||
             idx_test_labels.empty()) {
    throw InvalidConfig("config field 'idx.*': all four IDX paths are required for dataset=idx");
  }
  try {
    train.validate();
  } catch (const InvalidConfig& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
}

void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto& t = c.train;
  auto& l = t.loss;
  if (key == "dataset") {
    if (value == "synthetic") c.source = ExperimentConfig::Source::kSynthetic;
    else if (value == "idx") c.source = ExperimentConfig::Source::kIdx;
    else throw InvalidConfig("config field 'dataset': expected synthetic or idx, got '" + value + "'");
  } else if (key == "synthetic.classes") {
    c.synthetic.num_classes = to_size(key, value);
    l.num_classes = c.synthetic.num_classes;
  } else if (key == "synthetic.dim") c.synthetic.dim = to_size(key, value);
  else if (key == "synthetic.train_per_class") c.synthetic.train_per_class = to_size(key, value);
  else if (key == "synthetic.test_per_class") c.synthetic.test_per_class = to_size(key, value);
  else if (key == "synthetic.spread") c.synthetic.spread = to_double(key, value);
  else if (key == "synthetic.seed") c.synthetic.seed = to_size(key, value);
  else if (key == "idx.train_images") c.idx_train_images = value;
  else if (key == "idx.train_labels") c.idx_train_labels = value;
  else if (key == "idx.test_images") c.idx_test_images = value;
  else if (key == "idx.test_labels") c.idx_test_labels = value;
  else if (key == "idx.num_classes") {
    c.idx_num_classes = to_size(key, value);
    l.num_classes = c.idx_num_classes;
  } else if (key == "num_tasks") c.num_tasks = to_size(key, value);
  else if (key == "memory") c.memory = to_size(key, value);
  else if (key == "hidden") {
    c.hidden.clear();
    if (!value.empty() && value != "none") {
      for (const auto& w : split(value, ',')) c.hidden.push_back(to_size(key, w));
    }
  } else if (key == "method") c.method = MethodSpec::parse(value);
  else if (key == "runs") c.runs = to_size(key, value);
  else if (key == "seed") c.seed = to_size(key, value);
  else if (key == "out") c.out_dir = value;
  else if (key == "offline_epochs") c.offline_epochs = to_size(key, value);
  else if (key == "stream_batch") t.stream_batch = to_size(key, value);
  else if (key == "retrieve_batch") t.retrieve_batch = to_size(key, value);
  else if (key == "lr") t.lr = to_double(key, value);
  else if (key == "rv_lr") t.rv_lr = to_double(key, value);
  else if (key == "rv_batch") t.rv_batch = to_size(key, value);
  else if (key == "rv_every") {
    const std::size_t n = to_size(key, value);
    t.rv_every = n == 0 ? std::nullopt : std::optional<std::size_t>(n);
  } else if (key == "augment") {
    if (value == "none") t.augment.kind = AugmentKind::kNone;
    else if (value == "image") t.augment.kind = AugmentKind::kImage;
    else if (value == "vector") t.augment.kind = AugmentKind::kVector;
    else throw InvalidConfig("config field 'augment': expected none, image or vector, got '" + value + "'");
  } else if (key == "jitter_sigma") t.augment.jitter_sigma = to_double(key, value);
  else if (key == "crop_padding") t.augment.crop_padding = to_size(key, value);
  else if (key == "alpha") l.alpha = to_double(key, value);
  else if (key == "gamma") l.gamma = to_double(key, value);
  else if (key == "mu") l.mu = to_double(key, value);
  else if (key == "sigma") l.sigma = to_double(key, value);
  else if (key == "beta") l.beta = to_double(key, value);
  else if (key == "temperature") l.temperature = to_double(key, value);
  else if (key == "epsilon") l.epsilon = to_double(key, value);
  else throw InvalidConfig("config: unknown field '" + key + "'");
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("config line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_config_value(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  return parse_config(is);
}

// ---------------------------------------------------------------------------
// Running

ContinualBenchmark make_benchmark(const ExperimentConfig& config) {
  ContinualBenchmark bench;
  if (config.source == ExperimentConfig::Source::kSynthetic) {
    auto [train, test] = gen_synthetic(config.synthetic);
    bench.train = std::move(train);
    bench.test = std::move(test);
  } else {
    bench.train = load_idx(config.idx_train_images, config.idx_train_labels, config.idx_num_classes, Split::kTrain);
    bench.test = load_idx(config.idx_test_images, config.idx_test_labels,
                          config.idx_num_classes ? config.idx_num_classes : bench.train.num_classes, Split::kTest);
    if (bench.test.num_classes != bench.train.num_classes) {
      throw InvalidConfig("config field 'idx.num_classes': train and test class counts differ");
    }
  }
  bench.split = split_tasks(bench.train, config.num_tasks);
  return bench;
}

std::vector<TaskMetrics> task_metrics(const AccuracyMatrix& matrix, const std::vector<double>& reference) {
  std::vector<TaskMetrics> out;
  for (std::size_t T = 1; T <= matrix.num_tasks(); ++T) {
    const AccuracyMatrix m = prefix(matrix, T);
    TaskMetrics tm;
    tm.task = T;
    tm.average_accuracy = average_accuracy(m, T);
    if (T >= 2) tm.forgetting = average_forgetting(m, T);
    tm.intransigence = average_intransigence(m, std::span<const double>(reference.data(), T));
    out.push_back(tm);
  }
  return out;
}

RunResult run_single(const ExperimentConfig& config, const ContinualBenchmark& bench,
                     std::size_t run_index) {
  RunResult r;
  r.method = config.method.label();
  r.memory = config.memory;
  r.run = run_index;
  r.seed = config.seed + run_index;

  NetworkSpec spec;
  spec.layer_widths.push_back(bench.train.dim());
  spec.layer_widths.insert(spec.layer_widths.end(), config.hidden.begin(), config.hidden.end());
  spec.layer_widths.push_back(bench.train.num_classes);
  spec.seed = r.seed;

  TrainConfig tc = config.train;
  tc.seed = r.seed;
  tc.loss.num_classes = bench.train.num_classes;

  NetworkState model = init_network(spec);
  MemoryBuffer memory(config.memory);
  RunRecord record;
  switch (config.method.kind) {
    case MethodSpec::Kind::kAfs:
      record = train_afs(model, memory, bench, tc);
      break;
    case MethodSpec::Kind::kEr:
      record = train_er_baseline(model, memory, bench, tc);
      break;
    case MethodSpec::Kind::kAblation:
      tc.recipe = LossRecipe{config.method.cls, config.method.reg};
      tc.review = config.method.review;
      record = train_replay(model, memory, bench, tc);
      break;
    case MethodSpec::Kind::kOffline: {
      // Pooled i.i.d. training; every row of the matrix is the final model.
      tc.recipe = kCrossEntropyRecipe;
      const auto started = std::chrono::steady_clock::now();
      train_offline(model, bench.train, config.offline_epochs, tc);
      record.accuracy = AccuracyMatrix(bench.num_tasks());
      std::vector<double> per_task;
      for (std::size_t j = 0; j < bench.num_tasks(); ++j) per_task.push_back(evaluate(model, bench.test_set(j)));
      for (std::size_t i = 1; i <= bench.num_tasks(); ++i) {
        for (std::size_t j = 1; j <= i; ++j) record.accuracy.set(i, j, per_task[j - 1]);
      }
      record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      break;
    }
  }

  r.reference = train_reference(spec, bench, tc);
  for (std::size_t i = 1; i <= bench.num_tasks(); ++i) {
    std::vector<double> row;
    for (std::size_t j = 1; j <= i; ++j) row.push_back(record.accuracy.at(i, j));
    r.accuracy.push_back(std::move(row));
  }
  r.metrics = task_metrics(record.accuracy, r.reference);
  r.diagnostics = record.diagnostics;
  r.wall_time = record.wall_time;
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.method = config.method.label();
  report.memory = config.memory;
  const ContinualBenchmark bench = make_benchmark(config);
  for (std::size_t run = 0; run < config.runs; ++run) {
    try {
      report.runs.push_back(run_single(config, bench, run));
    } catch (const std::exception& e) {
      report.partial = true;
      report.failure = "run " + std::to_string(run) + ": " + e.what();
      break;
    }
  }
  return report;
}

MetricSummary ExperimentReport::accuracy() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.metrics.back().average_accuracy);
  return summarize(v);
}

MetricSummary ExperimentReport::forgetting() const {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (r.metrics.back().forgetting) v.push_back(*r.metrics.back().forgetting);
  }
  return summarize(v);
}

MetricSummary ExperimentReport::intransigence() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.metrics.back().intransigence);
  return summarize(v);
}

// ---------------------------------------------------------------------------
// Reports

std::string report_to_json(const ExperimentReport& report) {
  json j;
  j["schema"] = "afs-report/1";
  j["method"] = report.method;
  j["memory"] = report.memory;
  j["partial"] = report.partial;
  if (report.partial) j["failure"] = report.failure;
  j["runs"] = json::array();
  for (const RunResult& r : report.runs) {
    json jr{{"method", r.method},       {"memory", r.memory},       {"run", r.run},
            {"seed", r.seed},           {"accuracy_matrix", r.accuracy}, {"reference", r.reference},
            {"wall_time", r.wall_time}};
    jr["metrics"] = json::array();
    for (const TaskMetrics& m : r.metrics) {
      json jm{{"task", m.task}, {"A_T", m.average_accuracy}, {"I_T", m.intransigence}};
      jm["F_T"] = m.forgetting ? json(*m.forgetting) : json(nullptr);
      jr["metrics"].push_back(jm);
    }
    jr["diagnostics"] = json::array();
    for (const auto& d : r.diagnostics) jr["diagnostics"].push_back(diag_to_json(d));
    j["runs"].push_back(std::move(jr));
  }
  if (!report.runs.empty()) {
    j["summary"] = json{{"A_T", summary_to_json(report.accuracy())},
                        {"F_T", summary_to_json(report.forgetting())},
                        {"I_T", summary_to_json(report.intransigence())}};
  }
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  try {
    if (j.at("schema") != "afs-report/1") throw FormatError("report: unsupported schema");
    ExperimentReport report;
    report.method = j.at("method").get<std::string>();
    report.memory = j.at("memory").get<std::size_t>();
    report.partial = j.at("partial").get<bool>();
    if (report.partial) report.failure = j.value("failure", std::string{});
    for (const auto& jr : j.at("runs")) {
      RunResult r;
      r.method = jr.at("method").get<std::string>();
      r.memory = jr.at("memory").get<std::size_t>();
      r.run = jr.at("run").get<std::size_t>();
      r.seed = jr.at("seed").get<std::uint64_t>();
      r.accuracy = jr.at("accuracy_matrix").get<std::vector<std::vector<double>>>();
      r.reference = jr.at("reference").get<std::vector<double>>();
      r.wall_time = jr.at("wall_time").get<double>();
      for (const auto& jm : jr.at("metrics")) {
        TaskMetrics m;
        m.task = jm.at("task").get<std::size_t>();
        m.average_accuracy = jm.at("A_T").get<double>();
        m.intransigence = jm.at("I_T").get<double>();
        if (!jm.at("F_T").is_null()) m.forgetting = jm.at("F_T").get<double>();
        r.metrics.push_back(m);
      }
      for (const auto& jd : jr.at("diagnostics")) {
        DiagnosticsRecord d;
        d.task = jd.at("task").get<std::size_t>();
        d.mean_weight_old = jd.at("mean_weight_old").get<double>();
        d.mean_weight_new = jd.at("mean_weight_new").get<double>();
        d.mean_logit_old = jd.at("mean_logit_old").get<double>();
        d.mean_logit_new = jd.at("mean_logit_new").get<double>();
        d.interval_counts = {jd.at("hsi").get<std::size_t>(), jd.at("asi").get<std::size_t>(),
                             jd.at("esi").get<std::size_t>()};
        r.diagnostics.push_back(d);
      }
      report.runs.push_back(std::move(r));
    }
    return report;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path root(dir);

  if (report.partial) {
    auto os = open_out(root / "PARTIAL");
    os << report.failure << '\n';
  }

  if (format == ReportFormat::kJson) {
    auto os = open_out(root / "report.json");
    os << report_to_json(report);
    return;
  }

  {
    auto os = open_out(root / "runs.csv");
    os << kRunsCsvHeader << '\n';
    for (const RunResult& r : report.runs) {
      for (const TaskMetrics& m : r.metrics) {
        os << r.method << ',' << r.memory << ',' << r.run << ',' << m.task << ',' << fmt6(m.average_accuracy)
           << ',' << (m.forgetting ? fmt6(*m.forgetting) : std::string{}) << ',' << fmt6(m.intransigence) << ','
           << fmt6(r.wall_time) << '\n';
      }
    }
  }
  {
    auto os = open_out(root / "accuracy.csv");
    os << kAccuracyCsvHeader << '\n';
    for (const RunResult& r : report.runs) {
      for (std::size_t i = 0; i < r.accuracy.size(); ++i) {
        for (std::size_t j = 0; j < r.accuracy[i].size(); ++j) {
          os << r.method << ',' << r.run << ',' << i + 1 << ',' << j + 1 << ',' << fmt6(r.accuracy[i][j]) << '\n';
        }
      }
    }
  }
  {
    auto os = open_out(root / "diagnostics.csv");
    os << kDiagnosticsCsvHeader << '\n';
    for (const RunResult& r : report.runs) {
      for (const auto& d : r.diagnostics) {
        os << r.method << ',' << r.run << ',' << d.task << ',' << fmt6(d.mean_weight_old) << ','
           << fmt6(d.mean_weight_new) << ',' << fmt6(d.mean_logit_old) << ',' << fmt6(d.mean_logit_new) << ','
           << d.count(DifficultyInterval::kHard) << ',' << d.count(DifficultyInterval::kAmbiguous) << ','
           << d.count(DifficultyInterval::kEasy) << '\n';
      }
    }
  }
  {
    auto os = open_out(root / "summary.csv");
    os << kSummaryCsvHeader << '\n';
    if (!report.runs.empty()) {
      auto cell = [](const MetricSummary& s) {
        return fmt6(s.mean) + ',' + (s.half_width ? fmt6(*s.half_width) : std::string{});
      };
      os << report.method << ',' << report.memory << ',' << report.runs.size() << ',' << cell(report.accuracy())
         << ',' << cell(report.forgetting()) << ',' << cell(report.intransigence()) << '\n';
    }
  }
}

}  // namespace afs
