// Copyright 2026 The QTL Authors
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

// qtl: dataset generation, training, evaluation and benchmarking.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error,
// 4 capacity error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "config_io.hpp"
#include "qtl/analytics/auroc.hpp"
#include "qtl/analytics/report.hpp"
#include "qtl/bench/sweep.hpp"
#include "qtl/common/errors.hpp"
#include "qtl/common/hash.hpp"
#include "qtl/datapipe/dataset_io.hpp"
#include "qtl/trainer/train.hpp"

namespace fs = std::filesystem;
using namespace qtl;
using cli::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitCapacity = 4;

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  try {
    if (const auto dots = text.find(".."); dots != std::string::npos) {
      const auto lo = std::stoull(text.substr(0, dots));
      const auto hi = std::stoull(text.substr(dots + 2));
      if (hi < lo) throw ConfigError("empty seed range '" + text + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      std::stringstream in(text);
      std::string item;
      while (std::getline(in, item, ',')) seeds.push_back(std::stoull(item));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse seeds '" + text + "'");
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument("colon");
    return {std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw ConfigError("sweep range must look like a:b, got '" + text + "'");
  }
}

// ---------------------------------------------------------------- gen-data

struct GenOptions {
  std::string config;
  std::string out;
  std::size_t labels = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool force = false;
};

int cmd_gen_data(const GenOptions& o) {
  data::LongTailSpec spec;
  if (!o.config.empty()) spec = cli::longtail_spec_from_json(cli::read_json_file(o.config));
  if (o.labels) spec.num_labels = o.labels;
  if (o.samples) spec.num_samples = o.samples;
  if (o.seed_set) spec.seed = o.seed;
  for (const auto& w : spec.warnings()) std::cerr << "warning: " << w << '\n';

  const fs::path out = o.out.empty() ? cli::cache_root() / ("longtail-n" + std::to_string(spec.num_labels) +
                                                         "-seed" + std::to_string(spec.seed))
                                     : fs::path(o.out);
  if (fs::exists(out) && !fs::is_empty(out)) {
    if (!o.force) throw ConfigError(out.string() + " already exists (use --force to replace it)");
    fs::remove_all(out);
  }
  const auto ds = data::generate_longtail(spec);
  data::write_dataset_dir(ds, out);
  std::cout << "dataset\t" << out.string() << '\n';
  std::cout << "label\ttrain\tval\ttest\n";
  const auto tr = ds.positive_counts(data::Split::kTrain);
  const auto va = ds.positive_counts(data::Split::kValidation);
  const auto te = ds.positive_counts(data::Split::kTest);
  for (std::size_t k = 0; k < ds.num_labels(); ++k) {
    std::cout << ds.label_names[k] << '\t' << tr[k] << '\t' << va[k] << '\t' << te[k] << '\n';
  }
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainOptions {
  std::string config;
  std::string data;
  std::string out;
  std::string head;
  std::size_t labels = 0;
  std::string seeds;
  bool paired = false;
  std::size_t max_epochs = 0;
  std::size_t threads = 0;
  bool threads_set = false;
  bool force = false;
};

fs::path default_data_dir(std::size_t labels) {
  return cli::cache_root() / ("longtail-n" + std::to_string(labels) + "-seed2024");
}

std::string run_dir_name(const train::TrainConfig& c, const std::string& fingerprint) {
  const std::string digest = sha256_hex(cli::to_json(c).dump() + "\n" + fingerprint);
  return model::to_string(c.head) + "-n" + std::to_string(c.num_labels) + "-seed" +
         std::to_string(c.seed) + "-" + digest.substr(0, 12);
}

void write_run(const train::TrainRun& run, const data::SampleTable& table, const fs::path& dir,
               const fs::path& data_dir, const std::string& config_path) {
  fs::create_directories(dir);
  const json config = cli::to_json(run.config);
  cli::write_text_atomic(dir / "config.json", config.dump(2) + "\n");
  train::save_checkpoint(run.best, dir / "best.ckpt");
  cli::write_text_atomic(dir / "loss_curves.tsv", train::loss_curves_tsv(run));
  cli::write_text_atomic(dir / "stream_hash.txt", run.stream_hash + "\n");

  const std::size_t n = table.num_labels();
  std::ostringstream preds;
  preds.precision(17);
  preds << "sample_id";
  for (const auto& name : table.label_names) preds << '\t' << name;
  preds << '\n';
  std::vector<std::uint8_t> truths;
  for (std::size_t j = 0; j < run.test_rows.size(); ++j) {
    preds << table.sample_ids[run.test_rows[j]];
    for (std::size_t k = 0; k < n; ++k) preds << '\t' << run.test_probabilities[j * n + k];
    preds << '\n';
    const auto* y = table.label_row(run.test_rows[j]);
    truths.insert(truths.end(), y, y + n);
  }
  cli::write_text_atomic(dir / "test_predictions.tsv", preds.str());

  const auto aurocs = analytics::per_label_auroc(run.test_probabilities, truths, n, table.label_names);
  json summary{{"best_epoch", run.best_epoch},
               {"best_validation_loss", run.best_validation_loss},
               {"epochs_run", run.epochs_run()},
               {"stop_reason", train::to_string(run.stop_reason)},
               {"validation_losses", run.validation_losses},
               {"seconds", run.seconds},
               {"test_auroc", json::object()},
               {"test_mean_auroc", analytics::mean_auroc(aurocs)}};
  for (std::size_t k = 0; k < n; ++k) summary["test_auroc"][table.label_names[k]] = aurocs[k];
  cli::write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");

  json artifacts = json::object();
  for (const char* name : {"config.json", "best.ckpt", "loss_curves.tsv", "stream_hash.txt",
                           "test_predictions.tsv", "summary.json"}) {
    artifacts[name] = cli::file_sha256(dir / name);
  }
  const json manifest{{"config_path", config_path},
                      {"config", config},
                      {"output_dir", fs::absolute(dir).string()},
                      {"dataset_dir", fs::absolute(data_dir).string()},
                      {"dataset_fingerprint", table.fingerprint},
                      {"artifacts", artifacts}};
  cli::write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << model::to_string(run.config.head) << "\tseed " << run.config.seed << "\tbest_epoch "
            << run.best_epoch << "\tmean_test_auroc " << analytics::mean_auroc(aurocs) << "\t"
            << dir.string() << '\n';
}

int cmd_train(const TrainOptions& o) {
  train::TrainConfig base;
  if (!o.config.empty()) base = cli::train_config_from_json(cli::read_json_file(o.config));
  if (!o.head.empty()) base.head = model::head_kind_from_string(o.head);
  if (o.labels) base.num_labels = o.labels;
  if (o.max_epochs) base.max_epochs = o.max_epochs;
  if (o.threads_set) base.threads = o.threads;
  std::vector<std::uint64_t> seeds = o.seeds.empty() ? std::vector<std::uint64_t>{base.seed}
                                                     : parse_seeds(o.seeds);

  const fs::path data_dir = o.data.empty() ? default_data_dir(base.num_labels) : fs::path(o.data);
  if (!fs::exists(data_dir / "manifest.tsv")) {
    throw ConfigError("no dataset at " + data_dir.string() + " (run gen-data first)");
  }
  const auto table = data::open_dataset_dir(data_dir);
  base.dataset_fingerprint = table.fingerprint;
  const fs::path out_root = o.out.empty() ? cli::cache_root() / "runs" : fs::path(o.out);

  auto progress = [](const train::EpochReport& r) {
    std::cerr << "  epoch " << r.epoch << " train " << r.mean_train_loss << " val "
              << r.validation_loss << (r.improved ? " *" : "") << '\n';
  };
  auto run_one = [&](train::TrainConfig c) {
    const fs::path dir = out_root / run_dir_name(c, table.fingerprint);
    if (fs::exists(dir / "manifest.json") && !o.force) {
      std::cout << model::to_string(c.head) << "\tseed " << c.seed << "\texists\t" << dir.string() << '\n';
      return;
    }
    std::cerr << model::to_string(c.head) << " seed " << c.seed << '\n';
    const auto run = train::train(c, table, progress);
    write_run(run, table, dir, data_dir, o.config);
  };

  if (o.paired) {
    train::TrainConfig cdl = base, dqc = base;
    cdl.head = model::HeadKind::kCdl;
    dqc.head = model::HeadKind::kDqc;
    for (auto seed : seeds) {
      cdl.seed = dqc.seed = seed;
      run_one(cdl);
      run_one(dqc);
    }
  } else {
    for (auto seed : seeds) {
      base.seed = seed;
      run_one(base);
    }
  }
  return 0;
}

// -------------------------------------------------------------------- eval

struct EvalOptions {
  std::vector<std::string> runs;
  std::string data;
  std::string out;
  std::string task;
  bool paired = false;
};

struct EvaluatedRun {
  train::TrainConfig config;
  std::vector<double> aurocs;
  std::vector<std::string> labels;
};

EvaluatedRun evaluate_run(const fs::path& dir, const std::string& data_override) {
  const json manifest = cli::read_json_file(dir / "manifest.json");
  EvaluatedRun out;
  out.config = cli::train_config_from_json(manifest.at("config"));
  const fs::path data_dir =
      data_override.empty() ? fs::path(manifest.at("dataset_dir").get<std::string>()) : fs::path(data_override);
  const auto table = data::open_dataset_dir(data_dir);
  auto config = out.config;
  config.dataset_fingerprint.clear();
  train::TrainingSession session(config, table);
  session.restore(train::load_checkpoint(dir / "best.ckpt", config.config_hash()));
  const auto rows = table.indices_of(data::Split::kTest);
  const auto probs = session.predict(rows);
  std::vector<std::uint8_t> truths;
  for (auto r : rows) truths.insert(truths.end(), table.label_row(r), table.label_row(r) + table.num_labels());
  out.aurocs = analytics::per_label_auroc(probs, truths, table.num_labels(), table.label_names);
  out.labels = table.label_names;
  return out;
}

int cmd_eval(const EvalOptions& o) {
  std::vector<EvaluatedRun> runs;
  std::vector<analytics::AurocRecord> records;
  for (const auto& r : o.runs) {
    runs.push_back(evaluate_run(r, o.data));
    const auto& e = runs.back();
    const std::string head = model::to_string(e.config.head);
    for (std::size_t k = 0; k < e.labels.size(); ++k) {
      records.push_back({head, e.config.seed, e.labels[k], e.aurocs[k]});
    }
    records.push_back({head, e.config.seed, "mean", analytics::mean_auroc(e.aurocs)});
  }
  const fs::path out = o.out.empty() ? fs::path("eval") : fs::path(o.out);
  fs::create_directories(out);
  cli::write_text_atomic(out / "auroc.tsv", analytics::auroc_tsv(records));
  std::cout << analytics::auroc_tsv(records);
  if (!o.paired) return 0;

  std::map<std::uint64_t, const EvaluatedRun*> cdl, dqc;
  for (const auto& r : runs) {
    auto& slot = r.config.head == model::HeadKind::kCdl ? cdl : dqc;
    if (!slot.emplace(r.config.seed, &r).second) {
      throw ArgumentError("two " + model::to_string(r.config.head) + " runs share seed " +
                          std::to_string(r.config.seed));
    }
  }
  for (const auto& [seed, run] : cdl) {
    if (!dqc.count(seed)) throw ArgumentError("CDL run for seed " + std::to_string(seed) + " has no DQC partner");
  }
  for (const auto& [seed, run] : dqc) {
    if (!cdl.count(seed)) throw ArgumentError("DQC run for seed " + std::to_string(seed) + " has no CDL partner");
  }
  if (cdl.size() < 2) throw ArgumentError("paired evaluation needs at least two seeds");

  const auto& labels = cdl.begin()->second->labels;
  const std::string task = o.task.empty() ? "n" + std::to_string(labels.size()) : o.task;
  std::vector<analytics::PairedComparison> comparisons;
  for (std::size_t k = 0; k <= labels.size(); ++k) {
    std::vector<double> a, b;
    for (const auto& [seed, run] : cdl) {
      const auto* partner = dqc.at(seed);
      a.push_back(k < labels.size() ? run->aurocs[k] : analytics::mean_auroc(run->aurocs));
      b.push_back(k < labels.size() ? partner->aurocs[k] : analytics::mean_auroc(partner->aurocs));
    }
    comparisons.push_back(
        analytics::compare_paired(k < labels.size() ? labels[k] : "mean", task, a, b));
  }
  cli::write_text_atomic(out / "comparison.tsv", analytics::comparison_tsv(comparisons));
  std::vector<analytics::PairedComparison> testable;
  for (const auto& c : comparisons) {
    if (c.p_value) {
      testable.push_back(c);
    } else {
      std::cerr << "note: no p-value for '" << c.label << "' (zero-variance differences)\n";
    }
  }
  cli::write_text_atomic(out / "volcano.tsv", analytics::volcano_tsv(analytics::volcano_data(testable)));
  std::cout << analytics::comparison_tsv(comparisons);
  return 0;
}

// ------------------------------------------------------------------- bench

struct BenchOptions {
  std::string head = "both";
  std::vector<std::size_t> labels{8, 14, 19};
  std::string sweep;
  std::size_t warmup = 10;
  std::size_t measured = 30;
  std::size_t batch = 32;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  std::string tag;
  std::string log;
};

int cmd_bench(const BenchOptions& o) {
  std::vector<model::HeadKind> heads;
  if (o.head == "both") {
    heads = {model::HeadKind::kCdl, model::HeadKind::kDqc};
  } else {
    heads = {model::head_kind_from_string(o.head)};
  }
  bench::BenchProtocol base;
  base.warmup_steps = o.warmup;
  base.measured_steps = o.measured;
  base.batch_size = o.batch;
  base.threads = o.threads;
  base.seed = o.seed;
  base.validate();

  std::vector<std::size_t> ns = o.labels;
  if (!o.sweep.empty()) {
    const auto [lo, hi] = parse_range(o.sweep);
    if (hi < lo) throw ConfigError("empty sweep range");
    ns.clear();
    for (auto n = lo; n <= hi; ++n) ns.push_back(n);
  }

  bench::BenchLock lock(bench::default_lock_path());
  std::vector<bench::BenchResult> results;
  const auto rows = bench::scaling_sweep(ns, base, heads, &results);
  const fs::path log = o.log.empty() ? cli::cache_root() / "bench_results.tsv" : fs::path(o.log);
  if (log.has_parent_path()) fs::create_directories(log.parent_path());
  bench::append_results_log(log, results, o.tag);

  if (o.sweep.empty()) {
    std::cout << bench::results_table(results);
    return 0;
  }
  std::cout << bench::sweep_table(rows);
  if (ns.size() >= 3) {
    for (auto head : heads) {
      std::vector<double> x, y;
      for (const auto& r : rows) {
        if (r.head != head) continue;
        x.push_back(static_cast<double>(r.n));
        y.push_back(r.mean);
      }
      const auto fit = bench::fit_growth(x, y);
      std::cout << "# fit " << model::to_string(head) << " linear_aic=" << fit.linear_aic
                << " exp_aic=" << fit.exp_aic << " preferred="
                << (fit.exponential_preferred() ? "exponential" : "linear") << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtl: hybrid quantum transfer learning toolkit"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen-data", "Generate a synthetic long-tailed dataset");
  g->add_option("--config", gen.config, "Dataset JSON config");
  g->add_option("--out", gen.out, "Output directory");
  g->add_option("--labels", gen.labels, "Number of labels");
  g->add_option("--samples", gen.samples, "Number of samples");
  g->add_option("--seed", gen.seed, "Generator seed")->each([&](const std::string&) { gen.seed_set = true; });
  g->add_flag("--force", gen.force, "Replace an existing directory");

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train CDL or DQC heads");
  t->add_option("--config", tr.config, "Training JSON config");
  t->add_option("--data", tr.data, "Dataset directory");
  t->add_option("--out", tr.out, "Root for run directories");
  t->add_option("--head", tr.head, "cdl or dqc");
  t->add_option("--labels", tr.labels, "Number of labels");
  t->add_option("--seed,--seeds", tr.seeds, "Seed, list a,b,c or range a..b");
  t->add_flag("--paired", tr.paired, "Train both heads for every seed");
  t->add_option("--max-epochs", tr.max_epochs, "Override max_epochs");
  t->add_option("--threads", tr.threads, "Worker threads (0 = all cores)")
      ->each([&](const std::string&) { tr.threads_set = true; });
  t->add_flag("--force", tr.force, "Retrain even when the run directory exists");

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Evaluate run directories on a test split");
  e->add_option("--runs", ev.runs, "Run directories")->required();
  e->add_option("--data", ev.data, "Evaluate on this dataset instead of the training one");
  e->add_option("--out", ev.out, "Report directory");
  e->add_option("--task", ev.task, "Task name for comparison rows");
  e->add_flag("--paired", ev.paired, "Pair CDL and DQC runs by seed and test them");

  BenchOptions be;
  auto* b = app.add_subcommand("bench", "Wall-clock training step benchmark");
  b->add_option("--head", be.head, "cdl, dqc or both");
  b->add_option("--labels", be.labels, "Label counts");
  b->add_option("--sweep", be.sweep, "Label-count range a:b");
  b->add_option("--warmup", be.warmup, "Untimed warmup steps");
  b->add_option("--measured", be.measured, "Timed steps");
  b->add_option("--batch", be.batch, "Batch size");
  b->add_option("--threads", be.threads, "Worker threads");
  b->add_option("--seed", be.seed, "Initialisation seed");
  b->add_option("--tag", be.tag, "Tag stored in the results log");
  b->add_option("--log", be.log, "Append-only results log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*g) return cmd_gen_data(gen);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*b) return cmd_bench(be);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    switch (err.error_class()) {
      case ErrorClass::kConfig: return kExitConfig;
      case ErrorClass::kCapacity: return kExitCapacity;
      case ErrorClass::kRuntime: return kExitRuntime;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
