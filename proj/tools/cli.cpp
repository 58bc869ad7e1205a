// Copyright 2026 The boxekg Authors
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

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "boxekg/baselines.hpp"
#include "boxekg/errors.hpp"
#include "boxekg/evaluation.hpp"
#include "boxekg/expressiveness.hpp"
#include "boxekg/kg.hpp"
#include "boxekg/model.hpp"
#include "boxekg/training.hpp"

namespace fs = std::filesystem;

namespace boxekg::cli {
namespace {

constexpr const char* kRunConfig = "run.cfg";

// --- config files ------------------------------------------------------------

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Reads `key = value` lines into flag tokens. Blank lines and lines starting
// with '#' are skipped.
std::vector<std::string> config_tokens(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw DataError(path.string() + ":" + std::to_string(no) + ": empty key");
    tokens.push_back("--" + key);
    tokens.push_back(trim(line.substr(eq + 1)));
  }
  return tokens;
}

// Config-file values are spliced in front of the command-line flags, so the
// command line wins under the take-last policy.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<fs::path> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (!config || out.empty()) return out;
  auto tokens = config_tokens(*config);
  out.insert(out.begin() + 1, tokens.begin(), tokens.end());
  return out;
}

using Resolved = std::vector<std::pair<std::string, std::string>>;

// Every long option of `cmd` with its effective value, in declaration order.
Resolved resolve_options(const CLI::App& cmd) {
  Resolved out;
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || opt->get_lnames().empty()) continue;
    if (opt->count() > 0) {
      for (const auto& v : opt->reduced_results()) out.emplace_back(name, v);
    } else if (!opt->get_default_str().empty()) {
      out.emplace_back(name, opt->get_default_str());
    }
  }
  return out;
}

void set_resolved(Resolved& r, const std::string& key, const std::string& value) {
  for (auto& [k, v] : r) {
    if (k == key) {
      v = value;
      return;
    }
  }
  r.emplace_back(key, value);
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw DataError("cannot write " + path.string());
}

void write_run_config(const fs::path& dir, const std::string& command, const Resolved& r) {
  std::ostringstream os;
  os << "# command: " << command << "\n";
  for (const auto& [k, v] : r) os << k << " = " << v << "\n";
  write_text(dir / kRunConfig, os.str());
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v == 0) {
      throw UsageError("bad layer size list '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

NormOrder parse_norm(int v) { return v == 1 ? NormOrder::kL1 : NormOrder::kL2; }

const std::vector<UnaryFact>& label_split(const Dataset& ds, const std::string& split) {
  if (split == "train") return ds.labels.train;
  if (split == "valid") return ds.labels.valid;
  return ds.labels.test;
}

Dataset load_dir(const std::string& dir, std::ostream& err) {
  std::vector<std::string> warnings;
  Dataset ds = load_dataset(DatasetPaths::in_directory(dir), &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  return ds;
}

// --- synth ---------------------------------------------------------------------

struct SynthArgs {
  SyntheticConfig cfg;
  std::vector<std::string> rules;
  std::string out;
};

void add_synth(CLI::App& app, SynthArgs& a) {
  auto* c = app.add_subcommand("synth", "Generate a synthetic dataset with planted rules");
  c->add_option("--entities", a.cfg.num_entities, "Number of entities");
  c->add_option("--classes", a.cfg.num_classes, "Number of classes");
  c->add_option("--relations", a.cfg.num_relations, "Number of relations");
  c->add_option("--feature-dim", a.cfg.feature_dim, "Feature dimension (0 disables)");
  c->add_option("--rule", a.rules,
                "Planted rule head_class:relation:tail_class:probability (repeatable)");
  c->add_option("--rule-prob", a.cfg.default_rule_probability,
                "Edge probability of the default homophilous rules");
  c->add_option("--noise-edges", a.cfg.noise_edges, "Uniformly random extra edges");
  c->add_option("--feature-radius", a.cfg.feature_radius, "Radius of the class means");
  c->add_option("--informative-fraction", a.cfg.informative_feature_fraction,
                "Fraction of entities whose features carry class signal");
  c->add_option("--train-fraction", a.cfg.train_fraction, "Training label fraction");
  c->add_option("--valid-fraction", a.cfg.valid_fraction, "Validation label fraction");
  c->add_option("--seed", a.cfg.seed, "Random seed");
  c->add_option("--out", a.out, "Output dataset directory")->required();
}

int cmd_synth(SynthArgs& a, const CLI::App& cmd, std::ostream& out) {
  for (const auto& text : a.rules) {
    PlantedRule r;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream is(text);
    if (!(is >> r.head_class >> c1 >> r.relation >> c2 >> r.tail_class >> c3 >> r.probability) ||
        c1 != ':' || c2 != ':' || c3 != ':') {
      throw UsageError("bad rule '" + text + "', expected h:r:t:p");
    }
    a.cfg.rules.push_back(r);
  }
  const Dataset ds = generate_synthetic(a.cfg);
  fs::create_directories(a.out);
  save_dataset(ds, a.out);
  write_run_config(a.out, "synth", resolve_options(cmd));
  out << dataset_stats(ds);
  return kSuccess;
}

// --- drop-edges ----------------------------------------------------------------

struct DropArgs {
  std::string data, out;
  DropSpec spec;
};

void add_drop(CLI::App& app, DropArgs& a) {
  auto* c = app.add_subcommand("drop-edges",
                               "Hold out a fraction of edges without isolating any node");
  c->add_option("--data", a.data, "Input dataset directory")->required();
  c->add_option("--fraction", a.spec.fraction, "Fraction of edges to drop, in [0, 1)");
  c->add_option("--seed", a.spec.seed, "Random seed");
  c->add_option("--out", a.out, "Output dataset directory")->required();
}

int cmd_drop(const DropArgs& a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_dir(a.data, err);
  const auto res = drop_edges(ds, a.spec);
  fs::create_directories(a.out);
  save_dataset(res.dataset, a.out);
  write_run_config(a.out, "drop-edges", resolve_options(cmd));
  out << "requested: " << res.report.requested << "\n"
      << "removed: " << res.report.removed << "\n"
      << "target_reached: " << (res.report.target_reached ? "true" : "false") << "\n";
  if (!res.report.target_reached) {
    err << "warning: only " << res.report.removed << " of " << res.report.requested
        << " edges could be dropped without isolating a node\n";
  }
  return kSuccess;
}

// --- train -----------------------------------------------------------------------

struct TrainArgs {
  std::string data, out;
  std::string mode = "boxe", classes = "on", features = "auto", loss = "ns";
  std::string hidden = "1000,1000", embedding_scale = "auto", stopping = "none";
  std::string valid_edges;
  int norm = 2;
  std::size_t dim = 128, threads = 1;
  TrainConfig train;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* c = app.add_subcommand("train", "Train a BoxE or MLP-BoxE model");
  c->add_option("--data", a.data, "Dataset directory")->required();
  c->add_option("--out", a.out, "Output directory")->required();
  c->add_option("--mode", a.mode, "Model family")->check(CLI::IsMember({"boxe", "mlp-boxe"}));
  c->add_option("--classes", a.classes, "Train on class labels")
      ->check(CLI::IsMember({"on", "off"}));
  c->add_option("--features", a.features, "Use node features (auto follows --mode)")
      ->check(CLI::IsMember({"on", "off", "auto"}));
  c->add_option("--loss", a.loss, "Loss function")
      ->check(CLI::IsMember({"ns", "adv-ns", "ce"}));
  c->add_option("--margin", a.train.loss.margin, "Negative-sampling margin gamma");
  c->add_option("--adv-temperature", a.train.loss.adversarial_temperature,
                "Self-adversarial temperature alpha");
  c->add_option("--dim", a.dim, "Embedding dimension");
  c->add_option("--norm", a.norm, "Distance norm order")->check(CLI::IsMember({1, 2}));
  c->add_option("--hidden", a.hidden, "Hidden layer sizes of the feature MLPs");
  c->add_option("--embedding-scale", a.embedding_scale,
                "Embedding factor before adding MLP outputs (auto: 0.5 with features)");
  c->add_option("--batch-size", a.train.batch_size, "Facts per batch");
  c->add_option("--epochs", a.train.epochs, "Maximum number of epochs");
  c->add_option("--lr", a.train.learning_rate, "Adam learning rate");
  c->add_option("--negatives", a.train.negatives.num_negatives, "Negatives per fact");
  c->add_option("--unary-weight", a.train.unary_weight, "Weight of class facts");
  c->add_option("--early-stopping", a.stopping, "Validation metric for model selection")
      ->check(CLI::IsMember({"none", "accuracy", "mrr"}));
  c->add_option("--valid-edges", a.valid_edges, "Edge file scored for MRR early stopping");
  c->add_option("--patience", a.train.patience, "Epochs without improvement before stopping");
  c->add_option("--eval-every", a.train.eval_every, "Validation interval in epochs");
  c->add_option("--seed", a.train.seed, "Random seed");
  c->add_option("--threads", a.threads, "Evaluation threads (1 = deterministic mode)");
}

int cmd_train(TrainArgs& a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  const bool mlp = a.mode == "mlp-boxe";
  const std::string features = a.features == "auto" ? (mlp ? "on" : "off") : a.features;
  if (mlp && features == "off") {
    throw UsageError("--mode mlp-boxe needs node features; drop --features off");
  }
  if (!mlp && features == "on") {
    throw UsageError("--features on needs --mode mlp-boxe");
  }
  const Dataset ds = load_dir(a.data, err);
  if (features == "on" && !ds.features) {
    throw UsageError("--features on but the dataset has no features.txt");
  }

  ModelConfig mc;
  mc.dim = a.dim;
  mc.norm = parse_norm(a.norm);
  mc.mode = mlp ? ModelMode::kMlpBoxE : ModelMode::kBoxE;
  if (mlp) {
    mc.hidden = parse_sizes(a.hidden);
    mc.feature_dim = static_cast<std::size_t>(ds.features->cols());
  }
  if (a.embedding_scale == "auto") {
    mc.embedding_scale = mlp ? 0.5 : 1.0;
  } else {
    try {
      mc.embedding_scale = std::stod(a.embedding_scale);
    } catch (const std::exception&) {
      throw UsageError("bad --embedding-scale '" + a.embedding_scale + "'");
    }
  }

  TrainConfig& tc = a.train;
  tc.use_classes = a.classes == "on";
  tc.loss.kind = a.loss == "ce"       ? LossKind::kCrossEntropy
                 : a.loss == "adv-ns" ? LossKind::kSelfAdversarial
                                      : LossKind::kNegativeSampling;
  tc.stopping = a.stopping == "accuracy" ? StoppingMetric::kValidAccuracy
                : a.stopping == "mrr"    ? StoppingMetric::kValidMrr
                                         : StoppingMetric::kNone;
  if (!a.valid_edges.empty()) tc.validation_edges = load_edges_with_vocab(a.valid_edges, ds.vocab);

  const TrainResult res = train(ds, mc, tc);
  fs::create_directories(a.out);
  save_model(fs::path(a.out) / "model.json", res.params, ds.vocab);
  write_text(fs::path(a.out) / "train_log.csv", res.log.to_csv());
  Resolved resolved = resolve_options(cmd);
  set_resolved(resolved, "features", features);
  set_resolved(resolved, "embedding-scale", format_number(mc.embedding_scale));
  write_run_config(a.out, "train", resolved);

  const auto losses = res.log.epoch_losses();
  out << "epochs_run: " << res.log.epochs_run << "\n"
      << "best_epoch: " << res.log.best_epoch << "\n";
  if (!losses.empty()) out << "final_loss: " << format_number(losses.back()) << "\n";
  if (res.log.best_metric) out << "best_valid: " << format_number(*res.log.best_metric) << "\n";
  if (res.log.diverged) {
    err << "error: training diverged (non-finite loss or gradient)\n";
    return kNumericFailure;
  }
  return kSuccess;
}

// --- evaluate ----------------------------------------------------------------------

struct EvalArgs {
  std::string model, data, task = "classify", split = "valid", eval_edges, out;
  std::vector<std::string> filter_edges;
  std::size_t threads = 1;
};

void add_evaluate(CLI::App& app, EvalArgs& a) {
  auto* c = app.add_subcommand("evaluate", "Evaluate a trained checkpoint");
  c->add_option("--model", a.model, "Checkpoint file")->required();
  c->add_option("--data", a.data, "Dataset directory")->required();
  c->add_option("--task", a.task, "Evaluation task")->check(CLI::IsMember({"classify", "rank"}));
  c->add_option("--split", a.split, "Label split for classification")
      ->check(CLI::IsMember({"train", "valid", "test"}));
  c->add_option("--eval-edges", a.eval_edges, "Edges to rank");
  c->add_option("--filter-edges", a.filter_edges,
                "Known-true edge files removed from the candidates (repeatable)");
  c->add_option("--threads", a.threads, "Ranking threads (1 = deterministic mode)");
  c->add_option("--out", a.out, "Directory for metrics and predictions");
}

int cmd_evaluate(const EvalArgs& a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  if (a.task == "rank" && (a.eval_edges.empty() || a.filter_edges.empty())) {
    throw UsageError("--task rank requires --eval-edges and --filter-edges");
  }
  if (a.threads < 1) throw UsageError("--threads must be >= 1");
  const LoadedModel loaded = load_model(a.model);
  const Dataset ds = load_dir(a.data, err);
  if (!(loaded.vocab == ds.vocab)) {
    throw DataError("checkpoint/dataset dimensionality mismatch: checkpoint has " +
                    std::to_string(loaded.vocab.num_entities()) + " entities, " +
                    std::to_string(loaded.vocab.num_classes()) + " classes, " +
                    std::to_string(loaded.vocab.num_relations()) + " relations; dataset has " +
                    std::to_string(ds.vocab.num_entities()) + ", " +
                    std::to_string(ds.vocab.num_classes()) + ", " +
                    std::to_string(ds.vocab.num_relations()));
  }
  const Matrix* features = nullptr;
  if (loaded.params.config.feature_mode()) {
    if (!ds.features ||
        static_cast<std::size_t>(ds.features->cols()) != loaded.params.config.feature_dim) {
      throw DataError("checkpoint/dataset dimensionality mismatch: model expects " +
                      std::to_string(loaded.params.config.feature_dim) + " features");
    }
    features = &*ds.features;
  }

  std::ostringstream records;
  records << "task: " << a.task << "\n";
  std::string predictions;
  if (a.task == "classify") {
    const auto& gold = label_split(ds, a.split);
    if (gold.empty()) throw DataError("split '" + a.split + "' has no labels");
    std::vector<EntityId> ids;
    for (const auto& l : gold) ids.push_back(l.entity);
    const auto pred = classify_nodes(loaded.params, ids, features);
    records.precision(10);
    records << "split: " << a.split << "\n"
            << "count: " << gold.size() << "\n"
            << "accuracy: " << accuracy(pred, gold) << "\n";
    std::vector<UnaryFact> as_labels;
    for (const auto& [e, c] : pred) as_labels.push_back({c, e});
    predictions = format_labels(ds.vocab, as_labels);
  } else {
    const auto eval = load_edges_with_vocab(a.eval_edges, ds.vocab);
    FactFilter filter;
    for (const auto& f : a.filter_edges) filter.add(load_edges_with_vocab(f, ds.vocab));
    if (eval.empty()) throw DataError("no edges to rank in " + a.eval_edges);
    records << ranking_metrics(loaded.params, eval, &filter, features, a.threads).to_records();
  }
  out << records.str();
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "metrics.txt", records.str());
    if (!predictions.empty()) write_text(fs::path(a.out) / "predictions.tsv", predictions);
    write_run_config(a.out, "evaluate", resolve_options(cmd));
  }
  return kSuccess;
}

// --- baseline ----------------------------------------------------------------------

struct BaselineArgs {
  std::string data, method = "lp", split = "valid", hidden = "512,512", out;
  LabelPropagationConfig lp;
  MlpClassifierConfig mlp;
  std::string select = "on";
  std::uint64_t seed = 0;
};

void add_baseline(CLI::App& app, BaselineArgs& a) {
  auto* c = app.add_subcommand("baseline", "Run the label-propagation or feature-MLP baseline");
  c->add_option("--data", a.data, "Dataset directory")->required();
  c->add_option("--method", a.method, "Baseline")->check(CLI::IsMember({"lp", "mlp"}));
  c->add_option("--split", a.split, "Label split to score")
      ->check(CLI::IsMember({"train", "valid", "test"}));
  c->add_option("--max-iters", a.lp.max_iters, "Label-propagation iteration cap");
  c->add_option("--tolerance", a.lp.tolerance, "Label-propagation convergence tolerance");
  c->add_option("--hidden", a.hidden, "MLP hidden layer sizes");
  c->add_option("--epochs", a.mlp.epochs, "MLP epochs");
  c->add_option("--batch-size", a.mlp.batch_size, "MLP batch size");
  c->add_option("--lr", a.mlp.learning_rate, "MLP learning rate");
  c->add_option("--select-on-valid", a.select, "Keep the peak-validation MLP weights")
      ->check(CLI::IsMember({"on", "off"}));
  c->add_option("--seed", a.seed, "Random seed");
  c->add_option("--out", a.out, "Directory for metrics and predictions");
}

int cmd_baseline(BaselineArgs& a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_dir(a.data, err);
  const auto& gold = label_split(ds, a.split);
  if (gold.empty()) throw DataError("split '" + a.split + "' has no labels");
  std::map<EntityId, ClassId> pred;
  if (a.method == "lp") {
    pred = to_prediction_map(label_propagation(ds, a.lp));
  } else {
    if (!ds.features) throw UsageError("the MLP baseline needs features.txt");
    a.mlp.hidden = parse_sizes(a.hidden);
    const std::span<const UnaryFact> valid =
        a.select == "on" ? std::span<const UnaryFact>(ds.labels.valid) : std::span<const UnaryFact>();
    const auto clf = mlp_classifier_train(*ds.features, ds.labels.train, ds.vocab.num_classes(),
                                          a.mlp, a.seed, valid);
    pred = to_prediction_map(mlp_classifier_predict(clf, *ds.features));
  }
  std::ostringstream records;
  records.precision(10);
  records << "method: " << a.method << "\n"
          << "split: " << a.split << "\n"
          << "count: " << gold.size() << "\n"
          << "accuracy: " << accuracy(pred, gold) << "\n";
  out << records.str();
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    std::vector<UnaryFact> as_labels;
    for (const auto& [e, c] : pred) as_labels.push_back({c, e});
    write_text(fs::path(a.out) / "metrics.txt", records.str());
    write_text(fs::path(a.out) / "predictions.tsv", format_labels(ds.vocab, as_labels));
    write_run_config(a.out, "baseline", resolve_options(cmd));
  }
  return kSuccess;
}

// --- oracle ------------------------------------------------------------------------

struct OracleArgs {
  std::size_t entities = 4, relations = 2, classes = 2;
  std::uint64_t seed = 0;
  double p_true = 0.5, eps = 0.1;
  int norm = 2;
  std::string assignment, out;
};

void add_oracle(CLI::App& app, OracleArgs& a) {
  auto* c = app.add_subcommand(
      "oracle", "Construct and verify a configuration for a true/false fact assignment");
  c->add_option("--entities", a.entities, "Number of entities");
  c->add_option("--relations", a.relations, "Number of relations");
  c->add_option("--classes", a.classes, "Number of classes");
  c->add_option("--seed", a.seed, "Random seed");
  c->add_option("--p-true", a.p_true, "Probability that a random fact is true");
  c->add_option("--eps", a.eps, "Class-box padding");
  c->add_option("--norm", a.norm, "Distance norm order")->check(CLI::IsMember({1, 2}));
  c->add_option("--assignment", a.assignment,
                "Fact file: T|F<TAB>class<TAB>entity or T|F<TAB>head<TAB>relation<TAB>tail; "
                "facts not listed stay unassigned");
  c->add_option("--out", a.out, "Directory for the constructed configuration");
}

FactAssignment read_assignment(const fs::path& path, const OracleArgs& a) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  FactAssignment out;
  std::string line;
  std::size_t no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream is(line);
    std::string flag;
    std::vector<long> ids;
    long v;
    is >> flag;
    while (is >> v) ids.push_back(v);
    if (!is.eof()) fail("expected integer indices");
    if (flag != "T" && flag != "F") fail("first field must be T or F");
    auto& dest = flag == "T" ? out.true_facts : out.false_facts;
    auto in_range = [](long x, std::size_t n) { return x >= 0 && static_cast<std::size_t>(x) < n; };
    if (ids.size() == 2) {
      if (!in_range(ids[0], a.classes) || !in_range(ids[1], a.entities)) fail("index out of range");
      dest.push_back(UnaryFact{ClassId(ids[0]), EntityId(ids[1])});
    } else if (ids.size() == 3) {
      if (!in_range(ids[0], a.entities) || !in_range(ids[1], a.relations) ||
          !in_range(ids[2], a.entities)) {
        fail("index out of range");
      }
      dest.push_back(BinaryFact{RelationId(ids[1]), EntityId(ids[0]), EntityId(ids[2])});
    } else {
      fail("expected 2 (unary) or 3 (binary) indices");
    }
  }
  return out;
}

int cmd_oracle(const OracleArgs& a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  if (a.entities < 1) throw UsageError("--entities must be >= 1");
  if (!(a.p_true >= 0.0 && a.p_true <= 1.0)) throw UsageError("--p-true must lie in [0, 1]");
  FactAssignment assignment;
  if (a.assignment.empty()) {
    Rng rng(a.seed);
    assignment = random_assignment(a.entities, a.classes, a.relations, rng, a.p_true);
  } else {
    assignment = read_assignment(a.assignment, a);
  }
  const NormOrder norm = parse_norm(a.norm);
  const OracleResult r =
      run_expressiveness_oracle(assignment, a.entities, a.classes, a.relations, a.seed, a.eps, norm);
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    save_explicit_config(fs::path(a.out) / "config.json", r.extended);
    write_run_config(a.out, "oracle", resolve_options(cmd));
  }
  out << "facts: true=" << assignment.true_facts.size()
      << " false=" << assignment.false_facts.size() << " dim=" << r.extended.dim << "\n";
  out << r.all.summary() << "\n";
  if (!r.passed()) {
    err << "error: the constructed configuration does not separate the assignment\n";
    return kNumericFailure;
  }
  return kSuccess;
}

// --- validate ----------------------------------------------------------------------

struct ValidateArgs {
  std::string data;
};

void add_validate(CLI::App& app, ValidateArgs& a) {
  auto* c = app.add_subcommand("validate", "Load a dataset, check invariants and print stats");
  c->add_option("--data", a.data, "Dataset directory")->required();
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_dir(a.data, err);
  out << dataset_stats(ds) << validate(ds).to_records();
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app("Box embeddings for knowledge graphs with node features", "boxekg");
  app.require_subcommand(1, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.option_defaults()->always_capture_default();

  SynthArgs synth;
  DropArgs drop;
  TrainArgs train_args;
  EvalArgs eval;
  BaselineArgs baseline;
  OracleArgs oracle;
  ValidateArgs validate_args;
  add_synth(app, synth);
  add_drop(app, drop);
  add_train(app, train_args);
  add_evaluate(app, eval);
  add_baseline(app, baseline);
  add_oracle(app, oracle);
  add_validate(app, validate_args);
  // Repeatable options keep every value.
  for (auto* sub : app.get_subcommands({})) {
    for (auto* opt : sub->get_options()) {
      if (opt->get_single_name() == "rule" || opt->get_single_name() == "filter-edges") {
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
      }
    }
  }

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kSuccess : kUsageError;
    }
    const CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "synth") return cmd_synth(synth, *cmd, out);
    if (name == "drop-edges") return cmd_drop(drop, *cmd, out, err);
    if (name == "train") return cmd_train(train_args, *cmd, out, err);
    if (name == "evaluate") return cmd_evaluate(eval, *cmd, out, err);
    if (name == "baseline") return cmd_baseline(baseline, *cmd, out, err);
    if (name == "oracle") return cmd_oracle(oracle, *cmd, out, err);
    if (name == "validate") return cmd_validate(validate_args, out, err);
    err << "error: unknown command " << name << "\n";
    return kUsageError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const DimensionError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const FitFailure& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace boxekg::cli
