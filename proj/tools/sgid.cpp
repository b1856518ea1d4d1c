// sgid: command-line front end for the SGID detection pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <list>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "sgid/augmentation.hpp"
#include "sgid/corpus.hpp"
#include "sgid/error.hpp"
#include "sgid/lexicon.hpp"
#include "sgid/metrics.hpp"
#include "sgid/models.hpp"
#include "sgid/pipeline.hpp"
#include "sgid/preprocess.hpp"
#include "sgid/resources.hpp"
#include "sgid/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sgid::cli {
namespace {

json default_config() {
  json ratios = json::array();
  for (const Ratio& r : default_ratio_grid()) ratios.push_back(r.to_string());
  return json{
      {"input", json::array()},
      {"format", ""},
      {"out", ""},
      {"seed", 42},
      {"k", 10},
      {"jobs", 1},
      {"algorithm", "rf"},
      {"strategy", "none"},
      {"ratio", "0.5"},
      {"word_counts", false},
      {"class_weight", 1.0},
      {"threshold", nullptr},
      {"idf", "plain"},
      {"skip", json::array()},
      {"neutral_token", "emoji"},
      {"tree_max_depth", 0},
      {"tree_min_leaf", 1},
      {"lr_l2", 1.0},
      {"lr_max_iter", 500},
      {"lr_tol", 1e-6},
      {"rf_trees", 100},
      {"rf_feature_fraction", 0.0},
      {"rf_bootstrap", true},
      {"svm_c", 1.0},
      {"svm_epochs", 50},
      {"lexicon", ""},
      {"groups", ""},
      {"scores", ""},
      {"size_b", 0},
      {"size_c", 0},
      {"size_d", 0},
      {"high_threshold", 0.2},
      {"min_df", 100},
      {"top", 0},
      {"stopwords", ""},
      {"dedup", true},
      {"exclude_authors", ""},
      {"language_filter", true},
      {"language_threshold", 0.5},
      {"grid_algorithms", {"dt", "lr", "rf", "svm"}},
      {"grid_strategies", {"random", "generate", "mixed"}},
      {"grid_ratios", ratios},
      {"grid_word_counts", {false, true}},
      {"grid_class_weights", {1.0}},
      {"model", ""},
  };
}

enum class Kind { kString, kUInt, kDouble, kTrueFlag, kFalseFlag, kList, kBoolList, kDoubleList };

struct Binding {
  std::string key;
  Kind kind;
  CLI::Option* option = nullptr;
  std::vector<std::string> values;
};

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const std::string& r : raw) {
    std::string cur;
    for (char c : r) {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": '" + s + "' is not a number");
  }
}

json binding_value(const Binding& b) {
  const std::string& first = b.values.empty() ? std::string() : b.values.front();
  switch (b.kind) {
    case Kind::kString: return first;
    case Kind::kUInt: {
      try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(first, &used);
        if (used != first.size() || first.starts_with('-')) throw std::invalid_argument(first);
        return v;
      } catch (const std::exception&) {
        throw UsageError("--" + b.key + ": '" + first + "' is not a non-negative integer");
      }
    }
    case Kind::kDouble: return parse_double(first, b.key);
    case Kind::kTrueFlag: return true;
    case Kind::kFalseFlag: return false;
    case Kind::kList: return split_list(b.values);
    case Kind::kBoolList: {
      json a = json::array();
      for (const std::string& s : split_list(b.values)) {
        if (s == "1" || s == "true") a.push_back(true);
        else if (s == "0" || s == "false") a.push_back(false);
        else throw UsageError("--" + b.key + ": '" + s + "' is not 0/1");
      }
      return a;
    }
    case Kind::kDoubleList: {
      json a = json::array();
      for (const std::string& s : split_list(b.values)) a.push_back(parse_double(s, b.key));
      return a;
    }
  }
  return nullptr;
}

// Config-file key that a flag sets, when it differs from the flag name.
std::string config_key(const Binding& b) {
  std::string k = b.key;
  if (b.kind == Kind::kFalseFlag && k.starts_with("no-")) k = k.substr(3);
  for (char& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

class Command {
 public:
  Command(CLI::App& app, std::string name, std::string description)
      : name_(std::move(name)), app_(app.add_subcommand(name_, description)) {
    app_->add_option("--config", config_file_, "JSON config (or a previous run's manifest)");
  }

  Command& opt(const std::string& key, Kind kind, const std::string& help) {
    bindings_.push_back({key, kind, nullptr, {}});
    Binding& b = bindings_.back();
    if (kind == Kind::kTrueFlag || kind == Kind::kFalseFlag) {
      b.option = app_->add_flag("--" + key, help);
    } else if (kind == Kind::kList || kind == Kind::kBoolList || kind == Kind::kDoubleList) {
      b.option = app_->add_option("--" + key, b.values, help)->delimiter(',');
    } else {
      b.option = app_->add_option("--" + key, b.values, help)->expected(1);
    }
    return *this;
  }

  CLI::App* app() const { return app_; }
  const std::string& name() const { return name_; }
  bool parsed() const { return app_->parsed(); }

  /// Defaults, then the config file, then flags.
  json resolve(std::vector<std::string>* overrides, std::string* config_path) const {
    json cfg = default_config();
    if (!config_file_.empty()) {
      std::ifstream in(config_file_, std::ios::binary);
      if (!in) throw UsageError("cannot read config file " + config_file_);
      json file;
      try {
        file = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError("config file " + config_file_ + " is not valid JSON: " + e.what());
      }
      if (file.is_object() && file.contains("command") && file.contains("config")) {
        file = file.at("config");
      }
      if (!file.is_object()) throw UsageError("config file must hold a JSON object");
      for (auto& [key, value] : file.items()) {
        if (!cfg.contains(key)) throw UsageError("unknown config key '" + key + "'");
        cfg[key] = value;
      }
    }
    for (const Binding& b : bindings_) {
      if (b.option->count() == 0) continue;
      std::string key = config_key(b);
      cfg[key] = binding_value(b);
      overrides->push_back("--" + b.key);
    }
    *config_path = config_file_;
    return cfg;
  }

 private:
  std::string name_;
  CLI::App* app_;
  std::string config_file_;
  std::list<Binding> bindings_;
};

// Shared option groups.
void corpus_opts(Command& c) {
  c.opt("input", Kind::kList, "input corpus file(s)").opt("format", Kind::kString,
                                                          "jsonl or csv (default: by extension)");
}
void out_opt(Command& c) { c.opt("out", Kind::kString, "output directory"); }
void preprocess_opts(Command& c) {
  c.opt("skip", Kind::kList,
        "preprocessing steps to skip: urls,contractions,symbols,identifiers,repetition,emoji,"
        "lowercase")
      .opt("neutral-token", Kind::kString, "replacement for emoji")
      .opt("lexicon", Kind::kString, "lexicon file (default: bundled)");
}
void model_opts(Command& c) {
  c.opt("algorithm", Kind::kString, "dt, lr, rf or svm")
      .opt("strategy", Kind::kString, "none, random, generate or mixed")
      .opt("ratio", Kind::kString, "target SGID:non-SGID ratio in (0,1]")
      .opt("word-counts", Kind::kTrueFlag, "append the 7 keyword-count features")
      .opt("class-weight", Kind::kDouble, "weight of SGID samples (>= 1)")
      .opt("threshold", Kind::kDouble, "decision threshold")
      .opt("idf", Kind::kString, "plain (ln N/df) or smooth")
      .opt("seed", Kind::kUInt, "random seed (default 42)")
      .opt("groups", Kind::kString, "equivalence-group file (default: bundled)")
      .opt("tree-max-depth", Kind::kUInt, "0 = unlimited")
      .opt("tree-min-leaf", Kind::kUInt, "minimum samples per leaf")
      .opt("lr-l2", Kind::kDouble, "LR L2 strength")
      .opt("lr-max-iter", Kind::kUInt, "LR iteration budget")
      .opt("lr-tol", Kind::kDouble, "LR gradient-norm tolerance")
      .opt("rf-trees", Kind::kUInt, "RF tree count")
      .opt("rf-feature-fraction", Kind::kDouble, "RF features per split (0 = sqrt)")
      .opt("no-rf-bootstrap", Kind::kFalseFlag, "disable RF bootstrap sampling")
      .opt("svm-c", Kind::kDouble, "SVM regularization C")
      .opt("svm-epochs", Kind::kUInt, "SVM epochs");
  preprocess_opts(c);
}

// Run context shared by command handlers.
struct Run {
  std::string command;
  json cfg;
  Manifest manifest;
  fs::path out;

  std::string str(const char* key) const { return cfg.at(key).get<std::string>(); }
  std::uint64_t uint(const char* key) const {
    const json& v = cfg.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw UsageError(std::string("config key '") + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  double num(const char* key) const {
    const json& v = cfg.at(key);
    if (!v.is_number()) throw UsageError(std::string("config key '") + key + "' must be a number");
    return v.get<double>();
  }
  bool flag(const char* key) const { return cfg.at(key).get<bool>(); }

  fs::path require_out() {
    std::string o = str("out");
    if (o.empty()) throw UsageError(command + ": --out is required");
    out = o;
    fs::create_directories(out);
    return out;
  }

  fs::path output(const std::string& name) {
    manifest.outputs.push_back(out / name);
    return out / name;
  }

  void finish() {
    manifest.command = command;
    manifest.config = cfg;
    manifest.write(out);
  }
};

void write_text(const fs::path& path, const std::string& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << s;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<std::string> inputs(Run& run) {
  auto list = run.cfg.at("input").get<std::vector<std::string>>();
  if (list.empty()) throw UsageError(run.command + ": --input is required");
  return list;
}

Corpus load_corpus(Run& run) {
  Corpus all;
  for (const std::string& path : inputs(run)) {
    std::string fmt = run.str("format");
    CorpusFormat f = fmt.empty()     ? format_from_path(path)
                     : fmt == "csv"   ? CorpusFormat::kCsv
                     : fmt == "jsonl" ? CorpusFormat::kJsonl
                                      : throw UsageError("unknown format '" + fmt + "'");
    if (!fs::exists(path)) throw DataError("input file not found: " + path);
    Corpus c = ingest(path, f);
    run.manifest.inputs.push_back(path);
    for (auto& item : c.items) all.items.push_back(std::move(item));
    for (auto& p : c.provenance) all.provenance.push_back(std::move(p));
  }
  return all;
}

PreprocessConfig preprocess_config(const Run& run) {
  PreprocessConfig c;
  for (const std::string& step : run.cfg.at("skip").get<std::vector<std::string>>()) {
    if (step == "urls") c.remove_urls = false;
    else if (step == "contractions") c.expand_contractions = false;
    else if (step == "symbols") c.remove_symbols = false;
    else if (step == "identifiers") c.split_identifiers = false;
    else if (step == "repetition") c.eliminate_repetition = false;
    else if (step == "emoji") c.replace_emoji = false;
    else if (step == "lowercase") c.lowercase = false;
    else throw UsageError("unknown preprocessing step '" + step + "'");
  }
  c.neutral_token = run.str("neutral_token");
  return c;
}

PreprocessTables load_tables(Run& run) {
  fs::path lex = run.str("lexicon").empty() ? data_file("lexicon.txt") : fs::path(run.str("lexicon"));
  std::vector<fs::path> files = {data_file("contractions.tsv"), data_file("adversarial.tsv"),
                                 data_file("common_words.txt"), lex};
  for (const auto& f : files) run.manifest.data_files.push_back(f);
  return PreprocessTables::load(files[0], files[1], files[2], files[3]);
}

Resources load_resources(Run& run) {
  PreprocessTables tables = load_tables(run);
  fs::path groups =
      run.str("groups").empty() ? data_file("equivalence_groups.txt") : fs::path(run.str("groups"));
  run.manifest.data_files.push_back(groups);
  return Resources{std::move(tables), EquivalenceGroups::load(groups)};
}

PipelineConfig pipeline_config(const Run& run) {
  PipelineConfig p;
  p.preprocess = preprocess_config(run);
  p.tfidf.mode = idf_mode_from_string(run.str("idf"));
  p.word_counts = run.flag("word_counts");
  TrainConfig& t = p.train;
  t.algorithm = algorithm_from_string(run.str("algorithm"));
  t.class_weight = run.num("class_weight");
  t.seed = run.uint("seed");
  t.tree.max_depth = run.uint("tree_max_depth");
  t.tree.min_samples_leaf = run.uint("tree_min_leaf");
  t.logistic.l2 = run.num("lr_l2");
  t.logistic.max_iterations = run.uint("lr_max_iter");
  t.logistic.tolerance = run.num("lr_tol");
  t.forest.n_trees = run.uint("rf_trees");
  t.forest.feature_fraction = run.num("rf_feature_fraction");
  t.forest.bootstrap = run.flag("rf_bootstrap");
  t.svm.c = run.num("svm_c");
  t.svm.epochs = run.uint("svm_epochs");
  if (t.class_weight < 1.0) throw UsageError("--class-weight must be >= 1");
  std::string strategy = run.str("strategy");
  if (strategy != "none") p.strategy = strategy_from_string(strategy);
  p.ratio = Ratio::parse(run.str("ratio"));
  if (!run.cfg.at("threshold").is_null()) p.threshold = run.num("threshold");
  if (p.threshold && t.algorithm != Algorithm::kLinearSvm &&
      !(*p.threshold >= 0.0 && *p.threshold <= 1.0)) {
    throw UsageError("--threshold must lie in [0,1] for probabilistic models");
  }
  return p;
}

void print_report(std::ostream& os, const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "P0=%.4f R0=%.4f F1_0=%.4f P1=%.4f R1=%.4f F1_1=%.4f A=%.4f MCC=%.4f\n", r.p0,
                r.r0, r.f1_0, r.p1, r.r1, r.f1_1, r.accuracy, r.mcc);
  os << buf;
}

// --- commands ---------------------------------------------------------------

void cmd_ingest(Run& run) {
  run.require_out();
  Corpus c = load_corpus(run);
  const std::size_t read = c.size();
  if (run.flag("dedup")) c = deduplicate(c);
  const std::size_t after_dedup = c.size();
  if (!run.str("exclude_authors").empty()) {
    run.manifest.inputs.push_back(run.str("exclude_authors"));
    c = exclude_authors(c, load_author_list(run.str("exclude_authors")));
  }
  const std::size_t after_authors = c.size();
  if (run.flag("language_filter")) {
    fs::path words = data_file("common_words.txt");
    run.manifest.data_files.push_back(words);
    auto scorer = CommonWordLanguageScorer::from_file(words);
    c = filter_language(c, [&](const std::string& t) { return scorer(t); },
                        run.num("language_threshold"));
  }
  write_jsonl(c, run.output("corpus.jsonl"));
  write_json(run.output("ingest.json"), json{{"read", read},
                                             {"after_dedup", after_dedup},
                                             {"after_author_filter", after_authors},
                                             {"kept", c.size()}});
  std::cerr << "ingest: read " << read << ", kept " << c.size() << "\n";
  run.finish();
}

int cmd_preprocess(Run& run, const std::string& text) {
  PreprocessConfig pc = preprocess_config(run);
  if (!text.empty()) {
    PreprocessTables tables = load_tables(run);
    std::cout << preprocess(text, pc, tables) << "\n";
    return 0;
  }
  run.require_out();
  PreprocessTables tables = load_tables(run);
  Corpus c = load_corpus(run);
  for (LabeledComment& item : c.items) item.comment.text = preprocess(item.comment.text, pc, tables);
  write_jsonl(c, run.output("preprocessed.jsonl"));
  run.finish();
  return 0;
}

void cmd_sample(Run& run) {
  run.require_out();
  Corpus c = load_corpus(run);
  PreprocessTables tables = load_tables(run);
  if (run.str("scores").empty()) throw UsageError("sample: --scores is required");
  ScorerSpec spec = ScorerSpec::parse(run.str("scores"));
  if (spec.kind == ScorerSpec::Kind::kFile) run.manifest.inputs.push_back(spec.target);
  ScoreMap scores = external_scores(spec, c);
  StratifiedSampleOptions opts;
  opts.high_threshold = run.num("high_threshold");
  opts.size_b = run.uint("size_b");
  opts.size_c = run.uint("size_c");
  opts.size_d = run.uint("size_d");
  opts.seed = run.uint("seed");
  StratifiedSample s = stratified_sample(c, scores, tables.lexicon, opts);
  Corpus picked;
  json strata;
  for (auto [name, list] : {std::pair{"A", &s.a}, {"B", &s.b}, {"C", &s.c}, {"D", &s.d}}) {
    json ids = json::array();
    for (std::size_t i : *list) {
      ids.push_back(c.items[i].comment.id);
      picked.items.push_back(c.items[i]);
    }
    strata[name] = ids;
  }
  write_jsonl(picked, run.output("sample.jsonl"));
  write_json(run.output("strata.json"), strata);
  std::cerr << "sample: A=" << s.a.size() << " B=" << s.b.size() << " C=" << s.c.size()
            << " D=" << s.d.size() << "\n";
  run.finish();
}

void cmd_expand(Run& run) {
  run.require_out();
  Corpus c = load_corpus(run);
  PreprocessTables tables = load_tables(run);
  PreprocessConfig pc = preprocess_config(run);
  std::vector<std::string> docs;
  for (const auto& item : c.items) docs.push_back(preprocess(item.comment.text, pc, tables));
  fs::path sw = run.str("stopwords").empty() ? data_file("stopwords.txt") : fs::path(run.str("stopwords"));
  run.manifest.data_files.push_back(sw);
  auto ranked = expand_keywords(docs, tables.lexicon, load_word_list(sw), run.uint("min_df"));
  std::size_t top = run.uint("top");
  if (top > 0 && ranked.size() > top) ranked.resize(top);
  std::string tsv;
  for (const auto& [word, df] : ranked) tsv += word + "\t" + std::to_string(df) + "\n";
  write_text(run.output("candidates.tsv"), tsv);
  std::cerr << "expand-keywords: " << ranked.size() << " candidates\n";
  run.finish();
}

void cmd_augment(Run& run) {
  run.require_out();
  Corpus c = load_corpus(run);
  Resources res = load_resources(run);
  std::string strategy = run.str("strategy");
  if (strategy == "none") throw UsageError("augment: --strategy is required");
  std::vector<TrainingSample> samples;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c.items[i].label) throw DataError("item " + c.items[i].comment.id + " has no label");
    samples.push_back({c.items[i].comment.text, *c.items[i].label, Provenance::kOriginal, i});
  }
  AugmentationResult r = oversample(samples, strategy_from_string(strategy),
                                    Ratio::parse(run.str("ratio")), res.groups, run.uint("seed"));
  std::ofstream out(run.output("augmented.jsonl"), std::ios::binary);
  std::size_t added = 0;
  for (const TrainingSample& s : r.samples) {
    const std::string& src = c.items[s.source].comment.id;
    std::string id = s.provenance == Provenance::kOriginal ? src
                                                           : src + "#aug" + std::to_string(++added);
    json rec{{"id", id},
             {"text", s.text},
             {"label", s.label},
             {"provenance", std::string(to_string(s.provenance))},
             {"source_id", src}};
    out << rec.dump() << "\n";
  }
  out.close();
  write_json(run.output("augmentation.json"), r.plan.to_json());
  for (const std::string& w : r.plan.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "augment: added " << r.plan.n_add << " (x=" << r.plan.x << ", y=" << r.plan.y
            << ")\n";
  run.finish();
}

void cmd_train(Run& run) {
  run.require_out();
  PipelineConfig pc = pipeline_config(run);
  Resources res = load_resources(run);
  Corpus c = load_corpus(run);
  PreparedCorpus data = prepare(c, pc.preprocess, res.tables);
  PipelineModel model = fit_pipeline(data.texts, data.labels, pc, res, pc.train.seed);
  model.save(run.output("model.json"));
  for (const std::string& w : model.augmentation.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "train: " << data.size() << " items, " << model.classifier.dims()
            << " features, " << to_string(pc.train.algorithm) << "\n";
  run.finish();
}

PipelineModel load_pipeline(Run& run) {
  std::string m = run.str("model");
  if (m.empty()) throw UsageError(run.command + ": --model is required");
  run.manifest.inputs.push_back(m);
  return PipelineModel::load(m);
}

void cmd_evaluate(Run& run) {
  run.require_out();
  if (!run.str("model").empty()) {
    PipelineModel model = load_pipeline(run);
    Resources res = load_resources(run);
    Corpus c = load_corpus(run);
    PreparedCorpus data = prepare(c, model.config.preprocess, res.tables);
    std::vector<int> preds;
    for (const std::string& t : data.texts) preds.push_back(model.predict(t, res.lexicon()));
    ConfusionMatrix cm = confusion(preds, data.labels);
    MetricsReport r = metrics(cm);
    write_json(run.output("metrics.json"), json{{"confusion", cm.to_json()}, {"metrics", r.to_json()}});
    std::string csv = "set,TP,FP,FN,TN";
    for (auto n : MetricsReport::kNames) csv += "," + std::string(n);
    csv += "\nall," + std::to_string(cm.tp) + "," + std::to_string(cm.fp) + "," +
           std::to_string(cm.fn) + "," + std::to_string(cm.tn);
    for (auto n : MetricsReport::kNames) {
      char buf[32];
      std::snprintf(buf, sizeof buf, ",%.6f", r.get(n));
      csv += buf;
    }
    write_text(run.output("metrics.csv"), csv + "\n");
    std::cout << "TP=" << cm.tp << " FP=" << cm.fp << " FN=" << cm.fn << " TN=" << cm.tn << "\n";
    print_report(std::cout, r);
    run.finish();
    return;
  }
  PipelineConfig pc = pipeline_config(run);
  Resources res = load_resources(run);
  Corpus c = load_corpus(run);
  PreparedCorpus data = prepare(c, pc.preprocess, res.tables);
  FoldPlan plan = make_folds(data.size(), run.uint("k"), run.uint("seed"));
  CvResult cv = cross_validate(data, pc, plan, res);
  write_json(run.output("cv.json"), cv.to_json());
  write_text(run.output("metrics.csv"), metrics_table_csv(cv));
  for (const std::string& w : cv.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << cv.descriptor << " k=" << cv.k << " mean: ";
  print_report(std::cout, cv.mean);
  std::cout << "pooled TP=" << cv.pooled.tp << " FP=" << cv.pooled.fp << " FN=" << cv.pooled.fn
            << " TN=" << cv.pooled.tn << "\n";
  run.finish();
}

void cmd_sweep(Run& run) {
  run.require_out();
  SweepResult s;
  if (!run.str("model").empty()) {
    PipelineModel model = load_pipeline(run);
    Resources res = load_resources(run);
    PreparedCorpus data = prepare(load_corpus(run), model.config.preprocess, res.tables);
    std::vector<double> scores;
    for (const std::string& t : data.texts) scores.push_back(model.score(t, res.lexicon()));
    s = threshold_sweep(scores, data.labels, model.classifier.probabilistic());
  } else {
    PipelineConfig pc = pipeline_config(run);
    Resources res = load_resources(run);
    PreparedCorpus data = prepare(load_corpus(run), pc.preprocess, res.tables);
    if (pc.train.algorithm == Algorithm::kLinearSvm) {
      throw UsageError("sweep: SVM margins are not probabilities; sweep applies to dt, lr, rf");
    }
    FoldPlan plan = make_folds(data.size(), run.uint("k"), run.uint("seed"));
    s = sweep_cv(cross_validate(data, pc, plan, res));
  }
  write_json(run.output("sweep.json"), s.to_json());
  std::printf("best threshold %.2f: ", s.threshold);
  std::fflush(stdout);
  print_report(std::cout, s.report);
  run.finish();
}

void cmd_grid(Run& run) {
  run.require_out();
  PipelineConfig base = pipeline_config(run);
  Resources res = load_resources(run);
  PreparedCorpus data = prepare(load_corpus(run), base.preprocess, res.tables);
  GridSpec g;
  for (const auto& a : run.cfg.at("grid_algorithms").get<std::vector<std::string>>()) {
    g.algorithms.push_back(algorithm_from_string(a));
  }
  for (const auto& s : run.cfg.at("grid_strategies").get<std::vector<std::string>>()) {
    g.strategies.push_back(strategy_from_string(s));
  }
  for (const auto& r : run.cfg.at("grid_ratios").get<std::vector<std::string>>()) {
    g.ratios.push_back(Ratio::parse(r));
  }
  g.word_counts = run.cfg.at("grid_word_counts").get<std::vector<bool>>();
  g.class_weights = run.cfg.at("grid_class_weights").get<std::vector<double>>();
  for (double w : g.class_weights) {
    if (w < 1.0) throw UsageError("grid class weights must be >= 1");
  }
  if (g.cells() == 0) throw UsageError("grid: every grid dimension needs at least one value");
  FoldPlan plan = make_folds(data.size(), run.uint("k"), run.uint("seed"));
  auto cells = grid_search(data, base, g, plan, res, run.uint("jobs"));
  write_text(run.output("grid.csv"), grid_table_csv(cells));
  json all = json::array();
  for (const GridCell& c : cells) {
    json e = c.result.to_json();
    e["rank"] = c.rank;
    all.push_back(e);
  }
  write_json(run.output("grid.json"), all);
  std::cout << "grid: " << cells.size() << " cells; best " << cells.front().result.descriptor
            << ": ";
  print_report(std::cout, cells.front().result.mean);
  run.finish();
}

void cmd_predict(Run& run) {
  PipelineModel model = load_pipeline(run);
  Resources res = load_resources(run);
  auto list = run.cfg.at("input").get<std::vector<std::string>>();
  Corpus c;
  if (list.empty() || (list.size() == 1 && list[0] == "-")) {
    c = ingest_jsonl_stream(std::cin, "<stdin>");
  } else {
    c = load_corpus(run);
  }
  std::string lines;
  const double threshold = model.config.effective_threshold();
  for (const LabeledComment& item : c.items) {
    std::string text = preprocess(item.comment.text, model.config.preprocess, res.tables);
    double s = model.score(text, res.lexicon());
    char buf[64];
    std::snprintf(buf, sizeof buf, "\t%.10g\t%d\n", s, s >= threshold ? 1 : 0);
    lines += item.comment.id + buf;
  }
  std::cout << lines;
  std::cout.flush();
  if (!run.str("out").empty()) {
    run.require_out();
    write_text(run.output("predictions.tsv"), lines);
    run.finish();
  }
}

void cmd_agreement(Run& run) {
  run.require_out();
  auto files = inputs(run);
  if (files.size() != 1) throw UsageError("agreement: exactly one ratings file expected");
  std::ifstream in(files[0], std::ios::binary);
  if (!in) throw DataError("cannot read " + files[0]);
  run.manifest.inputs.push_back(files[0]);
  std::vector<std::string> raters;
  RatingMatrix m = read_ratings_csv(in, &raters);
  json out{{"raters", raters}, {"items", m.empty() ? 0 : m.front().size()}};
  out["alpha"] = krippendorff_alpha(m);
  if (m.size() == 2) {
    std::map<std::string, int> codes;
    std::vector<int> a, b;
    for (std::size_t i = 0; i < m[0].size(); ++i) {
      if (!m[0][i] || !m[1][i]) continue;
      a.push_back(codes.emplace(*m[0][i], static_cast<int>(codes.size())).first->second);
      b.push_back(codes.emplace(*m[1][i], static_cast<int>(codes.size())).first->second);
    }
    if (!a.empty()) {
      KappaResult k = cohens_kappa(a, b);
      out["kappa"] = {{"kappa", k.kappa}, {"po", k.po}, {"pe", k.pe}, {"items", a.size()}};
      std::printf("kappa=%.4f (po=%.4f pe=%.4f)\n", k.kappa, k.po, k.pe);
    }
  }
  std::printf("alpha=%.4f\n", out["alpha"].get<double>());
  write_json(run.output("agreement.json"), out);
  run.finish();
}

void cmd_error_report(Run& run) {
  run.require_out();
  PipelineModel model = load_pipeline(run);
  Resources res = load_resources(run);
  PreparedCorpus data = prepare(load_corpus(run), model.config.preprocess, res.tables);
  ErrorReport r = error_report(model, data, res.lexicon());
  write_json(run.output("errors.json"), r.to_json());
  std::string text = r.to_text();
  write_text(run.output("errors.txt"), text);
  std::cout << text;
  run.finish();
}

int run_main(int argc, char** argv) {
  CLI::App app{"SGID detection pipeline: corpus preparation, classical classifiers, evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::vector<std::unique_ptr<Command>> cmds;
  auto add = [&](const char* name, const char* desc) -> Command& {
    cmds.push_back(std::make_unique<Command>(app, name, desc));
    return *cmds.back();
  };

  Command& ingest_c = add("ingest", "read, deduplicate and language-filter raw comments");
  corpus_opts(ingest_c);
  out_opt(ingest_c);
  ingest_c.opt("no-dedup", Kind::kFalseFlag, "keep duplicate (author, text, time) records")
      .opt("exclude-authors", Kind::kString, "file of author names to drop")
      .opt("no-language-filter", Kind::kFalseFlag, "skip the English filter")
      .opt("language-threshold", Kind::kDouble, "minimum English score (default 0.5)");

  std::string text;
  Command& pre_c = add("preprocess", "normalize comment texts");
  corpus_opts(pre_c);
  out_opt(pre_c);
  preprocess_opts(pre_c);
  pre_c.app()->add_option("--text", text, "normalize one string and print it");

  Command& sample_c = add("sample", "stratified sampling by scorer probability and keywords");
  corpus_opts(sample_c);
  out_opt(sample_c);
  sample_c.opt("scores", Kind::kString, "file:PATH (TSV id<TAB>p) or cmd:COMMAND")
      .opt("high-threshold", Kind::kDouble, "probability cut between A and B (default 0.2)")
      .opt("size-b", Kind::kUInt, "stratum B size")
      .opt("size-c", Kind::kUInt, "stratum C size")
      .opt("size-d", Kind::kUInt, "stratum D size")
      .opt("seed", Kind::kUInt, "random seed")
      .opt("lexicon", Kind::kString, "lexicon file");

  Command& expand_c = add("expand-keywords", "rank frequent non-lexicon words");
  corpus_opts(expand_c);
  out_opt(expand_c);
  preprocess_opts(expand_c);
  expand_c.opt("min-df", Kind::kUInt, "minimum document frequency (default 100)")
      .opt("top", Kind::kUInt, "keep the N best candidates (0 = all)")
      .opt("stopwords", Kind::kString, "stop-word list (default: bundled)");

  Command& aug_c = add("augment", "oversample the SGID class of a labeled set");
  corpus_opts(aug_c);
  out_opt(aug_c);
  aug_c.opt("strategy", Kind::kString, "random, generate or mixed")
      .opt("ratio", Kind::kString, "target ratio in (0,1]")
      .opt("seed", Kind::kUInt, "random seed")
      .opt("groups", Kind::kString, "equivalence-group file");

  Command& train_c = add("train", "train a model on a labeled corpus");
  corpus_opts(train_c);
  out_opt(train_c);
  model_opts(train_c);

  Command& eval_c = add("evaluate", "k-fold cross-validation, or score a trained --model");
  corpus_opts(eval_c);
  out_opt(eval_c);
  model_opts(eval_c);
  eval_c.opt("k", Kind::kUInt, "folds (default 10)").opt("model", Kind::kString, "trained model");

  Command& sweep_c = add("sweep", "decision-threshold sweep maximizing MCC");
  corpus_opts(sweep_c);
  out_opt(sweep_c);
  model_opts(sweep_c);
  sweep_c.opt("k", Kind::kUInt, "folds (default 10)").opt("model", Kind::kString, "trained model");

  Command& grid_c = add("grid", "cross-validated grid over strategy, ratio, word counts, weight");
  corpus_opts(grid_c);
  out_opt(grid_c);
  model_opts(grid_c);
  grid_c.opt("k", Kind::kUInt, "folds (default 10)")
      .opt("jobs", Kind::kUInt, "worker threads")
      .opt("grid-algorithms", Kind::kList, "algorithms (default dt,lr,rf,svm)")
      .opt("grid-strategies", Kind::kList, "strategies (default random,generate,mixed)")
      .opt("grid-ratios", Kind::kList, "ratios (default the nine-value grid)")
      .opt("grid-word-counts", Kind::kBoolList, "word-count settings (default 0,1)")
      .opt("grid-class-weights", Kind::kDoubleList, "class weights (default 1)");

  Command& pred_c = add("predict", "score comments: id<TAB>score<TAB>label on stdout");
  corpus_opts(pred_c);
  pred_c.opt("model", Kind::kString, "trained model").opt("out", Kind::kString,
                                                          "also write predictions.tsv here");

  Command& agree_c = add("agreement", "Cohen's kappa and Krippendorff's alpha of a ratings CSV");
  corpus_opts(agree_c);
  out_opt(agree_c);

  Command& err_c = add("error-report", "false positives/negatives and per-category misses");
  corpus_opts(err_c);
  out_opt(err_c);
  err_c.opt("model", Kind::kString, "trained model").opt("lexicon", Kind::kString, "lexicon file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& c : cmds) {
    if (!c->parsed()) continue;
    Run run;
    run.command = c->name();
    std::vector<std::string> overrides;
    std::string config_path;
    run.cfg = c->resolve(&overrides, &config_path);
    run.manifest.overrides = overrides;
    run.manifest.config_file = config_path;
    if (run.command == "ingest") cmd_ingest(run);
    else if (run.command == "preprocess") return cmd_preprocess(run, text);
    else if (run.command == "sample") cmd_sample(run);
    else if (run.command == "expand-keywords") cmd_expand(run);
    else if (run.command == "augment") cmd_augment(run);
    else if (run.command == "train") cmd_train(run);
    else if (run.command == "evaluate") cmd_evaluate(run);
    else if (run.command == "sweep") cmd_sweep(run);
    else if (run.command == "grid") cmd_grid(run);
    else if (run.command == "predict") cmd_predict(run);
    else if (run.command == "agreement") cmd_agreement(run);
    else if (run.command == "error-report") cmd_error_report(run);
    return 0;
  }
  return 1;
}

}  // namespace
}  // namespace sgid::cli

int main(int argc, char** argv) {
  try {
    return sgid::cli::run_main(argc, argv);
  } catch (const sgid::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const sgid::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "usage error: bad config value: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
