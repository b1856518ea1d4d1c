#include "sgid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sgid/csv.hpp"
#include "sgid/error.hpp"
#include "sgid/resources.hpp"
#include "sgid/rng.hpp"

namespace sgid {

using nlohmann::json;

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

json to_json(const PreprocessConfig& c) {
  return json{{"remove_urls", c.remove_urls},
              {"expand_contractions", c.expand_contractions},
              {"remove_symbols", c.remove_symbols},
              {"split_identifiers", c.split_identifiers},
              {"eliminate_repetition", c.eliminate_repetition},
              {"replace_emoji", c.replace_emoji},
              {"lowercase", c.lowercase},
              {"neutral_token", c.neutral_token}};
}

PreprocessConfig preprocess_config_from_json(const json& j) {
  PreprocessConfig c;
  c.remove_urls = j.at("remove_urls").get<bool>();
  c.expand_contractions = j.at("expand_contractions").get<bool>();
  c.remove_symbols = j.at("remove_symbols").get<bool>();
  c.split_identifiers = j.at("split_identifiers").get<bool>();
  c.eliminate_repetition = j.at("eliminate_repetition").get<bool>();
  c.replace_emoji = j.at("replace_emoji").get<bool>();
  c.lowercase = j.at("lowercase").get<bool>();
  c.neutral_token = j.at("neutral_token").get<std::string>();
  return c;
}

double PipelineConfig::effective_threshold() const {
  if (threshold) return *threshold;
  return train.algorithm == Algorithm::kLinearSvm ? 0.0 : 0.5;
}

std::string PipelineConfig::descriptor() const {
  std::string s(to_string(train.algorithm));
  s += "|";
  s += strategy ? std::string(to_string(*strategy)) : "none";
  s += "|";
  s += strategy ? ratio.to_string() : "-";
  s += word_counts ? "|wc=1" : "|wc=0";
  s += "|cw=" + format_number(train.class_weight);
  return s;
}

json PipelineConfig::to_json() const {
  json j{{"preprocess", sgid::to_json(preprocess)},
         {"tfidf", {{"idf", std::string(to_string(tfidf.mode))}, {"min_doc_freq", tfidf.min_doc_freq}}},
         {"word_counts", word_counts},
         {"train", sgid::to_json(train)},
         {"strategy", strategy ? json(std::string(to_string(*strategy))) : json(nullptr)},
         {"ratio", ratio.to_string()},
         {"threshold", threshold ? json(*threshold) : json(nullptr)}};
  return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  c.preprocess = preprocess_config_from_json(j.at("preprocess"));
  c.tfidf.mode = idf_mode_from_string(j.at("tfidf").at("idf").get<std::string>());
  c.tfidf.min_doc_freq = j.at("tfidf").at("min_doc_freq").get<std::size_t>();
  c.word_counts = j.at("word_counts").get<bool>();
  c.train = train_config_from_json(j.at("train"));
  if (!j.at("strategy").is_null()) {
    c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  }
  c.ratio = Ratio::parse(j.at("ratio").get<std::string>());
  if (!j.at("threshold").is_null()) c.threshold = j.at("threshold").get<double>();
  return c;
}

Resources Resources::load_default() {
  return Resources{PreprocessTables::load_default(),
                   EquivalenceGroups::load(data_file("equivalence_groups.txt"))};
}

PreparedCorpus prepare(const Corpus& corpus, const PreprocessConfig& config,
                       const PreprocessTables& tables) {
  PreparedCorpus p;
  for (const LabeledComment& item : corpus.items) {
    if (!item.label) throw DataError("item " + item.comment.id + " has no label");
    p.ids.push_back(item.comment.id);
    p.raw.push_back(item.comment.text);
    p.texts.push_back(preprocess(item.comment.text, config, tables));
    p.labels.push_back(*item.label);
    p.categories.push_back(item.categories);
  }
  return p;
}

SparseVector PipelineModel::features(const std::string& text, const Lexicon& lexicon) const {
  FeatureVector fv = tfidf.transform(text);
  if (config.word_counts) fv = append_word_counts(std::move(fv), word_count_vector(text, lexicon));
  return fv.flatten(tfidf.dims());
}

double PipelineModel::score(const std::string& text, const Lexicon& lexicon) const {
  return classifier.score(features(text, lexicon));
}

int PipelineModel::predict(const std::string& text, const Lexicon& lexicon) const {
  return sgid::predict(classifier, features(text, lexicon), config.effective_threshold());
}

json PipelineModel::to_json() const {
  return json{{"format", "sgid-pipeline"},
              {"version", kPipelineFormatVersion},
              {"config", config.to_json()},
              {"tfidf", tfidf.to_json()},
              {"classifier", classifier.to_json()},
              {"augmentation", augmentation.to_json()}};
}

PipelineModel PipelineModel::from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "sgid-pipeline") {
      throw DataError("not a pipeline model file");
    }
    int version = j.at("version").get<int>();
    if (version != kPipelineFormatVersion) {
      throw DataError("unsupported pipeline format version " + std::to_string(version) +
                      " (expected " + std::to_string(kPipelineFormatVersion) + ")");
    }
    PipelineModel m{PipelineConfig::from_json(j.at("config")),
                    TfIdfModel::from_json(j.at("tfidf")),
                    Classifier::from_json(j.at("classifier")),
                    {}};
    const json& a = j.at("augmentation");
    m.augmentation.strategy = strategy_from_string(a.at("strategy").get<std::string>());
    m.augmentation.ratio = Ratio::parse(a.at("ratio").get<std::string>());
    m.augmentation.seed = a.at("seed").get<std::uint64_t>();
    m.augmentation.x = a.at("x").get<std::size_t>();
    m.augmentation.y = a.at("y").get<std::size_t>();
    m.augmentation.n_add = a.at("n_add").get<std::size_t>();
    m.augmentation.duplicates = a.at("duplicates").get<std::size_t>();
    m.augmentation.generated = a.at("generated").get<std::size_t>();
    m.augmentation.warnings = a.at("warnings").get<std::vector<std::string>>();
    std::size_t expected = m.tfidf.dims() + (m.config.word_counts ? 7 : 0);
    if (m.classifier.dims() != expected) {
      throw DataError("classifier dimensionality does not match the feature space");
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt pipeline model: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("corrupt pipeline model: ") + e.what());
  }
}

void PipelineModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json().dump() << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

PipelineModel PipelineModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("corrupt model file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

PipelineModel fit_pipeline(const std::vector<std::string>& texts, const std::vector<int>& labels,
                           const PipelineConfig& config, const Resources& resources,
                           std::uint64_t augmentation_seed) {
  if (texts.size() != labels.size()) throw UsageError("texts and labels differ in length");
  std::vector<TrainingSample> samples;
  samples.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    samples.push_back({texts[i], labels[i], Provenance::kOriginal, i});
  }
  AugmentationPlan plan;
  if (config.strategy) {
    AugmentationResult aug =
        oversample(samples, *config.strategy, config.ratio, resources.groups, augmentation_seed);
    samples = std::move(aug.samples);
    plan = std::move(aug.plan);
  } else {
    plan.seed = augmentation_seed;
    for (int y : labels) (y == 1 ? plan.x : plan.y) += 1;
  }

  std::vector<std::string> train_texts;
  train_texts.reserve(samples.size());
  for (const TrainingSample& s : samples) train_texts.push_back(s.text);
  TfIdfModel tfidf = TfIdfModel::fit(train_texts, config.tfidf);

  PipelineModel proto{config, tfidf, Classifier(config.train.algorithm, 0, config.train,
                                                LinearModel{}),
                      plan};
  Dataset data;
  data.dims = tfidf.dims() + (config.word_counts ? 7 : 0);
  data.rows.reserve(samples.size());
  for (const TrainingSample& s : samples) {
    data.rows.push_back(proto.features(s.text, resources.lexicon()));
    data.labels.push_back(s.label);
  }
  proto.classifier = train(data, config.train);
  return proto;
}

std::vector<double> CvResult::metric_values(std::string_view metric) const {
  std::vector<double> v;
  for (const FoldOutcome& f : folds) v.push_back(f.report.get(metric));
  return v;
}

json CvResult::to_json(bool include_scores) const {
  json fj = json::array();
  for (const FoldOutcome& f : folds) {
    json e{{"fold", f.fold},
           {"n_test", f.test_indices.size()},
           {"n_train", f.train_rows},
           {"confusion", f.cm.to_json()},
           {"metrics", f.report.to_json()},
           {"augmentation", f.augmentation.to_json()}};
    if (include_scores) {
      e["test_indices"] = f.test_indices;
      e["scores"] = f.scores;
    }
    fj.push_back(e);
  }
  return json{{"descriptor", descriptor},
              {"config", config.to_json()},
              {"seed", seed},
              {"k", k},
              {"mean", mean.to_json()},
              {"pooled_confusion", pooled.to_json()},
              {"pooled", pooled_report.to_json()},
              {"folds", fj},
              {"warnings", warnings}};
}

CvResult cross_validate(const PreparedCorpus& data, const PipelineConfig& config,
                        const FoldPlan& plan, const Resources& resources) {
  if (plan.assignment.size() != data.size()) {
    throw UsageError("fold plan covers " + std::to_string(plan.assignment.size()) +
                     " items but the corpus has " + std::to_string(data.size()));
  }
  CvResult cv;
  cv.config = config;
  cv.descriptor = config.descriptor();
  cv.seed = config.train.seed;
  cv.k = plan.k;
  const double threshold = config.effective_threshold();
  std::vector<MetricsReport> reports;
  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    std::vector<std::size_t> train_idx = plan.train_indices(fold);
    std::vector<std::size_t> test_idx = plan.test_indices(fold);
    std::vector<std::string> texts;
    std::vector<int> labels;
    bool pos = false, neg = false;
    for (std::size_t i : train_idx) {
      texts.push_back(data.texts[i]);
      labels.push_back(data.labels[i]);
      (data.labels[i] == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) {
      throw DataError("fold " + std::to_string(fold) + ": training part has no " +
                      (pos ? "non-SGID" : "SGID") + " samples");
    }
    PipelineModel model =
        fit_pipeline(texts, labels, config, resources, Rng::derive(config.train.seed, fold));

    FoldOutcome out;
    out.fold = fold;
    out.test_indices = test_idx;
    out.augmentation = model.augmentation;
    out.train_rows = model.augmentation.x + model.augmentation.y + model.augmentation.n_add;
    std::vector<int>& test_labels = out.test_labels;
    for (std::size_t i : test_idx) {
      double s = model.score(data.texts[i], resources.lexicon());
      out.scores.push_back(s);
      out.predictions.push_back(s >= threshold ? 1 : 0);
      out.test_provenance.push_back(Provenance::kOriginal);
      test_labels.push_back(data.labels[i]);
    }
    out.cm = confusion(out.predictions, test_labels);
    out.report = metrics(out.cm);
    cv.pooled += out.cm;
    reports.push_back(out.report);
    for (const std::string& w : model.augmentation.warnings) {
      cv.warnings.push_back("fold " + std::to_string(fold) + ": " + w);
    }
    cv.folds.push_back(std::move(out));
  }
  cv.mean = mean_report(reports);
  cv.pooled_report = metrics(cv.pooled);
  return cv;
}

SweepResult sweep_cv(const CvResult& cv) {
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<int>> labels;
  for (const FoldOutcome& f : cv.folds) {
    scores.push_back(f.scores);
    labels.push_back(f.test_labels);
  }
  return threshold_sweep_groups(scores, labels,
                                cv.config.train.algorithm != Algorithm::kLinearSvm);
}

std::size_t GridSpec::cells() const {
  return algorithms.size() * strategies.size() * ratios.size() * word_counts.size() *
         class_weights.size();
}

GridSpec GridSpec::default_grid() {
  GridSpec g;
  g.algorithms = {Algorithm::kDecisionTree, Algorithm::kLogisticRegression,
                  Algorithm::kRandomForest, Algorithm::kLinearSvm};
  g.strategies = {Strategy::kRandom, Strategy::kGenerate, Strategy::kMixed};
  g.ratios = default_ratio_grid();
  g.word_counts = {false, true};
  g.class_weights = {1.0};
  return g;
}

bool ranks_before(const CvResult& a, const CvResult& b) {
  if (a.mean.mcc != b.mean.mcc) return a.mean.mcc > b.mean.mcc;
  if (a.mean.f1_1 != b.mean.f1_1) return a.mean.f1_1 > b.mean.f1_1;
  return a.descriptor < b.descriptor;
}

std::vector<GridCell> grid_search(const PreparedCorpus& data, const PipelineConfig& base,
                                  const GridSpec& grid, const FoldPlan& plan,
                                  const Resources& resources, std::size_t jobs) {
  if (grid.cells() == 0) throw UsageError("grid has no cells");
  std::vector<PipelineConfig> configs;
  for (Algorithm a : grid.algorithms) {
    for (Strategy s : grid.strategies) {
      for (const Ratio& r : grid.ratios) {
        for (bool wc : grid.word_counts) {
          for (double cw : grid.class_weights) {
            PipelineConfig c = base;
            c.train.algorithm = a;
            c.strategy = s;
            c.ratio = r;
            c.word_counts = wc;
            c.train.class_weight = cw;
            configs.push_back(c);
          }
        }
      }
    }
  }

  std::vector<std::optional<CvResult>> results(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        results[i] = cross_validate(data, configs[i], plan, resources);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = configs.size();
        return;
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, configs.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<GridCell> cells;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    cells.push_back({0, configs[i], std::move(*results[i])});
  }
  std::sort(cells.begin(), cells.end(),
            [](const GridCell& a, const GridCell& b) { return ranks_before(a.result, b.result); });
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i].rank = i + 1;
  return cells;
}

std::string grid_table_csv(const std::vector<GridCell>& cells) {
  std::string out = "rank,descriptor,algorithm,strategy,ratio,word_counts,class_weight";
  for (std::string_view n : MetricsReport::kNames) out += "," + std::string(n);
  out += "\n";
  for (const GridCell& c : cells) {
    out += std::to_string(c.rank) + "," + csv::escape(c.result.descriptor) + "," +
           std::string(to_string(c.config.train.algorithm)) + "," +
           (c.config.strategy ? std::string(to_string(*c.config.strategy)) : "none") + "," +
           c.config.ratio.to_string() + "," + (c.config.word_counts ? "1" : "0") + "," +
           format_number(c.config.train.class_weight);
    for (std::string_view n : MetricsReport::kNames) out += "," + fixed6(c.result.mean.get(n));
    out += "\n";
  }
  return out;
}

std::string metrics_table_csv(const CvResult& cv) {
  std::string out = "fold,TP,FP,FN,TN";
  for (std::string_view n : MetricsReport::kNames) out += "," + std::string(n);
  out += "\n";
  auto row = [&](const std::string& label, const ConfusionMatrix* cm, const MetricsReport& r) {
    out += label;
    if (cm) {
      out += "," + std::to_string(cm->tp) + "," + std::to_string(cm->fp) + "," +
             std::to_string(cm->fn) + "," + std::to_string(cm->tn);
    } else {
      out += ",,,,";
    }
    for (std::string_view n : MetricsReport::kNames) out += "," + fixed6(r.get(n));
    out += "\n";
  };
  for (const FoldOutcome& f : cv.folds) row(std::to_string(f.fold), &f.cm, f.report);
  row("mean", nullptr, cv.mean);
  row("pooled", &cv.pooled, cv.pooled_report);
  return out;
}

json ErrorReport::to_json() const {
  auto entries = [](const std::vector<ErrorEntry>& list) {
    json a = json::array();
    for (const ErrorEntry& e : list) {
      a.push_back(json{{"id", e.id},
                       {"text", e.text},
                       {"score", e.score},
                       {"label", e.label},
                       {"keyword_categories", e.keyword_categories},
                       {"sgid_categories", e.sgid_categories}});
    }
    return a;
  };
  json cats = json::array();
  for (const CategoryMisses& c : categories) {
    cats.push_back(json{{"category", c.category},
                        {"instances", c.instances},
                        {"missed", c.missed},
                        {"fn_rate", c.rate ? json(*c.rate) : json("n/a")}});
  }
  return json{{"confusion", cm.to_json()},
              {"false_positives", entries(false_positives)},
              {"false_negatives", entries(false_negatives)},
              {"categories", cats}};
}

std::string ErrorReport::to_text() const {
  std::ostringstream os;
  os << "TP=" << cm.tp << " FP=" << cm.fp << " FN=" << cm.fn << " TN=" << cm.tn << "\n\n";
  auto list = [&](const char* title, const std::vector<ErrorEntry>& v) {
    os << title << " (" << v.size() << ")\n";
    for (const ErrorEntry& e : v) {
      os << "  " << e.id << "  score=" << fixed6(e.score) << "  keywords=[";
      bool first = true;
      for (const std::string& c : e.keyword_categories) {
        os << (first ? "" : ", ") << c;
        first = false;
      }
      os << "]\n    " << e.text << "\n";
    }
    os << "\n";
  };
  list("False positives", false_positives);
  list("False negatives", false_negatives);
  os << "Missed SGID by category\n";
  for (const CategoryMisses& c : categories) {
    os << "  " << c.category << ": ";
    if (c.rate) os << c.missed << "/" << c.instances << " (" << fixed6(*c.rate) << ")\n";
    else os << "n/a (no instances)\n";
  }
  return os.str();
}

ErrorReport error_report(const PipelineModel& model, const PreparedCorpus& data,
                         const Lexicon& lexicon) {
  ErrorReport report;
  std::vector<int> preds;
  const double threshold = model.config.effective_threshold();
  std::vector<CategoryMisses> cats;
  for (std::string_view c : kSgidCategories) cats.push_back({std::string(c), 0, 0, std::nullopt});

  for (std::size_t i = 0; i < data.size(); ++i) {
    double s = model.score(data.texts[i], lexicon);
    int p = s >= threshold ? 1 : 0;
    preds.push_back(p);
    const int y = data.labels[i];
    if (y == 1) {
      for (CategoryMisses& c : cats) {
        if (data.categories[i].contains(c.category)) {
          ++c.instances;
          if (p == 0) ++c.missed;
        }
      }
    }
    if (p == y) continue;
    ErrorEntry e{data.ids[i], data.raw[i], s, y, {}, data.categories[i]};
    for (const KeywordMatch& m : match_keywords(data.texts[i], lexicon)) {
      e.keyword_categories.insert(m.category);
    }
    (p == 1 ? report.false_positives : report.false_negatives).push_back(std::move(e));
  }
  for (CategoryMisses& c : cats) {
    if (c.instances > 0) c.rate = static_cast<double>(c.missed) / static_cast<double>(c.instances);
  }
  report.categories = std::move(cats);
  report.cm = confusion(preds, data.labels);
  return report;
}

}  // namespace sgid
