#include "archner/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "archner/chrono.hpp"
#include "archner/corpus.hpp"
#include "archner/error.hpp"
#include "archner/eval.hpp"
#include "archner/gazetteer.hpp"
#include "archner/predictions.hpp"
#include "archner/search/index.hpp"
#include "archner/search/service.hpp"
#include "archner/spans.hpp"
#include "archner/subword.hpp"
#include "archner/tagger.hpp"
#include "archner/text.hpp"

namespace archner::cli {

namespace {

using pipeline::FeatureTemplateConfig;
using pipeline::PredictionSet;

struct NamedPath {
  std::string name;
  std::string path;
};

NamedPath parse_named_path(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) {
    return {std::filesystem::path(arg).stem().string(), arg};
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  file << content;
}

std::optional<Thesaurus> maybe_thesaurus(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return Thesaurus::load(path);
}

std::vector<PredictionSet> load_predictions(const std::vector<TaggedDocument>& corpus,
                                            const std::vector<std::string>& args) {
  std::vector<PredictionSet> sets;
  for (const auto& arg : args) {
    const auto np = parse_named_path(arg);
    for (const auto& s : sets) {
      if (s.model_name == np.name) throw Error("prediction source '" + np.name + "' given twice");
    }
    sets.push_back(pipeline::ingest_predictions(corpus, load_conll_file(np.path), np.name));
  }
  return sets;
}

std::vector<const PredictionSet*> select_sources(const std::vector<PredictionSet>& sets,
                                                 const std::vector<std::string>& names) {
  std::vector<const PredictionSet*> out;
  for (const auto& name : names) {
    const PredictionSet* found = nullptr;
    for (const auto& s : sets) {
      if (s.model_name == name) found = &s;
    }
    if (!found) throw Error("missing predictions for source '" + name + "' (pass --pred " + name + "=FILE)");
    out.push_back(found);
  }
  return out;
}

/// Predictions if the file has a fourth column, otherwise the gold labels.
DocLabels system_labels(const ConllFile& file) {
  if (file.predictions) return *file.predictions;
  return gold_labels(file.docs);
}

/// Feature-template flags shared by the CRF subcommands.
struct FeatureFlags {
  int window = 5;
  bool no_words = false;
  bool no_shape = false;
  bool no_pos = false;
  bool no_thesaurus = false;

  void add_to(CLI::App* app) {
    app->add_option("--window", window, "Feature window in tokens (odd)")->capture_default_str();
    app->add_flag("--no-words", no_words, "Drop lowercased word features");
    app->add_flag("--no-shape", no_shape, "Drop word-shape, digit, case and punctuation features");
    app->add_flag("--no-pos", no_pos, "Drop part-of-speech features");
    app->add_flag("--no-thesaurus", no_thesaurus, "Drop thesaurus membership features");
  }

  FeatureTemplateConfig config(const std::vector<std::string>& sources) const {
    FeatureTemplateConfig c;
    c.window = window;
    c.use_words = !no_words;
    c.use_shape = !no_shape;
    c.use_pos = !no_pos;
    c.use_thesaurus = !no_thesaurus;
    c.prediction_sources = sources;
    c.validate();
    return c;
  }
};

struct HyperFlags {
  crf::CrfHyperparams hyper;
  int min_count = 1;

  void add_to(CLI::App* app) {
    app->add_option("--c1", hyper.c1, "L1 coefficient")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--c2", hyper.c2, "L2 coefficient")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--max-iterations", hyper.max_iterations, "L-BFGS iteration cap")
        ->capture_default_str();
    app->add_option("--min-count", min_count, "Drop features seen fewer times")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }
};

void require_thesaurus(const FeatureTemplateConfig& config, const std::optional<Thesaurus>& t) {
  if (config.use_thesaurus && !t) {
    throw Error("thesaurus features need --thesaurus FILE (or pass --no-thesaurus)");
  }
}

FoldSplit folds_for(const std::vector<TaggedDocument>& docs, const std::string& folds_path,
                    std::size_t k) {
  if (folds_path.empty()) return make_folds(docs, k);
  std::ifstream in(folds_path);
  if (!in) throw Error("cannot open " + folds_path);
  return FoldSplit::from_csv(in);
}

std::string fold_hyper_csv(const std::vector<crf::CrfHyperparams>& hyper) {
  std::ostringstream out;
  out << "fold,c1,c2\n";
  for (std::size_t i = 0; i < hyper.size(); ++i) {
    out << i << ',' << hyper[i].c1 << ',' << hyper[i].c2 << '\n';
  }
  return out.str();
}

std::string year_rows_csv(const std::vector<std::optional<YearRange>>& rows) {
  std::ostringstream out;
  out << "start,end\n";
  for (const auto& r : rows) {
    if (r) {
      out << r->start << ',' << r->end << '\n';
    } else {
      out << ",\n";
    }
  }
  return out.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entity tagging, evaluation and entity-driven search for archaeology reports",
               "archner"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Report training progress on stderr");

  std::map<std::string, std::function<void()>> actions;
  auto command = [&](const std::string& name, const std::string& desc,
                     std::function<void()> action) {
    auto* sub = app.add_subcommand(name, desc);
    actions[name] = std::move(action);
    return sub;
  };

  // preprocess
  std::string pre_in, pre_out;
  std::size_t soft_limit = 60, hard_limit = 90;
  {
    auto* sub = command("preprocess", "Split sentences longer than the hard limit", [&] {
      auto docs = load_conll(pre_in);
      for (auto& d : docs) d = split_long_sentences(d, soft_limit, hard_limit);
      emit(pre_out, write_conll(docs), out);
    });
    sub->add_option("--in", pre_in, "Input CoNLL corpus")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", pre_out, "Output CoNLL (default stdout)");
    sub->add_option("--soft", soft_limit, "Break at punctuation after this many tokens")
        ->capture_default_str();
    sub->add_option("--hard", hard_limit, "Maximum sentence length in tokens")
        ->capture_default_str();
  }

  // folds
  std::string folds_in, folds_out;
  std::size_t folds_k = 5;
  {
    auto* sub = command("folds", "Assign documents to token-balanced folds (CSV doc_id,fold)", [&] {
      const auto docs = load_conll(folds_in);
      emit(folds_out, make_folds(docs, folds_k).to_csv(), out);
    });
    sub->add_option("--in", folds_in, "Input CoNLL corpus")->required()->check(CLI::ExistingFile);
    sub->add_option("-k,--folds", folds_k, "Number of folds")->capture_default_str();
    sub->add_option("--out", folds_out, "Output CSV (default stdout)");
  }

  // crf-train
  std::string train_in, train_model, train_thesaurus;
  std::vector<std::string> train_preds;
  FeatureFlags train_features;
  HyperFlags train_hyper;
  {
    auto* sub = command("crf-train", "Train a CRF tagger on a gold corpus", [&] {
      const auto docs = load_conll(train_in);
      const auto thesaurus = maybe_thesaurus(train_thesaurus);
      const auto sets = load_predictions(docs, train_preds);
      std::vector<std::string> names;
      for (const auto& s : sets) names.push_back(s.model_name);
      const auto config = train_features.config(names);
      require_thesaurus(config, thesaurus);
      crf::TrainingReport report;
      const auto tagger = pipeline::train_tagger(
          docs, config, thesaurus ? &*thesaurus : nullptr, select_sources(sets, names),
          train_hyper.hyper, &report, static_cast<std::size_t>(train_hyper.min_count));
      tagger.save(train_model);
      if (verbose) {
        err << "iterations " << report.iterations << " objective " << report.objective
            << " features " << tagger.model.num_features() << '\n';
      }
    });
    sub->add_option("--in", train_in, "Gold CoNLL corpus")->required()->check(CLI::ExistingFile);
    sub->add_option("--model", train_model, "Output model file (JSON)")->required();
    sub->add_option("--thesaurus", train_thesaurus, "Thesaurus TSV")->check(CLI::ExistingFile);
    sub->add_option("--pred", train_preds, "Prediction features NAME=FILE (repeatable)");
    train_features.add_to(sub);
    train_hyper.add_to(sub);
  }

  // crf-predict
  std::string predict_model, predict_in, predict_out, predict_thesaurus;
  std::vector<std::string> predict_preds;
  {
    auto* sub = command("crf-predict", "Label a corpus with a trained CRF tagger", [&] {
      const auto tagger = pipeline::Tagger::load(predict_model);
      const auto docs = load_conll(predict_in);
      const auto thesaurus = maybe_thesaurus(predict_thesaurus);
      require_thesaurus(tagger.config, thesaurus);
      const auto sets = load_predictions(docs, predict_preds);
      const auto labels = tagger.predict(docs, thesaurus ? &*thesaurus : nullptr,
                                         select_sources(sets, tagger.config.prediction_sources));
      emit(predict_out, write_conll(docs, &labels), out);
    });
    sub->add_option("--model", predict_model, "Model file from crf-train")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--in", predict_in, "CoNLL corpus to label")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", predict_out, "Output CoNLL with predictions in column 4");
    sub->add_option("--thesaurus", predict_thesaurus, "Thesaurus TSV")->check(CLI::ExistingFile);
    sub->add_option("--pred", predict_preds, "Prediction features NAME=FILE (repeatable)");
  }

  // crf-cv
  std::string cv_in, cv_thesaurus, cv_folds, cv_out, cv_hyper_out;
  std::size_t cv_k = 5;
  bool cv_tune = false;
  std::vector<std::string> cv_preds;
  FeatureFlags cv_features;
  HyperFlags cv_hyper;
  {
    auto* sub = command("crf-cv", "Cross-validate a CRF tagger and score out-of-fold labels", [&] {
      const auto docs = load_conll(cv_in);
      const auto thesaurus = maybe_thesaurus(cv_thesaurus);
      const auto sets = load_predictions(docs, cv_preds);
      std::vector<std::string> names;
      for (const auto& s : sets) names.push_back(s.model_name);
      const auto config = cv_features.config(names);
      require_thesaurus(config, thesaurus);
      pipeline::CrossValidationOptions options;
      options.hyper = cv_hyper.hyper;
      options.min_feature_count = static_cast<std::size_t>(cv_hyper.min_count);
      if (cv_tune) options.grid = crf::default_grid();
      const auto folds = folds_for(docs, cv_folds, cv_k);
      const auto result = pipeline::cross_validate(docs, folds, config,
                                                   thesaurus ? &*thesaurus : nullptr, sets, options);
      if (!cv_out.empty()) emit(cv_out, write_conll(docs, &result.predictions), out);
      if (!cv_hyper_out.empty()) emit(cv_hyper_out, fold_hyper_csv(result.fold_hyper), out);
      out << eval::score(gold_labels(docs), result.predictions).summary();
    });
    sub->add_option("--in", cv_in, "Gold CoNLL corpus")->required()->check(CLI::ExistingFile);
    sub->add_option("--thesaurus", cv_thesaurus, "Thesaurus TSV")->check(CLI::ExistingFile);
    sub->add_option("--fold-file", cv_folds, "Fold assignment CSV from `folds`")
        ->check(CLI::ExistingFile);
    sub->add_option("-k,--folds", cv_k, "Number of folds when no fold file is given")
        ->capture_default_str();
    sub->add_flag("--tune", cv_tune, "Tune c1 and c2 per fold on an inner development fold");
    sub->add_option("--pred", cv_preds, "Prediction features NAME=FILE (repeatable)");
    sub->add_option("--out", cv_out, "Write out-of-fold predictions (CoNLL)");
    sub->add_option("--hyper-out", cv_hyper_out, "Write per-fold c1,c2 as CSV");
    cv_features.add_to(sub);
    cv_hyper.add_to(sub);
  }

  // vote
  std::string vote_in, vote_out, vote_priority = "archeobertje";
  std::vector<std::string> vote_preds;
  {
    auto* sub = command("vote", "Majority vote over three prediction files", [&] {
      const auto docs = load_conll(vote_in);
      const auto sets = load_predictions(docs, vote_preds);
      const auto voted = pipeline::majority_vote(sets, vote_priority);
      emit(vote_out, write_conll(docs, &voted.labels), out);
    });
    sub->add_option("--in", vote_in, "Reference CoNLL corpus")->required()->check(CLI::ExistingFile);
    sub->add_option("--pred", vote_preds, "Prediction file NAME=FILE (exactly three)")
        ->required();
    sub->add_option("--priority", vote_priority, "Model whose label wins when all three disagree")
        ->capture_default_str();
    sub->add_option("--out", vote_out, "Output CoNLL with voted labels in column 4");
  }

  // ensemble
  std::string ens_preset, ens_presets_file, ens_in, ens_thesaurus, ens_folds, ens_out;
  std::size_t ens_k = 5;
  bool ens_tune = false;
  std::vector<std::string> ens_preds;
  HyperFlags ens_hyper;
  {
    auto* sub = command("ensemble", "Run a named ensemble preset with cross-validation", [&] {
      const auto presets = ens_presets_file.empty() ? pipeline::builtin_presets()
                                                    : pipeline::load_presets(ens_presets_file);
      const auto& preset = pipeline::find_preset(presets, ens_preset);
      const auto docs = load_conll(ens_in);
      const auto all_sets = load_predictions(docs, ens_preds);
      const auto sources = select_sources(all_sets, preset.sources);
      DocLabels labels;
      if (preset.strategy == pipeline::EnsembleStrategy::Vote) {
        std::vector<PredictionSet> voters;
        for (const auto* s : sources) voters.push_back(*s);
        labels = pipeline::majority_vote(voters, preset.priority, preset.name).labels;
      } else {
        const auto thesaurus = maybe_thesaurus(ens_thesaurus);
        require_thesaurus(preset.features, thesaurus);
        std::vector<PredictionSet> used;
        for (const auto* s : sources) used.push_back(*s);
        pipeline::CrossValidationOptions options;
        options.hyper = ens_hyper.hyper;
        options.min_feature_count = static_cast<std::size_t>(ens_hyper.min_count);
        if (ens_tune) options.grid = crf::default_grid();
        labels = pipeline::cross_validate(docs, folds_for(docs, ens_folds, ens_k), preset.features,
                                          thesaurus ? &*thesaurus : nullptr, used, options)
                     .predictions;
      }
      if (!ens_out.empty()) emit(ens_out, write_conll(docs, &labels), out);
      out << "preset " << preset.name << '\n';
      out << eval::score(gold_labels(docs), labels).summary();
    });
    sub->add_option("--preset", ens_preset,
                    "majority-vote, crf-all-preds, crf-archeo-only, crf-all-preds-baseline or "
                    "crf-archeo-baseline")
        ->required();
    sub->add_option("--presets", ens_presets_file, "Preset config (JSON) replacing the built-ins")
        ->check(CLI::ExistingFile);
    sub->add_option("--in", ens_in, "Gold CoNLL corpus")->required()->check(CLI::ExistingFile);
    sub->add_option("--pred", ens_preds, "Prediction file NAME=FILE (repeatable)");
    sub->add_option("--thesaurus", ens_thesaurus, "Thesaurus TSV for baseline features")
        ->check(CLI::ExistingFile);
    sub->add_option("--fold-file", ens_folds, "Fold assignment CSV from `folds`")
        ->check(CLI::ExistingFile);
    sub->add_option("-k,--folds", ens_k, "Number of folds when no fold file is given")
        ->capture_default_str();
    sub->add_flag("--tune", ens_tune, "Tune c1 and c2 per fold on an inner development fold");
    sub->add_option("--out", ens_out, "Write ensemble labels (CoNLL)");
    ens_hyper.add_to(sub);
  }

  // repair
  std::string repair_in, repair_out;
  {
    auto* sub = command("repair", "Turn orphan I labels into B labels", [&] {
      auto file = load_conll_file(repair_in);
      if (file.predictions) {
        for (auto& doc : *file.predictions)
          for (auto& sentence : doc) sentence = bio_repair(sentence);
        emit(repair_out, write_conll(file.docs, &*file.predictions), out);
        return;
      }
      for (auto& doc : file.docs) {
        for (auto& sentence : doc.sentences) {
          const auto repaired = bio_repair(sentence.gold_labels());
          for (std::size_t i = 0; i < repaired.size(); ++i) sentence.tokens[i].gold = repaired[i];
        }
      }
      emit(repair_out, write_conll(file.docs), out);
    });
    sub->add_option("--in", repair_in, "CoNLL file (column 4 repaired when present, else column 3)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", repair_out, "Output CoNLL (default stdout)");
  }

  // eval
  std::string eval_gold, eval_per_label, eval_confusion, eval_runs;
  std::vector<std::string> eval_preds;
  bool eval_mcnemar = false, eval_sample_std = false, eval_no_correction = false;
  std::size_t eval_combos = 0;
  {
    auto* sub = command("eval", "Token-level scores, run statistics, McNemar and error mining", [&] {
      if (!eval_runs.empty()) {
        std::vector<double> f1s;
        std::istringstream in(read_file(eval_runs));
        std::string tok;
        while (in >> tok) {
          try {
            f1s.push_back(std::stod(tok));
          } catch (const std::exception&) {
            throw Error("not a number in " + eval_runs + ": '" + tok + "'");
          }
        }
        if (f1s.empty()) throw Error("no F1 values in " + eval_runs);
        const auto stats = eval::run_stats(f1s, eval_sample_std);
        out << std::fixed << std::setprecision(4) << "runs " << f1s.size() << " mean "
            << stats.mean << " std " << stats.std << " fails " << stats.fail_count << '\n';
        return;
      }
      if (eval_gold.empty() || eval_preds.empty()) {
        throw CLI::ValidationError("eval", "--gold and --pred are required unless --runs is given");
      }
      const auto gold_docs = load_conll(eval_gold);
      const auto gold = gold_labels(gold_docs);
      std::vector<std::string> names;
      std::vector<std::vector<BioLabel>> preds;
      for (const auto& arg : eval_preds) {
        const auto np = parse_named_path(arg);
        const auto labels = system_labels(load_conll_file(np.path));
        check_shape(gold, labels);
        names.push_back(np.name);
        preds.push_back(flatten(labels));
      }
      const auto flat_gold = flatten(gold);
      if (eval_mcnemar) {
        if (preds.size() != 2) throw Error("--mcnemar compares exactly two --pred files");
        const auto r = eval::mcnemar(flat_gold, preds[0], preds[1], !eval_no_correction);
        out << "b " << r.b << " c " << r.c << " chi2 " << std::fixed << std::setprecision(4)
            << r.chi2 << '\n';
        return;
      }
      if (eval_combos > 0) {
        if (preds.size() < 2) throw Error("--combos needs at least two --pred files");
        out << eval::error_combinations_csv(
            eval::error_combinations(flat_gold, preds, eval_combos), names);
        return;
      }
      for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto report = eval::score(flat_gold, preds[i]);
        if (preds.size() > 1) out << "model " << names[i] << '\n';
        out << report.summary();
        if (i == 0 && !eval_per_label.empty()) emit(eval_per_label, report.per_label_csv(), out);
        if (i == 0 && !eval_confusion.empty()) emit(eval_confusion, report.confusion_csv(), out);
      }
    });
    sub->add_option("--gold", eval_gold, "Gold CoNLL corpus")->check(CLI::ExistingFile);
    sub->add_option("--pred", eval_preds,
                    "System CoNLL NAME=FILE (column 4 when present, else column 3; repeatable)");
    sub->add_option("--per-label", eval_per_label, "Write the per-label table (CSV)");
    sub->add_option("--confusion", eval_confusion, "Write the confusion matrix (CSV)");
    sub->add_flag("--mcnemar", eval_mcnemar, "McNemar's test between two --pred files");
    sub->add_flag("--no-correction", eval_no_correction, "McNemar without continuity correction");
    sub->add_option("--combos", eval_combos, "Top N error combinations across --pred files (CSV)");
    sub->add_option("--runs", eval_runs, "File of per-run F1 values: mean, std and fail count")
        ->check(CLI::ExistingFile);
    sub->add_flag("--sample-std", eval_sample_std, "Sample instead of population deviation");
  }

  // chrono
  std::string chrono_in, chrono_out, chrono_hist, chrono_thesaurus;
  int chrono_floor = chrono::YearHistogram::kDefaultFloor;
  {
    auto* sub = command("chrono", "Normalize time-period mentions to year ranges", [&] {
      const auto thesaurus = maybe_thesaurus(chrono_thesaurus);
      std::istringstream in(read_file(chrono_in));
      std::vector<std::optional<YearRange>> rows;
      std::vector<YearRange> ranges;
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto r = chrono::normalize(line, thesaurus ? &*thesaurus : nullptr);
        if (r) ranges.push_back(*r);
        if (!r && verbose && !text::trim(line).empty()) err << "no year range for '" << line << "'\n";
        rows.push_back(r);
      }
      emit(chrono_out, year_rows_csv(rows), out);
      if (!chrono_hist.empty()) {
        emit(chrono_hist, chrono::year_histogram(ranges, chrono_floor).to_csv(), out);
      }
    });
    sub->add_option("--in", chrono_in, "One time-period mention per line")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", chrono_out, "start,end rows aligned with the input (default stdout)");
    sub->add_option("--thesaurus", chrono_thesaurus, "Thesaurus TSV with period ranges")
        ->check(CLI::ExistingFile);
    sub->add_option("--histogram", chrono_hist, "Write the year histogram (CSV year,count)");
    sub->add_option("--floor", chrono_floor, "Drop years below this from the histogram")
        ->capture_default_str();
  }

  // stats
  std::string stats_in, stats_out, stats_column = "auto";
  std::size_t stats_top = 5;
  {
    auto* sub = command("stats", "Entity totals, unique counts and most frequent surfaces", [&] {
      const auto file = load_conll_file(stats_in);
      DocLabels labels;
      if (stats_column == "pred") {
        if (!file.predictions) throw Error(stats_in + " has no prediction column");
        labels = *file.predictions;
      } else if (stats_column == "gold") {
        labels = gold_labels(file.docs);
      } else {
        labels = system_labels(file);
      }
      std::vector<EntitySpan> spans;
      for (std::size_t d = 0; d < file.docs.size(); ++d) {
        for (std::size_t s = 0; s < file.docs[d].sentences.size(); ++s) {
          auto found = extract_spans(bio_repair(labels[d][s]), file.docs[d].sentences[s].surfaces());
          spans.insert(spans.end(), found.begin(), found.end());
        }
      }
      emit(stats_out, chrono::entity_stats_csv(chrono::entity_stats(spans, stats_top)), out);
    });
    sub->add_option("--in", stats_in, "Labelled CoNLL file")->required()->check(CLI::ExistingFile);
    sub->add_option("--column", stats_column, "Labels to use: auto, gold or pred")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "gold", "pred"}));
    sub->add_option("--top", stats_top, "Surfaces listed per type")->capture_default_str();
    sub->add_option("--out", stats_out, "Output CSV (default stdout)");
  }

  // tokenize
  std::string tok_vocab, tok_in, tok_text;
  bool tok_report = false;
  {
    auto* sub = command("tokenize", "WordPiece-encode text or a corpus", [&] {
      const auto vocab = subword::SubwordVocab::load(tok_vocab);
      if (!tok_text.empty()) {
        const auto pieces = subword::encode_sentence(vocab, text::split_whitespace(tok_text));
        out << text::join(pieces, " ") << '\n' << pieces.size() << " pieces\n";
        return;
      }
      if (tok_in.empty()) throw CLI::ValidationError("tokenize", "give --in or --text");
      const auto docs = load_conll(tok_in);
      if (tok_report) {
        out << subword::fertility(vocab, docs).to_csv();
        return;
      }
      for (const auto& doc : docs) {
        for (const auto& sentence : doc.sentences) {
          out << text::join(subword::encode_sentence(vocab, sentence.surfaces()), " ") << '\n';
        }
      }
    });
    sub->add_option("--vocab", tok_vocab, "Vocabulary file, one piece per line")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--in", tok_in, "CoNLL corpus; one output line per sentence")
        ->check(CLI::ExistingFile);
    sub->add_option("--text", tok_text, "Whitespace-separated words to encode");
    sub->add_flag("--report", tok_report, "Print the fertility report (CSV) instead of pieces");
  }

  // vocab
  std::string vocab_in, vocab_out;
  std::size_t vocab_size = 1000;
  {
    auto* sub = command("vocab", "Induce a subword vocabulary from a corpus", [&] {
      std::vector<std::string> words;
      for (const auto& doc : load_conll(vocab_in))
        for (const auto& sentence : doc.sentences)
          for (const auto& token : sentence.tokens) words.push_back(token.surface);
      emit(vocab_out, subword::induce_vocab(words, vocab_size).to_text(), out);
    });
    sub->add_option("--in", vocab_in, "CoNLL corpus")->required()->check(CLI::ExistingFile);
    sub->add_option("--size", vocab_size, "Target vocabulary size")->capture_default_str();
    sub->add_option("--out", vocab_out, "Output vocabulary (default stdout)");
  }

  // index
  std::string index_pages, index_dir;
  bool index_append = false;
  {
    auto* sub = command("index", "Build or extend a page index from JSON lines", [&] {
      search::PageIndex index;
      if (index_append && std::filesystem::exists(std::filesystem::path(index_dir) / "manifest.json")) {
        index = search::PageIndex::load(index_dir);
      }
      const auto pages = search::load_pages_jsonl(index_pages);
      for (const auto& page : pages) index.index_page(page);
      index.save(index_dir);
      out << "indexed " << pages.size() << " pages; " << index.size() << " in " << index_dir
          << '\n';
    });
    sub->add_option("--pages", index_pages, "Page records, one JSON object per line")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--index-dir", index_dir, "Index directory")
        ->required()
        ->envname("ARCHNER_INDEX_DIR");
    sub->add_flag("--append", index_append, "Add to an existing index instead of replacing it");
  }

  // serve
  std::string serve_dir, serve_host = "127.0.0.1";
  int serve_port = 8080;
  {
    auto* sub = command("serve", "Serve /health, /index and /search over HTTP", [&] {
      search::PageIndex index;
      if (std::filesystem::exists(std::filesystem::path(serve_dir) / "manifest.json")) {
        index = search::PageIndex::load(serve_dir);
      }
      search::IndexService service(std::move(index));
      service.set_persist_dir(serve_dir);
      search::HttpServer server(service);
      const int port = server.start(serve_host, serve_port);
      out << "listening on " << serve_host << ':' << port << " with " << service.size()
          << " pages" << std::endl;
      server.wait();
    });
    sub->add_option("--index-dir", serve_dir, "Index directory (created on first write)")
        ->required()
        ->envname("ARCHNER_INDEX_DIR");
    sub->add_option("--host", serve_host, "Address to bind")->capture_default_str();
    sub->add_option("--port", serve_port, "Port (0 picks a free one)")
        ->capture_default_str()
        ->check(CLI::Range(0, 65535));
  }

  // query
  std::string query_file, query_json, query_dir;
  {
    auto* sub = command("query", "Run one JSON query against an index directory", [&] {
      if (query_file.empty() == query_json.empty()) {
        throw CLI::ValidationError("query", "give exactly one of --query and --json");
      }
      const auto body = query_file.empty() ? query_json : read_file(query_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(body);
      } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("query is not valid JSON: ") + e.what());
      }
      const auto index = search::PageIndex::load(query_dir);
      out << search::to_json(index.execute(search::query_from_json(j))).dump(2) << '\n';
    });
    sub->add_option("--query", query_file, "Query file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--json", query_json, "Query given inline (JSON)");
    sub->add_option("--index-dir", query_dir, "Index directory")
        ->required()
        ->envname("ARCHNER_INDEX_DIR");
  }

  try {
    app.parse(argc, argv);
    const auto subs = app.get_subcommands();
    actions.at(subs.front()->get_name())();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const search::InvalidInput& e) {
    err << "error: " << e.code() << ": " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace archner::cli
