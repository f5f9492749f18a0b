#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "archner/bio.hpp"
#include "archner/corpus.hpp"

namespace archner::eval {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// F1 is 0 when precision + recall is 0.
Prf make_prf(std::size_t correct, std::size_t predicted, std::size_t actual);

struct LabelScore {
  BioLabel label;
  Prf prf;
  std::size_t support = 0;  ///< gold occurrences
};

/// Token-level scores. Micro scores count only B and I decisions: a token
/// is a true positive when its non-O prediction equals the gold label.
struct EvalReport {
  Prf micro;
  Prf macro;  ///< unweighted mean over the 12 entity labels
  std::vector<LabelScore> per_label;  ///< the 12 entity labels, canonical order
  /// confusion[true][predicted] over all 13 labels (canonical index order).
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> confusion{};
  std::size_t tokens = 0;

  double accuracy() const;
  std::string per_label_csv() const;
  std::string confusion_csv() const;
  std::string summary() const;
};

EvalReport score(std::span<const BioLabel> gold, std::span<const BioLabel> pred);
EvalReport score(const DocLabels& gold, const DocLabels& pred);

struct RunStats {
  std::vector<double> f1s;
  double mean = 0.0;
  double std = 0.0;  ///< population (or sample, when requested) deviation
  std::size_t fail_count = 0;  ///< runs with F1 exactly 0
};

RunStats run_stats(std::span<const double> f1s, bool sample_std = false);

struct McNemarResult {
  std::size_t b = 0;  ///< A correct, B wrong
  std::size_t c = 0;  ///< A wrong, B correct
  double chi2 = 0.0;
};

/// Paired test on per-token correctness; continuity-corrected by default.
McNemarResult mcnemar(std::span<const BioLabel> gold, std::span<const BioLabel> pred_a,
                      std::span<const BioLabel> pred_b, bool continuity_correction = true);
double mcnemar_chi2(std::size_t b, std::size_t c, bool continuity_correction = true);

struct ErrorCombination {
  std::size_t count = 0;
  BioLabel gold;
  std::vector<BioLabel> preds;
};

/// Most frequent (gold, prediction...) tuples where at least one model is
/// right and at least one is wrong. Ties are ordered by the tuple's label
/// strings.
std::vector<ErrorCombination> error_combinations(std::span<const BioLabel> gold,
                                                 const std::vector<std::vector<BioLabel>>& preds,
                                                 std::size_t top_n = 10);

std::string error_combinations_csv(const std::vector<ErrorCombination>& combos,
                                   const std::vector<std::string>& model_names);

}  // namespace archner::eval
