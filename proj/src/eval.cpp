#include "archner/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "archner/error.hpp"

namespace archner::eval {

Prf make_prf(std::size_t correct, std::size_t predicted, std::size_t actual) {
  Prf p;
  p.precision = predicted == 0 ? 0.0 : static_cast<double>(correct) / predicted;
  p.recall = actual == 0 ? 0.0 : static_cast<double>(correct) / actual;
  const double sum = p.precision + p.recall;
  p.f1 = sum == 0.0 ? 0.0 : 2.0 * p.precision * p.recall / sum;
  return p;
}

double EvalReport::accuracy() const {
  if (tokens == 0) return 0.0;
  std::size_t diag = 0;
  for (std::size_t i = 0; i < kNumLabels; ++i) diag += confusion[i][i];
  return static_cast<double>(diag) / tokens;
}

std::string EvalReport::per_label_csv() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "label,precision,recall,f1,support\n";
  for (const auto& s : per_label) {
    out << s.label.str() << ',' << s.prf.precision << ',' << s.prf.recall << ',' << s.prf.f1 << ','
        << s.support << '\n';
  }
  out << "macro," << macro.precision << ',' << macro.recall << ',' << macro.f1 << ",\n";
  out << "micro," << micro.precision << ',' << micro.recall << ',' << micro.f1 << ",\n";
  return out.str();
}

std::string EvalReport::confusion_csv() const {
  std::ostringstream out;
  out << "true\\predicted";
  for (std::size_t j = 0; j < kNumLabels; ++j) out << ',' << BioLabel::from_index(j).str();
  out << '\n';
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    out << BioLabel::from_index(i).str();
    for (std::size_t j = 0; j < kNumLabels; ++j) out << ',' << confusion[i][j];
    out << '\n';
  }
  return out.str();
}

std::string EvalReport::summary() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "tokens " << tokens << '\n';
  out << "micro precision " << micro.precision << " recall " << micro.recall << " f1 " << micro.f1
      << '\n';
  out << "macro precision " << macro.precision << " recall " << macro.recall << " f1 " << macro.f1
      << '\n';
  out << "accuracy " << accuracy() << '\n';
  return out.str();
}

EvalReport score(std::span<const BioLabel> gold, std::span<const BioLabel> pred) {
  if (gold.size() != pred.size()) {
    throw Error("gold has " + std::to_string(gold.size()) + " tokens, prediction has " +
                std::to_string(pred.size()));
  }
  EvalReport r;
  r.tokens = gold.size();
  std::size_t correct = 0, predicted = 0, actual = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++r.confusion[gold[i].index()][pred[i].index()];
    if (!pred[i].is_outside()) {
      ++predicted;
      if (pred[i] == gold[i]) ++correct;
    }
    if (!gold[i].is_outside()) ++actual;
  }
  r.micro = make_prf(correct, predicted, actual);

  for (std::size_t l = 1; l < kNumLabels; ++l) {
    std::size_t tp = r.confusion[l][l];
    std::size_t pred_l = 0, gold_l = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      pred_l += r.confusion[k][l];
      gold_l += r.confusion[l][k];
    }
    LabelScore s{BioLabel::from_index(l), make_prf(tp, pred_l, gold_l), gold_l};
    r.macro.precision += s.prf.precision;
    r.macro.recall += s.prf.recall;
    r.macro.f1 += s.prf.f1;
    r.per_label.push_back(s);
  }
  const double n = static_cast<double>(kNumLabels - 1);
  r.macro.precision /= n;
  r.macro.recall /= n;
  r.macro.f1 /= n;
  return r;
}

EvalReport score(const DocLabels& gold, const DocLabels& pred) {
  check_shape(gold, pred);
  const auto g = flatten(gold);
  const auto p = flatten(pred);
  return score(g, p);
}

RunStats run_stats(std::span<const double> f1s, bool sample_std) {
  if (f1s.empty()) throw Error("run statistics need at least one run");
  if (sample_std && f1s.size() < 2) throw Error("sample deviation needs at least two runs");
  RunStats s;
  s.f1s.assign(f1s.begin(), f1s.end());
  double sum = 0.0;
  for (double f : f1s) {
    sum += f;
    if (f == 0.0) ++s.fail_count;
  }
  s.mean = sum / f1s.size();
  double ss = 0.0;
  for (double f : f1s) ss += (f - s.mean) * (f - s.mean);
  s.std = std::sqrt(ss / (sample_std ? f1s.size() - 1 : f1s.size()));
  return s;
}

double mcnemar_chi2(std::size_t b, std::size_t c, bool continuity_correction) {
  if (b + c == 0) return 0.0;
  double diff = std::abs(static_cast<double>(b) - static_cast<double>(c));
  if (continuity_correction) diff = std::max(0.0, diff - 1.0);
  return diff * diff / static_cast<double>(b + c);
}

McNemarResult mcnemar(std::span<const BioLabel> gold, std::span<const BioLabel> pred_a,
                      std::span<const BioLabel> pred_b, bool continuity_correction) {
  if (gold.size() != pred_a.size() || gold.size() != pred_b.size()) {
    throw Error("McNemar inputs differ in length");
  }
  McNemarResult r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool a = pred_a[i] == gold[i];
    const bool b = pred_b[i] == gold[i];
    if (a && !b) ++r.b;
    if (!a && b) ++r.c;
  }
  r.chi2 = mcnemar_chi2(r.b, r.c, continuity_correction);
  return r;
}

std::vector<ErrorCombination> error_combinations(std::span<const BioLabel> gold,
                                                 const std::vector<std::vector<BioLabel>>& preds,
                                                 std::size_t top_n) {
  if (preds.size() < 2) throw Error("error combinations need at least two models");
  for (const auto& p : preds)
    if (p.size() != gold.size()) throw Error("prediction length differs from gold");

  std::map<std::vector<std::string>, ErrorCombination> counts;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    bool any_right = false, any_wrong = false;
    for (const auto& p : preds) (p[i] == gold[i] ? any_right : any_wrong) = true;
    if (!any_right || !any_wrong) continue;
    std::vector<std::string> key{gold[i].str()};
    ErrorCombination combo{0, gold[i], {}};
    for (const auto& p : preds) {
      key.push_back(p[i].str());
      combo.preds.push_back(p[i]);
    }
    auto [it, inserted] = counts.try_emplace(std::move(key), std::move(combo));
    ++it->second.count;
  }
  std::vector<ErrorCombination> out;
  for (auto& [key, combo] : counts) out.push_back(std::move(combo));
  // counts is keyed lexicographically, so a stable sort keeps that order among ties.
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

std::string error_combinations_csv(const std::vector<ErrorCombination>& combos,
                                   const std::vector<std::string>& model_names) {
  std::ostringstream out;
  out << "freq,true";
  for (const auto& m : model_names) out << ',' << m;
  out << '\n';
  for (const auto& c : combos) {
    out << c.count << ',' << c.gold.str();
    for (const auto& p : c.preds) out << ',' << p.str();
    out << '\n';
  }
  return out.str();
}

}  // namespace archner::eval
