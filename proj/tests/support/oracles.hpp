#pragma once

// Slow, independent reference implementations used as test oracles. Nothing
// here calls the library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "archner/bio.hpp"
#include "archner/crf.hpp"
#include "archner/search/page.hpp"

namespace oracle {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(items.size()) - 1))];
}

// ---------------------------------------------------------------------------
// CRF

inline std::vector<archner::BioLabel> first_labels(std::size_t n) {
  std::vector<archner::BioLabel> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(archner::BioLabel::from_index(i));
  return out;
}

/// Random weights in [-scale, scale], or integers in {-1, 0, 1} when
/// `integer_weights` is set (which produces many exact ties).
inline archner::crf::CrfModel random_model(Rng& rng, std::size_t labels, std::size_t features,
                                           double scale, bool integer_weights,
                                           archner::crf::CrfHyperparams hyper = {}) {
  std::vector<std::string> names;
  for (std::size_t f = 0; f < features; ++f) names.push_back("f" + std::to_string(f));
  archner::crf::CrfModel model(first_labels(labels), names, hyper);
  for (auto& w : model.weights()) {
    w = integer_weights ? static_cast<double>(uniform_int(rng, -1, 1))
                        : uniform_real(rng, -scale, scale);
  }
  return model;
}

inline archner::crf::Observation random_observation(Rng& rng, std::size_t length,
                                                    std::size_t features, std::size_t max_active) {
  archner::crf::Observation x(length);
  for (auto& fv : x) {
    const int active = uniform_int(rng, 0, static_cast<int>(std::min(max_active, features)));
    std::set<std::uint32_t> chosen;
    while (static_cast<int>(chosen.size()) < active) {
      chosen.insert(static_cast<std::uint32_t>(uniform_int(rng, 0, static_cast<int>(features) - 1)));
    }
    fv.assign(chosen.begin(), chosen.end());
  }
  return x;
}

inline std::vector<std::size_t> random_labels(Rng& rng, std::size_t length, std::size_t labels) {
  std::vector<std::size_t> y(length);
  for (auto& v : y) v = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(labels) - 1));
  return y;
}

/// Every label sequence of length T over L labels, in lexicographic order.
inline std::vector<std::vector<std::size_t>> all_sequences(std::size_t labels, std::size_t length) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> seq(length, 0);
  while (true) {
    out.push_back(seq);
    std::size_t pos = length;
    while (pos > 0) {
      --pos;
      if (++seq[pos] < labels) break;
      seq[pos] = 0;
      if (pos == 0) return out;
    }
    if (length == 0) return out;
  }
}

/// Unnormalized score straight from the weight definitions.
inline double path_score(const archner::crf::CrfModel& m, const archner::crf::Observation& x,
                         const std::vector<std::size_t>& y) {
  double s = m.start_weight(y[0]);
  for (std::size_t t = 0; t < x.size(); ++t) {
    for (auto f : x[t]) s += m.state_weight(f, y[t]);
    if (t > 0) s += m.transition_weight(y[t - 1], y[t]);
  }
  return s;
}

inline double brute_log_partition(const archner::crf::CrfModel& m,
                                  const archner::crf::Observation& x) {
  std::vector<double> scores;
  for (const auto& y : all_sequences(m.num_labels(), x.size())) scores.push_back(path_score(m, x, y));
  const double hi = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - hi);
  return hi + std::log(sum);
}

/// Highest-scoring sequence. Among exact ties the winner is the one that is
/// smallest when compared from the last position backwards, which is what
/// lowest-index tie breaking at every backpointer produces.
inline std::pair<std::vector<std::size_t>, double> brute_argmax(
    const archner::crf::CrfModel& m, const archner::crf::Observation& x) {
  std::vector<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& y : all_sequences(m.num_labels(), x.size())) {
    const double s = path_score(m, x, y);
    const bool reverse_smaller =
        std::lexicographical_compare(y.rbegin(), y.rend(), best.rbegin(), best.rend());
    if (s > best_score || (s == best_score && reverse_smaller)) {
      best = y;
      best_score = s;
    }
  }
  return {best, best_score};
}

/// Regularized negative log-likelihood by enumeration.
inline double brute_objective(const archner::crf::CrfModel& m,
                              const std::vector<archner::crf::Instance>& data) {
  double nll = 0.0;
  for (const auto& inst : data) nll += brute_log_partition(m, inst.x) - path_score(m, inst.x, inst.y);
  double sq = 0.0;
  for (double w : m.weights()) sq += w * w;
  return nll + m.hyper().c2 * sq;
}

// ---------------------------------------------------------------------------
// Evaluation

struct MicroCounts {
  std::size_t correct = 0;    // non-O prediction equal to gold
  std::size_t predicted = 0;  // non-O predictions
  std::size_t actual = 0;     // non-O gold labels
};

inline MicroCounts micro_counts(const std::vector<archner::BioLabel>& gold,
                                const std::vector<archner::BioLabel>& pred) {
  MicroCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = pred[i].str() != "O";
    const bool g = gold[i].str() != "O";
    c.predicted += p;
    c.actual += g;
    c.correct += p && pred[i].str() == gold[i].str();
  }
  return c;
}

inline double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

/// Per-label (one vs rest) precision, recall and F1 keyed by label string.
inline std::map<std::string, std::vector<double>> per_label_scores(
    const std::vector<archner::BioLabel>& gold, const std::vector<archner::BioLabel>& pred) {
  std::map<std::string, std::vector<double>> out;
  for (const char* tag : {"B-", "I-"}) {
    for (const char* type : {"ART", "CON", "MAT", "LOC", "SPE", "PER"}) {
      const std::string name = std::string(tag) + type;
      std::size_t tp = 0, np = 0, ng = 0;
      for (std::size_t i = 0; i < gold.size(); ++i) {
        np += pred[i].str() == name;
        ng += gold[i].str() == name;
        tp += pred[i].str() == name && gold[i].str() == name;
      }
      const double p = ratio(tp, np);
      const double r = ratio(tp, ng);
      out[name] = {p, r, f1_of(p, r), static_cast<double>(ng)};
    }
  }
  return out;
}

inline std::vector<archner::BioLabel> random_label_sequence(Rng& rng, std::size_t length,
                                                            double outside_rate = 0.5) {
  std::vector<archner::BioLabel> out;
  for (std::size_t i = 0; i < length; ++i) {
    out.push_back(coin(rng, outside_rate)
                      ? archner::BioLabel::outside()
                      : archner::BioLabel::from_index(static_cast<std::size_t>(uniform_int(rng, 1, 12))));
  }
  return out;
}

/// Per-token majority label, or the priority model's label on a three-way split.
inline archner::BioLabel vote(const std::vector<archner::BioLabel>& labels, std::size_t priority) {
  std::map<std::string, int> counts;
  for (const auto& l : labels) ++counts[l.str()];
  for (const auto& l : labels) {
    if (counts[l.str()] >= 2) return l;
  }
  return labels[priority];
}

// ---------------------------------------------------------------------------
// Search

/// ASCII-only term splitter for fuzzed pages built from ASCII text.
inline std::vector<std::string> ascii_terms(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (alnum) {
      cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// Point-in-convex-polygon by cross-product signs (edges and vertices count
/// as inside). Only valid for convex polygons.
inline bool inside_convex(const archner::search::GeoPoint& p,
                          const std::vector<archner::search::GeoPoint>& poly) {
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    pos |= cross > 0;
    neg |= cross < 0;
  }
  return !(pos && neg);
}

struct ScanHit {
  std::string doc_id;
  int page_no = 0;
  double score = 0.0;
};

struct ScanResult {
  std::vector<ScanHit> hits;  // every match, ranked
  std::map<std::string, std::map<std::string, std::size_t>> facets;
};

/// Full scan: checks every filter predicate on every page, scores with the
/// documented TF-IDF formula, and sorts by score then key. Polygons must be
/// convex.
inline ScanResult naive_search(const std::vector<archner::search::PageRecord>& pages,
                               const archner::search::Query& q) {
  using archner::search::DateMode;
  std::vector<std::string> terms;
  if (q.fulltext) {
    for (const auto& t : ascii_terms(*q.fulltext)) {
      if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
    }
  }
  std::map<std::string, std::size_t> df;
  for (const auto& p : pages) {
    const auto ts = ascii_terms(p.text);
    for (const auto& t : std::set<std::string>(ts.begin(), ts.end())) ++df[t];
  }
  ScanResult out;
  for (const auto& p : pages) {
    bool ok = true;
    for (const auto& [type, wanted] : q.entity_filters) {
      for (const auto& w : wanted) {
        const auto it = p.entities.find(type);
        ok = ok && it != p.entities.end() &&
             std::count(it->second.begin(), it->second.end(), w) > 0;
      }
    }
    if (q.date) {
      bool any = false;
      for (const auto& r : p.year_ranges) {
        if (q.date->mode == DateMode::Contain) {
          any |= r.start <= q.date->start && r.end >= q.date->end;
        } else {
          any |= !(r.end < q.date->start || r.start > q.date->end);
        }
      }
      ok = ok && any;
    }
    if (q.facet_filters.doc_type) ok = ok && p.metadata.doc_type == *q.facet_filters.doc_type;
    if (q.facet_filters.subject) ok = ok && p.metadata.subject == *q.facet_filters.subject;
    if (!q.bbox_or_polygon.empty()) {
      ok = ok && p.metadata.coord.has_value() && inside_convex(*p.metadata.coord, q.bbox_or_polygon);
    }
    const auto page_terms = ascii_terms(p.text);
    if (!terms.empty()) {
      bool hit = false;
      for (const auto& t : terms) hit |= std::count(page_terms.begin(), page_terms.end(), t) > 0;
      ok = ok && hit;
    }
    if (!ok) continue;
    double score = 0.0;
    for (const auto& t : terms) {
      const auto tf = std::count(page_terms.begin(), page_terms.end(), t);
      if (tf == 0) continue;
      const double idf = 1.0 + std::log(static_cast<double>(pages.size()) / (df[t] + 1.0));
      score += std::sqrt(static_cast<double>(tf)) * idf * idf /
               std::sqrt(static_cast<double>(page_terms.size()));
    }
    out.hits.push_back({p.doc_id, p.page_no, score});
    if (!p.metadata.doc_type.empty()) ++out.facets["doc_type"][p.metadata.doc_type];
    if (!p.metadata.subject.empty()) ++out.facets["subject"][p.metadata.subject];
  }
  std::sort(out.hits.begin(), out.hits.end(), [](const ScanHit& a, const ScanHit& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
    return a.page_no < b.page_no;
  });
  return out;
}

/// True when `got` lists the same pages as `want` with matching scores, and
/// any difference in order is between pages whose scores agree within `tol`.
inline bool same_ranking(const std::vector<archner::search::Hit>& got, const std::vector<ScanHit>& want,
                         double tol) {
  if (got.size() != want.size()) return false;
  std::map<std::pair<std::string, int>, double> want_score;
  for (const auto& h : want) want_score[{h.doc_id, h.page_no}] = h.score;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const auto it = want_score.find({got[i].doc_id, got[i].page_no});
    if (it == want_score.end()) return false;
    if (std::abs(it->second - got[i].score) > tol) return false;
    if (std::abs(want[i].score - got[i].score) > tol) return false;
    want_score.erase(it);
  }
  return true;
}

inline const std::vector<std::string>& fuzz_words() {
  static const std::vector<std::string> words = {"urn",   "pit",   "ditch", "flint", "bronze",
                                                 "upside", "down", "grave", "sherd", "posthole",
                                                 "the",   "a",     "of",    "in",    "with"};
  return words;
}

/// Random ASCII pages on a small vocabulary with integer coordinates in
/// [0, 10], so filters and boundaries are hit often.
inline std::vector<archner::search::PageRecord> random_pages(Rng& rng, std::size_t count) {
  using archner::EntityType;
  const std::vector<std::string> surfaces = {"urn", "pit", "cremation", "axe", "flint", "swifterbant"};
  const std::vector<std::string> doc_types = {"excavation report", "survey report", ""};
  const std::vector<std::string> subjects = {"burial", "settlement", ""};
  std::vector<archner::search::PageRecord> pages;
  std::set<std::pair<std::string, int>> used;
  while (pages.size() < count) {
    archner::search::PageRecord p;
    p.doc_id = "doc" + std::to_string(uniform_int(rng, 0, 9));
    p.page_no = uniform_int(rng, 1, 9);
    if (!used.insert({p.doc_id, p.page_no}).second) continue;
    const int len = uniform_int(rng, 0, 14);
    for (int i = 0; i < len; ++i) {
      if (i) p.text += coin(rng, 0.8) ? " " : ", ";
      std::string w = pick(rng, fuzz_words());
      if (coin(rng, 0.2)) w[0] = static_cast<char>(w[0] - 'a' + 'A');
      p.text += w;
    }
    for (auto type : {EntityType::ART, EntityType::CON, EntityType::LOC}) {
      const int n = uniform_int(rng, 0, 2);
      for (int i = 0; i < n; ++i) p.entities[type].push_back(pick(rng, surfaces));
    }
    const int ranges = uniform_int(rng, 0, 2);
    for (int i = 0; i < ranges; ++i) {
      const int a = uniform_int(rng, -30, 20) * 100;
      p.year_ranges.push_back({a, a + uniform_int(rng, 0, 15) * 100});
    }
    p.metadata.doc_type = pick(rng, doc_types);
    p.metadata.subject = pick(rng, subjects);
    if (coin(rng, 0.8)) {
      p.metadata.coord = archner::search::GeoPoint{static_cast<double>(uniform_int(rng, 0, 10)),
                                                   static_cast<double>(uniform_int(rng, 0, 10))};
    }
    pages.push_back(std::move(p));
  }
  return pages;
}

inline archner::search::Query random_query(Rng& rng) {
  using archner::EntityType;
  archner::search::Query q;
  const std::vector<std::string> surfaces = {"urn", "pit", "cremation", "axe", "flint", "swifterbant"};
  if (coin(rng, 0.4)) {
    const int n = uniform_int(rng, 1, 2);
    for (int i = 0; i < n; ++i) {
      q.entity_filters[pick(rng, std::vector<EntityType>{EntityType::ART, EntityType::CON,
                                                         EntityType::LOC})]
          .push_back(pick(rng, surfaces));
    }
  }
  if (coin(rng, 0.4)) {
    archner::search::DateFilter d;
    d.mode = coin(rng) ? archner::search::DateMode::Contain : archner::search::DateMode::Overlap;
    d.start = uniform_int(rng, -30, 20) * 100;
    d.end = d.start + uniform_int(rng, 0, 10) * 100;
    q.date = d;
  }
  if (coin(rng, 0.6)) {
    std::string text;
    const int n = uniform_int(rng, 1, 3);
    for (int i = 0; i < n; ++i) text += (i ? " " : "") + pick(rng, fuzz_words());
    q.fulltext = text;
  }
  if (coin(rng, 0.3)) q.facet_filters.doc_type = coin(rng) ? "excavation report" : "survey report";
  if (coin(rng, 0.3)) q.facet_filters.subject = coin(rng) ? "burial" : "settlement";
  if (coin(rng, 0.4)) {
    if (coin(rng)) {
      const double x0 = uniform_int(rng, 0, 6), y0 = uniform_int(rng, 0, 6);
      const double x1 = x0 + uniform_int(rng, 1, 4), y1 = y0 + uniform_int(rng, 1, 4);
      q.bbox_or_polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    } else {
      // Counter-clockwise triangle with integer vertices.
      archner::search::GeoPoint a{static_cast<double>(uniform_int(rng, 0, 4)),
                                  static_cast<double>(uniform_int(rng, 0, 4))};
      archner::search::GeoPoint b{a.lon + uniform_int(rng, 2, 6), a.lat};
      archner::search::GeoPoint c{a.lon + uniform_int(rng, 0, 6), a.lat + uniform_int(rng, 2, 6)};
      q.bbox_or_polygon = {a, b, c};
    }
  }
  q.size = 1000;
  return q;
}

}  // namespace oracle
