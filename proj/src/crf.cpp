#include "archner/crf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "archner/error.hpp"
#include "archner/eval.hpp"

namespace archner::crf {

using nlohmann::json;

namespace {

constexpr std::string_view kFormat = "archner-crf/1";

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void check_features(const CrfModel& model, const Observation& x) {
  for (const auto& fv : x)
    for (auto f : fv)
      if (f >= model.num_features()) {
        throw Error("feature id " + std::to_string(f) + " outside the model's feature table");
      }
}

/// T x L matrix of summed state weights.
Matrix state_scores(const CrfModel& model, const Observation& x) {
  const std::size_t L = model.num_labels();
  Matrix s(x.size(), L);
  const auto w = model.weights();
  for (std::size_t t = 0; t < x.size(); ++t) {
    for (auto f : x[t]) {
      const double* row = w.data() + model.state_index(f, 0);
      for (std::size_t l = 0; l < L; ++l) s(t, l) += row[l];
    }
  }
  return s;
}

struct Lattice {
  Matrix state;
  Matrix alpha;
  Matrix beta;
  double log_z = 0.0;
};

Lattice forward_backward(const CrfModel& model, const Observation& x, bool with_beta) {
  const std::size_t T = x.size();
  const std::size_t L = model.num_labels();
  Lattice lat;
  lat.state = state_scores(model, x);
  lat.alpha = Matrix(T, L);
  std::vector<double> buf(L);
  for (std::size_t j = 0; j < L; ++j) lat.alpha(0, j) = model.start_weight(j) + lat.state(0, j);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < L; ++j) {
      for (std::size_t i = 0; i < L; ++i) buf[i] = lat.alpha(t - 1, i) + model.transition_weight(i, j);
      lat.alpha(t, j) = log_sum_exp(buf) + lat.state(t, j);
    }
  }
  lat.log_z = log_sum_exp({&lat.alpha.data[(T - 1) * L], L});
  if (with_beta) {
    lat.beta = Matrix(T, L);
    for (std::size_t t = T - 1; t-- > 0;) {
      for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
          buf[j] = model.transition_weight(i, j) + lat.state(t + 1, j) + lat.beta(t + 1, j);
        }
        lat.beta(t, i) = log_sum_exp(buf);
      }
    }
  }
  return lat;
}

}  // namespace

CrfModel::CrfModel(std::vector<BioLabel> labels, std::vector<std::string> feature_names,
                   CrfHyperparams hyper)
    : labels_(std::move(labels)), feature_names_(std::move(feature_names)), hyper_(hyper) {
  if (labels_.empty()) throw Error("a CRF needs at least one label");
  for (std::size_t i = 0; i < labels_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (labels_[i] == labels_[j]) throw Error("duplicate label " + labels_[i].str());
  feature_index_.reserve(feature_names_.size());
  for (std::size_t f = 0; f < feature_names_.size(); ++f) {
    if (!feature_index_.emplace(feature_names_[f], static_cast<std::uint32_t>(f)).second) {
      throw Error("duplicate feature name " + feature_names_[f]);
    }
  }
  const std::size_t L = labels_.size();
  weights_.assign(feature_names_.size() * L + L * L + L, 0.0);
}

std::optional<std::uint32_t> CrfModel::feature_id(const std::string& name) const {
  const auto it = feature_index_.find(name);
  if (it == feature_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> CrfModel::label_index(BioLabel label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::string CrfModel::to_json() const {
  const std::size_t L = labels_.size();
  json j;
  j["format"] = kFormat;
  j["labels"] = json::array();
  for (const auto& l : labels_) j["labels"].push_back(l.str());
  j["hyper"] = {{"c1", hyper_.c1},
                {"c2", hyper_.c2},
                {"max_iterations", hyper_.max_iterations},
                {"convergence_tol", hyper_.convergence_tol}};
  json state = json::object();
  for (std::size_t f = 0; f < feature_names_.size(); ++f) {
    json row = json::object();
    for (std::size_t l = 0; l < L; ++l) {
      const double w = state_weight(f, l);
      if (w != 0.0) row[labels_[l].str()] = w;
    }
    if (!row.empty()) state[feature_names_[f]] = std::move(row);
  }
  j["state_weights"] = std::move(state);
  json trans = json::array();
  for (std::size_t p = 0; p < L; ++p) {
    json row = json::array();
    for (std::size_t c = 0; c < L; ++c) row.push_back(transition_weight(p, c));
    trans.push_back(std::move(row));
  }
  j["transitions"] = std::move(trans);
  json start = json::array();
  for (std::size_t c = 0; c < L; ++c) start.push_back(start_weight(c));
  j["start"] = std::move(start);
  return j.dump(1);
}

CrfModel CrfModel::from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) {
      throw Error("unsupported model format " + j.at("format").get<std::string>());
    }
    std::vector<BioLabel> labels;
    for (const auto& l : j.at("labels")) {
      auto label = parse_label(l.get<std::string>());
      if (!label) throw Error("bad label in model: " + l.get<std::string>());
      labels.push_back(*label);
    }
    CrfHyperparams hyper;
    const auto& h = j.at("hyper");
    hyper.c1 = h.at("c1").get<double>();
    hyper.c2 = h.at("c2").get<double>();
    hyper.max_iterations = h.at("max_iterations").get<std::size_t>();
    hyper.convergence_tol = h.at("convergence_tol").get<double>();

    std::vector<std::string> names;
    for (const auto& [name, row] : j.at("state_weights").items()) names.push_back(name);
    CrfModel model(labels, names, hyper);
    std::size_t f = 0;
    for (const auto& [name, row] : j.at("state_weights").items()) {
      for (const auto& [label, w] : row.items()) {
        const auto parsed = parse_label(label);
        const auto idx = parsed ? model.label_index(*parsed) : std::nullopt;
        if (!idx) throw Error("unknown label " + label + " for feature " + name);
        model.weights_[model.state_index(f, *idx)] = w.get<double>();
      }
      ++f;
    }
    const std::size_t L = labels.size();
    const auto& trans = j.at("transitions");
    const auto& start = j.at("start");
    if (trans.size() != L || start.size() != L) throw Error("transition matrix has wrong shape");
    for (std::size_t p = 0; p < L; ++p) {
      if (trans[p].size() != L) throw Error("transition matrix has wrong shape");
      for (std::size_t c = 0; c < L; ++c)
        model.weights_[model.transition_index(p, c)] = trans[p][c].get<double>();
    }
    for (std::size_t c = 0; c < L; ++c) model.weights_[model.start_index(c)] = start[c].get<double>();
    return model;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

void CrfModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << '\n';
}

CrfModel CrfModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<Matrix> log_potentials(const CrfModel& model, const Observation& x) {
  if (x.empty()) throw Error("empty observation sequence");
  check_features(model, x);
  const std::size_t L = model.num_labels();
  const auto state = state_scores(model, x);
  std::vector<Matrix> out;
  out.reserve(x.size());
  Matrix first(1, L);
  for (std::size_t c = 0; c < L; ++c) first(0, c) = model.start_weight(c) + state(0, c);
  out.push_back(std::move(first));
  for (std::size_t t = 1; t < x.size(); ++t) {
    Matrix m(L, L);
    for (std::size_t p = 0; p < L; ++p)
      for (std::size_t c = 0; c < L; ++c) m(p, c) = model.transition_weight(p, c) + state(t, c);
    out.push_back(std::move(m));
  }
  return out;
}

double log_partition(const CrfModel& model, const Observation& x) {
  if (x.empty()) throw Error("empty observation sequence");
  check_features(model, x);
  return forward_backward(model, x, false).log_z;
}

double sequence_score(const CrfModel& model, const Observation& x,
                      std::span<const std::size_t> labels) {
  if (labels.size() != x.size()) throw Error("label sequence length differs from observation");
  double s = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const auto y = labels[t];
    if (y >= model.num_labels()) throw Error("label index outside the model's label set");
    s += t == 0 ? model.start_weight(y) : model.transition_weight(labels[t - 1], y);
    for (auto f : x[t]) s += model.state_weight(f, y);
  }
  return s;
}

NllResult nll_and_gradient(const CrfModel& model, std::span<const Instance> dataset) {
  const std::size_t L = model.num_labels();
  NllResult res;
  res.gradient.assign(model.num_weights(), 0.0);
  auto& g = res.gradient;
  const auto w = model.weights();

  for (const auto& inst : dataset) {
    if (inst.x.empty()) continue;
    check_features(model, inst.x);
    const double gold = sequence_score(model, inst.x, inst.y);
    const auto lat = forward_backward(model, inst.x, true);
    res.value += lat.log_z - gold;

    const std::size_t T = inst.x.size();
    std::vector<double> marg(L);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t l = 0; l < L; ++l) marg[l] = std::exp(lat.alpha(t, l) + lat.beta(t, l) - lat.log_z);
      for (auto f : inst.x[t]) {
        double* row = g.data() + model.state_index(f, 0);
        for (std::size_t l = 0; l < L; ++l) row[l] += marg[l];
        row[inst.y[t]] -= 1.0;
      }
      if (t == 0) {
        for (std::size_t l = 0; l < L; ++l) g[model.start_index(l)] += marg[l];
        g[model.start_index(inst.y[0])] -= 1.0;
      } else {
        for (std::size_t p = 0; p < L; ++p) {
          for (std::size_t c = 0; c < L; ++c) {
            g[model.transition_index(p, c)] +=
                std::exp(lat.alpha(t - 1, p) + model.transition_weight(p, c) + lat.state(t, c) +
                         lat.beta(t, c) - lat.log_z);
          }
        }
        g[model.transition_index(inst.y[t - 1], inst.y[t])] -= 1.0;
      }
    }
  }

  const double c2 = model.hyper().c2;
  if (c2 > 0.0) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      res.value += c2 * w[i] * w[i];
      g[i] += 2.0 * c2 * w[i];
    }
  }
  return res;
}

CrfModel train(std::vector<BioLabel> labels, std::vector<std::string> feature_names,
               std::span<const Instance> dataset, const CrfHyperparams& hyper,
               TrainingReport* report) {
  if (dataset.empty()) throw Error("cannot train on an empty dataset");
  if (hyper.c1 < 0.0 || hyper.c2 < 0.0) throw Error("regularization coefficients must be >= 0");
  CrfModel model(std::move(labels), std::move(feature_names), hyper);
  for (const auto& inst : dataset) {
    if (inst.x.size() != inst.y.size()) throw Error("instance labels and features differ in length");
    for (auto y : inst.y)
      if (y >= model.num_labels()) throw Error("gold label outside the model's label set");
    check_features(model, inst.x);
  }

  optim::LbfgsOptions opt;
  opt.l1 = hyper.c1;
  opt.epsilon = hyper.convergence_tol;
  opt.max_iterations = hyper.max_iterations;

  optim::Objective objective = [&](std::span<const double> x, std::span<double> grad) {
    std::copy(x.begin(), x.end(), model.weights().begin());
    auto r = nll_and_gradient(model, dataset);
    std::copy(r.gradient.begin(), r.gradient.end(), grad.begin());
    if (!std::isfinite(r.value)) {
      throw Error("training objective became non-finite (" + std::to_string(r.value) + ")");
    }
    return r.value;
  };
  auto result = optim::minimize(objective, std::vector<double>(model.num_weights(), 0.0), opt);
  std::copy(result.x.begin(), result.x.end(), model.weights().begin());
  if (report) {
    report->status = result.status;
    report->iterations = result.iterations;
    report->objective = result.value;
    report->history = std::move(result.history);
  }
  return model;
}

Decoded viterbi(const CrfModel& model, const Observation& x) {
  if (x.empty()) throw Error("empty observation sequence");
  check_features(model, x);
  const std::size_t T = x.size();
  const std::size_t L = model.num_labels();
  const auto state = state_scores(model, x);
  Matrix delta(T, L);
  std::vector<std::size_t> back(T * L, 0);
  for (std::size_t j = 0; j < L; ++j) delta(0, j) = model.start_weight(j) + state(0, j);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < L; ++j) {
      std::size_t best = 0;
      double best_score = delta(t - 1, 0) + model.transition_weight(0, j);
      for (std::size_t i = 1; i < L; ++i) {
        const double s = delta(t - 1, i) + model.transition_weight(i, j);
        if (s > best_score) {
          best_score = s;
          best = i;
        }
      }
      delta(t, j) = best_score + state(t, j);
      back[t * L + j] = best;
    }
  }
  Decoded out;
  out.labels.assign(T, 0);
  std::size_t last = 0;
  for (std::size_t j = 1; j < L; ++j)
    if (delta(T - 1, j) > delta(T - 1, last)) last = j;
  out.score = delta(T - 1, last);
  out.labels[T - 1] = last;
  for (std::size_t t = T - 1; t > 0; --t) out.labels[t - 1] = back[t * L + out.labels[t]];
  return out;
}

std::vector<std::pair<double, double>> default_grid() {
  std::vector<std::pair<double, double>> grid;
  for (double c1 : {0.0, 0.01, 0.1, 1.0})
    for (double c2 : {0.01, 0.1, 1.0}) grid.emplace_back(c1, c2);
  return grid;
}

TuningResult tune_c1_c2(const std::vector<BioLabel>& labels,
                        const std::vector<std::string>& feature_names,
                        std::span<const Instance> train_set, std::span<const Instance> dev_set,
                        const std::vector<std::pair<double, double>>& grid,
                        const CrfHyperparams& base) {
  if (grid.empty()) throw Error("hyperparameter grid is empty");
  std::vector<BioLabel> gold;
  for (const auto& inst : dev_set)
    for (auto y : inst.y) gold.push_back(labels.at(y));

  TuningResult result;
  bool have_best = false;
  for (const auto& [c1, c2] : grid) {
    CrfHyperparams h = base;
    h.c1 = c1;
    h.c2 = c2;
    const auto model = train(labels, feature_names, train_set, h);
    std::vector<BioLabel> pred;
    for (const auto& inst : dev_set) {
      if (inst.x.empty()) continue;
      for (auto y : viterbi(model, inst.x).labels) pred.push_back(labels[y]);
    }
    const double f1 = eval::score(gold, pred).micro.f1;
    result.scores.emplace_back(h, f1);
    const bool better = !have_best || f1 > result.best_f1 ||
                        (f1 == result.best_f1 && c1 + c2 < result.best.c1 + result.best.c2);
    if (better) {
      result.best = h;
      result.best_f1 = f1;
      have_best = true;
    }
  }
  return result;
}

}  // namespace archner::crf
