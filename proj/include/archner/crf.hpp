#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "archner/bio.hpp"
#include "archner/lbfgs.hpp"

namespace archner::crf {

/// Active binary observation features at one position.
using FeatureVector = std::vector<std::uint32_t>;
using Observation = std::vector<FeatureVector>;

struct CrfHyperparams {
  double c1 = 0.0;  ///< L1 coefficient
  double c2 = 0.1;  ///< L2 coefficient
  std::size_t max_iterations = 200;
  double convergence_tol = 1e-5;

  friend bool operator==(const CrfHyperparams&, const CrfHyperparams&) = default;
};

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Linear-chain CRF with a distinguished START row and no STOP transition.
///
/// Weights are stored in one flat vector: state weights (feature-major,
/// num_features x num_labels), then label-to-label transitions
/// (num_labels x num_labels), then START transitions (num_labels).
class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(std::vector<BioLabel> labels, std::vector<std::string> feature_names,
           CrfHyperparams hyper = {});

  std::size_t num_labels() const { return labels_.size(); }
  std::size_t num_features() const { return feature_names_.size(); }
  std::size_t num_weights() const { return weights_.size(); }
  const std::vector<BioLabel>& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const CrfHyperparams& hyper() const { return hyper_; }
  void set_hyper(const CrfHyperparams& h) { hyper_ = h; }

  std::optional<std::uint32_t> feature_id(const std::string& name) const;
  std::optional<std::size_t> label_index(BioLabel label) const;

  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }

  std::size_t state_index(std::size_t feature, std::size_t label) const {
    return feature * labels_.size() + label;
  }
  std::size_t transition_index(std::size_t prev, std::size_t cur) const {
    return feature_names_.size() * labels_.size() + prev * labels_.size() + cur;
  }
  std::size_t start_index(std::size_t cur) const {
    return feature_names_.size() * labels_.size() + labels_.size() * labels_.size() + cur;
  }

  double state_weight(std::size_t f, std::size_t l) const { return weights_[state_index(f, l)]; }
  double transition_weight(std::size_t p, std::size_t c) const {
    return weights_[transition_index(p, c)];
  }
  double start_weight(std::size_t c) const { return weights_[start_index(c)]; }

  /// Structured text (JSON) with a format tag. Zero state weights are omitted.
  std::string to_json() const;
  static CrfModel from_json(std::string_view json);
  void save(const std::string& path) const;
  static CrfModel load(const std::string& path);

 private:
  std::vector<BioLabel> labels_;
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, std::uint32_t> feature_index_;
  CrfHyperparams hyper_;
  std::vector<double> weights_;
};

/// Per-position log potentials. Position 0 is a 1 x L matrix (the START
/// row); every later position is L x L indexed (previous, current).
std::vector<Matrix> log_potentials(const CrfModel& model, const Observation& x);

double log_partition(const CrfModel& model, const Observation& x);

/// Unnormalized log score of a label sequence (label indices).
double sequence_score(const CrfModel& model, const Observation& x,
                      std::span<const std::size_t> labels);

struct Instance {
  Observation x;
  std::vector<std::size_t> y;  ///< label indices into the model's label list
};

struct NllResult {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Negative log-likelihood plus c2 * ||w||^2, with its exact gradient.
/// The L1 term is left to the optimizer.
NllResult nll_and_gradient(const CrfModel& model, std::span<const Instance> dataset);

struct TrainingReport {
  optim::LbfgsStatus status = optim::LbfgsStatus::MaxIterations;
  std::size_t iterations = 0;
  double objective = 0.0;
  std::vector<double> history;
};

/// Fits weights from zero initialization with L-BFGS (OWL-QN when c1 > 0).
CrfModel train(std::vector<BioLabel> labels, std::vector<std::string> feature_names,
               std::span<const Instance> dataset, const CrfHyperparams& hyper,
               TrainingReport* report = nullptr);

struct Decoded {
  std::vector<std::size_t> labels;
  double score = 0.0;
};

/// Max-product decoding; ties go to the lowest label index.
Decoded viterbi(const CrfModel& model, const Observation& x);

/// The defaults searched when no grid is given.
std::vector<std::pair<double, double>> default_grid();

struct TuningResult {
  CrfHyperparams best;
  double best_f1 = 0.0;
  std::vector<std::pair<CrfHyperparams, double>> scores;
};

/// Trains one model per (c1, c2) grid point and keeps the one with the
/// highest dev micro F1; ties prefer the smaller c1 + c2.
TuningResult tune_c1_c2(const std::vector<BioLabel>& labels,
                        const std::vector<std::string>& feature_names,
                        std::span<const Instance> train_set, std::span<const Instance> dev_set,
                        const std::vector<std::pair<double, double>>& grid,
                        const CrfHyperparams& base = {});

}  // namespace archner::crf
