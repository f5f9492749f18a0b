#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace archner::optim {

/// Smooth part of the objective: returns f(x) and writes ∇f(x) into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  std::size_t memory = 6;
  /// Coefficient of the L1 term added to the objective; > 0 switches to the
  /// orthant-wise (OWL-QN) iteration.
  double l1 = 0.0;
  /// Stop when ||pseudo-gradient|| / max(1, ||x||) falls to this value.
  double epsilon = 1e-5;
  std::size_t max_iterations = 200;
  std::size_t max_linesearch = 40;
  double armijo = 1e-4;
  /// Optional stop on relative objective decrease over `past` iterations
  /// (0 disables).
  std::size_t past = 0;
  double delta = 1e-6;
};

enum class LbfgsStatus { Converged, MaxIterations, LineSearchFailed, Stalled };

std::string_view to_string(LbfgsStatus s);

struct LbfgsResult {
  std::vector<double> x;
  /// Full objective (smooth part plus L1 term) at `x`.
  double value = 0.0;
  std::size_t iterations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  /// Objective at the start and after every accepted step.
  std::vector<double> history;
};

/// Limited-memory BFGS with a backtracking Armijo line search; OWL-QN when
/// options.l1 > 0. Throws archner::Error when the objective is not finite.
LbfgsResult minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& options);

}  // namespace archner::optim
