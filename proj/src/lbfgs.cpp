#include "archner/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "archner/error.hpp"

namespace archner::optim {

std::string_view to_string(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::Converged: return "converged";
    case LbfgsStatus::MaxIterations: return "max-iterations";
    case LbfgsStatus::LineSearchFailed: return "line-search-failed";
    case LbfgsStatus::Stalled: return "stalled";
  }
  return "?";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

void pseudo_gradient(std::span<const double> x, std::span<const double> g, double c,
                     std::span<double> pg) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) {
      pg[i] = g[i] - c;
    } else if (x[i] > 0.0) {
      pg[i] = g[i] + c;
    } else if (g[i] + c < 0.0) {
      pg[i] = g[i] + c;
    } else if (g[i] - c > 0.0) {
      pg[i] = g[i] - c;
    } else {
      pg[i] = 0.0;
    }
  }
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double ys;
};

}  // namespace

LbfgsResult minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& opt) {
  const std::size_t n = x0.size();
  const bool owlqn = opt.l1 > 0.0;

  LbfgsResult res;
  res.x = std::move(x0);
  auto& x = res.x;

  std::vector<double> g(n), pg(n), d(n), xp(n), gp(n), pgp(n), wp(n);
  auto evaluate = [&](std::span<double> grad) {
    double fx = f(x, grad);
    if (owlqn) fx += opt.l1 * norm1(x);
    if (!std::isfinite(fx)) throw Error("objective is not finite");
    return fx;
  };

  double fx = evaluate(g);
  if (owlqn) {
    pseudo_gradient(x, g, opt.l1, pg);
  } else {
    pg = g;
  }
  res.value = fx;
  res.history.push_back(fx);

  auto converged = [&] { return norm2(pg) / std::max(1.0, norm2(x)) <= opt.epsilon; };
  if (converged()) {
    res.status = LbfgsStatus::Converged;
    return res;
  }

  std::deque<Correction> memory;
  for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
  double step = 1.0 / norm2(d);

  for (std::size_t k = 0; k < opt.max_iterations; ++k) {
    xp = x;
    gp = g;
    pgp = pg;

    if (owlqn) {
      for (std::size_t i = 0; i < n; ++i) wp[i] = xp[i] != 0.0 ? xp[i] : -pgp[i];
    }
    const double dginit = dot(pgp, d);

    bool accepted = false;
    double fnew = fx;
    for (std::size_t ls = 0; ls < opt.max_linesearch; ++ls, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) x[i] = xp[i] + step * d[i];
      if (owlqn) {
        for (std::size_t i = 0; i < n; ++i)
          if (x[i] * wp[i] <= 0.0) x[i] = 0.0;
      }
      fnew = f(x, g);
      if (owlqn) fnew += opt.l1 * norm1(x);
      if (!std::isfinite(fnew)) continue;
      double decrease_bound = 0.0;
      if (owlqn) {
        for (std::size_t i = 0; i < n; ++i) decrease_bound += (x[i] - xp[i]) * pgp[i];
      } else {
        decrease_bound = step * dginit;
      }
      if (fnew <= fx + opt.armijo * decrease_bound) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      x = xp;
      g = gp;
      res.status = LbfgsStatus::LineSearchFailed;
      res.iterations = k;
      return res;
    }

    const double fprev = fx;
    fx = fnew;
    res.value = fx;
    res.history.push_back(fx);
    res.iterations = k + 1;

    if (owlqn) {
      pseudo_gradient(x, g, opt.l1, pg);
    } else {
      pg = g;
    }
    if (converged()) {
      res.status = LbfgsStatus::Converged;
      return res;
    }
    if (opt.past > 0 && res.history.size() > opt.past) {
      const double past_f = res.history[res.history.size() - 1 - opt.past];
      if ((past_f - fx) / std::max(1.0, std::abs(fx)) < opt.delta) {
        res.status = LbfgsStatus::Stalled;
        return res;
      }
    }
    if (fx >= fprev) {
      res.status = LbfgsStatus::Stalled;
      return res;
    }

    Correction c{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      c.s[i] = x[i] - xp[i];
      c.y[i] = g[i] - gp[i];
    }
    c.ys = dot(c.y, c.s);
    const double yy = dot(c.y, c.y);
    if (c.ys > 1e-12 * std::max(1.0, yy)) {
      memory.push_back(std::move(c));
      if (memory.size() > opt.memory) memory.pop_front();
    }

    // Two-loop recursion on the (pseudo-)gradient.
    for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
    std::vector<double> alpha(memory.size());
    for (std::size_t j = memory.size(); j-- > 0;) {
      alpha[j] = dot(memory[j].s, d) / memory[j].ys;
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[j] * memory[j].y[i];
    }
    if (!memory.empty()) {
      const auto& last = memory.back();
      const double scale = last.ys / dot(last.y, last.y);
      for (auto& v : d) v *= scale;
    }
    for (std::size_t j = 0; j < memory.size(); ++j) {
      const double beta = dot(memory[j].y, d) / memory[j].ys;
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[j] - beta) * memory[j].s[i];
    }
    if (owlqn) {
      for (std::size_t i = 0; i < n; ++i)
        if (d[i] * pg[i] >= 0.0) d[i] = 0.0;
    }
    if (dot(d, pg) >= 0.0) {
      // Not a descent direction; fall back to steepest descent.
      memory.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
      step = 1.0 / std::max(1e-12, norm2(d));
    } else {
      step = 1.0;
    }
  }
  res.status = LbfgsStatus::MaxIterations;
  return res;
}

}  // namespace archner::optim
