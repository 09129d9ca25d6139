#pragma once

// Derivative-free minimization over ensemble decompositions of a density
// matrix.
//
// Every ensemble {p_k, |phi_k>} of rho arises as the columns w_k of
// W = W0 V, where W0 = [sqrt(lambda_j) |a_j>] comes from the spectral
// decomposition and V is an r x K isometry; p_k = <w_k|w_k>. The search walks
// the isometries by applying two-column unitary rotations to W, so each trial
// move only touches two ensemble members. A `Term` maps an unnormalized
// column w to p * g(w / |w|), and the objective is the sum over columns.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "entmono/linalg.hpp"
#include "entmono/random.hpp"
#include "entmono/states.hpp"

namespace entmono {

struct OptimizerConfig {
  int restarts = 16;
  int max_sweeps = 200;
  double step_tolerance = 1e-7;
  std::size_t ensemble_size = 0;  // 0: rank^2 for the convex roof, d_A*d_B for REE
  Seed seed = 0;

  void check() const {
    if (restarts <= 0) fail(ErrorCode::invalid_argument, "restarts must be positive");
    if (max_sweeps <= 0) fail(ErrorCode::invalid_argument, "max_sweeps must be positive");
    if (!(step_tolerance > 0.0)) fail(ErrorCode::invalid_argument, "step_tolerance must be positive");
  }
};

struct RoofSolution {
  double value = 0.0;
  int iterations = 0;   // sweeps used by the winning restart
  double residual = 0.0;  // improvement in that restart's last sweep
  bool converged = true;
  std::size_t rank = 0;
  std::vector<Vector> columns;  // unnormalized ensemble vectors
};

namespace detail {

inline constexpr double golden = 0.6180339887498949;

// Golden-section search for a minimum of f on [lo, hi].
template <typename F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, double x_tol) {
  double a = lo, b = hi;
  double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > x_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - golden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + golden * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

inline void rotate_pair(const Vector& wi, const Vector& wj, double theta, cplx phase, Vector& out_i, Vector& out_j) {
  const double c = std::cos(theta), s = std::sin(theta);
  const cplx sp = s * phase, sm = -s * std::conj(phase);
  for (std::size_t k = 0; k < wi.dim(); ++k) {
    out_i[k] = c * wi[k] + sp * wj[k];
    out_j[k] = sm * wi[k] + c * wj[k];
  }
}

template <typename Term>
struct RoofRun {
  const Term& term;
  std::vector<Vector> w;
  std::vector<double> terms;
  Vector scratch_i, scratch_j;

  double total() const {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }

  double pair_value(std::size_t i, std::size_t j, double theta, cplx phase) {
    rotate_pair(w[i], w[j], theta, phase, scratch_i, scratch_j);
    return term(scratch_i.data()) + term(scratch_j.data());
  }

  // One coordinate step on the (i, j) rotation angle for a fixed phase.
  // Returns the decrease achieved (>= 0).
  double optimize_pair(std::size_t i, std::size_t j, cplx phase) {
    const double f0 = terms[i] + terms[j];
    constexpr int grid = 8;
    const double step = std::numbers::pi / grid;
    double best_theta = 0.0, best = f0;
    for (int k = 0; k < grid; ++k) {
      const double theta = -std::numbers::pi / 2 + k * step;
      if (k == grid / 2) continue;  // theta = 0
      const double f = pair_value(i, j, theta, phase);
      if (f < best) {
        best = f;
        best_theta = theta;
      }
    }
    auto [theta, f] = golden_section([&](double t) { return pair_value(i, j, t, phase); }, best_theta - step,
                                     best_theta + step, 1e-6);
    if (f < best) {
      best = f;
      best_theta = theta;
    }
    if (!(best < f0)) return 0.0;
    rotate_pair(w[i], w[j], best_theta, phase, scratch_i, scratch_j);
    w[i] = scratch_i;
    w[j] = scratch_j;
    terms[i] = term(w[i].data());
    terms[j] = term(w[j].data());
    return f0 - (terms[i] + terms[j]);
  }
};

}  // namespace detail

template <typename Term>
RoofSolution minimize_convex_roof(const Matrix& rho, const Term& term, const OptimizerConfig& cfg) {
  cfg.check();
  EigenSystem es = hermitian_eig(rho);
  clip_psd(es.values);
  std::size_t rank = 0;
  while (rank < es.values.size() && es.values[rank] > rank_threshold) ++rank;
  if (rank == 0) fail(ErrorCode::not_psd, "zero density matrix");

  const std::size_t d = rho.dim();
  std::vector<Vector> w0;
  for (std::size_t k = 0; k < rank; ++k) w0.push_back(std::sqrt(es.values[k]) * es.vectors[k]);

  RoofSolution best;
  best.rank = rank;
  if (rank == 1) {
    best.value = term(w0[0].data());
    best.columns = w0;
    return best;
  }

  const std::size_t k_size = cfg.ensemble_size == 0 ? rank * rank : cfg.ensemble_size;
  if (k_size < rank * rank)
    fail(ErrorCode::invalid_argument,
         "ensemble_size " + std::to_string(k_size) + " below rank^2 = " + std::to_string(rank * rank));

  best.value = std::numeric_limits<double>::infinity();
  const cplx phases[] = {cplx(1.0, 0.0), cplx(0.0, 1.0)};
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    // Restart 0 starts from the spectral ensemble, padded with empty members.
    Matrix u = Matrix::identity(k_size);
    if (restart > 0) {
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
      u = haar_random_unitary(k_size, rng);
    }
    detail::RoofRun<Term> run{term, {}, {}, Vector(d), Vector(d)};
    for (std::size_t col = 0; col < k_size; ++col) {
      Vector wk(d);
      for (std::size_t j = 0; j < rank; ++j) wk += u(j, col) * w0[j];
      run.terms.push_back(term(wk.data()));
      run.w.push_back(std::move(wk));
    }

    int sweeps = 0;
    double last_gain = 0.0;
    bool converged = false;
    while (sweeps < cfg.max_sweeps) {
      ++sweeps;
      const double before = run.total();
      for (std::size_t i = 0; i + 1 < k_size; ++i)
        for (std::size_t j = i + 1; j < k_size; ++j) {
          if (run.w[i].norm_squared() + run.w[j].norm_squared() < 1e-30) continue;
          for (const cplx& ph : phases) run.optimize_pair(i, j, ph);
        }
      last_gain = before - run.total();
      if (last_gain < cfg.step_tolerance) {
        converged = true;
        break;
      }
    }

    const double value = run.total();
    if (value < best.value) {
      best.value = value;
      best.iterations = sweeps;
      best.residual = last_gain;
      best.converged = converged;
      best.columns = std::move(run.w);
    }
  }
  return best;
}

}  // namespace entmono
