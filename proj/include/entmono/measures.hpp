#pragma once

// Entanglement measures. All logarithms are base 2 (values in bits) except
// the eta term of the Fannes bound, which uses the natural log.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "entmono/convex_roof.hpp"
#include "entmono/linalg.hpp"
#include "entmono/states.hpp"

namespace entmono {

enum class Method { closed_form, convex_roof, heuristic_upper_bound, exact_pure };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::convex_roof: return "convex_roof";
    case Method::heuristic_upper_bound: return "heuristic_upper_bound";
    case Method::exact_pure: return "exact_pure";
  }
  return "unknown";
}

// Mixture of product states sum_k w_k |a_k><a_k| (x) |b_k><b_k| across a cut.
struct SeparableForm {
  std::vector<double> weights;
  std::vector<Vector> factors_a;
  std::vector<Vector> factors_b;
  Matrix sigma;  // the mixture, in the state's original subsystem order
};

struct MeasureResult {
  double value = 0.0;
  Method method = Method::closed_form;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
  std::vector<EnsembleMember> ensemble;       // convex-roof certificate
  std::optional<SeparableForm> separable;     // relative-entropy certificate
};

namespace detail {

inline double clip_value(double v) { return (v < 0.0 && v >= -1e-12) ? 0.0 : v; }

// -sum lambda log2 lambda over clipped eigenvalues.
inline double entropy_of_spectrum(std::vector<double> values) {
  clip_psd(values);
  double s = 0.0;
  for (double x : values) s -= xlog2x(x);
  return std::max(0.0, s);
}

// p * S(w/|w|) for an unnormalized bipartite vector laid out as a da x db
// row-major block. Works on the smaller side; 2x2 uses the closed-form
// spectrum.
struct PureEntropyTerm {
  std::size_t da = 0;
  std::size_t db = 0;

  double operator()(std::span<const cplx> w) const {
    const bool rows = da <= db;
    const std::size_t n = rows ? da : db, m = rows ? db : da;
    auto at = [&](std::size_t i, std::size_t k) { return rows ? w[i * db + k] : w[k * db + i]; };
    double p = 0.0;
    for (const cplx& z : w) p += std::norm(z);
    if (p <= 1e-300) return 0.0;
    if (n == 1) return 0.0;
    if (n == 2) {
      double a = 0.0, c = 0.0;
      cplx b = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const cplx x = at(0, k), y = at(1, k);
        a += std::norm(x);
        c += std::norm(y);
        b += x * std::conj(y);
      }
      const double t = a + c;
      const double det = std::max(0.0, a * c - std::norm(b));
      const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det));
      const double hi = 0.5 * (t + disc);
      const double lo = hi > 0.0 ? det / hi : 0.0;
      return std::max(0.0, xlog2x(p) - xlog2x(hi) - xlog2x(lo));
    }
    Matrix r(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += at(i, k) * std::conj(at(j, k));
        r(i, j) = s;
        r(j, i) = std::conj(s);
      }
    auto values = eigenvalues(r);
    double s = xlog2x(p);
    for (double x : values) s -= xlog2x(std::max(0.0, x));
    return std::max(0.0, s);
  }
};

// p * C^2(w/|w|) across a qubit | rest cut: 4 det(rho_A) / p.
struct PureTangleTerm {
  std::size_t db = 0;  // dimension of the non-qubit side; qubit side leads

  double operator()(std::span<const cplx> w) const {
    double a = 0.0, c = 0.0;
    cplx b = 0.0;
    for (std::size_t k = 0; k < db; ++k) {
      a += std::norm(w[k]);
      c += std::norm(w[db + k]);
      b += w[k] * std::conj(w[db + k]);
    }
    const double p = a + c;
    if (p <= 1e-300) return 0.0;
    return std::max(0.0, 4.0 * (a * c - std::norm(b)) / p);
  }
};

inline std::size_t dim_of(const Dims& dims, std::span<const std::size_t> which) {
  std::size_t d = 1;
  for (std::size_t s : which) d *= dims[s];
  return d;
}

inline std::vector<std::size_t> inverse_order(std::span<const std::size_t> order) {
  std::vector<std::size_t> inv(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) inv[order[k]] = k;
  return inv;
}

}  // namespace detail

inline double von_neumann_entropy(const Matrix& rho) { return detail::entropy_of_spectrum(eigenvalues(rho)); }

inline double von_neumann_entropy(const QuantumState& state) {
  if (state.has_vector()) return 0.0;
  return von_neumann_entropy(state.density());
}

inline double entropy_of_entanglement(const QuantumState& psi, const Bipartition& cut) {
  if (!psi.has_vector()) fail(ErrorCode::invalid_argument, "entropy of entanglement needs a pure state");
  cut.check(psi.dims().size());
  return von_neumann_entropy(psi.reduced(cut.side_a));
}

// sigma_y (x) sigma_y; real and symmetric.
inline Matrix spin_flip_operator() {
  Matrix y(4);
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  return y;
}

// Concurrence from any factorization rho = sum_k |w_k><w_k| of a two-qubit
// operator. The nonzero spectrum of rho * rho~ is that of T^dagger T with
// T = W^T (sigma_y (x) sigma_y) W, so the lambdas are the singular values of T.
inline double concurrence_from_factor(std::span<const Vector> columns) {
  const std::size_t r = columns.size();
  for (const Vector& w : columns)
    if (w.dim() != 4) fail(ErrorCode::dimension_mismatch, "two-qubit factor columns need dimension 4");
  if (r == 0) return 0.0;
  auto flip = [](const Vector& w) { return Vector{-w[3], w[2], w[1], -w[0]}; };
  std::vector<Vector> yw;
  for (const Vector& w : columns) yw.push_back(flip(w));
  auto t_entry = [&](std::size_t i, std::size_t j) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) s += columns[i][k] * yw[j][k];
    return s;
  };
  if (r == 1) return std::min(1.0, std::abs(t_entry(0, 0)));
  if (r == 2) {
    const cplx t00 = t_entry(0, 0), t01 = t_entry(0, 1), t11 = t_entry(1, 1);
    const double frob = std::norm(t00) + 2.0 * std::norm(t01) + std::norm(t11);
    const double det = std::abs(t00 * t11 - t01 * t01);
    return std::min(1.0, std::sqrt(std::max(0.0, frob - 2.0 * det)));
  }
  Matrix t(r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < r; ++j) t(i, j) = t(j, i) = t_entry(i, j);
  auto sq = eigenvalues(t.adjoint() * t);
  std::vector<double> lambdas;
  for (double x : sq) lambdas.push_back(std::sqrt(std::max(0.0, x)));
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  double c = lambdas[0];
  for (std::size_t k = 1; k < lambdas.size(); ++k) c -= lambdas[k];
  return std::clamp(c, 0.0, 1.0);
}

inline double concurrence_two_qubit(const Matrix& rho) {
  if (rho.dim() != 4) fail(ErrorCode::dimension_mismatch, "concurrence needs a two-qubit state");
  EigenSystem es = hermitian_eig(rho);
  clip_psd(es.values);
  std::vector<Vector> columns;
  for (std::size_t k = 0; k < 4; ++k)
    if (es.values[k] > 1e-14) columns.push_back(std::sqrt(es.values[k]) * es.vectors[k]);
  return concurrence_from_factor(columns);
}

inline double concurrence_two_qubit(const QuantumState& state) {
  if (state.dims() != Dims{2, 2}) fail(ErrorCode::dimension_mismatch, "concurrence needs dims [2,2]");
  if (state.has_vector()) {
    const Vector columns[] = {state.vector()};
    return concurrence_from_factor(columns);
  }
  return concurrence_two_qubit(state.density());
}

// 2 sqrt(det rho_A) with A the qubit side of the cut.
inline double concurrence_pure_cut(const QuantumState& psi, const Bipartition& cut) {
  if (!psi.has_vector()) fail(ErrorCode::invalid_argument, "pure-cut concurrence needs a pure state");
  cut.check(psi.dims().size());
  const Matrix rho_a = psi.reduced(cut.side_a);
  if (rho_a.dim() != 2) fail(ErrorCode::dimension_mismatch, "qubit side of the cut must have dimension 2");
  const double det = rho_a(0, 0).real() * rho_a(1, 1).real() - std::norm(rho_a(0, 1));
  return std::min(1.0, 2.0 * std::sqrt(std::max(0.0, det)));
}

inline double binary_entropy(double x) { return -xlog2x(x) - xlog2x(1.0 - x); }

inline double eof_from_concurrence(double c) {
  if (!(c >= 0.0) || c > 1.0 + 1e-12) fail(ErrorCode::domain_error, "concurrence out of [0,1]: " + std::to_string(c));
  c = std::min(c, 1.0);
  const double root = std::sqrt(std::max(0.0, 1.0 - c * c));
  // Smaller eigenvalue written without cancellation.
  const double lo = c * c / (2.0 * (1.0 + root));
  const double hi = 1.0 - lo;
  return std::max(0.0, -xlog2x(hi) - xlog2x(lo));
}

inline MeasureResult eof_two_qubit(const Matrix& rho) {
  MeasureResult r;
  r.value = eof_from_concurrence(concurrence_two_qubit(rho));
  r.method = Method::closed_form;
  return r;
}

inline MeasureResult eof_two_qubit(const QuantumState& state) {
  MeasureResult r;
  r.value = eof_from_concurrence(concurrence_two_qubit(state));
  r.method = Method::closed_form;
  return r;
}

namespace detail {

template <typename Term>
MeasureResult roof_measure(const QuantumState& state, const Bipartition& cut, const Term& term,
                           const OptimizerConfig& cfg) {
  const Dims& dims = state.dims();
  cut.check(dims.size());
  const auto order = cut.order(dims.size());
  const Dims pdims = permute_dims(dims, order);
  const Matrix rho = permute_subsystems(state.density(), dims, order);
  const RoofSolution sol = minimize_convex_roof(rho, term, cfg);

  MeasureResult r;
  r.value = clip_value(sol.value);
  r.method = Method::convex_roof;
  r.iterations = sol.iterations;
  r.residual = sol.residual;
  r.converged = sol.converged;
  const auto inv = inverse_order(order);
  for (const Vector& w : sol.columns) {
    const double p = w.norm_squared();
    if (p < 1e-14) continue;
    r.ensemble.push_back({p, QuantumState::pure(dims, permute_subsystems(w.normalized(), pdims, inv))});
  }
  return r;
}

}  // namespace detail

// Minimal average entropy of entanglement over ensemble decompositions. The
// returned value is attained by `ensemble`, hence an upper bound on E_F.
inline MeasureResult eof_convex_roof(const QuantumState& state, const Bipartition& cut, const OptimizerConfig& cfg = {}) {
  cut.check(state.dims().size());
  const std::size_t da = detail::dim_of(state.dims(), cut.side_a);
  const detail::PureEntropyTerm term{da, state.dim() / da};
  return detail::roof_measure(state, cut, term, cfg);
}

// Convex roof of the squared concurrence across a qubit | rest cut.
inline MeasureResult tangle_convex_roof(const QuantumState& state, const Bipartition& cut, const OptimizerConfig& cfg = {}) {
  cut.check(state.dims().size());
  const std::size_t da = detail::dim_of(state.dims(), cut.side_a);
  if (da != 2) fail(ErrorCode::dimension_mismatch, "qubit side of the cut must have dimension 2");
  const detail::PureTangleTerm term{state.dim() / 2};
  return detail::roof_measure(state, cut, term, cfg);
}

// S(rho || sigma) in bits; +infinity when supp(rho) is not inside supp(sigma).
inline double relative_entropy(const Matrix& rho, const Matrix& sigma) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::dimension_mismatch, "relative entropy of unequal dimensions");
  const double s_rho = von_neumann_entropy(rho);
  EigenSystem es = hermitian_eig(sigma);
  clip_psd(es.values);
  double cross = 0.0;  // Tr rho log2 sigma
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    const Vector rv = rho * es.vectors[k];
    const double q = inner(es.vectors[k], rv).real();
    if (es.values[k] <= 1e-14) {
      if (q > 1e-10) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross += q * std::log2(es.values[k]);
  }
  return std::max(0.0, -s_rho - cross);
}

namespace detail {

inline Matrix partial_transpose_b(const Matrix& m, std::size_t da, std::size_t db) {
  Matrix out(m.dim());
  for (std::size_t a = 0; a < da; ++a)
    for (std::size_t b = 0; b < db; ++b)
      for (std::size_t a2 = 0; a2 < da; ++a2)
        for (std::size_t b2 = 0; b2 < db; ++b2) out(a * db + b, a2 * db + b2) = m(a * db + b2, a2 * db + b);
  return out;
}

// Mixtures of K product states. Parameters per term: real/imag parts of the
// unnormalized factors, plus a softmax logit.
class SeparableSearch {
 public:
  // Eigenvalues of sigma are floored here inside the objective so that it and
  // its gradient stay finite; the reported value uses the exact definition.
  static constexpr double floor = 1e-15;

  SeparableSearch(const Matrix& rho, std::size_t da, std::size_t db, std::size_t terms)
      : rho_(rho), da_(da), db_(db), k_(terms), s_rho_(von_neumann_entropy(rho)) {}

  std::size_t stride() const { return 2 * da_ + 2 * db_ + 1; }
  std::size_t size() const { return k_ * stride(); }

  Matrix sigma(const std::vector<double>& x) const {
    const auto w = weights(x);
    Matrix s(da_ * db_);
    for (std::size_t t = 0; t < k_; ++t) {
      const Vector p = product(x, t);
      for (std::size_t i = 0; i < p.dim(); ++i)
        for (std::size_t j = 0; j < p.dim(); ++j) s(i, j) += w[t] * p[i] * std::conj(p[j]);
    }
    return s;
  }

  // -S(rho) - Tr rho log2 sigma and its gradient.
  double value_and_gradient(const std::vector<double>& x, std::vector<double>& grad) const {
    const std::size_t d = da_ * db_;
    const auto w = weights(x);
    const EigenSystem es = hermitian_eig(sigma(x));
    std::vector<double> lam(d), loglam(d);
    for (std::size_t k = 0; k < d; ++k) {
      lam[k] = std::max(es.values[k], floor);
      loglam[k] = std::log(lam[k]);
    }
    // R = V^dag rho V; the Frechet derivative of Tr rho ln(sigma) is V (Gamma o R) V^dag.
    Matrix v(d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < d; ++i) v(i, k) = es.vectors[k][i];
    const Matrix r = v.adjoint() * rho_ * v;
    double cross = 0.0;
    Matrix m(d);
    for (std::size_t i = 0; i < d; ++i) {
      cross += r(i, i).real() * loglam[i];
      for (std::size_t j = 0; j < d; ++j) {
        const double gap = lam[i] - lam[j];
        const double gamma = std::abs(gap) > 1e-9 * std::max(lam[i], lam[j]) ? (loglam[i] - loglam[j]) / gap
                                                                               : 2.0 / (lam[i] + lam[j]);
        m(i, j) = gamma * r(i, j);
      }
    }
    const Matrix g = (v * m * v.adjoint()) * cplx(-1.0 / std::numbers::ln2);

    grad.assign(size(), 0.0);
    std::vector<double> e(k_);
    double mean = 0.0;
    for (std::size_t t = 0; t < k_; ++t) {
      const Vector a = factor(x, t, 0, da_), b = factor(x, t, 2 * da_, db_);
      const Vector p = tensor(a, b);
      const Vector gp = g * p;
      e[t] = inner(p, gp).real();
      mean += w[t] * e[t];
      Vector ua(da_), ub(db_);
      for (std::size_t i = 0; i < da_; ++i)
        for (std::size_t j = 0; j < db_; ++j) {
          ua[i] += gp[i * db_ + j] * std::conj(b[j]);
          ub[j] += gp[i * db_ + j] * std::conj(a[i]);
        }
      const std::size_t base = t * stride();
      auto project = [&](const Vector& u, const Vector& f, std::size_t offset, std::size_t dim) {
        const double n = raw_norm(x, base + offset, dim);
        if (n < 1e-150) return;
        const double along = inner(f, u).real();
        for (std::size_t i = 0; i < dim; ++i) {
          const cplx ui = u[i] - along * f[i];
          grad[base + offset + 2 * i] = 2.0 * w[t] * ui.real() / n;
          grad[base + offset + 2 * i + 1] = 2.0 * w[t] * ui.imag() / n;
        }
      };
      project(ua, a, 0, da_);
      project(ub, b, 2 * da_, db_);
    }
    for (std::size_t t = 0; t < k_; ++t) grad[t * stride() + stride() - 1] = w[t] * (e[t] - mean);
    return -s_rho_ - cross / std::numbers::ln2;
  }

  std::vector<double> weights(const std::vector<double>& x) const {
    std::vector<double> w(k_);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < k_; ++t) mx = std::max(mx, x[t * stride() + stride() - 1]);
    double total = 0.0;
    for (std::size_t t = 0; t < k_; ++t) total += w[t] = std::exp(x[t * stride() + stride() - 1] - mx);
    for (double& v : w) v /= total;
    return w;
  }

  Vector factor(const std::vector<double>& x, std::size_t term, std::size_t offset, std::size_t dim) const {
    Vector v(dim);
    const std::size_t base = term * stride() + offset;
    for (std::size_t i = 0; i < dim; ++i) v[i] = cplx(x[base + 2 * i], x[base + 2 * i + 1]);
    if (raw_norm(x, base, dim) < 1e-150) return Vector::basis(dim, 0);
    return v.normalized();
  }

  // Product terms from the Schmidt forms of rho's eigenvectors, heaviest first.
  std::vector<double> spectral_start() const {
    struct Piece {
      double weight;
      Vector a, b;
    };
    std::vector<Piece> pieces;
    const EigenSystem es = hermitian_eig(rho_);
    for (std::size_t k = 0; k < es.values.size(); ++k) {
      if (es.values[k] <= 1e-12) continue;
      const auto sf = schmidt_decompose(QuantumState::pure({da_, db_}, es.vectors[k].normalized()), Bipartition{{0}});
      for (std::size_t i = 0; i < sf.rank; ++i)
        pieces.push_back({es.values[k] * sf.coefficients[i] * sf.coefficients[i], sf.basis_a[i], sf.basis_b[i]});
    }
    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.weight > q.weight; });
    std::vector<double> x(size(), 0.0);
    for (std::size_t t = 0; t < k_; ++t) {
      const std::size_t base = t * stride();
      if (t < pieces.size()) {
        for (std::size_t i = 0; i < da_; ++i) {
          x[base + 2 * i] = pieces[t].a[i].real();
          x[base + 2 * i + 1] = pieces[t].a[i].imag();
        }
        for (std::size_t i = 0; i < db_; ++i) {
          x[base + 2 * da_ + 2 * i] = pieces[t].b[i].real();
          x[base + 2 * da_ + 2 * i + 1] = pieces[t].b[i].imag();
        }
        x[base + stride() - 1] = std::log(std::max(pieces[t].weight, 1e-6));
      } else {
        // Filler terms spread over the computational product basis.
        x[base + 2 * (t % da_)] = 1.0;
        x[base + 2 * da_ + 2 * ((t / da_) % db_)] = 1.0;
        x[base + stride() - 1] = std::log(1e-6);
      }
    }
    return x;
  }

  std::vector<double> random_start(Rng& rng) const {
    std::vector<double> x(size());
    for (double& v : x) v = rng.normal();
    for (std::size_t t = 0; t < k_; ++t) x[t * stride() + stride() - 1] = 0.0;
    return x;
  }

 private:
  Vector product(const std::vector<double>& x, std::size_t t) const {
    return tensor(factor(x, t, 0, da_), factor(x, t, 2 * da_, db_));
  }

  static double raw_norm(const std::vector<double>& x, std::size_t base, std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < 2 * dim; ++i) s += x[base + i] * x[base + i];
    return std::sqrt(s);
  }

  const Matrix& rho_;
  std::size_t da_, db_, k_;
  double s_rho_;
};

struct LbfgsOutcome {
  double value = 0.0;
  int iterations = 0;
  double last_gain = 0.0;
  bool converged = false;
};

// Limited-memory BFGS with Armijo backtracking. Stops when an iteration gains
// less than `tol` or the gradient vanishes.
template <typename F>
LbfgsOutcome lbfgs(F&& fg, std::vector<double>& x, int max_iterations, double tol, std::size_t memory = 8) {
  const std::size_t n = x.size();
  std::vector<double> g(n), g_new(n), dir(n), x_new(n);
  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  LbfgsOutcome out;
  double f = fg(x, g);
  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    if (std::sqrt(dot(g, g)) < 1e-10) {
      out.converged = true;
      break;
    }
    // Two-loop recursion.
    dir = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * y_hist[k][i];
    }
    double scale = 1.0 / std::max(1.0, std::sqrt(dot(g, g)));
    if (!s_hist.empty()) scale = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
    for (double& v : dir) v *= scale;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += s_hist[k][i] * (alpha[k] - beta);
    }
    for (double& v : dir) v = -v;
    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      // Not a descent direction: restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i] / std::max(1.0, std::sqrt(dot(g, g)));
      slope = dot(g, dir);
    }
    double step = 1.0, f_new = f;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-16) {
      if (s_hist.size() == memory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    out.last_gain = f - f_new;
    x = x_new;
    g = g_new;
    f = f_new;
    if (out.last_gain < tol) {
      out.converged = true;
      ++out.iterations;
      break;
    }
  }
  out.value = f;
  return out;
}

}  // namespace detail

// Heuristic minimization of S(rho || sigma) over separable sigma across the
// cut. Always an upper bound on the relative entropy of entanglement. States
// of dimension <= 6 with a positive partial transpose are separable, for
// which sigma = rho gives the exact value 0.
inline MeasureResult ree_upper_bound(const QuantumState& state, const Bipartition& cut, const OptimizerConfig& cfg = {}) {
  cfg.check();
  const Dims& dims = state.dims();
  cut.check(dims.size());
  const auto order = cut.order(dims.size());
  const Dims pdims = permute_dims(dims, order);
  const auto inv = detail::inverse_order(order);
  const std::size_t da = detail::dim_of(dims, cut.side_a), db = state.dim() / da;
  const Matrix rho = permute_subsystems(state.density(), dims, order);

  MeasureResult r;
  r.method = Method::heuristic_upper_bound;

  if (da * db <= 6) {
    const auto pt = eigenvalues(detail::partial_transpose_b(rho, da, db));
    if (pt.back() >= -1e-12) {
      r.value = 0.0;
      r.separable = SeparableForm{{}, {}, {}, state.density()};
      return r;
    }
  }

  const std::size_t k = cfg.ensemble_size == 0 ? da * db : cfg.ensemble_size;
  const detail::SeparableSearch search(rho, da, db, k);
  auto fg = [&](const std::vector<double>& x, std::vector<double>& g) { return search.value_and_gradient(x, g); };

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    std::vector<double> x = restart == 0 ? search.spectral_start() : search.random_start(rng);
    const auto run = detail::lbfgs(fg, x, 10 * cfg.max_sweeps, cfg.step_tolerance * 1e-3);
    const double f = relative_entropy(rho, search.sigma(x));
    if (f < best || best_x.empty()) {
      best = f;
      best_x = x;
      r.iterations = run.iterations;
      r.residual = run.last_gain;
      r.converged = run.converged;
    }
  }

  r.value = best;
  SeparableForm form;
  form.weights = search.weights(best_x);
  for (std::size_t t = 0; t < k; ++t) {
    form.factors_a.push_back(search.factor(best_x, t, 0, da));
    form.factors_b.push_back(search.factor(best_x, t, 2 * da, db));
  }
  form.sigma = permute_subsystems(search.sigma(best_x), pdims, inv);
  r.separable = std::move(form);
  return r;
}

// Right-hand side T log2(d) + eta(T), eta(x) = -x ln x.
inline double fannes_bound(const Matrix& rho, const Matrix& sigma) {
  const double t = trace_distance(rho, sigma);
  const double eta = t > 0.0 ? -t * std::log(t) : 0.0;
  return t * std::log2(static_cast<double>(rho.dim())) + eta;
}

}  // namespace entmono
