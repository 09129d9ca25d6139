#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "entmono/linalg.hpp"
#include "entmono/random.hpp"

namespace entmono {

enum class StateKind { pure, mixed };

inline const char* to_string(StateKind kind) { return kind == StateKind::pure ? "pure" : "mixed"; }

// A validated state on a composite system. Pure states keep their vector;
// mixed states keep the density matrix.
class QuantumState {
 public:
  static QuantumState pure(Dims dims, Vector psi) {
    check_dims(dims, psi.dim());
    const double n2 = psi.norm_squared();
    if (std::abs(n2 - 1.0) > tol::normalization)
      fail(ErrorCode::not_normalized, "<psi|psi> = " + std::to_string(n2));
    return QuantumState(std::move(dims), std::move(psi));
  }

  static QuantumState mixed(Dims dims, Matrix rho) {
    check_dims(dims, rho.dim());
    if (!is_hermitian(rho)) fail(ErrorCode::not_hermitian, "density matrix must be Hermitian");
    const auto values = eigenvalues(rho);
    if (!values.empty() && values.back() < -tol::psd_clip)
      fail(ErrorCode::not_psd, "smallest eigenvalue " + std::to_string(values.back()));
    const cplx tr = rho.trace();
    if (std::abs(tr - cplx(1.0)) > tol::normalization)
      fail(ErrorCode::trace_not_one, "trace = " + std::to_string(tr.real()));
    return QuantumState(std::move(dims), std::move(rho));
  }

  StateKind kind() const noexcept { return std::holds_alternative<Vector>(body_) ? StateKind::pure : StateKind::mixed; }
  bool has_vector() const noexcept { return kind() == StateKind::pure; }
  const Dims& dims() const noexcept { return dims_; }
  std::size_t dim() const noexcept { return detail::product(dims_); }

  const Vector& vector() const {
    if (!has_vector()) fail(ErrorCode::invalid_argument, "state is stored as a density matrix");
    return std::get<Vector>(body_);
  }

  Matrix density() const {
    if (has_vector()) return Matrix::projector(std::get<Vector>(body_));
    return std::get<Matrix>(body_);
  }

  // Reduced state on the listed subsystems (in the listed order).
  Matrix reduced(std::span<const std::size_t> keep) const {
    if (has_vector()) return reduce_to(std::get<Vector>(body_), dims_, keep);
    return reduce_to(std::get<Matrix>(body_), dims_, keep);
  }

  QuantumState as_mixed() const { return QuantumState(dims_, density()); }

 private:
  QuantumState(Dims dims, Vector v) : dims_(std::move(dims)), body_(std::move(v)) {}
  QuantumState(Dims dims, Matrix m) : dims_(std::move(dims)), body_(std::move(m)) {}

  static void check_dims(const Dims& dims, std::size_t body_dim) {
    if (dims.empty()) fail(ErrorCode::dimension_mismatch, "empty dimension list");
    for (std::size_t d : dims)
      if (d == 0) fail(ErrorCode::dimension_mismatch, "subsystem dimension must be positive");
    if (detail::product(dims) != body_dim)
      fail(ErrorCode::dimension_mismatch,
           "product of dims " + std::to_string(detail::product(dims)) + " != " + std::to_string(body_dim));
  }

  Dims dims_;
  std::variant<Vector, Matrix> body_;
};

// `raw` is the vector (pure) or the row-major density matrix (mixed).
inline QuantumState validate(Dims dims, std::vector<cplx> raw, StateKind kind) {
  const std::size_t n = detail::product(dims);
  if (kind == StateKind::pure) {
    if (raw.size() != n) fail(ErrorCode::dimension_mismatch, "pure state needs " + std::to_string(n) + " amplitudes");
    return QuantumState::pure(std::move(dims), Vector(std::move(raw)));
  }
  if (raw.size() != n * n) fail(ErrorCode::dimension_mismatch, "mixed state needs " + std::to_string(n * n) + " entries");
  return QuantumState::mixed(std::move(dims), Matrix(n, std::move(raw)));
}

inline double purity(const QuantumState& state) {
  if (state.has_vector()) return 1.0;
  const Matrix rho = state.density();
  double s = 0.0;
  for (const cplx& z : rho.data()) s += std::norm(z);
  return s;
}

inline bool is_pure(const QuantumState& state) { return state.has_vector() || purity(state) >= 1.0 - 1e-8; }

// Two nonempty groups of subsystems; side A listed explicitly.
struct Bipartition {
  std::vector<std::size_t> side_a{0};

  std::vector<std::size_t> side_b(std::size_t n_subsystems) const { return detail::complement(n_subsystems, side_a); }

  void check(std::size_t n_subsystems) const {
    detail::check_subsystems(Dims(n_subsystems, 1), side_a);
    if (side_a.empty() || side_a.size() >= n_subsystems)
      fail(ErrorCode::invalid_argument, "bipartition needs two nonempty sides");
  }

  // Subsystem order putting side A first.
  std::vector<std::size_t> order(std::size_t n_subsystems) const {
    std::vector<std::size_t> out = side_a;
    const auto rest = side_b(n_subsystems);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
};

struct SchmidtForm {
  std::vector<double> coefficients;  // sqrt(mu_i), descending
  std::vector<Vector> basis_a;
  std::vector<Vector> basis_b;
  std::size_t rank = 0;
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;

  // sum_i sqrt(mu_i) |e_i> (x) |f_i>, with side A most significant.
  Vector reconstruct() const {
    Vector out(dim_a * dim_b);
    for (std::size_t i = 0; i < rank; ++i) out += coefficients[i] * tensor(basis_a[i], basis_b[i]);
    return out;
  }
};

inline constexpr double schmidt_threshold = 1e-12;

inline SchmidtForm schmidt_decompose(const QuantumState& psi, const Bipartition& cut) {
  if (!psi.has_vector()) fail(ErrorCode::invalid_argument, "Schmidt decomposition needs a pure state");
  const Dims& dims = psi.dims();
  cut.check(dims.size());
  const auto order = cut.order(dims.size());
  const Vector v = permute_subsystems(psi.vector(), dims, order);

  SchmidtForm out;
  for (std::size_t s : cut.side_a) out.dim_a = (out.dim_a == 0 ? 1 : out.dim_a) * dims[s];
  out.dim_b = v.dim() / out.dim_a;
  const std::size_t da = out.dim_a, db = out.dim_b;

  Matrix rho_a(da);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = i; j < da; ++j) {
      cplx s = 0.0;
      for (std::size_t b = 0; b < db; ++b) s += v[i * db + b] * std::conj(v[j * db + b]);
      rho_a(i, j) = s;
      rho_a(j, i) = std::conj(s);
    }
  const EigenSystem es = hermitian_eig(rho_a);
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    const double mu = es.values[k];
    if (mu < schmidt_threshold) break;
    const double root = std::sqrt(mu);
    const Vector& e = es.vectors[k];
    Vector f(db);
    for (std::size_t b = 0; b < db; ++b) {
      cplx s = 0.0;
      for (std::size_t a = 0; a < da; ++a) s += std::conj(e[a]) * v[a * db + b];
      f[b] = s / root;
    }
    out.coefficients.push_back(root);
    out.basis_a.push_back(e);
    out.basis_b.push_back(f.normalized());
  }
  out.rank = out.coefficients.size();
  return out;
}

inline QuantumState product_state(std::span<const Vector> factors) {
  Dims dims;
  for (const Vector& f : factors) dims.push_back(f.dim());
  return QuantumState::pure(std::move(dims), tensor_all(factors));
}

inline QuantumState basis_state(Dims dims, std::size_t index) {
  const std::size_t n = detail::product(dims);
  return QuantumState::pure(std::move(dims), Vector::basis(n, index));
}

inline QuantumState max_entangled(std::size_t d) {
  if (d < 2) fail(ErrorCode::invalid_argument, "maximally entangled state needs d >= 2");
  Vector v(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = amp;
  return QuantumState::pure({d, d}, std::move(v));
}

// Three qubits: (|100> + |010>/sqrt2 + |001>/sqrt2) / sqrt2.
inline QuantumState counterexample_state() {
  Vector v(8);
  v[0b100] = std::numbers::sqrt2 / 2.0;
  v[0b010] = 0.5;
  v[0b001] = 0.5;
  return QuantumState::pure({2, 2, 2}, std::move(v));
}

struct EnsembleMember {
  double probability = 0.0;
  QuantumState state;
};

inline Matrix ensemble_density(std::span<const EnsembleMember> members) {
  if (members.empty()) fail(ErrorCode::invalid_argument, "empty ensemble");
  Matrix rho(members.front().state.dim());
  for (const EnsembleMember& m : members) rho += m.probability * m.state.density();
  return rho;
}

struct SeparableTerm {
  double probability = 0.0;
  std::vector<Matrix> factors;  // one density matrix per subsystem
};

inline QuantumState separable_mixture(std::span<const SeparableTerm> members) {
  if (members.empty()) fail(ErrorCode::invalid_argument, "separable mixture needs at least one member");
  Dims dims;
  for (const Matrix& f : members.front().factors) dims.push_back(f.dim());
  if (dims.empty()) fail(ErrorCode::invalid_argument, "member has no factors");

  double total = 0.0;
  Matrix rho(detail::product(dims));
  for (const SeparableTerm& m : members) {
    if (m.probability < 0.0) fail(ErrorCode::invalid_argument, "negative probability");
    if (m.factors.size() != dims.size()) fail(ErrorCode::dimension_mismatch, "members disagree on subsystem count");
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (m.factors[k].dim() != dims[k]) fail(ErrorCode::dimension_mismatch, "members disagree on subsystem dims");
      const Matrix& f = m.factors[k];
      if (!is_hermitian(f) || std::abs(f.trace() - cplx(1.0)) > tol::normalization)
        fail(ErrorCode::invalid_argument, "factor is not a density matrix");
    }
    total += m.probability;
    rho += m.probability * tensor_all(std::span<const Matrix>(m.factors));
  }
  if (std::abs(total - 1.0) > tol::normalization)
    fail(ErrorCode::invalid_argument, "probabilities sum to " + std::to_string(total));
  return QuantumState::mixed(std::move(dims), std::move(rho));
}

inline Vector random_gaussian_vector(std::size_t dim, Rng& rng) {
  Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = rng.complex_normal();
  return v;
}

inline Vector haar_random_vector(std::size_t dim, Rng& rng) {
  if (dim == 0) fail(ErrorCode::invalid_argument, "dimension must be positive");
  Vector v = random_gaussian_vector(dim, rng);
  while (v.norm_squared() == 0.0) v = random_gaussian_vector(dim, rng);
  return v.normalized();
}

inline QuantumState haar_random_pure(Dims dims, Seed seed) {
  Rng rng(seed);
  Vector v = haar_random_vector(detail::product(dims), rng);
  return QuantumState::pure(std::move(dims), std::move(v));
}

inline QuantumState haar_random_pure(std::size_t dim, Seed seed) { return haar_random_pure(Dims{dim}, seed); }

// Orthonormalizes `columns` in order (modified Gram-Schmidt), then fills the
// remaining columns from the computational basis. Completed columns get the
// phase convention "first nonzero entry real positive".
inline Matrix complete_unitary(std::span<const Vector> columns, std::size_t n) {
  if (columns.size() > n) fail(ErrorCode::invalid_argument, "too many columns");
  std::vector<Vector> basis;
  auto orthogonalize = [&](Vector v) -> std::optional<Vector> {
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& b : basis) v -= inner(b, v) * b;
    const double nrm = v.norm();
    if (nrm < 1e-8) return std::nullopt;
    return v * cplx(1.0 / nrm);
  };
  for (const Vector& c : columns) {
    if (c.dim() != n) fail(ErrorCode::dimension_mismatch, "column dimension");
    auto v = orthogonalize(c);
    if (!v) fail(ErrorCode::invalid_argument, "given columns are linearly dependent");
    basis.push_back(*v);
  }
  for (std::size_t k = 0; k < n && basis.size() < n; ++k) {
    auto v = orthogonalize(Vector::basis(n, k));
    if (!v) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs((*v)[i]) > 1e-12) {
        *v *= std::conj((*v)[i]) / std::abs((*v)[i]);
        break;
      }
    basis.push_back(*v);
  }
  Matrix u(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) u(i, j) = basis[j][i];
  return u;
}

// Gram-Schmidt on Gaussian columns (QR with positive R diagonal), which is
// Haar distributed.
inline Matrix haar_random_unitary(std::size_t n, Rng& rng) {
  std::vector<Vector> cols;
  for (std::size_t j = 0; j < n; ++j) cols.push_back(random_gaussian_vector(n, rng));
  return complete_unitary(cols, n);
}

inline Matrix haar_random_unitary(std::size_t n, Seed seed) {
  Rng rng(seed);
  return haar_random_unitary(n, rng);
}

// Traces an s-dimensional environment out of a Haar-random pure state on d*s.
inline QuantumState induced_mixed(std::size_t d, std::size_t s, Seed seed) {
  if (d == 0 || s == 0) fail(ErrorCode::invalid_argument, "dimensions must be positive");
  Rng rng(seed);
  const Vector psi = haar_random_vector(d * s, rng);
  const Dims dims{d, s};
  const std::size_t keep[] = {0};
  Matrix rho = reduce_to(psi, dims, keep);
  for (std::size_t i = 0; i < d; ++i) rho(i, i) = rho(i, i).real();
  // Renormalize the trace so validation sees exactly 1 up to rounding.
  rho *= 1.0 / rho.trace().real();
  return QuantumState::mixed({d}, std::move(rho));
}

inline constexpr double rank_threshold = 1e-12;

// Purification on [d, rank]: sum_i sqrt(lambda_i) |a_i> (x) |i>.
inline QuantumState purify(const QuantumState& state) {
  if (state.has_vector()) {
    const Vector e0 = Vector::basis(1, 0);
    return QuantumState::pure({state.dim(), 1}, tensor(state.vector(), e0));
  }
  EigenSystem es = hermitian_eig(state.density());
  clip_psd(es.values);
  std::size_t rank = 0;
  while (rank < es.values.size() && es.values[rank] > rank_threshold) ++rank;
  if (rank == 0) fail(ErrorCode::not_psd, "zero density matrix");
  const std::size_t d = state.dim();
  double kept = 0.0;
  for (std::size_t k = 0; k < rank; ++k) kept += es.values[k];
  Vector psi(d * rank);
  for (std::size_t k = 0; k < rank; ++k) {
    const double amp = std::sqrt(es.values[k] / kept);
    for (std::size_t i = 0; i < d; ++i) psi[i * rank + k] = amp * es.vectors[k][i];
  }
  return QuantumState::pure({d, rank}, std::move(psi));
}

}  // namespace entmono
