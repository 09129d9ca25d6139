#pragma once

// Dense complex linear algebra for small Hilbert spaces.
//
// Composite systems are described by a dimension list [d1, ..., dk]. A flat
// index decodes big-endian: subsystem 1 is the most significant digit, which
// is the block layout produced by the Kronecker product below.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entmono/error.hpp"

namespace entmono {

using cplx = std::complex<double>;
using Dims = std::vector<std::size_t>;

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double psd_clip = 1e-10;
inline constexpr double normalization = 1e-10;
inline constexpr double orthonormal = 1e-10;
}  // namespace tol

namespace detail {

inline bool all_finite(std::span<const cplx> values) {
  return std::all_of(values.begin(), values.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

inline std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace detail

class Vector {
 public:
  Vector() = default;

  explicit Vector(std::size_t dim) : entries_(dim) {}

  explicit Vector(std::vector<cplx> entries) : entries_(std::move(entries)) {
    if (!detail::all_finite(entries_)) fail(ErrorCode::non_finite, "vector entries must be finite");
  }

  Vector(std::initializer_list<cplx> entries) : Vector(std::vector<cplx>(entries)) {}

  static Vector basis(std::size_t dim, std::size_t index) {
    if (index >= dim) fail(ErrorCode::invalid_argument, "basis index out of range");
    Vector v(dim);
    v.entries_[index] = 1.0;
    return v;
  }

  std::size_t dim() const noexcept { return entries_.size(); }
  cplx operator[](std::size_t i) const { return entries_[i]; }
  cplx& operator[](std::size_t i) { return entries_[i]; }
  std::span<const cplx> data() const noexcept { return entries_; }
  std::span<cplx> data() noexcept { return entries_; }

  double norm_squared() const {
    double s = 0.0;
    for (const cplx& z : entries_) s += std::norm(z);
    return s;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  Vector normalized() const {
    const double n = norm();
    if (!(n > 0.0)) fail(ErrorCode::domain_error, "cannot normalize a zero vector");
    Vector out = *this;
    for (cplx& z : out.entries_) z /= n;
    return out;
  }

  Vector conj() const {
    Vector out = *this;
    for (cplx& z : out.entries_) z = std::conj(z);
    return out;
  }

  Vector& operator*=(cplx s) {
    for (cplx& z : entries_) z *= s;
    return *this;
  }
  Vector& operator+=(const Vector& o) {
    require_same(o);
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    require_same(o);
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }

  friend Vector operator*(cplx s, Vector v) { return v *= s; }
  friend Vector operator*(Vector v, cplx s) { return v *= s; }
  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }

 private:
  void require_same(const Vector& o) const {
    if (o.dim() != dim()) fail(ErrorCode::dimension_mismatch, "vector dimensions differ");
  }

  std::vector<cplx> entries_;
};

// <a|b>, conjugate-linear in the first argument.
inline cplx inner(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::dimension_mismatch, "inner product of unequal dimensions");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Square dense matrix, row-major.
class Matrix {
 public:
  Matrix() = default;

  explicit Matrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

  Matrix(std::size_t dim, std::vector<cplx> entries) : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_)
      fail(ErrorCode::dimension_mismatch, "matrix needs dim*dim entries, got " + std::to_string(entries_.size()));
    if (!detail::all_finite(entries_)) fail(ErrorCode::non_finite, "matrix entries must be finite");
  }

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> values) {
    Matrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }
  static Matrix diagonal(std::initializer_list<double> values) {
    return diagonal(std::span<const double>(values.begin(), values.size()));
  }

  // |a><b|
  static Matrix outer(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim()) fail(ErrorCode::dimension_mismatch, "outer product of unequal dimensions");
    Matrix m(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
  }
  static Matrix projector(const Vector& v) { return outer(v, v); }

  std::size_t dim() const noexcept { return dim_; }
  cplx operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  std::span<const cplx> data() const noexcept { return entries_; }

  Matrix adjoint() const {
    Matrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }
  Matrix transpose() const {
    Matrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }
  Matrix conj() const {
    Matrix out = *this;
    for (cplx& z : out.entries_) z = std::conj(z);
    return out;
  }

  cplx trace() const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& z : entries_) m = std::max(m, std::abs(z));
    return m;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  Matrix& operator*=(cplx s) {
    for (cplx& z : entries_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(cplx s, Matrix m) { return m *= s; }
  friend Matrix operator*(Matrix m, cplx s) { return m *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.require_same(b);
    const std::size_t n = a.dim_;
    Matrix out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx(0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend Vector operator*(const Matrix& a, const Vector& v) {
    if (a.dim_ != v.dim()) fail(ErrorCode::dimension_mismatch, "matrix-vector dimensions differ");
    Vector out(v.dim());
    for (std::size_t i = 0; i < a.dim_; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < a.dim_; ++j) s += a(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

 private:
  void require_same(const Matrix& o) const {
    if (o.dim_ != dim_) fail(ErrorCode::dimension_mismatch, "matrix dimensions differ");
  }

  std::size_t dim_ = 0;
  std::vector<cplx> entries_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double hermiticity_error(const Matrix& m) {
  double e = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j) e = std::max(e, std::abs(m(i, j) - std::conj(m(j, i))));
  return e;
}

inline bool is_hermitian(const Matrix& m, double tolerance = tol::hermitian) {
  return hermiticity_error(m) <= tolerance;
}

inline bool is_unitary(const Matrix& u, double tolerance = 1e-10) {
  return max_abs_diff(u.adjoint() * u, Matrix::identity(u.dim())) <= tolerance;
}

// Kronecker product, left operand most significant.
inline Matrix tensor(const Matrix& a, const Matrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  Matrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return out;
}

inline Vector tensor(const Vector& a, const Vector& b) {
  Vector out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t k = 0; k < b.dim(); ++k) out[i * b.dim() + k] = a[i] * b[k];
  return out;
}

template <typename T>
T tensor_all(std::span<const T> factors) {
  if (factors.empty()) fail(ErrorCode::invalid_argument, "empty tensor product");
  T out = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
  return out;
}

namespace detail {

inline Dims strides_of(std::span<const std::size_t> dims) {
  Dims strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
  return strides;
}

// Flat offsets of every multi-index over the given subsystems, enumerated
// big-endian in the order the subsystems are listed.
inline std::vector<std::size_t> offsets_for(std::span<const std::size_t> dims, std::span<const std::size_t> which) {
  const Dims strides = strides_of(dims);
  std::vector<std::size_t> offsets{0};
  for (std::size_t s : which) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * dims[s]);
    for (std::size_t base : offsets)
      for (std::size_t i = 0; i < dims[s]; ++i) next.push_back(base + i * strides[s]);
    offsets = std::move(next);
  }
  return offsets;
}

inline void check_subsystems(std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  std::vector<bool> seen(dims.size(), false);
  for (std::size_t s : keep) {
    if (s >= dims.size()) fail(ErrorCode::invalid_argument, "subsystem index out of range");
    if (seen[s]) fail(ErrorCode::invalid_argument, "subsystem listed twice");
    seen[s] = true;
  }
}

inline Dims complement(std::size_t n, std::span<const std::size_t> keep) {
  Dims rest;
  for (std::size_t s = 0; s < n; ++s)
    if (std::find(keep.begin(), keep.end(), s) == keep.end()) rest.push_back(s);
  return rest;
}

}  // namespace detail

// Reduced operator on `keep` (listed order is the output order), tracing out
// every other subsystem.
inline Matrix reduce_to(const Matrix& m, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  if (dims.empty() || detail::product(dims) != m.dim())
    fail(ErrorCode::dimension_mismatch, "product of dims does not match matrix dimension");
  detail::check_subsystems(dims, keep);
  const Dims traced = detail::complement(dims.size(), keep);
  const auto kept_off = detail::offsets_for(dims, keep);
  const auto traced_off = detail::offsets_for(dims, traced);
  Matrix out(kept_off.size());
  for (std::size_t r = 0; r < kept_off.size(); ++r)
    for (std::size_t c = 0; c < kept_off.size(); ++c) {
      cplx s = 0.0;
      for (std::size_t t : traced_off) s += m(kept_off[r] + t, kept_off[c] + t);
      out(r, c) = s;
    }
  return out;
}

inline Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims, std::size_t traced_index) {
  if (traced_index >= dims.size()) fail(ErrorCode::invalid_argument, "traced subsystem index out of range");
  std::vector<std::size_t> all(dims.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  all.erase(all.begin() + static_cast<std::ptrdiff_t>(traced_index));
  return reduce_to(m, dims, all);
}

// Reduced density operator of the pure state |v><v| on `keep`, computed
// without forming the full projector.
inline Matrix reduce_to(const Vector& v, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  if (dims.empty() || detail::product(dims) != v.dim())
    fail(ErrorCode::dimension_mismatch, "product of dims does not match vector dimension");
  detail::check_subsystems(dims, keep);
  const Dims traced = detail::complement(dims.size(), keep);
  const auto kept_off = detail::offsets_for(dims, keep);
  const auto traced_off = detail::offsets_for(dims, traced);
  Matrix out(kept_off.size());
  for (std::size_t r = 0; r < kept_off.size(); ++r)
    for (std::size_t c = r; c < kept_off.size(); ++c) {
      cplx s = 0.0;
      for (std::size_t t : traced_off) s += v[kept_off[r] + t] * std::conj(v[kept_off[c] + t]);
      out(r, c) = s;
      out(c, r) = std::conj(s);
    }
  return out;
}

// Reorders subsystems: output subsystem k is input subsystem order[k].
inline Vector permute_subsystems(const Vector& v, std::span<const std::size_t> dims, std::span<const std::size_t> order) {
  if (order.size() != dims.size()) fail(ErrorCode::invalid_argument, "permutation must list every subsystem");
  detail::check_subsystems(dims, order);
  if (detail::product(dims) != v.dim()) fail(ErrorCode::dimension_mismatch, "dims do not match vector");
  const auto src = detail::offsets_for(dims, order);
  Vector out(v.dim());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = v[src[i]];
  return out;
}

inline Matrix permute_subsystems(const Matrix& m, std::span<const std::size_t> dims, std::span<const std::size_t> order) {
  if (order.size() != dims.size()) fail(ErrorCode::invalid_argument, "permutation must list every subsystem");
  detail::check_subsystems(dims, order);
  if (detail::product(dims) != m.dim()) fail(ErrorCode::dimension_mismatch, "dims do not match matrix");
  const auto src = detail::offsets_for(dims, order);
  Matrix out(m.dim());
  for (std::size_t i = 0; i < src.size(); ++i)
    for (std::size_t j = 0; j < src.size(); ++j) out(i, j) = m(src[i], src[j]);
  return out;
}

inline Dims permute_dims(std::span<const std::size_t> dims, std::span<const std::size_t> order) {
  Dims out;
  for (std::size_t s : order) out.push_back(dims[s]);
  return out;
}

struct EigenSystem {
  std::vector<double> values;   // descending
  std::vector<Vector> vectors;  // vectors[i] pairs with values[i]
};

// Cyclic complex Jacobi. Each rotation first removes the phase of the pivot
// and then applies a real Givens rotation, so the diagonal stays real.
inline EigenSystem hermitian_eig(const Matrix& input) {
  const std::size_t n = input.dim();
  if (!is_hermitian(input))
    fail(ErrorCode::not_hermitian, "deviation from adjoint " + std::to_string(hermiticity_error(input)));

  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  Matrix v = Matrix::identity(n);

  const double threshold = 1e-13 * input.max_abs();
  const std::size_t max_sweeps = std::max<std::size_t>(1, 100 * n * n);
  auto off_max = [&] {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
  };

  std::size_t sweep = 0;
  while (off_max() > threshold) {
    if (++sweep > max_sweeps) fail(ErrorCode::convergence_failure, "Jacobi sweep cap exceeded");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx g = a(p, q);
        const double h = std::abs(g);
        if (h == 0.0) continue;
        const cplx e = g / h;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * h, app - aqq);
        const double c = std::cos(theta), s = std::sin(theta);
        // Columns: A <- A U with U = diag(1, conj(e)) * [[c, -s], [s, c]].
        const cplx upp = c, upq = -s, uqp = std::conj(e) * s, uqq = std::conj(e) * c;
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
        // Rows: A <- U^dagger A.
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

  EigenSystem out;
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (std::size_t idx : order) {
    out.values.push_back(a(idx, idx).real());
    Vector col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v(k, idx);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

inline std::vector<double> eigenvalues(const Matrix& m) { return hermitian_eig(m).values; }

// Eigenvalues in [-tol::psd_clip, 0) become 0; anything more negative is a
// not-PSD error.
inline void clip_psd(std::vector<double>& values) {
  for (double& x : values) {
    if (x < -tol::psd_clip) fail(ErrorCode::not_psd, "eigenvalue " + std::to_string(x));
    if (x < 0.0) x = 0.0;
  }
}

inline Matrix reconstruct(const EigenSystem& es, const std::function<double(double)>& f) {
  const std::size_t n = es.vectors.empty() ? 0 : es.vectors.front().dim();
  Matrix out(n);
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    const double fk = f(es.values[k]);
    if (!std::isfinite(fk)) fail(ErrorCode::domain_error, "function undefined at eigenvalue " + std::to_string(es.values[k]));
    if (fk == 0.0) continue;
    const Vector& u = es.vectors[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += fk * u[i] * std::conj(u[j]);
  }
  return out;
}

// f(m) = sum over the spectrum of f(lambda) P_lambda.
template <typename F>
Matrix apply_function(const Matrix& m, F&& f) {
  return reconstruct(hermitian_eig(m), std::function<double(double)>(std::forward<F>(f)));
}

// Square root of a PSD operator with the clipping rule applied first.
inline Matrix psd_sqrt(const Matrix& m) {
  EigenSystem es = hermitian_eig(m);
  clip_psd(es.values);
  return reconstruct(es, [](double x) { return std::sqrt(x); });
}

// x log2 x with 0 log 0 = 0.
inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

inline double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::dimension_mismatch, "trace distance of unequal dimensions");
  double s = 0.0;
  for (double x : eigenvalues(rho - sigma)) s += std::abs(x);
  return 0.5 * s;
}

}  // namespace entmono
