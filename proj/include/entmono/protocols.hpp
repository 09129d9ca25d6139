#pragma once

// Projective measurements and two LOCC protocols: single-qubit teleportation
// and the conversion of a shared Bell pair into alpha|00> + beta|11> (or a
// mixture of locally rotated such states).

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "entmono/linalg.hpp"
#include "entmono/random.hpp"
#include "entmono/states.hpp"

namespace entmono {

namespace pauli {

inline Matrix x() { return Matrix(2, {0.0, 1.0, 1.0, 0.0}); }
inline Matrix y() { return Matrix(2, {0.0, cplx(0, -1), cplx(0, 1), 0.0}); }
inline Matrix z() { return Matrix(2, {1.0, 0.0, 0.0, -1.0}); }

}  // namespace pauli

inline Matrix hadamard() {
  const double h = std::numbers::sqrt2 / 2.0;
  return Matrix(2, {h, h, h, -h});
}

// Control is the more significant qubit.
inline Matrix cnot() {
  Matrix m(4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

// Embeds `op` acting on consecutive subsystems starting at `first`.
inline Matrix embed(const Matrix& op, const Dims& dims, std::size_t first) {
  std::size_t before = 1, span_dim = 1, after = 1;
  std::size_t k = 0;
  for (; k < first; ++k) before *= dims[k];
  for (; k < dims.size() && span_dim < op.dim(); ++k) span_dim *= dims[k];
  for (; k < dims.size(); ++k) after *= dims[k];
  if (span_dim != op.dim()) fail(ErrorCode::dimension_mismatch, "operator does not match the addressed subsystems");
  return tensor(tensor(Matrix::identity(before), op), Matrix::identity(after));
}

class Pvm {
 public:
  Pvm(std::vector<Matrix> projectors, std::vector<std::string> labels)
      : projectors_(std::move(projectors)), labels_(std::move(labels)) {
    if (projectors_.empty()) fail(ErrorCode::invalid_argument, "PVM needs at least one projector");
    if (labels_.size() != projectors_.size()) fail(ErrorCode::invalid_argument, "one label per projector");
    const std::size_t n = projectors_.front().dim();
    Matrix sum(n);
    for (std::size_t i = 0; i < projectors_.size(); ++i) {
      if (projectors_[i].dim() != n) fail(ErrorCode::dimension_mismatch, "projector dimensions differ");
      for (std::size_t j = 0; j < projectors_.size(); ++j) {
        const Matrix prod = projectors_[i] * projectors_[j];
        const double err = i == j ? max_abs_diff(prod, projectors_[i]) : prod.max_abs();
        if (err > 1e-10) fail(ErrorCode::invalid_argument, "projectors are not orthogonal idempotents");
      }
      sum += projectors_[i];
    }
    if (max_abs_diff(sum, Matrix::identity(n)) > 1e-10) fail(ErrorCode::invalid_argument, "projectors do not sum to I");
  }

  // Computational-basis measurement of the subsystems [first, first+count),
  // identity elsewhere; labels are the measured digits.
  static Pvm computational(const Dims& dims, std::size_t first, std::size_t count) {
    std::size_t local = 1;
    for (std::size_t k = first; k < first + count; ++k) local *= dims[k];
    std::vector<Matrix> ps;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < local; ++i) {
      ps.push_back(embed(Matrix::projector(Vector::basis(local, i)), dims, first));
      std::size_t rem = i;
      std::string digits;
      for (std::size_t k = first + count; k-- > first;) {
        digits.insert(digits.begin(), static_cast<char>('0' + rem % dims[k]));
        rem /= dims[k];
      }
      labels.push_back(digits);
    }
    return Pvm(std::move(ps), std::move(labels));
  }

  std::size_t size() const noexcept { return projectors_.size(); }
  std::size_t dim() const noexcept { return projectors_.front().dim(); }
  const Matrix& projector(std::size_t i) const { return projectors_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

 private:
  std::vector<Matrix> projectors_;
  std::vector<std::string> labels_;
};

inline std::vector<double> outcome_probabilities(const QuantumState& state, const Pvm& pvm) {
  if (pvm.dim() != state.dim()) fail(ErrorCode::dimension_mismatch, "PVM dimension differs from state dimension");
  std::vector<double> p;
  for (std::size_t i = 0; i < pvm.size(); ++i) {
    if (state.has_vector()) {
      const Vector pv = pvm.projector(i) * state.vector();
      p.push_back(pv.norm_squared());
    } else {
      p.push_back(std::max(0.0, (state.density() * pvm.projector(i)).trace().real()));
    }
  }
  return p;
}

struct MeasurementOutcome {
  std::size_t index = 0;
  std::string label;
  double probability = 0.0;
  QuantumState post_state;
};

// Post-measurement state for a chosen outcome: P|psi>/sqrt(p) or
// P rho P / p.
inline MeasurementOutcome measure_branch(const QuantumState& state, const Pvm& pvm, std::size_t outcome) {
  const auto probs = outcome_probabilities(state, pvm);
  const double p = probs.at(outcome);
  if (!(p > 0.0)) fail(ErrorCode::domain_error, "outcome " + pvm.label(outcome) + " has zero probability");
  const Matrix& proj = pvm.projector(outcome);
  if (state.has_vector()) {
    Vector post = proj * state.vector();
    post *= 1.0 / std::sqrt(p);
    return {outcome, pvm.label(outcome), p, QuantumState::pure(state.dims(), post.normalized())};
  }
  Matrix post = proj * state.density() * proj;
  post *= 1.0 / p;
  post *= 1.0 / post.trace().real();
  return {outcome, pvm.label(outcome), p, QuantumState::mixed(state.dims(), std::move(post))};
}

// Samples an outcome by inverse CDF over the exact probabilities.
inline MeasurementOutcome pvm_measure(const QuantumState& state, const Pvm& pvm, Rng& rng) {
  const auto probs = outcome_probabilities(state, pvm);
  double total = 0.0;
  for (double p : probs) total += p;
  if (!(total > 0.0)) fail(ErrorCode::domain_error, "all outcome probabilities vanish");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t pick = probs.size() - 1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc && probs[i] > 0.0) {
      pick = i;
      break;
    }
  }
  while (probs[pick] <= 0.0) --pick;
  return measure_branch(state, pvm, pick);
}

struct TranscriptStep {
  std::string actor;  // "A" or "B"
  std::string action;
  std::string outcome;  // empty for unitary steps
  double probability = 1.0;
};

struct Transcript {
  std::vector<TranscriptStep> steps;
  QuantumState final_state;
};

namespace detail {

inline QuantumState apply_unitary(const QuantumState& s, const Matrix& u) {
  if (s.has_vector()) return QuantumState::pure(s.dims(), u * s.vector());
  return QuantumState::mixed(s.dims(), u * s.density() * u.adjoint());
}

// Amplitudes of the trailing subsystems once the leading ones are known to be
// in basis state `lead_index` (the state must be a product across that split).
inline Vector trailing_factor(const Vector& v, std::size_t lead_index, std::size_t trailing_dim) {
  Vector out(trailing_dim);
  for (std::size_t i = 0; i < trailing_dim; ++i) out[i] = v[lead_index * trailing_dim + i];
  return out.normalized();
}

}  // namespace detail

// Particle 1 carries the input, particles 2 (A) and 3 (B) share a Bell pair.
// A applies (H (x) I) CNOT to particles 1,2 and measures them; B corrects
// particle 3 with Z^i X^j for outcome (i, j).
inline Transcript teleport_branch(const Vector& input, std::size_t outcome, bool apply_correction = true) {
  if (input.dim() != 2 || std::abs(input.norm_squared() - 1.0) > tol::normalization)
    fail(ErrorCode::not_normalized, "teleportation input must be a normalized qubit");
  const Dims dims{2, 2, 2};
  const Vector bell = max_entangled(2).vector();
  QuantumState joint = QuantumState::pure(dims, tensor(input, bell));
  Transcript t{{}, joint};
  t.steps.push_back({"A", "prepare |psi>_1 (x) |Phi+>_23", "", 1.0});

  const Matrix u = embed(tensor(hadamard(), Matrix::identity(2)) * cnot(), dims, 0);
  joint = detail::apply_unitary(joint, u);
  t.steps.push_back({"A", "apply (H (x) I) CNOT on particles 1,2", "", 1.0});

  const Pvm pvm = Pvm::computational(dims, 0, 2);
  const MeasurementOutcome m = measure_branch(joint, pvm, outcome);
  t.steps.push_back({"A", "measure particles 1,2 in the computational basis", m.label, m.probability});

  Vector b = detail::trailing_factor(m.post_state.vector(), outcome, 2);
  const std::size_t i = outcome >> 1, j = outcome & 1;
  if (apply_correction) {
    Matrix fix = Matrix::identity(2);
    if (j) fix = pauli::x() * fix;
    if (i) fix = pauli::z() * fix;
    b = fix * b;
    t.steps.push_back({"B", "apply Z^" + std::to_string(i) + " X^" + std::to_string(j) + " on particle 3", "", 1.0});
  }
  t.final_state = QuantumState::pure({2}, b.normalized());
  return t;
}

inline std::vector<Transcript> teleport_all_branches(const Vector& input, bool apply_correction = true) {
  std::vector<Transcript> out;
  for (std::size_t k = 0; k < 4; ++k) out.push_back(teleport_branch(input, k, apply_correction));
  return out;
}

inline Transcript teleport(const Vector& input, Rng& rng) {
  if (input.dim() != 2 || std::abs(input.norm_squared() - 1.0) > tol::normalization)
    fail(ErrorCode::not_normalized, "teleportation input must be a normalized qubit");
  const Dims dims{2, 2, 2};
  QuantumState joint = QuantumState::pure(dims, tensor(input, max_entangled(2).vector()));
  joint = detail::apply_unitary(joint, embed(tensor(hadamard(), Matrix::identity(2)) * cnot(), dims, 0));
  const MeasurementOutcome m = pvm_measure(joint, Pvm::computational(dims, 0, 2), rng);
  return teleport_branch(input, m.index);
}

// Unitary on particles 1,2 with |00> -> a|00> + b|11> and
// |01> -> a|10> + b|01>, completed by Gram-Schmidt.
inline Matrix conversion_unitary(cplx alpha, cplx beta) {
  const Vector c0{alpha, 0.0, 0.0, beta};
  const Vector c1{0.0, beta, alpha, 0.0};
  const Vector cols[] = {c0, c1};
  Matrix u = complete_unitary(cols, 4);
  return u;
}

namespace detail {

inline void check_amplitudes(cplx alpha, cplx beta) {
  const double n = std::norm(alpha) + std::norm(beta);
  if (std::abs(n - 1.0) > tol::normalization) fail(ErrorCode::not_normalized, "|alpha|^2 + |beta|^2 = " + std::to_string(n));
}

}  // namespace detail

// Bell pair on particles 2 (A) and 3 (B) plus ancilla |0>_1 on A's side,
// converted to alpha|00> + beta|11> on particles 2,3. Outcome 1 on the
// ancilla is corrected by sigma_x on particle 3.
inline Transcript locc_prepare_branch(cplx alpha, cplx beta, std::size_t outcome) {
  detail::check_amplitudes(alpha, beta);
  const Dims dims{2, 2, 2};
  QuantumState joint = QuantumState::pure(dims, tensor(Vector::basis(2, 0), max_entangled(2).vector()));
  Transcript t{{}, joint};
  t.steps.push_back({"A", "prepare |0>_1 (x) |Phi+>_23", "", 1.0});
  joint = detail::apply_unitary(joint, embed(conversion_unitary(alpha, beta), dims, 0));
  t.steps.push_back({"A", "apply conversion unitary on particles 1,2", "", 1.0});
  const MeasurementOutcome m = measure_branch(joint, Pvm::computational(dims, 0, 1), outcome);
  t.steps.push_back({"A", "measure particle 1 in the computational basis", m.label, m.probability});
  Vector pair = detail::trailing_factor(m.post_state.vector(), outcome, 4);
  if (outcome == 1) {
    pair = tensor(Matrix::identity(2), pauli::x()) * pair;
    t.steps.push_back({"B", "apply sigma_x on particle 3", "", 1.0});
  }
  t.final_state = QuantumState::pure({2, 2}, pair);
  return t;
}

inline Transcript locc_prepare_pure(cplx alpha, cplx beta, Rng& rng) {
  detail::check_amplitudes(alpha, beta);
  const Dims dims{2, 2, 2};
  QuantumState joint = QuantumState::pure(dims, tensor(Vector::basis(2, 0), max_entangled(2).vector()));
  joint = detail::apply_unitary(joint, embed(conversion_unitary(alpha, beta), dims, 0));
  const MeasurementOutcome m = pvm_measure(joint, Pvm::computational(dims, 0, 1), rng);
  return locc_prepare_branch(alpha, beta, m.index);
}

struct PreparationMember {
  double probability = 0.0;
  cplx alpha = 1.0;
  cplx beta = 0.0;
  Matrix u = Matrix::identity(2);  // on particle 2 (A)
  Matrix v = Matrix::identity(2);  // on particle 3 (B)
};

inline void check_preparation(std::span<const PreparationMember> ensemble) {
  if (ensemble.empty()) fail(ErrorCode::invalid_argument, "empty preparation ensemble");
  double total = 0.0;
  for (const auto& m : ensemble) {
    if (m.probability < 0.0) fail(ErrorCode::invalid_argument, "negative probability");
    total += m.probability;
    detail::check_amplitudes(m.alpha, m.beta);
    if (m.u.dim() != 2 || m.v.dim() != 2 || !is_unitary(m.u) || !is_unitary(m.v))
      fail(ErrorCode::invalid_argument, "local operations must be 2x2 unitaries");
  }
  if (std::abs(total - 1.0) > tol::normalization) fail(ErrorCode::invalid_argument, "probabilities must sum to 1");
}

// Picks member i with probability p_i, runs the pure conversion and applies
// U_i (x) V_i. Averaging final states over runs approaches the mixture.
inline Transcript locc_prepare_mixed(std::span<const PreparationMember> ensemble, Rng& rng) {
  check_preparation(ensemble);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t pick = ensemble.size() - 1;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    acc += ensemble[i].probability;
    if (u < acc) {
      pick = i;
      break;
    }
  }
  const PreparationMember& m = ensemble[pick];
  Transcript t = locc_prepare_pure(m.alpha, m.beta, rng);
  t.steps.insert(t.steps.begin(), {"A", "select ensemble member " + std::to_string(pick), std::to_string(pick), m.probability});
  t.steps.push_back({"A", "apply U_i on particle 2", "", 1.0});
  t.steps.push_back({"B", "apply V_i on particle 3", "", 1.0});
  t.final_state = QuantumState::pure({2, 2}, tensor(m.u, m.v) * t.final_state.vector());
  return t;
}

inline Matrix preparation_target(std::span<const PreparationMember> ensemble) {
  check_preparation(ensemble);
  Matrix rho(4);
  for (const auto& m : ensemble) {
    const Vector phi = tensor(m.u, m.v) * Vector{m.alpha, 0.0, 0.0, m.beta};
    rho += m.probability * Matrix::projector(phi);
  }
  return rho;
}

}  // namespace entmono
