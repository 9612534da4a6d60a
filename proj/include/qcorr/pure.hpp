#pragma once

#include <cstddef>

#include "qcorr/linalg.hpp"
#include "qcorr/protocol.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

/// psi = sum_i sqrt(coeffs_i) left_i (x) right_i with coeffs descending.
/// left is dim_a x r and right is dim_b x r, both with orthonormal columns.
/// Each left column has its largest-magnitude entry real and positive.
struct SchmidtForm {
  RVector coeffs;
  CMatrix left;
  CMatrix right;

  std::size_t rank() const { return static_cast<std::size_t>(coeffs.size()); }
};

struct Approximant {
  PureState phi;
  double fidelity = 0.0;
  std::size_t terms = 0;
};

namespace pure {

// Additive slack applied to cumulative-mass thresholds, favoring the smaller rank.
inline constexpr double kThresholdSlack = 1e-12;

/// Amplitude matrix A(x, y) = amps[x * dim_b + y].
CMatrix vec_inv(const PureState& psi);

SchmidtForm schmidt_decompose(const PureState& psi);

/// Minimal k whose leading squared singular values reach 1 - eps.
/// Requires a unit Frobenius norm (within 1e-9); throws NotNormalized otherwise.
std::size_t rank_eps(const CMatrix& a, double eps);

/// Approximate Schmidt rank: minimal r' with sum_{i<=r'} p_i >= (1 - eps)^2.
std::size_t srank_eps(const SchmidtForm& form, double eps);
std::size_t srank_eps(const PureState& psi, double eps);

/// Qubits needed to generate psi to fidelity 1 - eps: ceil(log2 srank_eps).
int q_eps(const PureState& psi, double eps);

/// Best approximant with srank_eps(psi, eps) Schmidt terms. For eps >= 1 the
/// leading term alone is returned.
Approximant build_approximant(const PureState& psi, double eps);

/// Seed sum_i sqrt(p_i / q) |i>|i> padded to a power of two per side, with
/// local maps |i> -> |v_i> and |i> -> |w_i>.
ProtocolSpec synth_pure_protocol(const PureState& psi, double eps);

}  // namespace pure
}  // namespace qcorr
