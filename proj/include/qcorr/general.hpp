#pragma once

#include <cstddef>
#include <vector>

#include "qcorr/classical.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

/// Matrices A_x (k_a x r) and B_y (k_b x r) whose column families generate
///   rho = sum |x><x'| (x) |y><y'| tr((A_x'^dagger A_x)^T (B_y'^dagger B_y)).
struct GeneralFactorization {
  std::size_t r = 0;
  std::vector<CMatrix> as;
  std::vector<CMatrix> bs;

  std::size_t dim_a() const { return as.size(); }
  std::size_t dim_b() const { return bs.size(); }
};

/// Pure state on (A, A1 | B, B1), amplitudes row-major in that order.
struct Purification {
  std::size_t dim_a = 1;
  std::size_t dim_a1 = 1;
  std::size_t dim_b = 1;
  std::size_t dim_b1 = 1;
  CVector amps;

  LayoutState layout() const;
};

struct QBound {
  int qubits = 0;
  std::size_t schmidt_rank = 0;
  Purification witness;
  /// True when the classical psd route produced the reported bound.
  bool classical_route = false;
  /// True when the bound is known to equal Q(rho) (pure inputs, certified psd-rank).
  bool tight = false;
};

namespace general {

Purification make_purification(CVector amps, std::size_t dim_a, std::size_t dim_a1,
                               std::size_t dim_b, std::size_t dim_b1);
Purification from_layout(const LayoutState& s);

/// sum_k sqrt(lambda_k) |e_k>_AB (x) |k>_A1 over the nonzero spectrum; B1 is trivial.
Purification canonical_purification(const DensityMatrix& rho);

/// Reduced state on A (x) B.
DensityMatrix reduced_state(const Purification& p);

/// Schmidt factors across (A, A1) | (B, B1), coefficients split evenly.
GeneralFactorization factor_from_purification(const Purification& p);

/// sum_{x,y} tr((A_x^dagger A_x)^T (B_y^dagger B_y)): the norm of the
/// associated purification, which must be 1 for a normalized factorization.
double factorization_norm(const GeneralFactorization& f);

/// Density matrix from the literal trace formula, divided by its trace.
DensityMatrix reconstruct_from_factors(const GeneralFactorization& f);
/// Same formula without renormalization.
CMatrix reconstruct_unnormalized(const GeneralFactorization& f);

/// sum_i (sum_x |x> (x) a_x^i) (x) (sum_y |y> (x) b_y^i), unnormalized.
Purification assemble_purification(const GeneralFactorization& f);

/// Upper bound on Q(rho) from the canonical purification; classical inputs are
/// also run through the psd-rank search and the smaller bound is reported.
QBound q_upper_bound(const DensityMatrix& rho, const SolverConfig& cfg = {});

}  // namespace general
}  // namespace qcorr
