#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcorr/error.hpp"

namespace qcorr {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace tol {
// A singular value counts as nonzero iff it exceeds this fraction of the largest.
inline constexpr double kRankRelative = 1e-10;
// Eigenvalues in [-kPsdClamp, 0) are treated as zero.
inline constexpr double kPsdClamp = 1e-10;
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
// Spectral cutoff used when forming square-root factors for the fidelity.
inline constexpr double kFidelityCutoff = 1e-13;
}  // namespace tol

/// Thin SVD: a = left * diag(singulars) * right^dagger, singulars descending.
struct SvdResult {
  CMatrix left;
  RVector singulars;
  CMatrix right;
};

/// Hermitian eigendecomposition with eigenvalues in descending order.
struct EighResult {
  RVector values;
  CMatrix vectors;
};

/// Bipartite mixed state on A (x) B, basis index x * dim_b + y.
struct DensityMatrix {
  std::size_t dim_a = 1;
  std::size_t dim_b = 1;
  CMatrix mat;

  std::size_t dim() const { return dim_a * dim_b; }
};

namespace linalg {

SvdResult svd(const CMatrix& a);
EighResult eigh(const CMatrix& h);
CMatrix psd_sqrt(const CMatrix& h);

/// Number of singular values above the relative threshold.
std::size_t numerical_rank(const RVector& singulars);
std::size_t rank(const CMatrix& a);

/// Smallest k with 2^k >= n (0 for n <= 1).
int ceil_log2(std::size_t n);

bool all_finite(const CMatrix& a);
bool is_hermitian(const CMatrix& h, double tolerance = tol::kHermitian);
double hermitian_defect(const CMatrix& h);
double min_eigenvalue(const CMatrix& h);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

/// Validates and wraps a density matrix; throws InvalidInput on failure.
DensityMatrix make_density(CMatrix mat, std::size_t dim_a, std::size_t dim_b);
DensityMatrix pure_density(const CVector& psi, std::size_t dim_a, std::size_t dim_b);

/// Partial trace over a register list. `dims` gives the register dimensions in
/// declared order (row-major indexing); `keep` lists the registers retained,
/// and the result is indexed row-major over them in declared order.
CMatrix partial_trace(const CMatrix& rho, std::span<const std::size_t> dims,
                      std::span<const std::size_t> keep);
CMatrix partial_trace(const CVector& psi, std::span<const std::size_t> dims,
                      std::span<const std::size_t> keep);

/// Reduced state of one side of a bipartite density matrix.
CMatrix reduce_a(const DensityMatrix& rho);
CMatrix reduce_b(const DensityMatrix& rho);

/// tr sqrt(sqrt(sigma) rho sqrt(sigma)), the non-squared fidelity.
double fidelity(const CMatrix& rho, const CMatrix& sigma);
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace linalg
}  // namespace qcorr
