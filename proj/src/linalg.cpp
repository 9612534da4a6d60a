#include "qcorr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qcorr::linalg {

namespace {

void require_nonempty(const CMatrix& a, const char* what) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw InvalidInput(std::string(what) + ": empty matrix");
  }
}

void require_square(const CMatrix& a, const char* what) {
  require_nonempty(a, what);
  if (a.rows() != a.cols()) {
    throw InvalidInput(std::string(what) + ": matrix is not square");
  }
}

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

// Row-major index maps for a kept/traced register split. kept_index[a] and
// traced_index[t] are the contributions of each part to the full index, so
// full(a, t) = kept_index[a] + traced_index[t].
struct SplitIndex {
  std::vector<std::size_t> kept_index;
  std::vector<std::size_t> traced_index;
};

SplitIndex split_index(std::span<const std::size_t> dims,
                       std::span<const std::size_t> keep) {
  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  for (std::size_t k : keep) {
    if (k >= n) throw InvalidInput("partial_trace: register index out of range");
    if (kept[k]) throw InvalidInput("partial_trace: register listed twice");
    kept[k] = true;
  }
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * dims[i];

  auto enumerate = [&](bool want_kept) {
    std::vector<std::size_t> out{0};
    for (std::size_t r = 0; r < n; ++r) {
      if (kept[r] != want_kept) continue;
      std::vector<std::size_t> next;
      next.reserve(out.size() * dims[r]);
      for (std::size_t base : out) {
        for (std::size_t v = 0; v < dims[r]; ++v) next.push_back(base + v * stride[r]);
      }
      out = std::move(next);
    }
    return out;
  };
  return {enumerate(true), enumerate(false)};
}

void check_layout(std::size_t state_dim, std::span<const std::size_t> dims,
                  std::span<const std::size_t> keep) {
  if (dims.empty() || keep.empty()) {
    throw InvalidInput("partial_trace: empty register list");
  }
  if (product(dims) != state_dim) {
    throw InvalidInput("partial_trace: register dimensions do not match state dimension");
  }
}

// Columns of V * sqrt(Lambda) over eigenvalues above the fidelity cutoff.
CMatrix sqrt_factor(const CMatrix& h) {
  const EighResult e = eigh(h);
  const double top = std::max(1.0, e.values.size() ? std::abs(e.values(0)) : 0.0);
  Eigen::Index k = 0;
  while (k < e.values.size() && e.values(k) > tol::kFidelityCutoff * top) ++k;
  CMatrix f(h.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) f.col(i) = e.vectors.col(i) * std::sqrt(e.values(i));
  return f;
}

}  // namespace

bool all_finite(const CMatrix& a) {
  return a.unaryExpr([](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); })
      .all();
}

SvdResult svd(const CMatrix& a) {
  require_nonempty(a, "svd");
  if (!all_finite(a)) throw InvalidInput("svd: non-finite entry");
  Eigen::BDCSVD<CMatrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

double hermitian_defect(const CMatrix& h) {
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& h, double tolerance) {
  if (h.rows() != h.cols()) return false;
  const double scale = std::max(1.0, h.size() ? h.cwiseAbs().maxCoeff() : 0.0);
  return hermitian_defect(h) <= tolerance * scale;
}

EighResult eigh(const CMatrix& h) {
  require_square(h, "eigh");
  if (!all_finite(h)) throw InvalidInput("eigh: non-finite entry");
  if (!is_hermitian(h)) throw InvalidInput("eigh: matrix is not Hermitian");
  const CMatrix sym = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> dec(sym);
  if (dec.info() != Eigen::Success) throw InvalidInput("eigh: decomposition failed");
  const Eigen::Index n = sym.rows();
  EighResult out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = dec.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = dec.eigenvectors().col(n - 1 - i);
  }
  return out;
}

double min_eigenvalue(const CMatrix& h) {
  const EighResult e = eigh(h);
  return e.values(e.values.size() - 1);
}

CMatrix psd_sqrt(const CMatrix& h) {
  const EighResult e = eigh(h);
  const Eigen::Index n = h.rows();
  RVector roots(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = e.values(i);
    if (lambda < -tol::kPsdClamp) {
      throw NotPsd("psd_sqrt: eigenvalue " + std::to_string(lambda) + " is negative");
    }
    roots(i) = std::sqrt(std::max(0.0, lambda));
  }
  CMatrix s = e.vectors * roots.asDiagonal() * e.vectors.adjoint();
  return (s + s.adjoint()) * 0.5;
}

std::size_t numerical_rank(const RVector& singulars) {
  if (singulars.size() == 0) return 0;
  const double top = singulars.maxCoeff();
  if (top <= 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < singulars.size(); ++i) {
    if (singulars(i) > tol::kRankRelative * top) ++r;
  }
  return r;
}

std::size_t rank(const CMatrix& a) { return numerical_rank(svd(a).singulars); }

int ceil_log2(std::size_t n) {
  int k = 0;
  std::size_t p = 1;
  while (p < n) {
    p <<= 1;
    ++k;
  }
  return k;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

DensityMatrix make_density(CMatrix mat, std::size_t dim_a, std::size_t dim_b) {
  if (dim_a == 0 || dim_b == 0) throw InvalidInput("density matrix: zero dimension");
  const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
  if (mat.rows() != n || mat.cols() != n) {
    throw InvalidInput("density matrix: shape does not match dimensions");
  }
  if (!all_finite(mat)) throw InvalidInput("density matrix: non-finite entry");
  if (!is_hermitian(mat)) throw InvalidInput("density matrix: not Hermitian");
  if (std::abs(mat.trace() - Complex(1.0)) > tol::kTrace) {
    throw InvalidInput("density matrix: trace is not 1");
  }
  if (min_eigenvalue(mat) < -tol::kPsdClamp) {
    throw InvalidInput("density matrix: not positive semidefinite");
  }
  return {dim_a, dim_b, std::move(mat)};
}

DensityMatrix pure_density(const CVector& psi, std::size_t dim_a, std::size_t dim_b) {
  if (static_cast<std::size_t>(psi.size()) != dim_a * dim_b) {
    throw InvalidInput("pure_density: vector length does not match dimensions");
  }
  return {dim_a, dim_b, psi * psi.adjoint()};
}

CMatrix partial_trace(const CMatrix& rho, std::span<const std::size_t> dims,
                      std::span<const std::size_t> keep) {
  require_square(rho, "partial_trace");
  check_layout(static_cast<std::size_t>(rho.rows()), dims, keep);
  const SplitIndex idx = split_index(dims, keep);
  const auto nk = static_cast<Eigen::Index>(idx.kept_index.size());
  CMatrix out = CMatrix::Zero(nk, nk);
  for (std::size_t t : idx.traced_index) {
    for (Eigen::Index a = 0; a < nk; ++a) {
      const auto row = static_cast<Eigen::Index>(idx.kept_index[a] + t);
      for (Eigen::Index b = 0; b < nk; ++b) {
        out(a, b) += rho(row, static_cast<Eigen::Index>(idx.kept_index[b] + t));
      }
    }
  }
  return out;
}

CMatrix partial_trace(const CVector& psi, std::span<const std::size_t> dims,
                      std::span<const std::size_t> keep) {
  if (psi.size() == 0) throw InvalidInput("partial_trace: empty state");
  check_layout(static_cast<std::size_t>(psi.size()), dims, keep);
  const SplitIndex idx = split_index(dims, keep);
  const auto nk = static_cast<Eigen::Index>(idx.kept_index.size());
  const auto nt = static_cast<Eigen::Index>(idx.traced_index.size());
  CMatrix m(nk, nt);
  for (Eigen::Index a = 0; a < nk; ++a) {
    for (Eigen::Index t = 0; t < nt; ++t) {
      m(a, t) = psi(static_cast<Eigen::Index>(idx.kept_index[a] + idx.traced_index[t]));
    }
  }
  return m * m.adjoint();
}

CMatrix reduce_a(const DensityMatrix& rho) {
  const std::size_t dims[] = {rho.dim_a, rho.dim_b};
  const std::size_t keep[] = {0};
  return partial_trace(rho.mat, dims, keep);
}

CMatrix reduce_b(const DensityMatrix& rho) {
  const std::size_t dims[] = {rho.dim_a, rho.dim_b};
  const std::size_t keep[] = {1};
  return partial_trace(rho.mat, dims, keep);
}

// F = || sqrt(rho) sqrt(sigma) ||_1, evaluated on thin factors so that a
// rank-one argument reduces exactly to sqrt(<psi|rho|psi>).
double fidelity(const CMatrix& rho, const CMatrix& sigma) {
  require_square(rho, "fidelity");
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw InvalidInput("fidelity: dimension mismatch");
  }
  const CMatrix lr = sqrt_factor(rho);
  const CMatrix ls = sqrt_factor(sigma);
  if (lr.cols() == 0 || ls.cols() == 0) return 0.0;
  const CMatrix cross = lr.adjoint() * ls;
  if (cross.cols() == 1 || cross.rows() == 1) return cross.norm();
  Eigen::BDCSVD<CMatrix> dec(cross);
  return dec.singularValues().sum();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim_a != sigma.dim_a || rho.dim_b != sigma.dim_b) {
    throw InvalidInput("fidelity: dimension mismatch");
  }
  return fidelity(rho.mat, sigma.mat);
}

}  // namespace qcorr::linalg
