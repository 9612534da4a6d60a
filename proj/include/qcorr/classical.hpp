#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/linalg.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

/// Joint distribution P(x, y) over Alice's outcome x and Bob's outcome y.
struct DistMatrix {
  RMatrix p;

  std::size_t n() const { return static_cast<std::size_t>(p.rows()); }
  std::size_t m() const { return static_cast<std::size_t>(p.cols()); }
};

/// P(x, y) ~ tr(C_x D_y) with every C_x, D_y an r x r Hermitian psd matrix.
struct PsdFactorization {
  std::size_t r = 0;
  std::vector<CMatrix> cs;
  std::vector<CMatrix> ds;
  double residual = 0.0;  // Frobenius norm of [tr(C_x D_y) - P(x, y)]
};

enum class RankStatus { kCertified, kHeuristic };

const char* status_name(RankStatus s);

struct RankReport {
  std::size_t lower = 1;
  std::size_t upper = 1;
  RankStatus status = RankStatus::kHeuristic;
  std::optional<PsdFactorization> witness;

  /// ceil(log2 upper): qubits for the psd route, bits for the nonnegative route.
  int complexity() const { return linalg::ceil_log2(upper); }
};

struct SolverConfig {
  std::size_t starts = 16;
  std::size_t max_iters = 5000;
  double grad_tol = 1e-10;
  double tol = 1e-7;  // success threshold on the Frobenius residual
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Exactly-classical purification with registers (A, A', A1 | B, B', B1).
struct ClassicalPurification {
  LayoutState state;
  std::size_t r = 0;
};

namespace classical {

/// Checks nonnegativity and normalization; entries below 1e-14 are set to 0.
/// Negative entries below -1e-12 raise InvalidInput; a total off by more than
/// 1e-8 raises NotNormalized unless `renormalize` is set.
DistMatrix validate_dist(const RMatrix& raw, bool renormalize = false);

DensityMatrix classical_state(const DistMatrix& p);
/// The computational-basis diagonal when rho is diagonal within `tolerance`.
std::optional<DistMatrix> as_classical(const DensityMatrix& rho, double tolerance = 1e-10);

/// ceil(sqrt(rank P)); tr(C_x D_y) is bilinear in r^2-dimensional vectorizations.
std::size_t psd_rank_lower_bound(const DistMatrix& p);

RMatrix trace_products(const PsdFactorization& f);
double residual(const DistMatrix& p, const PsdFactorization& f);

/// Multi-start alternating gradient descent on C_x = E_x^dagger E_x,
/// D_y = F_y^dagger F_y. Returns the best start; deterministic given cfg.seed.
PsdFactorization psd_fit(const DistMatrix& p, std::size_t r, const SolverConfig& cfg = {});

/// Factorization of size min(n, m) built from P's rows or columns.
PsdFactorization diagonal_witness(const DistMatrix& p);

RankReport psd_rank_search(const DistMatrix& p, const SolverConfig& cfg = {});

ClassicalPurification synth_from_psd(const DistMatrix& p, const PsdFactorization& f);

/// Gram factorization of a purification. The first register each party owns
/// is its computational register; the rest of that party's registers form
/// the auxiliary block. The Schmidt coefficients are split evenly between the
/// two sides.
PsdFactorization gram_extract(const LayoutState& psi);

/// Computational-basis distribution of the first Alice and first Bob register.
DistMatrix measured_distribution(const LayoutState& psi);

/// Nonnegative factorization P ~ W H with W n x r, H r x m.
struct NmfResult {
  RMatrix w;
  RMatrix h;
  double residual = 0.0;
};

/// Exact for rank <= 2 and r = min(n, m); multiplicative updates otherwise.
NmfResult nmf_fit(const DistMatrix& p, std::size_t r, const SolverConfig& cfg = {});
PsdFactorization diagonal_from_nmf(const NmfResult& nmf);

RankReport nonneg_rank_bounds(const DistMatrix& p, const SolverConfig& cfg = {});

}  // namespace classical
}  // namespace qcorr
