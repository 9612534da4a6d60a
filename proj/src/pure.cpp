#include "qcorr/pure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcorr::pure {

namespace {

void check_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw InvalidInput("eps must be a finite value >= 0, got " + std::to_string(eps));
  }
}

// Smallest k with the first k entries summing to at least target - slack.
std::size_t min_prefix(const RVector& mass, double target) {
  if (target <= kThresholdSlack) return 0;
  double cum = 0.0;
  for (Eigen::Index k = 0; k < mass.size(); ++k) {
    cum += mass(k);
    if (cum >= target - kThresholdSlack) return static_cast<std::size_t>(k + 1);
  }
  return static_cast<std::size_t>(mass.size());
}

}  // namespace

CMatrix vec_inv(const PureState& psi) {
  const auto rows = static_cast<Eigen::Index>(psi.dim_a);
  const auto cols = static_cast<Eigen::Index>(psi.dim_b);
  CMatrix a(rows, cols);
  for (Eigen::Index x = 0; x < rows; ++x) {
    for (Eigen::Index y = 0; y < cols; ++y) a(x, y) = psi.amps(x * cols + y);
  }
  return a;
}

SchmidtForm schmidt_decompose(const PureState& psi) {
  const SvdResult s = linalg::svd(vec_inv(psi));
  const auto r = static_cast<Eigen::Index>(linalg::numerical_rank(s.singulars));
  SchmidtForm out{s.singulars.head(r).array().square().matrix(), s.left.leftCols(r),
                  s.right.leftCols(r).conjugate()};
  // A = U S V^dagger gives psi = sum_i s_i U_i (x) conj(V_i). Fix each left
  // vector's largest entry to be real positive and push the phase right.
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::Index arg = 0;
    out.left.col(i).cwiseAbs().maxCoeff(&arg);
    const Complex z = out.left(arg, i);
    const Complex phase = z / std::abs(z);
    out.left.col(i) *= std::conj(phase);
    out.right.col(i) *= phase;
  }
  return out;
}

std::size_t rank_eps(const CMatrix& a, double eps) {
  check_eps(eps);
  const double norm = a.norm();
  if (std::abs(norm - 1.0) > 1e-9) throw NotNormalized("rank_eps: matrix is not unit-norm");
  const RVector mass = linalg::svd(a).singulars.array().square().matrix();
  return min_prefix(mass, 1.0 - eps);
}

std::size_t srank_eps(const SchmidtForm& form, double eps) {
  check_eps(eps);
  const double keep = eps >= 1.0 ? 0.0 : (1.0 - eps) * (1.0 - eps);
  return min_prefix(form.coeffs, keep);
}

std::size_t srank_eps(const PureState& psi, double eps) {
  return srank_eps(schmidt_decompose(psi), eps);
}

int q_eps(const PureState& psi, double eps) { return linalg::ceil_log2(srank_eps(psi, eps)); }

namespace {

struct Truncation {
  SchmidtForm form;
  Eigen::Index terms;
  double mass;
};

Truncation truncate(const PureState& psi, double eps) {
  SchmidtForm form = schmidt_decompose(psi);
  const auto terms =
      static_cast<Eigen::Index>(std::max<std::size_t>(1, srank_eps(form, eps)));
  const double mass = form.coeffs.head(terms).sum();
  return {std::move(form), terms, mass};
}

}  // namespace

Approximant build_approximant(const PureState& psi, double eps) {
  const Truncation t = truncate(psi, eps);
  const Eigen::Index db = static_cast<Eigen::Index>(psi.dim_b);
  CVector phi = CVector::Zero(psi.amps.size());
  for (Eigen::Index i = 0; i < t.terms; ++i) {
    const double w = std::sqrt(t.form.coeffs(i) / t.mass);
    for (Eigen::Index x = 0; x < t.form.left.rows(); ++x) {
      phi.segment(x * db, db) += w * t.form.left(x, i) * t.form.right.col(i);
    }
  }
  phi.normalize();
  return {make_pure_state(std::move(phi), psi.dim_a, psi.dim_b), std::sqrt(t.mass),
          static_cast<std::size_t>(t.terms)};
}

ProtocolSpec synth_pure_protocol(const PureState& psi, double eps) {
  const Truncation t = truncate(psi, eps);
  return protocol::schmidt_seed_protocol(t.form.coeffs.head(t.terms), t.form.left.leftCols(t.terms),
                                         t.form.right.leftCols(t.terms),
                                         linalg::pure_density(psi.amps, psi.dim_a, psi.dim_b), eps);
}

}  // namespace qcorr::pure
