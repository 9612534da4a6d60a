#include "qcorr/general.hpp"

#include <cmath>

namespace qcorr {

LayoutState Purification::layout() const {
  return {amps,
          {{"A", dim_a, Party::kAlice},
           {"A1", dim_a1, Party::kAlice},
           {"B", dim_b, Party::kBob},
           {"B1", dim_b1, Party::kBob}}};
}

namespace general {

Purification make_purification(CVector amps, std::size_t dim_a, std::size_t dim_a1,
                               std::size_t dim_b, std::size_t dim_b1) {
  if (dim_a == 0 || dim_a1 == 0 || dim_b == 0 || dim_b1 == 0) {
    throw InvalidInput("purification: zero register dimension");
  }
  if (static_cast<std::size_t>(amps.size()) != dim_a * dim_a1 * dim_b * dim_b1) {
    throw InvalidInput("purification: amplitude count does not match register dimensions");
  }
  if (!linalg::all_finite(amps)) throw InvalidInput("purification: non-finite amplitude");
  if (std::abs(amps.norm() - 1.0) > 1e-10) throw NotNormalized("purification: state is not normalized");
  return {dim_a, dim_a1, dim_b, dim_b1, std::move(amps)};
}

Purification from_layout(const LayoutState& s) {
  check_layout(s);
  // Registers must list every Alice register before any Bob register.
  std::size_t dims[2][2] = {{1, 1}, {1, 1}};
  bool seen[2] = {false, false};
  bool bob_started = false;
  for (const auto& reg : s.registers) {
    const int side = reg.owner == Party::kAlice ? 0 : 1;
    if (side == 0 && bob_started) {
      throw InvalidInput("purification: Alice register '" + reg.name + "' follows a Bob register");
    }
    if (side == 1) bob_started = true;
    if (!seen[side]) {
      dims[side][0] = reg.dim;
      seen[side] = true;
    } else {
      dims[side][1] *= reg.dim;
    }
  }
  if (!seen[0] || !seen[1]) throw InvalidInput("purification: both parties need a register");
  return make_purification(s.amps, dims[0][0], dims[0][1], dims[1][0], dims[1][1]);
}

Purification canonical_purification(const DensityMatrix& rho) {
  const DensityMatrix checked = linalg::make_density(rho.mat, rho.dim_a, rho.dim_b);
  const EighResult e = linalg::eigh(checked.mat);
  const double top = std::max(e.values(0), 0.0);
  Eigen::Index k = 0;
  while (k < e.values.size() && e.values(k) > tol::kRankRelative * top) ++k;
  if (k == 0) throw InvalidInput("canonical_purification: zero state");

  const auto da = static_cast<Eigen::Index>(rho.dim_a), db = static_cast<Eigen::Index>(rho.dim_b);
  CVector amps = CVector::Zero(da * k * db);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double w = std::sqrt(e.values(j));
    for (Eigen::Index a = 0; a < da; ++a)
      for (Eigen::Index b = 0; b < db; ++b) amps((a * k + j) * db + b) = w * e.vectors(a * db + b, j);
  }
  amps.normalize();
  return make_purification(std::move(amps), rho.dim_a, static_cast<std::size_t>(k), rho.dim_b, 1);
}

DensityMatrix reduced_state(const Purification& p) {
  const std::size_t dims[] = {p.dim_a, p.dim_a1, p.dim_b, p.dim_b1};
  const std::size_t keep[] = {0, 2};
  return {p.dim_a, p.dim_b, linalg::partial_trace(p.amps, dims, keep)};
}

GeneralFactorization factor_from_purification(const Purification& p) {
  const SvdResult dec = linalg::svd(cut_matrix(p.layout()));
  const auto r = static_cast<Eigen::Index>(linalg::numerical_rank(dec.singulars));
  CMatrix v = dec.left.leftCols(r);
  CMatrix w = dec.right.leftCols(r).conjugate();
  for (Eigen::Index i = 0; i < r; ++i) {
    const double s = std::sqrt(dec.singulars(i));
    v.col(i) *= s;
    w.col(i) *= s;
  }
  const auto ka = static_cast<Eigen::Index>(p.dim_a1), kb = static_cast<Eigen::Index>(p.dim_b1);
  GeneralFactorization f{static_cast<std::size_t>(r), {}, {}};
  for (std::size_t x = 0; x < p.dim_a; ++x) f.as.push_back(v.middleRows(static_cast<Eigen::Index>(x) * ka, ka));
  for (std::size_t y = 0; y < p.dim_b; ++y) f.bs.push_back(w.middleRows(static_cast<Eigen::Index>(y) * kb, kb));
  return f;
}

namespace {

void check_shapes(const GeneralFactorization& f) {
  if (f.as.empty() || f.bs.empty()) throw InvalidInput("factorization: empty factor family");
  const auto r = static_cast<Eigen::Index>(f.r);
  if (r < 1) throw InvalidInput("factorization: r must be at least 1");
  const Eigen::Index ka = f.as.front().rows(), kb = f.bs.front().rows();
  if (ka == 0 || kb == 0) throw InvalidInput("factorization: factors have no rows");
  for (const auto& a : f.as) {
    if (a.rows() != ka || a.cols() != r) throw InvalidInput("factorization: A_x shapes differ");
    if (!linalg::all_finite(a)) throw InvalidInput("factorization: non-finite entry");
  }
  for (const auto& b : f.bs) {
    if (b.rows() != kb || b.cols() != r) throw InvalidInput("factorization: B_y shapes differ");
    if (!linalg::all_finite(b)) throw InvalidInput("factorization: non-finite entry");
  }
}

}  // namespace

CMatrix reconstruct_unnormalized(const GeneralFactorization& f) {
  check_shapes(f);
  const auto da = static_cast<Eigen::Index>(f.dim_a()), db = static_cast<Eigen::Index>(f.dim_b());
  CMatrix rho(da * db, da * db);
  for (Eigen::Index x = 0; x < da; ++x) {
    for (Eigen::Index xp = 0; xp < da; ++xp) {
      // (A_x'^dagger A_x)^T
      const CMatrix ga = (f.as[xp].adjoint() * f.as[x]).transpose();
      for (Eigen::Index y = 0; y < db; ++y) {
        for (Eigen::Index yp = 0; yp < db; ++yp) {
          const CMatrix gb = f.bs[yp].adjoint() * f.bs[y];
          rho(x * db + y, xp * db + yp) = (ga * gb).trace();
        }
      }
    }
  }
  return rho;
}

double factorization_norm(const GeneralFactorization& f) {
  return reconstruct_unnormalized(f).trace().real();
}

DensityMatrix reconstruct_from_factors(const GeneralFactorization& f) {
  CMatrix rho = reconstruct_unnormalized(f);
  const double t = rho.trace().real();
  if (!(t > 0.0)) throw InvalidInput("factorization: reconstructed trace is not positive");
  rho /= t;
  rho = (rho + rho.adjoint()) * 0.5;
  return {f.dim_a(), f.dim_b(), std::move(rho)};
}

Purification assemble_purification(const GeneralFactorization& f) {
  check_shapes(f);
  const auto da = static_cast<Eigen::Index>(f.dim_a()), db = static_cast<Eigen::Index>(f.dim_b());
  const Eigen::Index ka = f.as.front().rows(), kb = f.bs.front().rows();
  const auto r = static_cast<Eigen::Index>(f.r);
  CMatrix alice(da * ka, r), bob(db * kb, r);
  for (Eigen::Index x = 0; x < da; ++x) alice.middleRows(x * ka, ka) = f.as[x];
  for (Eigen::Index y = 0; y < db; ++y) bob.middleRows(y * kb, kb) = f.bs[y];
  const CMatrix amp = alice * bob.transpose();
  CVector psi(amp.size());
  for (Eigen::Index a = 0; a < amp.rows(); ++a) psi.segment(a * amp.cols(), amp.cols()) = amp.row(a).transpose();
  return {f.dim_a(), static_cast<std::size_t>(ka), f.dim_b(), static_cast<std::size_t>(kb), std::move(psi)};
}

QBound q_upper_bound(const DensityMatrix& rho, const SolverConfig& cfg) {
  Purification canon = canonical_purification(rho);
  QBound out;
  out.schmidt_rank = schmidt_rank(canon.layout());
  out.qubits = linalg::ceil_log2(out.schmidt_rank);
  out.tight = canon.dim_a1 == 1;  // pure input
  out.witness = std::move(canon);

  if (const auto p = classical::as_classical(rho)) {
    const DistMatrix dist = classical::validate_dist(p->p, true);
    const RankReport report = classical::psd_rank_search(dist, cfg);
    if (report.complexity() <= out.qubits && report.witness) {
      const ClassicalPurification cp = classical::synth_from_psd(dist, *report.witness);
      out.witness = from_layout(cp.state);
      out.schmidt_rank = schmidt_rank(cp.state);
      out.qubits = linalg::ceil_log2(out.schmidt_rank);
      out.classical_route = true;
      out.tight = out.tight || report.status == RankStatus::kCertified;
    }
  }
  return out;
}

}  // namespace general
}  // namespace qcorr
