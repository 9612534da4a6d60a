#include "qcorr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcorr/general.hpp"

namespace qcorr::sim {

namespace {

// Pure components sqrt(w_k) |e_k> of the seed, as dim_a x dim_b amplitude matrices.
std::vector<CMatrix> seed_components(const ProtocolSpec& spec) {
  const auto da = static_cast<Eigen::Index>(spec.seed_dim_a());
  const auto db = static_cast<Eigen::Index>(spec.seed_dim_b());
  auto as_matrix = [&](const CVector& v) {
    CMatrix m(da, db);
    for (Eigen::Index x = 0; x < da; ++x)
      for (Eigen::Index y = 0; y < db; ++y) m(x, y) = v(x * db + y);
    return m;
  };
  std::vector<CMatrix> out;
  if (const auto* pure = std::get_if<PureState>(&spec.seed)) {
    out.push_back(as_matrix(pure->amps));
    return out;
  }
  const auto& rho = std::get<DensityMatrix>(spec.seed);
  const EighResult e = linalg::eigh(rho.mat);
  const double top = std::max(e.values(0), 0.0);
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) <= tol::kRankRelative * top) break;
    out.push_back(as_matrix(e.vectors.col(k) * std::sqrt(e.values(k))));
  }
  return out;
}

}  // namespace

int seed_size_of(const ProtocolSpec& spec) {
  if (const auto* pure = std::get_if<PureState>(&spec.seed)) {
    return linalg::ceil_log2(schmidt_rank(*pure));
  }
  const auto& rho = std::get<DensityMatrix>(spec.seed);
  return linalg::ceil_log2(schmidt_rank(general::canonical_purification(rho).layout()));
}

void validate(const ProtocolSpec& spec) {
  if (const auto* pure = std::get_if<PureState>(&spec.seed)) {
    make_pure_state(pure->amps, pure->dim_a, pure->dim_b);
  } else {
    const auto& rho = std::get<DensityMatrix>(spec.seed);
    linalg::make_density(rho.mat, rho.dim_a, rho.dim_b);
  }
  const LocalChannel& a = spec.alice;
  const LocalChannel& b = spec.bob;
  make_channel(a.kraus);
  make_channel(b.kraus);
  if (a.in_dim() != spec.seed_dim_a() || b.in_dim() != spec.seed_dim_b()) {
    throw InvalidInput("protocol: channel input dimensions do not match the seed");
  }
  if (a.out_dim() != spec.target.dim_a || b.out_dim() != spec.target.dim_b) {
    throw InvalidInput("protocol: channel output dimensions do not match the target");
  }
  if (!(spec.eps >= 0.0) || !std::isfinite(spec.eps)) throw InvalidInput("protocol: invalid eps");
  const int size = seed_size_of(spec);
  if (spec.seed_size_qubits != size) {
    throw InvalidInput("protocol: declared seed size " + std::to_string(spec.seed_size_qubits) +
                       " does not match the seed (" + std::to_string(size) + " qubits)");
  }
}

DensityMatrix apply_protocol(const ProtocolSpec& spec) {
  const LocalChannel& a = spec.alice;
  const LocalChannel& b = spec.bob;
  if (a.kraus.empty() || b.kraus.empty()) throw InvalidInput("protocol: empty channel");
  if (a.in_dim() != spec.seed_dim_a() || b.in_dim() != spec.seed_dim_b()) {
    throw InvalidInput("protocol: channel input dimensions do not match the seed");
  }
  const auto oa = static_cast<Eigen::Index>(a.out_dim());
  const auto ob = static_cast<Eigen::Index>(b.out_dim());
  CMatrix rho = CMatrix::Zero(oa * ob, oa * ob);
  CVector out(oa * ob);
  for (const CMatrix& s : seed_components(spec)) {
    // (K (x) L) vec(S) = vec(K S L^T) in row-major vectorization.
    for (const CMatrix& k : a.kraus) {
      const CMatrix ks = k * s;
      for (const CMatrix& l : b.kraus) {
        const CMatrix m = ks * l.transpose();
        for (Eigen::Index x = 0; x < oa; ++x) out.segment(x * ob, ob) = m.row(x).transpose();
        rho.noalias() += out * out.adjoint();
      }
    }
  }
  rho = (rho + rho.adjoint()) * 0.5;
  return {a.out_dim(), b.out_dim(), std::move(rho)};
}

DistMatrix measure_computational(const DensityMatrix& rho) {
  const auto n = static_cast<Eigen::Index>(rho.dim_a), m = static_cast<Eigen::Index>(rho.dim_b);
  if (rho.mat.rows() != n * m || rho.mat.cols() != n * m) {
    throw InvalidInput("measure_computational: shape does not match dimensions");
  }
  RMatrix p(n, m);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < m; ++y) p(x, y) = rho.mat(x * m + y, x * m + y).real();
  if (std::abs(p.sum() - 1.0) > 1e-9) throw NotNormalized("measure_computational: trace is not 1");
  return {p.cwiseMax(0.0)};
}

LayoutState transfer_qubit(const LayoutState& state, std::size_t which, Party from, Party to) {
  check_layout(state);
  if (which >= state.registers.size()) throw InvalidInput("transfer_qubit: register index out of range");
  const Register& reg = state.registers[which];
  if (reg.owner != from) {
    throw InvalidInput("transfer_qubit: register '" + reg.name + "' is not held by " + party_name(from));
  }
  if (to == from) throw InvalidInput("transfer_qubit: sender and receiver are the same party");
  if (reg.dim != 2) throw InvalidInput("transfer_qubit: register '" + reg.name + "' is not a qubit");
  LayoutState out = state;
  out.registers[which].owner = to;
  return out;
}

VerifyReport verify_generation(const ProtocolSpec& spec) {
  validate(spec);
  VerifyReport r;
  r.fidelity = linalg::fidelity(apply_protocol(spec), spec.target);
  r.pass = r.fidelity >= 1.0 - spec.eps - 1e-9;
  r.seed_size = spec.seed_size_qubits;
  r.computed_seed_size = seed_size_of(spec);
  return r;
}

ProtocolSpec protocol_from_layout(const LayoutState& state, const std::vector<std::size_t>& keep,
                                  DensityMatrix target, double eps) {
  check_layout(state);
  const SvdResult dec = linalg::svd(cut_matrix(state));
  const auto r = static_cast<Eigen::Index>(linalg::numerical_rank(dec.singulars));
  const RVector weights = dec.singulars.head(r).array().square().matrix();
  ProtocolSpec spec = protocol::schmidt_seed_protocol(
      weights, dec.left.leftCols(r), dec.right.leftCols(r).conjugate(), std::move(target), eps);

  auto side = [&](Party p) {
    std::vector<std::size_t> dims, kept;
    for (std::size_t i = 0; i < state.registers.size(); ++i) {
      if (state.registers[i].owner != p) continue;
      if (std::find(keep.begin(), keep.end(), i) != keep.end()) kept.push_back(dims.size());
      dims.push_back(state.registers[i].dim);
    }
    if (kept.empty()) throw InvalidInput(std::string("protocol: no output register kept for ") + party_name(p));
    return protocol::trace_out(dims, kept);
  };
  spec.alice = protocol::compose(spec.alice, side(Party::kAlice));
  spec.bob = protocol::compose(spec.bob, side(Party::kBob));
  return spec;
}

ProtocolSpec classical_protocol(const DistMatrix& p, const PsdFactorization& f) {
  const ClassicalPurification cp = classical::synth_from_psd(p, f);
  // Outputs are A and B (registers 0 and 3).
  return protocol_from_layout(cp.state, {0, 3}, classical::classical_state(p), 0.0);
}

}  // namespace qcorr::sim
