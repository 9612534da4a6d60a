#include "qcorr/protocol.hpp"

#include <cmath>

namespace qcorr {

std::size_t LocalChannel::in_dim() const {
  return kraus.empty() ? 0 : static_cast<std::size_t>(kraus.front().cols());
}

std::size_t LocalChannel::out_dim() const {
  return kraus.empty() ? 0 : static_cast<std::size_t>(kraus.front().rows());
}

LocalChannel make_channel(std::vector<CMatrix> kraus) {
  if (kraus.empty()) throw InvalidInput("channel: no Kraus operators");
  const Eigen::Index in = kraus.front().cols();
  const Eigen::Index out = kraus.front().rows();
  if (in == 0 || out == 0) throw InvalidInput("channel: empty Kraus operator");
  CMatrix sum = CMatrix::Zero(in, in);
  for (const auto& k : kraus) {
    if (k.rows() != out || k.cols() != in) throw InvalidInput("channel: Kraus shapes differ");
    if (!linalg::all_finite(k)) throw InvalidInput("channel: non-finite Kraus entry");
    sum += k.adjoint() * k;
  }
  if ((sum - CMatrix::Identity(in, in)).cwiseAbs().maxCoeff() > 1e-9) {
    throw InvalidInput("channel: Kraus operators are not trace preserving");
  }
  return {std::move(kraus)};
}

LocalChannel identity_channel(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return make_channel({CMatrix::Identity(d, d)});
}

LocalChannel isometry_channel(const CMatrix& v) { return make_channel({v}); }

namespace {
template <class F>
std::size_t seed_side(const ProtocolSpec& p, F pick) {
  return std::visit([&](const auto& s) { return pick(s.dim_a, s.dim_b); }, p.seed);
}
}  // namespace

std::size_t ProtocolSpec::seed_dim_a() const {
  return seed_side(*this, [](std::size_t a, std::size_t) { return a; });
}

std::size_t ProtocolSpec::seed_dim_b() const {
  return seed_side(*this, [](std::size_t, std::size_t b) { return b; });
}

namespace protocol {

LocalChannel compose(const LocalChannel& first, const LocalChannel& second) {
  if (second.in_dim() != first.out_dim()) throw InvalidInput("compose: dimension mismatch");
  std::vector<CMatrix> ks;
  ks.reserve(first.kraus.size() * second.kraus.size());
  for (const auto& b : second.kraus) {
    for (const auto& a : first.kraus) ks.push_back(b * a);
  }
  return make_channel(std::move(ks));
}

LocalChannel trace_out(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& keep) {
  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  for (std::size_t k : keep) {
    if (k >= n) throw InvalidInput("trace_out: register index out of range");
    kept[k] = true;
  }
  std::size_t total = 1, kept_dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= dims[i];
    if (kept[i]) kept_dim *= dims[i];
  }
  const std::size_t traced_dim = total / kept_dim;
  // One Kraus operator per traced basis state: (I_kept (x) <t|) in register order.
  std::vector<CMatrix> ks;
  ks.reserve(traced_dim);
  for (std::size_t t = 0; t < traced_dim; ++t) {
    CMatrix k = CMatrix::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(total));
    for (std::size_t full = 0; full < total; ++full) {
      std::size_t rem = full, kidx = 0, tidx = 0, kstride = 1, tstride = 1;
      for (std::size_t i = n; i-- > 0;) {
        const std::size_t digit = rem % dims[i];
        rem /= dims[i];
        if (kept[i]) {
          kidx += digit * kstride;
          kstride *= dims[i];
        } else {
          tidx += digit * tstride;
          tstride *= dims[i];
        }
      }
      if (tidx == t) k(static_cast<Eigen::Index>(kidx), static_cast<Eigen::Index>(full)) = 1.0;
    }
    ks.push_back(std::move(k));
  }
  return make_channel(std::move(ks));
}

ProtocolSpec schmidt_seed_protocol(const RVector& weights, const CMatrix& left,
                                   const CMatrix& right, DensityMatrix target, double eps) {
  const Eigen::Index terms = weights.size();
  if (terms == 0) throw InvalidInput("seed protocol: no Schmidt terms");
  if (left.cols() != terms || right.cols() != terms) {
    throw InvalidInput("seed protocol: vector families do not match the term count");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvalidInput("seed protocol: zero weight");

  const int qubits = linalg::ceil_log2(static_cast<std::size_t>(terms));
  const Eigen::Index padded = Eigen::Index{1} << qubits;
  CVector seed = CVector::Zero(padded * padded);
  for (Eigen::Index i = 0; i < terms; ++i) seed(i * padded + i) = std::sqrt(weights(i) / total);

  auto side_channel = [&](const CMatrix& vecs) {
    CMatrix k0 = CMatrix::Zero(vecs.rows(), padded);
    k0.leftCols(terms) = vecs;
    std::vector<CMatrix> ks{k0};
    // Unused seed levels (never populated) go to |0>, one operator each.
    for (Eigen::Index j = terms; j < padded; ++j) {
      CMatrix k = CMatrix::Zero(vecs.rows(), padded);
      k(0, j) = 1.0;
      ks.push_back(std::move(k));
    }
    return make_channel(std::move(ks));
  };

  ProtocolSpec spec;
  spec.seed = make_pure_state(std::move(seed), static_cast<std::size_t>(padded),
                              static_cast<std::size_t>(padded));
  spec.seed_size_qubits = qubits;
  spec.alice = side_channel(left);
  spec.bob = side_channel(right);
  spec.target = std::move(target);
  spec.eps = eps;
  return spec;
}

}  // namespace protocol
}  // namespace qcorr
