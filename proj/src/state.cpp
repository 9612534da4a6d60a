#include "qcorr/state.hpp"

#include <cmath>
#include <numeric>

namespace qcorr {

PureState make_pure_state(CVector amps, std::size_t dim_a, std::size_t dim_b) {
  if (dim_a == 0 || dim_b == 0) throw InvalidInput("pure state: zero dimension");
  if (static_cast<std::size_t>(amps.size()) != dim_a * dim_b) {
    throw InvalidInput("pure state: amplitude count does not match dimensions");
  }
  if (!linalg::all_finite(amps)) throw InvalidInput("pure state: non-finite amplitude");
  if (std::abs(amps.norm() - 1.0) > 1e-10) {
    throw NotNormalized("pure state: norm deviates from 1");
  }
  return {dim_a, dim_b, std::move(amps)};
}

PureState normalized_state(CVector amps, std::size_t dim_a, std::size_t dim_b) {
  const double n = amps.norm();
  if (!(n > 0.0)) throw InvalidInput("pure state: zero vector");
  amps /= n;
  return make_pure_state(std::move(amps), dim_a, dim_b);
}

const char* party_name(Party p) { return p == Party::kAlice ? "alice" : "bob"; }

Party other(Party p) { return p == Party::kAlice ? Party::kBob : Party::kAlice; }

std::size_t LayoutState::dim() const {
  std::size_t d = 1;
  for (const auto& r : registers) d *= r.dim;
  return d;
}

std::vector<std::size_t> LayoutState::dims() const {
  std::vector<std::size_t> d;
  d.reserve(registers.size());
  for (const auto& r : registers) d.push_back(r.dim);
  return d;
}

std::size_t LayoutState::side_dim(Party p) const {
  std::size_t d = 1;
  for (const auto& r : registers) {
    if (r.owner == p) d *= r.dim;
  }
  return d;
}

void check_layout(const LayoutState& s) {
  if (s.registers.empty()) throw InvalidInput("layout: no registers");
  for (const auto& r : s.registers) {
    if (r.dim == 0) throw InvalidInput("layout: register '" + r.name + "' has dimension 0");
  }
  if (s.dim() != static_cast<std::size_t>(s.amps.size())) {
    throw InvalidInput("layout: register dimensions do not match amplitude count");
  }
}

CMatrix cut_matrix(const LayoutState& s) {
  check_layout(s);
  const std::size_t n = s.registers.size();
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * s.registers[i].dim;

  // Full-index offsets contributed by each side, enumerated row-major.
  auto offsets = [&](Party p) {
    std::vector<std::size_t> out{0};
    for (std::size_t r = 0; r < n; ++r) {
      if (s.registers[r].owner != p) continue;
      std::vector<std::size_t> next;
      next.reserve(out.size() * s.registers[r].dim);
      for (std::size_t base : out) {
        for (std::size_t v = 0; v < s.registers[r].dim; ++v) next.push_back(base + v * stride[r]);
      }
      out = std::move(next);
    }
    return out;
  };
  const auto rows = offsets(Party::kAlice);
  const auto cols = offsets(Party::kBob);
  CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          s.amps(static_cast<Eigen::Index>(rows[i] + cols[j]));
    }
  }
  return m;
}

std::size_t schmidt_rank(const LayoutState& s) { return linalg::rank(cut_matrix(s)); }

std::size_t schmidt_rank(const PureState& s) { return schmidt_rank(as_layout(s)); }

CMatrix reduce(const LayoutState& s, const std::vector<std::size_t>& keep) {
  check_layout(s);
  const auto dims = s.dims();
  return linalg::partial_trace(s.amps, dims, keep);
}

LayoutState as_layout(const PureState& s) {
  return {s.amps, {{"A", s.dim_a, Party::kAlice}, {"B", s.dim_b, Party::kBob}}};
}

}  // namespace qcorr
