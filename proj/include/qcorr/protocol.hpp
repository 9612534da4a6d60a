#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "qcorr/linalg.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

/// Completely positive trace-preserving map given by Kraus operators, each
/// out_dim x in_dim. An isometry is the single-operator case.
struct LocalChannel {
  std::vector<CMatrix> kraus;

  std::size_t in_dim() const;
  std::size_t out_dim() const;
};

/// Validates shapes and sum K^dagger K = I within 1e-9.
LocalChannel make_channel(std::vector<CMatrix> kraus);
LocalChannel identity_channel(std::size_t dim);
LocalChannel isometry_channel(const CMatrix& v);

/// A generation protocol: local channels applied to a shared seed.
struct ProtocolSpec {
  std::variant<PureState, DensityMatrix> seed;
  int seed_size_qubits = 0;
  LocalChannel alice;
  LocalChannel bob;
  DensityMatrix target;
  double eps = 0.0;

  std::size_t seed_dim_a() const;
  std::size_t seed_dim_b() const;
};

}  // namespace qcorr

namespace qcorr::protocol {

/// Kraus operators of `second` after `first` (second o first).
LocalChannel compose(const LocalChannel& first, const LocalChannel& second);

/// Channel that traces out every register not listed in `keep`.
LocalChannel trace_out(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& keep);

/// Protocol that shares sum_i sqrt(weights_i / sum) |i>|i> (padded to a power
/// of two per side) and maps |i> to the i-th column of `left` / `right`.
/// Those columns must be orthonormal. Padding inputs go to |0> through a
/// second Kraus operator.
ProtocolSpec schmidt_seed_protocol(const RVector& weights, const CMatrix& left,
                                   const CMatrix& right, DensityMatrix target, double eps);

}  // namespace qcorr::protocol
