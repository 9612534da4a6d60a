#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qcorr/linalg.hpp"

namespace qcorr {

/// Bipartite pure state; amps indexed x * dim_b + y.
struct PureState {
  std::size_t dim_a = 1;
  std::size_t dim_b = 1;
  CVector amps;
};

/// Validates the shape and unit norm (within 1e-10).
PureState make_pure_state(CVector amps, std::size_t dim_a, std::size_t dim_b);
/// Same as make_pure_state but rescales a nonzero vector to unit norm first.
PureState normalized_state(CVector amps, std::size_t dim_a, std::size_t dim_b);

enum class Party { kAlice, kBob };

const char* party_name(Party p);
Party other(Party p);

struct Register {
  std::string name;
  std::size_t dim = 1;
  Party owner = Party::kAlice;
};

/// A pure state over an ordered register list; amplitudes are row-major in
/// declared register order. The Alice|Bob cut is read from the owners.
struct LayoutState {
  CVector amps;
  std::vector<Register> registers;

  std::size_t dim() const;
  std::vector<std::size_t> dims() const;
  std::size_t side_dim(Party p) const;
};

/// Throws InvalidInput when the register dimensions do not match amps.
void check_layout(const LayoutState& s);

/// Amplitudes reshaped to (Alice registers) x (Bob registers), each side
/// ordered as declared.
CMatrix cut_matrix(const LayoutState& s);
std::size_t schmidt_rank(const LayoutState& s);
std::size_t schmidt_rank(const PureState& s);

/// Density matrix of the listed registers (by index) after tracing out the rest.
CMatrix reduce(const LayoutState& s, const std::vector<std::size_t>& keep);

/// Two-register layout (A | B) for a bipartite pure state.
LayoutState as_layout(const PureState& s);

}  // namespace qcorr
