#pragma once

#include <cstddef>

#include "qcorr/classical.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/protocol.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

struct VerifyReport {
  double fidelity = 0.0;
  bool pass = false;
  int seed_size = 0;           // declared
  int computed_seed_size = 0;  // ceil(log2 Schmidt rank of the seed)
};

namespace sim {

/// Seed size implied by the seed itself: ceil(log2 srank) of the seed, or of
/// its canonical purification for mixed seeds.
int seed_size_of(const ProtocolSpec& spec);

/// Throws InvalidInput unless the seed is a valid state, the channel input
/// dimensions match the seed, the outputs match the target and the declared
/// seed size equals seed_size_of(spec).
void validate(const ProtocolSpec& spec);

/// (Phi_A (x) Phi_B)(seed) on the target's A (x) B dimensions.
DensityMatrix apply_protocol(const ProtocolSpec& spec);

/// Exact Born-rule distribution P(x, y) = <x,y|rho|x,y>.
DistMatrix measure_computational(const DensityMatrix& rho);

/// Moves a qubit register to the other party; amplitudes are unchanged.
LayoutState transfer_qubit(const LayoutState& state, std::size_t which, Party from, Party to);

/// Protocol that shares the Schmidt seed of `state` across its Alice|Bob cut,
/// rotates it into place locally and then discards every register not
/// listed in `keep` (register indices; the kept registers of each party form
/// that party's output, in declared order).
ProtocolSpec protocol_from_layout(const LayoutState& state, const std::vector<std::size_t>& keep,
                                  DensityMatrix target, double eps);

/// Exact protocol for the classical state of P built from a psd factorization.
ProtocolSpec classical_protocol(const DistMatrix& p, const PsdFactorization& f);

/// Passes iff F(apply_protocol(spec), target) >= 1 - eps - 1e-9.
VerifyReport verify_generation(const ProtocolSpec& spec);

}  // namespace sim
}  // namespace qcorr
