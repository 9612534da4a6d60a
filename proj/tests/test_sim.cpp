#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "qcorr/pure.hpp"
#include "qcorr/sim.hpp"
#include "support.hpp"

using namespace qtest;

namespace {

ProtocolSpec identity_protocol(const PureState& seed, const DensityMatrix& target, double eps) {
  ProtocolSpec s;
  s.seed = seed;
  s.seed_size_qubits = linalg::ceil_log2(schmidt_rank(seed));
  s.alice = identity_channel(seed.dim_a);
  s.bob = identity_channel(seed.dim_b);
  s.target = target;
  s.eps = eps;
  return s;
}

LocalChannel depolarizing(double p) {
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  return make_channel({std::sqrt(1 - 3 * p / 4) * CMatrix::Identity(2, 2), std::sqrt(p / 4) * x,
                       std::sqrt(p / 4) * y, std::sqrt(p / 4) * z});
}

// Oracle: dense (K (x) L) rho (K (x) L)^dagger summed over all Kraus pairs.
CMatrix dense_apply(const LocalChannel& a, const LocalChannel& b, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(a.out_dim() * b.out_dim(), a.out_dim() * b.out_dim());
  for (const auto& k : a.kraus)
    for (const auto& l : b.kraus) {
      const CMatrix kl = linalg::kron(k, l);
      out += kl * rho * kl.adjoint();
    }
  return out;
}

}  // namespace

TEST_CASE("identity channels on an EPR seed") {
  const DensityMatrix target = linalg::pure_density(epr().amps, 2, 2);
  const ProtocolSpec s = identity_protocol(epr(), target, 0.0);
  const DensityMatrix out = sim::apply_protocol(s);
  CHECK((out.mat - target.mat).norm() < 1e-14);
  const VerifyReport v = sim::verify_generation(s);
  CHECK(v.pass);
  CHECK(v.fidelity >= 1.0 - 1e-9);
  CHECK(v.seed_size == 1);
  CHECK(v.computed_seed_size == 1);
}

TEST_CASE("synthesized pure protocol reaches its target") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 10; ++t) {
    const PureState psi = random_state(rng, 2 + t % 3, 2 + (t / 3) % 3);
    const ProtocolSpec s = pure::synth_pure_protocol(psi, 0.0);
    const DensityMatrix out = sim::apply_protocol(s);
    CHECK(std::abs(out.mat.trace().real() - 1.0) < 1e-9);
    CHECK(linalg::fidelity(out, s.target) >= 1.0 - 1e-9);
  }
}

TEST_CASE("depolarizing noise on one EPR half keeps the reduction maximally mixed") {
  ProtocolSpec s = identity_protocol(epr(), linalg::pure_density(epr().amps, 2, 2), 0.0);
  s.bob = depolarizing(0.6);
  const DensityMatrix out = sim::apply_protocol(s);
  CHECK((linalg::reduce_a(out) - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((linalg::reduce_b(out) - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((out.mat - dense_apply(s.alice, s.bob, epr().amps * epr().amps.adjoint())).norm() < 1e-12);
}

TEST_CASE("apply_protocol matches the dense Kraus sum for random channels") {
  std::mt19937_64 rng(62);
  for (int t = 0; t < 10; ++t) {
    // Random channel from a random isometry V (d_out * k x d_in), split into k Kraus blocks.
    auto random_channel = [&](Eigen::Index din, Eigen::Index dout, Eigen::Index k) {
      const CMatrix g = random_matrix(rng, dout * k, din);
      Eigen::HouseholderQR<CMatrix> qr(g);
      const CMatrix v = qr.householderQ() * CMatrix::Identity(dout * k, din);
      std::vector<CMatrix> ks;
      for (Eigen::Index i = 0; i < k; ++i) ks.push_back(v.middleRows(i * dout, dout));
      return make_channel(ks);
    };
    const PureState seed = random_state(rng, 2, 3);
    ProtocolSpec s;
    s.seed = seed;
    s.seed_size_qubits = linalg::ceil_log2(schmidt_rank(seed));
    s.alice = random_channel(2, 3, 2);
    s.bob = random_channel(3, 2, 3);
    s.target = linalg::make_density(CMatrix::Identity(6, 6) / 6.0, 3, 2);
    const DensityMatrix out = sim::apply_protocol(s);
    CHECK((out.mat - dense_apply(s.alice, s.bob, seed.amps * seed.amps.adjoint())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(out.mat.trace().real() - 1.0) < 1e-9);
    CHECK(linalg::min_eigenvalue(out.mat) > -1e-9);
  }
}

TEST_CASE("mixed seeds are handled through their spectrum") {
  std::mt19937_64 rng(63);
  const DensityMatrix seed = random_density(rng, 2, 2, 2);
  ProtocolSpec s;
  s.seed = seed;
  s.alice = identity_channel(2);
  s.bob = identity_channel(2);
  s.target = seed;
  s.seed_size_qubits = sim::seed_size_of(s);
  const DensityMatrix out = sim::apply_protocol(s);
  CHECK((out.mat - seed.mat).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sim::verify_generation(s).pass);
}

TEST_CASE("validate catches inconsistent protocols") {
  const DensityMatrix target = linalg::pure_density(epr().amps, 2, 2);
  ProtocolSpec s = identity_protocol(epr(), target, 0.0);
  s.seed_size_qubits = 0;
  CHECK_THROWS_AS(sim::validate(s), InvalidInput);
  s.seed_size_qubits = 1;
  s.bob = identity_channel(3);
  CHECK_THROWS_AS(sim::validate(s), InvalidInput);
  s.bob = identity_channel(2);
  s.target = linalg::pure_density(basis(6, 0), 2, 3);
  CHECK_THROWS_AS(sim::validate(s), InvalidInput);
  s.target = target;
  s.eps = -0.5;
  CHECK_THROWS_AS(sim::validate(s), InvalidInput);
  s.eps = 0.0;
  CHECK_NOTHROW(sim::validate(s));
}

TEST_CASE("make_channel rejects non trace-preserving sets") {
  CHECK_THROWS_AS(make_channel({0.5 * CMatrix::Identity(2, 2)}), InvalidInput);
  CHECK_THROWS_AS(make_channel({}), InvalidInput);
  CHECK_THROWS_AS(make_channel({CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}), InvalidInput);
}

TEST_CASE("measure_computational examples") {
  CMatrix d = CMatrix::Zero(4, 4);
  d(0, 0) = d(3, 3) = 0.5;
  const DistMatrix a = sim::measure_computational({2, 2, d});
  CHECK((a.p - 0.5 * RMatrix::Identity(2, 2)).norm() < 1e-15);

  const DistMatrix b = sim::measure_computational(linalg::pure_density(epr().amps, 2, 2));
  CHECK((b.p - 0.5 * RMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK(std::abs(b.p.sum() - 1.0) < 1e-9);

  std::mt19937_64 rng(64);
  const PsdFactorization f = random_psd_factorization(rng, 3, 2, 2);
  const DistMatrix p = dist(classical::trace_products(f));
  const ClassicalPurification cp = classical::synth_from_psd(p, f);
  const DensityMatrix rho{3, 2, reduce(cp.state, {0, 3})};
  CHECK((sim::measure_computational(rho).p - p.p).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("transfer_qubit examples") {
  // Product state: rank stays 1.
  LayoutState prod{basis(4, 1), {{"A", 2, Party::kAlice}, {"B", 2, Party::kBob}}};
  const LayoutState moved = sim::transfer_qubit(prod, 1, Party::kBob, Party::kAlice);
  CHECK(schmidt_rank(moved) == 1);
  CHECK(moved.amps == prod.amps);

  // Bob sends his EPR half: everything is local to Alice.
  LayoutState e{epr().amps, {{"A", 2, Party::kAlice}, {"B", 2, Party::kBob}}};
  CHECK(schmidt_rank(e) == 2);
  const LayoutState sent = sim::transfer_qubit(e, 1, Party::kBob, Party::kAlice);
  CHECK(sent.registers[1].owner == Party::kAlice);
  CHECK(sent.side_dim(Party::kBob) == 1);
  CHECK(schmidt_rank(sent) == 1);
}

TEST_CASE("transfer_qubit errors") {
  LayoutState s{basis(6, 0), {{"A", 2, Party::kAlice}, {"B", 3, Party::kBob}}};
  CHECK_THROWS_AS(sim::transfer_qubit(s, 0, Party::kBob, Party::kAlice), InvalidInput);
  CHECK_THROWS_AS(sim::transfer_qubit(s, 1, Party::kBob, Party::kAlice), InvalidInput);
  CHECK_THROWS_AS(sim::transfer_qubit(s, 5, Party::kAlice, Party::kBob), InvalidInput);
  CHECK_THROWS_AS(sim::transfer_qubit(s, 0, Party::kAlice, Party::kAlice), InvalidInput);
}

TEST_CASE("verify_generation on a truncated protocol") {
  const PureState psi = diag_state({0.9, 0.1});
  const ProtocolSpec s = pure::synth_pure_protocol(psi, 0.06);
  const VerifyReport v = sim::verify_generation(s);
  CHECK(v.pass);
  CHECK(std::abs(v.fidelity - std::sqrt(0.9)) < 1e-9);

  ProtocolSpec strict = s;
  strict.eps = 0.01;
  const VerifyReport w = sim::verify_generation(strict);
  CHECK(!w.pass);
  CHECK(std::abs(w.fidelity - std::sqrt(0.9)) < 1e-9);
}

TEST_CASE("protocol_from_layout produces the reduced state") {
  std::mt19937_64 rng(65);
  const PureState psi = random_state(rng, 4, 6);
  // Registers (A 2, A1 2 | B 3, B1 2) over the same amplitudes.
  LayoutState s{psi.amps, {{"A", 2, Party::kAlice}, {"A1", 2, Party::kAlice}, {"B", 3, Party::kBob}, {"B1", 2, Party::kBob}}};
  const DensityMatrix target{2, 3, reduce(s, {0, 2})};
  const ProtocolSpec spec = sim::protocol_from_layout(s, {0, 2}, target, 0.0);
  CHECK(spec.seed_size_qubits == linalg::ceil_log2(schmidt_rank(s)));
  CHECK((sim::apply_protocol(spec).mat - target.mat).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sim::verify_generation(spec).pass);
}

TEST_CASE("property: channel application preserves trace and positivity") {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const PureState seed = random_state(rng, 2, 2);
    ProtocolSpec s = identity_protocol(seed, linalg::pure_density(seed.amps, 2, 2), 0.0);
    s.alice = depolarizing(u(rng));
    s.bob = depolarizing(u(rng));
    const DensityMatrix out = sim::apply_protocol(s);
    CHECK(std::abs(out.mat.trace().real() - 1.0) < 1e-9);
    CHECK(linalg::min_eigenvalue(out.mat) > -1e-9);
  }
}

TEST_CASE("property: a qubit transfer at most doubles the Schmidt rank") {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 100; ++t) {
    const int qa = 1 + t % 3, qb = 1 + (t / 3) % 3;
    std::vector<Register> regs;
    for (int i = 0; i < qa; ++i) regs.push_back({"a" + std::to_string(i), 2, Party::kAlice});
    for (int i = 0; i < qb; ++i) regs.push_back({"b" + std::to_string(i), 2, Party::kBob});
    LayoutState s{random_state_of_rank(rng, 1u << qa, 1u << qb, 1 + t % 4).amps, regs};
    std::uniform_int_distribution<int> pick(0, qa + qb - 1);
    const auto which = static_cast<std::size_t>(pick(rng));
    const Party from = s.registers[which].owner;
    const LayoutState after = sim::transfer_qubit(s, which, from, other(from));
    CHECK(schmidt_rank(after) <= 2 * schmidt_rank(s));
  }
}
