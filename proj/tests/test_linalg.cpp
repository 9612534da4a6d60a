#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"

using namespace qtest;

TEST_CASE("svd of a permutation matrix") {
  CMatrix a(2, 2);
  a << 0, 1, 1, 0;
  const SvdResult s = linalg::svd(a);
  CHECK(s.singulars(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.singulars(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("svd of a diagonal matrix") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = std::sqrt(0.9);
  a(1, 1) = std::sqrt(0.1);
  const SvdResult s = linalg::svd(a);
  CHECK(std::abs(s.singulars(0) - std::sqrt(0.9)) < 1e-14);
  CHECK(std::abs(s.singulars(1) - std::sqrt(0.1)) < 1e-14);
}

TEST_CASE("svd of a random 3x2 matrix agrees with the spectrum of a^dagger a") {
  std::mt19937_64 rng(11);
  const CMatrix a = random_matrix(rng, 3, 2);
  const SvdResult s = linalg::svd(a);
  REQUIRE(s.singulars.size() == 2);
  const CMatrix rebuilt = s.left * s.singulars.cast<Complex>().asDiagonal() * s.right.adjoint();
  CHECK((rebuilt - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
  CHECK((s.left.adjoint() * s.left - CMatrix::Identity(2, 2)).norm() < 1e-10);
  // Independent oracle: eigenvalues of the 2x2 Hermitian a^dagger a from its characteristic polynomial.
  const CMatrix g = a.adjoint() * a;
  const double tr = g.trace().real();
  const double det = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real();
  const double disc = std::sqrt(tr * tr / 4.0 - det);
  CHECK(std::abs(s.singulars(0) * s.singulars(0) - (tr / 2.0 + disc)) < 1e-10);
  CHECK(std::abs(s.singulars(1) * s.singulars(1) - (tr / 2.0 - disc)) < 1e-10);
}

TEST_CASE("svd rejects non-finite entries") {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(linalg::svd(a), InvalidInput);
}

TEST_CASE("eigh basics") {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const EighResult e = linalg::eigh(x);
  CHECK(std::abs(e.values(0) - 1.0) < 1e-14);
  CHECK(std::abs(e.values(1) + 1.0) < 1e-14);

  const EighResult id = linalg::eigh(CMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(id.values(i) - 1.0) < 1e-14);
}

TEST_CASE("eigh of a random Hermitian matrix") {
  std::mt19937_64 rng(12);
  const CMatrix g = random_matrix(rng, 4, 4);
  const CMatrix h = g + g.adjoint();
  const EighResult e = linalg::eigh(h);
  CHECK(std::abs(e.values.sum() - h.trace().real()) < 1e-10);
  CHECK((e.vectors.adjoint() * e.vectors - CMatrix::Identity(4, 4)).norm() < 1e-10);
  CHECK((e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint() - h).norm() < 1e-10);
  for (int i = 0; i + 1 < 4; ++i) CHECK(e.values(i) >= e.values(i + 1));
}

TEST_CASE("eigh rejects non-Hermitian input") {
  CMatrix a(2, 2);
  a << 0, 1, 0, 0;
  CHECK_THROWS_AS(linalg::eigh(a), InvalidInput);
  CHECK_THROWS_AS(linalg::eigh(CMatrix::Zero(2, 3)), InvalidInput);
}

TEST_CASE("psd_sqrt") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 9;
  const CMatrix s = linalg::psd_sqrt(d);
  CHECK(std::abs(s(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(s(1, 1) - 3.0) < 1e-14);
  CHECK(std::abs(s(0, 1)) < 1e-14);

  CHECK(linalg::psd_sqrt(CMatrix::Zero(3, 3)).norm() == 0.0);

  std::mt19937_64 rng(13);
  const CMatrix h = random_psd(rng, 3, 3);
  const CMatrix r = linalg::psd_sqrt(h);
  CHECK((r * r - h).norm() < 1e-9);
  CHECK(linalg::is_hermitian(r));
  CHECK(linalg::min_eigenvalue(r) > -1e-12);
}

TEST_CASE("psd_sqrt clamps tiny negatives and rejects real ones") {
  CMatrix h = CMatrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -5e-11;
  CHECK(std::abs(linalg::psd_sqrt(h)(1, 1)) == 0.0);
  h(1, 1) = -1e-6;
  CHECK_THROWS_AS(linalg::psd_sqrt(h), NotPsd);
}

TEST_CASE("numerical rank uses a relative threshold") {
  RVector s(3);
  s << 1e6, 1e-3, 1e-5;
  CHECK(linalg::numerical_rank(s) == 2);
  s << 1.0, 1e-11, 0.0;
  CHECK(linalg::numerical_rank(s) == 1);
  CHECK(linalg::numerical_rank(RVector::Zero(2)) == 0);
}

TEST_CASE("ceil_log2") {
  CHECK(linalg::ceil_log2(0) == 0);
  CHECK(linalg::ceil_log2(1) == 0);
  CHECK(linalg::ceil_log2(2) == 1);
  CHECK(linalg::ceil_log2(3) == 2);
  CHECK(linalg::ceil_log2(4) == 2);
  CHECK(linalg::ceil_log2(5) == 3);
  CHECK(linalg::ceil_log2(1024) == 10);
}

TEST_CASE("partial trace of basic states") {
  const std::size_t dims[] = {2, 2};
  const std::size_t first[] = {0};
  const CMatrix half = linalg::partial_trace(epr().amps, dims, first);
  CHECK((half - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-15);

  const CVector prod = linalg::kron(basis(2, 0), basis(2, 1));
  const CMatrix r0 = linalg::partial_trace(prod, dims, first);
  CHECK(std::abs(r0(0, 0) - 1.0) < 1e-15);
  CHECK(r0.norm() == doctest::Approx(1.0));

  // Density-matrix overload agrees with the vector overload.
  const CMatrix rho = prod * prod.adjoint();
  CHECK((linalg::partial_trace(rho, dims, first) - r0).norm() < 1e-15);
}

TEST_CASE("partial trace keeps registers in declared order") {
  std::mt19937_64 rng(14);
  const CVector a = random_vector(rng, 2), b = random_vector(rng, 3), c = random_vector(rng, 2);
  const CVector psi = linalg::kron(linalg::kron(a, b), c);
  const std::size_t dims[] = {2, 3, 2};
  const std::size_t keep[] = {0, 2};
  const CMatrix got = linalg::partial_trace(psi, dims, keep);
  const CVector ac = linalg::kron(a, c);
  CHECK((got - ac * ac.adjoint()).norm() < 1e-12);
}

TEST_CASE("partial trace errors") {
  const std::size_t dims[] = {2, 3};
  const std::size_t keep[] = {0};
  CHECK_THROWS_AS(linalg::partial_trace(CVector(CVector::Ones(4)), dims, keep), InvalidInput);
  const std::size_t ok[] = {2, 2};
  CHECK_THROWS_AS(linalg::partial_trace(CVector(CVector::Ones(4)), ok, std::span<const std::size_t>{}), InvalidInput);
}

TEST_CASE("random two-qubit state: both reductions share a spectrum") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const PureState psi = random_state(rng, 2, 2);
    const DensityMatrix rho = linalg::pure_density(psi.amps, 2, 2);
    const EighResult ea = linalg::eigh(linalg::reduce_a(rho));
    const EighResult eb = linalg::eigh(linalg::reduce_b(rho));
    CHECK((ea.values - eb.values).norm() < 1e-10);
    CHECK(std::abs(linalg::reduce_a(rho).trace().real() - 1.0) < 1e-10);
  }
}

TEST_CASE("fidelity examples") {
  const DensityMatrix p0 = linalg::pure_density(basis(2, 0), 2, 1);
  const DensityMatrix p1 = linalg::pure_density(basis(2, 1), 2, 1);
  const DensityMatrix mixed = linalg::make_density(0.5 * CMatrix::Identity(2, 2), 2, 1);
  CHECK(std::abs(linalg::fidelity(p0, p0) - 1.0) < 1e-12);
  CHECK(std::abs(linalg::fidelity(p0, p1)) < 1e-12);
  CHECK(std::abs(linalg::fidelity(p0, mixed) - std::sqrt(0.5)) < 1e-12);
  CHECK(std::abs(linalg::fidelity(mixed, mixed) - 1.0) < 1e-12);
  CHECK_THROWS_AS(linalg::fidelity(p0, linalg::pure_density(basis(4, 0), 2, 2)), InvalidInput);
}

TEST_CASE("fidelity against a pure state is sqrt(<psi|rho|psi>)") {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_density(rng, 2, 3, 1 + t % 6);
    const CVector psi = random_vector(rng, 6);
    const DensityMatrix sigma = linalg::pure_density(psi, 2, 3);
    const double expect = std::sqrt(std::max(0.0, (psi.adjoint() * rho.mat * psi)(0, 0).real()));
    CHECK(std::abs(linalg::fidelity(rho, sigma) - expect) < 1e-9);
    CHECK(std::abs(linalg::fidelity(sigma, rho) - expect) < 1e-9);
  }
}

TEST_CASE("fidelity of commuting states is the classical overlap") {
  // Oracle: for diagonal rho, sigma the fidelity is sum_i sqrt(p_i q_i).
  RVector p(3), q(3);
  p << 0.2, 0.3, 0.5;
  q << 0.6, 0.1, 0.3;
  const DensityMatrix a = linalg::make_density(p.cast<Complex>().asDiagonal().toDenseMatrix(), 3, 1);
  const DensityMatrix b = linalg::make_density(q.cast<Complex>().asDiagonal().toDenseMatrix(), 3, 1);
  const double expect = (p.array() * q.array()).sqrt().sum();
  CHECK(std::abs(linalg::fidelity(a, b) - expect) < 1e-12);
}

TEST_CASE("make_density validation") {
  CHECK_THROWS_AS(linalg::make_density(CMatrix::Identity(4, 4), 2, 2), InvalidInput);  // trace 4
  CMatrix nh = 0.5 * CMatrix::Identity(2, 2);
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(linalg::make_density(nh, 2, 1), InvalidInput);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(linalg::make_density(neg, 2, 1), InvalidInput);
  CHECK_THROWS_AS(linalg::make_density(CMatrix::Identity(3, 3) / 3.0, 2, 2), InvalidInput);
}

TEST_CASE("kron") {
  CMatrix a(1, 2), b(2, 1);
  a << 1, 2;
  b << 3, 4;
  const CMatrix k = linalg::kron(a, b);
  CHECK(k.rows() == 2);
  CHECK(k.cols() == 2);
  CHECK(k(0, 0) == Complex(3));
  CHECK(k(1, 1) == Complex(8));
}

TEST_CASE("property: svd reconstruction and ordering on random shapes") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(1, 7);
  for (int t = 0; t < 100; ++t) {
    const CMatrix a = random_matrix(rng, dim(rng), dim(rng)) * std::exp(std::normal_distribution<double>(0, 2)(rng));
    const SvdResult s = linalg::svd(a);
    CHECK(s.singulars.size() == std::min(a.rows(), a.cols()));
    const CMatrix rebuilt = s.left * s.singulars.cast<Complex>().asDiagonal() * s.right.adjoint();
    CHECK((rebuilt - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
    for (Eigen::Index i = 0; i + 1 < s.singulars.size(); ++i) CHECK(s.singulars(i) >= s.singulars(i + 1));
    CHECK(s.singulars.minCoeff() >= 0.0);
  }
}

TEST_CASE("property: fidelity symmetric and bounded") {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 60; ++t) {
    const DensityMatrix a = random_density(rng, 2, 2, 1 + t % 4);
    const DensityMatrix b = random_density(rng, 2, 2, 1 + (t / 4) % 4);
    const double f1 = linalg::fidelity(a, b), f2 = linalg::fidelity(b, a);
    CHECK(std::abs(f1 - f2) < 1e-9);
    CHECK(f1 >= -1e-9);
    CHECK(f1 <= 1.0 + 1e-9);
    CHECK(std::abs(linalg::fidelity(a, a) - 1.0) < 1e-9);
  }
}
