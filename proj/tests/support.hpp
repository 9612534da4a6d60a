#pragma once

#include <cmath>
#include <random>

#include "qcorr/classical.hpp"
#include "qcorr/general.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/state.hpp"

namespace qtest {

using namespace qcorr;

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline CVector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  CVector v = random_matrix(rng, n, 1).col(0);
  return v / v.norm();
}

inline PureState random_state(std::mt19937_64& rng, std::size_t da, std::size_t db) {
  return make_pure_state(random_vector(rng, static_cast<Eigen::Index>(da * db)), da, db);
}

/// Random pure state whose Schmidt rank is at most `rank`.
inline PureState random_state_of_rank(std::mt19937_64& rng, std::size_t da, std::size_t db, std::size_t rank) {
  const CMatrix a = random_matrix(rng, static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(rank)) *
                    random_matrix(rng, static_cast<Eigen::Index>(rank), static_cast<Eigen::Index>(db));
  CVector amps(a.size());
  for (Eigen::Index x = 0; x < a.rows(); ++x) amps.segment(x * a.cols(), a.cols()) = a.row(x).transpose();
  return normalized_state(std::move(amps), da, db);
}

inline CMatrix random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
  const CMatrix g = random_matrix(rng, rank, n);
  CMatrix h = g.adjoint() * g;
  return (h + h.adjoint()) * 0.5;
}

inline DensityMatrix random_density(std::mt19937_64& rng, std::size_t da, std::size_t db, std::size_t rank) {
  const auto d = static_cast<Eigen::Index>(da * db);
  CMatrix h = random_psd(rng, d, static_cast<Eigen::Index>(rank));
  h /= h.trace().real();
  return linalg::make_density(h, da, db);
}

/// Random psd factorization scaled so that sum tr(C_x D_y) = 1.
inline PsdFactorization random_psd_factorization(std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t r) {
  std::uniform_int_distribution<int> rk(1, static_cast<int>(r));
  PsdFactorization f;
  f.r = r;
  const auto ri = static_cast<Eigen::Index>(r);
  for (std::size_t x = 0; x < n; ++x) f.cs.push_back(random_psd(rng, ri, rk(rng)));
  for (std::size_t y = 0; y < m; ++y) f.ds.push_back(random_psd(rng, ri, rk(rng)));
  const double s = std::sqrt(classical::trace_products(f).sum());
  for (auto& c : f.cs) c /= s;
  for (auto& d : f.ds) d /= s;
  return f;
}

inline GeneralFactorization random_general(std::mt19937_64& rng, std::size_t da, std::size_t db, std::size_t ka,
                                           std::size_t kb, std::size_t r) {
  GeneralFactorization f;
  f.r = r;
  for (std::size_t x = 0; x < da; ++x)
    f.as.push_back(random_matrix(rng, static_cast<Eigen::Index>(ka), static_cast<Eigen::Index>(r)));
  for (std::size_t y = 0; y < db; ++y)
    f.bs.push_back(random_matrix(rng, static_cast<Eigen::Index>(kb), static_cast<Eigen::Index>(r)));
  const double s = std::sqrt(general::factorization_norm(f));
  for (auto& a : f.as) a /= std::sqrt(s);
  for (auto& b : f.bs) b /= std::sqrt(s);
  return f;
}

inline CVector basis(std::size_t dim, std::size_t i) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

inline PureState epr() {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = kInvSqrt2;
  return make_pure_state(v, 2, 2);
}

inline PureState diag_state(std::initializer_list<double> probs) {
  const std::size_t n = probs.size();
  CVector v = CVector::Zero(static_cast<Eigen::Index>(n * n));
  std::size_t i = 0;
  for (double p : probs) {
    v(static_cast<Eigen::Index>(i * n + i)) = std::sqrt(p);
    ++i;
  }
  return make_pure_state(v, n, n);
}

inline DistMatrix dist(const RMatrix& p) { return classical::validate_dist(p); }

}  // namespace qtest
