#include "qcorr/classical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace qcorr {

const char* status_name(RankStatus s) {
  return s == RankStatus::kCertified ? "certified" : "heuristic";
}

}  // namespace qcorr

namespace qcorr::classical {

namespace {

constexpr double kClampBelow = 1e-14;
constexpr double kNegativeTol = 1e-12;
constexpr double kSumTol = 1e-8;
// A start stops once its residual reaches this level.
constexpr double kResidualFloor = 1e-13;
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

void require_nonempty(const DistMatrix& p, const char* what) {
  if (p.p.rows() == 0 || p.p.cols() == 0) throw InvalidInput(std::string(what) + ": empty matrix");
}

std::size_t real_rank(const RMatrix& a) {
  Eigen::BDCSVD<RMatrix> dec(a);
  return linalg::numerical_rank(dec.singularValues());
}

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
}

std::mt19937_64 start_rng(std::uint64_t seed, std::size_t start, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start), stream};
  return std::mt19937_64(seq);
}

double tr_product(const CMatrix& c, const CMatrix& d) {
  // Re tr(C D) = Re sum_ij C(i,j) D(j,i)
  return c.cwiseProduct(d.transpose()).sum().real();
}

// Psd-factor descent state for one start.
class PsdDescent {
 public:
  PsdDescent(const DistMatrix& p, std::size_t r) : p_(p.p), r_(static_cast<Eigen::Index>(r)) {
    active_rows_.resize(p_.rows());
    active_cols_.resize(p_.cols());
    for (Eigen::Index x = 0; x < p_.rows(); ++x) active_rows_[x] = p_.row(x).sum() > 0.0;
    for (Eigen::Index y = 0; y < p_.cols(); ++y) active_cols_[y] = p_.col(y).sum() > 0.0;
  }

  void randomize(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    auto draw = [&](bool active) {
      CMatrix m = CMatrix::Zero(r_, r_);
      if (!active) return m;
      for (Eigen::Index i = 0; i < r_; ++i)
        for (Eigen::Index j = 0; j < r_; ++j) m(i, j) = Complex(g(rng), g(rng));
      return m;
    };
    e_.clear();
    f_.clear();
    for (Eigen::Index x = 0; x < p_.rows(); ++x) e_.push_back(draw(active_rows_[x]));
    for (Eigen::Index y = 0; y < p_.cols(); ++y) f_.push_back(draw(active_cols_[y]));
    // Match the model's total mass to P's.
    refresh();
    const double model = products(c_, d_).sum();
    const double target = p_.sum();
    if (model > 0.0 && target > 0.0) {
      const double s = std::pow(target / model, 0.25);
      for (auto& m : e_) m *= s;
      for (auto& m : f_) m *= s;
      refresh();
    }
  }

  double objective() const { return (products(c_, d_) - p_).squaredNorm(); }

  // Alternating damped Gauss-Newton sweeps; every accepted update lowers the
  // objective. Stops on a tiny residual or gradient, or at the iteration cap.
  void run(const SolverConfig& cfg) {
    damp_e_.assign(e_.size(), 1e-3);
    damp_f_.assign(f_.size(), 1e-3);
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
      if (std::sqrt(objective()) <= kResidualFloor) break;
      double g2 = 0.0;
      for (std::size_t x = 0; x < e_.size(); ++x) {
        if (!active_rows_[x]) continue;
        g2 += factor_step(e_[x], c_[x], d_, p_.row(static_cast<Eigen::Index>(x)).transpose(), damp_e_[x]);
      }
      for (std::size_t y = 0; y < f_.size(); ++y) {
        if (!active_cols_[y]) continue;
        g2 += factor_step(f_[y], d_[y], c_, p_.col(static_cast<Eigen::Index>(y)), damp_f_[y]);
      }
      if (std::sqrt(g2) < cfg.grad_tol) break;
    }
  }

  PsdFactorization result(const DistMatrix& p) const {
    PsdFactorization out{static_cast<std::size_t>(r_), c_, d_, 0.0};
    out.residual = residual(p, out);
    return out;
  }

 private:
  RMatrix products(const std::vector<CMatrix>& cs, const std::vector<CMatrix>& ds) const {
    RMatrix t(p_.rows(), p_.cols());
    for (Eigen::Index x = 0; x < p_.rows(); ++x)
      for (Eigen::Index y = 0; y < p_.cols(); ++y) t(x, y) = tr_product(cs[x], ds[y]);
    return t;
  }

  static CMatrix gram(const CMatrix& e) {
    CMatrix c = e.adjoint() * e;
    return (c + c.adjoint()) * 0.5;
  }

  void refresh() {
    c_.clear();
    d_.clear();
    for (const auto& e : e_) c_.push_back(gram(e));
    for (const auto& f : f_) d_.push_back(gram(f));
  }

  // Block objective sum_k (tr(E^dagger E M_k) - t_k)^2 with the M_k fixed.
  static double block_objective(const CMatrix& g, const std::vector<CMatrix>& ms, const RVector& t) {
    double s = 0.0;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const double d = tr_product(g, ms[k]) - t(static_cast<Eigen::Index>(k));
      s += d * d;
    }
    return s;
  }

  // One Levenberg-Marquardt update of a single factor E (Gram matrix `g`)
  // against the fixed family `ms`. Returns the squared gradient norm.
  double factor_step(CMatrix& e, CMatrix& g, const std::vector<CMatrix>& ms, const RVector& t,
                     double& damp) const {
    const Eigen::Index r2 = r_ * r_;
    const auto count = static_cast<Eigen::Index>(ms.size());
    RMatrix jac(count, 2 * r2);
    RVector res(count);
    for (Eigen::Index k = 0; k < count; ++k) {
      const CMatrix em = e * ms[static_cast<std::size_t>(k)];
      res(k) = tr_product(g, ms[static_cast<std::size_t>(k)]) - t(k);
      for (Eigen::Index i = 0; i < r_; ++i)
        for (Eigen::Index j = 0; j < r_; ++j) {
          jac(k, i * r_ + j) = 2.0 * em(i, j).real();
          jac(k, r2 + i * r_ + j) = 2.0 * em(i, j).imag();
        }
    }
    const RVector grad = jac.transpose() * res;
    const double g2 = 4.0 * grad.squaredNorm();
    if (g2 == 0.0) return 0.0;
    const double f0 = res.squaredNorm();
    const RMatrix normal = jac.transpose() * jac;
    const double scale = std::max(normal.diagonal().maxCoeff(), 1e-300);
    for (int b = 0; b < kMaxBacktracks; ++b) {
      RMatrix sys = normal;
      sys.diagonal().array() += damp * scale;
      const RVector delta = -sys.ldlt().solve(grad);
      CMatrix trial = e;
      for (Eigen::Index i = 0; i < r_; ++i)
        for (Eigen::Index j = 0; j < r_; ++j)
          trial(i, j) += Complex(delta(i * r_ + j), delta(r2 + i * r_ + j));
      const CMatrix tg = gram(trial);
      const double ft = block_objective(tg, ms, t);
      // Sufficient decrease relative to the linearized model.
      if (ft <= f0 + kArmijo * 2.0 * grad.dot(delta)) {
        e = std::move(trial);
        g = tg;
        damp = std::max(damp / 3.0, 1e-12);
        return g2;
      }
      damp = std::min(damp * 4.0, 1e12);
    }
    return g2;
  }

  const RMatrix& p_;
  Eigen::Index r_;
  std::vector<bool> active_rows_, active_cols_;
  std::vector<CMatrix> e_, f_, c_, d_;
  std::vector<double> damp_e_, damp_f_;
};

PsdFactorization best_of(std::vector<PsdFactorization>& results) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].residual < results[best].residual) best = i;
  }
  return std::move(results[best]);
}

}  // namespace

DistMatrix validate_dist(const RMatrix& raw, bool renormalize) {
  if (raw.rows() == 0 || raw.cols() == 0) throw InvalidInput("distribution: empty matrix");
  RMatrix p = raw;
  for (Eigen::Index x = 0; x < p.rows(); ++x) {
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
      const double v = p(x, y);
      if (!std::isfinite(v)) {
        throw InvalidInput("distribution: non-finite entry at (" + std::to_string(x) + ", " +
                           std::to_string(y) + ")");
      }
      if (v < -kNegativeTol) {
        throw InvalidInput("distribution: negative entry at (" + std::to_string(x) + ", " +
                           std::to_string(y) + ")");
      }
      if (v < kClampBelow) p(x, y) = 0.0;
    }
  }
  const double total = p.sum();
  if (std::abs(total - 1.0) > kSumTol) {
    if (!renormalize || !(total > 0.0)) {
      throw NotNormalized("distribution: entries sum to " + std::to_string(total));
    }
    p /= total;
  }
  return {std::move(p)};
}

DensityMatrix classical_state(const DistMatrix& p) {
  const Eigen::Index n = p.p.rows(), m = p.p.cols();
  CMatrix rho = CMatrix::Zero(n * m, n * m);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < m; ++y) rho(x * m + y, x * m + y) = p.p(x, y);
  return {p.n(), p.m(), std::move(rho)};
}

std::optional<DistMatrix> as_classical(const DensityMatrix& rho, double tolerance) {
  const CMatrix off = rho.mat - CMatrix(rho.mat.diagonal().asDiagonal());
  if (off.size() && off.cwiseAbs().maxCoeff() > tolerance) return std::nullopt;
  const auto n = static_cast<Eigen::Index>(rho.dim_a), m = static_cast<Eigen::Index>(rho.dim_b);
  RMatrix p(n, m);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < m; ++y) p(x, y) = std::max(0.0, rho.mat(x * m + y, x * m + y).real());
  return DistMatrix{std::move(p)};
}

std::size_t psd_rank_lower_bound(const DistMatrix& p) {
  require_nonempty(p, "psd_rank_lower_bound");
  const std::size_t rk = real_rank(p.p);
  if (rk == 0) throw InvalidInput("psd_rank_lower_bound: zero matrix");
  std::size_t r = 1;
  while (r * r < rk) ++r;
  return r;
}

RMatrix trace_products(const PsdFactorization& f) {
  RMatrix t(static_cast<Eigen::Index>(f.cs.size()), static_cast<Eigen::Index>(f.ds.size()));
  for (std::size_t x = 0; x < f.cs.size(); ++x)
    for (std::size_t y = 0; y < f.ds.size(); ++y)
      t(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = tr_product(f.cs[x], f.ds[y]);
  return t;
}

double residual(const DistMatrix& p, const PsdFactorization& f) {
  if (f.cs.size() != p.n() || f.ds.size() != p.m()) {
    throw FactorizationMismatch("factorization shape does not match the distribution");
  }
  return (trace_products(f) - p.p).norm();
}

PsdFactorization psd_fit(const DistMatrix& p, std::size_t r, const SolverConfig& cfg) {
  require_nonempty(p, "psd_fit");
  if (r < 1) throw InvalidInput("psd_fit: r must be at least 1");
  if (cfg.starts < 1) throw InvalidInput("psd_fit: at least one start is required");
  std::vector<PsdFactorization> results(cfg.starts);
  parallel_for(cfg.starts, cfg.threads, [&](std::size_t s) {
    auto rng = start_rng(cfg.seed, s, 0x70736466u);
    PsdDescent d(p, r);
    d.randomize(rng);
    d.run(cfg);
    results[s] = d.result(p);
  });
  return best_of(results);
}

PsdFactorization diagonal_witness(const DistMatrix& p) {
  require_nonempty(p, "diagonal_witness");
  const Eigen::Index n = p.p.rows(), m = p.p.cols();
  const Eigen::Index r = std::min(n, m);
  PsdFactorization f{static_cast<std::size_t>(r), {}, {}, 0.0};
  auto unit = [&](Eigen::Index i) {
    CMatrix e = CMatrix::Zero(r, r);
    e(i, i) = 1.0;
    return e;
  };
  if (n <= m) {
    for (Eigen::Index x = 0; x < n; ++x) f.cs.push_back(unit(x));
    for (Eigen::Index y = 0; y < m; ++y) f.ds.push_back(p.p.col(y).cast<Complex>().asDiagonal());
  } else {
    for (Eigen::Index x = 0; x < n; ++x) f.cs.push_back(p.p.row(x).transpose().cast<Complex>().asDiagonal());
    for (Eigen::Index y = 0; y < m; ++y) f.ds.push_back(unit(y));
  }
  f.residual = residual(p, f);
  return f;
}

RankReport psd_rank_search(const DistMatrix& p, const SolverConfig& cfg) {
  const std::size_t lower = psd_rank_lower_bound(p);
  const std::size_t cap = std::min(p.n(), p.m());
  const std::size_t rk = real_rank(p.p);
  RankReport report{lower, cap, RankStatus::kHeuristic, std::nullopt};
  for (std::size_t r = lower; r <= cap; ++r) {
    PsdFactorization f = psd_fit(p, r, cfg);
    if (!(f.residual < cfg.tol) && r >= rk) {
      // A nonnegative factorization of size r is also a psd one.
      const NmfResult nmf = nmf_fit(p, r, cfg);
      if (nmf.residual < cfg.tol) {
        PsdFactorization g = diagonal_from_nmf(nmf);
        g.residual = residual(p, g);
        if (g.residual < f.residual) f = std::move(g);
      }
    }
    if (!(f.residual < cfg.tol) && r == cap) f = diagonal_witness(p);
    if (f.residual < cfg.tol) {
      report.upper = r;
      report.witness = std::move(f);
      break;
    }
  }
  report.status = report.upper == report.lower ? RankStatus::kCertified : RankStatus::kHeuristic;
  return report;
}

ClassicalPurification synth_from_psd(const DistMatrix& p, const PsdFactorization& f) {
  require_nonempty(p, "synth_from_psd");
  const double res = residual(p, f);
  if (res > 1e-7) {
    throw FactorizationMismatch("synth_from_psd: factorization residual " + std::to_string(res) +
                                " exceeds 1e-7");
  }
  const auto n = static_cast<Eigen::Index>(p.n()), m = static_cast<Eigen::Index>(p.m());
  const auto r = static_cast<Eigen::Index>(f.r);
  for (const auto& c : f.cs)
    if (c.rows() != r || c.cols() != r) throw FactorizationMismatch("synth_from_psd: C_x is not r x r");
  for (const auto& d : f.ds)
    if (d.rows() != r || d.cols() != r) throw FactorizationMismatch("synth_from_psd: D_y is not r x r");

  // v_x^i: i-th column of sqrt(C_x^T); w_y^i: i-th column of sqrt(D_y).
  std::vector<CMatrix> sv, sw;
  for (const auto& c : f.cs) sv.push_back(linalg::psd_sqrt(c.transpose()));
  for (const auto& d : f.ds) sw.push_back(linalg::psd_sqrt(d));

  const Eigen::Index da = n * n * r, db = m * m * r;
  CMatrix alice(da, r), bob(db, r);
  alice.setZero();
  bob.setZero();
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index x = 0; x < n; ++x) alice.col(i).segment((x * n + x) * r, r) = sv[x].col(i);
    for (Eigen::Index y = 0; y < m; ++y) bob.col(i).segment((y * m + y) * r, r) = sw[y].col(i);
  }
  // psi = sum_i alpha_i (x) beta_i, row-major over (A, A', A1, B, B', B1).
  const CMatrix amp = alice * bob.transpose();
  CVector psi(da * db);
  for (Eigen::Index a = 0; a < da; ++a) psi.segment(a * db, db) = amp.row(a).transpose();
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw FactorizationMismatch("synth_from_psd: factorization is zero");
  psi /= norm;

  ClassicalPurification out;
  out.r = f.r;
  out.state.amps = std::move(psi);
  out.state.registers = {{"A", p.n(), Party::kAlice},  {"A'", p.n(), Party::kAlice},
                         {"A1", f.r, Party::kAlice},   {"B", p.m(), Party::kBob},
                         {"B'", p.m(), Party::kBob},   {"B1", f.r, Party::kBob}};
  return out;
}

namespace {

struct SideSplit {
  std::size_t main_dim = 1;
  std::size_t aux_dim = 1;
};

SideSplit side_split(const LayoutState& s, Party p) {
  SideSplit out;
  bool first = true;
  for (const auto& reg : s.registers) {
    if (reg.owner != p) continue;
    if (first) {
      out.main_dim = reg.dim;
      first = false;
    } else {
      out.aux_dim *= reg.dim;
    }
  }
  if (first) throw InvalidInput(std::string("layout has no register owned by ") + party_name(p));
  return out;
}

}  // namespace

PsdFactorization gram_extract(const LayoutState& psi) {
  check_layout(psi);
  if (std::abs(psi.amps.norm() - 1.0) > 1e-9) throw NotNormalized("gram_extract: state is not normalized");
  const SideSplit sa = side_split(psi, Party::kAlice);
  const SideSplit sb = side_split(psi, Party::kBob);
  const SvdResult dec = linalg::svd(cut_matrix(psi));
  const auto r = static_cast<Eigen::Index>(linalg::numerical_rank(dec.singulars));

  // Coefficient-absorbed Schmidt vectors: psi = sum_i v^i (x) w^i.
  CMatrix v = dec.left.leftCols(r);
  CMatrix w = dec.right.leftCols(r).conjugate();
  for (Eigen::Index i = 0; i < r; ++i) {
    const double s = std::sqrt(dec.singulars(i));
    v.col(i) *= s;
    w.col(i) *= s;
  }

  const auto ka = static_cast<Eigen::Index>(sa.aux_dim), kb = static_cast<Eigen::Index>(sb.aux_dim);
  PsdFactorization out{static_cast<std::size_t>(r), {}, {}, 0.0};
  for (std::size_t x = 0; x < sa.main_dim; ++x) {
    // C_x(j, i) = <v_x^j | v_x^i>
    const CMatrix vx = v.middleRows(static_cast<Eigen::Index>(x) * ka, ka);
    out.cs.push_back(vx.adjoint() * vx);
  }
  for (std::size_t y = 0; y < sb.main_dim; ++y) {
    // D_y(i, j) = <w_y^j | w_y^i>
    const CMatrix wy = w.middleRows(static_cast<Eigen::Index>(y) * kb, kb);
    out.ds.push_back((wy.adjoint() * wy).transpose());
  }
  out.residual = (trace_products(out) - measured_distribution(psi).p).norm();
  return out;
}

DistMatrix measured_distribution(const LayoutState& psi) {
  check_layout(psi);
  const SideSplit sa = side_split(psi, Party::kAlice);
  const SideSplit sb = side_split(psi, Party::kBob);
  const CMatrix cut = cut_matrix(psi);
  const auto ka = static_cast<Eigen::Index>(sa.aux_dim), kb = static_cast<Eigen::Index>(sb.aux_dim);
  RMatrix p(static_cast<Eigen::Index>(sa.main_dim), static_cast<Eigen::Index>(sb.main_dim));
  for (Eigen::Index x = 0; x < p.rows(); ++x)
    for (Eigen::Index y = 0; y < p.cols(); ++y)
      p(x, y) = cut.block(x * ka, y * kb, ka, kb).squaredNorm();
  return {std::move(p)};
}

namespace {

NmfResult rank_one_nmf(const RMatrix& p) {
  const double total = p.sum();
  NmfResult out{p.rowwise().sum(), p.colwise().sum() / total, 0.0};
  out.residual = (out.w * out.h - p).norm();
  return out;
}

// Rank-2 nonnegative matrices have nonnegative rank 2: the columns span a
// pointed 2D cone whose two extreme columns generate every other column.
NmfResult rank_two_nmf(const RMatrix& p) {
  Eigen::BDCSVD<RMatrix> dec(p, Eigen::ComputeThinU);
  const RMatrix basis = dec.matrixU().leftCols(2);
  const RMatrix coords = basis.transpose() * p;
  // Angles are measured from the centroid direction so they never wrap.
  Eigen::Vector2d mid = coords.rowwise().sum();
  const double mid_angle = std::atan2(mid(1), mid(0));
  Eigen::Index lo = -1, hi = -1;
  double lo_a = 0.0, hi_a = 0.0;
  for (Eigen::Index y = 0; y < p.cols(); ++y) {
    if (p.col(y).sum() <= 0.0) continue;
    double a = std::atan2(coords(1, y), coords(0, y)) - mid_angle;
    a = std::remainder(a, 2.0 * M_PI);
    if (lo < 0 || a < lo_a) lo = y, lo_a = a;
    if (hi < 0 || a > hi_a) hi = y, hi_a = a;
  }
  RMatrix w(p.rows(), 2);
  w.col(0) = p.col(lo);
  w.col(1) = p.col(hi);
  RMatrix h = w.colPivHouseholderQr().solve(p);
  h = h.cwiseMax(0.0);
  NmfResult out{std::move(w), std::move(h), 0.0};
  out.residual = (out.w * out.h - p).norm();
  return out;
}

NmfResult multiplicative_nmf(const RMatrix& p, Eigen::Index r, std::mt19937_64& rng,
                             std::size_t iters) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  RMatrix w(p.rows(), r), h(r, p.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = u(rng);
  h *= p.sum() / (w * h).sum();
  constexpr double tiny = 1e-300;
  for (std::size_t it = 0; it < iters; ++it) {
    h = h.cwiseProduct((w.transpose() * p).cwiseQuotient((w.transpose() * w * h).array().max(tiny).matrix()));
    w = w.cwiseProduct((p * h.transpose()).cwiseQuotient((w * h * h.transpose()).array().max(tiny).matrix()));
    if ((it & 63) == 0 && (w * h - p).norm() <= kResidualFloor) break;
  }
  NmfResult out{std::move(w), std::move(h), 0.0};
  out.residual = (out.w * out.h - p).norm();
  return out;
}

}  // namespace

NmfResult nmf_fit(const DistMatrix& p, std::size_t r, const SolverConfig& cfg) {
  require_nonempty(p, "nmf_fit");
  if (r < 1) throw InvalidInput("nmf_fit: r must be at least 1");
  const std::size_t rk = real_rank(p.p);
  const std::size_t cap = std::min(p.n(), p.m());
  auto pad = [&](NmfResult base) {
    const auto k = static_cast<Eigen::Index>(r);
    if (base.w.cols() >= k) return base;
    NmfResult out{RMatrix::Zero(base.w.rows(), k), RMatrix::Zero(k, base.h.cols()), base.residual};
    out.w.leftCols(base.w.cols()) = base.w;
    out.h.topRows(base.h.rows()) = base.h;
    return out;
  };
  if (rk <= 1 && r >= 1) return pad(rank_one_nmf(p.p));
  if (rk == 2 && r >= 2) return pad(rank_two_nmf(p.p));
  if (r >= cap) {
    const Eigen::Index k = static_cast<Eigen::Index>(cap);
    NmfResult d;
    if (p.n() <= p.m()) {
      d = {RMatrix::Identity(p.p.rows(), k), p.p, 0.0};
    } else {
      d = {p.p, RMatrix::Identity(k, p.p.cols()), 0.0};
    }
    return pad(std::move(d));
  }
  std::vector<NmfResult> results(cfg.starts ? cfg.starts : 1);
  parallel_for(results.size(), cfg.threads, [&](std::size_t s) {
    auto rng = start_rng(cfg.seed, s, 0x6e6d6675u);
    results[s] = multiplicative_nmf(p.p, static_cast<Eigen::Index>(r), rng, cfg.max_iters);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].residual < results[best].residual) best = i;
  return std::move(results[best]);
}

PsdFactorization diagonal_from_nmf(const NmfResult& nmf) {
  PsdFactorization f{static_cast<std::size_t>(nmf.w.cols()), {}, {}, 0.0};
  for (Eigen::Index x = 0; x < nmf.w.rows(); ++x)
    f.cs.push_back(nmf.w.row(x).transpose().cast<Complex>().asDiagonal());
  for (Eigen::Index y = 0; y < nmf.h.cols(); ++y)
    f.ds.push_back(nmf.h.col(y).cast<Complex>().asDiagonal());
  return f;
}

RankReport nonneg_rank_bounds(const DistMatrix& p, const SolverConfig& cfg) {
  require_nonempty(p, "nonneg_rank_bounds");
  const std::size_t rk = real_rank(p.p);
  if (rk == 0) throw InvalidInput("nonneg_rank_bounds: zero matrix");
  const std::size_t cap = std::min(p.n(), p.m());
  RankReport report{rk, cap, RankStatus::kHeuristic, std::nullopt};
  for (std::size_t r = rk; r <= cap; ++r) {
    const NmfResult nmf = nmf_fit(p, r, cfg);
    if (nmf.residual < cfg.tol || r == cap) {
      PsdFactorization f = diagonal_from_nmf(nmf);
      f.residual = residual(p, f);
      report.upper = r;
      report.witness = std::move(f);
      break;
    }
  }
  report.status = report.upper == report.lower ? RankStatus::kCertified : RankStatus::kHeuristic;
  return report;
}

}  // namespace qcorr::classical
