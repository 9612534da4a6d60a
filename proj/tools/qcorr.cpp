// qcorr: command-line front end.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qcorr/classical.hpp"
#include "qcorr/general.hpp"
#include "qcorr/io.hpp"
#include "qcorr/pure.hpp"
#include "qcorr/sim.hpp"

namespace fs = std::filesystem;
using qcorr::io::Json;

namespace {

struct Options {
  double eps = 0.0;
  double tol = 1e-7;
  std::size_t starts = 16;
  std::uint64_t seed = 0;
  bool json = false;
  bool renormalize = false;

  std::string state, dist, factorization, purification, protocol, out, psd_out, out_dir;
};

qcorr::SolverConfig solver(const Options& o) {
  qcorr::SolverConfig cfg;
  cfg.tol = o.tol;
  cfg.starts = o.starts;
  cfg.seed = o.seed;
  return cfg;
}

Json config_block(const Options& o) {
  const qcorr::SolverConfig cfg = solver(o);
  Json c;
  c["eps"] = o.eps;
  c["tol"] = o.tol;
  c["starts"] = o.starts;
  c["seed"] = o.seed;
  c["renormalize"] = o.renormalize;
  c["max_iters"] = cfg.max_iters;
  c["grad_tol"] = cfg.grad_tol;
  c["rank_relative"] = qcorr::tol::kRankRelative;
  c["psd_clamp"] = qcorr::tol::kPsdClamp;
  return c;
}

void warn(const std::string& msg) { std::cerr << "qcorr: warning: " << msg << "\n"; }

Json real_list(const qcorr::RVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json rows_of(const qcorr::RMatrix& m) {
  Json a = Json::array();
  for (Eigen::Index x = 0; x < m.rows(); ++x) a.push_back(real_list(m.row(x).transpose()));
  return a;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw qcorr::InvalidInput(std::string("missing required option ") + flag);
}

qcorr::DistMatrix load_dist(const Options& o) {
  require(o.dist, "--dist");
  const qcorr::RMatrix raw = qcorr::io::read_distribution(o.dist);
  const double total = raw.sum();
  qcorr::DistMatrix p = qcorr::classical::validate_dist(raw, o.renormalize);
  if (o.renormalize && std::abs(total - 1.0) > 1e-8) {
    warn("distribution renormalized (sum was " + std::to_string(total) + ")");
  }
  return p;
}

qcorr::PureState load_state(const Options& o) {
  require(o.state, "--state");
  return qcorr::io::state_from_json(qcorr::io::read_json_file(o.state), o.state);
}

qcorr::ProtocolSpec load_protocol(const Options& o) {
  require(o.protocol, "--protocol");
  const fs::path path(o.protocol);
  return qcorr::io::protocol_from_json(qcorr::io::read_json_file(path), path.parent_path());
}

void save(const std::string& path, const Json& j) { qcorr::io::write_text_file(path, qcorr::io::dump(j)); }

Json rank_json(const qcorr::RankReport& r) {
  Json j;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["status"] = qcorr::status_name(r.status);
  return j;
}

// ---- subcommands ----------------------------------------------------------

Json cmd_schmidt(const Options& o) {
  const qcorr::PureState psi = load_state(o);
  const qcorr::SchmidtForm f = qcorr::pure::schmidt_decompose(psi);
  Json r;
  r["dims"] = Json::array({psi.dim_a, psi.dim_b});
  r["rank"] = f.rank();
  r["qubits"] = qcorr::linalg::ceil_log2(f.rank());
  r["coeffs"] = real_list(f.coeffs);
  r["left"] = qcorr::io::matrix_to_json(f.left);
  r["right"] = qcorr::io::matrix_to_json(f.right);
  return r;
}

Json cmd_qeps(const Options& o) {
  const qcorr::PureState psi = load_state(o);
  const std::size_t s = qcorr::pure::srank_eps(psi, o.eps);
  const double delta = o.eps >= 1.0 ? 1.0 : 2.0 * o.eps - o.eps * o.eps;
  const std::size_t k = qcorr::pure::rank_eps(qcorr::pure::vec_inv(psi), delta);
  Json r;
  r["schmidt_rank"] = qcorr::schmidt_rank(psi);
  r["srank_eps"] = s;
  r["rank_eps_route"] = k;
  r["consistent"] = s == k;
  r["q_eps"] = qcorr::pure::q_eps(psi, o.eps);
  return r;
}

Json cmd_approx(const Options& o) {
  const qcorr::PureState psi = load_state(o);
  const qcorr::Approximant a = qcorr::pure::build_approximant(psi, o.eps);
  Json r;
  r["terms"] = a.terms;
  r["fidelity"] = a.fidelity;
  r["meets_eps"] = a.fidelity >= 1.0 - o.eps - 1e-9;
  if (!o.out.empty()) {
    save(o.out, qcorr::io::state_to_json(a.phi));
    r["written"] = o.out;
  } else {
    r["state"] = qcorr::io::state_to_json(a.phi);
  }
  return r;
}

Json cmd_psdrank(const Options& o) {
  const qcorr::DistMatrix p = load_dist(o);
  const qcorr::RankReport rep = qcorr::classical::psd_rank_search(p, solver(o));
  const std::size_t rank = qcorr::linalg::rank(p.p.cast<qcorr::Complex>());
  Json r;
  r["dims"] = Json::array({p.n(), p.m()});
  r["rank"] = rank;
  r.update(rank_json(rep));
  r["qubits"] = rep.complexity();
  r["residual"] = rep.witness ? rep.witness->residual : 0.0;
  r["quarter_log2_rank"] = 0.25 * std::log2(static_cast<double>(rank));
  if (rep.witness) {
    if (!o.out.empty()) {
      save(o.out, qcorr::io::psd_to_json(*rep.witness));
      r["written"] = o.out;
    } else {
      r["witness"] = qcorr::io::psd_to_json(*rep.witness);
    }
  }
  return r;
}

Json cmd_nnrank(const Options& o) {
  const qcorr::DistMatrix p = load_dist(o);
  const qcorr::RankReport rep = qcorr::classical::nonneg_rank_bounds(p, solver(o));
  Json r;
  r["dims"] = Json::array({p.n(), p.m()});
  r.update(rank_json(rep));
  r["bits"] = rep.complexity();
  r["residual"] = rep.witness ? rep.witness->residual : 0.0;
  return r;
}

Json verify_json(const qcorr::VerifyReport& v, double eps) {
  Json j;
  j["fidelity"] = v.fidelity;
  j["eps"] = eps;
  j["pass"] = v.pass;
  j["seed_size"] = v.seed_size;
  j["computed_seed_size"] = v.computed_seed_size;
  return j;
}

Json cmd_synth(const Options& o) {
  Json r;
  qcorr::ProtocolSpec spec;
  const fs::path dir = o.out_dir.empty() ? fs::path() : fs::path(o.out_dir);
  if (!dir.empty()) fs::create_directories(dir);

  if (!o.state.empty()) {
    const qcorr::PureState psi = load_state(o);
    spec = qcorr::pure::synth_pure_protocol(psi, o.eps);
    r["route"] = "pure";
    r["terms"] = qcorr::pure::srank_eps(psi, o.eps);
  } else {
    const qcorr::DistMatrix p = load_dist(o);
    qcorr::PsdFactorization f;
    if (!o.factorization.empty()) {
      f = qcorr::io::psd_from_json(qcorr::io::read_json_file(o.factorization));
      f.residual = qcorr::classical::residual(p, f);
    } else {
      const qcorr::RankReport rep = qcorr::classical::psd_rank_search(p, solver(o));
      f = *rep.witness;
      r["search"] = rank_json(rep);
    }
    const qcorr::ClassicalPurification cp = qcorr::classical::synth_from_psd(p, f);
    spec = qcorr::sim::classical_protocol(p, f);
    r["route"] = "classical";
    r["r"] = f.r;
    r["residual"] = f.residual;
    r["schmidt_rank"] = qcorr::schmidt_rank(cp.state);
    const qcorr::Purification pur = qcorr::general::from_layout(cp.state);
    if (!dir.empty()) {
      save((dir / "purification.json").string(), qcorr::io::purification_to_json(pur));
      r["purification"] = (dir / "purification.json").string();
    }
  }
  r["seed_size"] = spec.seed_size_qubits;
  r["verification"] = verify_json(qcorr::sim::verify_generation(spec), spec.eps);
  if (!dir.empty()) {
    save((dir / "protocol.json").string(), qcorr::io::protocol_to_json(spec));
    r["protocol"] = (dir / "protocol.json").string();
  } else if (!o.out.empty()) {
    save(o.out, qcorr::io::protocol_to_json(spec));
    r["protocol"] = o.out;
  }
  return r;
}

Json cmd_extract(const Options& o) {
  require(o.purification, "--purification");
  const qcorr::Purification pur = qcorr::io::purification_from_json(qcorr::io::read_json_file(o.purification));
  const qcorr::GeneralFactorization g = qcorr::general::factor_from_purification(pur);
  const qcorr::PsdFactorization c = qcorr::classical::gram_extract(pur.layout());
  Json r;
  r["dims"] = Json::array({pur.dim_a, pur.dim_a1, pur.dim_b, pur.dim_b1});
  r["r"] = g.r;
  r["qubits"] = qcorr::linalg::ceil_log2(g.r);
  r["trace_products"] = rows_of(qcorr::classical::trace_products(c));
  if (!o.out.empty()) {
    save(o.out, qcorr::io::general_to_json(g));
    r["written"] = o.out;
  } else {
    r["general_factorization"] = qcorr::io::general_to_json(g);
  }
  if (!o.psd_out.empty()) {
    save(o.psd_out, qcorr::io::psd_to_json(c));
    r["written_psd"] = o.psd_out;
  }
  return r;
}

Json density_summary(const qcorr::DensityMatrix& rho) {
  Json j;
  j["dims"] = Json::array({rho.dim_a, rho.dim_b});
  j["trace"] = rho.mat.trace().real();
  j["hermitian_defect"] = qcorr::linalg::hermitian_defect(rho.mat);
  j["min_eigenvalue"] = qcorr::linalg::min_eigenvalue(rho.mat);
  return j;
}

Json cmd_reconstruct(const Options& o) {
  require(o.factorization, "--factorization");
  const Json doc = qcorr::io::read_json_file(o.factorization);
  const std::string kind = doc.value("kind", std::string("general_factorization"));
  qcorr::DensityMatrix rho;
  double norm = 0.0;
  if (kind == "psd_factorization") {
    const qcorr::PsdFactorization f = qcorr::io::psd_from_json(doc);
    const qcorr::RMatrix t = qcorr::classical::trace_products(f);
    norm = t.sum();
    if (std::abs(norm - 1.0) > 1e-8) warn("factorization is unnormalized (total " + std::to_string(norm) + "); renormalizing");
    rho = qcorr::classical::classical_state(qcorr::classical::validate_dist(t, true));
  } else {
    const qcorr::GeneralFactorization f = qcorr::io::general_from_json(doc);
    norm = qcorr::general::factorization_norm(f);
    if (std::abs(norm - 1.0) > 1e-8) warn("factorization is unnormalized (norm " + std::to_string(norm) + "); renormalizing");
    rho = qcorr::general::reconstruct_from_factors(f);
  }
  Json r;
  r["kind"] = kind;
  r["norm"] = norm;
  r.update(density_summary(rho));
  const qcorr::QBound q = qcorr::general::q_upper_bound(rho, solver(o));
  Json qb;
  qb["qubits"] = q.qubits;
  qb["schmidt_rank"] = q.schmidt_rank;
  qb["route"] = q.classical_route ? "psd" : "purification";
  qb["tight"] = q.tight;
  r["q_upper_bound"] = qb;
  if (!o.out.empty()) {
    save(o.out, qcorr::io::density_to_json(rho));
    r["written"] = o.out;
  } else {
    r["density"] = qcorr::io::density_to_json(rho);
  }
  return r;
}

Json cmd_simulate(const Options& o) {
  const qcorr::ProtocolSpec spec = load_protocol(o);
  qcorr::sim::validate(spec);
  const qcorr::DensityMatrix rho = qcorr::sim::apply_protocol(spec);
  Json r = density_summary(rho);
  r["seed_size"] = spec.seed_size_qubits;
  r["distribution"] = rows_of(qcorr::sim::measure_computational(rho).p);
  if (!o.out.empty()) {
    save(o.out, qcorr::io::density_to_json(rho));
    r["written"] = o.out;
  } else {
    r["density"] = qcorr::io::density_to_json(rho);
  }
  return r;
}

Json cmd_verify(const Options& o) {
  const qcorr::ProtocolSpec spec = load_protocol(o);
  return verify_json(qcorr::sim::verify_generation(spec), spec.eps);
}

// ---- text rendering ---------------------------------------------------------

std::string scalar(const Json& v) {
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool numeric_array(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v)
    if (!e.is_number()) return false;
  return true;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const Json& v = it.value();
    if (v.is_object() && v.contains("data") && v.contains("rows")) {
      out.emplace_back(key, "<" + scalar(v["rows"]) + "x" + scalar(v["cols"]) + " matrix>");
    } else if (v.is_object() && v.contains("kind") && v.contains("format")) {
      out.emplace_back(key, "<" + scalar(v["kind"]) + ">");
    } else if (v.is_object()) {
      flatten(v, key, out);
    } else if (numeric_array(v)) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : " ") + scalar(e);
      out.emplace_back(key, s);
    } else if (v.is_array() && !v.empty() && numeric_array(v.front())) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        std::string s;
        for (const auto& e : v[i]) s += (s.empty() ? "" : " ") + scalar(e);
        out.emplace_back(key + "[" + std::to_string(i) + "]", s);
      }
    } else {
      out.emplace_back(key, scalar(v));
    }
  }
}

void print_text(const Json& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) std::cout << k << std::string(width - k.size() + 2, ' ') << v << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation complexity of bipartite states: Schmidt ranks, psd-rank, protocol synthesis and verification"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--eps", o.eps, "Fidelity slack eps in [0, 1]")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", o.tol, "psd solver success tolerance on the Frobenius residual")->check(CLI::PositiveNumber);
    sub->add_option("--starts", o.starts, "Solver multi-starts")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_flag("--json", o.json, "Emit a JSON report");
    sub->add_flag("--renormalize", o.renormalize, "Rescale distributions that do not sum to 1");
  };

  struct Sub {
    const char* name;
    const char* help;
    Json (*run)(const Options&);
  };
  const Sub subs[] = {
      {"schmidt", "Schmidt decomposition of a pure state", cmd_schmidt},
      {"qeps", "Approximate Schmidt rank and Q_eps of a pure state", cmd_qeps},
      {"approx", "Optimal low-Schmidt-rank approximant of a pure state", cmd_approx},
      {"psdrank", "psd-rank bounds and witness for a distribution", cmd_psdrank},
      {"nnrank", "Nonnegative-rank bounds for a distribution", cmd_nnrank},
      {"synth", "Synthesize a generation protocol (pure state or distribution)", cmd_synth},
      {"extract", "Factorizations from a purification", cmd_extract},
      {"reconstruct", "Density matrix from a factorization", cmd_reconstruct},
      {"simulate", "Run a protocol and report the produced state", cmd_simulate},
      {"verify", "Check a protocol against its target fidelity", cmd_verify},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> handles;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    handles.emplace_back(sub, &s);
  }
  auto opt = [&](const char* cmd, const char* flag, std::string& target, const char* help) {
    for (auto& [sub, s] : handles)
      if (std::string(s->name) == cmd) sub->add_option(flag, target, help);
  };
  for (const char* c : {"schmidt", "qeps", "approx", "synth"}) opt(c, "--state", o.state, "Pure state (JSON matrix)");
  for (const char* c : {"psdrank", "nnrank", "synth"}) opt(c, "--dist", o.dist, "Distribution (CSV or JSON matrix)");
  for (const char* c : {"synth", "reconstruct"}) opt(c, "--factorization", o.factorization, "Factorization manifest");
  opt("extract", "--purification", o.purification, "Purification file");
  for (const char* c : {"simulate", "verify"}) opt(c, "--protocol", o.protocol, "Protocol manifest");
  for (const char* c : {"approx", "psdrank", "synth", "extract", "reconstruct", "simulate"}) opt(c, "--out", o.out, "Output file");
  opt("extract", "--psd-out", o.psd_out, "Output file for the Gram (psd) factorization");
  opt("synth", "--out-dir", o.out_dir, "Directory for protocol.json and purification.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  const Sub* chosen = nullptr;
  for (auto& [sub, s] : handles)
    if (sub->parsed()) chosen = s;

  try {
    if (!(o.eps >= 0.0) || !std::isfinite(o.eps)) throw qcorr::InvalidInput("--eps must be a finite nonnegative number");
    Json report;
    report["format"] = qcorr::io::kFormat;
    report["command"] = chosen->name;
    report["config"] = config_block(o);
    report["result"] = chosen->run(o);
    if (o.json) {
      std::cout << qcorr::io::dump(report);
    } else {
      print_text(report);
    }
    return 0;
  } catch (const qcorr::InvalidInput& e) {
    std::cerr << "qcorr: invalid input: " << e.what() << "\n";
  } catch (const qcorr::NotPsd& e) {
    std::cerr << "qcorr: not positive semidefinite: " << e.what() << "\n";
  } catch (const qcorr::NotNormalized& e) {
    std::cerr << "qcorr: not normalized: " << e.what() << "\n";
  } catch (const qcorr::ParseError& e) {
    std::cerr << "qcorr: parse error: " << e.what() << "\n";
  } catch (const qcorr::FactorizationMismatch& e) {
    std::cerr << "qcorr: factorization mismatch: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "qcorr: internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
