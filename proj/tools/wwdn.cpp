// Command-line front end: dn apply|verify|oracle, stokes branch|verify.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "wwdn/dirichlet_neumann.hpp"
#include "wwdn/errors.hpp"
#include "wwdn/io.hpp"
#include "wwdn/stokes.hpp"

using namespace wwdn;
using io::json;

namespace {

enum Exit : int { kOk = 0, kInput = 1, kGuard = 2, kNoContraction = 3, kPartial = 4, kCheckFailed = 5 };

// Flags shared by every command that runs the DN solver. Unset optionals fall back to the
// config file, then to the library defaults.
struct SolverFlags {
  std::string config;
  std::optional<int> K;
  std::optional<int> d;
  std::optional<double> neumann_tol;
  std::optional<int> neumann_max_iter;
  std::optional<double> merge_tol;
  std::optional<double> prune_tol;
  std::optional<std::size_t> term_cap;
  std::optional<double> guard;

  void attach(CLI::App* app, bool with_d) {
    app->add_option("--config", config, "JSON configuration file (flags take precedence)");
    app->add_option("--K", K, "Fourier truncation |k|_inf <= K");
    if (with_d) app->add_option("--d", d, "Dimension (1 or 2)");
    app->add_option("--neumann-tol", neumann_tol, "Relative stopping tolerance of the fixed point");
    app->add_option("--neumann-max-iter", neumann_max_iter);
    app->add_option("--merge-tol", merge_tol);
    app->add_option("--prune-tol", prune_tol);
    app->add_option("--term-cap", term_cap);
    app->add_option("--guard", guard, "Admissibility bound on sup |(|D| eta)|");
  }

  [[nodiscard]] json config_json() const { return config.empty() ? json::object() : io::read_json_file(config); }

  [[nodiscard]] DNConfig dn(const json& file) const {
    const json& src = file.contains("dn") ? file.at("dn") : file;
    DNConfig c = io::dn_config_from_json(src);
    if (K) c.K = *K;
    if (d) c.d = *d;
    if (neumann_tol) c.neumann_tol = *neumann_tol;
    if (neumann_max_iter) c.neumann_max_iter = *neumann_max_iter;
    if (merge_tol) c.merge_tol = *merge_tol;
    if (prune_tol) c.prune_tol = *prune_tol;
    if (term_cap) c.term_cap = *term_cap;
    if (guard) c.eta_smallness_guard = *guard;
    return c;
  }
};

// Rejects misspelled configuration keys.
void check_keys(const json& j, const std::set<std::string>& extra) {
  static const std::set<std::string> dn_keys = {"K",         "d",         "a",        "neumann_tol", "neumann_max_iter",
                                                "series_tol", "series_max_terms", "merge_tol", "prune_tol",
                                                "term_cap",  "eta_smallness_guard", "norm_sigma", "norm_s"};
  static const std::set<std::string> stokes_keys = {"stokes_tol", "newton_max_iter", "fd_step",       "parity_tol",
                                                    "range_tol",  "eps_cap",         "jacobian_reuse_rate",
                                                    "polish_steps", "dn"};
  if (!j.is_object()) throw IoError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!dn_keys.contains(key) && !stokes_keys.contains(key) && !extra.contains(key) && key != "schema_version")
      throw IoError("unknown configuration key '" + key + "'");
}

template <class T>
T pick(const std::optional<T>& flag, const json& file, const char* key, T fallback) {
  if (flag) return *flag;
  if (file.contains(key)) return file.at(key).get<T>();
  return fallback;
}

void emit_report(const std::string& path, const json& report) {
  if (path.empty())
    std::cerr << report.dump(2) << '\n';
  else
    io::write_json_file(path, report);
}

PeriodicFunction read_coeffs(const std::string& path) { return io::periodic_from_json(io::read_json_file(path)); }

PeriodicFunction random_datum(std::mt19937_64& rng, int d, int K, int modes) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  PeriodicFunction u(d, K);
  const int top = std::min(K, modes);
  for (int a = -top; a <= top; ++a)
    for (int b = (d == 2 ? -top : 0); b <= (d == 2 ? top : 0); ++b) {
      const ModeIndex k = d == 1 ? ModeIndex(a) : ModeIndex(a, b);
      if (!k.lex_nonnegative()) continue;
      const double w = std::exp(-0.5 * k.l1());
      u.set(k, k.is_zero() ? cplx(w * U(rng), 0.0) : cplx(w * U(rng), w * U(rng)));
    }
  return u;
}

// ---- dn apply ----

struct DnApply {
  SolverFlags solver;
  std::string eta, psi, out, report, phi_out;

  int run() const {
    const json file = solver.config_json();
    check_keys(file, {});
    PeriodicFunction e = read_coeffs(eta);
    PeriodicFunction p = read_coeffs(psi);
    DNConfig cfg = solver.dn(file);
    if (!solver.d && !file.contains("d")) cfg.d = e.dim();
    if (e.dim() != cfg.d || p.dim() != cfg.d) throw DimensionMismatch("input dimension differs from --d");
    const DirichletNeumann op(e, cfg);
    SolveReport rep;
    const PeriodicFunction g = op.apply(p, &rep);
    io::write_json_file(out, io::to_json(g));
    if (!phi_out.empty()) io::write_json_file(phi_out, io::to_json(op.solve(p.resized(cfg.K)).phi));
    emit_report(report, {{"schema_version", io::kSchemaVersion},
                         {"kind", "dn_apply"},
                         {"config", io::to_json(cfg)},
                         {"report", io::to_json(rep)}});
    return kOk;
  }
};

// ---- dn verify ----

struct DnVerify {
  SolverFlags solver;
  std::string eta, report;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;

  int run() const {
    const json file = solver.config_json();
    check_keys(file, {"seed", "tol"});
    const PeriodicFunction e = read_coeffs(eta);
    DNConfig cfg = solver.dn(file);
    if (!solver.d && !file.contains("d")) cfg.d = e.dim();
    if (e.dim() != cfg.d) throw DimensionMismatch("eta dimension differs from --d");
    const std::uint64_t s = pick(seed, file, "seed", std::uint64_t{1});
    const double t = pick(tol, file, "tol", 1e-10);

    std::mt19937_64 rng(s);
    const PeriodicFunction psi1 = random_datum(rng, cfg.d, cfg.K, 6);
    const PeriodicFunction psi2 = random_datum(rng, cfg.d, cfg.K, 6);
    // theta on the collocation grid, m a vertical shift in [-1/2, 1/2]
    const int N = collocation_size(cfg.K);
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(rng() % static_cast<std::uint64_t>(N)) / N;
    const double m = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    const VerifyRecord r = verify_suite(e, psi1, psi2, theta, m, cfg);

    const json values = io::to_json(r);
    bool ok = true;
    std::printf("%-22s %-24s %s\n", "identity", "discrepancy", "status");
    for (const auto& [name, v] : values.items()) {
      if (name == "energy") {
        std::printf("%-22s %-24.17g %s\n", name.c_str(), v.get<double>(), "info");
        continue;
      }
      const bool pass = std::abs(v.get<double>()) <= t;
      ok = ok && pass;
      std::printf("%-22s %-24.17g %s\n", name.c_str(), v.get<double>(), pass ? "PASS" : "FAIL");
    }
    if (!report.empty())
      io::write_json_file(report, {{"schema_version", io::kSchemaVersion},
                                   {"kind", "dn_verify"},
                                   {"seed", s},
                                   {"tol", t},
                                   {"theta", theta},
                                   {"m", m},
                                   {"config", io::to_json(cfg)},
                                   {"values", values},
                                   {"pass", ok}});
    return ok ? kOk : kCheckFailed;
  }
};

// ---- dn oracle ----

struct DnOracle {
  std::string harmonic, eta, out_psi, out_g;
  std::optional<int> K;

  int run() const {
    const PeriodicFunction h = read_coeffs(harmonic);
    const PeriodicFunction e = read_coeffs(eta);
    if (h.dim() != e.dim()) throw DimensionMismatch("harmonic and eta dimensions differ");
    const ManufacturedPair pair = dn_oracle_manufactured(h, e, K.value_or(std::max(h.trunc(), e.trunc())));
    io::write_json_file(out_psi, io::to_json(pair.psi));
    io::write_json_file(out_g, io::to_json(pair.g_exact));
    return kOk;
  }
};

// ---- stokes branch ----

struct StokesFlags {
  std::optional<double> stokes_tol;
  std::optional<int> newton_max_iter;

  void attach(CLI::App* app) {
    app->add_option("--stokes-tol", stokes_tol, "Newton residual tolerance");
    app->add_option("--newton-max-iter", newton_max_iter);
  }

  [[nodiscard]] StokesConfig config(const SolverFlags& solver, const json& file) const {
    StokesConfig c = io::stokes_config_from_json(file);
    c.dn = solver.dn(file);
    c.dn.d = 1;
    if (stokes_tol) c.stokes_tol = *stokes_tol;
    if (newton_max_iter) c.newton_max_iter = *newton_max_iter;
    return c;
  }
};

struct StokesBranchCmd {
  SolverFlags solver;
  StokesFlags stokes;
  std::optional<int> k;
  std::optional<double> g, eps_max, eps_step;
  std::string out_json, out_csv;

  int run() const {
    json file = solver.config_json();
    check_keys(file, {"k", "g", "eps_max", "eps_step"});
    const StokesConfig cfg = stokes.config(solver, file);
    const int kk = pick(k, file, "k", 1);
    const double gg = pick(g, file, "g", 1.0);
    const double em = pick(eps_max, file, "eps_max", 0.05);
    const double es = pick(eps_step, file, "eps_step", 0.005);

    const StokesBranch b = continue_branch(em, es, kk, gg, cfg);

    std::printf("%-10s %-22s %-10s %-5s %-10s %s\n", "epsilon", "c", "residual", "iter", "sigma", "fit_quality");
    for (const StokesSolution& s : b.solutions)
      std::printf("%-10.6g %-22.17g %-10.3e %-5d %-10.5g %.6f\n", s.epsilon, s.c, s.residual_norm,
                  s.newton_iterations, s.sigma_estimate, s.sigma_fit_quality);

    json out = io::to_json(b);
    out["config"] = io::to_json(cfg);
    int nonzero = 0;
    for (const StokesSolution& s : b.solutions) nonzero += s.epsilon != 0.0;
    if (nonzero >= 3) {
      const int order = std::min(3, nonzero - 2);
      const TaylorFit t = taylor_fit(b, order, 3);
      std::printf("extrapolated c(0) = %.17g (sqrt(g/k) = %.17g)\n", t.c.coeffs[0], std::sqrt(gg / kk));
      out["taylor_c"] = {{"coeffs", t.c.coeffs}, {"condition", t.c.condition}, {"ill_conditioned", t.c.ill_conditioned}};
    }
    io::write_json_file(out_json, out);
    if (!out_csv.empty()) io::write_profile_csv(out_csv, b.solutions.back().pair);
    if (!b.complete) {
      std::fprintf(stderr, "branch truncated: %s\n", b.failure.c_str());
      return kPartial;
    }
    return kOk;
  }
};

// ---- stokes verify ----

struct StokesVerifyCmd {
  std::string branch, report;
  std::optional<double> tol;

  int run() const {
    const json j = io::read_json_file(branch);
    const StokesBranch b = io::branch_from_json(j);
    StokesConfig cfg = j.contains("config") ? io::stokes_config_from_json(j.at("config")) : StokesConfig{};
    const double t = tol.value_or(1e-10);
    bool ok = true;
    json rows = json::array();
    std::printf("%-10s %-12s %-12s %-12s %s\n", "epsilon", "residual", "recomputed", "projection", "status");
    for (const StokesSolution& s : b.solutions) {
      cfg.dn.K = s.pair.eta.trunc();
      const double r = residual_norm(f_map(s.pair, s.c, b.g, cfg));
      const double proj = kernel_projection(s.pair, b.k, b.g) - s.epsilon;
      const bool pass = r < t && std::abs(r - s.residual_norm) <= 1e-13 && std::abs(proj) <= 1e-12;
      ok = ok && pass;
      std::printf("%-10.6g %-12.3e %-12.3e %-12.3e %s\n", s.epsilon, s.residual_norm, r, proj, pass ? "PASS" : "FAIL");
      rows.push_back({{"epsilon", s.epsilon}, {"stored", s.residual_norm}, {"recomputed", r}, {"projection_error", proj},
                      {"pass", pass}});
    }
    if (!report.empty())
      io::write_json_file(report, {{"schema_version", io::kSchemaVersion}, {"kind", "stokes_verify"},
                                   {"tol", t}, {"rows", rows}, {"pass", ok}});
    return ok ? kOk : kCheckFailed;
  }
};

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const GuardViolation& e) {
    std::fprintf(stderr, "guard violation: %s\n", e.what());
    return kGuard;
  } catch (const NoContraction& e) {
    std::fprintf(stderr, "no contraction: %s\n", e.what());
    return kNoContraction;
  } catch (const SeriesDivergence& e) {
    std::fprintf(stderr, "series divergence: %s\n", e.what());
    return kNoContraction;
  } catch (const TermCapExceeded& e) {
    std::fprintf(stderr, "term cap exceeded: %s\n", e.what());
    return kNoContraction;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-Neumann operator and Stokes wave branches"};
  app.require_subcommand(1);

  CLI::App* dn = app.add_subcommand("dn", "Dirichlet-Neumann operator");
  dn->require_subcommand(1);

  DnApply apply;
  CLI::App* a = dn->add_subcommand("apply", "Compute G(eta) psi");
  apply.solver.attach(a, true);
  a->add_option("--eta", apply.eta, "Surface coefficients (JSON)")->required();
  a->add_option("--psi", apply.psi, "Dirichlet datum (JSON)")->required();
  a->add_option("--out", apply.out, "Output coefficients (JSON)")->required();
  a->add_option("--report", apply.report, "Report file (default: stderr)");
  a->add_option("--phi-out", apply.phi_out, "Also write the flattened potential");

  DnVerify verify;
  CLI::App* v = dn->add_subcommand("verify", "Check the invariance identities of G(eta)");
  verify.solver.attach(v, true);
  v->add_option("--eta", verify.eta, "Surface coefficients (JSON)")->required();
  v->add_option("--seed", verify.seed, "Seed for the random Dirichlet data");
  v->add_option("--tol", verify.tol, "Pass threshold (default 1e-10)");
  v->add_option("--report", verify.report, "JSON report file");

  DnOracle oracle;
  CLI::App* o = dn->add_subcommand("oracle", "Manufactured (psi, G psi) pair from a harmonic function");
  o->add_option("--harmonic", oracle.harmonic, "Coefficients c_k of sum c_k e^{|k| y} e^{ikx} (JSON)")->required();
  o->add_option("--eta", oracle.eta, "Surface coefficients (JSON)")->required();
  o->add_option("--K", oracle.K, "Output truncation");
  o->add_option("--out-psi", oracle.out_psi)->required();
  o->add_option("--out-g", oracle.out_g)->required();

  CLI::App* st = app.add_subcommand("stokes", "Stokes wave branches");
  st->require_subcommand(1);

  StokesBranchCmd br;
  CLI::App* b = st->add_subcommand("branch", "Continue the branch bifurcating from c = sqrt(g/k)");
  br.solver.attach(b, false);
  br.stokes.attach(b);
  b->add_option("--k", br.k, "Base wavenumber");
  b->add_option("--g", br.g, "Gravity");
  b->add_option("--eps-max", br.eps_max, "Largest amplitude");
  b->add_option("--eps-step", br.eps_step, "Amplitude step");
  b->add_option("--out-json", br.out_json, "Branch file")->required();
  b->add_option("--out-csv", br.out_csv, "Profile of the last solution on 512 points");

  StokesVerifyCmd sv;
  CLI::App* s = st->add_subcommand("verify", "Re-evaluate the residual of every solution in a branch file");
  s->add_option("--branch", sv.branch, "Branch file")->required();
  s->add_option("--tol", sv.tol, "Residual threshold (default 1e-10)");
  s->add_option("--report", sv.report, "JSON report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  if (a->parsed()) return guarded([&] { return apply.run(); });
  if (v->parsed()) return guarded([&] { return verify.run(); });
  if (o->parsed()) return guarded([&] { return oracle.run(); });
  if (b->parsed()) return guarded([&] { return br.run(); });
  if (s->parsed()) return guarded([&] { return sv.run(); });
  return kInput;
}
