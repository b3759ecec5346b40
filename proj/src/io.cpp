#include "wwdn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "wwdn/errors.hpp"

namespace wwdn::io {

namespace {

json mode_json(const ModeIndex& k, int d) { return d == 1 ? json::array({k[0]}) : json::array({k[0], k[1]}); }

ModeIndex mode_from(const json& j, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) throw IoError("mode index must be an array of length d");
  return d == 1 ? ModeIndex(j.at(0).get<int>()) : ModeIndex(j.at(0).get<int>(), j.at(1).get<int>());
}

// Checks d and K and returns them.
std::pair<int, int> shape(const json& j) {
  if (!j.is_object()) throw IoError("expected a JSON object");
  const int d = j.at("d").get<int>();
  const int K = j.at("K").get<int>();
  if (d != 1 && d != 2) throw IoError("d must be 1 or 2");
  if (K < 0) throw IoError("K must be nonnegative");
  return {d, K};
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const PeriodicFunction& u) {
  json coeffs = json::array();
  u.for_each([&](const ModeIndex& k, cplx c) {
    if (!k.lex_nonnegative() || c == cplx{}) return;
    coeffs.push_back({{"k", mode_json(k, u.dim())}, {"re", c.real()}, {"im", c.imag()}});
  });
  return {{"d", u.dim()}, {"K", u.trunc()}, {"coeffs", coeffs}};
}

PeriodicFunction periodic_from_json(const json& j) {
  return guarded("coefficient file", [&] {
    const auto [d, K] = shape(j);
    PeriodicFunction u(d, K);
    std::set<ModeIndex> seen;
    for (const json& e : j.at("coeffs")) {
      const ModeIndex k = mode_from(e.at("k"), d);
      if (!k.lex_nonnegative()) throw IoError("modes must be lexicographically nonnegative");
      if (k.linf() > K) throw IoError("mode outside |k|_inf <= K");
      if (!seen.insert(k).second) throw IoError("duplicate mode");
      const double im = e.value("im", 0.0);
      if (k.is_zero() && im != 0.0) throw IoError("the mean value must be real");
      u.set(k, cplx(e.at("re").get<double>(), im));
    }
    return u;
  });
}

json to_json(const HalfCylinderFunction& u) {
  json coeffs = json::array();
  const ModeLayout& L = u.layout();
  for (std::size_t i = 0; i < L.size(); ++i) {
    const ModeIndex k = L.mode(i);
    const ExpPolyProfile& p = u.profile(k);
    if (!k.lex_nonnegative() || p.empty()) continue;
    json terms = json::array();
    for (const ExpTerm& t : p.terms()) terms.push_back({{"mu", t.mu}, {"p", t.p}, {"re", t.c.real()}, {"im", t.c.imag()}});
    coeffs.push_back({{"k", mode_json(k, u.dim())}, {"terms", terms}});
  }
  return {{"d", u.dim()},
          {"K", u.trunc()},
          {"constant", {{"re", u.constant().real()}, {"im", u.constant().imag()}}},
          {"coeffs", coeffs}};
}

HalfCylinderFunction half_cylinder_from_json(const json& j) {
  return guarded("half-space file", [&] {
    const auto [d, K] = shape(j);
    HalfCylinderFunction u(d, K);
    const json& c = j.at("constant");
    u.set_constant(c.is_number() ? cplx(c.get<double>(), 0.0) : cplx(c.at("re").get<double>(), c.value("im", 0.0)));
    std::set<ModeIndex> seen;
    for (const json& e : j.at("coeffs")) {
      const ModeIndex k = mode_from(e.at("k"), d);
      if (!k.lex_nonnegative()) throw IoError("modes must be lexicographically nonnegative");
      if (k.linf() > K) throw IoError("mode outside |k|_inf <= K");
      if (!seen.insert(k).second) throw IoError("duplicate mode");
      std::vector<ExpTerm> terms;
      for (const json& t : e.at("terms"))
        terms.push_back({t.at("mu").get<double>(), t.at("p").get<int>(), cplx(t.at("re").get<double>(), t.value("im", 0.0))});
      u.set_profile(k, ExpPolyProfile(std::move(terms)));
    }
    return u;
  });
}

json to_json(const StokesSolution& s) {
  return {{"epsilon", s.epsilon},
          {"c", s.c},
          {"residual_norm", s.residual_norm},
          {"sigma_estimate", s.sigma_estimate},
          {"sigma_fit_quality", s.sigma_fit_quality},
          {"newton_iterations", s.newton_iterations},
          {"eta", to_json(s.pair.eta)},
          {"psi", to_json(s.pair.psi)}};
}

StokesSolution solution_from_json(const json& j) {
  return guarded("solution", [&] {
    StokesSolution s;
    s.epsilon = j.at("epsilon").get<double>();
    s.c = j.at("c").get<double>();
    s.residual_norm = j.at("residual_norm").get<double>();
    s.sigma_estimate = j.value("sigma_estimate", 0.0);
    s.sigma_fit_quality = j.value("sigma_fit_quality", 0.0);
    s.newton_iterations = j.value("newton_iterations", 0);
    s.pair.eta = periodic_from_json(j.at("eta"));
    s.pair.psi = periodic_from_json(j.at("psi"));
    return s;
  });
}

json to_json(const StokesBranch& b) {
  json sols = json::array();
  for (const StokesSolution& s : b.solutions) sols.push_back(to_json(s));
  return {{"schema_version", kSchemaVersion}, {"kind", "stokes_branch"}, {"g", b.g},       {"k", b.k},
          {"complete", b.complete},          {"failure", b.failure},    {"solutions", sols}};
}

StokesBranch branch_from_json(const json& j) {
  return guarded("branch file", [&] {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw IoError("unsupported schema_version");
    StokesBranch b;
    b.g = j.at("g").get<double>();
    b.k = j.at("k").get<int>();
    b.complete = j.value("complete", true);
    b.failure = j.value("failure", std::string());
    for (const json& s : j.at("solutions")) b.solutions.push_back(solution_from_json(s));
    return b;
  });
}

json to_json(const DNConfig& c) {
  return {{"K", c.K},
          {"d", c.d},
          {"a", c.a},
          {"neumann_tol", c.neumann_tol},
          {"neumann_max_iter", c.neumann_max_iter},
          {"series_tol", c.series_tol},
          {"series_max_terms", c.series_max_terms},
          {"merge_tol", c.merge_tol},
          {"prune_tol", c.prune_tol},
          {"term_cap", c.term_cap},
          {"eta_smallness_guard", c.eta_smallness_guard},
          {"norm_sigma", c.norm_sigma},
          {"norm_s", c.norm_s}};
}

DNConfig dn_config_from_json(const json& j, DNConfig c) {
  return guarded("DN configuration", [&] {
    c.K = j.value("K", c.K);
    c.d = j.value("d", c.d);
    c.a = j.value("a", c.a);
    c.neumann_tol = j.value("neumann_tol", c.neumann_tol);
    c.neumann_max_iter = j.value("neumann_max_iter", c.neumann_max_iter);
    c.series_tol = j.value("series_tol", c.series_tol);
    c.series_max_terms = j.value("series_max_terms", c.series_max_terms);
    c.merge_tol = j.value("merge_tol", c.merge_tol);
    c.prune_tol = j.value("prune_tol", c.prune_tol);
    c.term_cap = j.value("term_cap", c.term_cap);
    c.eta_smallness_guard = j.value("eta_smallness_guard", c.eta_smallness_guard);
    c.norm_sigma = j.value("norm_sigma", c.norm_sigma);
    c.norm_s = j.value("norm_s", c.norm_s);
    return c;
  });
}

json to_json(const StokesConfig& c) {
  return {{"dn", to_json(c.dn)},
          {"stokes_tol", c.stokes_tol},
          {"newton_max_iter", c.newton_max_iter},
          {"fd_step", c.fd_step},
          {"parity_tol", c.parity_tol},
          {"range_tol", c.range_tol},
          {"eps_cap", c.eps_cap},
          {"jacobian_reuse_rate", c.jacobian_reuse_rate},
          {"polish_steps", c.polish_steps}};
}

StokesConfig stokes_config_from_json(const json& j, StokesConfig c) {
  return guarded("Stokes configuration", [&] {
    if (j.contains("dn")) c.dn = dn_config_from_json(j.at("dn"), c.dn);
    c.stokes_tol = j.value("stokes_tol", c.stokes_tol);
    c.newton_max_iter = j.value("newton_max_iter", c.newton_max_iter);
    c.fd_step = j.value("fd_step", c.fd_step);
    c.parity_tol = j.value("parity_tol", c.parity_tol);
    c.range_tol = j.value("range_tol", c.range_tol);
    c.eps_cap = j.value("eps_cap", c.eps_cap);
    c.jacobian_reuse_rate = j.value("jacobian_reuse_rate", c.jacobian_reuse_rate);
    c.polish_steps = j.value("polish_steps", c.polish_steps);
    return c;
  });
}

json to_json(const SolveReport& r) {
  json out = {{"iterations", r.iterations},
              {"contraction_ratios", r.contraction_ratios},
              {"last_increment", r.last_increment},
              {"trace_error", r.trace_error},
              {"guard_margin", r.guard_margin},
              {"series_terms", r.series_terms},
              {"phi_terms", r.phi_terms},
              {"phi_max_degree", r.phi_max_degree}};
  out["residual"] = r.residual ? json(*r.residual) : json(nullptr);
  return out;
}

json to_json(const VerifyRecord& r) {
  return {{"self_adjointness", r.self_adjointness}, {"energy", r.energy},
          {"positivity_violation", r.positivity_violation}, {"translation", r.translation},
          {"reflection", r.reflection},           {"vertical", r.vertical},
          {"bernoulli_mean", r.bernoulli_mean},   {"g_of_one", r.g_of_one},
          {"mean_of_g", r.mean_of_g}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_profile_csv(const std::string& path, const SymmetricPair& pair, int n) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw IoError("cannot write " + path);
  std::fprintf(f, "x,eta,psi\n");
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * std::numbers::pi * i / n;
    std::fprintf(f, "%.17g,%.17g,%.17g\n", x, pair.eta.eval(x), pair.psi.eval(x));
  }
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

}  // namespace wwdn::io
