#include "wwdn/poisson.hpp"

#include <cmath>
#include <string>

#include "wwdn/errors.hpp"

namespace wwdn {

namespace {

// int_{-inf}^y z^p e^{nu z} dz = e^{nu y} sum_{i=0}^p (-1)^i p!/(p-i)! y^{p-i} / nu^{i+1}, nu > 0.
// Appends c * (that sum) * e^{rate y}; the e^{nu y} factor is folded into `rate` by the caller.
void append_antiderivative(std::vector<ExpTerm>& out, cplx c, int p, double nu, double rate) {
  double falling = 1.0;  // p!/(p-i)!
  double inv_pow = 1.0 / nu;
  for (int i = 0; i <= p; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    out.push_back({rate, p - i, c * (sign * falling * inv_pow)});
    falling *= static_cast<double>(p - i);
    inv_pow /= nu;
  }
}

// (-1)^p p! / nu^{p+1}
double definite_at_zero(int p, double nu) {
  double v = 1.0 / nu;
  for (int i = 1; i <= p; ++i) v *= static_cast<double>(i) / nu;
  return (p % 2 == 0) ? v : -v;
}

ExpPolyProfile finish(std::vector<ExpTerm> terms, double merge_tol) {
  ExpPolyProfile r(std::move(terms));
  AlgebraOptions opt;
  opt.merge_tol = merge_tol;
  opt.prune_tol = 0.0;
  opt.term_cap = static_cast<std::size_t>(-1);
  r.normalize(opt);
  return r;
}

}  // namespace

ExpPolyProfile t_lambda(const ExpPolyProfile& p, double lambda) {
  if (lambda < 0.0) throw InvalidArgument("t_lambda: lambda must be >= 0");
  std::vector<ExpTerm> out;
  for (const auto& t : p.terms()) {
    const double nu = lambda + t.mu;
    if (nu <= 0.0) throw DivergentIntegral("T_0 applied to a term with zero decay rate");
    // e^{-lambda y} * e^{nu y} = e^{mu y}
    append_antiderivative(out, t.c, t.p, nu, t.mu);
  }
  return finish(std::move(out), 1e-12);
}

ExpPolyProfile t_tilde_lambda(const ExpPolyProfile& p, double lambda, double merge_tol) {
  if (lambda <= 0.0) throw InvalidArgument("t_tilde_lambda: lambda must be > 0");
  std::vector<ExpTerm> out;
  for (const auto& t : p.terms()) {
    const double kappa = t.mu - lambda;
    if (std::abs(kappa) < merge_tol * std::max(1.0, lambda)) {
      out.push_back({lambda, t.p + 1, -t.c / static_cast<double>(t.p + 1)});
      continue;
    }
    // e^{lambda y} [A(0) - A(y)], A(z) = antiderivative of z^p e^{kappa z}.
    out.push_back({lambda, 0, t.c * definite_at_zero(t.p, kappa)});
    append_antiderivative(out, -t.c, t.p, kappa, t.mu);
  }
  return finish(std::move(out), merge_tol);
}

ModeZeroSolution solve_mode_zero(const ExpPolyProfile& g0) {
  for (const auto& t : g0.terms()) {
    if (t.mu <= 0.0) throw DivergentIntegral("mode-zero source term with zero decay rate");
  }
  ModeZeroSolution s;
  s.profile = t_lambda(t_lambda(g0, 0.0), 0.0);
  s.constant = -s.profile.at_zero();
  return s;
}

ExpPolyProfile solve_mode(const ModeIndex& k, const ExpPolyProfile& g, double merge_tol) {
  if (k.is_zero()) throw InvalidArgument("solve_mode: use solve_mode_zero for k = 0");
  for (const auto& t : g.terms()) {
    if (t.mu <= 0.0) throw DivergentIntegral("source term with zero decay rate at mode k != 0");
  }
  const double lam = k.norm();
  const ExpPolyProfile tg = t_lambda(g, lam);
  ExpPolyProfile ttg = t_tilde_lambda(g, lam, merge_tol);
  std::vector<ExpTerm> out;
  out.reserve(tg.size() + ttg.size() + 1);
  const double w = -1.0 / (2.0 * lam);
  for (const auto& t : tg.terms()) out.push_back({t.mu, t.p, w * t.c});
  for (const auto& t : ttg.terms()) out.push_back({t.mu, t.p, w * t.c});
  out.push_back({lam, 0, tg.at_zero() / (2.0 * lam)});
  return finish(std::move(out), merge_tol);
}

HalfCylinderFunction solve_poisson(const HalfCylinderFunction& g, const AlgebraOptions& opt) {
  if (g.constant() != cplx{}) throw NonzeroConstantSource("constant source has no decaying solution");
  HalfCylinderFunction u(g.dim(), g.trunc());
  for (std::size_t i = 0; i < g.layout().size(); ++i) {
    const ModeIndex k = g.layout().mode(i);
    const auto& gk = g.profiles()[i];
    if (!k.lex_nonnegative() || gk.empty()) continue;
    if (k.is_zero()) {
      auto s = solve_mode_zero(gk);
      u.set_profile(k, std::move(s.profile));
      u.set_constant(s.constant.real());
    } else {
      u.set_profile(k, solve_mode(k, gk, opt.merge_tol));
    }
  }
  u.normalize(opt);
  return u;
}

}  // namespace wwdn
