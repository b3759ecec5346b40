#include "wwdn/dirichlet_neumann.hpp"

#include <algorithm>
#include <cmath>

#include "wwdn/errors.hpp"
#include "wwdn/poisson.hpp"

namespace wwdn {

namespace {

double max_abs_diff(const PeriodicFunction& a, const PeriodicFunction& b) { return (a - b).max_abs_coeff(); }

HalfCylinderFunction constant_function(int d, int K, double value) {
  HalfCylinderFunction out(d, K);
  out.set_constant(value);
  return out;
}

double grid_mean(const GridValues& g) {
  double s = 0.0;
  for (double v : g.values) s += v;
  return s / static_cast<double>(g.values.size());
}

void check_config(const DNConfig& cfg) {
  if (cfg.d != 1 && cfg.d != 2) throw InvalidArgument("DNConfig: d must be 1 or 2");
  if (cfg.K < 0) throw InvalidArgument("DNConfig: K must be nonnegative");
  if (!(cfg.a > 0.0 && cfg.a < 1.0)) throw InvalidArgument("DNConfig: a must lie in (0, 1)");
  if (cfg.neumann_max_iter < 1) throw InvalidArgument("DNConfig: neumann_max_iter must be positive");
}

}  // namespace

double guard_value(const PeriodicFunction& eta) {
  const GridValues g = to_grid(abs_d(eta), collocation_size(eta.trunc()));
  double m = 0.0;
  for (double v : g.values) m = std::max(m, std::abs(v));
  return m;
}

FlatteningCoefficients flattening_coeffs(const PeriodicFunction& eta_in, const DNConfig& cfg) {
  check_config(cfg);
  if (eta_in.dim() != cfg.d) throw DimensionMismatch("flattening_coeffs: eta dimension differs from config");
  const PeriodicFunction eta = eta_in.resized(cfg.K);
  const double guard = guard_value(eta);
  if (guard >= cfg.eta_smallness_guard)
    throw GuardViolation("sup |(|D| eta)| = " + std::to_string(guard) + " is not below the guard " +
                         std::to_string(cfg.eta_smallness_guard));
  const AlgebraOptions opt = cfg.algebra();
  const int d = cfg.d;
  const int K = cfg.K;

  FlatteningCoefficients out;
  // b = d_y rho - 1 = e^{y|D|} |D| eta
  const HalfCylinderFunction b = lift_harmonic(abs_d(eta));
  out.beta = -1.0 * b;
  std::vector<HalfCylinderFunction> grad_rho;
  std::vector<HalfCylinderFunction> grad_b;
  for (int j = 0; j < d; ++j) {
    grad_rho.push_back(lift_harmonic(partial_x(eta, j)));
    grad_b.push_back(dx(b, j));
    out.gamma.push_back(2.0 * grad_rho.back());
  }
  if (b.is_zero()) {
    out.alpha = HalfCylinderFunction(d, K);
    out.delta = HalfCylinderFunction(d, K);
    return out;
  }

  // r = 1/d_y rho - 1 = sum_{j>=1} (-b)^j
  const HalfCylinderFunction minus_b = out.beta;
  HalfCylinderFunction r = minus_b;
  HalfCylinderFunction term = minus_b;
  const double first = term.max_term_size();
  double last = first;
  int rising = 0;
  out.series_terms = 1;
  while (last > cfg.series_tol * first) {
    if (out.series_terms >= cfg.series_max_terms)
      throw SeriesDivergence("series for 1/d_y rho did not reach tolerance within " +
                             std::to_string(cfg.series_max_terms) + " terms");
    term = multiply(term, minus_b, opt);
    const double size = term.max_term_size();
    rising = size >= last ? rising + 1 : 0;
    if (rising >= 5) throw SeriesDivergence("series for 1/d_y rho: term sizes non-decreasing over 5 terms");
    last = size;
    r += term;
    ++out.series_terms;
  }
  r.normalize(opt);
  out.series_residual = last;

  ProductAccumulator acc(d, K, opt.merge_tol);
  for (int j = 0; j < d; ++j) acc.add_product(grad_rho[j], grad_rho[j]);
  const HalfCylinderFunction grad_sq = acc.finish(opt);

  // alpha = 1 - (1 + r)(1 + |grad rho|^2)
  acc.add(r, -1.0);
  acc.add(grad_sq, -1.0);
  acc.add_product(r, grad_sq, -1.0);
  out.alpha = acc.finish(opt);

  // delta = Delta rho - 2 (1 + r) grad rho . grad b + (1 + r)^2 (1 + |grad rho|^2) d_y^2 rho
  const HalfCylinderFunction one_r = r + constant_function(d, K, 1.0);
  for (int j = 0; j < d; ++j) acc.add_product(grad_rho[j], grad_b[j]);
  const HalfCylinderFunction cross = acc.finish(opt);
  const HalfCylinderFunction one_r_sq = multiply(one_r, one_r, opt);
  const HalfCylinderFunction metric = multiply(one_r_sq, grad_sq + constant_function(d, K, 1.0), opt);
  const HalfCylinderFunction rho_yy = dy(b);
  acc.add(laplacian_x(lift_harmonic(eta)));
  acc.add_product(one_r, cross, -2.0);
  acc.add_product(metric, rho_yy);
  out.delta = acc.finish(opt);
  return out;
}

HalfCylinderFunction apply_F(const FlatteningCoefficients& coeffs, const HalfCylinderFunction& phi,
                             const AlgebraOptions& opt) {
  const int d = phi.dim();
  const int K = std::max({phi.trunc(), coeffs.alpha.trunc(), coeffs.beta.trunc()});
  ProductAccumulator acc(d, K, opt.merge_tol);
  const HalfCylinderFunction phi_y = dy(phi);
  acc.add_product(coeffs.alpha, dy(phi_y));
  acc.add_product(coeffs.beta, laplacian_x(phi));
  for (int j = 0; j < static_cast<int>(coeffs.gamma.size()); ++j) acc.add_product(coeffs.gamma[j], dx(phi_y, j));
  acc.add_product(coeffs.delta, phi_y);
  HalfCylinderFunction out = acc.finish(opt);
  out.set_constant(0.0);
  return out;
}

DirichletNeumann::DirichletNeumann(const PeriodicFunction& eta, DNConfig cfg) : cfg_(cfg) {
  check_config(cfg_);
  if (eta.dim() != cfg_.d) throw DimensionMismatch("DirichletNeumann: eta dimension differs from config");
  eta_ = eta.resized(cfg_.K);
  coeffs_ = flattening_coeffs(eta_, cfg_);
  guard_ = guard_value(eta_);
  flat_ = coeffs_.beta.is_zero() && std::all_of(coeffs_.gamma.begin(), coeffs_.gamma.end(),
                                                [](const HalfCylinderFunction& g) { return g.is_zero(); });
  grid_n_ = collocation_size(cfg_.K);
  GridValues grad_sq;
  for (int j = 0; j < cfg_.d; ++j) {
    grad_eta_.push_back(to_grid(partial_x(eta_, j), grid_n_));
    if (j == 0) {
      grad_sq = grad_eta_.back();
      for (double& v : grad_sq.values) v *= v;
    } else {
      for (std::size_t i = 0; i < grad_sq.values.size(); ++i)
        grad_sq.values[i] += grad_eta_.back().values[i] * grad_eta_.back().values[i];
    }
  }
  f_eta_ = to_grid(abs_d(eta_), grid_n_);
  for (std::size_t i = 0; i < f_eta_.values.size(); ++i) {
    const double de = f_eta_.values[i];
    f_eta_.values[i] = (grad_sq.values[i] - de) / (1.0 + de);
  }
}

TransformedSolution DirichletNeumann::solve(const PeriodicFunction& psi_in) const {
  if (psi_in.dim() != cfg_.d) throw DimensionMismatch("solve: psi dimension differs from config");
  const PeriodicFunction psi = psi_in.resized(cfg_.K);
  const AlgebraOptions opt = cfg_.algebra();
  const WeightedNormParams np = cfg_.norm();

  TransformedSolution out;
  out.report.guard_margin = guard_margin();
  out.report.series_terms = coeffs_.series_terms;
  out.phi = lift_harmonic(psi);
  const double base = norm_sigma_s_a(out.phi, np);
  if (base == 0.0 || flat_) {
    if (cfg_.report_residual) out.report.residual = 0.0;
    out.report.phi_terms = out.phi.term_count();
    out.report.phi_max_degree = out.phi.max_degree();
    return out;
  }

  // u = sum_n v_n with v_0 = L F phi_0 and v_{n+1} = L F v_n.
  HalfCylinderFunction v = solve_poisson(apply_F(coeffs_, out.phi, opt), opt);
  HalfCylinderFunction u = v;
  double prev = norm_sigma_s_a(v, np);
  out.report.iterations = 1;
  int stalled = 0;
  while (prev >= cfg_.neumann_tol * base) {
    if (out.report.iterations >= cfg_.neumann_max_iter)
      throw NoContraction("Neumann series did not converge within " + std::to_string(cfg_.neumann_max_iter) +
                          " iterations");
    v = solve_poisson(apply_F(coeffs_, v, opt), opt);
    const double now = norm_sigma_s_a(v, np);
    const double ratio = now / prev;
    out.report.contraction_ratios.push_back(ratio);
    stalled = ratio >= 1.0 ? stalled + 1 : 0;
    if (stalled >= 3) throw NoContraction("Neumann iteration ratio >= 1 over 3 iterations");
    u += v;
    prev = now;
    ++out.report.iterations;
  }
  u.normalize(opt);
  out.report.last_increment = prev / base;
  out.phi += u;
  out.phi.normalize(opt);

  if (cfg_.report_residual) {
    HalfCylinderFunction res = laplacian_xy(out.phi, opt);
    res -= apply_F(coeffs_, out.phi, opt);
    res.normalize(opt);
    out.report.residual = norm_sigma_s_a(res, cfg_.residual_norm()) / base;
  }
  out.report.trace_error = max_abs_diff(trace(out.phi), psi);
  out.report.phi_terms = out.phi.term_count();
  out.report.phi_max_degree = out.phi.max_degree();
  return out;
}

PeriodicFunction DirichletNeumann::apply(const PeriodicFunction& psi_in, SolveReport* report) const {
  const PeriodicFunction psi = psi_in.resized(cfg_.K);
  TransformedSolution sol = solve(psi);
  PeriodicFunction g2 = trace(dy(sol.phi)).resized(cfg_.K);
  if (report) *report = std::move(sol.report);
  if (flat_) return g2;

  GridValues corr = to_grid(g2, grid_n_);
  for (double& v : corr.values) v = 0.0;
  const GridValues g2_grid = to_grid(g2, grid_n_);
  for (int j = 0; j < cfg_.d; ++j) {
    const GridValues dpsi = to_grid(partial_x(psi, j), grid_n_);
    for (std::size_t i = 0; i < corr.values.size(); ++i) corr.values[i] -= grad_eta_[j].values[i] * dpsi.values[i];
  }
  for (std::size_t i = 0; i < corr.values.size(); ++i) corr.values[i] += f_eta_.values[i] * g2_grid.values[i];
  return g2 + from_grid(corr, cfg_.K);
}

TransformedSolution solve_transformed(const PeriodicFunction& eta, const PeriodicFunction& psi, const DNConfig& cfg) {
  return DirichletNeumann(eta, cfg).solve(psi);
}

PeriodicFunction apply_dn(const PeriodicFunction& eta, const PeriodicFunction& psi, const DNConfig& cfg,
                          SolveReport* report) {
  return DirichletNeumann(eta, cfg).apply(psi, report);
}

ManufacturedPair dn_oracle_manufactured(const PeriodicFunction& harmonic_coeffs, const PeriodicFunction& eta, int K) {
  if (harmonic_coeffs.dim() != eta.dim()) throw DimensionMismatch("oracle: dimensions differ");
  const int d = eta.dim();
  // Oversampled grid so that aliasing of the (non-polynomial) boundary data stays below round-off.
  const int N = 2 * collocation_size(std::max({K, eta.trunc(), harmonic_coeffs.trunc()}));
  const GridValues eta_g = to_grid(eta, N);
  std::vector<GridValues> deta;
  for (int j = 0; j < d; ++j) deta.push_back(to_grid(partial_x(eta, j), N));

  struct Mode {
    ModeIndex k;
    cplx c;
  };
  std::vector<Mode> modes;
  harmonic_coeffs.for_each([&](const ModeIndex& k, cplx c) {
    if (c != cplx{}) modes.push_back({k, c});
  });

  GridValues psi_g = eta_g;
  GridValues g_g = eta_g;
  const double h = 2.0 * M_PI / N;
  const int n1 = d == 2 ? N : 1;
  for (int i0 = 0; i0 < N; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const double x0 = i0 * h;
      const double x1 = i1 * h;
      const double y = eta_g.at(i0, i1);
      cplx phi{};
      cplx phi_y{};
      cplx grad_dot{};
      for (const auto& m : modes) {
        const double kn = m.k.norm();
        const double phase = m.k.k[0] * x0 + (d == 2 ? m.k.k[1] * x1 : 0.0);
        const cplx val = m.c * std::exp(kn * y) * std::polar(1.0, phase);
        phi += val;
        phi_y += kn * val;
        for (int j = 0; j < d; ++j) grad_dot += deta[j].at(i0, i1) * cplx(0.0, m.k.k[j]) * val;
      }
      psi_g.at(i0, i1) = phi.real();
      g_g.at(i0, i1) = (phi_y - grad_dot).real();
    }
  }
  return {from_grid(psi_g, K), from_grid(g_g, K)};
}

double VerifyRecord::worst() const {
  return std::max({std::abs(self_adjointness), positivity_violation, translation, reflection, vertical,
                   std::abs(bernoulli_mean), g_of_one, std::abs(mean_of_g)});
}

double bernoulli_mean(const PeriodicFunction& eta, const PeriodicFunction& psi, const PeriodicFunction& g_psi) {
  const int d = eta.dim();
  const int K = std::max({eta.trunc(), psi.trunc(), g_psi.trunc()});
  const int N = 2 * collocation_size(K);
  GridValues grad_psi_sq = to_grid(PeriodicFunction(d, 0), N);
  GridValues grad_eta_sq = grad_psi_sq;
  GridValues cross = grad_psi_sq;
  for (int j = 0; j < d; ++j) {
    const GridValues de = to_grid(partial_x(eta, j), N);
    const GridValues dp = to_grid(partial_x(psi, j), N);
    for (std::size_t i = 0; i < de.values.size(); ++i) {
      grad_psi_sq.values[i] += dp.values[i] * dp.values[i];
      grad_eta_sq.values[i] += de.values[i] * de.values[i];
      cross.values[i] += de.values[i] * dp.values[i];
    }
  }
  GridValues b = to_grid(g_psi, N);
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    const double num = b.values[i] + cross.values[i];
    b.values[i] = -0.5 * grad_psi_sq.values[i] + num * num / (2.0 * (1.0 + grad_eta_sq.values[i]));
  }
  return grid_mean(b);
}

VerifyRecord verify_suite(const PeriodicFunction& eta_in, const PeriodicFunction& psi1_in,
                          const PeriodicFunction& psi2_in, double theta, double m, const DNConfig& cfg) {
  const PeriodicFunction eta = eta_in.resized(cfg.K);
  const PeriodicFunction psi1 = psi1_in.resized(cfg.K);
  const PeriodicFunction psi2 = psi2_in.resized(cfg.K);
  const int d = cfg.d;
  const double theta1 = d == 2 ? theta : 0.0;

  const DirichletNeumann G(eta, cfg);
  const PeriodicFunction g1 = G.apply(psi1);
  const PeriodicFunction g2 = G.apply(psi2);

  VerifyRecord r;
  r.self_adjointness = inner(g1, psi2) - inner(psi1, g2);
  r.energy = inner(g1, psi1);
  r.positivity_violation = std::max(0.0, -r.energy);

  const PeriodicFunction shifted =
      DirichletNeumann(translate(eta, theta, theta1), cfg).apply(translate(psi1, theta, theta1));
  r.translation = max_abs_diff(translate(g1, theta, theta1), shifted);

  const PeriodicFunction reflected = DirichletNeumann(reflect(eta), cfg).apply(reflect(psi1));
  r.reflection = max_abs_diff(reflected, reflect(g1));

  const PeriodicFunction lifted = DirichletNeumann(eta + PeriodicFunction::constant(d, cfg.K, m), cfg).apply(psi1);
  r.vertical = max_abs_diff(lifted, g1);

  r.bernoulli_mean = bernoulli_mean(eta, psi1, g1);
  r.g_of_one = G.apply(PeriodicFunction::constant(d, cfg.K, 1.0)).max_abs_coeff();
  r.mean_of_g = g1.coeff(ModeIndex{}).real();
  return r;
}

double dn_tame_ratio(const PeriodicFunction& eta, const PeriodicFunction& psi, const PeriodicFunction& g_psi,
                     double sigma, double s, double s0) {
  const double num = norm_sigma_s(g_psi, {sigma, s - 1.0});
  const double den =
      norm_sigma_s(psi, {sigma, s}) + norm_sigma_s(eta, {sigma, s}) * norm_sigma_s(psi, {sigma, s0 + 1.5});
  return den == 0.0 ? 0.0 : num / den;
}

}  // namespace wwdn
