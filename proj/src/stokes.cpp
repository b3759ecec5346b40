#include "wwdn/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "wwdn/errors.hpp"

namespace wwdn {

namespace {

void check_pair(const SymmetricPair& p) {
  if (p.eta.dim() != 1 || p.psi.dim() != 1) throw DimensionMismatch("stokes: pairs are one-dimensional");
  const double scale = std::max({1.0, p.eta.max_abs_coeff(), p.psi.max_abs_coeff()});
  const double tol = 1e-12 * scale;
  if (std::abs(p.eta.coeff(ModeIndex(0))) > tol) throw InvalidArgument("stokes: eta must have zero mean");
  for (int j = 1; j <= p.eta.trunc(); ++j)
    if (std::abs(p.eta.coeff(ModeIndex(j)).imag()) > tol) throw InvalidArgument("stokes: eta must be even");
  for (int j = 0; j <= p.psi.trunc(); ++j)
    if (std::abs(p.psi.coeff(ModeIndex(j)).real()) > tol) throw InvalidArgument("stokes: psi must be odd");
}

// Coefficient of cos(jx) and sin(jx) in a real series.
double cos_coeff(const PeriodicFunction& u, int j) { return 2.0 * u.coeff(ModeIndex(j)).real(); }
double sin_coeff(const PeriodicFunction& u, int j) { return -2.0 * u.coeff(ModeIndex(j)).imag(); }

// The pointwise part of the residual map, given G(eta) psi.
ResidualPair assemble(const PeriodicFunction& eta, const PeriodicFunction& psi, const PeriodicFunction& g_psi,
                      double c, double g, int K) {
  const PeriodicFunction eta_x = partial_x(eta, 0);
  const PeriodicFunction psi_x = partial_x(psi, 0);
  ResidualPair out;
  out.f1 = c * eta_x + g_psi.resized(K);

  // Rational term on a grid twice the collocation size so that its projection is alias free.
  const int N = 2 * collocation_size(K);
  const GridValues ex = to_grid(eta_x, N);
  const GridValues px = to_grid(psi_x, N);
  const GridValues gp = to_grid(g_psi, N);
  GridValues nl = ex;
  for (std::size_t i = 0; i < nl.values.size(); ++i) {
    const double e = ex.values[i];
    const double p = px.values[i];
    const double b = gp.values[i] + e * p;
    nl.values[i] = -0.5 * p * p + b * b / (2.0 * (1.0 + e * e));
  }
  out.f2 = c * psi_x - g * eta + from_grid(nl, K);
  return out;
}

void check_parity(const ResidualPair& r, double tol) {
  double worst = std::abs(r.f2.coeff(ModeIndex(0)).real());
  for (int j = 0; j <= r.f1.trunc(); ++j) worst = std::max(worst, std::abs(r.f1.coeff(ModeIndex(j)).real()));
  for (int j = 1; j <= r.f2.trunc(); ++j) worst = std::max(worst, std::abs(r.f2.coeff(ModeIndex(j)).imag()));
  if (worst > tol)
    throw SymmetryViolation("f_map: output parity broken by " + std::to_string(worst));
}

// Reduced coordinates X = (a_1..a_K, b_1..b_K, c) with eta = sum a_j cos jx, psi = sum b_j sin jx.
struct Reduced {
  int K;

  [[nodiscard]] Eigen::Index size() const { return 2 * K + 1; }

  [[nodiscard]] Eigen::VectorXd pack(const SymmetricPair& p, double c) const {
    Eigen::VectorXd X(size());
    for (int j = 1; j <= K; ++j) {
      X[j - 1] = cos_coeff(p.eta, j);
      X[K + j - 1] = sin_coeff(p.psi, j);
    }
    X[2 * K] = c;
    return X;
  }

  [[nodiscard]] SymmetricPair unpack(const Eigen::VectorXd& X) const {
    SymmetricPair p{PeriodicFunction(1, K), PeriodicFunction(1, K)};
    for (int j = 1; j <= K; ++j) {
      p.eta.set(ModeIndex(j), cplx(0.5 * X[j - 1], 0.0));
      p.psi.set(ModeIndex(j), cplx(0.0, -0.5 * X[K + j - 1]));
    }
    return p;
  }

  // (sin-coefficients of f1, cos-coefficients of f2, projection constraint)
  [[nodiscard]] Eigen::VectorXd residual(const ResidualPair& r, const SymmetricPair& p, int k, double g,
                                         double epsilon) const {
    Eigen::VectorXd R(size());
    for (int j = 1; j <= K; ++j) {
      R[j - 1] = sin_coeff(r.f1, j);
      R[K + j - 1] = cos_coeff(r.f2, j);
    }
    R[2 * K] = kernel_projection(p, k, g) - epsilon;
    return R;
  }
};

DNConfig dn_config(const StokesConfig& cfg) {
  DNConfig dn = cfg.dn;
  dn.d = 1;
  return dn;
}

struct Evaluation {
  ResidualPair r;
  Eigen::VectorXd R;
  double norm = 0.0;
};

class NewtonSystem {
 public:
  NewtonSystem(int k, double g, double epsilon, const StokesConfig& cfg)
      : k_(k), g_(g), eps_(epsilon), cfg_(cfg), dn_(dn_config(cfg)), red_{cfg.dn.K} {}

  [[nodiscard]] const Reduced& reduced() const { return red_; }

  [[nodiscard]] Evaluation evaluate(const Eigen::VectorXd& X) {
    const SymmetricPair p = red_.unpack(X);
    op_.emplace(p.eta, dn_);
    g_psi_ = op_->apply(p.psi);
    Evaluation e;
    e.r = assemble(p.eta, p.psi, g_psi_, X[2 * red_.K], g_, red_.K);
    check_parity(e.r, cfg_.parity_tol);
    e.R = red_.residual(e.r, p, k_, g_, eps_);
    e.norm = residual_norm(e.r);
    return e;
  }

  /// Forward differences around the point of the last evaluate().
  [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::VectorXd& X, const Eigen::VectorXd& R0) {
    const int K = red_.K;
    const SymmetricPair p = red_.unpack(X);
    const double c = X[2 * K];
    Eigen::MatrixXd J(red_.size(), red_.size());
    auto step = [&](double x) { return cfg_.fd_step * std::max(1.0, std::abs(x)); };
    auto column = [&](Eigen::Index col, const SymmetricPair& q, const PeriodicFunction& gq, double cq, double h) {
      const ResidualPair r = assemble(q.eta, q.psi, gq, cq, g_, K);
      J.col(col) = (red_.residual(r, q, k_, g_, eps_) - R0) / h;
    };
    for (int j = 1; j <= K; ++j) {
      const double h = step(X[j - 1]);
      SymmetricPair q = p;
      q.eta += PeriodicFunction::cosine(1, K, ModeIndex(j), h);
      const DirichletNeumann op(q.eta, dn_);
      column(j - 1, q, op.apply(q.psi), c, h);
    }
    // G(eta) is linear in psi, so the psi columns reuse the operator of the base point.
    for (int j = 1; j <= K; ++j) {
      const double h = step(X[K + j - 1]);
      const PeriodicFunction s = PeriodicFunction::sine(1, K, ModeIndex(j));
      SymmetricPair q = p;
      q.psi += h * s;
      column(K + j - 1, q, g_psi_ + h * op_->apply(s), c, h);
    }
    const double h = step(c);
    column(2 * K, p, g_psi_, c + h, h);
    return J;
  }

 private:
  int k_;
  double g_;
  double eps_;
  const StokesConfig& cfg_;
  DNConfig dn_;
  Reduced red_;
  std::optional<DirichletNeumann> op_;
  PeriodicFunction g_psi_;
};

void check_kg(int k, double g) {
  if (k < 1) throw InvalidArgument("stokes: k must be a positive integer");
  if (!(g > 0.0)) throw InvalidArgument("stokes: g must be positive");
}

SymmetricPair zero_pair(int K) { return {PeriodicFunction(1, K), PeriodicFunction(1, K)}; }

}  // namespace

ResidualPair f_map(const SymmetricPair& pair, double c, double g, const StokesConfig& cfg) {
  check_pair(pair);
  const int K = cfg.dn.K;
  const SymmetricPair p{pair.eta.resized(K), pair.psi.resized(K)};
  const PeriodicFunction g_psi = apply_dn(p.eta, p.psi, dn_config(cfg));
  ResidualPair r = assemble(p.eta, p.psi, g_psi, c, g, K);
  check_parity(r, cfg.parity_tol);
  return r;
}

double residual_norm(const ResidualPair& r) {
  const NormParams p{0.0, 1.0};
  return std::hypot(norm_sigma_s(r.f1, p), norm_sigma_s(r.f2, p));
}

ResidualPair apply_linearization(const SymmetricPair& pair, double c, double g) {
  return {c * partial_x(pair.eta, 0) + abs_d(pair.psi), c * partial_x(pair.psi, 0) - g * pair.eta};
}

SymmetricPair linearized_inverse_at_zero(const PeriodicFunction& f, const PeriodicFunction& g_rhs, int k, double g,
                                         double c, double range_tol) {
  check_kg(k, g);
  if (f.dim() != 1 || g_rhs.dim() != 1) throw DimensionMismatch("linearized_inverse_at_zero: d must be 1");
  const double ck = std::sqrt(g / k);
  if (std::abs(c - ck) > 1e-12 * ck)
    throw InvalidArgument("linearized_inverse_at_zero: c must equal sqrt(g/k)");
  const int K = std::max(f.trunc(), g_rhs.trunc());
  const double sk = std::sqrt(static_cast<double>(k));
  const double sg = std::sqrt(g);

  const double fk = sin_coeff(f, k);
  const double gk = cos_coeff(g_rhs, k);
  if (std::abs(sg * fk - sk * gk) > range_tol * std::max({1.0, std::abs(sg * fk), std::abs(sk * gk)}))
    throw NotInRange("linearized_inverse_at_zero: mode " + std::to_string(k) + " violates sqrt(g) f_k = sqrt(k) g_k");

  SymmetricPair out = zero_pair(K);
  for (int j = 1; j <= K; ++j) {
    const double fj = sin_coeff(f, j);
    const double gj = cos_coeff(g_rhs, j);
    double eta_j = 0.0;
    double psi_j = 0.0;
    if (j == k) {
      eta_j = -fj / std::sqrt(k * g);
    } else {
      const double q = sk / (k - j);
      eta_j = q * (sg * fj - sk * gj) / g;
      psi_j = q * (std::sqrt(k * g) * fj - j * gj) / (j * sg);
    }
    out.eta.set(ModeIndex(j), cplx(0.5 * eta_j, 0.0));
    out.psi.set(ModeIndex(j), cplx(0.0, -0.5 * psi_j));
  }
  return out;
}

SymmetricPair kernel_vector(int k, double g, int K) {
  check_kg(k, g);
  if (K < k) throw InvalidArgument("kernel_vector: truncation below the base mode");
  return {PeriodicFunction::cosine(1, K, ModeIndex(k), std::sqrt(static_cast<double>(k))),
          PeriodicFunction::sine(1, K, ModeIndex(k), std::sqrt(g))};
}

double kernel_projection(const SymmetricPair& pair, int k, double g) {
  check_kg(k, g);
  return (std::sqrt(static_cast<double>(k)) * cos_coeff(pair.eta, k) + std::sqrt(g) * sin_coeff(pair.psi, k)) /
         (k + g);
}

namespace {

struct JacobianCache {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool valid = false;
};

StokesSolution finish(const SymmetricPair& pair, double c, double epsilon, double res, int iterations) {
  StokesSolution s;
  s.pair = pair;
  s.c = c;
  s.epsilon = epsilon;
  s.residual_norm = res;
  s.newton_iterations = iterations;
  try {
    const SigmaEstimate est = estimate_sigma(pair.eta);
    s.sigma_estimate = std::max(0.0, est.sigma);
    s.sigma_fit_quality = est.fit_quality;
  } catch (const TooFewModes&) {
  }
  return s;
}

StokesSolution newton_impl(double epsilon, int k, double g, const std::optional<StokesSolution>& init,
                           const StokesConfig& cfg, JacobianCache& cache) {
  check_kg(k, g);
  const int K = cfg.dn.K;
  if (K < k) throw InvalidArgument("newton_solve: truncation below the base mode");
  if (std::abs(epsilon) > cfg.eps_cap)
    throw InvalidArgument("newton_solve: |epsilon| exceeds the configured cap");
  const double ck = std::sqrt(g / k);
  if (epsilon == 0.0) return finish(zero_pair(K), ck, 0.0, 0.0, 0);

  NewtonSystem sys(k, g, epsilon, cfg);
  Eigen::VectorXd X;
  if (init) {
    X = sys.reduced().pack({init->pair.eta.resized(K), init->pair.psi.resized(K)}, init->c);
  } else {
    const SymmetricPair u = kernel_vector(k, g, K);
    X = sys.reduced().pack({epsilon * u.eta, epsilon * u.psi}, ck);
  }
  // Shift along the kernel so that the projection constraint holds from the start.
  {
    const SymmetricPair p = sys.reduced().unpack(X);
    const double shift = epsilon - kernel_projection(p, k, g);
    X[k - 1] += shift * std::sqrt(static_cast<double>(k));
    X[K + k - 1] += shift * std::sqrt(g);
  }

  Evaluation e = sys.evaluate(X);
  int iterations = 0;
  int rising = 0;
  bool fresh = false;
  while (!(e.norm < cfg.stokes_tol && std::abs(e.R[2 * K]) < cfg.stokes_tol)) {
    if (iterations >= cfg.newton_max_iter)
      throw NewtonDivergence("newton_solve: no convergence in " + std::to_string(iterations) +
                             " steps, residual " + std::to_string(e.norm));
    if (!cache.valid) {
      cache.lu.compute(sys.jacobian(X, e.R));
      cache.valid = true;
      fresh = true;
    }
    const Eigen::VectorXd dX = cache.lu.solve(e.R);
    if (!dX.allFinite()) throw NewtonDivergence("newton_solve: singular Jacobian");
    X -= dX;
    ++iterations;
    const double before = e.norm;
    e = sys.evaluate(X);
    rising = e.norm >= before ? rising + 1 : 0;
    if (rising >= 3) throw NewtonDivergence("newton_solve: residual non-decreasing for 3 steps");
    // A reused Jacobian that no longer contracts fast is rebuilt at the current point.
    if (e.norm > cfg.jacobian_reuse_rate * before && !fresh) cache.valid = false;
    fresh = false;
  }
  // Converged: a few more chord steps while they still pay off, so branch data sit at the noise floor.
  for (int extra = 0; extra < cfg.polish_steps && cache.valid && e.norm > 0.0; ++extra) {
    const Eigen::VectorXd Y = X - cache.lu.solve(e.R);
    Evaluation f = sys.evaluate(Y);
    if (!(f.norm < e.norm)) break;
    X = Y;
    e = std::move(f);
  }
  const SymmetricPair p = sys.reduced().unpack(X);
  return finish(p, X[2 * K], epsilon, e.norm, iterations);
}

}  // namespace

StokesSolution newton_solve(double epsilon, int k, double g, const std::optional<StokesSolution>& init,
                            const StokesConfig& cfg) {
  JacobianCache cache;
  return newton_impl(epsilon, k, g, init, cfg, cache);
}

StokesBranch continue_branch(double eps_max, double eps_step, int k, double g, const StokesConfig& cfg) {
  check_kg(k, g);
  if (!(eps_step > 0.0)) throw InvalidArgument("continue_branch: eps_step must be positive");
  StokesBranch branch;
  branch.g = g;
  branch.k = k;
  branch.solutions.push_back(newton_solve(0.0, k, g, std::nullopt, cfg));
  // A negative eps_max marches the same way towards negative amplitudes.
  const double dir = eps_max < 0.0 ? -1.0 : 1.0;
  const auto n = static_cast<int>(std::floor(std::abs(eps_max) / eps_step + 1e-9));
  JacobianCache cache;
  for (int i = 1; i <= n; ++i) {
    const double eps = dir * i * eps_step;
    // Secant predictor from the last two points.
    std::optional<StokesSolution> init;
    if (branch.solutions.size() >= 2) {
      const StokesSolution& a = branch.solutions[branch.solutions.size() - 2];
      const StokesSolution& b = branch.solutions.back();
      const double t = (eps - b.epsilon) / (b.epsilon - a.epsilon);
      StokesSolution guess = b;
      guess.pair.eta += t * (b.pair.eta - a.pair.eta);
      guess.pair.psi += t * (b.pair.psi - a.pair.psi);
      guess.c += t * (b.c - a.c);
      init = guess;
    }
    try {
      branch.solutions.push_back(newton_impl(eps, k, g, init, cfg, cache));
    } catch (const Error& err) {
      branch.complete = false;
      branch.failure = "epsilon = " + std::to_string(eps) + ": " + err.what();
      break;
    }
  }
  return branch;
}

StokesBranch two_sided_branch(double eps_max, double eps_step, int k, double g, const StokesConfig& cfg) {
  StokesBranch up = continue_branch(std::abs(eps_max), eps_step, k, g, cfg);
  StokesBranch down = continue_branch(-std::abs(eps_max), eps_step, k, g, cfg);
  StokesBranch out;
  out.g = g;
  out.k = k;
  out.complete = up.complete && down.complete;
  out.failure = !down.complete ? down.failure : up.failure;
  out.solutions.assign(down.solutions.rbegin(), down.solutions.rend() - 1);
  out.solutions.insert(out.solutions.end(), up.solutions.begin(), up.solutions.end());
  return out;
}

SigmaEstimate estimate_sigma(const PeriodicFunction& u, double noise_floor) {
  std::vector<double> x;
  std::vector<double> y;
  u.for_each([&](const ModeIndex& m, cplx v) {
    if (m.is_zero() || !m.lex_nonnegative()) return;
    const double a = std::abs(v);
    if (a > noise_floor) {
      x.push_back(m.l1());
      y.push_back(std::log(a));
    }
  });
  if (x.size() < 6) throw TooFewModes("estimate_sigma: " + std::to_string(x.size()) + " modes above the noise floor");
  const SeriesFit fit = polynomial_fit(x, y, 1);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.coeffs[0] - fit.coeffs[1] * x[i];
    ss_res += r * r;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  SigmaEstimate out;
  out.sigma = -fit.coeffs[1];
  out.fit_quality = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  out.modes_used = static_cast<int>(x.size());
  return out;
}

SeriesFit polynomial_fit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  if (degree < 0) throw InvalidArgument("polynomial_fit: degree must be nonnegative");
  if (x.size() != y.size()) throw InvalidArgument("polynomial_fit: size mismatch");
  if (x.size() < static_cast<std::size_t>(degree) + 1) throw InvalidArgument("polynomial_fit: too few points");
  const auto n = static_cast<Eigen::Index>(x.size());
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  Eigen::MatrixXd A(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = x[static_cast<std::size_t>(i)] / scale;
    double p = 1.0;
    for (int j = 0; j <= degree; ++j, p *= t) A(i, j) = p;
    b[i] = y[static_cast<std::size_t>(i)];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const Eigen::VectorXd coef = svd.solve(b);

  SeriesFit out;
  out.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
  out.ill_conditioned = !(out.condition < 1e10);
  out.rms_residual = std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(n));
  double s = 1.0;
  for (int j = 0; j <= degree; ++j, s *= scale) out.coeffs.push_back(coef[j] / s);
  return out;
}

TaylorFit taylor_fit(const StokesBranch& branch, int order, int modes, int fit_degree) {
  if (order < 0) throw InvalidArgument("taylor_fit: order must be nonnegative");
  if (fit_degree < 0) fit_degree = order + 6;
  if (fit_degree < order) throw InvalidArgument("taylor_fit: fit degree below the order");
  std::vector<const StokesSolution*> pts;
  for (const StokesSolution& s : branch.solutions)
    if (s.epsilon != 0.0) pts.push_back(&s);

  TaylorFit out;
  const auto npts = static_cast<int>(pts.size());
  if (npts == 0) {
    // Trivial branch: nothing varies with epsilon.
    SeriesFit zero;
    zero.coeffs.assign(static_cast<std::size_t>(order) + 1, 0.0);
    zero.condition = 1.0;
    out.c = zero;
    out.c.coeffs[0] = branch.solutions.empty() ? 0.0 : branch.solutions.front().c;
    out.eta.assign(static_cast<std::size_t>(modes), zero);
    out.psi.assign(static_cast<std::size_t>(modes), zero);
    return out;
  }
  if (npts < order + 2) throw InvalidArgument("taylor_fit: needs at least order + 2 nonzero branch points");
  fit_degree = std::min(fit_degree, npts - 2);
  fit_degree = std::max(fit_degree, order);

  std::vector<double> x;
  for (const StokesSolution* s : pts) x.push_back(s->epsilon);
  auto fit = [&](auto&& value) {
    std::vector<double> y;
    for (const StokesSolution* s : pts) y.push_back(value(*s));
    SeriesFit f = polynomial_fit(x, y, fit_degree);
    f.coeffs.resize(static_cast<std::size_t>(order) + 1);
    return f;
  };
  out.c = fit([](const StokesSolution& s) { return s.c; });
  for (int j = 1; j <= modes; ++j) {
    out.eta.push_back(fit([j](const StokesSolution& s) { return cos_coeff(s.pair.eta, j); }));
    out.psi.push_back(fit([j](const StokesSolution& s) { return sin_coeff(s.pair.psi, j); }));
  }
  return out;
}

}  // namespace wwdn
