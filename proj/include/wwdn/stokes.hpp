#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wwdn/dirichlet_neumann.hpp"
#include "wwdn/periodic.hpp"

namespace wwdn {

/// (eta, psi) with eta even and mean-free, psi odd (d = 1).
struct SymmetricPair {
  PeriodicFunction eta;
  PeriodicFunction psi;
};

struct StokesConfig {
  DNConfig dn;
  double stokes_tol = 1e-11;
  int newton_max_iter = 25;
  /// Forward-difference step h = fd_step * max(1, |X_i|).
  double fd_step = 1e-7;
  /// Output parity of the residual map must hold to this level.
  double parity_tol = 1e-11;
  /// Relative tolerance of the range condition sqrt(g) f_k = sqrt(k) g_k.
  double range_tol = 1e-10;
  double eps_cap = 0.5;
  /// Keep the Jacobian between Newton steps (and branch points) while the residual drops by this factor per step.
  double jacobian_reuse_rate = 0.1;
  /// Extra Newton steps after convergence, kept only while the residual decreases.
  int polish_steps = 4;
};

struct StokesSolution {
  SymmetricPair pair;
  double c = 0.0;
  double epsilon = 0.0;
  double residual_norm = 0.0;
  double sigma_estimate = 0.0;
  double sigma_fit_quality = 0.0;
  int newton_iterations = 0;
};

struct StokesBranch {
  double g = 1.0;
  int k = 1;
  std::vector<StokesSolution> solutions;
  /// False when continuation stopped early; `failure` then holds the reason.
  bool complete = true;
  std::string failure;
};

struct ResidualPair {
  PeriodicFunction f1;  ///< c eta_x + G(eta) psi (odd)
  PeriodicFunction f2;  ///< c psi_x - g eta - psi_x^2/2 + (G psi + eta_x psi_x)^2 / (2(1 + eta_x^2)) (even, mean-free)
};

/// Traveling-wave residual. Throws SymmetryViolation if the output parities break beyond cfg.parity_tol.
[[nodiscard]] ResidualPair f_map(const SymmetricPair& pair, double c, double g, const StokesConfig& cfg);
/// ||(f1, f2)||_{H^{0,1}}
[[nodiscard]] double residual_norm(const ResidualPair& r);

/// The linearization at the origin: (c eta_x + |D| psi, -g eta + c psi_x).
[[nodiscard]] ResidualPair apply_linearization(const SymmetricPair& pair, double c, double g);

/// Solves the linearization at c = sqrt(g/k) for a right-hand side in its range; mode k gets
/// the particular solution eta_k = -f_k / sqrt(k g), psi_k = 0. Throws NotInRange.
[[nodiscard]] SymmetricPair linearized_inverse_at_zero(const PeriodicFunction& f, const PeriodicFunction& g_rhs, int k,
                                                       double g, double c, double range_tol = 1e-10);

/// u* = (sqrt(k) cos kx, sqrt(g) sin kx)
[[nodiscard]] SymmetricPair kernel_vector(int k, double g, int K);

/// <pair, u*> / ||u*||^2 with the mean-value inner product.
[[nodiscard]] double kernel_projection(const SymmetricPair& pair, int k, double g);

/// Solves f_map = 0 with kernel_projection = epsilon, Newton on the reduced symmetric coordinates.
/// Throws NewtonDivergence; GuardViolation and NoContraction propagate.
[[nodiscard]] StokesSolution newton_solve(double epsilon, int k, double g, const std::optional<StokesSolution>& init,
                                          const StokesConfig& cfg);

/// Marches epsilon = 0, step, 2 step, ... up to eps_max (downwards when eps_max < 0) with secant warm starts.
/// Stops at the first failure and returns the points computed so far.
[[nodiscard]] StokesBranch continue_branch(double eps_max, double eps_step, int k, double g, const StokesConfig& cfg);

/// Both directions, each solved independently, merged in increasing epsilon.
[[nodiscard]] StokesBranch two_sided_branch(double eps_max, double eps_step, int k, double g, const StokesConfig& cfg);

struct SigmaEstimate {
  double sigma = 0.0;
  /// Coefficient of determination of the log-linear fit.
  double fit_quality = 0.0;
  int modes_used = 0;
};

/// Least-squares slope of log|u_k| against |k|_1 over modes above 1e-14. Throws TooFewModes (< 6 modes).
[[nodiscard]] SigmaEstimate estimate_sigma(const PeriodicFunction& u, double noise_floor = 1e-14);

struct SeriesFit {
  /// Coefficients of eps^0 .. eps^order.
  std::vector<double> coeffs;
  double rms_residual = 0.0;
  double condition = 0.0;
  bool ill_conditioned = false;
};

struct TaylorFit {
  SeriesFit c;
  /// eta cos-coefficient fits for modes 1..modes, then psi sin-coefficients.
  std::vector<SeriesFit> eta;
  std::vector<SeriesFit> psi;
};

/// Least-squares polynomial fit of degree fit_degree (default order + 6, capped by the data) in eps over the nonzero-amplitude branch
/// points; returns coefficients through `order`. Requires at least fit_degree + 2 points.
[[nodiscard]] TaylorFit taylor_fit(const StokesBranch& branch, int order, int modes = 3, int fit_degree = -1);

/// Polynomial least squares y ~ sum_{n<=degree} a_n x^n; the fit is done in x / max|x| for conditioning.
[[nodiscard]] SeriesFit polynomial_fit(const std::vector<double>& x, const std::vector<double>& y, int degree);

}  // namespace wwdn
