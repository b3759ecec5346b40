#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "wwdn/halfspace.hpp"
#include "wwdn/periodic.hpp"

namespace wwdn {

struct DNConfig {
  int K = 32;
  int d = 1;
  /// Depth weight of the half-cylinder norms; fixed at 1/2.
  double a = 0.5;
  double neumann_tol = 1e-12;
  int neumann_max_iter = 80;
  /// Relative size at which the geometric series for 1/d_y rho is truncated.
  double series_tol = 1e-15;
  int series_max_terms = 400;
  double merge_tol = 1e-12;
  double prune_tol = 1e-14;
  std::size_t term_cap = 512;
  /// Admissibility requires sup_x |(|D| eta)(x)| < eta_smallness_guard.
  double eta_smallness_guard = 1.0;
  /// Norm ||.||_{sigma,s,a} used for the fixed-point stopping rule. The residual
  /// Delta phi - F(eta)[phi] is measured two derivatives lower, in ||.||_{sigma,s-2,a}.
  double norm_sigma = 0.0;
  int norm_s = 2;
  /// Evaluate ||Delta phi - F(eta)[phi]|| after convergence (costs one extra F application).
  bool report_residual = true;

  [[nodiscard]] AlgebraOptions algebra() const { return {merge_tol, prune_tol, term_cap}; }
  [[nodiscard]] WeightedNormParams norm() const { return {norm_sigma, norm_s, a}; }
  [[nodiscard]] WeightedNormParams residual_norm() const { return {norm_sigma, std::max(0, norm_s - 2), a}; }
};

/// Coefficients of the flattened Laplacian
/// Delta phi = (alpha d_y^2 + beta Delta_x + gamma . grad d_y + delta d_y) phi.
struct FlatteningCoefficients {
  HalfCylinderFunction alpha;
  HalfCylinderFunction beta;
  HalfCylinderFunction delta;
  std::vector<HalfCylinderFunction> gamma;
  /// Number of terms kept in the series for 1/d_y rho - 1.
  int series_terms = 0;
  /// Size of the last series term kept; estimates the truncation residual of alpha and delta.
  double series_residual = 0.0;
};

/// sup over the collocation grid of |(|D| eta)(x)|.
[[nodiscard]] double guard_value(const PeriodicFunction& eta);

/// Throws GuardViolation or SeriesDivergence.
[[nodiscard]] FlatteningCoefficients flattening_coeffs(const PeriodicFunction& eta, const DNConfig& cfg);

/// F(eta)[phi] = alpha phi_yy + beta Delta_x phi + gamma . grad phi_y + delta phi_y.
[[nodiscard]] HalfCylinderFunction apply_F(const FlatteningCoefficients& coeffs, const HalfCylinderFunction& phi,
                                           const AlgebraOptions& opt = {});

struct SolveReport {
  int iterations = 0;
  /// ||v_{n+1}|| / ||v_n|| for successive corrections.
  std::vector<double> contraction_ratios;
  /// Last correction norm relative to ||Pi phi_0||.
  double last_increment = 0.0;
  /// ||Delta phi - F(eta)[phi]||_{sigma,s-2,a} / ||Pi phi_0||_{sigma,s,a}, when requested.
  std::optional<double> residual;
  /// |trace(phi) - psi|, max over coefficients.
  double trace_error = 0.0;
  double guard_margin = 0.0;
  int series_terms = 0;
  std::size_t phi_terms = 0;
  int phi_max_degree = 0;
};

struct TransformedSolution {
  HalfCylinderFunction phi;
  SolveReport report;
};

/// G(eta) for a fixed surface: the flattening coefficients are computed once and
/// reused for every Dirichlet datum.
class DirichletNeumann {
 public:
  DirichletNeumann(const PeriodicFunction& eta, DNConfig cfg);

  [[nodiscard]] const FlatteningCoefficients& coefficients() const { return coeffs_; }
  [[nodiscard]] const DNConfig& config() const { return cfg_; }
  [[nodiscard]] const PeriodicFunction& eta() const { return eta_; }
  [[nodiscard]] double guard_margin() const { return cfg_.eta_smallness_guard - guard_; }

  /// Solves Delta phi = F(eta)[phi], phi(., 0) = psi by the Neumann series
  /// u = sum_n (L F)^n L F phi_0, phi_0 = e^{y|D|} psi. Throws NoContraction.
  [[nodiscard]] TransformedSolution solve(const PeriodicFunction& psi) const;

  /// G(eta) psi = -grad eta . grad psi + Gamma[d_y Pi phi] + f(eta) Gamma[d_y Pi phi].
  [[nodiscard]] PeriodicFunction apply(const PeriodicFunction& psi, SolveReport* report = nullptr) const;

 private:
  DNConfig cfg_;
  PeriodicFunction eta_;
  double guard_ = 0.0;
  bool flat_ = false;
  FlatteningCoefficients coeffs_;
  int grid_n_ = 0;
  std::vector<GridValues> grad_eta_;
  /// (|grad eta|^2 - |D| eta) / (1 + |D| eta) on the collocation grid.
  GridValues f_eta_;
};

[[nodiscard]] TransformedSolution solve_transformed(const PeriodicFunction& eta, const PeriodicFunction& psi,
                                                    const DNConfig& cfg);
[[nodiscard]] PeriodicFunction apply_dn(const PeriodicFunction& eta, const PeriodicFunction& psi, const DNConfig& cfg,
                                        SolveReport* report = nullptr);

struct ManufacturedPair {
  PeriodicFunction psi;
  PeriodicFunction g_exact;
};

/// Phi(x, y) = sum_k c_k e^{|k| y} e^{i k.x} evaluated directly on y = eta(x):
/// psi = Phi(x, eta), g = Phi_y - grad eta . grad Phi, both projected onto |k|_inf <= K.
[[nodiscard]] ManufacturedPair dn_oracle_manufactured(const PeriodicFunction& harmonic_coeffs,
                                                      const PeriodicFunction& eta, int K);

struct VerifyRecord {
  /// (G psi1, psi2) - (psi1, G psi2)
  double self_adjointness = 0.0;
  /// (G psi1, psi1); must be >= 0
  double energy = 0.0;
  /// max(0, -energy)
  double positivity_violation = 0.0;
  /// max |tau G(eta) psi - G(tau eta) tau psi| over coefficients
  double translation = 0.0;
  /// max |G(eta^v) psi^v - (G(eta) psi)^v|
  double reflection = 0.0;
  /// max |G(eta + m) psi - G(eta) psi|
  double vertical = 0.0;
  /// mean of -|grad psi|^2/2 + (G psi + grad eta . grad psi)^2 / (2 (1 + |grad eta|^2))
  double bernoulli_mean = 0.0;
  /// max |G(eta) 1|
  double g_of_one = 0.0;
  /// mean of G(eta) psi1
  double mean_of_g = 0.0;

  [[nodiscard]] double worst() const;
};

[[nodiscard]] VerifyRecord verify_suite(const PeriodicFunction& eta, const PeriodicFunction& psi1,
                                        const PeriodicFunction& psi2, double theta, double m, const DNConfig& cfg);

/// Mean of the Bernoulli expression for given eta, psi and G(eta) psi.
[[nodiscard]] double bernoulli_mean(const PeriodicFunction& eta, const PeriodicFunction& psi,
                                    const PeriodicFunction& g_psi);

/// ||G psi||_{sigma,s-1} / (||psi||_{sigma,s} + ||eta||_{sigma,s} ||psi||_{sigma,s0+3/2})
[[nodiscard]] double dn_tame_ratio(const PeriodicFunction& eta, const PeriodicFunction& psi,
                                   const PeriodicFunction& g_psi, double sigma, double s, double s0);

}  // namespace wwdn
