#pragma once

#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "wwdn/modes.hpp"

namespace wwdn {

using cplx = std::complex<double>;

/// Real-valued trigonometric polynomial on T^d, stored as the full set of
/// complex Fourier coefficients with |k|_inf <= K. Conjugate symmetry
/// c(-k) = conj(c(k)) is maintained by every mutator.
class PeriodicFunction {
 public:
  PeriodicFunction() : PeriodicFunction(1, 0) {}
  PeriodicFunction(int d, int K);

  /// Builds from an arbitrary list of (mode, coefficient). Entries for k and -k
  /// are averaged into a conjugate-symmetric pair; throws InvalidArgument if the
  /// input pairs disagree by more than `tol` (absolute).
  static PeriodicFunction from_modes(int d, int K, const std::vector<std::pair<ModeIndex, cplx>>& modes,
                                     double tol = 1e-12);

  static PeriodicFunction constant(int d, int K, double value);
  /// amplitude * cos(k.x)
  static PeriodicFunction cosine(int d, int K, ModeIndex k, double amplitude = 1.0);
  /// amplitude * sin(k.x)
  static PeriodicFunction sine(int d, int K, ModeIndex k, double amplitude = 1.0);

  [[nodiscard]] int dim() const { return layout_.dim(); }
  [[nodiscard]] int trunc() const { return layout_.trunc(); }
  [[nodiscard]] const ModeLayout& layout() const { return layout_; }

  /// Coefficient at k; zero outside the stored block.
  [[nodiscard]] cplx coeff(const ModeIndex& k) const;
  /// Sets c(k) = value and c(-k) = conj(value). At k = 0 the imaginary part is dropped.
  void set(const ModeIndex& k, cplx value);
  /// Adds value at k and conj(value) at -k.
  void add(const ModeIndex& k, cplx value);

  [[nodiscard]] std::span<const cplx> coeffs() const { return coeffs_; }

  /// Calls f(mode, coefficient) for every stored mode.
  void for_each(const std::function<void(const ModeIndex&, cplx)>& f) const;

  /// Pointwise value at x (x[1] ignored for d = 1).
  [[nodiscard]] double eval(double x0, double x1 = 0.0) const;
  [[nodiscard]] double max_abs_coeff() const;

  /// Changes the truncation radius; modes beyond the new K are dropped.
  [[nodiscard]] PeriodicFunction resized(int K) const;

  PeriodicFunction& operator+=(const PeriodicFunction& o);
  PeriodicFunction& operator-=(const PeriodicFunction& o);
  PeriodicFunction& operator*=(double s);

  friend PeriodicFunction operator+(PeriodicFunction a, const PeriodicFunction& b) { return a += b; }
  friend PeriodicFunction operator-(PeriodicFunction a, const PeriodicFunction& b) { return a -= b; }
  friend PeriodicFunction operator*(double s, PeriodicFunction a) { return a *= s; }

 private:
  ModeLayout layout_;
  std::vector<cplx> coeffs_;
};

struct NormParams {
  double sigma = 0.0;
  double s = 0.0;
};

/// ( sum_k e^{2 sigma |k|_1} <k>^{2s} |u_k|^2 )^{1/2}
[[nodiscard]] double norm_sigma_s(const PeriodicFunction& u, const NormParams& p);

/// Mean-value inner product sum_k u_k conj(v_k) = (2 pi)^{-d} \int u v dx.
[[nodiscard]] double inner(const PeriodicFunction& u, const PeriodicFunction& v);

enum class Support {
  Clip,  ///< result keeps max(K_u, K_v) modes
  Full   ///< result keeps K_u + K_v modes, i.e. the exact product
};

/// Exact discrete convolution of the coefficient maps.
[[nodiscard]] PeriodicFunction product(const PeriodicFunction& u, const PeriodicFunction& v,
                                       Support support = Support::Clip);

/// Multiplies coefficient k by symbol(k). The symbol must satisfy
/// symbol(-k) = conj(symbol(k)) for the result to stay real.
[[nodiscard]] PeriodicFunction fourier_multiplier(const PeriodicFunction& u,
                                                  const std::function<cplx(const ModeIndex&)>& symbol);

[[nodiscard]] PeriodicFunction partial_x(const PeriodicFunction& u, int j);
/// |D| = (-Delta)^{1/2}
[[nodiscard]] PeriodicFunction abs_d(const PeriodicFunction& u);
[[nodiscard]] PeriodicFunction laplacian(const PeriodicFunction& u);
/// tau_theta u(x) = u(x + theta), theta applied componentwise.
[[nodiscard]] PeriodicFunction translate(const PeriodicFunction& u, double theta0, double theta1 = 0.0);
/// u^v(x) = u(-x)
[[nodiscard]] PeriodicFunction reflect(const PeriodicFunction& u);

/// Values on the uniform grid x_j = 2 pi j / N (row-major in (x0, x1) for d = 2).
struct GridValues {
  int d = 1;
  int N = 0;
  std::vector<double> values;

  [[nodiscard]] double& at(int i0, int i1 = 0) { return values[static_cast<std::size_t>(i0 * (d == 2 ? N : 1) + i1)]; }
  [[nodiscard]] double at(int i0, int i1 = 0) const {
    return values[static_cast<std::size_t>(i0 * (d == 2 ? N : 1) + i1)];
  }
};

/// Smallest collocation size used for pseudospectral products: N >= 4K + 1.
[[nodiscard]] int collocation_size(int K);

[[nodiscard]] GridValues to_grid(const PeriodicFunction& u, int N);
/// Discrete Fourier projection onto modes |k|_inf <= K (requires N >= 2K + 1).
[[nodiscard]] PeriodicFunction from_grid(const GridValues& g, int K);

/// Applies f pointwise on the collocation grid of the given size.
[[nodiscard]] GridValues map_grid(const GridValues& a, const std::function<double(double)>& f);

struct TameProductDiagnostic {
  double product_norm = 0.0;
  double bound = 0.0;
  /// ||uv||_{sigma,s} / (||u||_{sigma,s} ||v||_{sigma,s0} + ||u||_{sigma,s0} ||v||_{sigma,s}); 0 if both vanish
  double ratio = 0.0;
};

/// Requires s >= s0 > d/2.
[[nodiscard]] TameProductDiagnostic check_tame_product(const PeriodicFunction& u, const PeriodicFunction& v,
                                                       double sigma, double s, double s0);

}  // namespace wwdn
