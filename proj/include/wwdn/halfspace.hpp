#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "wwdn/modes.hpp"
#include "wwdn/periodic.hpp"

namespace wwdn {

/// c * y^p * e^{mu y}, y <= 0.
struct ExpTerm {
  double mu = 0.0;
  int p = 0;
  cplx c{};
};

/// Tolerances controlling the exact exponential-polynomial algebra.
struct AlgebraOptions {
  /// Rates closer than merge_tol * max(1, mu) at equal degree are merged.
  double merge_tol = 1e-12;
  /// Terms whose size is below prune_tol times the largest term size are dropped.
  double prune_tol = 1e-14;
  /// Hard limit on the number of terms in one profile.
  std::size_t term_cap = 512;
};

/// sup_{y <= 0} |c y^p e^{mu y}| (infinite when mu = 0 and p > 0).
[[nodiscard]] double term_size(const ExpTerm& t);

/// Finite sum of terms c y^p e^{mu y} with mu >= 0; the pure constant (mu = 0, p = 0)
/// is not allowed here and lives in HalfCylinderFunction::constant().
class ExpPolyProfile {
 public:
  ExpPolyProfile() = default;
  explicit ExpPolyProfile(std::vector<ExpTerm> terms);

  [[nodiscard]] std::span<const ExpTerm> terms() const { return terms_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }

  void push(const ExpTerm& t) { terms_.push_back(t); }
  void append(const ExpPolyProfile& o);
  void scale(cplx s);

  [[nodiscard]] cplx eval(double y) const;
  /// Value at y = 0: sum of the coefficients of degree-0 terms.
  [[nodiscard]] cplx at_zero() const;
  [[nodiscard]] ExpPolyProfile derivative() const;
  [[nodiscard]] ExpPolyProfile conj() const;
  [[nodiscard]] double min_rate() const;
  [[nodiscard]] int max_degree() const;
  [[nodiscard]] double max_term_size() const;

  /// Merge equal (mu, p) within merge_tol, then drop terms below
  /// prune_tol * max(reference, own largest size). Throws TermCapExceeded.
  void normalize(const AlgebraOptions& opt, double reference_size = 0.0);

  /// int_{-inf}^0 |profile(y)|^2 e^{-2 a y} dy in closed form. Throws MuTooSmall when some rate is <= a.
  [[nodiscard]] double l2a_norm_sq(double a) const;

 private:
  std::vector<ExpTerm> terms_;
};

/// Function on T^d x (-inf, 0] of the form constant + sum_k profile_k(y) e^{i k.x}.
class HalfCylinderFunction {
 public:
  HalfCylinderFunction() : HalfCylinderFunction(1, 0) {}
  HalfCylinderFunction(int d, int K);

  [[nodiscard]] int dim() const { return layout_.dim(); }
  [[nodiscard]] int trunc() const { return layout_.trunc(); }
  [[nodiscard]] const ModeLayout& layout() const { return layout_; }

  [[nodiscard]] cplx constant() const { return constant_; }
  void set_constant(cplx c) { constant_ = c; }

  [[nodiscard]] const ExpPolyProfile& profile(const ModeIndex& k) const;
  /// Sets profile at k and its conjugate at -k. At k = 0 the profile must be real.
  void set_profile(const ModeIndex& k, ExpPolyProfile p);

  [[nodiscard]] std::span<const ExpPolyProfile> profiles() const { return profiles_; }
  [[nodiscard]] std::size_t term_count() const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] double max_term_size() const;
  [[nodiscard]] int max_degree() const;

  /// Pi u: the same function without its constant part.
  [[nodiscard]] HalfCylinderFunction projected() const;
  [[nodiscard]] double eval(double y, double x0, double x1 = 0.0) const;

  HalfCylinderFunction& operator+=(const HalfCylinderFunction& o);
  HalfCylinderFunction& operator-=(const HalfCylinderFunction& o);
  HalfCylinderFunction& operator*=(double s);
  friend HalfCylinderFunction operator+(HalfCylinderFunction a, const HalfCylinderFunction& b) { return a += b; }
  friend HalfCylinderFunction operator-(HalfCylinderFunction a, const HalfCylinderFunction& b) { return a -= b; }
  friend HalfCylinderFunction operator*(double s, HalfCylinderFunction a) { return a *= s; }

  /// Profile-wise normalize with a global pruning reference (largest term of the function).
  void normalize(const AlgebraOptions& opt);

 private:
  friend class ProductAccumulator;
  ModeLayout layout_;
  std::vector<ExpPolyProfile> profiles_;
  cplx constant_{};
};

/// e^{y|D|} g: mode k != 0 gets c e^{|k| y}; the mean value becomes the constant part.
[[nodiscard]] HalfCylinderFunction lift_harmonic(const PeriodicFunction& g);
/// u(., 0), including the constant part.
[[nodiscard]] PeriodicFunction trace(const HalfCylinderFunction& u);
[[nodiscard]] HalfCylinderFunction dy(const HalfCylinderFunction& u);
[[nodiscard]] HalfCylinderFunction dx(const HalfCylinderFunction& u, int j);
/// Sum over x-directions of second derivatives (the horizontal Laplacian).
[[nodiscard]] HalfCylinderFunction laplacian_x(const HalfCylinderFunction& u);
/// Delta_{x,y} u
[[nodiscard]] HalfCylinderFunction laplacian_xy(const HalfCylinderFunction& u, const AlgebraOptions& opt = {});
[[nodiscard]] HalfCylinderFunction multiply(const HalfCylinderFunction& u, const HalfCylinderFunction& v,
                                            const AlgebraOptions& opt = {});
[[nodiscard]] HalfCylinderFunction normalize(const HalfCylinderFunction& u, const AlgebraOptions& opt = {});

/// Accumulates several products sum_i s_i u_i v_i into one function and normalizes once.
class ProductAccumulator {
 public:
  ProductAccumulator(int d, int K, double merge_tol = 1e-12);
  void add_product(const HalfCylinderFunction& u, const HalfCylinderFunction& v, double scale = 1.0);
  void add(const HalfCylinderFunction& u, double scale = 1.0);
  [[nodiscard]] HalfCylinderFunction finish(const AlgebraOptions& opt);

 private:
  /// Terms of one mode keyed by exact (p, mu); near-equal rates are merged in finish().
  struct Bucket {
    std::vector<ExpTerm> terms;
    std::vector<std::int32_t> slots;
    void insert(double mu, int p, cplx c);
  };
  void add_profiles(const HalfCylinderFunction& u, cplx scale);

  ModeLayout layout_;
  double merge_tol_;
  std::vector<Bucket> buckets_;
  cplx constant_{};
};

struct WeightedNormParams {
  double sigma = 0.0;
  int s = 0;
  double a = 0.5;
};

/// ||Pi u||_{sigma,s,a}: sum_{j<=s} sum_k e^{2 sigma |k|_1} <k>^{2(s-j)} ||d_y^j u_k||^2_{L^{2,a}},
/// evaluated in closed form. The constant part is excluded (see norm_with_constant).
[[nodiscard]] double norm_sigma_s_a(const HalfCylinderFunction& u, const WeightedNormParams& p);
/// ||Pi u||_{sigma,s,a} + |u - Pi u|
[[nodiscard]] double norm_with_constant(const HalfCylinderFunction& u, const WeightedNormParams& p);

}  // namespace wwdn
