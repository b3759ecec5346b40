#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wwdn/errors.hpp"
#include "wwdn/halfspace.hpp"

using namespace wwdn;

namespace {

HalfCylinderFunction single(int K, ModeIndex k, std::vector<ExpTerm> terms, int d = 1) {
  HalfCylinderFunction u(d, K);
  u.set_profile(k, ExpPolyProfile(std::move(terms)));
  return u;
}

HalfCylinderFunction random_hc(std::mt19937& rng, int d, int K, double mu_lo = 0.6, double mu_hi = 5.0, int pmax = 2,
                               int populated = -1) {
  std::uniform_real_distribution<double> mu(mu_lo, mu_hi);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> deg(0, pmax);
  HalfCylinderFunction u(d, K);
  for (std::size_t i = 0; i < u.layout().size(); ++i) {
    const ModeIndex k = u.layout().mode(i);
    if (!k.lex_nonnegative() || (populated >= 0 && k.linf() > populated)) continue;
    std::vector<ExpTerm> t;
    for (int j = 0; j < 2; ++j) t.push_back({mu(rng), deg(rng), cplx(n(rng), k.is_zero() ? 0.0 : n(rng))});
    u.set_profile(k, ExpPolyProfile(t));
  }
  return u;
}

double sample_max(const HalfCylinderFunction& a, const HalfCylinderFunction& b) {
  double m = 0.0;
  for (double y = 0.0; y >= -3.0; y -= 0.1)
    for (double x = 0.0; x < 6.28; x += 0.37) m = std::max(m, std::abs(a.eval(y, x, 0.4 * x) - b.eval(y, x, 0.4 * x)));
  return m;
}

}  // namespace

TEST(Lift, Examples) {
  const auto u = lift_harmonic(PeriodicFunction::cosine(1, 4, ModeIndex(2)));
  EXPECT_NEAR(u.eval(-0.5, 0.3), std::exp(-1.0) * std::cos(0.6), 1e-15);
  const auto one = lift_harmonic(PeriodicFunction::constant(1, 4, 1.0));
  EXPECT_EQ(one.constant(), cplx(1.0));
  EXPECT_EQ(one.term_count(), 0u);
  const auto w = lift_harmonic(PeriodicFunction::cosine(1, 4, ModeIndex(1)) + PeriodicFunction::constant(1, 4, 3.0));
  EXPECT_NEAR(w.eval(-1.0, 0.2), std::exp(-1.0) * std::cos(0.2) + 3.0, 1e-15);
}

TEST(Lift, TraceIsIdentityAndHarmonic) {
  std::mt19937 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int d = 1; d <= 2; ++d) {
    PeriodicFunction g(d, 4);
    for (std::size_t i = 0; i < g.layout().size(); ++i)
      if (g.layout().mode(i).lex_nonnegative()) g.set(g.layout().mode(i), {n(rng), n(rng)});
    const auto u = lift_harmonic(g);
    EXPECT_EQ((trace(u) - g).max_abs_coeff(), 0.0);
    // |k|^2 = mu^2 only up to rounding of the square root when d = 2.
    EXPECT_LE(laplacian_xy(u).max_term_size(), 1e-14 * u.max_term_size());
  }
}

TEST(Trace, Examples) {
  EXPECT_EQ(trace(single(2, ModeIndex(1), {{2.0, 1, 5.0}})).max_abs_coeff(), 0.0);
  EXPECT_NEAR(trace(single(2, ModeIndex(1), {{2.0, 0, 1.0}, {1.0, 0, -1.0}})).max_abs_coeff(), 0.0, 1e-16);
}

TEST(Derivatives, Examples) {
  const auto c = PeriodicFunction::cosine(1, 4, ModeIndex(3));
  const auto lhs = dy(lift_harmonic(c));
  EXPECT_LT(sample_max(lhs, 3.0 * lift_harmonic(c)), 1e-14);
  HalfCylinderFunction k(1, 2);
  k.set_constant(4.0);
  EXPECT_TRUE(dy(k).is_zero());
  const auto yey = single(2, ModeIndex(0), {{1.0, 1, 1.0}});
  const auto expect = single(2, ModeIndex(0), {{1.0, 0, 1.0}, {1.0, 1, 1.0}});
  EXPECT_LT(sample_max(dy(yey), expect), 1e-15);
  const auto sx = dx(lift_harmonic(PeriodicFunction::sine(1, 4, ModeIndex(2))), 0);
  EXPECT_LT(sample_max(sx, 2.0 * lift_harmonic(PeriodicFunction::cosine(1, 4, ModeIndex(2)))), 1e-14);
}

TEST(Multiply, Examples) {
  const auto u = single(2, ModeIndex(1), {{1.0, 0, 1.0}});
  const auto v = single(2, ModeIndex(-1), {{1.0, 0, 1.0}});
  // e^{y} e^{ix} * e^{y} e^{-ix}, with the conjugate parts both u and v are 2 e^y cos x.
  const auto uv = multiply(u, v);
  EXPECT_EQ(uv.constant(), cplx(0.0));
  ASSERT_EQ(uv.profile(ModeIndex(0)).size(), 1u);
  EXPECT_NEAR(uv.profile(ModeIndex(0)).terms()[0].mu, 2.0, 0);
  EXPECT_NEAR(uv.profile(ModeIndex(0)).terms()[0].c.real(), 2.0, 1e-15);

  HalfCylinderFunction one(1, 2);
  one.set_constant(1.0);
  std::mt19937 rng(3);
  const auto w = random_hc(rng, 1, 2);
  EXPECT_LT(sample_max(multiply(one, w), w), 1e-13);

  const auto a = single(3, ModeIndex(1), {{1.0, 1, 1.0}});
  const auto b = single(3, ModeIndex(1), {{2.0, 0, 1.0}});
  const auto ab = multiply(a, b);
  ASSERT_EQ(ab.profile(ModeIndex(2)).size(), 1u);
  const ExpTerm t = ab.profile(ModeIndex(2)).terms()[0];
  EXPECT_EQ(t.mu, 3.0);
  EXPECT_EQ(t.p, 1);
  EXPECT_EQ(t.c, cplx(1.0));
}

TEST(Multiply, AgreesWithPointwiseProduct) {
  std::mt19937 rng(5);
  for (int d = 1; d <= 2; ++d) {
    // Products are clipped to the larger truncation, so leave room for the full support.
    const auto u = random_hc(rng, d, 4, 0.6, 5.0, 2, 2);
    const auto v = random_hc(rng, d, 4, 0.6, 5.0, 2, 2);
    const auto uv = multiply(u, v);
    double worst = 0.0;
    double scale = 0.0;
    for (double y = 0.0; y >= -3.0; y -= 0.1) {
      for (double x = 0.0; x < 6.28; x += 0.5) {
        const double p = u.eval(y, x, 0.3 * x) * v.eval(y, x, 0.3 * x);
        worst = std::max(worst, std::abs(uv.eval(y, x, 0.3 * x) - p));
        scale = std::max(scale, std::abs(p));
      }
    }
    EXPECT_LE(worst, 1e-10 * scale);
  }
}

TEST(Multiply, DyIsDerivation) {
  std::mt19937 rng(8);
  const auto u = random_hc(rng, 1, 3);
  const auto v = random_hc(rng, 1, 3);
  const auto lhs = dy(multiply(u, v));
  const auto rhs = normalize(multiply(dy(u), v) + multiply(u, dy(v)));
  const auto diff = normalize(lhs - rhs);
  EXPECT_LE(diff.max_term_size(), 1e-12 * lhs.max_term_size());
}

TEST(Normalize, Examples) {
  ExpPolyProfile p({{1.0, 0, 1.0}, {1.0 + 1e-15, 0, 2.0}});
  p.normalize({});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.terms()[0].mu, 1.0);
  EXPECT_EQ(p.terms()[0].c, cplx(3.0));

  ExpPolyProfile q({{1.0, 0, 1.0}, {2.0, 0, 1e-20}, {3.0, 1, 0.5}});
  q.normalize({});
  EXPECT_EQ(q.size(), 2u);

  ExpPolyProfile r({{1.0, 0, 1.0}, {2.0, 1, 0.5}});
  ExpPolyProfile r2 = r;
  r2.normalize({});
  ExpPolyProfile r3 = r2;
  r3.normalize({});
  ASSERT_EQ(r2.size(), r3.size());
  for (std::size_t i = 0; i < r2.size(); ++i) EXPECT_EQ(r2.terms()[i].c, r3.terms()[i].c);
}

TEST(Normalize, TermCap) {
  std::vector<ExpTerm> t;
  for (int i = 0; i < 10; ++i) t.push_back({1.0 + i, 0, 1.0});
  ExpPolyProfile p(t);
  AlgebraOptions opt;
  opt.term_cap = 5;
  EXPECT_THROW(p.normalize(opt), TermCapExceeded);
}

TEST(WeightedNorm, Examples) {
  const auto u = single(2, ModeIndex(1), {{1.0, 0, 0.5}});  // e^{y} cos x
  EXPECT_NEAR(norm_sigma_s_a(u, {0.0, 0, 0.5}), 1.0 / std::sqrt(2.0), 1e-15);
  const auto e = single(2, ModeIndex(1), {{1.0, 0, 1.0}});
  // single complex mode e^{y} e^{ix} plus its conjugate: each mode contributes 1
  EXPECT_NEAR(norm_sigma_s_a(e, {0.0, 0, 0.5}), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(norm_sigma_s_a(HalfCylinderFunction(1, 2), {0.0, 0, 0.5}), 0.0);
  EXPECT_THROW((void)norm_sigma_s_a(single(2, ModeIndex(1), {{0.3, 0, 1.0}}), {0.0, 0, 0.5}), MuTooSmall);
}

TEST(WeightedNorm, AgreesWithQuadrature) {
  // Oracle: composite Simpson rule on [-40, 0] for a single mode with several terms.
  const ExpPolyProfile p({{0.8, 2, {1.0, 0.5}}, {1.7, 0, -2.0}, {2.3, 1, 0.25}});
  const double a = 0.5;
  const int n = 600000;
  const double L = 150.0;
  const double h = L / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double y = -L + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::norm(p.eval(y)) * std::exp(-2.0 * a * y);
  }
  s *= h / 3.0;
  EXPECT_NEAR(p.l2a_norm_sq(a), s, 1e-9 * s);
}

TEST(WeightedNorm, TraceInequality) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_hc(rng, 1, 4, 1.1, 5.0, 2);
    for (int s = 0; s <= 2; ++s) {
      const double lhs = norm_sigma_s(trace(u.projected()), {0.0, s + 0.5});
      const double rhs = norm_sigma_s_a(u, {0.0, s + 1, 0.5});
      EXPECT_LE(lhs, rhs);
    }
  }
}
