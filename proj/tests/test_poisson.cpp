#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "wwdn/errors.hpp"
#include "wwdn/poisson.hpp"

using namespace wwdn;

namespace {

// Oracle: adaptive-free composite Simpson on [lo, hi].
double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

double profile_gap(const ExpPolyProfile& p, const std::function<double(double)>& f) {
  double m = 0.0;
  for (double y = 0.0; y >= -6.0; y -= 0.25) m = std::max(m, std::abs(p.eval(y) - f(y)));
  return m;
}

HalfCylinderFunction random_source(std::mt19937& rng, int d, int K) {
  std::uniform_real_distribution<double> mu(0.6, 5.0);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> deg(0, 2);
  HalfCylinderFunction g(d, K);
  for (std::size_t i = 0; i < g.layout().size(); ++i) {
    const ModeIndex k = g.layout().mode(i);
    if (!k.lex_nonnegative()) continue;
    std::vector<ExpTerm> t;
    for (int j = 0; j < 3; ++j) t.push_back({mu(rng), deg(rng), cplx(n(rng), k.is_zero() ? 0.0 : n(rng))});
    g.set_profile(k, ExpPolyProfile(t));
  }
  return g;
}

}  // namespace

TEST(TLambda, Examples) {
  const ExpPolyProfile e2({{2.0, 0, 1.0}});
  EXPECT_LT(profile_gap(t_lambda(e2, 3.0), [](double y) { return std::exp(2 * y) / 5.0; }), 1e-15);
  EXPECT_LT(profile_gap(t_lambda(ExpPolyProfile({{1.0, 0, 1.0}}), 0.0), [](double y) { return std::exp(y); }), 1e-15);
  const ExpPolyProfile ze({{1.0, 1, 1.0}});
  const auto t = t_lambda(ze, 1.0);
  EXPECT_LT(profile_gap(t, [](double y) { return (y / 2 - 0.25) * std::exp(y); }), 1e-15);
  for (double y : {-2.0, -1.0, 0.0}) {
    const double q = simpson([&](double z) { return std::exp(1.0 * (z - y)) * z * std::exp(z); }, -50.0, y);
    EXPECT_NEAR(t.eval(y).real(), q, 1e-10);
  }
  EXPECT_THROW((void)t_lambda(ExpPolyProfile({{0.0, 1, 1.0}}), 0.0), DivergentIntegral);
}

TEST(TTilde, Examples) {
  EXPECT_LT(profile_gap(t_tilde_lambda(ExpPolyProfile({{1.0, 0, 1.0}}), 3.0),
                        [](double y) { return (std::exp(y) - std::exp(3 * y)) / 2.0; }),
            1e-15);
  EXPECT_LT(profile_gap(t_tilde_lambda(ExpPolyProfile({{2.0, 0, 1.0}}), 2.0),
                        [](double y) { return -y * std::exp(2 * y); }),
            1e-15);
  const auto t = t_tilde_lambda(ExpPolyProfile({{4.0, 0, 1.0}}), 2.0);
  EXPECT_LT(profile_gap(t, [](double y) { return (std::exp(2 * y) - std::exp(4 * y)) / 2.0; }), 1e-15);
  for (double y : {-2.0, -1.0, -0.3}) {
    const double q = simpson([&](double z) { return std::exp(2.0 * (y - z)) * std::exp(4 * z); }, y, 0.0);
    EXPECT_NEAR(t.eval(y).real(), q, 1e-12);
  }
}

TEST(TTilde, HigherDegreeAgainstQuadrature) {
  const ExpPolyProfile p({{1.5, 2, 1.0}, {3.0, 1, -0.5}, {2.0, 3, 0.25}});
  const auto t = t_tilde_lambda(p, 2.0);
  for (double y : {-3.0, -1.2, -0.1}) {
    const double q = simpson([&](double z) { return std::exp(2.0 * (y - z)) * p.eval(z).real(); }, y, 0.0);
    EXPECT_NEAR(t.eval(y).real(), q, 1e-11);
  }
}

TEST(ModeZero, Examples) {
  auto s = solve_mode_zero(ExpPolyProfile({{1.0, 0, 1.0}}));
  EXPECT_LT(profile_gap(s.profile, [](double y) { return std::exp(y); }), 1e-15);
  EXPECT_NEAR(s.constant.real(), -1.0, 1e-15);
  s = solve_mode_zero(ExpPolyProfile{});
  EXPECT_TRUE(s.profile.empty());
  EXPECT_EQ(s.constant, cplx(0.0));
  s = solve_mode_zero(ExpPolyProfile({{2.0, 0, 1.0}}));
  EXPECT_LT(profile_gap(s.profile, [](double y) { return std::exp(2 * y) / 4; }), 1e-15);
  EXPECT_NEAR(s.constant.real(), -0.25, 1e-15);
}

TEST(SolveMode, Examples) {
  EXPECT_LT(profile_gap(solve_mode(ModeIndex(1), ExpPolyProfile({{2.0, 0, 1.0}})),
                        [](double y) { return (std::exp(2 * y) - std::exp(y)) / 3.0; }),
            1e-15);
  EXPECT_TRUE(solve_mode(ModeIndex(1), ExpPolyProfile{}).empty());
  EXPECT_LT(profile_gap(solve_mode(ModeIndex(2), ExpPolyProfile({{4.0, 0, 1.0}})),
                        [](double y) { return (std::exp(4 * y) - std::exp(2 * y)) / 12.0; }),
            1e-15);
  EXPECT_THROW((void)solve_mode(ModeIndex(0), ExpPolyProfile({{1.0, 0, 1.0}})), InvalidArgument);
}

TEST(SolvePoisson, Examples) {
  HalfCylinderFunction g(1, 2);
  g.set_profile(ModeIndex(1), ExpPolyProfile({{2.0, 0, 1.0}}));
  const auto u = solve_poisson(g);
  for (double y : {0.0, -0.5, -2.0})
    for (double x : {0.0, 1.0})
      EXPECT_NEAR(u.eval(y, x), (std::exp(2 * y) - std::exp(y)) / 3.0 * 2 * std::cos(x), 1e-15);
  EXPECT_TRUE(solve_poisson(HalfCylinderFunction(1, 2)).is_zero());
  HalfCylinderFunction g0(1, 2);
  g0.set_profile(ModeIndex(0), ExpPolyProfile({{1.0, 0, 1.0}}));
  const auto u0 = solve_poisson(g0);
  EXPECT_NEAR(u0.eval(-1.0, 0.0), std::exp(-1.0) - 1.0, 1e-15);
  HalfCylinderFunction c(1, 2);
  c.set_constant(1.0);
  EXPECT_THROW((void)solve_poisson(c), NonzeroConstantSource);
}

TEST(SolvePoisson, ExactResidualDirichletAndDecay) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const auto g = random_source(rng, d, 3);
    const auto u = solve_poisson(g);
    const auto lap = laplacian_xy(u);
    const auto res = normalize(lap - g);
    // Relative to the operands of the subtraction: near-resonant rates (mu close to |k|)
    // legitimately produce large cancelling terms in u.
    const double scale = std::max(g.max_term_size(), u.max_term_size());
    EXPECT_LE(res.max_term_size(), 1e-11 * scale);
    const auto tr = trace(u);
    EXPECT_LE(tr.max_abs_coeff(), 1e-11 * scale);
    for (const auto& p : u.profiles())
      for (const auto& t : p.terms()) EXPECT_GT(t.mu, 0.0);
    const auto uy = dy(u);
    for (const auto& p : uy.profiles())
      for (const auto& t : p.terms()) EXPECT_GT(t.mu, 0.0);
  }
}

TEST(TLambda, OperatorBound) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> mu(0.6, 5.0);
  std::uniform_real_distribution<double> lam(0.0, 6.0);
  std::normal_distribution<double> n(0.0, 1.0);
  const double a = 0.5;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ExpTerm> t;
    for (int j = 0; j < 3; ++j) t.push_back({mu(rng), trial % 3, {n(rng), n(rng)}});
    const ExpPolyProfile p(t);
    const double l = lam(rng);
    const double lhs = std::sqrt(t_lambda(p, l).l2a_norm_sq(a));
    const double rhs = std::sqrt(p.l2a_norm_sq(a)) / (l + a);
    EXPECT_LE(lhs, rhs * (1.0 + 1e-12));
  }
}
