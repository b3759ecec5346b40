#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wwdn/errors.hpp"
#include "wwdn/periodic.hpp"

using namespace wwdn;

namespace {

PeriodicFunction random_function(std::mt19937& rng, int d, int K, double decay = 0.3) {
  std::normal_distribution<double> n(0.0, 1.0);
  PeriodicFunction u(d, K);
  const ModeLayout& L = u.layout();
  for (std::size_t i = 0; i < L.size(); ++i) {
    const ModeIndex k = L.mode(i);
    if (!k.lex_nonnegative()) continue;
    const double w = std::exp(-decay * k.l1());
    u.set(k, cplx(n(rng), k.is_zero() ? 0.0 : n(rng)) * w);
  }
  return u;
}

// Oracle: straightforward loop over the closed-form weights.
double loop_norm(const PeriodicFunction& u, double sigma, double s) {
  double sum = 0.0;
  const ModeLayout& L = u.layout();
  for (std::size_t i = 0; i < L.size(); ++i) {
    const ModeIndex k = L.mode(i);
    const double br = std::max(1.0, std::sqrt(double(k[0] * k[0] + k[1] * k[1])));
    sum += std::exp(2 * sigma * (std::abs(k[0]) + std::abs(k[1]))) * std::pow(br, 2 * s) * std::norm(u.coeffs()[i]);
  }
  return std::sqrt(sum);
}

}  // namespace

TEST(ModeIndex, Accessors) {
  const ModeIndex k(3, -4);
  EXPECT_EQ(k.l1(), 7);
  EXPECT_DOUBLE_EQ(k.norm(), 5.0);
  EXPECT_DOUBLE_EQ(k.bracket(), 5.0);
  EXPECT_DOUBLE_EQ(ModeIndex(0).bracket(), 1.0);
  EXPECT_EQ(ModeIndex(-2).l1(), 2);
}

TEST(PeriodicFunction, ConjugateSymmetry) {
  PeriodicFunction u(2, 3);
  u.set(ModeIndex(1, -2), cplx(1.0, 2.0));
  EXPECT_EQ(u.coeff(ModeIndex(-1, 2)), cplx(1.0, -2.0));
  EXPECT_EQ(u.coeff(ModeIndex(5, 0)), cplx(0.0));
}

TEST(PeriodicFunction, FromModesRejectsNonReal) {
  std::vector<std::pair<ModeIndex, cplx>> modes{{ModeIndex(1), {1.0, 0.0}}, {ModeIndex(-1), {2.0, 0.0}}};
  EXPECT_THROW((void)PeriodicFunction::from_modes(1, 2, modes), InvalidArgument);
}

TEST(Norm, Examples) {
  EXPECT_EQ(norm_sigma_s(PeriodicFunction(1, 4), {0.0, 1.0}), 0.0);
  EXPECT_NEAR(norm_sigma_s(PeriodicFunction::cosine(1, 4, ModeIndex(1)), {0.0, 1.0}), 1.0 / std::sqrt(2.0), 1e-15);
  const auto c2 = PeriodicFunction::cosine(1, 4, ModeIndex(2));
  EXPECT_NEAR(norm_sigma_s(c2, {std::log(2.0), 0.0}), std::sqrt(8.0), 1e-14);
  EXPECT_NEAR(norm_sigma_s(c2, {std::log(2.0), 0.0}), loop_norm(c2, std::log(2.0), 0.0), 1e-14);
}

TEST(Norm, MatchesLoopOracle) {
  std::mt19937 rng(7);
  for (int d = 1; d <= 2; ++d) {
    const auto u = random_function(rng, d, 6);
    for (double sigma : {0.0, 0.2}) {
      for (double s : {0.0, 1.5, 3.0}) EXPECT_NEAR(norm_sigma_s(u, {sigma, s}), loop_norm(u, sigma, s), 1e-12 * loop_norm(u, sigma, s));
    }
  }
}

TEST(Norm, ParsevalAgainstQuadrature) {
  std::mt19937 rng(3);
  for (int d = 1; d <= 2; ++d) {
    const int K = 8;
    const auto u = random_function(rng, d, K);
    const int N = 4 * K + 2;
    const GridValues g = to_grid(u, N);
    double sum = 0.0;
    for (double v : g.values) sum += v * v;
    const double l2 = std::sqrt(sum / g.values.size());
    EXPECT_NEAR(norm_sigma_s(u, {0.0, 0.0}), l2, 1e-12 * l2);
  }
}

TEST(Norm, MonotoneInSigmaAndS) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_function(rng, 1 + trial % 2, 5);
    EXPECT_LE(norm_sigma_s(u, {0.1, 1.0}), norm_sigma_s(u, {0.2, 1.0}));
    EXPECT_LE(norm_sigma_s(u, {0.1, 1.0}), norm_sigma_s(u, {0.1, 2.0}));
  }
}

TEST(Product, Examples) {
  const auto c = PeriodicFunction::cosine(1, 4, ModeIndex(1));
  const auto s = PeriodicFunction::sine(1, 4, ModeIndex(1));
  const auto one = PeriodicFunction::constant(1, 4, 1.0);
  EXPECT_LT((product(one, c) - c).max_abs_coeff(), 1e-15);
  const auto cc = product(c, c);
  EXPECT_NEAR(cc.coeff(ModeIndex(0)).real(), 0.5, 1e-15);
  EXPECT_NEAR(cc.coeff(ModeIndex(2)).real(), 0.25, 1e-15);
  const auto cs = product(c, s);
  EXPECT_LT((cs - PeriodicFunction::sine(1, 4, ModeIndex(2), 0.5)).max_abs_coeff(), 1e-15);
}

TEST(Product, CommutativeAssociativeFullSupport) {
  std::mt19937 rng(5);
  const auto u = random_function(rng, 2, 3);
  const auto v = random_function(rng, 2, 2);
  const auto w = random_function(rng, 2, 4);
  EXPECT_LT((product(u, v, Support::Full) - product(v, u, Support::Full)).max_abs_coeff(), 1e-14);
  const auto a = product(product(u, v, Support::Full), w, Support::Full);
  const auto b = product(u, product(v, w, Support::Full), Support::Full);
  EXPECT_LT((a - b).max_abs_coeff(), 1e-13);
}

TEST(Product, AgreesWithGridProduct) {
  std::mt19937 rng(9);
  const auto u = random_function(rng, 1, 6);
  const auto v = random_function(rng, 1, 6);
  const auto exact = product(u, v, Support::Full);
  const int N = collocation_size(12);
  GridValues gu = to_grid(u, N);
  const GridValues gv = to_grid(v, N);
  for (std::size_t i = 0; i < gu.values.size(); ++i) gu.values[i] *= gv.values[i];
  EXPECT_LT((from_grid(gu, 12) - exact).max_abs_coeff(), 1e-14);
}

TEST(Product, DimensionMismatch) {
  EXPECT_THROW((void)product(PeriodicFunction(1, 2), PeriodicFunction(2, 2)), DimensionMismatch);
}

TEST(Multiplier, Examples) {
  const auto c3 = PeriodicFunction::cosine(1, 5, ModeIndex(3));
  EXPECT_LT((abs_d(c3) - 3.0 * c3).max_abs_coeff(), 1e-15);
  const auto s1 = PeriodicFunction::sine(1, 5, ModeIndex(1));
  EXPECT_LT((partial_x(s1, 0) - PeriodicFunction::cosine(1, 5, ModeIndex(1))).max_abs_coeff(), 1e-15);
  EXPECT_EQ(abs_d(PeriodicFunction::constant(1, 5, 2.0)).max_abs_coeff(), 0.0);
}

TEST(Multiplier, Composition) {
  std::mt19937 rng(13);
  const auto u = random_function(rng, 2, 4);
  auto a = [](const ModeIndex& k) { return cplx(1.0 + k[0] * k[0], 0.0); };
  auto b = [](const ModeIndex& k) { return cplx(0.0, k[1]); };
  const auto lhs = fourier_multiplier(fourier_multiplier(u, a), b);
  const auto rhs = fourier_multiplier(u, [&](const ModeIndex& k) { return a(k) * b(k); });
  EXPECT_LE((lhs - rhs).max_abs_coeff(), 1e-14 * lhs.max_abs_coeff());
  EXPECT_LT((laplacian(u) + fourier_multiplier(u, [](const ModeIndex& k) { return cplx(k.norm() * k.norm()); }))
                .max_abs_coeff(),
            1e-13);
}

TEST(Grid, TranslateAndReflect) {
  std::mt19937 rng(17);
  const auto u = random_function(rng, 1, 5);
  const auto t = translate(u, 0.3);
  const auto r = reflect(u);
  for (double x : {0.0, 0.7, 2.5}) {
    EXPECT_NEAR(t.eval(x), u.eval(x + 0.3), 1e-13);
    EXPECT_NEAR(r.eval(x), u.eval(-x), 1e-13);
  }
  const auto g = to_grid(u, 22);
  for (int j = 0; j < 22; ++j) EXPECT_NEAR(g.at(j), u.eval(2 * M_PI * j / 22), 1e-13);
}

TEST(Tame, Examples) {
  EXPECT_EQ(check_tame_product(PeriodicFunction(1, 3), PeriodicFunction(1, 3), 0.1, 3, 1).ratio, 0.0);
  const auto one = PeriodicFunction::constant(1, 3, 1.0);
  const auto c = PeriodicFunction::cosine(1, 3, ModeIndex(1));
  EXPECT_LE(check_tame_product(one, c, 0.2, 2.0, 1.0).ratio, 1.0);
  EXPECT_THROW((void)check_tame_product(one, c, 0.2, 2.0, 0.5), InvalidArgument);
}

TEST(Tame, RandomFamilyBounded) {
  std::mt19937 rng(21);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto u = random_function(rng, 1, 8, 0.2);
    const auto v = random_function(rng, 1, 8, 0.2);
    worst = std::max(worst, check_tame_product(u, v, 0.1, 3.0, 1.0).ratio);
  }
  RecordProperty("max_ratio", std::to_string(worst));
  EXPECT_LE(worst, 2.0);
}
