#include "wwdn/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wwdn/errors.hpp"

namespace wwdn {

namespace {

void require_dim(int d) {
  if (d != 1 && d != 2) throw InvalidArgument("dimension must be 1 or 2");
}

// Twiddle table w[j * m + q] = exp(sign * i * 2 pi * j * (q - K) / N), q = 0..2K.
std::vector<cplx> twiddles(int N, int K, double sign) {
  const int m = 2 * K + 1;
  std::vector<cplx> w(static_cast<std::size_t>(N) * static_cast<std::size_t>(m));
  for (int j = 0; j < N; ++j) {
    for (int q = 0; q < m; ++q) {
      // Reduce the phase index modulo N before converting to an angle.
      long long r = (static_cast<long long>(j) * (q - K)) % N;
      if (r < 0) r += N;
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(r) / N;
      w[static_cast<std::size_t>(j) * m + q] = {std::cos(ang), std::sin(ang)};
    }
  }
  return w;
}

}  // namespace

PeriodicFunction::PeriodicFunction(int d, int K) {
  require_dim(d);
  if (K < 0) throw InvalidArgument("truncation K must be >= 0");
  layout_ = ModeLayout(d, K);
  coeffs_.assign(layout_.size(), cplx{});
}

PeriodicFunction PeriodicFunction::from_modes(int d, int K, const std::vector<std::pair<ModeIndex, cplx>>& modes,
                                              double tol) {
  PeriodicFunction raw(d, K);
  std::vector<bool> seen(raw.coeffs_.size(), false);
  for (const auto& [k, c] : modes) {
    if (!raw.layout_.contains(k)) throw InvalidArgument("mode outside truncation block");
    const auto i = raw.layout_.index(k);
    raw.coeffs_[i] += c;
    seen[i] = true;
  }
  PeriodicFunction out(d, K);
  for (std::size_t i = 0; i < raw.coeffs_.size(); ++i) {
    const ModeIndex k = raw.layout_.mode(i);
    if (!k.lex_nonnegative()) continue;
    const auto j = raw.layout_.index(-k);
    cplx a = raw.coeffs_[i];
    cplx b = std::conj(raw.coeffs_[j]);
    if (seen[i] && seen[j]) {
      if (std::abs(a - b) > tol) throw InvalidArgument("coefficients violate conjugate symmetry");
      a = 0.5 * (a + b);
    } else if (seen[j]) {
      a = b;
    }
    if (k.is_zero() && std::abs(a.imag()) > tol) throw InvalidArgument("mean value must be real");
    out.set(k, a);
  }
  return out;
}

PeriodicFunction PeriodicFunction::constant(int d, int K, double value) {
  PeriodicFunction f(d, K);
  f.set(ModeIndex{}, value);
  return f;
}

PeriodicFunction PeriodicFunction::cosine(int d, int K, ModeIndex k, double amplitude) {
  PeriodicFunction f(d, K);
  if (k.is_zero()) {
    f.set(k, amplitude);
  } else {
    f.add(k, 0.5 * amplitude);
  }
  return f;
}

PeriodicFunction PeriodicFunction::sine(int d, int K, ModeIndex k, double amplitude) {
  PeriodicFunction f(d, K);
  if (!k.is_zero()) f.add(k, cplx(0.0, -0.5 * amplitude));
  return f;
}

cplx PeriodicFunction::coeff(const ModeIndex& k) const {
  if (!layout_.contains(k)) return {};
  return coeffs_[layout_.index(k)];
}

void PeriodicFunction::set(const ModeIndex& k, cplx value) {
  if (!layout_.contains(k)) throw InvalidArgument("mode outside truncation block");
  if (k.is_zero()) {
    coeffs_[layout_.index(k)] = value.real();
    return;
  }
  coeffs_[layout_.index(k)] = value;
  coeffs_[layout_.index(-k)] = std::conj(value);
}

void PeriodicFunction::add(const ModeIndex& k, cplx value) {
  if (!layout_.contains(k)) throw InvalidArgument("mode outside truncation block");
  if (k.is_zero()) {
    coeffs_[layout_.index(k)] += value.real();
    return;
  }
  coeffs_[layout_.index(k)] += value;
  coeffs_[layout_.index(-k)] += std::conj(value);
}

void PeriodicFunction::for_each(const std::function<void(const ModeIndex&, cplx)>& f) const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) f(layout_.mode(i), coeffs_[i]);
}

double PeriodicFunction::eval(double x0, double x1) const {
  cplx sum{};
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == cplx{}) continue;
    const ModeIndex k = layout_.mode(i);
    const double ph = k.k[0] * x0 + k.k[1] * x1;
    sum += coeffs_[i] * cplx(std::cos(ph), std::sin(ph));
  }
  return sum.real();
}

double PeriodicFunction::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

PeriodicFunction PeriodicFunction::resized(int K) const {
  PeriodicFunction out(dim(), K);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const ModeIndex k = layout_.mode(i);
    if (out.layout_.contains(k)) out.coeffs_[out.layout_.index(k)] = coeffs_[i];
  }
  return out;
}

PeriodicFunction& PeriodicFunction::operator+=(const PeriodicFunction& o) {
  if (o.dim() != dim()) throw DimensionMismatch("PeriodicFunction dimensions differ");
  if (o.trunc() > trunc()) *this = resized(o.trunc());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[layout_.index(o.layout_.mode(i))] += o.coeffs_[i];
  return *this;
}

PeriodicFunction& PeriodicFunction::operator-=(const PeriodicFunction& o) {
  if (o.dim() != dim()) throw DimensionMismatch("PeriodicFunction dimensions differ");
  if (o.trunc() > trunc()) *this = resized(o.trunc());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[layout_.index(o.layout_.mode(i))] -= o.coeffs_[i];
  return *this;
}

PeriodicFunction& PeriodicFunction::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

double norm_sigma_s(const PeriodicFunction& u, const NormParams& p) {
  if (p.sigma < 0.0 || p.s < 0.0) throw InvalidArgument("norm parameters must be nonnegative");
  double sum = 0.0;
  u.for_each([&](const ModeIndex& k, cplx c) {
    if (c == cplx{}) return;
    const double w = std::exp(2.0 * p.sigma * k.l1()) * std::pow(k.bracket(), 2.0 * p.s);
    sum += w * std::norm(c);
  });
  return std::sqrt(sum);
}

double inner(const PeriodicFunction& u, const PeriodicFunction& v) {
  if (u.dim() != v.dim()) throw DimensionMismatch("inner: dimensions differ");
  double sum = 0.0;
  u.for_each([&](const ModeIndex& k, cplx c) { sum += (c * std::conj(v.coeff(k))).real(); });
  return sum;
}

PeriodicFunction product(const PeriodicFunction& u, const PeriodicFunction& v, Support support) {
  if (u.dim() != v.dim()) throw DimensionMismatch("product: dimensions differ");
  const int K = support == Support::Full ? u.trunc() + v.trunc() : std::max(u.trunc(), v.trunc());
  PeriodicFunction out(u.dim(), K);
  std::vector<std::pair<ModeIndex, cplx>> nu;
  std::vector<std::pair<ModeIndex, cplx>> nv;
  u.for_each([&](const ModeIndex& k, cplx c) {
    if (c != cplx{}) nu.emplace_back(k, c);
  });
  v.for_each([&](const ModeIndex& k, cplx c) {
    if (c != cplx{}) nv.emplace_back(k, c);
  });
  std::vector<cplx> acc(out.layout().size());
  for (const auto& [ka, ca] : nu) {
    for (const auto& [kb, cb] : nv) {
      const ModeIndex k = ka + kb;
      if (!out.layout().contains(k) || !k.lex_nonnegative()) continue;
      acc[out.layout().index(k)] += ca * cb;
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const ModeIndex k = out.layout().mode(i);
    if (k.lex_nonnegative() && acc[i] != cplx{}) out.set(k, acc[i]);
  }
  return out;
}

PeriodicFunction fourier_multiplier(const PeriodicFunction& u, const std::function<cplx(const ModeIndex&)>& symbol) {
  PeriodicFunction out(u.dim(), u.trunc());
  u.for_each([&](const ModeIndex& k, cplx c) {
    if (k.lex_nonnegative()) out.set(k, c * symbol(k));
  });
  return out;
}

PeriodicFunction partial_x(const PeriodicFunction& u, int j) {
  if (j < 0 || j >= u.dim()) throw InvalidArgument("partial_x: direction out of range");
  return fourier_multiplier(u, [j](const ModeIndex& k) { return cplx(0.0, k[j]); });
}

PeriodicFunction abs_d(const PeriodicFunction& u) {
  return fourier_multiplier(u, [](const ModeIndex& k) { return cplx(k.norm(), 0.0); });
}

PeriodicFunction laplacian(const PeriodicFunction& u) {
  return fourier_multiplier(u, [](const ModeIndex& k) { return cplx(-k.norm() * k.norm(), 0.0); });
}

PeriodicFunction translate(const PeriodicFunction& u, double theta0, double theta1) {
  return fourier_multiplier(u, [&](const ModeIndex& k) {
    const double ph = k[0] * theta0 + k[1] * theta1;
    return cplx(std::cos(ph), std::sin(ph));
  });
}

PeriodicFunction reflect(const PeriodicFunction& u) {
  PeriodicFunction out(u.dim(), u.trunc());
  u.for_each([&](const ModeIndex& k, cplx c) {
    if (k.lex_nonnegative()) out.set(-k, c);
  });
  return out;
}

int collocation_size(int K) { return 4 * K + 2; }

GridValues to_grid(const PeriodicFunction& u, int N) {
  const int d = u.dim();
  const int K = u.trunc();
  if (N < 2 * K + 1) throw InvalidArgument("to_grid: grid too coarse for truncation");
  const int m = 2 * K + 1;
  const auto w = twiddles(N, K, +1.0);
  GridValues g{d, N, {}};
  if (d == 1) {
    g.values.assign(static_cast<std::size_t>(N), 0.0);
    for (int j = 0; j < N; ++j) {
      cplx s{};
      for (int q = 0; q < m; ++q) s += u.coeffs()[static_cast<std::size_t>(q)] * w[static_cast<std::size_t>(j) * m + q];
      g.values[static_cast<std::size_t>(j)] = s.real();
    }
    return g;
  }
  // d = 2: transform along x1 first, then along x0.
  std::vector<cplx> tmp(static_cast<std::size_t>(m) * N);
  for (int q0 = 0; q0 < m; ++q0) {
    for (int j1 = 0; j1 < N; ++j1) {
      cplx s{};
      for (int q1 = 0; q1 < m; ++q1)
        s += u.coeffs()[static_cast<std::size_t>(q0) * m + q1] * w[static_cast<std::size_t>(j1) * m + q1];
      tmp[static_cast<std::size_t>(q0) * N + j1] = s;
    }
  }
  g.values.assign(static_cast<std::size_t>(N) * N, 0.0);
  for (int j0 = 0; j0 < N; ++j0) {
    for (int j1 = 0; j1 < N; ++j1) {
      cplx s{};
      for (int q0 = 0; q0 < m; ++q0) s += tmp[static_cast<std::size_t>(q0) * N + j1] * w[static_cast<std::size_t>(j0) * m + q0];
      g.at(j0, j1) = s.real();
    }
  }
  return g;
}

PeriodicFunction from_grid(const GridValues& g, int K) {
  const int N = g.N;
  if (N < 2 * K + 1) throw InvalidArgument("from_grid: grid too coarse for truncation");
  const int m = 2 * K + 1;
  const auto w = twiddles(N, K, -1.0);
  PeriodicFunction out(g.d, K);
  std::vector<cplx> c(out.layout().size());
  if (g.d == 1) {
    for (int q = 0; q < m; ++q) {
      cplx s{};
      for (int j = 0; j < N; ++j) s += g.values[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j) * m + q];
      c[static_cast<std::size_t>(q)] = s / static_cast<double>(N);
    }
  } else {
    std::vector<cplx> tmp(static_cast<std::size_t>(N) * m);
    for (int j0 = 0; j0 < N; ++j0) {
      for (int q1 = 0; q1 < m; ++q1) {
        cplx s{};
        for (int j1 = 0; j1 < N; ++j1) s += g.at(j0, j1) * w[static_cast<std::size_t>(j1) * m + q1];
        tmp[static_cast<std::size_t>(j0) * m + q1] = s;
      }
    }
    for (int q0 = 0; q0 < m; ++q0) {
      for (int q1 = 0; q1 < m; ++q1) {
        cplx s{};
        for (int j0 = 0; j0 < N; ++j0) s += tmp[static_cast<std::size_t>(j0) * m + q1] * w[static_cast<std::size_t>(j0) * m + q0];
        c[static_cast<std::size_t>(q0) * m + q1] = s / (static_cast<double>(N) * N);
      }
    }
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    const ModeIndex k = out.layout().mode(i);
    if (k.lex_nonnegative()) out.set(k, c[i]);
  }
  return out;
}

GridValues map_grid(const GridValues& a, const std::function<double(double)>& f) {
  GridValues out = a;
  for (auto& v : out.values) v = f(v);
  return out;
}

TameProductDiagnostic check_tame_product(const PeriodicFunction& u, const PeriodicFunction& v, double sigma, double s,
                                         double s0) {
  if (u.dim() != v.dim()) throw DimensionMismatch("check_tame_product: dimensions differ");
  if (s0 <= 0.5 * u.dim()) throw InvalidArgument("check_tame_product: need s0 > d/2");
  if (s < s0) throw InvalidArgument("check_tame_product: need s >= s0");
  const NormParams hi{sigma, s};
  const NormParams lo{sigma, s0};
  TameProductDiagnostic out;
  out.product_norm = norm_sigma_s(product(u, v, Support::Full), hi);
  out.bound = norm_sigma_s(u, hi) * norm_sigma_s(v, lo) + norm_sigma_s(u, lo) * norm_sigma_s(v, hi);
  out.ratio = out.bound > 0.0 ? out.product_norm / out.bound : 0.0;
  return out;
}

}  // namespace wwdn
