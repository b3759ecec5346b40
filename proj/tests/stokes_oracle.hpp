#pragma once

// Order-by-order small-amplitude expansion of the traveling-wave system, built
// from scratch: the harmonic extension Phi = sum a_k e^{|k| y} e^{ikx} is matched
// to psi on y = eta(x) power by power in epsilon, so nothing here touches the
// library's flattening or Neumann series.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Fourier coefficients on modes -M..M.
struct Trig {
  int M = 0;
  std::vector<cplx> c;

  explicit Trig(int m = 0) : M(m), c(static_cast<std::size_t>(2 * m + 1)) {}
  cplx& at(int j) { return c[static_cast<std::size_t>(j + M)]; }
  [[nodiscard]] cplx at(int j) const { return c[static_cast<std::size_t>(j + M)]; }

  Trig& operator+=(const Trig& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  Trig& operator*=(double s) {
    for (cplx& v : c) v *= s;
    return *this;
  }
  friend Trig operator+(Trig a, const Trig& b) { return a += b; }
  friend Trig operator*(double s, Trig a) { return a *= s; }
  friend Trig operator-(Trig a, const Trig& b) { return a += -1.0 * b; }

  friend Trig operator*(const Trig& a, const Trig& b) {
    Trig out(a.M);
    for (int i = -a.M; i <= a.M; ++i)
      for (int j = -a.M; j <= a.M; ++j)
        if (std::abs(i + j) <= a.M) out.at(i + j) += a.at(i) * b.at(j);
    return out;
  }

  template <class F>
  [[nodiscard]] Trig multiplier(F f) const {
    Trig out(M);
    for (int j = -M; j <= M; ++j) out.at(j) = f(j) * at(j);
    return out;
  }
  [[nodiscard]] Trig dx() const { return multiplier([](int j) { return cplx(0.0, j); }); }
  [[nodiscard]] Trig absd(int power = 1) const {
    return multiplier([power](int j) { return cplx(std::pow(std::abs(j), power), 0.0); });
  }

  // a cos(jx) + b sin(jx) convention
  [[nodiscard]] double cos_coeff(int j) const { return 2.0 * at(j).real(); }
  [[nodiscard]] double sin_coeff(int j) const { return -2.0 * at(j).imag(); }
  void set_cos(int j, double a) {
    at(j) += 0.5 * a;
    at(-j) += 0.5 * a;
  }
  void set_sin(int j, double b) {
    at(j) += cplx(0.0, -0.5 * b);
    at(-j) += cplx(0.0, 0.5 * b);
  }
};

// Truncated power series in epsilon with Trig coefficients, orders 0..N.
struct Series {
  int N = 0;
  int M = 0;
  std::vector<Trig> t;

  Series(int n, int m) : N(n), M(m), t(static_cast<std::size_t>(n + 1), Trig(m)) {}
  Trig& operator[](int n) { return t[static_cast<std::size_t>(n)]; }
  const Trig& operator[](int n) const { return t[static_cast<std::size_t>(n)]; }

  Series& operator+=(const Series& o) {
    for (int n = 0; n <= N; ++n) (*this)[n] += o[n];
    return *this;
  }
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator*(double s, Series a) {
    for (Trig& v : a.t) v *= s;
    return a;
  }
  friend Series operator-(Series a, const Series& b) { return a += -1.0 * b; }
  friend Series operator*(const Series& a, const Series& b) {
    Series out(a.N, a.M);
    for (int i = 0; i <= a.N; ++i)
      for (int j = 0; i + j <= a.N; ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  template <class Op>
  [[nodiscard]] Series map(Op op) const {
    Series out(N, M);
    for (int n = 0; n <= N; ++n) out[n] = op((*this)[n]);
    return out;
  }
  [[nodiscard]] Series dx() const { return map([](const Trig& u) { return u.dx(); }); }
  [[nodiscard]] Series absd(int p = 1) const { return map([p](const Trig& u) { return u.absd(p); }); }
};

// G(eta) psi for eta = O(epsilon): a = psi - sum_{m>=1} eta^m/m! |D|^m a solved order by order,
// then G psi = Phi_y - eta_x Phi_x on y = eta.
inline Series dn_series(const Series& eta, const Series& psi) {
  const int N = eta.N;
  std::vector<Series> eta_pow{Series(N, eta.M)};
  eta_pow[0][0].at(0) = 1.0;
  double fact = 1.0;
  for (int m = 1; m <= N; ++m) {
    fact *= m;
    eta_pow.push_back(eta_pow.back() * eta);
  }
  Series a = psi;
  for (int sweep = 0; sweep <= N; ++sweep) {
    Series next = psi;
    double f = 1.0;
    for (int m = 1; m <= N; ++m) {
      f *= m;
      next = next - (1.0 / f) * (eta_pow[static_cast<std::size_t>(m)] * a.absd(m));
    }
    a = next;
  }
  Series phi_y(N, eta.M);
  Series phi_x(N, eta.M);
  double f = 1.0;
  for (int m = 0; m <= N; ++m) {
    if (m > 0) f *= m;
    phi_y += (1.0 / f) * (eta_pow[static_cast<std::size_t>(m)] * a.absd(m + 1));
    phi_x += (1.0 / f) * (eta_pow[static_cast<std::size_t>(m)] * a.absd(m).dx());
  }
  return phi_y - eta.dx() * phi_x;
}

struct Expansion {
  // Orders 0..N of eta, psi and c.
  Series eta;
  Series psi;
  std::vector<double> c;
};

// Solves F = 0 with <pair, u*>/||u*||^2 = epsilon through order N in (eta, psi) and order N - 1 in c.
inline Expansion stokes_expansion(int k, double g, int N, int M = 16) {
  const double sk = std::sqrt(static_cast<double>(k));
  const double sg = std::sqrt(g);
  const double cstar = std::sqrt(g / k);
  Expansion ex{Series(N, M), Series(N, M), std::vector<double>(static_cast<std::size_t>(N), 0.0)};
  ex.c[0] = cstar;
  ex.eta[1].set_cos(k, sk);
  ex.psi[1].set_sin(k, sg);

  auto residual = [&](int n) {
    Series c(N, M);
    for (int i = 0; i < N; ++i) c[i].at(0) = ex.c[static_cast<std::size_t>(i)];
    const Series& eta = ex.eta;
    const Series& psi = ex.psi;
    const Series gpsi = dn_series(eta, psi);
    const Series ex_ = eta.dx();
    const Series px = psi.dx();
    const Series f1 = c * ex_ + gpsi;
    const Series b = gpsi + ex_ * px;
    // 1/(1 + eta_x^2) as a geometric series
    Series inv(N, M);
    inv[0].at(0) = 1.0;
    Series q = inv;
    const Series s = ex_ * ex_;
    for (int j = 1; 2 * j <= N; ++j) {
      q = -1.0 * (q * s);
      inv += q;
    }
    const Series f2 = c * px - g * eta - 0.5 * (px * px) + 0.5 * (b * b * inv);
    return std::make_pair(f1[n], f2[n]);
  };

  for (int n = 2; n <= N; ++n) {
    // With eta_n = psi_n = 0 and c_{n-1} = 0 the order-n residual is the known remainder.
    auto [r1, r2] = residual(n);
    if (std::abs(r2.at(0)) > 1e-12) throw std::runtime_error("oracle: nonzero mean at order " + std::to_string(n));
    // c_{n-1} enters as c_{n-1} (eta_1x, psi_1x); it is fixed by the range condition at mode k.
    const double a1 = r1.sin_coeff(k);
    const double a2 = r2.cos_coeff(k);
    const double cn = (sg * a1 - sk * a2) / (2.0 * k * sk * sg);
    ex.c[static_cast<std::size_t>(n - 1)] = cn;
    const double f_k = -(a1 - cn * k * sk);
    const double g_k = -(a2 + cn * k * sg);
    for (int j = 1; j <= M; ++j) {
      const double f = j == k ? f_k : -r1.sin_coeff(j);
      const double gr = j == k ? g_k : -r2.cos_coeff(j);
      double A = 0.0;
      double B = 0.0;
      if (j == k) {
        // particular solution, then remove the kernel component
        A = -f / (cstar * k);
        const double proj = sk * A / (k + g);
        A -= proj * sk;
        B -= proj * sg;
      } else {
        // [[-c j, j], [-g, c j]] (A, B) = (f, gr)
        const double m11 = -cstar * j, m12 = j, m21 = -g, m22 = cstar * j;
        const double det = m11 * m22 - m12 * m21;
        A = (f * m22 - m12 * gr) / det;
        B = (m11 * gr - m21 * f) / det;
      }
      if (A != 0.0) ex.eta[n].set_cos(j, A);
      if (B != 0.0) ex.psi[n].set_sin(j, B);
    }
  }
  return ex;
}

}  // namespace oracle
