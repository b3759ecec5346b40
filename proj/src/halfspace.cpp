#include "wwdn/halfspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "wwdn/errors.hpp"

namespace wwdn {

namespace {

// int_{-inf}^0 y^q e^{nu y} dy = (-1)^q q! / nu^{q+1}
double moment(int q, double nu) {
  const double mag = std::exp(std::lgamma(q + 1.0) - (q + 1.0) * std::log(nu));
  return (q % 2 == 0) ? mag : -mag;
}

std::size_t term_hash(double mu, int p) {
  std::uint64_t x = std::bit_cast<std::uint64_t>(mu) ^ (static_cast<std::uint64_t>(p) * 0x9E3779B97F4A7C15ULL);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return static_cast<std::size_t>(x);
}

bool term_order(const ExpTerm& a, const ExpTerm& b) { return a.p != b.p ? a.p < b.p : a.mu < b.mu; }

void merge_sorted(std::vector<ExpTerm>& terms, double merge_tol) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    ExpTerm acc = terms[i];
    std::size_t j = i + 1;
    while (j < terms.size() && terms[j].p == acc.p &&
           std::abs(terms[j].mu - acc.mu) < merge_tol * std::max(1.0, acc.mu)) {
      acc.c += terms[j].c;
      ++j;
    }
    if (acc.c != cplx{}) terms[out++] = acc;
    i = j;
  }
  terms.resize(out);
}

}  // namespace

double term_size(const ExpTerm& t) {
  const double a = std::abs(t.c);
  if (t.p == 0 || a == 0.0) return a;
  if (t.mu <= 0.0) return std::numeric_limits<double>::infinity();
  // max of |y|^p e^{mu y} is at y = -p/mu
  return a * std::exp(t.p * (std::log(t.p / t.mu) - 1.0));
}

ExpPolyProfile::ExpPolyProfile(std::vector<ExpTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.mu < 0.0) throw InvalidArgument("ExpPolyProfile: negative decay rate");
    if (t.p < 0) throw InvalidArgument("ExpPolyProfile: negative degree");
  }
}

void ExpPolyProfile::append(const ExpPolyProfile& o) { terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end()); }

void ExpPolyProfile::scale(cplx s) {
  for (auto& t : terms_) t.c *= s;
}

cplx ExpPolyProfile::eval(double y) const {
  cplx sum{};
  for (const auto& t : terms_) sum += t.c * std::pow(y, t.p) * std::exp(t.mu * y);
  return sum;
}

cplx ExpPolyProfile::at_zero() const {
  cplx sum{};
  for (const auto& t : terms_)
    if (t.p == 0) sum += t.c;
  return sum;
}

ExpPolyProfile ExpPolyProfile::derivative() const {
  std::vector<ExpTerm> out;
  out.reserve(2 * terms_.size());
  for (const auto& t : terms_) {
    if (t.mu != 0.0) out.push_back({t.mu, t.p, t.c * t.mu});
    if (t.p > 0) out.push_back({t.mu, t.p - 1, t.c * static_cast<double>(t.p)});
  }
  std::sort(out.begin(), out.end(), [](const ExpTerm& a, const ExpTerm& b) {
    return a.p != b.p ? a.p < b.p : a.mu < b.mu;
  });
  merge_sorted(out, 1e-12);
  ExpPolyProfile r;
  r.terms_ = std::move(out);
  return r;
}

ExpPolyProfile ExpPolyProfile::conj() const {
  ExpPolyProfile r = *this;
  for (auto& t : r.terms_) t.c = std::conj(t.c);
  return r;
}

double ExpPolyProfile::min_rate() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) m = std::min(m, t.mu);
  return m;
}

int ExpPolyProfile::max_degree() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.p);
  return m;
}

double ExpPolyProfile::max_term_size() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, term_size(t));
  return m;
}

void ExpPolyProfile::normalize(const AlgebraOptions& opt, double reference_size) {
  std::sort(terms_.begin(), terms_.end(), term_order);
  merge_sorted(terms_, opt.merge_tol);
  for (const auto& t : terms_) {
    if (t.p == 0 && t.mu == 0.0) throw InvalidArgument("constant term inside a profile");
  }
  if (opt.prune_tol > 0.0) {
    const double cut = opt.prune_tol * std::max(reference_size, max_term_size());
    std::erase_if(terms_, [&](const ExpTerm& t) { return term_size(t) < cut; });
  }
  if (terms_.size() > opt.term_cap) {
    throw TermCapExceeded("profile has " + std::to_string(terms_.size()) + " terms, cap is " +
                          std::to_string(opt.term_cap));
  }
}

double ExpPolyProfile::l2a_norm_sq(double a) const {
  for (const auto& t : terms_) {
    if (t.mu <= a) throw MuTooSmall("decay rate " + std::to_string(t.mu) + " <= weight a = " + std::to_string(a));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& ti = terms_[i];
    sum += std::norm(ti.c) * moment(2 * ti.p, 2.0 * ti.mu - 2.0 * a);
    for (std::size_t j = i + 1; j < terms_.size(); ++j) {
      const auto& tj = terms_[j];
      sum += 2.0 * (ti.c * std::conj(tj.c)).real() * moment(ti.p + tj.p, ti.mu + tj.mu - 2.0 * a);
    }
  }
  return std::max(sum, 0.0);
}

HalfCylinderFunction::HalfCylinderFunction(int d, int K) {
  if (d != 1 && d != 2) throw InvalidArgument("dimension must be 1 or 2");
  if (K < 0) throw InvalidArgument("truncation K must be >= 0");
  layout_ = ModeLayout(d, K);
  profiles_.assign(layout_.size(), ExpPolyProfile{});
}

const ExpPolyProfile& HalfCylinderFunction::profile(const ModeIndex& k) const {
  static const ExpPolyProfile empty;
  if (!layout_.contains(k)) return empty;
  return profiles_[layout_.index(k)];
}

void HalfCylinderFunction::set_profile(const ModeIndex& k, ExpPolyProfile p) {
  if (!layout_.contains(k)) throw InvalidArgument("mode outside truncation block");
  if (k.is_zero()) {
    std::vector<ExpTerm> real_terms(p.terms().begin(), p.terms().end());
    for (auto& t : real_terms) t.c = t.c.real();
    std::erase_if(real_terms, [](const ExpTerm& t) { return t.c == cplx{}; });
    profiles_[layout_.index(k)] = ExpPolyProfile(std::move(real_terms));
    return;
  }
  profiles_[layout_.index(-k)] = p.conj();
  profiles_[layout_.index(k)] = std::move(p);
}

std::size_t HalfCylinderFunction::term_count() const {
  std::size_t n = 0;
  for (const auto& p : profiles_) n += p.size();
  return n;
}

bool HalfCylinderFunction::is_zero() const { return constant_ == cplx{} && term_count() == 0; }

double HalfCylinderFunction::max_term_size() const {
  double m = 0.0;
  for (const auto& p : profiles_) m = std::max(m, p.max_term_size());
  return m;
}

int HalfCylinderFunction::max_degree() const {
  int m = 0;
  for (const auto& p : profiles_) m = std::max(m, p.max_degree());
  return m;
}

HalfCylinderFunction HalfCylinderFunction::projected() const {
  HalfCylinderFunction r = *this;
  r.constant_ = {};
  return r;
}

double HalfCylinderFunction::eval(double y, double x0, double x1) const {
  cplx sum = constant_;
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    if (profiles_[i].empty()) continue;
    const ModeIndex k = layout_.mode(i);
    const double ph = k[0] * x0 + k[1] * x1;
    sum += profiles_[i].eval(y) * cplx(std::cos(ph), std::sin(ph));
  }
  return sum.real();
}

namespace {

HalfCylinderFunction& accumulate(HalfCylinderFunction& a, const HalfCylinderFunction& b, double sign) {
  if (a.dim() != b.dim()) throw DimensionMismatch("HalfCylinderFunction dimensions differ");
  HalfCylinderFunction out(a.dim(), std::max(a.trunc(), b.trunc()));
  AlgebraOptions merge_only;
  merge_only.prune_tol = 0.0;
  merge_only.term_cap = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < out.layout().size(); ++i) {
    const ModeIndex k = out.layout().mode(i);
    if (!k.lex_nonnegative()) continue;
    const auto& pa = a.profile(k);
    const auto& pb = b.profile(k);
    if (pa.empty() && pb.empty()) continue;
    ExpPolyProfile p = pa;
    ExpPolyProfile q = pb;
    q.scale(sign);
    p.append(q);
    p.normalize(merge_only);
    out.set_profile(k, std::move(p));
  }
  out.set_constant(a.constant() + sign * b.constant());
  a = std::move(out);
  return a;
}

}  // namespace

HalfCylinderFunction& HalfCylinderFunction::operator+=(const HalfCylinderFunction& o) {
  return accumulate(*this, o, 1.0);
}

HalfCylinderFunction& HalfCylinderFunction::operator-=(const HalfCylinderFunction& o) {
  return accumulate(*this, o, -1.0);
}

HalfCylinderFunction& HalfCylinderFunction::operator*=(double s) {
  for (auto& p : profiles_) p.scale(s);
  constant_ *= s;
  return *this;
}

void HalfCylinderFunction::normalize(const AlgebraOptions& opt) {
  AlgebraOptions merge_only = opt;
  merge_only.prune_tol = 0.0;
  merge_only.term_cap = std::numeric_limits<std::size_t>::max();
  for (auto& p : profiles_) p.normalize(merge_only);
  const double ref = max_term_size();
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    const ModeIndex k = layout_.mode(i);
    if (!k.lex_nonnegative() || profiles_[i].empty()) continue;
    ExpPolyProfile p = profiles_[i];
    p.normalize(opt, ref);
    set_profile(k, std::move(p));
  }
}

HalfCylinderFunction normalize(const HalfCylinderFunction& u, const AlgebraOptions& opt) {
  HalfCylinderFunction r = u;
  r.normalize(opt);
  return r;
}

HalfCylinderFunction lift_harmonic(const PeriodicFunction& g) {
  HalfCylinderFunction u(g.dim(), g.trunc());
  g.for_each([&](const ModeIndex& k, cplx c) {
    if (k.is_zero()) {
      u.set_constant(c);
    } else if (k.lex_nonnegative() && c != cplx{}) {
      u.set_profile(k, ExpPolyProfile({{k.norm(), 0, c}}));
    }
  });
  return u;
}

PeriodicFunction trace(const HalfCylinderFunction& u) {
  PeriodicFunction g(u.dim(), u.trunc());
  for (std::size_t i = 0; i < u.layout().size(); ++i) {
    const ModeIndex k = u.layout().mode(i);
    if (!k.lex_nonnegative()) continue;
    cplx v = u.profiles()[i].at_zero();
    if (k.is_zero()) v += u.constant();
    if (v != cplx{}) g.set(k, v);
  }
  return g;
}

HalfCylinderFunction dy(const HalfCylinderFunction& u) {
  HalfCylinderFunction r(u.dim(), u.trunc());
  for (std::size_t i = 0; i < u.layout().size(); ++i) {
    const ModeIndex k = u.layout().mode(i);
    if (!k.lex_nonnegative() || u.profiles()[i].empty()) continue;
    r.set_profile(k, u.profiles()[i].derivative());
  }
  return r;
}

HalfCylinderFunction dx(const HalfCylinderFunction& u, int j) {
  if (j < 0 || j >= u.dim()) throw InvalidArgument("dx: direction out of range");
  HalfCylinderFunction r(u.dim(), u.trunc());
  for (std::size_t i = 0; i < u.layout().size(); ++i) {
    const ModeIndex k = u.layout().mode(i);
    if (!k.lex_nonnegative() || u.profiles()[i].empty() || k[j] == 0) continue;
    ExpPolyProfile p = u.profiles()[i];
    p.scale(cplx(0.0, k[j]));
    r.set_profile(k, std::move(p));
  }
  return r;
}

HalfCylinderFunction laplacian_x(const HalfCylinderFunction& u) {
  HalfCylinderFunction r(u.dim(), u.trunc());
  for (std::size_t i = 0; i < u.layout().size(); ++i) {
    const ModeIndex k = u.layout().mode(i);
    if (!k.lex_nonnegative() || u.profiles()[i].empty() || k.is_zero()) continue;
    ExpPolyProfile p = u.profiles()[i];
    p.scale(-k.norm() * k.norm());
    r.set_profile(k, std::move(p));
  }
  return r;
}

HalfCylinderFunction laplacian_xy(const HalfCylinderFunction& u, const AlgebraOptions& opt) {
  HalfCylinderFunction r = dy(dy(u));
  r += laplacian_x(u);
  AlgebraOptions merge_only = opt;
  merge_only.prune_tol = 0.0;
  r.normalize(merge_only);
  return r;
}

ProductAccumulator::ProductAccumulator(int d, int K, double merge_tol)
    : layout_(d, K), merge_tol_(merge_tol), buckets_(layout_.size()) {}

void ProductAccumulator::Bucket::insert(double mu, int p, cplx c) {
  if (2 * (terms.size() + 1) > slots.size()) {
    slots.assign(std::max<std::size_t>(16, 2 * slots.size()), -1);
    const std::size_t mask = slots.size() - 1;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      std::size_t i = term_hash(terms[j].mu, terms[j].p) & mask;
      while (slots[i] >= 0) i = (i + 1) & mask;
      slots[i] = static_cast<std::int32_t>(j);
    }
  }
  const std::size_t mask = slots.size() - 1;
  std::size_t i = term_hash(mu, p) & mask;
  while (slots[i] >= 0) {
    ExpTerm& e = terms[static_cast<std::size_t>(slots[i])];
    if (e.p == p && e.mu == mu) {
      e.c += c;
      return;
    }
    i = (i + 1) & mask;
  }
  slots[i] = static_cast<std::int32_t>(terms.size());
  terms.push_back({mu, p, c});
}

void ProductAccumulator::add_product(const HalfCylinderFunction& u, const HalfCylinderFunction& v, double scale) {
  if (u.dim() != layout_.dim() || v.dim() != layout_.dim()) throw DimensionMismatch("multiply: dimensions differ");
  struct Entry {
    ModeIndex k;
    const ExpPolyProfile* p;
  };
  auto nonempty = [](const HalfCylinderFunction& f) {
    std::vector<Entry> out;
    for (std::size_t i = 0; i < f.layout().size(); ++i)
      if (!f.profiles()[i].empty()) out.push_back({f.layout().mode(i), &f.profiles()[i]});
    return out;
  };
  const auto eu = nonempty(u);
  const auto ev = nonempty(v);
  for (const auto& a : eu) {
    for (const auto& b : ev) {
      const ModeIndex k = a.k + b.k;
      if (!k.lex_nonnegative() || !layout_.contains(k)) continue;
      Bucket& bucket = buckets_[layout_.index(k)];
      for (const auto& ta : a.p->terms()) {
        const cplx ca = scale * ta.c;
        for (const auto& tb : b.p->terms()) bucket.insert(ta.mu + tb.mu, ta.p + tb.p, ca * tb.c);
      }
    }
  }
  const cplx cu = u.constant();
  const cplx cv = v.constant();
  if (cu != cplx{}) add_profiles(v, scale * cu);
  if (cv != cplx{}) add_profiles(u, scale * cv);
  constant_ += scale * cu * cv;
}

void ProductAccumulator::add_profiles(const HalfCylinderFunction& u, cplx scale) {
  for (std::size_t i = 0; i < u.layout().size(); ++i) {
    const ModeIndex k = u.layout().mode(i);
    if (!k.lex_nonnegative() || !layout_.contains(k) || u.profiles()[i].empty()) continue;
    Bucket& bucket = buckets_[layout_.index(k)];
    for (const auto& t : u.profiles()[i].terms()) bucket.insert(t.mu, t.p, scale * t.c);
  }
}

void ProductAccumulator::add(const HalfCylinderFunction& u, double scale) {
  if (u.dim() != layout_.dim()) throw DimensionMismatch("accumulate: dimensions differ");
  add_profiles(u, scale);
  constant_ += scale * u.constant();
}

HalfCylinderFunction ProductAccumulator::finish(const AlgebraOptions& opt) {
  HalfCylinderFunction out(layout_.dim(), layout_.trunc());
  for (std::size_t i = 0; i < buckets_.size(); ++i) {
    if (buckets_[i].terms.empty()) continue;
    out.profiles_[i] = ExpPolyProfile(std::move(buckets_[i].terms));
    buckets_[i] = Bucket{};
  }
  out.constant_ = constant_;
  constant_ = {};
  // Only lex-nonnegative buckets were filled; normalize mirrors them.
  AlgebraOptions merge_only = opt;
  merge_only.prune_tol = 0.0;
  merge_only.term_cap = std::numeric_limits<std::size_t>::max();
  for (auto& p : out.profiles_) p.normalize(merge_only);
  const double ref = out.max_term_size();
  for (std::size_t i = 0; i < out.profiles_.size(); ++i) {
    const ModeIndex k = out.layout_.mode(i);
    if (!k.lex_nonnegative() || out.profiles_[i].empty()) continue;
    ExpPolyProfile p = std::move(out.profiles_[i]);
    p.normalize(opt, ref);
    out.set_profile(k, std::move(p));
  }
  out.constant_ = out.constant_.real();
  return out;
}

HalfCylinderFunction multiply(const HalfCylinderFunction& u, const HalfCylinderFunction& v, const AlgebraOptions& opt) {
  if (u.dim() != v.dim()) throw DimensionMismatch("multiply: dimensions differ");
  ProductAccumulator acc(u.dim(), std::max(u.trunc(), v.trunc()), opt.merge_tol);
  acc.add_product(u, v);
  return acc.finish(opt);
}

double norm_sigma_s_a(const HalfCylinderFunction& u, const WeightedNormParams& p) {
  if (p.a <= 0.0 || p.a >= 1.0) throw InvalidArgument("weight a must lie in (0, 1)");
  if (p.s < 0 || p.sigma < 0.0) throw InvalidArgument("norm parameters must be nonnegative");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.layout().size(); ++i) {
    if (u.profiles()[i].empty()) continue;
    const ModeIndex k = u.layout().mode(i);
    const double ws = std::exp(2.0 * p.sigma * k.l1());
    ExpPolyProfile der = u.profiles()[i];
    for (int j = 0; j <= p.s; ++j) {
      if (j > 0) der = der.derivative();
      sum += ws * std::pow(k.bracket(), 2.0 * (p.s - j)) * der.l2a_norm_sq(p.a);
    }
  }
  return std::sqrt(sum);
}

double norm_with_constant(const HalfCylinderFunction& u, const WeightedNormParams& p) {
  return norm_sigma_s_a(u, p) + std::abs(u.constant());
}

}  // namespace wwdn
