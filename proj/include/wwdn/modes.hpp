#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace wwdn {

/// Integer wavenumber on T^d, d in {1, 2}. For d = 1 the second component is 0.
struct ModeIndex {
  std::array<int, 2> k{0, 0};

  constexpr ModeIndex() = default;
  constexpr explicit ModeIndex(int k1) : k{k1, 0} {}
  constexpr ModeIndex(int k1, int k2) : k{k1, k2} {}

  constexpr int operator[](int j) const { return k[static_cast<std::size_t>(j)]; }

  /// |k|_1 = |k_1| + |k_2|
  [[nodiscard]] int l1() const { return std::abs(k[0]) + std::abs(k[1]); }
  /// Euclidean length |k|.
  [[nodiscard]] double norm() const {
    return std::sqrt(static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1]);
  }
  /// <k> = max(1, |k|)
  [[nodiscard]] double bracket() const { return std::max(1.0, norm()); }
  [[nodiscard]] int linf() const { return std::max(std::abs(k[0]), std::abs(k[1])); }
  [[nodiscard]] bool is_zero() const { return k[0] == 0 && k[1] == 0; }

  /// k >= 0 in lexicographic order; exactly one of k, -k has this property unless k = 0.
  [[nodiscard]] bool lex_nonnegative() const { return k[0] > 0 || (k[0] == 0 && k[1] >= 0); }

  constexpr ModeIndex operator-() const { return {-k[0], -k[1]}; }
  constexpr ModeIndex operator+(const ModeIndex& o) const { return {k[0] + o.k[0], k[1] + o.k[1]}; }
  constexpr ModeIndex operator-(const ModeIndex& o) const { return {k[0] - o.k[0], k[1] - o.k[1]}; }
  constexpr bool operator==(const ModeIndex&) const = default;
  constexpr auto operator<=>(const ModeIndex&) const = default;
};

/// Dense index layout shared by PeriodicFunction and HalfCylinderFunction:
/// modes with |k|_inf <= K stored in a (2K+1)^d block.
class ModeLayout {
 public:
  ModeLayout() = default;
  ModeLayout(int d, int K) : d_(d), K_(K), extent_(2 * K + 1) {}

  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] int trunc() const { return K_; }
  [[nodiscard]] int extent() const { return extent_; }
  [[nodiscard]] std::size_t size() const {
    return d_ == 1 ? static_cast<std::size_t>(extent_)
                   : static_cast<std::size_t>(extent_) * static_cast<std::size_t>(extent_);
  }

  [[nodiscard]] bool contains(const ModeIndex& m) const {
    if (d_ == 1 && m.k[1] != 0) return false;
    return m.linf() <= K_;
  }
  [[nodiscard]] std::size_t index(const ModeIndex& m) const {
    const auto i0 = static_cast<std::size_t>(m.k[0] + K_);
    if (d_ == 1) return i0;
    return i0 * static_cast<std::size_t>(extent_) + static_cast<std::size_t>(m.k[1] + K_);
  }
  [[nodiscard]] ModeIndex mode(std::size_t i) const {
    if (d_ == 1) return ModeIndex(static_cast<int>(i) - K_);
    const auto e = static_cast<std::size_t>(extent_);
    return {static_cast<int>(i / e) - K_, static_cast<int>(i % e) - K_};
  }

  bool operator==(const ModeLayout&) const = default;

 private:
  int d_ = 1;
  int K_ = 0;
  int extent_ = 1;
};

}  // namespace wwdn
