#pragma once

#include <cstdint>
#include <string>

namespace lamforge {

/// Exact dyadic rational num / 2^log2_den, always kept in lowest terms.
/// Covers laminate weights down to 2^-126, which is past the depth cap.
class Dyadic {
 public:
  Dyadic() : num_(0), log2_den_(0) {}
  Dyadic(unsigned __int128 num, unsigned log2_den);

  static Dyadic zero() { return Dyadic(); }
  static Dyadic one() { return Dyadic(1, 0); }
  /// 2^-k.
  static Dyadic pow2(unsigned k) { return Dyadic(1, k); }

  unsigned __int128 num() const noexcept { return num_; }
  unsigned log2_den() const noexcept { return log2_den_; }

  Dyadic operator+(const Dyadic& other) const;
  /// Halve, i.e. multiply by 2^-k.
  Dyadic shifted(unsigned k) const;

  bool operator==(const Dyadic& other) const noexcept = default;
  bool is_one() const noexcept { return num_ == 1 && log2_den_ == 0; }

  double to_double() const;
  /// Numerator as decimal text (numerators stay small in practice).
  std::string num_string() const;

 private:
  void normalize();

  unsigned __int128 num_;
  unsigned log2_den_;
};

}  // namespace lamforge
