#include "lamforge/dyadic.hpp"

#include <cmath>

#include "lamforge/errors.hpp"

namespace lamforge {

namespace {
constexpr unsigned kMaxLog2Den = 126;
}

Dyadic::Dyadic(unsigned __int128 num, unsigned log2_den) : num_(num), log2_den_(log2_den) {
  if (log2_den > kMaxLog2Den) throw RuntimeError("dyadic denominator exponent overflow");
  normalize();
}

void Dyadic::normalize() {
  if (num_ == 0) {
    log2_den_ = 0;
    return;
  }
  while (log2_den_ > 0 && (num_ & 1) == 0) {
    num_ >>= 1;
    --log2_den_;
  }
}

Dyadic Dyadic::operator+(const Dyadic& other) const {
  const unsigned den = log2_den_ > other.log2_den_ ? log2_den_ : other.log2_den_;
  const unsigned __int128 a = num_ << (den - log2_den_);
  const unsigned __int128 b = other.num_ << (den - other.log2_den_);
  return Dyadic(a + b, den);
}

Dyadic Dyadic::shifted(unsigned k) const {
  if (num_ == 0) return Dyadic();
  if (log2_den_ + k > kMaxLog2Den) throw RuntimeError("dyadic denominator exponent overflow");
  return Dyadic(num_, log2_den_ + k);
}

double Dyadic::to_double() const { return static_cast<double>(num_) * std::exp2(-static_cast<double>(log2_den_)); }

std::string Dyadic::num_string() const {
  if (num_ == 0) return "0";
  std::string s;
  unsigned __int128 n = num_;
  while (n > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(n % 10)));
    n /= 10;
  }
  return s;
}

}  // namespace lamforge
