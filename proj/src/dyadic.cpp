#include "danzer/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "danzer/errors.hpp"

namespace danzer {

DyadicRational DyadicRational::from_wide(unsigned __int128 numerator, unsigned log2_denominator) {
  if (log2_denominator < 128) {
    numerator &= (static_cast<unsigned __int128>(1) << log2_denominator) - 1;
  }
  if (numerator == 0) return {};
  while ((numerator & 1) == 0 && log2_denominator > 0) {
    numerator >>= 1;
    --log2_denominator;
  }
  if (log2_denominator > kMaxLog2Denominator) {
    throw OverflowError("dyadic denominator 2^" + std::to_string(log2_denominator) + " exceeds 2^63");
  }
  DyadicRational r;
  r.num_ = static_cast<std::uint64_t>(numerator);
  r.q_ = log2_denominator;
  return r;
}

DyadicRational::DyadicRational(std::uint64_t numerator, unsigned log2_denominator) {
  *this = from_wide(numerator, log2_denominator);
}

double DyadicRational::to_double() const { return std::ldexp(static_cast<double>(num_), -static_cast<int>(q_)); }

std::uint64_t DyadicRational::scaled(unsigned q) const {
  if (q < q_ || q > kMaxLog2Denominator) throw InvalidArgument("cannot rescale dyadic value to 2^" + std::to_string(q));
  return num_ << (q - q_);
}

DyadicRational DyadicRational::times(std::uint64_t n) const {
  return from_wide(static_cast<unsigned __int128>(num_) * n, q_);
}

std::string DyadicRational::to_string() const {
  return std::to_string(num_) + "/2^" + std::to_string(q_);
}

DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
  const unsigned q = std::max(a.q_, b.q_);
  return DyadicRational::from_wide(static_cast<unsigned __int128>(a.scaled(q)) + b.scaled(q), q);
}

DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) {
  const unsigned q = std::max(a.q_, b.q_);
  const auto one = static_cast<unsigned __int128>(1) << q;
  return DyadicRational::from_wide(one + a.scaled(q) - b.scaled(q), q);
}

std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
  const unsigned q = std::max(a.q_, b.q_);
  return a.scaled(q) <=> b.scaled(q);
}

}  // namespace danzer
