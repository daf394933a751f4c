#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace danzer {

/// Exact torus value p / 2^q in [0, 1), kept in lowest terms (0 is 0/2^0).
class DyadicRational {
 public:
  static constexpr unsigned kMaxLog2Denominator = 63;

  DyadicRational() = default;
  /// Reduces numerator / 2^log2_denominator mod 1.
  DyadicRational(std::uint64_t numerator, unsigned log2_denominator);
  static DyadicRational from_wide(unsigned __int128 numerator, unsigned log2_denominator);

  std::uint64_t numerator() const { return num_; }
  unsigned log2_denominator() const { return q_; }
  double to_double() const;
  /// Numerator over 2^q; requires q >= log2_denominator().
  std::uint64_t scaled(unsigned q) const;
  /// n * x mod 1.
  DyadicRational times(std::uint64_t n) const;
  std::string to_string() const;

  friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b);
  friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b);
  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b);

 private:
  std::uint64_t num_ = 0;
  unsigned q_ = 0;
};

}  // namespace danzer
