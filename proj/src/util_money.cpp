#include "skillforge/util/money.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace skillforge::util {

namespace {

using i128 = __int128;

std::int64_t pow10(int n) {
  std::int64_t v = 1;
  while (n-- > 0) v *= 10;
  return v;
}

std::string render_scaled(std::int64_t scaled, int decimals) {
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::int64_t unit = pow10(decimals);
  std::int64_t whole = scaled / unit;
  std::int64_t frac = scaled % unit;
  std::string out = neg ? "-" : "";
  if (decimals == 0) return out + fmt::format("{}", whole);
  return out + fmt::format("{}.{:0{}}", whole, frac, decimals);
}

// Half-up rounding of numer/denom scaled by 10^decimals, exact in 128 bits.
std::int64_t round_ratio(i128 numer, i128 denom, int decimals) {
  if (denom <= 0) throw std::invalid_argument("round_ratio: denom must be > 0");
  bool neg = numer < 0;
  if (neg) numer = -numer;
  numer *= pow10(decimals);
  i128 scaled = (2 * numer + denom) / (2 * denom);
  return static_cast<std::int64_t>(neg ? -scaled : scaled);
}

}  // namespace

std::string format_dollars(Picodollars amount, int decimals) {
  return render_scaled(round_ratio(amount, kPicoPerDollar, decimals), decimals);
}

std::string format_ratio(std::int64_t numer, std::int64_t denom, int decimals) {
  return render_scaled(round_ratio(numer, denom, decimals), decimals);
}

std::string format_percent(std::int64_t numer, std::int64_t denom,
                           int decimals) {
  return render_scaled(round_ratio(i128(numer) * 100, denom, decimals),
                       decimals);
}

}  // namespace skillforge::util
