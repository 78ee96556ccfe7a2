#pragma once

#include <cstdint>
#include <string>

namespace skillforge::util {

// Monetary amounts are integers throughout. Prices are integer micro-dollars
// per million tokens; multiplying by a token count lands in pico-dollars
// (10^-12 dollars) with no division, so ledger sums stay exact.
using Picodollars = std::int64_t;

constexpr Picodollars kPicoPerDollar = 1'000'000'000'000LL;
constexpr Picodollars kPicoPerMicro = 1'000'000LL;

// Rounds half-up to `decimals` fraction digits and renders "12.34".
std::string format_dollars(Picodollars amount, int decimals = 2);

// Exact half-up rounding of numer/denom at `decimals` digits, rendered as a
// decimal string. denom > 0.
std::string format_ratio(std::int64_t numer, std::int64_t denom, int decimals);

// numer/denom as a percentage, half-up at `decimals` digits ("83.1").
std::string format_percent(std::int64_t numer, std::int64_t denom,
                           int decimals = 1);

}  // namespace skillforge::util
