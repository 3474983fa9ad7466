#pragma once

#include <string>

namespace bcore {

// Exact rational on int64, always normalized (den > 0, gcd(num, den) == 1).
// Used for the grid step epsilon and for converting between integer grid
// units and display values; solver arithmetic itself stays in integer units.
struct Rat {
  long long num = 0;
  long long den = 1;

  friend bool operator==(const Rat&, const Rat&) = default;
};

// Normalizes sign and reduces. Throws MalformedInput on den == 0.
Rat make_rat(long long num, long long den);

// Parses "12", "-0.25", "3.50" exactly. Throws MalformedInput on anything
// else (empty string, stray characters, values past int64 range).
Rat parse_decimal(const std::string& text);

// Exact decimal rendering without trailing fractional zeros ("4", "0.5").
// The denominator must factor as 2^a * 5^b; every Rat produced by
// parse_decimal does. Throws std::logic_error otherwise.
std::string to_decimal_string(const Rat& r);

Rat rat_mul(const Rat& a, const Rat& b);
Rat rat_div(const Rat& a, const Rat& b);  // throws MalformedInput if b == 0

// True iff value == units * unit for an integer number of units; the count is
// stored in *units_out when given.
bool rat_is_integer_multiple(const Rat& value, const Rat& unit,
                             long long* units_out);

}  // namespace bcore
