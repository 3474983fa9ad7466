#include "bcore/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "bcore/errors.hpp"

namespace bcore {

namespace {

using Wide = __int128;

long long narrow(Wide x, const char* what) {
  if (x > Wide(9223372036854775807LL) || x < -Wide(9223372036854775807LL) - 1) {
    throw MalformedInput(std::string("rational overflow in ") + what);
  }
  return static_cast<long long>(x);
}

Rat normalize(Wide num, Wide den, const char* what) {
  if (den == 0) throw MalformedInput("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide a = num < 0 ? -num : num;
  Wide b = den;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rat{narrow(num, what), narrow(den, what)};
}

}  // namespace

Rat make_rat(long long num, long long den) {
  return normalize(num, den, "make_rat");
}

Rat parse_decimal(const std::string& text) {
  const char* p = text.c_str();
  const char* end = p + text.size();
  bool negative = false;
  if (p != end && (*p == '-' || *p == '+')) {
    negative = (*p == '-');
    ++p;
  }
  if (p == end) throw MalformedInput("empty decimal literal: '" + text + "'");

  Wide value = 0;
  long long frac_digits = 0;
  bool seen_digit = false;
  bool seen_dot = false;
  for (; p != end; ++p) {
    if (*p == '.') {
      if (seen_dot) throw MalformedInput("bad decimal literal: '" + text + "'");
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(*p))) {
      throw MalformedInput("bad decimal literal: '" + text + "'");
    }
    seen_digit = true;
    value = value * 10 + (*p - '0');
    if (value > Wide(1) << 100) {
      throw MalformedInput("decimal literal too large: '" + text + "'");
    }
    if (seen_dot) ++frac_digits;
  }
  if (!seen_digit) throw MalformedInput("bad decimal literal: '" + text + "'");

  Wide den = 1;
  for (long long i = 0; i < frac_digits; ++i) den *= 10;
  if (negative) value = -value;
  return normalize(value, den, "parse_decimal");
}

std::string to_decimal_string(const Rat& r) {
  long long den = r.den;
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) {
    throw std::logic_error("denominator " + std::to_string(r.den) +
                           " has no finite decimal form");
  }
  const int digits = twos > fives ? twos : fives;
  Wide scaled = Wide(r.num);
  for (int i = 0; i < digits - twos; ++i) scaled *= 2;
  for (int i = 0; i < digits - fives; ++i) scaled *= 5;

  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string raw;
  if (scaled == 0) raw = "0";
  while (scaled > 0) {
    raw.insert(raw.begin(), static_cast<char>('0' + int(scaled % 10)));
    scaled /= 10;
  }
  while (static_cast<long long>(raw.size()) <= digits) raw.insert(raw.begin(), '0');

  std::string out;
  if (negative) out += '-';
  out += raw.substr(0, raw.size() - digits);
  if (digits > 0) {
    std::string frac = raw.substr(raw.size() - digits);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) {
      out += '.';
      out += frac;
    }
  }
  return out;
}

Rat rat_mul(const Rat& a, const Rat& b) {
  return normalize(Wide(a.num) * b.num, Wide(a.den) * b.den, "rat_mul");
}

Rat rat_div(const Rat& a, const Rat& b) {
  if (b.num == 0) throw MalformedInput("division by zero rational");
  return normalize(Wide(a.num) * b.den, Wide(a.den) * b.num, "rat_div");
}

bool rat_is_integer_multiple(const Rat& value, const Rat& unit,
                             long long* units_out) {
  // value / unit = value.num * unit.den / (value.den * unit.num)
  const Wide num = Wide(value.num) * unit.den;
  const Wide den = Wide(value.den) * unit.num;
  if (den == 0) throw MalformedInput("zero grid step");
  if (num % den != 0) return false;
  if (units_out != nullptr) *units_out = narrow(num / den, "grid conversion");
  return true;
}

}  // namespace bcore
