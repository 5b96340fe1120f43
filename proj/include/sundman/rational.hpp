#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace sundman {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rat& r) { return rat_den(r) == 1; }

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

inline long to_long(const Rat& r) { return rat_num(r).template convert_to<long>(); }

std::string rat_to_string(const Rat& r);

// Exact integer n-th root if it exists.
std::optional<Int> iroot(const Int& value, unsigned n);

// c^(p/q) when the result is rational; requires c > 0 or an odd root.
std::optional<Rat> rat_pow_exact(const Rat& base, const Rat& expo);

// Integer power, expo may be negative (base must be nonzero then).
Rat rat_pow_int(const Rat& base, long expo);

Rat rat_gcd(const Rat& a, const Rat& b);

// Exact value of the (dyadic) double.
Rat rat_from_double(double v);

}  // namespace sundman
