#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace hemd {

// Exact rational number. Matching scores, solver objectives and metric
// values are kept in this form end to end; floating point only appears
// at the serialization boundary.
using Fraction = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses a plain decimal literal ("0.35", "-2", "1.0") into an exact
// fraction. Throws std::invalid_argument on anything else.
Fraction parse_decimal(const std::string& text);

inline double to_double(const Fraction& f) { return f.convert_to<double>(); }

}  // namespace hemd
