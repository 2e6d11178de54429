#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "carnot/errors.hpp"

namespace carnot {

/// Exact rational scalar. Every algebra-level decision (rank, span membership,
/// subspace equality) is computed in this type so that yes/no answers never
/// depend on a floating-point tolerance.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Parse "3", "-4", "1/2", "-7/3". Whitespace is not accepted.
inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    boost::multiprecision::cpp_int num, den = 1;
    try {
        if (slash == std::string::npos) {
            num = boost::multiprecision::cpp_int(s);
        } else {
            num = boost::multiprecision::cpp_int(s.substr(0, slash));
            den = boost::multiprecision::cpp_int(s.substr(slash + 1));
        }
    } catch (const std::exception&) {
        throw parse_error("not a rational number: '" + s + "'");
    }
    if (den == 0) throw parse_error("rational with zero denominator: '" + s + "'");
    return Rational(num, den);
}

inline std::string format_rational(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

} // namespace carnot
