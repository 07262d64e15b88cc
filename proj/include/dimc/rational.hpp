#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace dimc {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace dimc
