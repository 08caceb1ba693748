// Copyright 2026 The unimod Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Weight types. Every measure, kernel and transport routine is templated on
// a scalar W; `double` is the default and `Rational` (GMP) gives exact
// arithmetic. Code that is generic over W must never bind gmpxx expression
// templates to `auto`.

#include <gmpxx.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "unimod/error.h"

namespace unimod {

using Rational = mpq_class;

template <typename W>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool kExact = true;
  static Rational from_double(double x) { return Rational(x); }
  static double to_double(const Rational& x) { return x.get_d(); }
  // "p/q", an integer, or a decimal literal such as "0.1" or "-2.5e-3",
  // which is read as the exact decimal value (0.1 -> 1/10).
  static Rational from_string(const std::string& text) {
    Rational value;
    if (text.find_first_of(".eE") != std::string::npos) return from_decimal(text);
    if (text.empty() || value.set_str(text, 10) != 0 || value.get_den() == 0) {
      throw Error(ErrorCode::kParse, "bad rational '" + text + "'");
    }
    value.canonicalize();
    return value;
  }
  static Rational from_decimal(const std::string& text) {
    auto fail = [&] { return Error(ErrorCode::kParse, "bad number '" + text + "'"); };
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
    std::string digits;
    long scale = 0;
    bool point = false;
    for (; i < text.size() && text[i] != 'e' && text[i] != 'E'; ++i) {
      if (text[i] == '.' && !point) {
        point = true;
      } else if (text[i] >= '0' && text[i] <= '9') {
        digits += text[i];
        if (point) --scale;
      } else {
        throw fail();
      }
    }
    if (digits.empty()) throw fail();
    if (i < text.size()) {
      std::size_t used = 0;
      std::string exponent = text.substr(i + 1);
      try {
        scale += std::stol(exponent, &used);
      } catch (const std::exception&) {
        throw fail();
      }
      if (used != exponent.size()) throw fail();
    }
    mpz_class numerator(digits, 10);
    mpz_class power;
    mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational value = scale < 0 ? Rational(numerator, power) : Rational(numerator * power);
    value.canonicalize();
    if (negative) value = -value;
    return value;
  }
  static std::string to_string(const Rational& x) { return x.get_str(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool kExact = false;
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
  static double from_string(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == text.size() && used > 0) return value;
    // Accept "p/q" so exact-mode files load in float mode too.
    return Rational(ScalarTraits<Rational>::from_string(text)).get_d();
  }
  static std::string to_string(double x);
};

inline std::string ScalarTraits<double>::to_string(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

template <typename W>
W magnitude(const W& x) {
  if (x < 0) return W(-x);
  return x;
}

template <typename W>
W tolerance_as(double tol) {
  return ScalarTraits<W>::from_double(tol);
}

template <typename W>
bool nearly_equal(const W& a, const W& b, double tol) {
  W diff = a - b;
  return magnitude(diff) <= tolerance_as<W>(tol);
}

template <typename W>
W max_of(const W& a, const W& b) {
  return a < b ? b : a;
}

template <typename W>
W min_of(const W& a, const W& b) {
  return b < a ? b : a;
}

}  // namespace unimod
