#pragma once
// Shared smooth-driver fixture: X_t = (t, sin t) on [0, 1], f_0 = 1/2 - y²/4, f_1 = degree-7 Taylor of cos.

#include <cmath>
#include <vector>

#include "mirp/elementary.hpp"
#include "mirp/roughpath.hpp"

namespace fixture {

inline std::vector<std::vector<double>> sine_samples(unsigned level) {
  const std::size_t n = std::size_t{1} << level;
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n);
    rows.push_back({t, std::sin(t)});
  }
  return rows;
}

inline mirp::RoughPathGrid sine_path(unsigned level, const mirp::Grading& g) {
  return mirp::lift_piecewise_linear(sine_samples(level), g);
}

inline mirp::Polynomial cos_taylor() {
  using mirp::Rational;
  return mirp::Polynomial({Rational(1), Rational(0), Rational(-1, 2), Rational(0), Rational(1, 24), Rational(0),
                           Rational(-1, 720)});
}

inline mirp::Polynomial drift() {
  using mirp::Rational;
  return mirp::Polynomial({Rational(1, 2), Rational(0), Rational(-1, 4)});
}

inline mirp::PolynomialField cos_field() { return mirp::PolynomialField({drift(), cos_taylor()}); }


}  // namespace fixture
