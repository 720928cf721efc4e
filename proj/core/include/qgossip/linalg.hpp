#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "qgossip/errors.hpp"
#include "qgossip/rational.hpp"

namespace qgossip {

namespace detail {

inline double magnitude(double v) { return std::fabs(v); }
inline Rational magnitude(const Rational& v) { return v.abs(); }

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Rational& v) { return v.num() == 0; }

}  // namespace detail

/// Solves A x = b by Gaussian elimination with partial pivoting. Works over
/// double and over Rational (exact). Throws NoFiniteHittingTimeError on a
/// structurally singular system.
template <typename T>
std::vector<T> solve_linear_system(std::vector<std::vector<T>> a, std::vector<T> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (detail::magnitude(a[row][col]) > detail::magnitude(a[pivot][col])) pivot = row;
    }
    if (detail::is_zero(a[pivot][col])) {
      throw NoFiniteHittingTimeError("linear system is singular");
    }
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      if (detail::is_zero(a[row][col])) continue;
      const T factor = a[row][col] / a[col][col];
      a[row][col] = T(0);
      for (std::size_t k = col + 1; k < n; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  std::vector<T> x(n, T(0));
  for (std::size_t row = n; row-- > 0;) {
    T acc = b[row];
    for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
    x[row] = acc / a[row][row];
  }
  return x;
}

}  // namespace qgossip
