#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qgossip/errors.hpp"
#include "qgossip/linalg.hpp"
#include "qgossip/rational.hpp"

namespace qgossip {

/// Finite Markov chain: labeled states, row-stochastic matrix, nonempty
/// target set whose mean hitting times are wanted. Target states may be
/// absorbing but need not be; the hitting time is first entry.
template <typename T>
struct BasicChainSpec {
  std::vector<std::string> labels;
  std::vector<std::vector<T>> rows;  // rows[i][j] = one-step probability i -> j
  std::vector<int> target;           // indices into labels
};

using ChainSpec = BasicChainSpec<double>;
using RationalChainSpec = BasicChainSpec<Rational>;

namespace detail {

inline bool row_sum_ok(double sum) { return std::fabs(sum - 1.0) <= 1e-12; }
inline bool row_sum_ok(const Rational& sum) { return sum == Rational(1); }

inline bool nonnegative(double v) { return v >= 0.0; }
inline bool nonnegative(const Rational& v) { return v >= Rational(0); }

inline bool positive(double v) { return v > 0.0; }
inline bool positive(const Rational& v) { return v > Rational(0); }

}  // namespace detail

template <typename T>
void validate_chain(const BasicChainSpec<T>& chain) {
  const std::size_t k = chain.labels.size();
  if (k == 0) throw std::invalid_argument("chain: no states");
  if (chain.rows.size() != k) throw std::invalid_argument("chain: matrix is not k x k");
  for (const auto& row : chain.rows) {
    if (row.size() != k) throw std::invalid_argument("chain: matrix is not k x k");
    T sum = T(0);
    for (const T& p : row) {
      if (!detail::nonnegative(p)) throw std::invalid_argument("chain: negative probability");
      sum += p;
    }
    if (!detail::row_sum_ok(sum)) throw std::invalid_argument("chain: row does not sum to 1");
  }
  if (chain.target.empty()) throw std::invalid_argument("chain: empty target set");
  for (int t : chain.target) {
    if (t < 0 || static_cast<std::size_t>(t) >= k) {
      throw std::invalid_argument("chain: target index out of range");
    }
  }
}

/// Mean hitting times of the target set via the first-step equations:
/// E_i = 0 on the target, E_i = sum_j P_ij E_j + 1 elsewhere. Dense solve
/// with partial pivoting; exact when T is Rational. Throws
/// NoFiniteHittingTimeError when the target is unreachable from some state
/// or the system is singular; for doubles the solution is rejected unless
/// the relative residual is at most 1e-9.
template <typename T>
std::vector<T> solve_hitting_times(const BasicChainSpec<T>& chain) {
  validate_chain(chain);
  const std::size_t k = chain.labels.size();
  std::vector<char> is_target(k, 0);
  for (int t : chain.target) is_target[static_cast<std::size_t>(t)] = 1;

  // Every state must reach the target; walk the support graph backward.
  std::vector<char> reaches = is_target;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (reaches[i]) continue;
      for (std::size_t j = 0; j < k; ++j) {
        if (reaches[j] && detail::positive(chain.rows[i][j])) {
          reaches[i] = 1;
          changed = true;
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!reaches[i]) {
      throw NoFiniteHittingTimeError("solve_hitting_times: target unreachable from state '" +
                                     chain.labels[i] + "'");
    }
  }

  std::vector<int> transient;
  for (std::size_t i = 0; i < k; ++i) {
    if (!is_target[i]) transient.push_back(static_cast<int>(i));
  }

  const std::size_t m = transient.size();
  std::vector<std::vector<T>> a(m, std::vector<T>(m, T(0)));
  std::vector<T> b(m, T(1));
  for (std::size_t r = 0; r < m; ++r) {
    const auto i = static_cast<std::size_t>(transient[r]);
    for (std::size_t c = 0; c < m; ++c) {
      const auto j = static_cast<std::size_t>(transient[c]);
      a[r][c] = (r == c ? T(1) : T(0)) - chain.rows[i][j];
    }
  }
  const std::vector<T> e = solve_linear_system(a, b);

  if constexpr (std::is_same_v<T, double>) {
    double scale = 1.0;
    for (double v : e) scale = std::max(scale, std::fabs(v));
    for (std::size_t r = 0; r < m; ++r) {
      double residual = -b[r];
      for (std::size_t c = 0; c < m; ++c) residual += a[r][c] * e[c];
      if (std::fabs(residual) > 1e-9 * scale) {
        throw NoFiniteHittingTimeError("solve_hitting_times: solution residual too large");
      }
    }
  }

  std::vector<T> result(k, T(0));
  for (std::size_t r = 0; r < m; ++r) result[static_cast<std::size_t>(transient[r])] = e[r];
  return result;
}

/// Steps until the chain, started at state index `start`, first enters the
/// target set.
std::int64_t simulate_chain(const ChainSpec& chain, int start, std::mt19937_64& rng);

/// Reads "states <k> target <labels...>" followed by k rows of k
/// probabilities; states are labeled "1".."k".
ChainSpec parse_chain_file(std::istream& in);

// --- chain I: birth-death, both ends absorbing, p_z == q_z --------------

/// States 0..length with 0 and length absorbing; p[z-1]/q[z-1] are the up-
/// and down-probabilities of state z. The closed form requires p == q.
template <typename T>
struct BasicChainIParams {
  int length = 0;
  std::vector<T> p;
  std::vector<T> q;
};
using ChainIParams = BasicChainIParams<double>;

// --- chain II: one absorbing end ----------------------------------------

/// States 1..length with length absorbing; p[z-1] for z = 1..length-1,
/// q[z-2] for z = 2..length-1 (state 1 has no down-transition).
template <typename T>
struct BasicChainIIParams {
  int length = 0;
  std::vector<T> p;
  std::vector<T> q;
};
using ChainIIParams = BasicChainIIParams<double>;

// --- chain III: two coupled rows, absorbing state reached from the upper row

/// Upper and lower rows share the p, q, d columns; the lower row at
/// length-1 lacks the p-transition and the d-transitions swap rows.
/// p[z-1] for z = 1..length-1, q[z-2] for z = 2..length-1, d[z-1] for
/// z = 1..length-1.
template <typename T>
struct BasicChainIIIParams {
  int length = 0;
  std::vector<T> p;
  std::vector<T> q;
  std::vector<T> d;
};
using ChainIIIParams = BasicChainIIIParams<double>;

namespace detail {

template <typename T>
void check_probability_count(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string("chain params: wrong number of ") + what);
  }
}

}  // namespace detail

/// E_z = (1 - z/n) sum_{i=1}^{z-1} i/p_i + (z/n) sum_{j=z}^{n-1} (n-j)/p_j.
template <typename T>
T chain_i_closed_form(const BasicChainIParams<T>& c, int z) {
  const int n = c.length;
  if (n < 2) throw std::invalid_argument("chain I: length must be >= 2");
  detail::check_probability_count<T>(c.p.size(), static_cast<std::size_t>(n - 1), "p entries");
  detail::check_probability_count<T>(c.q.size(), static_cast<std::size_t>(n - 1), "q entries");
  for (int i = 0; i < n - 1; ++i) {
    if (!(c.p[static_cast<std::size_t>(i)] == c.q[static_cast<std::size_t>(i)])) {
      throw HypothesisViolationError("chain I closed form requires p_z == q_z");
    }
  }
  if (z < 1 || z > n - 1) throw std::invalid_argument("chain I: start state out of range");
  T left = T(0);
  for (int i = 1; i <= z - 1; ++i) left += T(i) / c.p[static_cast<std::size_t>(i - 1)];
  T right = T(0);
  for (int j = z; j <= n - 1; ++j) right += T(n - j) / c.p[static_cast<std::size_t>(j - 1)];
  return (T(1) - T(z) / T(n)) * left + (T(z) / T(n)) * right;
}

namespace detail {

/// G(l) = (prod_{i=2}^{l} q_i/p_i) / p_1 + sum_{j=2}^{l} (prod_{i=j+1}^{l} q_i/p_i) / p_j,
/// computed by the recurrence G(l) = (q_l/p_l) G(l-1) + 1/p_l, G(1) = 1/p_1.
/// Shared by the chain II and chain III closed forms.
template <typename T>
std::vector<T> closed_form_terms(const std::vector<T>& p, const std::vector<T>& q, int length) {
  std::vector<T> g(static_cast<std::size_t>(length - 1));
  if (!positive(p[0])) throw std::domain_error("closed form: p_1 must be positive");
  g[0] = T(1) / p[0];
  for (int l = 2; l <= length - 1; ++l) {
    const T& pl = p[static_cast<std::size_t>(l - 1)];
    if (!positive(pl)) throw std::domain_error("closed form: p_z must be positive");
    g[static_cast<std::size_t>(l - 1)] =
        (q[static_cast<std::size_t>(l - 2)] / pl) * g[static_cast<std::size_t>(l - 2)] + T(1) / pl;
  }
  return g;
}

}  // namespace detail

/// Mean hitting time of state n from state z; empty products are 1 and empty
/// sums are 0, so z == 1 adds the extra 1/p_1 term.
template <typename T>
T chain_ii_closed_form(const BasicChainIIParams<T>& c, int z) {
  const int n = c.length;
  if (n < 2) throw std::invalid_argument("chain II: length must be >= 2");
  detail::check_probability_count<T>(c.p.size(), static_cast<std::size_t>(n - 1), "p entries");
  detail::check_probability_count<T>(c.q.size(), static_cast<std::size_t>(n >= 3 ? n - 2 : 0),
                                     "q entries");
  if (z < 1 || z > n - 1) throw std::invalid_argument("chain II: start state out of range");
  const std::vector<T> g = detail::closed_form_terms(c.p, c.q, n);
  T total = T(0);
  for (int l = std::max(z, 2); l <= n - 1; ++l) total += g[static_cast<std::size_t>(l - 1)];
  if (z == 1) total += g[0];
  return total;
}

/// Exact mean hitting time for the upper-row state n-1 (all G terms doubled)
/// plus the (1 + p_{n-1}/d_{n-1}) multiplicative bound for the lower row.
template <typename T>
std::pair<T, T> chain_iii_closed_form(const BasicChainIIIParams<T>& c) {
  const int n = c.length;
  if (n < 2) throw std::invalid_argument("chain III: length must be >= 2");
  detail::check_probability_count<T>(c.p.size(), static_cast<std::size_t>(n - 1), "p entries");
  detail::check_probability_count<T>(c.q.size(), static_cast<std::size_t>(n >= 3 ? n - 2 : 0),
                                     "q entries");
  detail::check_probability_count<T>(c.d.size(), static_cast<std::size_t>(n - 1), "d entries");
  if (!detail::positive(c.d.back())) {
    throw std::domain_error("chain III: d_{n-1} must be positive for the lower-row bound");
  }
  const std::vector<T> g = detail::closed_form_terms(c.p, c.q, n);
  const T exact_upper = T(2) * g.back();
  const T bound = (T(1) + c.p.back() / c.d.back()) * exact_upper;
  return {exact_upper, bound};
}

// --- chain-spec assembly --------------------------------------------------

template <typename T>
BasicChainSpec<T> to_chain_spec(const BasicChainIParams<T>& c) {
  const int n = c.length;
  BasicChainSpec<T> spec;
  const auto k = static_cast<std::size_t>(n + 1);
  spec.rows.assign(k, std::vector<T>(k, T(0)));
  for (int z = 0; z <= n; ++z) spec.labels.push_back(std::to_string(z));
  spec.rows[0][0] = T(1);
  spec.rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(n)] = T(1);
  for (int z = 1; z <= n - 1; ++z) {
    const auto zi = static_cast<std::size_t>(z);
    const T p = c.p[zi - 1];
    const T q = c.q[zi - 1];
    spec.rows[zi][zi + 1] = p;
    spec.rows[zi][zi - 1] = q;
    spec.rows[zi][zi] = T(1) - p - q;
  }
  spec.target = {0, n};
  return spec;
}

template <typename T>
BasicChainSpec<T> to_chain_spec(const BasicChainIIParams<T>& c) {
  const int n = c.length;
  BasicChainSpec<T> spec;
  const auto k = static_cast<std::size_t>(n);
  spec.rows.assign(k, std::vector<T>(k, T(0)));
  for (int z = 1; z <= n; ++z) spec.labels.push_back(std::to_string(z));
  spec.rows[k - 1][k - 1] = T(1);
  for (int z = 1; z <= n - 1; ++z) {
    const auto zi = static_cast<std::size_t>(z - 1);
    const T p = c.p[zi];
    const T q = z >= 2 ? c.q[static_cast<std::size_t>(z - 2)] : T(0);
    spec.rows[zi][zi + 1] = p;
    if (z >= 2) spec.rows[zi][zi - 1] = q;
    spec.rows[zi][zi] = T(1) - p - q;
  }
  spec.target = {n - 1};
  return spec;
}

/// State order: 1u, 1l, 2u, 2l, ..., (n-1)u, (n-1)l, n. The absorbing state
/// n is reachable only from (n-1)u.
template <typename T>
BasicChainSpec<T> to_chain_spec(const BasicChainIIIParams<T>& c) {
  const int n = c.length;
  BasicChainSpec<T> spec;
  const auto k = static_cast<std::size_t>(2 * (n - 1) + 1);
  spec.rows.assign(k, std::vector<T>(k, T(0)));
  const auto upper = [](int z) { return static_cast<std::size_t>(2 * (z - 1)); };
  const auto lower = [](int z) { return static_cast<std::size_t>(2 * (z - 1) + 1); };
  const std::size_t absorbing = k - 1;
  for (int z = 1; z <= n - 1; ++z) {
    spec.labels.push_back(std::to_string(z) + "u");
    spec.labels.push_back(std::to_string(z) + "l");
  }
  spec.labels.push_back(std::to_string(n));
  spec.rows[absorbing][absorbing] = T(1);

  for (int z = 1; z <= n - 1; ++z) {
    const T p = c.p[static_cast<std::size_t>(z - 1)];
    const T q = z >= 2 ? c.q[static_cast<std::size_t>(z - 2)] : T(0);
    const T d = c.d[static_cast<std::size_t>(z - 1)];

    // upper row: p moves right (into the absorbing state at z = n-1)
    T up_out = d;
    spec.rows[upper(z)][lower(z)] = d;
    spec.rows[upper(z)][z == n - 1 ? absorbing : upper(z + 1)] = p;
    up_out += p;
    if (z >= 2) {
      spec.rows[upper(z)][upper(z - 1)] = q;
      up_out += q;
    }
    spec.rows[upper(z)][upper(z)] = T(1) - up_out;

    // lower row: no p-transition at z = n-1
    T low_out = d;
    spec.rows[lower(z)][upper(z)] = d;
    if (z <= n - 2) {
      spec.rows[lower(z)][lower(z + 1)] = p;
      low_out += p;
    }
    if (z >= 2) {
      spec.rows[lower(z)][lower(z - 1)] = q;
      low_out += q;
    }
    spec.rows[lower(z)][lower(z)] = T(1) - low_out;
  }
  spec.target = {static_cast<int>(absorbing)};
  return spec;
}

// --- the protocol-specific chain families ---------------------------------

/// QC from an X_1 state: p_z = q_z = z(n-z) / (n(n-1)).
template <typename T = double>
BasicChainIParams<T> build_chain_i_qc(int n) {
  if (n < 2) throw std::invalid_argument("build_chain_i_qc: n must be >= 2");
  const T p = T(1) / T(static_cast<std::int64_t>(n) * (n - 1));
  BasicChainIParams<T> c;
  c.length = n;
  for (int z = 1; z <= n - 1; ++z) {
    const T rate = T(static_cast<std::int64_t>(z) * (n - z)) * p;
    c.p.push_back(rate);
    c.q.push_back(rate);
  }
  return c;
}

/// QA one-decrement structure from the level set one step away from average
/// consensus: p_1 = (n-2)p, d_1 = p; p_{n-1} = p, q_{n-1} = (n-2)p,
/// d_{n-1} = (n-1)p; p_z = (n-1-z)z p, q_z = (z-1)p, d_z = z p in between.
template <typename T = double>
BasicChainIIIParams<T> build_chain_iii_l1(int n) {
  if (n < 4) throw std::invalid_argument("build_chain_iii_l1: n must be >= 4");
  const T p = T(1) / T(static_cast<std::int64_t>(n) * (n - 1));
  BasicChainIIIParams<T> c;
  c.length = n;
  c.p.push_back(T(n - 2) * p);
  c.d.push_back(p);
  for (int z = 2; z <= n - 2; ++z) {
    c.p.push_back(T(static_cast<std::int64_t>(n - 1 - z) * z) * p);
    c.q.push_back(T(z - 1) * p);
    c.d.push_back(T(z) * p);
  }
  c.p.push_back(p);
  c.q.push_back(T(n - 2) * p);
  c.d.push_back(T(n - 1) * p);
  return c;
}

/// Same family for the deeper level sets: d_z = (z-1)p and d_{n-1} = (n-2)p,
/// sharing the p and q columns with the one-step family.
template <typename T = double>
BasicChainIIIParams<T> build_chain_iii_lgeq2(int n) {
  BasicChainIIIParams<T> c = build_chain_iii_l1<T>(n);
  const T p = T(1) / T(static_cast<std::int64_t>(n) * (n - 1));
  for (int z = 2; z <= n - 2; ++z) c.d[static_cast<std::size_t>(z - 1)] = T(z - 1) * p;
  c.d.back() = T(n - 2) * p;
  return c;
}

/// Maximum-state decay chain of length floor(R/2) + 1 for the remainder
/// phase: p_1 = h(n-h)p, p_z = (h-z+1)(n-h)p, q_z = (z-1)(h-z+1)p with
/// h = floor(R/2). Odd R uses the same formulas with the floored h.
template <typename T = double>
BasicChainIIParams<T> build_chain_ii_qa_maxdecay(int n, int R) {
  if (R < 2) throw std::invalid_argument("build_chain_ii_qa_maxdecay: decay phase empty for R < 2");
  if (R > n - 1) throw std::invalid_argument("build_chain_ii_qa_maxdecay: R must be < n");
  const int h = R / 2;
  const T p = T(1) / T(static_cast<std::int64_t>(n) * (n - 1));
  BasicChainIIParams<T> c;
  c.length = h + 1;
  c.p.push_back(T(static_cast<std::int64_t>(h) * (n - h)) * p);
  for (int z = 2; z <= h; ++z) {
    c.p.push_back(T(static_cast<std::int64_t>(h - z + 1) * (n - h)) * p);
    c.q.push_back(T(static_cast<std::int64_t>(z - 1) * (h - z + 1)) * p);
  }
  return c;
}

}  // namespace qgossip
