// Copyright 2026 dagsep project contributors.
//
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
//
// Numeric side of the library: Gaussian triangular systems A Y = eps
// sampled over a parent graph, their covariance/concentration matrices,
// least-squares regression coefficient blocks, and the sampling oracle
// that confirms or refutes structural independence statements
// numerically.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dagsep/error.hpp"
#include "dagsep/graph.hpp"
#include "dagsep/matrix.hpp"
#include "dagsep/operators.hpp"

namespace dagsep {

// |coefficient| below this is treated as a (structural) zero; above the
// dependence threshold it counts as a genuine dependence. The gap guards
// against near-cancellation coincidences, which trigger a resample.
inline constexpr double kOracleZeroTol = 1e-8;
inline constexpr double kOracleDependTol = 1e-6;
inline constexpr int kOracleMaxRounds = 5;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Independent seed for sample stream `index` under a master seed.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return detail::splitmix64(master ^ detail::splitmix64(index + 1));
}

// Seedable generator with a platform-independent uniform double; the
// mt19937_64 output sequence is pinned by the standard, and the mapping
// below avoids distribution objects, which are not.
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool coin() { return (next() & 1ULL) != 0; }

 private:
  std::mt19937_64 gen_;
};

// Bounds for sampled systems. Coefficient magnitudes are kept away from
// zero so sampled dependencies stay detectable above the oracle
// thresholds.
struct CoefficientRanges {
  double min_coef = 0.3;
  double max_coef = 1.0;
  double min_var = 0.5;
  double max_var = 2.0;
};

// A linear triangular system A Y = eps: A unit upper triangular with
// support inside the graph's arrow pattern, eps independent with
// variances delta.
struct TriangularSystem {
  RealMatrix A;                // d x d, unit diagonal, upper triangular
  std::vector<double> delta;   // d positive residual variances

  int size() const { return A.rows(); }
};

// Validates a hand-built system against its graph: unit diagonal, zeros
// off the arrow pattern, nonzero coefficients on every arrow, positive
// variances.
inline TriangularSystem make_system(const ParentGraph& g, RealMatrix a,
                                    std::vector<double> delta) {
  const int d = g.size();
  if (!a.square() || a.rows() != d)
    throw ValidationError("system matrix size does not match the graph");
  if (static_cast<int>(delta.size()) != d)
    throw ValidationError("system variance count does not match the graph");
  if (!a.all_finite()) throw ValidationError("system matrix not finite");
  for (int i = 1; i <= d; ++i) {
    if (a(i - 1, i - 1) != 1.0)
      throw ValidationError("system matrix must have unit diagonal");
    if (!(delta[i - 1] > 0.0))
      throw ValidationError("residual variances must be positive");
    for (int j = 1; j <= d; ++j) {
      if (i == j) continue;
      const bool on_arrow = i < j && g.has_arrow(i, j);
      const double x = a(i - 1, j - 1);
      if (on_arrow && x == 0.0)
        throw ValidationError("coefficient on arrow (" + std::to_string(i) +
                              "," + std::to_string(j) + ") must be nonzero");
      if (!on_arrow && x != 0.0)
        throw ValidationError("coefficient off the arrow pattern at (" +
                              std::to_string(i) + "," + std::to_string(j) +
                              ") must be zero");
    }
  }
  return TriangularSystem{std::move(a), std::move(delta)};
}

// Draws one system. Coefficients are sampled arrow by arrow in row-major
// order, then variances node by node, so the stream layout is frozen:
// identical seeds reproduce identical systems on every platform.
inline TriangularSystem sample_system(const ParentGraph& g,
                                      std::uint64_t seed,
                                      const CoefficientRanges& ranges = {}) {
  if (!(ranges.min_coef > 0.0) || ranges.min_coef > ranges.max_coef)
    throw ValidationError("coefficient bounds must satisfy 0 < min <= max");
  if (!(ranges.min_var > 0.0) || ranges.min_var > ranges.max_var)
    throw ValidationError("variance bounds must satisfy 0 < min <= max");
  const int d = g.size();
  Rand rng(seed);
  RealMatrix a = RealMatrix::identity(d);
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      if (!g.has_arrow(i, j)) continue;
      const double magnitude = rng.range(ranges.min_coef, ranges.max_coef);
      a(i - 1, j - 1) = rng.coin() ? -magnitude : magnitude;
    }
  std::vector<double> delta(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) delta[i] = rng.range(ranges.min_var,
                                                   ranges.max_var);
  return TriangularSystem{std::move(a), std::move(delta)};
}

struct GaussianMoments {
  RealMatrix sigma;  // covariance
  RealMatrix conc;   // concentration (inverse covariance)
};

namespace detail {

// Inverse of a unit upper triangular matrix by back substitution.
inline RealMatrix unit_upper_inverse(const RealMatrix& a) {
  const int n = a.rows();
  RealMatrix inv = RealMatrix::identity(n);
  for (int j = n - 1; j >= 0; --j)
    for (int i = j - 1; i >= 0; --i) {
      double s = 0.0;
      for (int k = i + 1; k <= j; ++k) s += a(i, k) * inv(k, j);
      inv(i, j) = -s;
    }
  return inv;
}

}  // namespace detail

// Covariance and concentration of the system. The two are computed by
// separate formulas and cross-checked; a mismatch only happens when the
// system is too ill-conditioned to trust, and raises.
inline GaussianMoments moments(const TriangularSystem& sys) {
  const int d = sys.size();
  const RealMatrix a_inv = detail::unit_upper_inverse(sys.A);
  RealMatrix sigma(d, d);
  {
    // sigma = A^-1 Delta A^-T
    RealMatrix scaled = a_inv;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) scaled(i, j) *= sys.delta[j];
    sigma = scaled * a_inv.transposed();
  }
  RealMatrix conc(d, d);
  {
    // conc = A^T Delta^-1 A
    RealMatrix scaled = sys.A;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) scaled(i, j) /= sys.delta[i];
    conc = sys.A.transposed() * scaled;
  }
  const RealMatrix prod = sigma * conc;
  const double scale =
      std::max(1.0, sigma.max_abs() * conc.max_abs());
  if ((prod - RealMatrix::identity(d)).max_abs() > 1e-9 * scale)
    throw InternalError("moments: covariance and concentration disagree");
  return GaussianMoments{std::move(sigma), std::move(conc)};
}

namespace detail {

inline RealMatrix sigma_block(const GaussianMoments& m, const NodeList& rows,
                              const NodeList& cols) {
  return m.sigma.sub(label_positions(rows), label_positions(cols));
}

}  // namespace detail

// Conditional covariance of Y_a and Y_b given Y_c:
// sigma_ab - sigma_ac sigma_cc^-1 sigma_cb. Empty c gives the marginal
// block; a and b may coincide (the conditional variance block).
inline RealMatrix conditional_covariance(const GaussianMoments& m,
                                         const NodeList& a, const NodeList& b,
                                         const NodeList& c) {
  if (!disjoint_nodes(a, c) || !disjoint_nodes(b, c))
    throw ValidationError(
        "conditional_covariance: c must be disjoint from a and b");
  const RealMatrix s_ab = detail::sigma_block(m, a, b);
  if (c.empty()) return s_ab;
  const RealMatrix s_ac = detail::sigma_block(m, a, c);
  const RealMatrix s_cc = detail::sigma_block(m, c, c);
  const RealMatrix s_cb = detail::sigma_block(m, c, b);
  return s_ab - s_ac * solve(s_cc, s_cb);
}

// Coefficient matrix of Y_b in least-squares regression of Y_a on Y_b
// and Y_c: sigma_ab|c sigma_bb|c^-1. Columns follow the ascending order
// of b.
inline RealMatrix partial_regression(const GaussianMoments& m,
                                     const NodeList& a, const NodeList& b,
                                     const NodeList& c) {
  if (!disjoint_nodes(a, b))
    throw ValidationError("partial_regression: a and b must be disjoint");
  if (b.empty()) return RealMatrix(static_cast<int>(a.size()), 0);
  const RealMatrix s_ab_c = conditional_covariance(m, a, b, c);
  const RealMatrix s_bb_c = conditional_covariance(m, b, b, c);
  // X = P Q^-1 via Q^T X^T = P^T.
  return solve(s_bb_c.transposed(), s_ab_c.transposed()).transposed();
}

// Coefficient matrix of Y_b in regression of Y_a on Y_b alone.
inline RealMatrix regression_coeffs(const GaussianMoments& m,
                                    const NodeList& a, const NodeList& b) {
  return partial_regression(m, a, b, {});
}

// The split of the regression of Y_a on Y_b and Y_c into the two
// coefficient blocks (one for Y_b adjusted for Y_c, one for Y_c adjusted
// for Y_b).
inline std::pair<RealMatrix, RealMatrix> coefficient_partition(
    const GaussianMoments& m, const NodeList& a, const NodeList& b,
    const NodeList& c) {
  return {partial_regression(m, a, b, c), partial_regression(m, a, c, b)};
}

// Residual of the recursion
//   coeff(a|b; cd) = coeff(a|b; c) - coeff(a|d; bc) coeff(d|b; c)
// in the max norm; identically zero for every nondegenerate Gaussian.
inline double cochran_residual(const GaussianMoments& m, const NodeList& a,
                               const NodeList& b, const NodeList& c,
                               const NodeList& dset) {
  const RealMatrix lhs = partial_regression(m, a, b, union_nodes(c, dset));
  const RealMatrix rhs =
      partial_regression(m, a, b, c) -
      partial_regression(m, a, dset, union_nodes(b, c)) *
          partial_regression(m, dset, b, c);
  return (lhs - rhs).max_abs();
}

enum class OracleStatus {
  kIndependenceConfirmed,
  kDependenceConfirmed,
  kInconclusive,
};

inline const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::kIndependenceConfirmed:
      return "independence-confirmed";
    case OracleStatus::kDependenceConfirmed:
      return "dependence-confirmed";
    case OracleStatus::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

struct OracleVerdict {
  OracleStatus status = OracleStatus::kInconclusive;
  std::vector<double> max_coefs;  // per sample, across all rounds
  int rounds = 0;
};

// Samples systems over the graph and inspects the regression coefficient
// block of the query. One coefficient above the dependence threshold
// refutes a structural zero; a round with every coefficient below the
// zero threshold confirms it. Values in the gap trigger a fresh round,
// up to the retry cap.
inline OracleVerdict verify_query(const ParentGraph& g, const Query& q,
                                  int n_samples, std::uint64_t seed,
                                  const CoefficientRanges& ranges = {}) {
  if (n_samples < 1)
    throw ValidationError("verify_query: need at least one sample");
  OracleVerdict verdict;
  for (int round = 0; round < kOracleMaxRounds; ++round) {
    verdict.rounds = round + 1;
    bool all_zero = true;
    bool any_dependent = false;
    for (int s = 0; s < n_samples; ++s) {
      const std::uint64_t sample_seed = substream_seed(
          seed, static_cast<std::uint64_t>(round) * n_samples + s);
      const TriangularSystem sys = sample_system(g, sample_seed, ranges);
      const GaussianMoments m = moments(sys);
      const double coef =
          partial_regression(m, q.alpha, q.beta, q.cond).max_abs();
      verdict.max_coefs.push_back(coef);
      if (coef >= kOracleZeroTol) all_zero = false;
      if (coef > kOracleDependTol) any_dependent = true;
    }
    if (any_dependent) {
      verdict.status = OracleStatus::kDependenceConfirmed;
      return verdict;
    }
    if (all_zero) {
      verdict.status = OracleStatus::kIndependenceConfirmed;
      return verdict;
    }
  }
  verdict.status = OracleStatus::kInconclusive;
  return verdict;
}

// One row per combination law of independence statements, checked on the
// regression coefficient scale.
struct SemigraphoidReport {
  struct Entry {
    std::string property;
    bool hypothesis_met = false;  // vacuous when false
    bool conclusion_met = false;  // meaningful only when hypothesis_met
    double conclusion_norm = 0.0;
  };
  std::vector<Entry> entries;

  bool all_hold() const {
    for (const auto& e : entries)
      if (e.hypothesis_met && !e.conclusion_met) return false;
    return true;
  }
};

// Checks the six combination laws (symmetry, decomposition, weak union,
// contraction, intersection, composition) on concrete coefficient
// matrices: whenever every hypothesis block vanishes within 1e-8, the
// conclusion block must vanish within 1e-7.
inline SemigraphoidReport linear_semigraphoid_checks(const GaussianMoments& m,
                                                     const NodeList& a,
                                                     const NodeList& b,
                                                     const NodeList& c,
                                                     const NodeList& dset) {
  constexpr double kHypTol = 1e-8;
  constexpr double kConclTol = 1e-7;
  if (!disjoint_nodes(a, b) || !disjoint_nodes(a, c) ||
      !disjoint_nodes(a, dset) || !disjoint_nodes(b, c) ||
      !disjoint_nodes(b, dset) || !disjoint_nodes(c, dset))
    throw ValidationError("semigraphoid checks: sets must be disjoint");
  SemigraphoidReport report;
  const auto pi = [&](const NodeList& x, const NodeList& y,
                      const NodeList& z) {
    return partial_regression(m, x, y, z).max_abs();
  };
  const auto add = [&](const char* name, bool hyp, double concl) {
    report.entries.push_back(
        {name, hyp, hyp && concl <= kConclTol, hyp ? concl : 0.0});
  };
  const NodeList bc = union_nodes(b, c);
  const NodeList bd = union_nodes(b, dset);
  const NodeList cd = union_nodes(c, dset);
  const NodeList ab = union_nodes(a, b);
  add("symmetry", pi(a, b, c) < kHypTol, pi(b, a, c));
  add("decomposition", pi(a, bc, dset) < kHypTol, pi(a, b, dset));
  add("weak-union", pi(a, bc, dset) < kHypTol, pi(a, b, cd));
  add("contraction", pi(a, b, c) < kHypTol && pi(a, dset, bc) < kHypTol,
      pi(a, bd, c));
  add("intersection", pi(a, b, cd) < kHypTol && pi(a, c, bd) < kHypTol,
      pi(a, bc, dset));
  add("composition", pi(a, c, dset) < kHypTol && pi(b, c, dset) < kHypTol,
      pi(ab, c, dset));
  return report;
}

}  // namespace dagsep
