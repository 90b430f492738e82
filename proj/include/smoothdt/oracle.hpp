#pragma once

#include "smoothdt/fourier.hpp"

#include <cstdint>
#include <vector>

namespace smoothdt {

/// The analysis-side parameter pack derived from (c, s, epsilon, m) and the
/// realized means. Consumed only by tests and reports, never by the learner.
struct AnalysisParams {
    double c = 0.0;
    double epsilon = 0.0;
    std::size_t s = 0;
    std::size_t m = 0;

    double d = 0.0;         // (2/c) ln(12 s / epsilon)
    double beta = 0.0;      // (epsilon / (12 s))^{1 + 2/c}
    double t = 0.0;         // m^{-1/3}
    double tau = 0.0;       // t sqrt(epsilon) / 4
    double depth_cap = 0.0; // (ln m)/12 * (1 - max|mu|)
    bool theorem_regime = false; // depth_cap > d

    static AnalysisParams compute(double c, std::size_t s, double epsilon,
                                  std::size_t m, double max_abs_mu);
};

/// {S : |S| <= degree_cap, |hat f(S,mu)| >= threshold}, exact by full
/// expansion. Parseval caps the count at threshold^{-2} for Boolean f.
struct HeavySet {
    double threshold = 0.0;
    int degree_cap = 0;
    std::vector<SubsetIndex> sets; // ascending mask order

    bool contains(SubsetIndex s) const;
    std::size_t size() const { return sets.size(); }
};

HeavySet heavy_set(const PointFn& f, const ProductDist& dist, double theta,
                   int degree_cap, int enum_cap = kEnumCap);

/// sum of hat f(S,mu)^2 over S with |hat f(S,mu)| >= beta and |S| <= d.
double sparse_approx_mass(const PointFn& f, const ProductDist& dist,
                          double beta, int d, int enum_cap = kEnumCap);
/// 1 - (4 (1-c/2)^d s + 2^{d+2} beta); may be nonpositive, in which case
/// the retained-mass comparison is vacuous.
double sparse_approx_bound(double c, std::size_t s, int d, double beta);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
};

/// Monte-Carlo Pr over x uniform on [-1,1]^d of |x_1 ... x_d| <= epsilon.
/// Trials use per-trial derived generators; the count aggregation is
/// order-independent, so any worker count gives the same estimate.
MonteCarloEstimate sz_probability(int d, double epsilon, std::size_t trials,
                                  std::uint64_t seed, int workers = 1);
/// Closed forms: exact for d = 1 (epsilon) and d = 2
/// (epsilon (1 + ln(1/epsilon))).
double sz_exact(int d, double epsilon);
/// epsilon * sum_{i<d} ln^i(1/epsilon)/i!, the value independent
/// integration yields for every d; the brute-force oracle is authoritative
/// where published closed forms disagree.
double sz_series(int d, double epsilon);
/// 2^d sqrt(epsilon).
double sz_bound(int d, double epsilon);

enum class CoeffNorm { Hat, Bar };

/// Per-trial statistic min over pairs T <= U (|U| <= degree_cap,
/// |coeff(U)| >= b) of |coeff(T)|, with +inf when no U qualifies and
/// structurally absent coefficients counting as exact zeros. The frequency
/// of the exists-event {some |coeff(T)| <= a under a heavy U} for any a is
/// then #{stat <= a}/trials, monotone in a by construction.
std::vector<double> propagation_min_stats(const PointFn& f,
                                          std::span<const double> base_mu,
                                          double c, double b, int degree_cap,
                                          std::size_t trials,
                                          std::uint64_t seed, CoeffNorm norm,
                                          int workers = 1,
                                          int enum_cap = kEnumCap);
double propagation_frequency(const PointFn& f, std::span<const double> base_mu,
                             double c, double a, double b, int degree_cap,
                             std::size_t trials, std::uint64_t seed,
                             CoeffNorm norm, int workers = 1,
                             int enum_cap = kEnumCap);
double propagation_frequency(std::span<const double> min_stats, double a);

/// sqrt(a/b) (4/c)^{k/2} for one pair with |U \ T| = k.
double propagation_pair_bound(double a, double b, double c, int diff_size);
/// Union form in bar coefficients: a^{1/2} b^{-5/2} 4^d c^{-3d/2}.
double propagation_union_bound_bar(double a, double b, double c, int d);
/// Union form in hat coefficients: alpha^{1/2} beta^{-5/2} (2/c)^{2d}.
double propagation_union_bound_hat(double alpha, double beta, double c, int d);

/// E_{D_mu}[(p(x) - f(x))^2], computed both by pointwise enumeration and
/// through the coefficient route; the two must agree to 1e-9 or this
/// throws. p must be a z-character table at dist's mu.
double exact_squared_loss(const SparsePoly& p, const ProductDist& dist,
                          const PointFn& f, int enum_cap = kEnumCap);

} // namespace smoothdt
