#pragma once

#include "smoothdt/fourier.hpp"

#include <iosfwd>
#include <optional>

namespace smoothdt {

enum class MuSource {
    Exact,    // use the mean vector recorded with the dataset
    Estimated // re-estimate means from the same examples, then clamp
};

/// Knobs for the frontier learner. The defaults reproduce the stated rule:
/// threshold t = m^{-1/3} and depth cap D = floor((ln m)/12 * (1 - max|mu|)),
/// with natural log (the |z_S| <= m^{1/12} bound needs base e). Both are
/// overridable; at desk-scale m the default D is 0 and the loop body never
/// runs, leaving the sign of e(empty) as the hypothesis.
struct LearnerConfig {
    double c = 0.1;
    MuSource mu_source = MuSource::Exact;
    std::optional<double> threshold;
    std::optional<int> depth_cap;
    std::optional<std::size_t> frontier_cap; // default m
    int workers = 1;

    double resolve_threshold(std::size_t m) const;
    int resolve_depth_cap(std::size_t m, double max_abs_mu) const;
    std::size_t resolve_frontier_cap(std::size_t m) const;
};

/// The cumulative families S_0 <= S_1 <= ... <= S_D in discovery order
/// (the empty set first, then per level: parent insertion order with the
/// extension variable ascending), each with its stored estimate e(S).
struct Frontier {
    std::vector<SubsetIndex> sets;
    std::vector<double> estimates;
    std::vector<std::size_t> level_sizes; // |S_d| for d = 0..D

    bool contains(SubsetIndex s) const;
    std::optional<double> estimate_of(SubsetIndex s) const;
};

/// Polynomial threshold hypothesis: sign of a sparse polynomial in the z
/// basis at the learner's mu; ties go to +1.
struct Hypothesis {
    SparsePoly poly;
    int predict(std::span<const std::int8_t> x) const;
};

struct LearnDiagnostics {
    double threshold = 0.0;
    int depth_cap = 0;
    std::size_t frontier_cap = 0;
    std::size_t estimates_computed = 0;
    std::vector<double> mu; // the means actually used
};

/// FAIL (frontier overflow) is an outcome, not an exception.
struct LearnOutcome {
    bool fail = false;
    std::optional<Hypothesis> hypothesis;
    Frontier frontier;
    LearnDiagnostics diag;
};

/// Top-down heavy-coefficient discovery: z-transform the data, grow S_d by
/// keeping extensions S u {i} with |e(S u {i})| >= t (ties retained), abort
/// with FAIL when |S_d| exceeds the frontier cap, then output the sign of
/// the polynomial built from the retained estimates. Candidate order is
/// deterministic and duplicates are estimated once; identical inputs give
/// identical outcomes for any worker count.
LearnOutcome learn(const Dataset& data, const LearnerConfig& config);

double empirical_error(const Hypothesis& h, const ProductDist& dist,
                       const PointFn& f, std::size_t trials,
                       std::mt19937_64& rng);
/// Disagreement probability by weighted enumeration of all 2^n points.
double exact_error(const Hypothesis& h, const ProductDist& dist,
                   const PointFn& f, int enum_cap = kEnumCap);

/// Coefficient-table CSV prefixed with one header line recording n and mu.
void write_hypothesis_csv(std::ostream& out, const Hypothesis& h);
Hypothesis read_hypothesis_csv(std::istream& in);

} // namespace smoothdt
