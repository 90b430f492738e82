#include "smoothdt/oracle.hpp"

#include "smoothdt/rng.hpp"
#include "smoothdt/util.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smoothdt {

AnalysisParams AnalysisParams::compute(double c, std::size_t s, double epsilon,
                                       std::size_t m, double max_abs_mu) {
    if (!(c > 0.0) || !(c < 0.5))
        throw std::invalid_argument("AnalysisParams: c must lie in (0, 1/2)");
    if (s < 1 || m < 1 || !(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("AnalysisParams: bad s, m, or epsilon");
    AnalysisParams p;
    p.c = c;
    p.epsilon = epsilon;
    p.s = s;
    p.m = m;
    p.d = (2.0 / c) * std::log(12.0 * static_cast<double>(s) / epsilon);
    p.beta = std::pow(epsilon / (12.0 * static_cast<double>(s)), 1.0 + 2.0 / c);
    p.t = std::pow(static_cast<double>(m), -1.0 / 3.0);
    p.tau = p.t * std::sqrt(epsilon) / 4.0;
    p.depth_cap =
        std::log(static_cast<double>(m)) / 12.0 * (1.0 - max_abs_mu);
    p.theorem_regime = p.depth_cap > p.d;
    return p;
}

bool HeavySet::contains(SubsetIndex s) const {
    return std::binary_search(sets.begin(), sets.end(), s);
}

HeavySet heavy_set(const PointFn& f, const ProductDist& dist, double theta,
                   int degree_cap, int enum_cap) {
    if (!(theta > 0.0))
        throw std::invalid_argument("heavy_set: threshold must be > 0");
    if (degree_cap < 0)
        throw std::invalid_argument("heavy_set: negative degree cap");
    const SparsePoly table = expand_exact_up_to(f, dist, degree_cap, enum_cap);
    HeavySet out;
    out.threshold = theta;
    out.degree_cap = degree_cap;
    for (const auto& [s, v] : table.coeffs())
        if (std::abs(v) >= theta) out.sets.push_back(s);
    // map order is ascending mask order already
    return out;
}

double sparse_approx_mass(const PointFn& f, const ProductDist& dist,
                          double beta, int d, int enum_cap) {
    if (beta < 0.0)
        throw std::invalid_argument("sparse_approx_mass: beta must be >= 0");
    if (d < 0) throw std::invalid_argument("sparse_approx_mass: d must be >= 0");
    const SparsePoly table =
        expand_exact_up_to(f, dist, std::min(d, dist.n()), enum_cap);
    double mass = 0.0;
    for (const auto& [s, v] : table.coeffs())
        if (std::abs(v) >= beta) mass += v * v;
    return mass;
}

double sparse_approx_bound(double c, std::size_t s, int d, double beta) {
    return 1.0 - (4.0 * std::pow(1.0 - c / 2.0, d) * static_cast<double>(s) +
                  std::pow(2.0, d + 2) * beta);
}

MonteCarloEstimate sz_probability(int d, double epsilon, std::size_t trials,
                                  std::uint64_t seed, int workers) {
    if (d < 1) throw std::invalid_argument("sz_probability: d must be >= 1");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("sz_probability: epsilon must be in (0,1)");
    if (trials < 1)
        throw std::invalid_argument("sz_probability: trials must be >= 1");

    constexpr std::size_t kChunk = 1 << 14;
    const std::size_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::size_t> hits(chunks, 0);
    parallel_for(chunks, workers, [&](std::size_t chunk) {
        const std::size_t lo = chunk * kChunk;
        const std::size_t hi = std::min(trials, lo + kChunk);
        std::size_t count = 0;
        for (std::size_t k = lo; k < hi; ++k) {
            SplitMix64 rng(derive_seed(seed, "sz-trial", k));
            double prod = 1.0;
            for (int i = 0; i < d; ++i) prod *= uniform_symmetric(rng, 1.0);
            if (std::abs(prod) <= epsilon) ++count;
        }
        hits[chunk] = count;
    });
    std::size_t total = 0;
    for (auto h : hits) total += h;
    MonteCarloEstimate est;
    est.trials = trials;
    est.estimate = static_cast<double>(total) / static_cast<double>(trials);
    est.stderr_ = std::sqrt(est.estimate * (1.0 - est.estimate) /
                            static_cast<double>(trials));
    return est;
}

double sz_exact(int d, double epsilon) {
    if (d == 1) return epsilon;
    if (d == 2) return epsilon * (1.0 + std::log(1.0 / epsilon));
    throw std::invalid_argument("sz_exact: closed form kept only for d <= 2");
}

double sz_series(int d, double epsilon) {
    const double L = std::log(1.0 / epsilon);
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < d; ++i) {
        term *= L / static_cast<double>(i);
        sum += term;
    }
    return epsilon * sum;
}

double sz_bound(int d, double epsilon) {
    return std::pow(2.0, d) * std::sqrt(epsilon);
}

std::vector<double> propagation_min_stats(const PointFn& f,
                                          std::span<const double> base_mu,
                                          double c, double b, int degree_cap,
                                          std::size_t trials,
                                          std::uint64_t seed, CoeffNorm norm,
                                          int workers, int enum_cap) {
    if (!(b > 0.0))
        throw std::invalid_argument("propagation: b must be > 0");
    if (degree_cap < 0 || degree_cap > static_cast<int>(base_mu.size()))
        throw std::invalid_argument("propagation: bad degree cap");
    if (static_cast<int>(base_mu.size()) > enum_cap)
        throw std::invalid_argument("propagation: n exceeds the enumeration cap");
    for (double v : base_mu)
        if (v < -1.0 + 2 * c || v > 1.0 - 2 * c)
            throw std::invalid_argument("propagation: base mean is not 2c-bounded");

    const int n = static_cast<int>(base_mu.size());
    std::vector<double> stats(trials,
                              std::numeric_limits<double>::infinity());
    parallel_for(trials, workers, [&](std::size_t trial) {
        SplitMix64 rng(derive_seed(seed, "prop-trial", trial));
        std::vector<double> mu(base_mu.begin(), base_mu.end());
        for (auto& v : mu) v += uniform_symmetric(rng, c);
        const ProductDist dist(mu, c);
        SparsePoly table = expand_exact_up_to(f, dist, degree_cap, enum_cap);
        if (norm == CoeffNorm::Bar) table = to_partially_normalized(table);

        double best = std::numeric_limits<double>::infinity();
        const std::uint64_t sets = 1ull << n;
        for (std::uint64_t u = 0; u < sets; ++u) {
            if (std::popcount(u) > degree_cap) continue;
            if (std::abs(table.coeff(SubsetIndex::from_mask(u))) < b) continue;
            std::uint64_t sub = u;
            while (true) {
                best = std::min(
                    best, std::abs(table.coeff(SubsetIndex::from_mask(sub))));
                if (sub == 0) break;
                sub = (sub - 1) & u;
            }
        }
        stats[trial] = best;
    });
    return stats;
}

double propagation_frequency(std::span<const double> min_stats, double a) {
    if (a < 0.0)
        throw std::invalid_argument("propagation: a must be >= 0");
    std::size_t count = 0;
    for (double s : min_stats)
        if (s <= a) ++count;
    return static_cast<double>(count) / static_cast<double>(min_stats.size());
}

double propagation_frequency(const PointFn& f, std::span<const double> base_mu,
                             double c, double a, double b, int degree_cap,
                             std::size_t trials, std::uint64_t seed,
                             CoeffNorm norm, int workers, int enum_cap) {
    const auto stats = propagation_min_stats(f, base_mu, c, b, degree_cap,
                                             trials, seed, norm, workers,
                                             enum_cap);
    return propagation_frequency(stats, a);
}

double propagation_pair_bound(double a, double b, double c, int diff_size) {
    return std::sqrt(a / b) * std::pow(4.0 / c, diff_size / 2.0);
}

double propagation_union_bound_bar(double a, double b, double c, int d) {
    return std::sqrt(a) * std::pow(b, -2.5) * std::pow(4.0, d) *
           std::pow(c, -1.5 * d);
}

double propagation_union_bound_hat(double alpha, double beta, double c, int d) {
    return std::sqrt(alpha) * std::pow(beta, -2.5) * std::pow(2.0 / c, 2.0 * d);
}

double exact_squared_loss(const SparsePoly& p, const ProductDist& dist,
                          const PointFn& f, int enum_cap) {
    if (p.basis() != Basis::ZCharacter)
        throw std::invalid_argument(
            "exact_squared_loss: basis mismatch, expected a z-character table");
    if (p.n() != dist.n())
        throw std::invalid_argument("exact_squared_loss: dimension mismatch");
    for (int i = 0; i < p.n(); ++i)
        if (p.mu()[static_cast<std::size_t>(i)] !=
            dist.mu_vec()[static_cast<std::size_t>(i)])
            throw std::invalid_argument(
                "exact_squared_loss: basis mismatch, poly mu differs from dist");
    if (dist.n() > enum_cap)
        throw std::invalid_argument(
            "exact_squared_loss: n exceeds the enumeration cap");

    const int n = dist.n();
    const std::uint64_t points = 1ull << n;

    // Route one: direct pointwise expectation.
    double pointwise = 0.0;
    double cross = 0.0;  // E[p f]
    double f_norm = 0.0; // E[f^2]
    std::vector<std::int8_t> x;
    for (std::uint64_t mask = 0; mask < points; ++mask) {
        fill_sign_point(mask, n, x);
        const double prob = exact_point_prob(dist, x);
        const double pv = p.eval(x);
        const double fv = f(x);
        pointwise += prob * (pv - fv) * (pv - fv);
        cross += prob * pv * fv;
        f_norm += prob * fv * fv;
    }

    // Route two: coefficient space. For small n the literal
    // sum_S (p_hat(S) - f_hat(S))^2 over the full table; otherwise the
    // algebraically identical sum |p|^2 - 2<p,f> + |f|^2 with the inner
    // product taken pointwise.
    double coeff_route;
    if (n <= 12) {
        const SparsePoly fhat = expand_exact(f, dist, enum_cap);
        double total = 0.0;
        const std::uint64_t sets = 1ull << n;
        for (std::uint64_t s = 0; s < sets; ++s) {
            const auto idx = SubsetIndex::from_mask(s);
            const double diff = p.coeff(idx) - fhat.coeff(idx);
            total += diff * diff;
        }
        coeff_route = total;
    } else {
        coeff_route = p.sum_squares() - 2.0 * cross + f_norm;
    }

    if (std::abs(pointwise - coeff_route) >
        1e-9 * std::max(1.0, std::abs(pointwise)))
        throw std::runtime_error(
            "exact_squared_loss: pointwise and coefficient routes disagree");
    return pointwise;
}

} // namespace smoothdt
