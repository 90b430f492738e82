#include "smoothdt/learner.hpp"

#include "smoothdt/rng.hpp"
#include "smoothdt/util.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace smoothdt {

double LearnerConfig::resolve_threshold(std::size_t m) const {
    if (threshold) {
        if (!(*threshold > 0.0))
            throw std::invalid_argument("LearnerConfig: threshold must be > 0");
        return *threshold;
    }
    return std::pow(static_cast<double>(m), -1.0 / 3.0);
}

int LearnerConfig::resolve_depth_cap(std::size_t m, double max_abs_mu) const {
    if (depth_cap) {
        if (*depth_cap < 0)
            throw std::invalid_argument("LearnerConfig: depth cap must be >= 0");
        return *depth_cap;
    }
    const double d =
        std::log(static_cast<double>(m)) / 12.0 * (1.0 - max_abs_mu);
    return static_cast<int>(std::floor(d));
}

std::size_t LearnerConfig::resolve_frontier_cap(std::size_t m) const {
    if (frontier_cap) {
        if (*frontier_cap < 1)
            throw std::invalid_argument("LearnerConfig: frontier cap must be >= 1");
        return *frontier_cap;
    }
    return m;
}

bool Frontier::contains(SubsetIndex s) const {
    return std::find(sets.begin(), sets.end(), s) != sets.end();
}

std::optional<double> Frontier::estimate_of(SubsetIndex s) const {
    for (std::size_t i = 0; i < sets.size(); ++i)
        if (sets[i] == s) return estimates[i];
    return std::nullopt;
}

int Hypothesis::predict(std::span<const std::int8_t> x) const {
    return poly.eval(x) >= 0.0 ? 1 : -1;
}

LearnOutcome learn(const Dataset& data, const LearnerConfig& config) {
    if (data.m < 1) throw std::invalid_argument("learn: empty dataset");
    if (data.n < 1 || data.n > 64)
        throw std::invalid_argument("learn: n must be in [1, 64]");
    if (data.xs.size() != data.m * static_cast<std::size_t>(data.n) ||
        data.ys.size() != data.m)
        throw std::invalid_argument("learn: dataset shape mismatch");
    for (auto y : data.ys)
        if (y != 1 && y != -1)
            throw std::invalid_argument("learn: labels must be +-1");

    const std::vector<double> mu = config.mu_source == MuSource::Exact
                                       ? data.mu_used
                                       : estimate_means(data);
    if (static_cast<int>(mu.size()) != data.n)
        throw std::invalid_argument("learn: mean vector dimension mismatch");

    const ZTable zt(data, mu, config.c);
    const double t = config.resolve_threshold(data.m);
    double max_abs = 0.0;
    for (double v : mu) max_abs = std::max(max_abs, std::abs(v));
    const int depth_cap = config.resolve_depth_cap(data.m, max_abs);
    const std::size_t cap = config.resolve_frontier_cap(data.m);

    LearnOutcome out;
    out.diag.threshold = t;
    out.diag.depth_cap = depth_cap;
    out.diag.frontier_cap = cap;
    out.diag.mu = mu;

    Frontier& frontier = out.frontier;
    frontier.sets.push_back(SubsetIndex::empty_set());
    frontier.estimates.push_back(zt.estimate(SubsetIndex::empty_set()));
    frontier.level_sizes.push_back(1);
    out.diag.estimates_computed = 1;

    // Estimates of every candidate ever tested, so duplicates reached from
    // different parents are estimated once. Extensions of sets retained
    // before the previous level were already decided (same e(S), same
    // verdict), so each level only extends the sets that just joined.
    std::unordered_set<SubsetIndex> tested;
    tested.insert(SubsetIndex::empty_set());

    std::size_t level_begin = 0;
    for (int d = 1; d <= depth_cap; ++d) {
        const std::size_t level_end = frontier.sets.size();
        std::vector<SubsetIndex> candidates;
        for (std::size_t k = level_begin; k < level_end; ++k) {
            const SubsetIndex parent = frontier.sets[k];
            for (int i = 1; i <= data.n; ++i) {
                if (parent.contains(i)) continue; // S u {i} = S, already kept
                const SubsetIndex cand = parent.with(i);
                if (tested.insert(cand).second) candidates.push_back(cand);
            }
        }

        std::vector<double> values(candidates.size());
        parallel_for(candidates.size(), config.workers, [&](std::size_t k) {
            values[k] = zt.estimate(candidates[k]);
        });
        out.diag.estimates_computed += candidates.size();

        for (std::size_t k = 0; k < candidates.size(); ++k) {
            if (std::abs(values[k]) >= t) {
                frontier.sets.push_back(candidates[k]);
                frontier.estimates.push_back(values[k]);
            }
        }
        frontier.level_sizes.push_back(frontier.sets.size());
        level_begin = level_end;

        if (frontier.sets.size() > cap) {
            out.fail = true;
            return out;
        }
    }

    SparsePoly poly(Basis::ZCharacter, mu);
    for (std::size_t k = 0; k < frontier.sets.size(); ++k)
        poly.set(frontier.sets[k], frontier.estimates[k]);
    out.hypothesis = Hypothesis{std::move(poly)};
    return out;
}

double empirical_error(const Hypothesis& h, const ProductDist& dist,
                       const PointFn& f, std::size_t trials,
                       std::mt19937_64& rng) {
    if (trials < 1)
        throw std::invalid_argument("empirical_error: trials must be >= 1");
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < trials; ++k) {
        const auto x = sample_point(dist, rng);
        const double fx = f(x);
        if (h.predict(x) != (fx >= 0.0 ? 1 : -1)) ++mismatches;
    }
    return static_cast<double>(mismatches) / static_cast<double>(trials);
}

double exact_error(const Hypothesis& h, const ProductDist& dist,
                   const PointFn& f, int enum_cap) {
    if (dist.n() > enum_cap)
        throw std::invalid_argument("exact_error: n exceeds the enumeration cap");
    const int n = dist.n();
    const std::uint64_t points = 1ull << n;
    double err = 0.0;
    std::vector<std::int8_t> x;
    for (std::uint64_t mask = 0; mask < points; ++mask) {
        fill_sign_point(mask, n, x);
        const double fx = f(x);
        if (h.predict(x) != (fx >= 0.0 ? 1 : -1))
            err += exact_point_prob(dist, x);
    }
    return err;
}

void write_hypothesis_csv(std::ostream& out, const Hypothesis& h) {
    out << "# n=" << h.poly.n() << " mu=";
    bool first = true;
    for (double v : h.poly.mu()) {
        if (!first) out << ';';
        out << format_double_exact(v);
        first = false;
    }
    out << '\n';
    write_coeff_csv(out, h.poly);
}

Hypothesis read_hypothesis_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# n=", 0) != 0)
        throw std::runtime_error("hypothesis CSV: missing '# n=... mu=...' header");
    const auto mu_pos = header.find(" mu=");
    if (mu_pos == std::string::npos)
        throw std::runtime_error("hypothesis CSV: missing mu field");
    const int n = std::stoi(header.substr(4, mu_pos - 4));
    std::vector<double> mu;
    std::stringstream mus(header.substr(mu_pos + 4));
    std::string tok;
    while (std::getline(mus, tok, ';'))
        if (!tok.empty()) mu.push_back(std::stod(tok));
    if (static_cast<int>(mu.size()) != n)
        throw std::runtime_error("hypothesis CSV: mu arity disagrees with n");
    return Hypothesis{read_coeff_csv(in, Basis::ZCharacter, std::move(mu))};
}

} // namespace smoothdt
