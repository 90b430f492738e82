#include "smoothdt/fourier.hpp"

#include "smoothdt/util.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace smoothdt {

PointFn as_point_fn(const DecisionTree& t) {
    return [t](std::span<const std::int8_t> x) {
        return static_cast<double>(t.evaluate(x));
    };
}

PointFn as_point_fn(const TruncatedTree& t) {
    return [t](std::span<const std::int8_t> x) {
        return static_cast<double>(t.evaluate(x));
    };
}

void fill_sign_point(std::uint64_t mask, int n, std::vector<std::int8_t>& x) {
    x.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1 : -1;
}

SparsePoly::SparsePoly(Basis basis, std::vector<double> mu)
    : basis_(basis), mu_(std::move(mu)) {
    if (mu_.empty() || mu_.size() > 64)
        throw std::invalid_argument("SparsePoly: n must be in [1, 64]");
}

void SparsePoly::set(SubsetIndex s, double value) {
    if (s.max_var() > n())
        throw std::invalid_argument("SparsePoly: subset references variable > n");
    if (std::abs(value) < kZeroTol)
        coeffs_.erase(s);
    else
        coeffs_[s] = value;
}

double SparsePoly::coeff(SubsetIndex s) const {
    auto it = coeffs_.find(s);
    return it == coeffs_.end() ? 0.0 : it->second;
}

bool SparsePoly::has(SubsetIndex s) const { return coeffs_.contains(s); }

int SparsePoly::degree() const {
    int d = 0;
    for (const auto& [s, v] : coeffs_) d = std::max(d, s.size());
    return d;
}

double SparsePoly::sum_squares() const {
    double total = 0.0;
    for (const auto& [s, v] : coeffs_) total += v * v;
    return total;
}

double SparsePoly::eval(std::span<const std::int8_t> x) const {
    if (static_cast<int>(x.size()) != n())
        throw std::invalid_argument("SparsePoly::eval: dimension mismatch");
    double total = 0.0;
    for (const auto& [s, v] : coeffs_) {
        double term = v;
        s.for_each([&](int var) {
            const std::size_t i = static_cast<std::size_t>(var - 1);
            const double centered = static_cast<double>(x[i]) - mu_[i];
            if (basis_ == Basis::ZCharacter)
                term *= centered / std::sqrt(1.0 - mu_[i] * mu_[i]);
            else
                term *= centered;
        });
        total += term;
    }
    return total;
}

namespace {

void check_enum_cap(int n, int enum_cap, const char* who) {
    if (n > enum_cap)
        throw std::invalid_argument(std::string(who) +
                                    ": n exceeds the enumeration cap");
}

/// Precomputed per-point f(x) * Pr[x] plus per-variable z values, shared by
/// the exact-coefficient loops.
struct EnumContext {
    int n;
    std::vector<double> fp;    // f(x) * Pr[x] per point mask
    std::vector<double> z_neg; // z_i at x_i = -1
    std::vector<double> z_pos; // z_i at x_i = +1

    EnumContext(const PointFn& f, const ProductDist& dist) : n(dist.n()) {
        const std::uint64_t points = 1ull << n;
        fp.resize(points);
        std::vector<std::int8_t> x;
        for (std::uint64_t mask = 0; mask < points; ++mask) {
            fill_sign_point(mask, n, x);
            fp[mask] = f(x) * exact_point_prob(dist, x);
        }
        z_neg.resize(static_cast<std::size_t>(n));
        z_pos.resize(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            z_neg[static_cast<std::size_t>(i - 1)] =
                (-1.0 - dist.mu(i)) / dist.sigma(i);
            z_pos[static_cast<std::size_t>(i - 1)] =
                (1.0 - dist.mu(i)) / dist.sigma(i);
        }
    }

    double coeff(SubsetIndex s) const {
        const std::uint64_t points = 1ull << n;
        double total = 0.0;
        for (std::uint64_t mask = 0; mask < points; ++mask) {
            double term = fp[mask];
            s.for_each([&](int var) {
                const std::size_t i = static_cast<std::size_t>(var - 1);
                term *= (mask >> i) & 1u ? z_pos[i] : z_neg[i];
            });
            total += term;
        }
        return total;
    }
};

} // namespace

double exact_coeff(const PointFn& f, const ProductDist& dist, SubsetIndex s,
                   int enum_cap) {
    check_enum_cap(dist.n(), enum_cap, "exact_coeff");
    if (s.max_var() > dist.n())
        throw std::invalid_argument("exact_coeff: subset references variable > n");
    return EnumContext(f, dist).coeff(s);
}

SparsePoly expand_exact(const PointFn& f, const ProductDist& dist,
                        int enum_cap) {
    check_enum_cap(dist.n(), enum_cap, "expand_exact");
    EnumContext ctx(f, dist);
    SparsePoly poly(Basis::ZCharacter,
                    std::vector<double>(dist.mu_vec().begin(),
                                        dist.mu_vec().end()));
    const std::uint64_t sets = 1ull << dist.n();
    for (std::uint64_t s = 0; s < sets; ++s)
        poly.set(SubsetIndex::from_mask(s), ctx.coeff(SubsetIndex::from_mask(s)));
    poly.mark_complete();
    return poly;
}

SparsePoly expand_exact_up_to(const PointFn& f, const ProductDist& dist,
                              int max_degree, int enum_cap) {
    check_enum_cap(dist.n(), enum_cap, "expand_exact_up_to");
    if (max_degree < 0)
        throw std::invalid_argument("expand_exact_up_to: negative degree");
    EnumContext ctx(f, dist);
    SparsePoly poly(Basis::ZCharacter,
                    std::vector<double>(dist.mu_vec().begin(),
                                        dist.mu_vec().end()));
    const std::uint64_t sets = 1ull << dist.n();
    for (std::uint64_t s = 0; s < sets; ++s) {
        if (std::popcount(s) > max_degree) continue;
        poly.set(SubsetIndex::from_mask(s), ctx.coeff(SubsetIndex::from_mask(s)));
    }
    if (max_degree >= dist.n()) poly.mark_complete();
    return poly;
}

ZTable::ZTable(const Dataset& data, std::span<const double> mu, double c)
    : m_(data.m), n_(data.n), mu_(mu.begin(), mu.end()), ys_(data.ys) {
    if (m_ < 1) throw std::invalid_argument("ZTable: empty dataset");
    if (static_cast<int>(mu_.size()) != n_)
        throw std::invalid_argument("ZTable: mu dimension mismatch");
    // Validity of mu (c-bounded, sigma > 0) is rechecked here since callers
    // may pass estimated means.
    ProductDist dist(mu_, c);
    z_.resize(m_ * static_cast<std::size_t>(n_));
    for (std::size_t j = 0; j < m_; ++j) {
        const auto row = data.x(j);
        for (int i = 0; i < n_; ++i)
            z_[j * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)] =
                (static_cast<double>(row[static_cast<std::size_t>(i)]) -
                 mu_[static_cast<std::size_t>(i)]) /
                dist.sigma(i + 1);
    }
}

double ZTable::estimate(SubsetIndex s) const {
    if (s.max_var() > n_)
        throw std::invalid_argument("estimate: subset references variable > n");
    thread_local std::vector<double> terms;
    terms.resize(m_);
    const auto vars = s.vars();
    for (std::size_t j = 0; j < m_; ++j) {
        double prod = static_cast<double>(ys_[j]);
        const std::size_t base = j * static_cast<std::size_t>(n_);
        for (int var : vars) prod *= z_[base + static_cast<std::size_t>(var - 1)];
        terms[j] = prod;
    }
    return pairwise_sum(terms) / static_cast<double>(m_);
}

CoeffEstimate estimate_coeff(const ZTable& zt, SubsetIndex s) {
    return CoeffEstimate{s, zt.estimate(s), zt.m()};
}

namespace {

double sigma_product(std::span<const double> mu, SubsetIndex s) {
    double prod = 1.0;
    s.for_each([&](int var) {
        const double m = mu[static_cast<std::size_t>(var - 1)];
        prod *= std::sqrt(1.0 - m * m);
    });
    return prod;
}

} // namespace

SparsePoly to_partially_normalized(const SparsePoly& p) {
    if (p.basis() != Basis::ZCharacter)
        throw std::invalid_argument(
            "to_partially_normalized: expected a z-character table");
    SparsePoly out(Basis::CenteredMonomial,
                   std::vector<double>(p.mu().begin(), p.mu().end()));
    for (const auto& [s, v] : p.coeffs())
        out.set(s, v / sigma_product(p.mu(), s));
    if (p.complete()) out.mark_complete();
    return out;
}

SparsePoly from_partially_normalized(const SparsePoly& p) {
    if (p.basis() != Basis::CenteredMonomial)
        throw std::invalid_argument(
            "from_partially_normalized: expected a partially normalized table");
    SparsePoly out(Basis::ZCharacter,
                   std::vector<double>(p.mu().begin(), p.mu().end()));
    for (const auto& [s, v] : p.coeffs())
        out.set(s, v * sigma_product(p.mu(), s));
    if (p.complete()) out.mark_complete();
    return out;
}

SparsePoly translate_basis(const SparsePoly& bar_at_base,
                           std::span<const double> delta) {
    if (bar_at_base.basis() != Basis::CenteredMonomial)
        throw std::invalid_argument(
            "translate_basis: expected a partially normalized table");
    if (!bar_at_base.complete())
        throw std::invalid_argument(
            "translate_basis: requires a complete coefficient table");
    if (static_cast<int>(delta.size()) != bar_at_base.n())
        throw std::invalid_argument("translate_basis: delta dimension mismatch");

    std::vector<double> shifted(bar_at_base.mu().begin(),
                                bar_at_base.mu().end());
    for (std::size_t i = 0; i < delta.size(); ++i) shifted[i] += delta[i];
    SparsePoly out(Basis::CenteredMonomial, std::move(shifted));

    // Accumulate bar(T) * delta_{T \ S} into every S <= T.
    std::map<SubsetIndex, double> acc;
    for (const auto& [t, v] : bar_at_base.coeffs()) {
        const std::uint64_t tm = t.mask();
        std::uint64_t sub = tm;
        while (true) {
            double dprod = v;
            SubsetIndex rest = SubsetIndex::from_mask(tm & ~sub);
            rest.for_each([&](int var) {
                dprod *= delta[static_cast<std::size_t>(var - 1)];
            });
            acc[SubsetIndex::from_mask(sub)] += dprod;
            if (sub == 0) break;
            sub = (sub - 1) & tm;
        }
    }
    for (const auto& [s, v] : acc) out.set(s, v);
    out.mark_complete();
    return out;
}

double eval_poly(const SparsePoly& p, std::span<const std::int8_t> x) {
    return p.eval(x);
}

void write_coeff_csv(std::ostream& out, const SparsePoly& p) {
    out << "subset,value\n";
    for (const auto& [s, v] : p.coeffs())
        out << s.to_string() << ',' << format_double_exact(v) << '\n';
}

SparsePoly read_coeff_csv(std::istream& in, Basis basis,
                          std::vector<double> mu) {
    SparsePoly poly(basis, std::move(mu));
    std::string line;
    if (!std::getline(in, line) || line != "subset,value")
        throw std::runtime_error("coefficient CSV: missing subset,value header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw std::runtime_error("coefficient CSV: malformed row");
        const auto subset = SubsetIndex::parse(line.substr(0, comma));
        if (!subset)
            throw std::runtime_error("coefficient CSV: bad subset field");
        poly.set(*subset, std::stod(line.substr(comma + 1)));
    }
    return poly;
}

} // namespace smoothdt
