#pragma once

#include "smoothdt/dist.hpp"
#include "smoothdt/subset.hpp"
#include "smoothdt/tree.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace smoothdt {

/// Exact enumeration routines refuse inputs above this variable count
/// rather than silently approximating.
inline constexpr int kEnumCap = 20;

/// Pointwise-evaluable function on {-1,1}^n; values need not be Boolean.
using PointFn = std::function<double(std::span<const std::int8_t>)>;

PointFn as_point_fn(const DecisionTree& t);
PointFn as_point_fn(const TruncatedTree& t);

/// Enumerates all 2^n points as sign vectors: bit i-1 of the mask set
/// means x_i = +1. Every exact oracle iterates in this fixed order.
void fill_sign_point(std::uint64_t mask, int n, std::vector<std::int8_t>& x);

enum class Basis {
    /// Coefficients on the orthonormal characters z_S(x, mu).
    ZCharacter,
    /// Partially normalized coefficients on monomials prod_{i in S}(x_i - mu_i).
    CenteredMonomial,
};

/// Sparse multilinear polynomial in either basis, tagged with the mu it was
/// built against (all-zero mu gives the classical x_S monomial basis).
/// Coefficients with |value| < kZeroTol are dropped on insertion so absent
/// means zero.
class SparsePoly {
public:
    static constexpr double kZeroTol = 1e-15;

    SparsePoly(Basis basis, std::vector<double> mu);

    void set(SubsetIndex s, double value);
    double coeff(SubsetIndex s) const;
    bool has(SubsetIndex s) const;
    const std::map<SubsetIndex, double>& coeffs() const { return coeffs_; }

    Basis basis() const { return basis_; }
    std::span<const double> mu() const { return mu_; }
    int n() const { return static_cast<int>(mu_.size()); }
    int degree() const;
    std::size_t term_count() const { return coeffs_.size(); }
    double sum_squares() const;

    double eval(std::span<const std::int8_t> x) const;

    /// Set by full expansions; required by translate_basis, which sums over
    /// all supersets and therefore rejects partial tables.
    bool complete() const { return complete_; }
    void mark_complete() { complete_ = true; }

private:
    Basis basis_;
    std::vector<double> mu_;
    std::map<SubsetIndex, double> coeffs_;
    bool complete_ = false;
};

/// Exact normalized coefficient E_{x~D_mu}[f(x) z_S(x,mu)] by weighted
/// enumeration of all 2^n points.
double exact_coeff(const PointFn& f, const ProductDist& dist, SubsetIndex s,
                   int enum_cap = kEnumCap);

/// Full coefficient table in the z basis at dist's mu; the returned poly is
/// marked complete. Reconstruction matches f pointwise to ~1e-9.
SparsePoly expand_exact(const PointFn& f, const ProductDist& dist,
                        int enum_cap = kEnumCap);
/// Table restricted to |S| <= max_degree (not marked complete).
SparsePoly expand_exact_up_to(const PointFn& f, const ProductDist& dist,
                              int max_degree, int enum_cap = kEnumCap);

struct CoeffEstimate {
    SubsetIndex subset;
    double value = 0.0;
    std::size_t m = 0;
};

/// z matrix bound to one dataset and one mean vector: the sample-estimation
/// hot path. Read-only after construction; estimate() may be called from
/// many workers concurrently, and its summation order (example index order,
/// cascade reduction) is fixed so results are bit-stable across runs and
/// worker counts.
class ZTable {
public:
    ZTable(const Dataset& data, std::span<const double> mu, double c);

    std::size_t m() const { return m_; }
    int n() const { return n_; }
    std::span<const double> mu() const { return mu_; }
    double z(std::size_t j, int var) const {
        return z_[j * static_cast<std::size_t>(n_) +
                  static_cast<std::size_t>(var - 1)];
    }
    /// e(S) = (1/m) sum_j y_j z_S(x_j).
    double estimate(SubsetIndex s) const;

private:
    std::size_t m_;
    int n_;
    std::vector<double> mu_;
    std::vector<double> z_;
    std::vector<std::int8_t> ys_;
};

CoeffEstimate estimate_coeff(const ZTable& zt, SubsetIndex s);

/// hat f(S,mu) <-> bar f(S,mu) = hat f(S,mu) / prod_{i in S} sigma_i.
SparsePoly to_partially_normalized(const SparsePoly& p);
SparsePoly from_partially_normalized(const SparsePoly& p);

/// bar f(S, mu_bar + delta) = sum_{T >= S} bar f(T, mu_bar) delta_{T \ S}.
/// Requires a complete CenteredMonomial table.
SparsePoly translate_basis(const SparsePoly& bar_at_base,
                           std::span<const double> delta);

/// sum_S coeff(S) * chi_S(x) with characters taken from the poly's own
/// recorded basis and mu.
double eval_poly(const SparsePoly& p, std::span<const std::int8_t> x);

/// Coefficient table export: CSV "subset,value" with subsets rendered as
/// semicolon-separated indices or "empty".
void write_coeff_csv(std::ostream& out, const SparsePoly& p);
/// Reads a table written by write_coeff_csv into the given basis/mu.
SparsePoly read_coeff_csv(std::istream& in, Basis basis,
                          std::vector<double> mu);

} // namespace smoothdt
