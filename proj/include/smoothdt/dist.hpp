#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace smoothdt {

/// Product distribution over {-1,1}^n with independent bits and
/// E[x_i] = mu_i. Kept c-bounded: every mu_i in [-1+c, 1-c], so each
/// sigma_i = sqrt(1 - mu_i^2) stays bounded away from 0. Immutable after
/// construction.
class ProductDist {
public:
    ProductDist(std::vector<double> mu, double c);

    int n() const { return static_cast<int>(mu_.size()); }
    double c() const { return c_; }
    double mu(int var) const { return mu_[static_cast<std::size_t>(var - 1)]; }
    double sigma(int var) const { return sigma_[static_cast<std::size_t>(var - 1)]; }
    std::span<const double> mu_vec() const { return mu_; }
    std::span<const double> sigma_vec() const { return sigma_; }
    double max_abs_mu() const { return max_abs_mu_; }

private:
    std::vector<double> mu_;
    std::vector<double> sigma_;
    double c_;
    double max_abs_mu_;
};

/// An adversarial base mean vector together with the uniform perturbation
/// applied to it. base_mu must be 2c-bounded so that base_mu + delta is
/// always c-bounded.
struct Perturbation {
    std::vector<double> base_mu;
    std::vector<double> delta;
    std::vector<double> mu() const;
};

/// delta_i i.i.d. uniform on [-c, c].
Perturbation perturb(std::span<const double> base_mu, double c,
                     std::mt19937_64& rng);
ProductDist perturbed_dist(const Perturbation& p, double c);

/// m labeled examples plus the mean vector the learner will be shown
/// (exact from the generator, or estimated downstream).
struct Dataset {
    int n = 0;
    std::size_t m = 0;
    std::vector<std::int8_t> xs; // m rows of n entries, row-major, all +-1
    std::vector<std::int8_t> ys; // m labels, +-1
    std::vector<double> mu_used;
    double c = 0.0;

    std::span<const std::int8_t> x(std::size_t j) const {
        return std::span<const std::int8_t>(xs).subspan(
            j * static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    }
};

/// One draw: bit i is +1 with probability (1 + mu_i)/2, independently.
std::vector<std::int8_t> sample_point(const ProductDist& dist,
                                      std::mt19937_64& rng);
/// m draws in one deterministic stream, row-major.
std::vector<std::int8_t> sample(const ProductDist& dist, std::size_t m,
                                std::mt19937_64& rng);

/// z_i = (x_i - mu_i)/sigma_i; under the distribution E[z_i] = 0 and
/// E[z_i^2] = 1.
std::vector<double> z_transform(const ProductDist& dist,
                                std::span<const std::int8_t> x);

/// Component-wise empirical means clamped into the c-bounded box, so the
/// downstream normalization never divides by zero.
std::vector<double> estimate_means(std::span<const std::int8_t> xs,
                                   std::size_t m, int n, double c);
std::vector<double> estimate_means(const Dataset& data);

/// Probability of one point: prod_i (1 + mu_i x_i)/2.
double exact_point_prob(const ProductDist& dist,
                        std::span<const std::int8_t> x);

// File formats. Dataset: CSV with header x1,...,xn,y and entries in
// {-1,1}. Mean vector: one real per line.
void write_dataset_csv(const std::string& path, const Dataset& data);
/// Reads points and labels; mu_used/c are left for the caller to attach.
Dataset read_dataset_csv(const std::string& path);
void write_mu_file(const std::string& path, std::span<const double> mu);
std::vector<double> read_mu_file(const std::string& path);

} // namespace smoothdt
