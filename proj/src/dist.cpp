#include "smoothdt/dist.hpp"

#include "smoothdt/rng.hpp"
#include "smoothdt/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smoothdt {

ProductDist::ProductDist(std::vector<double> mu, double c)
    : mu_(std::move(mu)), c_(c) {
    if (mu_.empty() || mu_.size() > 64)
        throw std::invalid_argument("ProductDist: n must be in [1, 64]");
    if (!(c > 0.0) || !(c < 0.5))
        throw std::invalid_argument("ProductDist: c must lie in (0, 1/2)");
    sigma_.resize(mu_.size());
    max_abs_mu_ = 0.0;
    for (std::size_t i = 0; i < mu_.size(); ++i) {
        if (mu_[i] < -1.0 + c || mu_[i] > 1.0 - c)
            throw std::invalid_argument(
                "ProductDist: mu_" + std::to_string(i + 1) +
                " violates the c-bounded box [-1+c, 1-c]");
        sigma_[i] = std::sqrt(1.0 - mu_[i] * mu_[i]);
        max_abs_mu_ = std::max(max_abs_mu_, std::abs(mu_[i]));
    }
}

std::vector<double> Perturbation::mu() const {
    std::vector<double> out(base_mu.size());
    for (std::size_t i = 0; i < base_mu.size(); ++i)
        out[i] = base_mu[i] + delta[i];
    return out;
}

Perturbation perturb(std::span<const double> base_mu, double c,
                     std::mt19937_64& rng) {
    if (!(c > 0.0) || !(c < 0.5))
        throw std::invalid_argument("perturb: c must lie in (0, 1/2)");
    for (double v : base_mu)
        if (v < -1.0 + 2 * c || v > 1.0 - 2 * c)
            throw std::invalid_argument("perturb: base mean is not 2c-bounded");
    Perturbation p;
    p.base_mu.assign(base_mu.begin(), base_mu.end());
    p.delta.resize(base_mu.size());
    for (auto& d : p.delta) d = uniform_symmetric(rng, c);
    return p;
}

ProductDist perturbed_dist(const Perturbation& p, double c) {
    return ProductDist(p.mu(), c);
}

std::vector<std::int8_t> sample_point(const ProductDist& dist,
                                      std::mt19937_64& rng) {
    std::vector<std::int8_t> x(static_cast<std::size_t>(dist.n()));
    for (int i = 1; i <= dist.n(); ++i)
        x[static_cast<std::size_t>(i - 1)] =
            uniform_unit(rng) < (1.0 + dist.mu(i)) / 2.0 ? 1 : -1;
    return x;
}

std::vector<std::int8_t> sample(const ProductDist& dist, std::size_t m,
                                std::mt19937_64& rng) {
    if (m < 1) throw std::invalid_argument("sample: m must be >= 1");
    const auto n = static_cast<std::size_t>(dist.n());
    std::vector<std::int8_t> xs(m * n);
    std::vector<double> thresh(n);
    for (std::size_t i = 0; i < n; ++i)
        thresh[i] = (1.0 + dist.mu(static_cast<int>(i) + 1)) / 2.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i)
            xs[j * n + i] = uniform_unit(rng) < thresh[i] ? 1 : -1;
    return xs;
}

std::vector<double> z_transform(const ProductDist& dist,
                                std::span<const std::int8_t> x) {
    if (static_cast<int>(x.size()) != dist.n())
        throw std::invalid_argument("z_transform: point dimension mismatch");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        z[i] = (static_cast<double>(x[i]) - dist.mu_vec()[i]) /
               dist.sigma_vec()[i];
    return z;
}

std::vector<double> estimate_means(std::span<const std::int8_t> xs,
                                   std::size_t m, int n, double c) {
    if (m < 1) throw std::invalid_argument("estimate_means: empty dataset");
    if (xs.size() != m * static_cast<std::size_t>(n))
        throw std::invalid_argument("estimate_means: shape mismatch");
    std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
            mu[i] += xs[j * static_cast<std::size_t>(n) + i];
    for (auto& v : mu)
        v = std::clamp(v / static_cast<double>(m), -1.0 + c, 1.0 - c);
    return mu;
}

std::vector<double> estimate_means(const Dataset& data) {
    return estimate_means(data.xs, data.m, data.n, data.c);
}

double exact_point_prob(const ProductDist& dist,
                        std::span<const std::int8_t> x) {
    if (static_cast<int>(x.size()) != dist.n())
        throw std::invalid_argument("exact_point_prob: dimension mismatch");
    double p = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        p *= (1.0 + dist.mu_vec()[i] * static_cast<double>(x[i])) / 2.0;
    return p;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (int i = 1; i <= data.n; ++i) out << 'x' << i << ',';
    out << "y\n";
    for (std::size_t j = 0; j < data.m; ++j) {
        const auto row = data.x(j);
        for (auto v : row) out << static_cast<int>(v) << ',';
        out << static_cast<int>(data.ys[j]) << '\n';
    }
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset file is empty: " + path);
    int n = 0;
    {
        std::stringstream header(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(header, col, ',')) cols.push_back(col);
        if (cols.size() < 2 || cols.back() != "y")
            throw std::runtime_error("dataset header must be x1,...,xn,y");
        n = static_cast<int>(cols.size()) - 1;
    }
    Dataset data;
    data.n = n;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<int> vals;
        while (std::getline(row, cell, ','))
            vals.push_back(std::stoi(cell));
        if (static_cast<int>(vals.size()) != n + 1)
            throw std::runtime_error("dataset row has wrong arity");
        for (int v : vals)
            if (v != 1 && v != -1)
                throw std::runtime_error("dataset entries must be +-1");
        for (int i = 0; i < n; ++i)
            data.xs.push_back(static_cast<std::int8_t>(vals[static_cast<std::size_t>(i)]));
        data.ys.push_back(static_cast<std::int8_t>(vals.back()));
        ++data.m;
    }
    if (data.m == 0) throw std::runtime_error("dataset has no rows");
    return data;
}

void write_mu_file(const std::string& path, std::span<const double> mu) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (double v : mu) out << format_double_exact(v) << '\n';
}

std::vector<double> read_mu_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<double> mu;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        mu.push_back(std::stod(line));
    }
    if (mu.empty()) throw std::runtime_error("mean-vector file is empty");
    return mu;
}

} // namespace smoothdt
