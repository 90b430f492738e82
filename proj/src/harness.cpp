#include "smoothdt/harness.hpp"

#include "smoothdt/rng.hpp"
#include "smoothdt/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace smoothdt {

namespace {

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Learn: return "learn";
        case ExperimentKind::SzCheck: return "sz-check";
        case ExperimentKind::PropagationCheck: return "propagation-check";
        case ExperimentKind::CoeffRecovery: return "coeff-recovery";
    }
    return "?";
}

std::string tree_spec(const ExperimentConfig& cfg) {
    switch (cfg.tree_source) {
        case TreeSource::Random:
            return "random:" + std::to_string(cfg.tree_size);
        case TreeSource::Parity:
            return "parity:" + std::to_string(cfg.parity_k);
        case TreeSource::File: return "file:" + cfg.tree_file;
    }
    return "?";
}

std::string mu_spec(const ExperimentConfig& cfg) {
    switch (cfg.mu_source) {
        case MuBarSource::Zero: return "zero";
        case MuBarSource::Random2cBounded: return "random";
        case MuBarSource::File: return "file:" + cfg.mu_file;
    }
    return "?";
}

} // namespace

void ExperimentConfig::validate() const {
    if (n < 1 || n > 64)
        throw std::invalid_argument("config: n must be in [1, 64]");
    if (!(c > 0.0) || !(c < 0.5))
        throw std::invalid_argument("config: c must lie in (0, 1/2)");
    if (kind == ExperimentKind::Learn && !(c < 0.25))
        throw std::invalid_argument(
            "config: learn experiments require c in (0, 1/4)");
    if (m < 1) throw std::invalid_argument("config: m must be >= 1");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("config: epsilon must lie in (0, 1)");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("config: delta must lie in (0, 1)");
    if (workers < 1)
        throw std::invalid_argument("config: workers must be >= 1");
    if (tree_source == TreeSource::Random &&
        (tree_size < 1 ||
         (n < 63 && static_cast<std::uint64_t>(tree_size) > (1ull << n))))
        throw std::invalid_argument("config: tree size must be in [1, 2^n]");
    if (tree_source == TreeSource::Parity &&
        (parity_k < 1 || parity_k > n))
        throw std::invalid_argument("config: parity arity must be in [1, n]");
    if (tree_source == TreeSource::File && tree_file.empty())
        throw std::invalid_argument("config: missing tree file path");
    if (mu_source == MuBarSource::File && mu_file.empty())
        throw std::invalid_argument("config: missing mean-vector file path");
    if (eval == EvalMode::Exact && n > kEnumCap &&
        (kind == ExperimentKind::Learn || kind == ExperimentKind::CoeffRecovery))
        throw std::invalid_argument(
            "config: exact evaluation needs n <= " + std::to_string(kEnumCap) +
            "; use mc:<points>");
    if (eval == EvalMode::MonteCarlo && mc_points < 1)
        throw std::invalid_argument("config: mc evaluation needs points >= 1");
    if (kind == ExperimentKind::CoeffRecovery && n > kEnumCap)
        throw std::invalid_argument(
            "config: coeff-recovery needs n <= " + std::to_string(kEnumCap));
    if (kind == ExperimentKind::PropagationCheck) {
        if (n > kEnumCap)
            throw std::invalid_argument("config: propagation-check needs n <= " +
                                        std::to_string(kEnumCap));
        if (prop_cap < 0 || prop_cap > n)
            throw std::invalid_argument("config: propagation cap must be in [0, n]");
        if (!(prop_beta > 0.0))
            throw std::invalid_argument("config: propagation beta must be > 0");
        for (double a : prop_alphas)
            if (a < 0.0)
                throw std::invalid_argument("config: propagation alpha must be >= 0");
        if (prop_trials < 1)
            throw std::invalid_argument("config: propagation trials must be >= 1");
    }
    if (kind == ExperimentKind::SzCheck) {
        if (sz_d_max < 1)
            throw std::invalid_argument("config: sz-check needs d >= 1");
        for (double e : sz_eps)
            if (!(e > 0.0) || !(e < 1.0))
                throw std::invalid_argument("config: sz epsilon must lie in (0, 1)");
        if (sz_trials < 1)
            throw std::invalid_argument("config: sz trials must be >= 1");
    }
    if (max_fail_rate < 0.0 || max_fail_rate > 1.0)
        throw std::invalid_argument("config: max fail rate must be in [0, 1]");
    if (theta_mult <= 0.0)
        throw std::invalid_argument("config: theta multiplier must be > 0");
}

std::string ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(kind);
    j["n"] = n;
    j["c"] = c;
    j["m"] = m;
    j["epsilon"] = epsilon;
    j["delta"] = delta;
    j["seed"] = seed;
    j["trials"] = trials;
    j["tree"] = tree_spec(*this);
    j["mu_bar"] = mu_spec(*this);
    j["mu_convention"] =
        mu_convention == MuConvention::PlusMinusOne ? "pm1" : "01";
    j["learner_mu"] = learner_mu == MuSource::Exact ? "exact" : "estimated";
    if (threshold) j["threshold"] = *threshold;
    if (depth_cap) j["depth_cap"] = *depth_cap;
    if (frontier_cap) j["frontier_cap"] = *frontier_cap;
    j["eval"] = eval == EvalMode::Exact
                    ? std::string("exact")
                    : "mc:" + std::to_string(mc_points);
    j["max_fail_rate"] = max_fail_rate;
    if (kind == ExperimentKind::SzCheck) {
        j["sz_d_max"] = sz_d_max;
        j["sz_eps"] = sz_eps;
        j["sz_trials"] = sz_trials;
    }
    if (kind == ExperimentKind::PropagationCheck) {
        j["beta"] = prop_beta;
        j["cap"] = prop_cap;
        j["alphas"] = prop_alphas;
        j["prop_trials"] = prop_trials;
        j["norm"] = prop_norm == CoeffNorm::Hat ? "hat" : "bar";
    }
    if (kind == ExperimentKind::CoeffRecovery) j["theta_mult"] = theta_mult;
    return j.dump(2) + "\n";
}

DecisionTree make_trial_tree(const ExperimentConfig& cfg, std::uint64_t trial) {
    switch (cfg.tree_source) {
        case TreeSource::Random: {
            auto rng = make_engine(cfg.seed, "tree", trial);
            return random_tree(cfg.n, cfg.tree_size, rng);
        }
        case TreeSource::Parity: {
            auto rng = make_engine(cfg.seed, "tree", trial);
            SubsetIndex vars;
            while (vars.size() < cfg.parity_k)
                vars = vars.with(uniform_int(rng, 1, cfg.n));
            return parity_tree(vars, cfg.n);
        }
        case TreeSource::File: {
            std::ifstream in(cfg.tree_file);
            if (!in)
                throw std::runtime_error("cannot open tree file: " + cfg.tree_file);
            std::stringstream buf;
            buf << in.rdbuf();
            return parse_tree(buf.str(), cfg.n);
        }
    }
    throw std::logic_error("unreachable tree source");
}

std::vector<double> make_trial_base_mu(const ExperimentConfig& cfg,
                                       std::uint64_t trial) {
    switch (cfg.mu_source) {
        case MuBarSource::Zero:
            return std::vector<double>(static_cast<std::size_t>(cfg.n), 0.0);
        case MuBarSource::Random2cBounded: {
            auto rng = make_engine(cfg.seed, "mu-bar", trial);
            std::vector<double> mu(static_cast<std::size_t>(cfg.n));
            for (auto& v : mu) v = uniform_symmetric(rng, 1.0 - 2.0 * cfg.c);
            return mu;
        }
        case MuBarSource::File: {
            std::vector<double> mu = read_mu_file(cfg.mu_file);
            if (cfg.mu_convention == MuConvention::ZeroOne)
                for (auto& v : mu) v = 2.0 * v - 1.0;
            if (static_cast<int>(mu.size()) != cfg.n)
                throw std::runtime_error("mean-vector file arity differs from n");
            return mu;
        }
    }
    throw std::logic_error("unreachable mu source");
}

Dataset make_dataset(const DecisionTree& f, const ProductDist& dist,
                     std::size_t m, std::mt19937_64& rng) {
    Dataset ds;
    ds.n = dist.n();
    ds.m = m;
    ds.xs = sample(dist, m, rng);
    ds.ys.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        ds.ys[j] = static_cast<std::int8_t>(f.evaluate(ds.x(j)));
    ds.mu_used.assign(dist.mu_vec().begin(), dist.mu_vec().end());
    ds.c = dist.c();
    return ds;
}

namespace {

struct TrialEnv {
    DecisionTree tree;
    Perturbation pert;
    ProductDist dist;
    Dataset data;
};

TrialEnv make_trial_env(const ExperimentConfig& cfg, std::uint64_t trial) {
    DecisionTree tree = make_trial_tree(cfg, trial);
    const std::vector<double> base = make_trial_base_mu(cfg, trial);
    auto delta_rng = make_engine(cfg.seed, "delta", trial);
    Perturbation pert = perturb(base, cfg.c, delta_rng);
    ProductDist dist = perturbed_dist(pert, cfg.c);
    auto sample_rng = make_engine(cfg.seed, "sample", trial);
    Dataset data = make_dataset(tree, dist, cfg.m, sample_rng);
    return TrialEnv{std::move(tree), std::move(pert), std::move(dist),
                    std::move(data)};
}

LearnerConfig learner_config(const ExperimentConfig& cfg) {
    LearnerConfig lc;
    lc.c = cfg.c;
    lc.mu_source = cfg.learner_mu;
    lc.threshold = cfg.threshold;
    lc.depth_cap = cfg.depth_cap;
    lc.frontier_cap = cfg.frontier_cap;
    lc.workers = 1; // trials are the parallel axis
    return lc;
}

double measure_error(const ExperimentConfig& cfg, const Hypothesis& h,
                     const ProductDist& dist, const DecisionTree& tree,
                     std::uint64_t trial) {
    const PointFn f = as_point_fn(tree);
    if (cfg.eval == EvalMode::Exact) return exact_error(h, dist, f);
    auto rng = make_engine(cfg.seed, "eval", trial);
    return empirical_error(h, dist, f, cfg.mc_points, rng);
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(sizes[i]);
    }
    return out;
}

/// Runs trials in parallel, rethrowing the first failure after the join so
/// exceptions never escape a worker thread.
template <class Fn>
void run_trials(const ExperimentConfig& cfg, Fn&& body) {
    std::vector<std::string> errors(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t trial) {
        try {
            body(trial);
        } catch (const std::exception& e) {
            errors[trial] = e.what();
        }
    });
    for (const auto& err : errors)
        if (!err.empty()) throw std::runtime_error("trial failed: " + err);
}

} // namespace

CampaignResult run_learn_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    CampaignResult result;
    result.trials.resize(cfg.trials);

    run_trials(cfg, [&](std::size_t trial) {
        const auto start = std::chrono::steady_clock::now();
        TrialEnv env = make_trial_env(cfg, trial);
        const LearnOutcome outcome = learn(env.data, learner_config(cfg));

        TrialRecord rec;
        rec.trial = trial;
        rec.seed = derive_seed(cfg.seed, "trial", trial);
        rec.mu_bar_digest = digest_doubles(env.pert.base_mu);
        rec.delta_digest = digest_doubles(env.pert.delta);
        rec.frontier_sizes = outcome.frontier.level_sizes;
        rec.final_frontier = outcome.frontier.sets.size();
        rec.fail = outcome.fail;
        rec.error = outcome.fail ? std::numeric_limits<double>::quiet_NaN()
                                 : measure_error(cfg, *outcome.hypothesis,
                                                 env.dist, env.tree, trial);
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        result.trials[trial] = std::move(rec);
    });

    std::size_t fails = 0;
    std::string csv =
        "trial,seed,mu_bar_digest,delta_digest,frontier_sizes,final_frontier,"
        "fail,error\n";
    for (const auto& rec : result.trials) {
        if (rec.fail) ++fails;
        csv += std::to_string(rec.trial);
        csv += ',';
        csv += std::to_string(rec.seed);
        csv += ',';
        csv += rec.mu_bar_digest;
        csv += ',';
        csv += rec.delta_digest;
        csv += ',';
        csv += join_sizes(rec.frontier_sizes);
        csv += ',';
        csv += std::to_string(rec.final_frontier);
        csv += ',';
        csv += rec.fail ? "1" : "0";
        csv += ',';
        csv += rec.fail ? "" : format_double(rec.error);
        csv += '\n';
    }
    result.csv = std::move(csv);
    result.fail_rate =
        static_cast<double>(fails) / static_cast<double>(cfg.trials);
    return result;
}

CampaignResult run_coeff_recovery(const ExperimentConfig& cfg) {
    ExperimentConfig checked = cfg;
    checked.kind = ExperimentKind::CoeffRecovery;
    checked.validate();

    CampaignResult result;
    result.trials.resize(cfg.trials);

    run_trials(checked, [&](std::size_t trial) {
        const auto start = std::chrono::steady_clock::now();
        TrialEnv env = make_trial_env(checked, trial);
        const LearnOutcome outcome = learn(env.data, learner_config(checked));
        const PointFn f = as_point_fn(env.tree);

        TrialRecord rec;
        rec.trial = trial;
        rec.seed = derive_seed(checked.seed, "trial", trial);
        rec.mu_bar_digest = digest_doubles(env.pert.base_mu);
        rec.delta_digest = digest_doubles(env.pert.delta);
        rec.frontier_sizes = outcome.frontier.level_sizes;
        rec.final_frontier = outcome.frontier.sets.size();
        rec.fail = outcome.fail;
        rec.threshold = outcome.diag.threshold;
        rec.depth_cap = outcome.diag.depth_cap;

        const HeavySet heavy =
            heavy_set(f, env.dist, checked.theta_mult * outcome.diag.threshold,
                      outcome.diag.depth_cap);
        rec.heavy_count = heavy.size();
        rec.missing = 0;
        for (const auto& s : heavy.sets)
            if (!outcome.frontier.contains(s)) ++rec.missing;
        rec.captured = !outcome.fail && rec.missing == 0;

        // Every retained set other than the empty set must sit above the
        // exact floor t - tau, tau = t sqrt(eps)/4.
        const double floor_value =
            outcome.diag.threshold *
            (1.0 - std::sqrt(checked.epsilon) / 4.0);
        rec.offside = 0;
        for (const auto& s : outcome.frontier.sets) {
            if (s.empty()) continue;
            if (std::abs(exact_coeff(f, env.dist, s)) < floor_value)
                ++rec.offside;
        }
        rec.sound = !outcome.fail && rec.offside == 0;
        rec.error = 0.0;
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        result.trials[trial] = std::move(rec);
    });

    std::size_t fails = 0;
    std::string csv =
        "trial,seed,mu_bar_digest,delta_digest,threshold,depth_cap,"
        "heavy_count,frontier_size,missing,captured,offside,sound,fail\n";
    for (const auto& rec : result.trials) {
        if (rec.fail) ++fails;
        csv += std::to_string(rec.trial);
        csv += ',';
        csv += std::to_string(rec.seed);
        csv += ',';
        csv += rec.mu_bar_digest;
        csv += ',';
        csv += rec.delta_digest;
        csv += ',';
        csv += format_double(rec.threshold);
        csv += ',';
        csv += std::to_string(rec.depth_cap);
        csv += ',';
        csv += std::to_string(rec.heavy_count);
        csv += ',';
        csv += std::to_string(rec.final_frontier);
        csv += ',';
        csv += std::to_string(rec.missing);
        csv += ',';
        csv += rec.captured ? "1" : "0";
        csv += ',';
        csv += std::to_string(rec.offside);
        csv += ',';
        csv += rec.sound ? "1" : "0";
        csv += ',';
        csv += rec.fail ? "1" : "0";
        csv += '\n';
    }
    result.csv = std::move(csv);
    result.fail_rate =
        static_cast<double>(fails) / static_cast<double>(cfg.trials);
    return result;
}

namespace {

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::string csv = "quantity,params,estimate,stderr,bound,pass\n";
    for (const auto& row : rows) {
        csv += row.quantity;
        csv += ',';
        csv += row.params;
        csv += ',';
        csv += format_double(row.estimate);
        csv += ',';
        csv += format_double(row.stderr_);
        csv += ',';
        csv += format_double(row.bound);
        csv += ',';
        csv += row.pass ? "1" : "0";
        csv += '\n';
    }
    return csv;
}

} // namespace

ReportResult run_sz_check(const ExperimentConfig& cfg) {
    ExperimentConfig checked = cfg;
    checked.kind = ExperimentKind::SzCheck;
    checked.validate();

    ReportResult result;
    std::uint64_t cell = 0;
    for (int d = 1; d <= checked.sz_d_max; ++d) {
        for (double eps : checked.sz_eps) {
            const auto est = sz_probability(
                d, eps, checked.sz_trials,
                derive_seed(checked.seed, "sz-cell", cell++), checked.workers);
            const std::string params =
                "d=" + std::to_string(d) + ";eps=" + format_double(eps);

            ReportRow bound_row;
            bound_row.quantity = "sz_probability";
            bound_row.params = params;
            bound_row.estimate = est.estimate;
            bound_row.stderr_ = est.stderr_;
            bound_row.bound = sz_bound(d, eps);
            bound_row.pass = est.estimate <= bound_row.bound;
            result.rows.push_back(bound_row);

            if (d <= 2) {
                // Closed-form comparison at the true value's standard error.
                const double exact = sz_exact(d, eps);
                const double se =
                    std::sqrt(exact * (1.0 - exact) /
                              static_cast<double>(checked.sz_trials));
                ReportRow exact_row;
                exact_row.quantity = "sz_exact_gap";
                exact_row.params = params;
                exact_row.estimate = est.estimate;
                exact_row.stderr_ = se;
                exact_row.bound = exact;
                exact_row.pass = std::abs(est.estimate - exact) <= 3.0 * se;
                result.rows.push_back(exact_row);
            }
        }
    }
    for (const auto& row : result.rows) result.all_pass &= row.pass;
    result.csv = report_csv(result.rows);
    return result;
}

ReportResult run_propagation_check(const ExperimentConfig& cfg) {
    ExperimentConfig checked = cfg;
    checked.kind = ExperimentKind::PropagationCheck;
    checked.validate();

    const DecisionTree tree = make_trial_tree(checked, 0);
    const std::vector<double> base = make_trial_base_mu(checked, 0);
    const PointFn f = as_point_fn(tree);
    const auto stats = propagation_min_stats(
        f, base, checked.c, checked.prop_beta, checked.prop_cap,
        checked.prop_trials, derive_seed(checked.seed, "prop", 0),
        checked.prop_norm, checked.workers);

    std::vector<double> alphas = checked.prop_alphas;
    std::sort(alphas.begin(), alphas.end());

    ReportResult result;
    for (double alpha : alphas) {
        const double freq = propagation_frequency(stats, alpha);
        ReportRow row;
        row.quantity = checked.prop_norm == CoeffNorm::Hat
                           ? "propagation_frequency_hat"
                           : "propagation_frequency_bar";
        row.params = "alpha=" + format_double(alpha) +
                     ";beta=" + format_double(checked.prop_beta) +
                     ";cap=" + std::to_string(checked.prop_cap) +
                     ";tree=" + tree_spec(checked) + ";mu=" + mu_spec(checked);
        row.estimate = freq;
        row.stderr_ = std::sqrt(freq * (1.0 - freq) /
                                static_cast<double>(checked.prop_trials));
        row.bound =
            checked.prop_norm == CoeffNorm::Hat
                ? propagation_union_bound_hat(alpha, checked.prop_beta,
                                              checked.c, checked.prop_cap)
                : propagation_union_bound_bar(alpha, checked.prop_beta,
                                              checked.c, checked.prop_cap);
        row.pass = row.estimate <= row.bound;
        result.rows.push_back(row);
    }
    for (const auto& row : result.rows) result.all_pass &= row.pass;
    result.csv = report_csv(result.rows);
    return result;
}

void write_campaign_outputs(const ExperimentConfig& cfg,
                            const std::string& csv) {
    if (cfg.out_path.empty())
        throw std::invalid_argument("config: missing output path");
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + cfg.out_path);
    out << csv;
    std::ofstream side(cfg.out_path + ".json", std::ios::binary);
    if (!side)
        throw std::runtime_error("cannot open for writing: " + cfg.out_path +
                                 ".json");
    side << cfg.to_json();
}

} // namespace smoothdt
