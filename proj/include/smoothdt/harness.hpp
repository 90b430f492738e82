#pragma once

#include "smoothdt/learner.hpp"
#include "smoothdt/oracle.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smoothdt {

enum class ExperimentKind { Learn, SzCheck, PropagationCheck, CoeffRecovery };
enum class TreeSource { Random, Parity, File };
enum class MuBarSource { Zero, Random2cBounded, File };
enum class EvalMode { Exact, MonteCarlo };
enum class MuConvention { PlusMinusOne, ZeroOne };

/// One seeded experiment campaign. Every output byte is a function of
/// (config, seed) alone; worker count only changes wall time, which is why
/// it is excluded from the config echo.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Learn;

    int n = 16;
    double c = 0.1;
    std::size_t m = 100000;
    double epsilon = 0.1;
    double delta = 0.1;
    std::uint64_t seed = 1;
    std::size_t trials = 20;
    int workers = 1;

    TreeSource tree_source = TreeSource::Random;
    int tree_size = 16; // random:<size>
    int parity_k = 4;   // parity:<k>
    std::string tree_file;

    MuBarSource mu_source = MuBarSource::Zero;
    std::string mu_file;
    /// File-provided means may be written in the {0,1} convention
    /// (biases b in [0,1]); they are mapped to 2b-1 on load.
    MuConvention mu_convention = MuConvention::PlusMinusOne;

    MuSource learner_mu = MuSource::Exact;
    std::optional<double> threshold;
    std::optional<int> depth_cap;
    std::optional<std::size_t> frontier_cap;

    EvalMode eval = EvalMode::Exact;
    std::size_t mc_points = 100000;
    double max_fail_rate = 1.0;

    // sz-check grid
    int sz_d_max = 5;
    std::vector<double> sz_eps{1e-1, 1e-2, 1e-3, 1e-4};
    std::size_t sz_trials = 1000000;

    // propagation-check grid
    double prop_beta = 0.5;
    int prop_cap = 3;
    std::vector<double> prop_alphas{0.0, 1e-20, 1e-16, 1e-12, 1e-8, 1e-4};
    std::size_t prop_trials = 10000;
    CoeffNorm prop_norm = CoeffNorm::Hat;

    // coeff-recovery
    double theta_mult = 2.0;

    std::string out_path;

    void validate() const; // throws std::invalid_argument
    std::string to_json() const;
};

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string mu_bar_digest;
    std::string delta_digest;
    std::vector<std::size_t> frontier_sizes;
    std::size_t final_frontier = 0;
    bool fail = false;
    double error = 0.0;
    double wall_ms = 0.0; // diagnostics only, never part of the CSV

    // coeff-recovery extras
    double threshold = 0.0;
    int depth_cap = 0;
    std::size_t heavy_count = 0;
    std::size_t missing = 0;
    std::size_t offside = 0;
    bool captured = false;
    bool sound = false;
};

struct CampaignResult {
    std::vector<TrialRecord> trials;
    std::string csv; // full deterministic file contents
    double fail_rate = 0.0;
};

struct ReportRow {
    std::string quantity;
    std::string params;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct ReportResult {
    std::vector<ReportRow> rows;
    std::string csv;
    bool all_pass = true;
};

/// Per trial: draw/load the tree, draw the base means and the perturbation,
/// sample m labeled examples, learn, measure the error.
CampaignResult run_learn_experiment(const ExperimentConfig& cfg);
/// Learner frontier versus the exact heavy set and the exact per-set
/// coefficient floor (t - t sqrt(eps)/4).
CampaignResult run_coeff_recovery(const ExperimentConfig& cfg);
ReportResult run_sz_check(const ExperimentConfig& cfg);
ReportResult run_propagation_check(const ExperimentConfig& cfg);

// Shared building blocks (also used by tests and the acceptance suite).
DecisionTree make_trial_tree(const ExperimentConfig& cfg, std::uint64_t trial);
std::vector<double> make_trial_base_mu(const ExperimentConfig& cfg,
                                       std::uint64_t trial);
Dataset make_dataset(const DecisionTree& f, const ProductDist& dist,
                     std::size_t m, std::mt19937_64& rng);

/// Writes the CSV plus the "<path>.json" config-echo sidecar.
void write_campaign_outputs(const ExperimentConfig& cfg,
                            const std::string& csv);

} // namespace smoothdt
