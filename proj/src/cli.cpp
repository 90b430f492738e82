#include "smoothdt/cli.hpp"

#include "smoothdt/harness.hpp"
#include "smoothdt/rng.hpp"
#include "smoothdt/util.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace smoothdt {

namespace {

void parse_tree_spec(const std::string& spec, ExperimentConfig& cfg) {
    if (spec.rfind("random:", 0) == 0) {
        cfg.tree_source = TreeSource::Random;
        cfg.tree_size = std::stoi(spec.substr(7));
    } else if (spec.rfind("parity:", 0) == 0) {
        cfg.tree_source = TreeSource::Parity;
        cfg.parity_k = std::stoi(spec.substr(7));
    } else if (spec.rfind("file:", 0) == 0) {
        cfg.tree_source = TreeSource::File;
        cfg.tree_file = spec.substr(5);
    } else {
        throw CLI::ValidationError(
            "--tree", "expected random:<size>, parity:<k> or file:<path>");
    }
}

void parse_mu_spec(const std::string& spec, ExperimentConfig& cfg) {
    if (spec == "zero") {
        cfg.mu_source = MuBarSource::Zero;
    } else if (spec == "random") {
        cfg.mu_source = MuBarSource::Random2cBounded;
    } else if (spec.rfind("file:", 0) == 0) {
        cfg.mu_source = MuBarSource::File;
        cfg.mu_file = spec.substr(5);
    } else {
        throw CLI::ValidationError("--mu",
                                   "expected zero, random or file:<path>");
    }
}

void parse_eval_spec(const std::string& spec, ExperimentConfig& cfg) {
    if (spec == "exact") {
        cfg.eval = EvalMode::Exact;
    } else if (spec.rfind("mc:", 0) == 0) {
        cfg.eval = EvalMode::MonteCarlo;
        cfg.mc_points = std::stoull(spec.substr(3));
    } else {
        throw CLI::ValidationError("--eval", "expected exact or mc:<points>");
    }
}

void add_common_flags(CLI::App* cmd, ExperimentConfig& cfg, std::string& tree,
                      std::string& mu, std::string& eval,
                      std::string& convention) {
    cmd->add_option("--n", cfg.n, "variable count");
    cmd->add_option("--c", cfg.c, "boundedness margin");
    cmd->add_option("--m", cfg.m, "training examples per trial");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--trials", cfg.trials, "trial count");
    cmd->add_option("--workers", cfg.workers, "parallel trial workers");
    cmd->add_option("--epsilon", cfg.epsilon, "target accuracy epsilon");
    cmd->add_option("--delta", cfg.delta, "confidence delta");
    cmd->add_option("--tree", tree,
                    "target tree: random:<size> | parity:<k> | file:<path>");
    cmd->add_option("--mu", mu, "base means: zero | random | file:<path>");
    cmd->add_option("--mu-convention", convention,
                    "convention for file-provided means: pm1 | 01 "
                    "(01 biases b map to 2b-1)");
    cmd->add_option("--eval", eval, "error evaluation: exact | mc:<points>");
    cmd->add_option("--out", cfg.out_path, "output CSV path")->required();
}

void finish_config(ExperimentConfig& cfg, const std::string& tree,
                   const std::string& mu, const std::string& eval,
                   const std::string& convention) {
    parse_tree_spec(tree, cfg);
    parse_mu_spec(mu, cfg);
    parse_eval_spec(eval, cfg);
    if (convention == "pm1")
        cfg.mu_convention = MuConvention::PlusMinusOne;
    else if (convention == "01")
        cfg.mu_convention = MuConvention::ZeroOne;
    else
        throw CLI::ValidationError("--mu-convention", "expected pm1 or 01");
}

void print_campaign_summary(const ExperimentConfig& cfg,
                            const CampaignResult& result) {
    double total_ms = 0.0;
    for (const auto& rec : result.trials) total_ms += rec.wall_ms;
    std::cout << "trials=" << result.trials.size()
              << " fail_rate=" << format_double(result.fail_rate)
              << " wall_ms_total=" << format_double(total_ms) << "\n"
              << "wrote " << cfg.out_path << " and " << cfg.out_path
              << ".json\n";
}

} // namespace

int cli(const std::vector<std::string>& args) {
    CLI::App app{"smoothdt: decision-tree learning from perturbed product "
                 "distributions, with exact verification oracles"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string tree = "random:16";
    std::string mu = "zero";
    std::string eval = "exact";
    std::string convention = "pm1";
    std::string norm = "hat";
    double threshold = -1.0;
    int depth_cap = -1;
    long long frontier_cap = -1;

    auto* learn_cmd =
        app.add_subcommand("learn", "end-to-end learning campaign");
    add_common_flags(learn_cmd, cfg, tree, mu, eval, convention);
    learn_cmd->add_option("--threshold", threshold,
                          "frontier threshold override (default m^-1/3)");
    learn_cmd->add_option("--depth-cap", depth_cap,
                          "depth cap override (default (ln m)/12 (1-max|mu|))");
    learn_cmd->add_option("--frontier-cap", frontier_cap,
                          "frontier cap override (default m)");
    learn_cmd->add_option("--max-fail-rate", cfg.max_fail_rate,
                          "exit 2 if the FAIL rate exceeds this limit");
    std::string learner_mu = "exact";
    learn_cmd->add_option("--learner-mu", learner_mu,
                          "means given to the learner: exact | estimated");

    auto* sz_cmd = app.add_subcommand(
        "sz-check", "closeness-to-zero probabilities for random products");
    add_common_flags(sz_cmd, cfg, tree, mu, eval, convention);
    sz_cmd->add_option("--d-max", cfg.sz_d_max, "largest degree in the grid");
    sz_cmd->add_option("--eps-grid", cfg.sz_eps, "epsilon grid");
    sz_cmd->add_option("--sz-trials", cfg.sz_trials, "Monte-Carlo trials");

    auto* prop_cmd = app.add_subcommand(
        "propagation-check",
        "frequency of small sub-coefficients under heavy coefficients");
    add_common_flags(prop_cmd, cfg, tree, mu, eval, convention);
    prop_cmd->add_option("--beta", cfg.prop_beta, "heavy threshold");
    prop_cmd->add_option("--cap", cfg.prop_cap, "degree cap");
    prop_cmd->add_option("--alpha-grid", cfg.prop_alphas, "alpha grid");
    prop_cmd->add_option("--prop-trials", cfg.prop_trials,
                         "perturbation trials");
    prop_cmd->add_option("--norm", norm, "coefficient normalization: hat | bar");

    auto* recovery_cmd = app.add_subcommand(
        "coeff-recovery", "frontier versus the exact heavy coefficient set");
    add_common_flags(recovery_cmd, cfg, tree, mu, eval, convention);
    recovery_cmd->add_option("--threshold", threshold,
                             "frontier threshold override");
    recovery_cmd->add_option("--depth-cap", depth_cap, "depth cap override");
    recovery_cmd->add_option("--frontier-cap", frontier_cap,
                             "frontier cap override");
    recovery_cmd->add_option("--theta-mult", cfg.theta_mult,
                             "heavy-set threshold = mult * t");

    auto* coeffs_cmd = app.add_subcommand(
        "oracle-coeffs", "exact coefficient table of a tree at given means");
    add_common_flags(coeffs_cmd, cfg, tree, mu, eval, convention);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        finish_config(cfg, tree, mu, eval, convention);
        if (threshold >= 0.0) cfg.threshold = threshold;
        if (depth_cap >= 0) cfg.depth_cap = depth_cap;
        if (frontier_cap >= 0)
            cfg.frontier_cap = static_cast<std::size_t>(frontier_cap);

        if (app.got_subcommand(learn_cmd)) {
            cfg.kind = ExperimentKind::Learn;
            if (learner_mu == "exact")
                cfg.learner_mu = MuSource::Exact;
            else if (learner_mu == "estimated")
                cfg.learner_mu = MuSource::Estimated;
            else
                throw std::invalid_argument(
                    "--learner-mu: expected exact or estimated");
            const CampaignResult result = run_learn_experiment(cfg);
            write_campaign_outputs(cfg, result.csv);
            print_campaign_summary(cfg, result);
            if (result.fail_rate > cfg.max_fail_rate) {
                std::cerr << "FAIL rate " << format_double(result.fail_rate)
                          << " exceeds limit "
                          << format_double(cfg.max_fail_rate) << "\n";
                return 2;
            }
        } else if (app.got_subcommand(recovery_cmd)) {
            cfg.kind = ExperimentKind::CoeffRecovery;
            const CampaignResult result = run_coeff_recovery(cfg);
            write_campaign_outputs(cfg, result.csv);
            print_campaign_summary(cfg, result);
            if (result.fail_rate > cfg.max_fail_rate) {
                std::cerr << "FAIL rate " << format_double(result.fail_rate)
                          << " exceeds limit "
                          << format_double(cfg.max_fail_rate) << "\n";
                return 2;
            }
        } else if (app.got_subcommand(sz_cmd)) {
            cfg.kind = ExperimentKind::SzCheck;
            const ReportResult result = run_sz_check(cfg);
            write_campaign_outputs(cfg, result.csv);
            std::cout << (result.all_pass ? "all rows pass"
                                          : "some rows FAIL the bound")
                      << "; wrote " << cfg.out_path << "\n";
        } else if (app.got_subcommand(prop_cmd)) {
            cfg.kind = ExperimentKind::PropagationCheck;
            if (norm == "hat")
                cfg.prop_norm = CoeffNorm::Hat;
            else if (norm == "bar")
                cfg.prop_norm = CoeffNorm::Bar;
            else
                throw std::invalid_argument("--norm: expected hat or bar");
            const ReportResult result = run_propagation_check(cfg);
            write_campaign_outputs(cfg, result.csv);
            std::cout << (result.all_pass ? "all rows pass"
                                          : "some rows FAIL the bound")
                      << "; wrote " << cfg.out_path << "\n";
        } else if (app.got_subcommand(coeffs_cmd)) {
            cfg.kind = ExperimentKind::Learn; // reuse learn validation rules
            cfg.validate();
            if (cfg.n > kEnumCap)
                throw std::invalid_argument(
                    "oracle-coeffs: n exceeds the enumeration cap");
            const DecisionTree tree_obj = make_trial_tree(cfg, 0);
            const std::vector<double> mu_vec = make_trial_base_mu(cfg, 0);
            const ProductDist dist(mu_vec, cfg.c);
            const SparsePoly table =
                expand_exact(as_point_fn(tree_obj), dist);
            std::ofstream out(cfg.out_path, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot open for writing: " +
                                         cfg.out_path);
            write_coeff_csv(out, table);
            std::cout << "wrote " << table.term_count() << " coefficients to "
                      << cfg.out_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace smoothdt
