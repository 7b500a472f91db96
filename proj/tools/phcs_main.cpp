// phcs: post-hoc conformal selection from the command line.
//
//   phcs select   --config run.cfg [--out dir]      one selection, path.csv + result.json
//   phcs path     --config run.cfg                  candidate path CSV on stdout
//   phcs simulate --config run.cfg --trials 300     Monte Carlo campaign
//   phcs report   --run.in trials.csv --out dir     re-aggregate a campaign
//
// Every configuration key is also accepted as a flag, e.g. --score.gamma 50.

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phcs/config.hpp"
#include "phcs/error.hpp"
#include "phcs/format.hpp"
#include "phcs/harness.hpp"
#include "phcs/oracle.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> workers;
    std::optional<std::string> out;
    std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "Configuration file (key = value)");
    cmd->add_option("--seed", flags.seed, "Master seed");
    cmd->add_option("--trials", flags.trials, "Number of trials");
    cmd->add_option("--workers", flags.workers, "Concurrent trial workers");
    cmd->add_option("--out", flags.out, "Output directory");
    for (std::string_view key : phcs::known_config_keys()) {
        const std::string name(key);
        cmd->add_option_function<std::string>(
               "--" + name, [&flags, name](const std::string& v) { flags.overrides[name] = v; },
               "Override " + name)
            ->group("Configuration keys");
    }
}

phcs::ConfigMap merged(const CommonFlags& flags) {
    phcs::ConfigMap kv;
    if (!flags.config.empty()) kv = phcs::read_config_file(flags.config);
    for (const auto& [k, v] : flags.overrides) kv[k] = v;
    if (flags.seed) kv["run.seed"] = std::to_string(*flags.seed);
    if (flags.trials) kv["run.trials"] = std::to_string(*flags.trials);
    if (flags.workers) kv["run.workers"] = std::to_string(*flags.workers);
    if (flags.out) kv["run.out"] = *flags.out;
    return kv;
}

void print_outcome(const phcs::SelectResult& r) {
    std::cout << "variant=" << phcs::to_string(r.outcome.variant) << " m=" << r.m << " k=" << r.outcome.k
              << " size=" << r.outcome.members.size() << " alpha=" << phcs::format_number(r.outcome.alpha);
    if (r.realized_fdp) std::cout << " realized_fdp=" << phcs::format_number(*r.realized_fdp);
    std::cout << '\n';
}

int run_oracle(const std::string& e_list, const std::string& p_list, const std::string& scores, double alpha) {
    using namespace phcs;
    std::vector<oracle::OracleReport> reports;
    if (!e_list.empty()) {
        EVector e;
        e.values = parse_number_list(e_list);
        reports.push_back(oracle::compare_ebh(e, alpha));
    }
    if (!p_list.empty()) {
        PVector p;
        p.values = parse_number_list(p_list);
        p.tiebreak_draws.assign(p.values.size(), 0.0);
        reports.push_back(oracle::compare_bh(p, alpha));
    }
    if (!scores.empty()) {
        const auto s = parse_number_list(scores);
        const double mean = oracle::exact_mean_oracle_e(s);
        oracle::OracleReport r;
        r.instance = "oracle e mean over " + std::to_string(s.size()) + " roles";
        r.main_result = format_number(mean);
        r.oracle_result = "1";
        r.agree = std::abs(mean - 1.0) <= 1e-9;
        reports.push_back(r);
    }
    bool ok = true;
    for (const auto& r : reports) {
        std::cout << (r.agree ? "agree" : "DISAGREE") << "  " << r.instance << "  main=" << r.main_result
                  << "  oracle=" << r.oracle_result;
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << '\n';
        ok = ok && r.agree;
    }
    return ok ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Post-hoc conformal selection with e-variables"};
    app.require_subcommand(1);

    CommonFlags select_flags, path_flags, sim_flags, report_flags;
    auto* select_cmd = app.add_subcommand("select", "Run one selection; writes path.csv and result.json");
    auto* path_cmd = app.add_subcommand("path", "Print the candidate path CSV");
    auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo campaign on synthetic data");
    auto* report_cmd = app.add_subcommand("report", "Summarise a trials CSV");
    add_common(select_cmd, select_flags);
    add_common(path_cmd, path_flags);
    add_common(sim_cmd, sim_flags);
    add_common(report_cmd, report_flags);

    std::string oracle_e, oracle_p, oracle_scores;
    double oracle_alpha = 0.1;
    auto* oracle_cmd = app.add_subcommand("oracle", "Check one instance against brute-force references");
    oracle_cmd->group("");
    oracle_cmd->add_option("--e", oracle_e, "Comma-separated e-values");
    oracle_cmd->add_option("--p", oracle_p, "Comma-separated p-values");
    oracle_cmd->add_option("--scores", oracle_scores, "Score multiset for the oracle mean identity");
    oracle_cmd->add_option("--alpha", oracle_alpha, "Level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*oracle_cmd) return run_oracle(oracle_e, oracle_p, oracle_scores, oracle_alpha);

        if (*select_cmd) {
            const auto cfg = phcs::make_run_config(phcs::RunMode::select, merged(select_flags));
            const auto result = phcs::run_select(cfg);
            phcs::write_select_outputs(cfg, result);
            print_outcome(result);
        } else if (*path_cmd) {
            const auto cfg = phcs::make_run_config(phcs::RunMode::path, merged(path_flags));
            const auto result = phcs::run_select(cfg);
            if (!result.path) throw phcs::ConfigError("variant " + std::string(phcs::to_string(cfg.variant)) + " has no path");
            phcs::write_path_csv(std::cout, *result.path, cfg.utility, result.outcome.k);
        } else if (*sim_cmd) {
            const auto cfg = phcs::make_run_config(phcs::RunMode::simulate, merged(sim_flags));
            const auto result = phcs::run_campaign(cfg);
            phcs::write_campaign_outputs(cfg, result);
            std::vector<phcs::TrialReport> all = result.primary;
            all.insert(all.end(), result.baseline.begin(), result.baseline.end());
            if (result.cs_level) std::cout << "cs_alpha_max = " << phcs::format_number(*result.cs_level) << '\n';
            phcs::write_summary(std::cout, all);
        } else if (*report_cmd) {
            const auto cfg = phcs::make_run_config(phcs::RunMode::report, merged(report_flags));
            phcs::run_report(cfg);
            std::cout << "wrote " << cfg.out_dir << "/summary.txt\n";
        }
    } catch (const phcs::Error& e) {
        std::cerr << "phcs: " << e.what() << '\n';
        return phcs::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "phcs: internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
