#include "wasep/harness.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>
#include <string>

namespace {

struct CommonOpts {
    std::string config_path = "configs/default.cfg";
    int workers = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "experiment config file")
        ->capture_default_str();
    sub->add_option("--workers", opts.workers, "worker threads")->capture_default_str();
    sub->add_option("--seed", opts.seed, "override master_seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
}

int run_table(const char* name, const CommonOpts& opts,
              wasep::EstimateTable (*fn)(const wasep::ExperimentConfig&, int)) {
    wasep::ExperimentConfig config = wasep::ExperimentConfig::parse_file(opts.config_path);
    if (opts.seed_set) config.master_seed = opts.seed;
    const wasep::EstimateTable table = fn(config, opts.workers);
    wasep::write_outputs(config, name, table);
    std::printf("wrote %s/%s.csv (%zu rows) and %s/%s_manifest.json\n", config.out_dir.c_str(),
                name, table.rows.size(), config.out_dir.c_str(), name);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluctuation-field laboratory for the weakly asymmetric exclusion ring"};
    app.require_subcommand(1);
    CommonOpts opts;
    int m_max = 8, n_max = 8;

    CLI::App* simulate = app.add_subcommand("simulate", "field moments along trajectories");
    CLI::App* cauchy = app.add_subcommand("cauchy-scan", "kernel-scale Cauchy differences");
    CLI::App* remainder =
        app.add_subcommand("remainder-scan", "integrated second moments of the remainders");
    CLI::App* martingale =
        app.add_subcommand("martingale-test", "martingale structure and limit-law report");
    CLI::App* sobolev =
        app.add_subcommand("sobolev-report", "negative-norm distances between kernel scales");
    sobolev->add_option("--m-max", m_max, "time modes")->capture_default_str();
    sobolev->add_option("--n-max", n_max, "space modes")->capture_default_str();
    CLI::App* oracle = app.add_subcommand("oracle-check", "exact small-system cross-checks");
    CLI::App* self = app.add_subcommand("selftest", "fast internal consistency checks");
    for (CLI::App* sub : {simulate, cauchy, remainder, martingale, sobolev, oracle, self})
        add_common(sub, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_table("simulate", opts, wasep::simulate_scan);
        if (cauchy->parsed()) return run_table("cauchy-scan", opts, wasep::cauchy_scan);
        if (remainder->parsed()) return run_table("remainder-scan", opts, wasep::remainder_scan);
        if (martingale->parsed())
            return run_table("martingale-test", opts, wasep::martingale_test);
        if (sobolev->parsed()) {
            wasep::ExperimentConfig config =
                wasep::ExperimentConfig::parse_file(opts.config_path);
            if (opts.seed_set) config.master_seed = opts.seed;
            const wasep::EstimateTable table =
                wasep::sobolev_report(config, opts.workers, m_max, n_max);
            wasep::write_outputs(config, "sobolev-report", table);
            std::printf("wrote %s/sobolev-report.csv (%zu rows)\n", config.out_dir.c_str(),
                        table.rows.size());
            return 0;
        }
        if (oracle->parsed()) {
            wasep::ExperimentConfig config =
                wasep::ExperimentConfig::parse_file(opts.config_path);
            if (opts.seed_set) config.master_seed = opts.seed;
            const wasep::EstimateTable table = wasep::oracle_check(config, opts.workers);
            wasep::write_outputs(config, "oracle-check", table);
            for (const wasep::EstimateRow& r : table.rows)
                std::printf("%-28s %-8s n=%-3d estimate=% .6g se=%.3g\n", r.experiment.c_str(),
                            r.g.c_str(), r.n, r.estimate, r.se);
            return 0;
        }
        if (self->parsed()) return wasep::selftest(opts.workers) ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
