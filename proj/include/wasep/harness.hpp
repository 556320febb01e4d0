#pragma once

#include "wasep/gaussian.hpp"
#include "wasep/ledger.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wasep {

inline constexpr const char* kArtifactVersion = "1.0.0";

// Plain-text experiment description, `key = value` per line, '#' comments.
// Keys: epsilon_list, gamma, window, horizon, replicas, master_seed,
// hermite_indices, mollifier, n_list, sample_times, out_dir.
// sample_times is either a point count (uniform grid on [0, horizon] incl.
// endpoints) or an explicit comma-separated list of times.
struct ExperimentConfig {
    std::vector<double> epsilon_list;
    double gamma = 1.0;
    double window = 20.0;
    double horizon = 0.25;
    int replicas = 400;
    std::uint64_t master_seed = 1;
    std::vector<int> hermite_indices;
    std::string mollifier = "bump";
    std::vector<int> n_list;
    std::vector<double> sample_times;
    std::string out_dir = "out";

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_text(const std::string& text);

    void validate() const; // throws std::invalid_argument with the offending key

    // Deterministic resolved form (fixed key order, %.17g values); the config
    // hash is the FNV-1a of this text.
    std::string canonical_text() const;
    std::uint64_t hash() const;

    SimParams params_for(double epsilon) const;
    std::vector<TestFunction> test_functions() const;
};

struct EstimateRow {
    std::string experiment;
    std::string g = "-";    // test function name, "-" when not applicable
    double epsilon = 0.0;   // 0 when not applicable
    double gamma = 0.0;
    int n = 0;              // kernel scale, 0 when not applicable
    double t = 0.0;
    double estimate = 0.0;
    double se = 0.0;        // 0 for deterministic/diagnostic rows
    long replicas = 0;
};

struct EstimateTable {
    std::vector<EstimateRow> rows;

    std::string to_csv() const; // header: experiment,G,epsilon,gamma,N,t,estimate,stderr,replicas
    void write_csv(const std::string& path) const;
    const EstimateRow& find(const std::string& experiment, const std::string& g, double epsilon,
                            int n, double t) const; // throws if absent or ambiguous
    std::vector<const EstimateRow*> select(const std::string& experiment) const;
};

// Run `replicas` independent trajectories of `params`; replica r is driven by
// derive_seed(master, tag, r), so results are byte-identical for any worker
// count. extract fills dim doubles per replica; returns the replicas x dim
// matrix in replica order.
Eigen::MatrixXd run_replicas(const SimParams& params, int replicas, std::uint64_t master,
                             const std::string& tag, int workers, int dim,
                             const std::function<void(int, const Trajectory&, double*)>& extract);

// Statistical scans; each returns the full estimate table it would write.
EstimateTable simulate_scan(const ExperimentConfig& config, int workers);
EstimateTable cauchy_scan(const ExperimentConfig& config, int workers);
EstimateTable remainder_scan(const ExperimentConfig& config, int workers);
EstimateTable martingale_test(const ExperimentConfig& config, int workers);
EstimateTable sobolev_report(const ExperimentConfig& config, int workers, int m_max = 8,
                             int n_max = 8);
EstimateTable oracle_check(const ExperimentConfig& config, int workers);
bool selftest(int workers);

// Write <out_dir>/<name>.csv and <out_dir>/<name>_manifest.json.
void write_outputs(const ExperimentConfig& config, const std::string& name,
                   const EstimateTable& table);

// small shared numeric helpers
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(const Eigen::VectorXd& v);
MeanSe variance_se(const Eigen::VectorXd& v); // sample variance with normal-theory se

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

// Stephens-modified Kolmogorov statistic of standardized samples against the
// standard normal: D (sqrt(n) + 0.12 + 0.11/sqrt(n)); 1% critical value 1.628.
double ks_normal_modified(std::vector<double> standardized);
double normal_cdf(double x);

} // namespace wasep
