#include "doctest.h"

#include "wasep/harness.hpp"
#include "wasep/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace wasep;

namespace {

const char* kTinyConfig =
    "# tiny smoke cell\n"
    "epsilon_list = 0.25\n"
    "gamma = 0.5\n"
    "window = 8\n"
    "horizon = 0.1\n"
    "replicas = 8\n"
    "master_seed = 321\n"
    "hermite_indices = 1, 2\n"
    "mollifier = bump\n"
    "n_list = 2, 4\n"
    "sample_times = 3\n"
    "out_dir = out-test\n";

ExperimentConfig tiny() { return ExperimentConfig::parse_text(kTinyConfig); }

} // namespace

TEST_CASE("config parsing resolves lists, counts and comments") {
    const ExperimentConfig c = tiny();
    CHECK(c.epsilon_list == std::vector<double>{0.25});
    CHECK(c.gamma == doctest::Approx(0.5));
    CHECK(c.replicas == 8);
    CHECK(c.master_seed == 321);
    CHECK(c.hermite_indices == std::vector<int>{1, 2});
    CHECK(c.n_list == std::vector<int>{2, 4});
    CHECK(c.out_dir == "out-test");
    // count form: uniform grid including both endpoints
    REQUIRE(c.sample_times.size() == 3);
    CHECK(c.sample_times[0] == doctest::Approx(0.0));
    CHECK(c.sample_times[1] == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(c.sample_times[2] == doctest::Approx(0.1).epsilon(1e-13));

    // explicit list form
    ExperimentConfig d = ExperimentConfig::parse_text(
        "epsilon_list=0.25\ngamma=0\nwindow=8\nhorizon=1\nreplicas=4\nmaster_seed=1\n"
        "hermite_indices=1\nmollifier=polybump\nn_list=2\nsample_times=0, 0.5, 1.0\n"
        "out_dir=o\n");
    CHECK(d.sample_times == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(d.mollifier == "polybump");
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(ExperimentConfig::parse_text("nonsense"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse_text("bogus_key = 1\n"), std::invalid_argument);
    // duplicate key
    CHECK_THROWS_AS(ExperimentConfig::parse_text(std::string(kTinyConfig) + "gamma = 1\n"),
                    std::invalid_argument);
    // missing key (drop out_dir)
    std::string text(kTinyConfig);
    text = text.substr(0, text.find("out_dir"));
    CHECK_THROWS_AS(ExperimentConfig::parse_text(text), std::invalid_argument);
    // unparsable number
    std::string bad(kTinyConfig);
    bad.replace(bad.find("0.25"), 4, "zero");
    CHECK_THROWS_AS(ExperimentConfig::parse_text(bad), std::invalid_argument);
}

TEST_CASE("config validation catches inconsistent cells") {
    ExperimentConfig c = tiny();
    CHECK_NOTHROW(c.validate());

    ExperimentConfig b = c;
    b.epsilon_list = {0.25, 0.25}; // duplicates
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.epsilon_list = {0.25, 5.0}; // L = round(8/5) = 2: ring too small
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.replicas = 1;
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.hermite_indices = {1, 1};
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.hermite_indices = {0};
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.n_list = {4, 2};
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.mollifier = "unknown";
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.sample_times = {0.0};
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.sample_times = {0.0, 0.2}; // beyond horizon
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = c;
    b.out_dir.clear();
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("canonical text and hash are stable and key-order independent") {
    const ExperimentConfig a = tiny();
    // same cell written with keys shuffled and extra whitespace
    const ExperimentConfig b = ExperimentConfig::parse_text(
        "out_dir = out-test\n"
        "sample_times = 3\n"
        "n_list = 2,4\n"
        "mollifier = bump\n"
        "hermite_indices = 1,2\n"
        "master_seed = 321\n"
        "replicas = 8\n"
        "horizon = 0.1\n"
        "window = 8\n"
        "gamma = 0.5\n"
        "epsilon_list = 0.25\n");
    CHECK(a.canonical_text() == b.canonical_text());
    CHECK(a.hash() == b.hash());

    ExperimentConfig c = a;
    c.master_seed = 322;
    CHECK(a.hash() != c.hash());
}

TEST_CASE("params_for and test_functions expand the cell") {
    const ExperimentConfig c = tiny();
    const SimParams p = c.params_for(0.25);
    CHECK(p.sites == 32);
    CHECK(p.gamma == doctest::Approx(0.5));
    CHECK_THROWS_AS(c.params_for(0.1234), std::invalid_argument); // not in the list
    const auto gs = c.test_functions();
    REQUIRE(gs.size() == 2);
    CHECK(gs[0].name() == TestFunction::hermite(1).name());
}

TEST_CASE("estimate table CSV round trip and lookups") {
    EstimateTable t;
    t.rows.push_back({"demo.mean", "G1", 0.25, 0.5, 0, 0.1, 1.0 / 3.0, 0.01, 8});
    t.rows.push_back({"demo.mean", "G2", 0.25, 0.5, 0, 0.1, -2.0, 0.02, 8});
    t.rows.push_back({"demo.flag", "-", 0.0, 0.5, 4, 0.0, 7.0, 0.0, 0});

    const std::string csv = t.to_csv();
    CHECK(csv.rfind("experiment,G,epsilon,gamma,N,t,estimate,stderr,replicas\n", 0) == 0);
    CHECK(csv.find("0.33333333333333331") != std::string::npos); // %.17g
    CHECK(csv.find("demo.flag,-,0,0.5,4,0,7,0,0") != std::string::npos);

    const EstimateRow& r = t.find("demo.mean", "G2", 0.25, 0, 0.1);
    CHECK(r.estimate == doctest::Approx(-2.0));
    CHECK_THROWS_AS(t.find("demo.mean", "G9", 0.25, 0, 0.1), std::runtime_error);
    CHECK(t.select("demo.mean").size() == 2);
    CHECK(t.select("nothing").empty());

    const std::string path = "out-test/tmp_table.csv";
    std::filesystem::create_directories("out-test");
    t.write_csv(path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == csv);
    std::filesystem::remove(path);
}

TEST_CASE("run_replicas is worker-invariant and seed-addressed") {
    const SimParams p = SimParams::make(0.25, 0.5, 8.0, 0.1);
    auto extract = [](int r, const Trajectory& traj, double* out) {
        out[0] = static_cast<double>(traj.events.size());
        out[1] = traj.events.empty() ? 0.0 : traj.events.back().micro_time;
        out[2] = static_cast<double>(r);
    };
    const Eigen::MatrixXd a = run_replicas(p, 10, 99, "det", 1, 3, extract);
    const Eigen::MatrixXd b = run_replicas(p, 10, 99, "det", 4, 3, extract);
    REQUIRE(a.rows() == 10);
    REQUIRE(a.cols() == 3);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    for (int r = 0; r < 10; ++r) CHECK(a(r, 2) == doctest::Approx(double(r)));

    // a different tag must decouple the stream
    const Eigen::MatrixXd c = run_replicas(p, 10, 99, "det2", 2, 3, extract);
    CHECK((a.col(0) - c.col(0)).cwiseAbs().maxCoeff() > 0.0);

    // exceptions from the extractor propagate
    CHECK_THROWS_AS(run_replicas(p, 4, 99, "boom", 2, 1,
                                 [](int, const Trajectory&, double*) {
                                     throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("statistical helpers") {
    Eigen::VectorXd v(5);
    v << 1, 2, 3, 4, 10;
    const MeanSe m = mean_se(v);
    CHECK(m.mean == doctest::Approx(4.0));
    // sample sd = sqrt(12.5), se = sd/sqrt(5)
    CHECK(m.se == doctest::Approx(std::sqrt(12.5 / 5.0)).epsilon(1e-12));

    const MeanSe vv = variance_se(v);
    CHECK(vv.mean == doctest::Approx(12.5));
    CHECK(vv.se == doctest::Approx(12.5 * std::sqrt(2.0 / 4.0)).epsilon(1e-12));

    const LineFit f = ols_fit({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(trapezoid({0, 1, 3}, {0, 2, 6}) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK_THROWS_AS(trapezoid({0, 1}, {0}), std::invalid_argument);

    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-9));

    // a genuinely normal sample passes the 1% Stephens test
    Rng rng(derive_seed(5, "ks", 0));
    std::vector<double> z(2000);
    for (auto& x : z) x = rng.normal();
    CHECK(ks_normal_modified(z) < 1.628);
    // a uniform sample fails it decisively
    std::vector<double> u(2000);
    for (auto& x : u) x = 2.0 * rng.uniform01() - 1.0;
    CHECK(ks_normal_modified(u) > 1.628);
}

TEST_CASE("simulate_scan emits the expected row families deterministically") {
    const ExperimentConfig c = tiny();
    const EstimateTable a = simulate_scan(c, 1);
    const EstimateTable b = simulate_scan(c, 3);
    CHECK(a.to_csv() == b.to_csv()); // worker invariance, byte for byte

    // per (G, t): mean and var rows; per (G): two variance targets
    CHECK(a.select("simulate.mean").size() == 2 * 3);
    CHECK(a.select("simulate.var").size() == 2 * 3);
    CHECK(a.select("simulate.var_target_lattice").size() == 2);
    CHECK(a.select("simulate.var_target_continuum").size() == 2);

    const EstimateRow& tgt = a.find("simulate.var_target_continuum", "G1", 0.25, 0, 0.0);
    CHECK(tgt.estimate == doctest::Approx(1.0).epsilon(1e-8)); // ||G_1||^2 = 1
    for (const EstimateRow* r : a.select("simulate.var")) CHECK(r->estimate > 0.0);
}

TEST_CASE("cauchy_scan produces decreasing-dissipation scaffolding") {
    ExperimentConfig c = tiny();
    c.replicas = 6;
    const EstimateTable t = cauchy_scan(c, 2);
    // reference scale is the largest N: rows for every other N
    CHECK(t.select("cauchy.D").size() == 2 * 1); // 2 Gs, one non-reference N
    for (const EstimateRow* r : t.select("cauchy.D")) {
        CHECK(r->estimate >= 0.0);
        CHECK(r->n == 2);
    }
    // with a single non-reference scale there are no step or slope rows
    CHECK(t.select("cauchy.step").empty());
    CHECK(t.select("cauchy.loglog_slope").empty());

    ExperimentConfig solo = c;
    solo.n_list = {2};
    CHECK_THROWS_AS(cauchy_scan(solo, 1), std::invalid_argument);
}

TEST_CASE("remainder_scan emits per-scale energies") {
    ExperimentConfig c = tiny();
    c.replicas = 6;
    c.hermite_indices = {2};
    const EstimateTable t = remainder_scan(c, 2);
    CHECK(t.select("remainder.S0").size() == 1);           // per (eps, G)
    CHECK(t.select("remainder.S1").size() == 2);           // per (eps, G, N)
    CHECK(t.select("remainder.S4").size() == 2);
    CHECK(t.select("remainder.S3_step").size() == 1);      // adjacent N pairs
    for (const char* fam : {"remainder.S0", "remainder.S1", "remainder.S2",
                            "remainder.S3", "remainder.S4"})
        for (const EstimateRow* r : t.select(fam)) CHECK(r->estimate >= 0.0);
}

TEST_CASE("martingale_test emits the increment/variance/ks battery") {
    ExperimentConfig c = tiny();
    c.replicas = 12;
    c.sample_times = {0.0, 0.025, 0.05, 0.075, 0.1};
    const EstimateTable t = martingale_test(c, 2);
    CHECK(t.select("mart.increment").size() == 6);
    CHECK(t.select("mart.var").size() == 3 * 5); // 2 Gs + combo, per time
    CHECK(t.select("mart.var_slope").size() == 3);
    CHECK(t.select("mart.var_slope_target").size() == 3);
    CHECK(t.select("mart.ks").size() == 2);
    CHECK(t.select("mart.ks_critical").size() == 1);
    CHECK(t.select("mart.cross_cov").size() == 1);
    CHECK(t.select("mart.cross_cov_target").size() == 1);
    // exact linearity of the ledger in G
    const EstimateRow& lin = *t.select("mart.combo_linearity_max").at(0);
    const EstimateRow& scale = *t.select("mart.combo_linearity_scale").at(0);
    CHECK(lin.estimate <= 1e-9 * std::max(1.0, scale.estimate));
}

TEST_CASE("sobolev_report converges its mode tail on a smoke cell") {
    ExperimentConfig c = tiny();
    c.replicas = 6;
    c.sample_times.clear();
    for (int i = 0; i <= 16; ++i) c.sample_times.push_back(0.1 * i / 16.0);
    const EstimateTable t = sobolev_report(c, 2, 3, 3);
    CHECK(t.select("sobolev.dist2").size() == 1);
    CHECK(t.select("sobolev.tail_estimate").size() == 1);
    CHECK(t.select("sobolev.mode.m1").size() == 3); // n = 1..3 at m = 1
    const double dist2 = t.select("sobolev.dist2")[0]->estimate;
    const double tail = t.select("sobolev.tail_estimate")[0]->estimate;
    CHECK(dist2 >= 0.0);
    CHECK(tail <= 0.1 * (dist2 + tail) + 1e-300);

    // Nyquist guard: top requested time mode must be resolved by the grid
    ExperimentConfig coarse = c;
    coarse.sample_times = {0.0, 0.025, 0.05, 0.075, 0.1};
    CHECK_THROWS_AS(sobolev_report(coarse, 1, 8, 2), std::invalid_argument);
}

TEST_CASE("write_outputs drops a csv and a manifest next to it") {
    const ExperimentConfig c = tiny();
    EstimateTable t;
    t.rows.push_back({"demo.mean", "G1", 0.25, 0.5, 0, 0.1, 0.5, 0.01, 8});
    write_outputs(c, "unit_demo", t);

    std::ifstream csv("out-test/unit_demo.csv");
    REQUIRE(csv.good());
    std::stringstream sc;
    sc << csv.rdbuf();
    CHECK(sc.str() == t.to_csv());

    std::ifstream mf("out-test/unit_demo_manifest.json");
    REQUIRE(mf.good());
    std::stringstream sm;
    sm << mf.rdbuf();
    const std::string manifest = sm.str();
    CHECK(manifest.find("\"subcommand\": \"unit_demo\"") != std::string::npos);
    CHECK(manifest.find("\"artifact_version\": \"1.0.0\"") != std::string::npos);
    CHECK(manifest.find("\"config_hash\"") != std::string::npos);
    CHECK(manifest.find("\"master_seed\": 321") != std::string::npos);

    std::filesystem::remove_all("out-test");
}
