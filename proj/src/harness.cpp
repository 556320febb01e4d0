#include "wasep/harness.hpp"

#include "wasep/basis.hpp"
#include "wasep/quadrature.hpp"

#include "json.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wasep {

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

double to_double(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: trailing junk for " + key + ": '" + v + "'");
    return x;
}

long long to_ll(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: trailing junk for " + key + ": '" + v + "'");
    return x;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt_g(v[i]);
    }
    return s;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

double clip2(double v) { return std::max(-2.0, std::min(2.0, v)); }

} // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!kv.emplace(key, value).second)
            throw std::invalid_argument("config: duplicate key " + key);
    }

    static const std::set<std::string> known = {
        "epsilon_list", "gamma",     "window", "horizon",      "replicas", "master_seed",
        "hermite_indices", "mollifier", "n_list", "sample_times", "out_dir"};
    for (const auto& [k, v] : kv)
        if (known.count(k) == 0) throw std::invalid_argument("config: unknown key " + k);
    static const char* required[] = {"epsilon_list", "gamma",           "window",
                                     "horizon",      "replicas",        "master_seed",
                                     "hermite_indices", "mollifier",    "n_list",
                                     "sample_times", "out_dir"};
    for (const char* k : required)
        if (kv.count(k) == 0) throw std::invalid_argument(std::string("config: missing key ") + k);

    ExperimentConfig c;
    for (const std::string& tok : split_list(kv.at("epsilon_list")))
        c.epsilon_list.push_back(to_double(tok, "epsilon_list"));
    c.gamma = to_double(kv.at("gamma"), "gamma");
    c.window = to_double(kv.at("window"), "window");
    c.horizon = to_double(kv.at("horizon"), "horizon");
    c.replicas = static_cast<int>(to_ll(kv.at("replicas"), "replicas"));
    c.master_seed = static_cast<std::uint64_t>(to_ll(kv.at("master_seed"), "master_seed"));
    for (const std::string& tok : split_list(kv.at("hermite_indices")))
        c.hermite_indices.push_back(static_cast<int>(to_ll(tok, "hermite_indices")));
    c.mollifier = kv.at("mollifier");
    for (const std::string& tok : split_list(kv.at("n_list")))
        c.n_list.push_back(static_cast<int>(to_ll(tok, "n_list")));

    std::string st = kv.count("sample_times") ? kv.at("sample_times") : "33";
    if (st.find(',') == std::string::npos && st.find('.') == std::string::npos) {
        const long long count = to_ll(st, "sample_times");
        if (count < 2) throw std::invalid_argument("config: sample_times count must be >= 2");
        for (long long i = 0; i < count; ++i)
            c.sample_times.push_back(c.horizon * static_cast<double>(i) /
                                     static_cast<double>(count - 1));
    } else {
        for (const std::string& tok : split_list(st))
            c.sample_times.push_back(to_double(tok, "sample_times"));
    }
    if (kv.count("out_dir")) c.out_dir = kv.at("out_dir");
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    if (epsilon_list.empty()) throw std::invalid_argument("config: epsilon_list is empty");
    for (double e : epsilon_list) params_for(e); // throws on bad scaling/geometry
    std::set<double> eps_set(epsilon_list.begin(), epsilon_list.end());
    if (eps_set.size() != epsilon_list.size())
        throw std::invalid_argument("config: duplicate epsilon");
    if (replicas < 2) throw std::invalid_argument("config: replicas must be >= 2");
    if (hermite_indices.empty()) throw std::invalid_argument("config: hermite_indices is empty");
    std::set<int> hset(hermite_indices.begin(), hermite_indices.end());
    if (hset.size() != hermite_indices.size())
        throw std::invalid_argument("config: duplicate hermite index");
    for (int n : hermite_indices)
        if (n < 1 || n > 60) throw std::invalid_argument("config: hermite index out of range");
    Mollifier::from_name(mollifier); // throws on unknown name
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw std::invalid_argument("config: n_list entries must be >= 1");
        if (i > 0 && n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("config: n_list must be strictly increasing");
    }
    if (sample_times.size() < 2)
        throw std::invalid_argument("config: need at least two sample times");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (sample_times[i] < -1e-12 || sample_times[i] > horizon * (1.0 + 1e-12))
            throw std::invalid_argument("config: sample time outside [0, horizon]");
        if (i > 0 && sample_times[i] < sample_times[i - 1])
            throw std::invalid_argument("config: sample_times must be non-decreasing");
    }
    if (out_dir.empty()) throw std::invalid_argument("config: out_dir is empty");
}

std::string ExperimentConfig::canonical_text() const {
    std::string s;
    s += "epsilon_list=" + join_doubles(epsilon_list) + "\n";
    s += "gamma=" + fmt_g(gamma) + "\n";
    s += "window=" + fmt_g(window) + "\n";
    s += "horizon=" + fmt_g(horizon) + "\n";
    s += "replicas=" + std::to_string(replicas) + "\n";
    s += "master_seed=" + std::to_string(master_seed) + "\n";
    s += "hermite_indices=" + join_ints(hermite_indices) + "\n";
    s += "mollifier=" + mollifier + "\n";
    s += "n_list=" + join_ints(n_list) + "\n";
    s += "sample_times=" + join_doubles(sample_times) + "\n";
    s += "out_dir=" + out_dir + "\n";
    return s;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical_text()); }

SimParams ExperimentConfig::params_for(double epsilon) const {
    bool listed = false;
    for (double e : epsilon_list) listed = listed || e == epsilon;
    if (!listed) throw std::invalid_argument("config: epsilon not in epsilon_list");
    return SimParams::make(epsilon, gamma, window, horizon);
}

std::vector<TestFunction> ExperimentConfig::test_functions() const {
    std::vector<TestFunction> gs;
    gs.reserve(hermite_indices.size());
    for (int n : hermite_indices) gs.push_back(TestFunction::hermite(n));
    return gs;
}

std::string EstimateTable::to_csv() const {
    std::string s = "experiment,G,epsilon,gamma,N,t,estimate,stderr,replicas\n";
    for (const EstimateRow& r : rows) {
        s += r.experiment + "," + r.g + "," + fmt_g(r.epsilon) + "," + fmt_g(r.gamma) + "," +
             std::to_string(r.n) + "," + fmt_g(r.t) + "," + fmt_g(r.estimate) + "," +
             fmt_g(r.se) + "," + std::to_string(r.replicas) + "\n";
    }
    return s;
}

void EstimateTable::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_csv();
}

const EstimateRow& EstimateTable::find(const std::string& experiment, const std::string& g,
                                       double epsilon, int n, double t) const {
    const EstimateRow* hit = nullptr;
    for (const EstimateRow& r : rows) {
        if (r.experiment != experiment || r.g != g || r.n != n) continue;
        if (std::abs(r.epsilon - epsilon) > 1e-12 * std::max(1.0, std::abs(epsilon))) continue;
        if (std::abs(r.t - t) > 1e-9) continue;
        if (hit) throw std::runtime_error("EstimateTable::find: ambiguous " + experiment);
        hit = &r;
    }
    if (!hit)
        throw std::runtime_error("EstimateTable::find: no row " + experiment + " g=" + g +
                                 " eps=" + fmt_g(epsilon) + " n=" + std::to_string(n) +
                                 " t=" + fmt_g(t));
    return *hit;
}

std::vector<const EstimateRow*> EstimateTable::select(const std::string& experiment) const {
    std::vector<const EstimateRow*> out;
    for (const EstimateRow& r : rows)
        if (r.experiment == experiment) out.push_back(&r);
    return out;
}

MeanSe mean_se(const Eigen::VectorXd& v) {
    const double n = static_cast<double>(v.size());
    MeanSe r;
    r.mean = v.mean();
    if (v.size() > 1) {
        const double ss = (v.array() - r.mean).square().sum() / (n - 1.0);
        r.se = std::sqrt(ss / n);
    }
    return r;
}

MeanSe variance_se(const Eigen::VectorXd& v) {
    const double n = static_cast<double>(v.size());
    MeanSe r;
    if (v.size() < 2) return r;
    const double mean = v.mean();
    r.mean = (v.array() - mean).square().sum() / (n - 1.0);
    r.se = r.mean * std::sqrt(2.0 / (n - 1.0));
    return r;
}

LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("ols_fit: bad input");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("trapezoid: bad input");
    double s = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_normal_modified(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
}

Eigen::MatrixXd run_replicas(const SimParams& params, int replicas, std::uint64_t master,
                             const std::string& tag, int workers, int dim,
                             const std::function<void(int, const Trajectory&, double*)>& extract) {
    if (replicas < 1 || dim < 1) throw std::invalid_argument("run_replicas: bad sizes");
    Eigen::MatrixXd out(replicas, dim);
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr err;

    auto body = [&]() {
        std::vector<double> buf(static_cast<std::size_t>(dim));
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= replicas) return;
            try {
                Rng rng(derive_seed(master, tag, static_cast<std::uint64_t>(r)));
                SpinState s = sample_initial(params, rng);
                const Trajectory traj = advance(s, params, rng, params.micro_horizon());
                extract(r, traj, buf.data());
                for (int k = 0; k < dim; ++k) out(r, k) = buf[static_cast<std::size_t>(k)];
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(replicas);
                return;
            }
        }
    };

    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(body);
        for (std::thread& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);
    return out;
}

EstimateTable simulate_scan(const ExperimentConfig& config, int workers) {
    EstimateTable table;
    const std::vector<TestFunction> gs = config.test_functions();
    const std::size_t ng = gs.size();
    const std::size_t nt = config.sample_times.size();

    for (double eps : config.epsilon_list) {
        const SimParams params = config.params_for(eps);
        LedgerRequest req;
        req.gs = gs;
        req.sample_times = config.sample_times;
        const LedgerTables tables = LedgerTables::build(params, req);

        const int dim = static_cast<int>(ng * nt);
        const Eigen::MatrixXd m = run_replicas(
            params, config.replicas, config.master_seed, "simulate", workers, dim,
            [&](int, const Trajectory& traj, double* out) {
                const LedgerResult res = run_ledger(traj, req, &tables);
                for (std::size_t gi = 0; gi < ng; ++gi)
                    for (std::size_t ti = 0; ti < nt; ++ti)
                        out[gi * nt + ti] = res.g[gi].y[ti];
            });

        for (std::size_t gi = 0; gi < ng; ++gi) {
            for (std::size_t ti = 0; ti < nt; ++ti) {
                const Eigen::VectorXd col = m.col(static_cast<Eigen::Index>(gi * nt + ti));
                const MeanSe mu = mean_se(col);
                const MeanSe va = variance_se(col);
                table.rows.push_back({"simulate.mean", gs[gi].name(), eps, config.gamma, 0,
                                      config.sample_times[ti], mu.mean, mu.se, config.replicas});
                table.rows.push_back({"simulate.var", gs[gi].name(), eps, config.gamma, 0,
                                      config.sample_times[ti], va.mean, va.se, config.replicas});
            }
            double lattice_var = 0.0;
            for (int x = 0; x < params.sites; ++x) {
                const double v = gs[gi](params.site_coord(x));
                lattice_var += eps * v * v;
            }
            table.rows.push_back({"simulate.var_target_lattice", gs[gi].name(), eps, config.gamma,
                                  0, 0.0, lattice_var, 0.0, config.replicas});
            table.rows.push_back({"simulate.var_target_continuum", gs[gi].name(), eps,
                                  config.gamma, 0, 0.0, gs[gi].l2_norm_sq(0), 0.0,
                                  config.replicas});
        }
    }
    return table;
}

EstimateTable cauchy_scan(const ExperimentConfig& config, int workers) {
    if (config.n_list.size() < 2)
        throw std::invalid_argument("cauchy_scan: need at least two kernel scales");
    EstimateTable table;
    const std::vector<TestFunction> gs = config.test_functions();
    const std::size_t ng = gs.size();
    const std::size_t nn = config.n_list.size();
    const std::size_t nt = config.sample_times.size();
    const std::size_t nlow = nn - 1; // scales compared against the finest one

    for (double eps : config.epsilon_list) {
        const SimParams params = config.params_for(eps);
        LedgerRequest req;
        req.gs = gs;
        req.ns = config.n_list;
        req.moll = Mollifier::from_name(config.mollifier);
        req.sample_times = config.sample_times;
        req.want_nonlinear = true;
        const LedgerTables tables = LedgerTables::build(params, req);

        const int dim = static_cast<int>(ng * nlow);
        const Eigen::MatrixXd m = run_replicas(
            params, config.replicas, config.master_seed, "cauchy", workers, dim,
            [&](int, const Trajectory& traj, double* out) {
                const LedgerResult res = run_ledger(traj, req, &tables);
                std::vector<double> sq(nt);
                for (std::size_t gi = 0; gi < ng; ++gi) {
                    const std::vector<double>& ref = res.gn[gi][nn - 1].nl;
                    for (std::size_t ni = 0; ni < nlow; ++ni) {
                        const std::vector<double>& nl = res.gn[gi][ni].nl;
                        for (std::size_t ti = 0; ti < nt; ++ti) {
                            const double d = ref[ti] - nl[ti];
                            sq[ti] = d * d;
                        }
                        out[gi * nlow + ni] = trapezoid(config.sample_times, sq);
                    }
                }
            });

        for (std::size_t gi = 0; gi < ng; ++gi) {
            std::vector<double> logn, logd;
            for (std::size_t ni = 0; ni < nlow; ++ni) {
                const Eigen::VectorXd col = m.col(static_cast<Eigen::Index>(gi * nlow + ni));
                const MeanSe d = mean_se(col);
                table.rows.push_back({"cauchy.D", gs[gi].name(), eps, config.gamma,
                                      config.n_list[ni], config.horizon, d.mean, d.se,
                                      config.replicas});
                logn.push_back(std::log(static_cast<double>(config.n_list[ni])));
                logd.push_back(std::log(std::max(d.mean, 1e-300)));
            }
            if (nlow >= 2) {
                const LineFit fit = ols_fit(logn, logd);
                table.rows.push_back({"cauchy.loglog_slope", gs[gi].name(), eps, config.gamma, 0,
                                      config.horizon, fit.slope, 0.0, config.replicas});
            }
            // paired step differences D(N_{k+1}) - D(N_k)
            for (std::size_t ni = 0; ni + 1 < nlow; ++ni) {
                const Eigen::VectorXd diff =
                    m.col(static_cast<Eigen::Index>(gi * nlow + ni + 1)) -
                    m.col(static_cast<Eigen::Index>(gi * nlow + ni));
                const MeanSe d = mean_se(diff);
                table.rows.push_back({"cauchy.step", gs[gi].name(), eps, config.gamma,
                                      config.n_list[ni + 1], config.horizon, d.mean, d.se,
                                      config.replicas});
            }
            // paired envelope slack D(N) - (N_min/N)^{1/3} D(N_min)
            const double n0 = static_cast<double>(config.n_list[0]);
            for (std::size_t ni = 1; ni < nlow; ++ni) {
                const double ratio = std::pow(n0 / static_cast<double>(config.n_list[ni]),
                                              1.0 / 3.0);
                const Eigen::VectorXd slack =
                    m.col(static_cast<Eigen::Index>(gi * nlow + ni)) -
                    ratio * m.col(static_cast<Eigen::Index>(gi * nlow));
                const MeanSe d = mean_se(slack);
                table.rows.push_back({"cauchy.envelope_slack", gs[gi].name(), eps, config.gamma,
                                      config.n_list[ni], config.horizon, d.mean, d.se,
                                      config.replicas});
            }
        }
    }
    return table;
}

EstimateTable remainder_scan(const ExperimentConfig& config, int workers) {
    if (config.n_list.empty())
        throw std::invalid_argument("remainder_scan: need kernel scales");
    EstimateTable table;
    const std::vector<TestFunction> gs = config.test_functions();
    const std::size_t ng = gs.size();
    const std::size_t nn = config.n_list.size();
    const std::size_t nt = config.sample_times.size();

    for (double eps : config.epsilon_list) {
        const SimParams params = config.params_for(eps);
        LedgerRequest req;
        req.gs = gs;
        req.ns = config.n_list;
        req.moll = Mollifier::from_name(config.mollifier);
        req.sample_times = config.sample_times;
        req.want_remainders = true;
        const LedgerTables tables = LedgerTables::build(params, req);

        // per G: S0; per (G, N): S1..S4
        const std::size_t stride = 1 + 4 * nn;
        const int dim = static_cast<int>(ng * stride);
        const Eigen::MatrixXd m = run_replicas(
            params, config.replicas, config.master_seed, "remainder", workers, dim,
            [&](int, const Trajectory& traj, double* out) {
                const LedgerResult res = run_ledger(traj, req, &tables);
                std::vector<double> sq(nt);
                for (std::size_t gi = 0; gi < ng; ++gi) {
                    for (std::size_t ti = 0; ti < nt; ++ti)
                        sq[ti] = res.g[gi].r0[ti] * res.g[gi].r0[ti];
                    out[gi * stride] = trapezoid(config.sample_times, sq);
                    for (std::size_t ni = 0; ni < nn; ++ni) {
                        const GnSeries& sn = res.gn[gi][ni];
                        const std::vector<double>* series[4] = {&sn.r1, &sn.r2, &sn.r3, &sn.r4};
                        for (int i = 0; i < 4; ++i) {
                            for (std::size_t ti = 0; ti < nt; ++ti)
                                sq[ti] = (*series[i])[ti] * (*series[i])[ti];
                            out[gi * stride + 1 + ni * 4 + static_cast<std::size_t>(i)] =
                                trapezoid(config.sample_times, sq);
                        }
                    }
                }
            });

        for (std::size_t gi = 0; gi < ng; ++gi) {
            const MeanSe s0 = mean_se(m.col(static_cast<Eigen::Index>(gi * stride)));
            table.rows.push_back({"remainder.S0", gs[gi].name(), eps, config.gamma, 0,
                                  config.horizon, s0.mean, s0.se, config.replicas});
            for (std::size_t ni = 0; ni < nn; ++ni) {
                for (int i = 0; i < 4; ++i) {
                    const MeanSe s = mean_se(m.col(static_cast<Eigen::Index>(
                        gi * stride + 1 + ni * 4 + static_cast<std::size_t>(i))));
                    table.rows.push_back({"remainder.S" + std::to_string(i + 1), gs[gi].name(),
                                          eps, config.gamma, config.n_list[ni], config.horizon,
                                          s.mean, s.se, config.replicas});
                }
            }
            // paired successive differences of the i = 3 moment across scales
            for (std::size_t ni = 0; ni + 1 < nn; ++ni) {
                const Eigen::VectorXd diff =
                    m.col(static_cast<Eigen::Index>(gi * stride + 1 + (ni + 1) * 4 + 2)) -
                    m.col(static_cast<Eigen::Index>(gi * stride + 1 + ni * 4 + 2));
                const MeanSe d = mean_se(diff);
                table.rows.push_back({"remainder.S3_step", gs[gi].name(), eps, config.gamma,
                                      config.n_list[ni + 1], config.horizon, d.mean, d.se,
                                      config.replicas});
            }
        }
    }
    return table;
}

EstimateTable martingale_test(const ExperimentConfig& config, int workers) {
    EstimateTable table;
    std::vector<TestFunction> gs = config.test_functions();
    const std::size_t ng = gs.size();
    const bool with_combo = ng >= 2;
    const std::size_t g_first = 0;
    const std::size_t g_mid = ng >= 2 ? 1 : 0;
    const std::size_t g_last = ng - 1;
    if (with_combo) gs.push_back(TestFunction::combo(0.6, gs[g_first], 0.8, gs[g_last]));
    const std::size_t ngall = gs.size();
    const std::size_t nt = config.sample_times.size();

    auto nearest_index = [&](double target) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < nt; ++i)
            if (std::abs(config.sample_times[i] - target) <
                std::abs(config.sample_times[best] - target))
                best = i;
        return best;
    };
    const std::size_t iq1 = nearest_index(0.25 * config.horizon);
    const std::size_t iq2 = nearest_index(0.5 * config.horizon);
    const std::size_t iend = nt - 1;

    for (double eps : config.epsilon_list) {
        const SimParams params = config.params_for(eps);
        LedgerRequest req;
        req.gs = gs;
        req.sample_times = config.sample_times;
        req.want_qv = true;
        const LedgerTables tables = LedgerTables::build(params, req);

        // layout: [gi*nt + ti] martingale; then [2*gi + {0,1}] field at iq1/iq2;
        // then [gi] predictable quadratic variation at the horizon
        const std::size_t y_off = ngall * nt;
        const std::size_t qv_off = y_off + 2 * ngall;
        const int dim = static_cast<int>(qv_off + ngall);
        const Eigen::MatrixXd m = run_replicas(
            params, config.replicas, config.master_seed, "martingale", workers, dim,
            [&](int, const Trajectory& traj, double* out) {
                const LedgerResult res = run_ledger(traj, req, &tables);
                for (std::size_t gi = 0; gi < ngall; ++gi) {
                    for (std::size_t ti = 0; ti < nt; ++ti)
                        out[gi * nt + ti] = res.g[gi].martingale(ti);
                    out[y_off + 2 * gi] = res.g[gi].y[iq1];
                    out[y_off + 2 * gi + 1] = res.g[gi].y[iq2];
                    out[qv_off + gi] = res.g[gi].qv[iend];
                }
            });

        auto mcol = [&](std::size_t gi, std::size_t ti) {
            return m.col(static_cast<Eigen::Index>(gi * nt + ti));
        };

        // (a) orthogonality of increments to bounded past functionals
        struct IncSpec {
            int ysrc;          // -1: X = 1; 0: clip Y at iq1; 1: clip Y at iq2
            std::size_t y_g;   // which field the functional reads
            std::size_t m_g;   // which martingale is incremented
            std::size_t from, to;
        };
        const IncSpec specs[6] = {
            {-1, 0, g_first, iq2, iend}, {-1, 0, g_mid, iq1, iq2},
            {0, g_first, g_first, iq1, iend}, {0, g_mid, g_last, iq1, iend},
            {1, g_last, g_mid, iq2, iend},    {1, g_first, g_last, iq2, iend}};
        for (int k = 0; k < 6; ++k) {
            const IncSpec& sp = specs[k];
            Eigen::VectorXd prod(m.rows());
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                double x = 1.0;
                if (sp.ysrc >= 0)
                    x = clip2(m(r, static_cast<Eigen::Index>(y_off + 2 * sp.y_g +
                                                             static_cast<std::size_t>(sp.ysrc))));
                prod(r) = x * (mcol(sp.m_g, sp.to)(r) - mcol(sp.m_g, sp.from)(r));
            }
            const MeanSe d = mean_se(prod);
            table.rows.push_back({"mart.increment", gs[sp.m_g].name(), eps, config.gamma, k + 1,
                                  config.sample_times[sp.to], d.mean, d.se, config.replicas});
        }

        // (b) variance growth
        for (std::size_t gi = 0; gi < ngall; ++gi) {
            std::vector<double> vars(nt);
            for (std::size_t ti = 0; ti < nt; ++ti) {
                const MeanSe va = variance_se(mcol(gi, ti));
                vars[ti] = va.mean;
                table.rows.push_back({"mart.var", gs[gi].name(), eps, config.gamma, 0,
                                      config.sample_times[ti], va.mean, va.se, config.replicas});
            }
            const LineFit fit = ols_fit(config.sample_times, vars);
            table.rows.push_back({"mart.var_slope", gs[gi].name(), eps, config.gamma, 0,
                                  config.horizon, fit.slope, 0.0, config.replicas});
            table.rows.push_back({"mart.var_r2", gs[gi].name(), eps, config.gamma, 0,
                                  config.horizon, fit.r2, 0.0, config.replicas});
            table.rows.push_back({"mart.var_slope_target", gs[gi].name(), eps, config.gamma, 0,
                                  config.horizon, 2.0 * gs[gi].l2_norm_sq(1), 0.0,
                                  config.replicas});
            const MeanSe qv = mean_se(m.col(static_cast<Eigen::Index>(qv_off + gi)));
            table.rows.push_back({"mart.qv_mean", gs[gi].name(), eps, config.gamma, 0,
                                  config.horizon, qv.mean, qv.se, config.replicas});
            Eigen::VectorXd msq = mcol(gi, iend).array().square();
            const MeanSe m2 = mean_se(msq);
            table.rows.push_back({"mart.m2_mean", gs[gi].name(), eps, config.gamma, 0,
                                  config.horizon, m2.mean, m2.se, config.replicas});
        }

        // (c) normality of the endpoint against the limiting variance
        for (std::size_t gi = 0; gi < ng; ++gi) {
            const double sigma =
                std::sqrt(2.0 * config.horizon * gs[gi].l2_norm_sq(1));
            std::vector<double> z(static_cast<std::size_t>(m.rows()));
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                z[static_cast<std::size_t>(r)] = mcol(gi, iend)(r) / sigma;
            table.rows.push_back({"mart.ks", gs[gi].name(), eps, config.gamma, 0, config.horizon,
                                  ks_normal_modified(std::move(z)), 0.0, config.replicas});
        }
        table.rows.push_back({"mart.ks_critical", "-", eps, config.gamma, 0, config.horizon,
                              1.628, 0.0, config.replicas});

        // (d) cross covariance of two martingales at staggered times
        if (ng >= 2) {
            const Eigen::VectorXd a = mcol(g_first, iq2);
            const Eigen::VectorXd b = mcol(g_last, iend);
            const Eigen::ArrayXd prod = (a.array() - a.mean()) * (b.array() - b.mean());
            Eigen::VectorXd pv = prod.matrix();
            const MeanSe cov = mean_se(pv);
            const double bias = static_cast<double>(m.rows()) / (m.rows() - 1.0);
            table.rows.push_back({"mart.cross_cov",
                                  gs[g_first].name() + "*" + gs[g_last].name(), eps, config.gamma,
                                  0, config.horizon, cov.mean * bias, cov.se, config.replicas});
            table.rows.push_back({"mart.cross_cov_target",
                                  gs[g_first].name() + "*" + gs[g_last].name(), eps, config.gamma,
                                  0, config.horizon,
                                  limit_covariance(gs[g_first], gs[g_last],
                                                   config.sample_times[iq2],
                                                   config.sample_times[iend]),
                                  0.0, config.replicas});
        }

        // (e) pathwise linearity of the martingale in the test function
        if (with_combo) {
            double worst = 0.0, scale = 1.0;
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (std::size_t ti = 0; ti < nt; ++ti) {
                    const double combo = mcol(ngall - 1, ti)(r);
                    const double lin = 0.6 * mcol(g_first, ti)(r) + 0.8 * mcol(g_last, ti)(r);
                    worst = std::max(worst, std::abs(combo - lin));
                    scale = std::max(scale, std::abs(combo));
                }
            table.rows.push_back({"mart.combo_linearity_max", gs[ngall - 1].name(), eps,
                                  config.gamma, 0, config.horizon, worst, 0.0, config.replicas});
            table.rows.push_back({"mart.combo_linearity_scale", gs[ngall - 1].name(), eps,
                                  config.gamma, 0, config.horizon, scale, 0.0, config.replicas});
        }
    }
    return table;
}

EstimateTable sobolev_report(const ExperimentConfig& config, int workers, int m_max, int n_max) {
    if (config.n_list.size() < 2)
        throw std::invalid_argument("sobolev_report: need at least two kernel scales");
    if (m_max < 1 || n_max < 1) throw std::invalid_argument("sobolev_report: bad mode caps");
    const std::size_t nt = config.sample_times.size();
    if (static_cast<int>(nt) - 1 < 2 * m_max)
        throw std::invalid_argument("sobolev_report: sample grid too coarse for m_max");

    EstimateTable table;
    std::vector<TestFunction> gs;
    for (int n = 1; n <= n_max; ++n) gs.push_back(TestFunction::hermite(n));
    const std::size_t ng = gs.size();
    const std::size_t nn = config.n_list.size();
    const std::size_t nlow = nn - 1;
    const DirichletBasis dirichlet(config.horizon);

    // time-mode rows evaluated on the sample grid
    std::vector<std::vector<double>> gm(static_cast<std::size_t>(m_max),
                                        std::vector<double>(nt));
    for (int mm = 1; mm <= m_max; ++mm)
        for (std::size_t ti = 0; ti < nt; ++ti)
            gm[static_cast<std::size_t>(mm - 1)][ti] =
                dirichlet.value(mm, config.sample_times[ti]);

    // envelope masses for the truncation-tail estimate
    const int cap_sum = 2000;
    double env_shell = 0.0, env_tail = 0.0;
    for (int mm = 1; mm <= cap_sum; ++mm)
        for (int n = 1; n <= cap_sum; ++n) {
            const double mass =
                1.0 / (static_cast<double>(mm) * mm * mm + static_cast<double>(n) * n * n);
            const bool inside = mm <= m_max && n <= n_max;
            const bool shell = inside && (mm == m_max || n == n_max);
            if (shell) env_shell += mass;
            if (!inside) env_tail += mass;
        }

    for (double eps : config.epsilon_list) {
        const SimParams params = config.params_for(eps);
        LedgerRequest req;
        req.gs = gs;
        req.ns = config.n_list;
        req.moll = Mollifier::from_name(config.mollifier);
        req.sample_times = config.sample_times;
        req.want_nonlinear = true;
        const LedgerTables tables = LedgerTables::build(params, req);

        // coefficient layout: [((gi*nlow)+ni)*m_max + (m-1)]
        const int dim = static_cast<int>(ng * nlow * static_cast<std::size_t>(m_max));
        const double gamma = config.gamma;
        const Eigen::MatrixXd m = run_replicas(
            params, config.replicas, config.master_seed, "sobolev", workers, dim,
            [&](int, const Trajectory& traj, double* out) {
                const LedgerResult res = run_ledger(traj, req, &tables);
                std::vector<double> delta(nt), integrand(nt);
                for (std::size_t gi = 0; gi < ng; ++gi) {
                    const std::vector<double>& ref = res.gn[gi][nn - 1].nl;
                    for (std::size_t ni = 0; ni < nlow; ++ni) {
                        const std::vector<double>& nl = res.gn[gi][ni].nl;
                        for (std::size_t ti = 0; ti < nt; ++ti)
                            delta[ti] = gamma * (nl[ti] - ref[ti]);
                        for (int mm = 1; mm <= m_max; ++mm) {
                            for (std::size_t ti = 0; ti < nt; ++ti)
                                integrand[ti] =
                                    gm[static_cast<std::size_t>(mm - 1)][ti] * delta[ti];
                            out[(gi * nlow + ni) * static_cast<std::size_t>(m_max) +
                                static_cast<std::size_t>(mm - 1)] =
                                trapezoid(config.sample_times, integrand);
                        }
                    }
                }
            });

        for (std::size_t ni = 0; ni < nlow; ++ni) {
            Eigen::VectorXd composite = Eigen::VectorXd::Zero(m.rows());
            double shell_mass = 0.0;
            for (std::size_t gi = 0; gi < ng; ++gi)
                for (int mm = 1; mm <= m_max; ++mm) {
                    const Eigen::VectorXd c = m.col(static_cast<Eigen::Index>(
                        (gi * nlow + ni) * static_cast<std::size_t>(m_max) +
                        static_cast<std::size_t>(mm - 1)));
                    const double w = sobolev_weight(mm, static_cast<int>(gi) + 1);
                    const Eigen::VectorXd csq = c.array().square();
                    composite += w * csq;
                    const MeanSe mode = mean_se(csq);
                    table.rows.push_back({"sobolev.mode.m" + std::to_string(mm), gs[gi].name(),
                                          eps, config.gamma, config.n_list[ni], config.horizon,
                                          mode.mean, mode.se, config.replicas});
                    if (mm == m_max || static_cast<int>(gi) + 1 == n_max)
                        shell_mass += w * mode.mean;
                }
            const MeanSe dist2 = mean_se(composite);
            const double tail = env_shell > 0 ? shell_mass * env_tail / env_shell : 0.0;
            if (tail > 0.1 * (dist2.mean + tail))
                throw std::runtime_error(
                    "sobolev_report: truncation too coarse (estimated tail above 10%), raise "
                    "m_max/n_max");
            table.rows.push_back({"sobolev.dist2", "-", eps, config.gamma, config.n_list[ni],
                                  config.horizon, dist2.mean, dist2.se, config.replicas});
            table.rows.push_back({"sobolev.tail_estimate", "-", eps, config.gamma,
                                  config.n_list[ni], config.horizon, tail, 0.0,
                                  config.replicas});
        }
    }
    return table;
}

EstimateTable oracle_check(const ExperimentConfig& config, int workers) {
    EstimateTable table;
    const double eps = config.epsilon_list.front();

    { // end-state law of a six-site ring against the matrix exponential
        const SimParams params = SimParams::make(eps, config.gamma, 6.0 * eps, 1.0);
        const double tau_end = 0.5;
        const Eigen::MatrixXd q = exact_generator_matrix(params);
        const Eigen::MatrixXd p = (tau_end * q).exp();
        const int runs = 20000;
        const int initials[2] = {21, 7}; // alternating and blocked half-filling patterns
        for (int which = 0; which < 2; ++which) {
            std::vector<long> counts(64, 0);
            for (int r = 0; r < runs; ++r) {
                Rng rng(derive_seed(config.master_seed, which == 0 ? "oracle-ctmc-a" : "oracle-ctmc-b",
                                    static_cast<std::uint64_t>(r)));
                SpinState s = state_from_index(initials[which], params.sites);
                advance(s, params, rng, tau_end);
                ++counts[static_cast<std::size_t>(state_index(s))];
            }
            double max_z = 0.0;
            long checked = 0;
            for (int idx = 0; idx < 64; ++idx) {
                const double prob = p(initials[which], idx);
                if (prob <= 1e-3) continue;
                ++checked;
                const double se = std::sqrt(prob * (1.0 - prob) / runs);
                const double phat =
                    static_cast<double>(counts[static_cast<std::size_t>(idx)]) / runs;
                max_z = std::max(max_z, std::abs(phat - prob) / se);
            }
            table.rows.push_back({"oracle.ctmc_max_z", "-", eps, config.gamma, initials[which],
                                  tau_end, max_z, 0.0, runs});
            table.rows.push_back({"oracle.ctmc_checked", "-", eps, config.gamma, initials[which],
                                  tau_end, static_cast<double>(checked), 0.0, runs});
        }
    }

    { // white-noise pairing covariance against the Gram matrix
        const std::vector<TestFunction> gs = config.test_functions();
        WhitePairingSampler sampler(gs);
        const int draws = 20000;
        const int k = static_cast<int>(gs.size());
        Eigen::MatrixXd samples(draws, k);
        Rng rng(derive_seed(config.master_seed, "oracle-white", 0));
        for (int r = 0; r < draws; ++r) samples.row(r) = sampler.sample(rng).transpose();
        double max_z = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                Eigen::VectorXd prod =
                    ((samples.col(i).array() - samples.col(i).mean()) *
                     (samples.col(j).array() - samples.col(j).mean()))
                        .matrix();
                const MeanSe cov = mean_se(prod);
                if (cov.se > 0)
                    max_z = std::max(max_z, std::abs(cov.mean - sampler.gram()(i, j)) / cov.se);
            }
        table.rows.push_back(
            {"oracle.white_max_z", "-", 0.0, config.gamma, 0, 0.0, max_z, 0.0, draws});
    }

    { // sheet sampler: marginal cells and pairings
        SheetGrid grid;
        grid.horizon = 1.0;
        grid.radius = 8.0;
        grid.nt = 4;
        grid.nu = 512;
        const int draws = 2000;
        const TestFunction g1 = TestFunction::hermite(1);
        const TestFunction g2 = TestFunction::hermite(2);
        Eigen::MatrixXd cells(draws, 5);
        Rng rng(derive_seed(config.master_seed, "oracle-sheet", 0));
        const int ju = static_cast<int>(std::lround(2.0 / grid.du()));
        for (int r = 0; r < draws; ++r) {
            const Sheet sheet = sample_sheet(grid, rng);
            cells(r, 0) = sheet.b(grid.nt, grid.nu + ju);      // B(1, 2)
            cells(r, 1) = sheet.b(grid.nt / 2, grid.nu + ju);  // B(1/2, 2)
            cells(r, 2) = sheet.b(grid.nt, grid.nu - ju);      // B(1, -2)
            cells(r, 3) = sheet_pairing(sheet, g1, 1.0);
            cells(r, 4) = sheet_pairing(sheet, g2, 1.0);
        }
        auto cov_entry = [&](int i, int j, double target, const char* name) {
            Eigen::VectorXd prod = ((cells.col(i).array() - cells.col(i).mean()) *
                                    (cells.col(j).array() - cells.col(j).mean()))
                                       .matrix();
            const MeanSe cov = mean_se(prod);
            table.rows.push_back({name, "-", 0.0, config.gamma, 0, 1.0, cov.mean, cov.se, draws});
            table.rows.push_back({std::string(name) + "_target", "-", 0.0, config.gamma, 0, 1.0,
                                  target, 0.0, draws});
        };
        cov_entry(0, 0, 2.0, "oracle.sheet_var_cell");
        cov_entry(0, 1, 1.0, "oracle.sheet_cov_time");
        cov_entry(0, 2, 0.0, "oracle.sheet_cov_sign");
        cov_entry(3, 3, 2.0 * g1.l2_norm_sq(1), "oracle.sheet_pairing_var_g1");
        cov_entry(4, 4, 2.0 * g2.l2_norm_sq(1), "oracle.sheet_pairing_var_g2");
        cov_entry(3, 4, 0.0, "oracle.sheet_pairing_cov");
    }

    { // deterministic limiting covariances
        const TestFunction g1 = TestFunction::hermite(1);
        const TestFunction g3 = TestFunction::hermite(3);
        table.rows.push_back({"oracle.limit_cov_g1g3", "G1*G3", 0.0, config.gamma, 0, 1.0,
                              limit_covariance(g1, g3, 1.0, 1.0), 0.0, 0});
    }
    (void)workers;
    return table;
}

bool selftest(int workers) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("selftest: %-34s %s\n", name, ok ? "ok" : "FAIL");
        if (!ok) ++failures;
    };
    try {
        check("simpson cubic", std::abs(simpson_refine([](double x) { return x * x * x; }, 0.0,
                                                       1.0, 0.25) -
                                        0.25) < 1e-12);
        const GaussHermite gh = gauss_hermite(24);
        double x4 = 0.0;
        for (std::size_t i = 0; i < gh.nodes.size(); ++i)
            x4 += gh.weights[i] * std::pow(gh.nodes[i], 4);
        check("gauss-hermite quartic", std::abs(x4 - 0.75 * std::sqrt(M_PI)) < 1e-10);

        double ortho_dev = 0.0;
        for (int a = 1; a <= 6; ++a)
            for (int b = a; b <= 6; ++b) {
                double acc = 0.0;
                for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
                    const double u = gh.nodes[i];
                    acc += gh.weights[i] * std::exp(u * u) * hermite_value(a, u) *
                           hermite_value(b, u);
                }
                ortho_dev = std::max(ortho_dev, std::abs(acc - (a == b ? 1.0 : 0.0)));
            }
        check("hermite orthonormality", ortho_dev < 1e-9);
        check("hermite derivative norm",
              std::abs(TestFunction::hermite(3).l2_norm_sq(1) - hermite_dnorm_sq(3)) < 1e-8);

        for (const char* name : {"bump", "polybump"}) {
            const Mollifier j = Mollifier::from_name(name);
            const double mass =
                simpson_refine([&](double v) { return j.j(v); }, -1.0, 1.0, 0.01);
            check(name, std::abs(mass - 1.0) < 1e-9);
        }

        {
            const SimParams params = SimParams::make(0.125, 0.8, 12.0, 0.05);
            const TestFunction g = TestFunction::hermite(2);
            Rng rng(derive_seed(2026, "selftest", 0));
            SpinState s = sample_initial(params, rng);
            const double direct = drift_term(s, g, params);
            const FieldRows rows = build_field_rows(params, g);
            const double via_rows =
                LinearForm(rows.drift_lin).value(s) + PairForm(rows.drift_pair).value(s);
            check("drift dual route",
                  std::abs(direct - via_rows) < 1e-9 * std::max(1.0, std::abs(direct)));

            SpinState s2 = s;
            const Trajectory traj = advance(s2, params, rng, params.micro_horizon());
            LedgerRequest req;
            req.gs = {g};
            req.ns = {4};
            req.sample_times = {0.0, 0.025, 0.05};
            req.want_remainders = true;
            req.want_nonlinear = true;
            const LedgerResult res = run_ledger(traj, req);
            double worst_close = 0.0, worst_rewrite = 0.0;
            for (std::size_t ti = 0; ti < req.sample_times.size(); ++ti) {
                const GSeries& gse = res.g[0];
                const GnSeries& sn = res.gn[0][0];
                const double lhs = gse.martingale(ti) + gse.resid[ti] - params.gamma * gse.r0[ti];
                const double rhs = gse.y[ti] - gse.y0 - gse.hacc[ti] + params.gamma * gse.pacc[ti];
                worst_close = std::max(worst_close, std::abs(lhs - rhs));
                const double nl = sn.nl[ti];
                const double sum = gse.pacc[ti] + sn.r1[ti] + sn.r2[ti] + sn.r3[ti] + sn.r4[ti];
                worst_rewrite = std::max(worst_rewrite, std::abs(nl - sum));
            }
            check("decomposition closure", worst_close < 1e-6);
            check("smeared-square rewrite", worst_rewrite < 1e-6);

            const SpinState fin = state_at(traj, traj.micro_duration);
            const Mollifier j = Mollifier::bump();
            const double honest = nonlinear_integral(fin, g, j, 4, 0.0625, params);
            const KernelTables kt = build_kernel_tables(params, g, j, 4);
            const double banded = kt.nl_band().value(fin);
            check("smeared-square quadrature",
                  std::abs(honest - banded) < 1e-6 * std::max(1.0, std::abs(honest)));
        }

        {
            const SimParams params = SimParams::make(0.25, 0.5, 4.0, 0.1);
            const TestFunction g = TestFunction::gaussian(2.0);
            auto extract = [&](int, const Trajectory& traj, double* out) {
                out[0] = eval_field(state_at(traj, traj.micro_duration), g, traj.params);
            };
            const Eigen::MatrixXd a = run_replicas(params, 8, 99, "det", 1, 1, extract);
            const Eigen::MatrixXd b =
                run_replicas(params, 8, 99, "det", std::max(3, workers), 1, extract);
            check("replica determinism", a == b);
        }

        check("limit covariance",
              std::abs(limit_covariance(TestFunction::hermite(1), TestFunction::hermite(3), 1.0,
                                        1.0) +
                       std::sqrt(2.0)) < 1e-9);
    } catch (const std::exception& e) {
        std::printf("selftest: exception: %s\n", e.what());
        return false;
    }
    return failures == 0;
}

void write_outputs(const ExperimentConfig& config, const std::string& name,
                   const EstimateTable& table) {
    std::filesystem::create_directories(config.out_dir);
    table.write_csv(config.out_dir + "/" + name + ".csv");

    nlohmann::json manifest;
    manifest["subcommand"] = name;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(config.hash()));
    manifest["config_hash"] = hex;
    manifest["master_seed"] = config.master_seed;
    manifest["artifact_version"] = kArtifactVersion;
    manifest["config"] = config.canonical_text();
    std::ofstream out(config.out_dir + "/" + name + "_manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest for " + name);
    out << manifest.dump(2) << "\n";
}

} // namespace wasep
