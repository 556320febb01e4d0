#pragma once

#include "wasep/field.hpp"
#include "wasep/lattice.hpp"
#include "wasep/mollifier.hpp"
#include "wasep/test_function.hpp"

#include <cstddef>
#include <vector>

namespace wasep {

// What to accumulate along a trajectory. Field, drift, heat and pair
// integrals are always tracked per test function; kernel-scale series are
// tracked per (G, N) according to the flags.
struct LedgerRequest {
    std::vector<TestFunction> gs;
    std::vector<int> ns;
    Mollifier moll = Mollifier::bump();
    std::vector<double> sample_times; // macroscopic, non-decreasing, within the horizon
    bool want_qv = false;
    bool want_remainders = false; // banded summands V^1, V^3 and derived remainder series
    bool want_nonlinear = false;  // smeared-square integral series
};

// Precomputed coefficient tables; build once per parameter cell and share
// (read-only) across replicas.
struct LedgerTables {
    std::vector<FieldRows> rows;                    // per G
    std::vector<std::vector<KernelTables>> kernels; // [G][N]; empty when not needed

    static LedgerTables build(const SimParams& params, const LedgerRequest& req);
};

// Per-(G, N) time series at the sample times.
struct GnSeries {
    std::vector<double> nl;                 // int_0^t I_N ds (want_nonlinear)
    std::vector<double> r1, r2, r3, r4;     // int_0^t V^i ds (want_remainders)
};

// Per-G time series at the sample times.
struct GSeries {
    double y0 = 0.0;            // field value at time zero
    std::vector<double> y;      // field value at the sample time
    std::vector<double> dacc;   // int_0^t eps^{-3/2} sum G(u_x) L_eps xi(x) ds
    std::vector<double> hacc;   // int_0^t Y_s(G'') ds
    std::vector<double> pacc;   // int_0^t sum G'(u_x) xi xi' ds
    std::vector<double> r0;     // int_0^t (eps/2) sum G''(u_x) xi xi' ds
    std::vector<double> resid;  // dacc - hacc + gamma*pacc + gamma*r0, accumulated directly
    std::vector<double> qv;     // predictable quadratic variation (want_qv)

    double martingale(std::size_t i) const { return y[i] - y0 - dacc[i]; }
};

struct LedgerResult {
    std::vector<double> times;
    std::vector<GSeries> g;
    std::vector<std::vector<GnSeries>> gn; // [g][n]

    // Y_t - Y_0 - int Y_s(G'') ds + gamma int I_N ds  (needs want_nonlinear)
    double mollified(std::size_t gi, std::size_t ni, std::size_t ti, double gamma) const;
};

// Replay the trajectory once, maintaining every requested observable
// incrementally and recording snapshots at the sample times. Tables may be
// passed in to amortize kernel quadratures across replicas; when null they
// are built internally.
LedgerResult run_ledger(const Trajectory& traj, const LedgerRequest& req,
                        const LedgerTables* tables = nullptr);

// Convenience single-series extractors (each replays the trajectory once).
std::vector<double> martingale_path(const Trajectory& traj, const TestFunction& g,
                                    const std::vector<double>& sample_times);
std::vector<double> taylor_residual(const Trajectory& traj, const TestFunction& g,
                                    const std::vector<double>& sample_times);
std::vector<double> mollified_functional_path(const Trajectory& traj, const TestFunction& g,
                                              const Mollifier& j, int scale,
                                              const std::vector<double>& sample_times);

} // namespace wasep
