#include "wasep/ledger.hpp"

#include "wasep/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace wasep {

namespace {

constexpr int kRefreshEvery = 8192; // rebuild incremental values from scratch this often

struct GWork {
    const FieldRows* rows = nullptr;
    LinearForm f_field, f_dlin, f_heat, f_rlin, f_qvlin;
    PairForm f_dpair, f_pair, f_v0, f_rpair, f_qvpair;
    // incremental current values; the residual tracks its own precomputed
    // rows rather than reusing the drift/heat/pair values, so the closure
    // identity ties genuinely separate accumulation paths together
    double y = 0, dlin = 0, heat = 0, rlin = 0, qvlin = 0;
    double dpair = 0, pair = 0, v0 = 0, rpair = 0, qvpair = 0;
    // integrals up to the last processed event
    double dacc = 0, hacc = 0, pacc = 0, r0acc = 0, residacc = 0, qvacc = 0;

    void rebuild(const SpinState& s) {
        y = f_field.value(s);
        dlin = f_dlin.value(s);
        heat = f_heat.value(s);
        rlin = f_rlin.value(s);
        dpair = f_dpair.value(s);
        pair = f_pair.value(s);
        v0 = f_v0.value(s);
        rpair = f_rpair.value(s);
        if (!f_qvlin.empty()) {
            qvlin = f_qvlin.value(s);
            qvpair = f_qvpair.value(s);
        }
    }
    void apply(const SpinState& pre, int bond, bool qv) {
        y += f_field.swap_delta(pre, bond);
        dlin += f_dlin.swap_delta(pre, bond);
        heat += f_heat.swap_delta(pre, bond);
        rlin += f_rlin.swap_delta(pre, bond);
        dpair += f_dpair.swap_delta(pre, bond);
        pair += f_pair.swap_delta(pre, bond);
        v0 += f_v0.swap_delta(pre, bond);
        rpair += f_rpair.swap_delta(pre, bond);
        if (qv) {
            qvlin += f_qvlin.swap_delta(pre, bond);
            qvpair += f_qvpair.swap_delta(pre, bond);
        }
    }
    void integrate(double ds, double qv_const, bool qv) {
        dacc += (dlin + dpair) * ds;
        hacc += heat * ds;
        pacc += pair * ds;
        r0acc += v0 * ds;
        residacc += (rlin + rpair) * ds;
        if (qv) qvacc += (qv_const + qvlin + qvpair) * ds;
    }
};

struct GnWork {
    const KernelTables* tables = nullptr;
    BandForm b_nl, b_v1, b_v3;
    double nl = 0, v1 = 0, v3 = 0;
    double nlacc = 0, v1acc = 0, v3acc = 0;

    void rebuild(const SpinState& s) {
        if (!b_nl.empty()) nl = b_nl.value(s);
        if (!b_v1.empty()) {
            v1 = b_v1.value(s);
            v3 = b_v3.value(s);
        }
    }
    void apply(const SpinState& pre, int bond) {
        if (!b_nl.empty()) nl += b_nl.swap_delta(pre, bond);
        if (!b_v1.empty()) {
            v1 += b_v1.swap_delta(pre, bond);
            v3 += b_v3.swap_delta(pre, bond);
        }
    }
    void integrate(double ds) {
        nlacc += nl * ds;
        v1acc += v1 * ds;
        v3acc += v3 * ds;
    }
};

} // namespace

LedgerTables LedgerTables::build(const SimParams& params, const LedgerRequest& req) {
    LedgerTables t;
    t.rows.reserve(req.gs.size());
    for (const TestFunction& g : req.gs) t.rows.push_back(build_field_rows(params, g));
    if ((req.want_nonlinear || req.want_remainders) && !req.ns.empty()) {
        t.kernels.resize(req.gs.size());
        for (std::size_t gi = 0; gi < req.gs.size(); ++gi) {
            t.kernels[gi].reserve(req.ns.size());
            for (int n : req.ns)
                t.kernels[gi].push_back(build_kernel_tables(params, req.gs[gi], req.moll, n));
        }
    }
    return t;
}

double LedgerResult::mollified(std::size_t gi, std::size_t ni, std::size_t ti,
                               double gamma) const {
    const GSeries& s = g.at(gi);
    const GnSeries& sn = gn.at(gi).at(ni);
    if (sn.nl.empty())
        throw std::logic_error("LedgerResult::mollified needs want_nonlinear series");
    return s.y[ti] - s.y0 - s.hacc[ti] + gamma * sn.nl[ti];
}

LedgerResult run_ledger(const Trajectory& traj, const LedgerRequest& req,
                        const LedgerTables* tables) {
    const SimParams& params = traj.params;
    if (req.gs.empty()) throw std::invalid_argument("run_ledger: no test functions");
    const double eps2 = params.epsilon * params.epsilon;
    const double slack = 1e-9 * std::max(1.0, traj.micro_duration);
    for (std::size_t i = 0; i < req.sample_times.size(); ++i) {
        if (req.sample_times[i] < 0.0 ||
            req.sample_times[i] / eps2 > traj.micro_duration + slack)
            throw std::invalid_argument("run_ledger: sample time outside the trajectory");
        if (i > 0 && req.sample_times[i] < req.sample_times[i - 1])
            throw std::invalid_argument("run_ledger: sample times must be non-decreasing");
    }
    const bool want_gn = (req.want_nonlinear || req.want_remainders) && !req.ns.empty();

    LedgerTables local;
    if (tables == nullptr) {
        local = LedgerTables::build(params, req);
        tables = &local;
    }
    if (tables->rows.size() != req.gs.size() ||
        (want_gn && (tables->kernels.size() != req.gs.size() ||
                     tables->kernels[0].size() != req.ns.size())))
        throw std::invalid_argument("run_ledger: tables do not match the request");

    const std::size_t ng = req.gs.size();
    const std::size_t nn = want_gn ? req.ns.size() : 0;
    const std::size_t nt = req.sample_times.size();

    std::vector<GWork> gw(ng);
    std::vector<GnWork> gnw(ng * nn);
    for (std::size_t gi = 0; gi < ng; ++gi) {
        GWork& w = gw[gi];
        w.rows = &tables->rows[gi];
        w.f_field = LinearForm(w.rows->field);
        w.f_dlin = LinearForm(w.rows->drift_lin);
        w.f_heat = LinearForm(w.rows->heat);
        w.f_rlin = LinearForm(w.rows->resid_lin);
        w.f_dpair = PairForm(w.rows->drift_pair);
        w.f_pair = PairForm(w.rows->pair);
        w.f_v0 = PairForm(w.rows->v0);
        w.f_rpair = PairForm(w.rows->resid_pair);
        if (req.want_qv) {
            w.f_qvlin = LinearForm(w.rows->qv_lin);
            w.f_qvpair = PairForm(w.rows->qv_pair);
        }
        for (std::size_t ni = 0; ni < nn; ++ni) {
            GnWork& wn = gnw[gi * nn + ni];
            wn.tables = &tables->kernels[gi][ni];
            if (req.want_nonlinear) wn.b_nl = wn.tables->nl_band();
            if (req.want_remainders) {
                wn.b_v1 = wn.tables->v1_band();
                wn.b_v3 = wn.tables->v3_band();
            }
        }
    }

    LedgerResult out;
    out.times = req.sample_times;
    out.g.resize(ng);
    out.gn.assign(ng, std::vector<GnSeries>(nn));
    for (std::size_t gi = 0; gi < ng; ++gi) {
        GSeries& s = out.g[gi];
        s.y.reserve(nt);
        s.dacc.reserve(nt);
        s.hacc.reserve(nt);
        s.pacc.reserve(nt);
        s.r0.reserve(nt);
        s.resid.reserve(nt);
        if (req.want_qv) s.qv.reserve(nt);
    }

    // initialize incremental values from the initial state
    for (std::size_t gi = 0; gi < ng; ++gi) {
        gw[gi].rebuild(traj.initial);
        out.g[gi].y0 = gw[gi].y;
    }
    for (GnWork& wn : gnw) wn.rebuild(traj.initial);

    double tau_prev = 0.0;
    std::size_t si = 0;

    auto record = [&](double tau_s) {
        const double ds = (tau_s - tau_prev) * eps2;
        const double t_macro = tau_s * eps2;
        for (std::size_t gi = 0; gi < ng; ++gi) {
            GWork& w = gw[gi];
            GSeries& s = out.g[gi];
            s.y.push_back(w.y);
            s.dacc.push_back(w.dacc + (w.dlin + w.dpair) * ds);
            s.hacc.push_back(w.hacc + w.heat * ds);
            const double pacc_s = w.pacc + w.pair * ds;
            s.pacc.push_back(pacc_s);
            s.r0.push_back(w.r0acc + w.v0 * ds);
            s.resid.push_back(w.residacc + (w.rlin + w.rpair) * ds);
            if (req.want_qv)
                s.qv.push_back(w.qvacc + (w.rows->qv_const + w.qvlin + w.qvpair) * ds);
            for (std::size_t ni = 0; ni < nn; ++ni) {
                GnWork& wn = gnw[gi * nn + ni];
                GnSeries& sn = out.gn[gi][ni];
                if (req.want_nonlinear) sn.nl.push_back(wn.nlacc + wn.nl * ds);
                if (req.want_remainders) {
                    const KernelTables& kt = *wn.tables;
                    sn.r1.push_back(wn.v1acc + wn.v1 * ds);
                    sn.r2.push_back(params.epsilon * kt.l2sq_jn *
                                    (w.rows->pair_row_sum * t_macro - pacc_s));
                    sn.r3.push_back(wn.v3acc + wn.v3 * ds - params.epsilon * kt.s_c * pacc_s);
                    sn.r4.push_back(kt.q4 * pacc_s);
                }
            }
        }
    };

    int since_refresh = 0;
    replay(traj, [&](const SpinState& pre, int bond, const JumpEvent& e) {
        while (si < nt && req.sample_times[si] / eps2 <= e.micro_time) {
            record(req.sample_times[si] / eps2);
            ++si;
        }
        if (++since_refresh >= kRefreshEvery) {
            since_refresh = 0;
            for (GWork& w : gw) w.rebuild(pre);
            for (GnWork& wn : gnw) wn.rebuild(pre);
        }
        const double ds = (e.micro_time - tau_prev) * eps2;
        for (GWork& w : gw) w.integrate(ds, w.rows->qv_const, req.want_qv);
        for (GnWork& wn : gnw) wn.integrate(ds);
        tau_prev = e.micro_time;
        for (GWork& w : gw) w.apply(pre, bond, req.want_qv);
        for (GnWork& wn : gnw) wn.apply(pre, bond);
    });
    while (si < nt) {
        record(std::min(req.sample_times[si] / eps2, traj.micro_duration));
        ++si;
    }
    return out;
}

std::vector<double> martingale_path(const Trajectory& traj, const TestFunction& g,
                                    const std::vector<double>& sample_times) {
    LedgerRequest req;
    req.gs = {g};
    req.sample_times = sample_times;
    const LedgerResult res = run_ledger(traj, req);
    std::vector<double> m(sample_times.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = res.g[0].martingale(i);
    return m;
}

std::vector<double> taylor_residual(const Trajectory& traj, const TestFunction& g,
                                    const std::vector<double>& sample_times) {
    LedgerRequest req;
    req.gs = {g};
    req.sample_times = sample_times;
    return run_ledger(traj, req).g[0].resid;
}

std::vector<double> mollified_functional_path(const Trajectory& traj, const TestFunction& g,
                                              const Mollifier& j, int scale,
                                              const std::vector<double>& sample_times) {
    LedgerRequest req;
    req.gs = {g};
    req.ns = {scale};
    req.moll = j;
    req.sample_times = sample_times;
    req.want_nonlinear = true;
    const LedgerResult res = run_ledger(traj, req);
    std::vector<double> out(sample_times.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = res.mollified(0, 0, i, traj.params.gamma);
    return out;
}

} // namespace wasep
