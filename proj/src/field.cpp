#include "wasep/field.hpp"

#include "wasep/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>
#include <stdexcept>
#include <utility>

namespace wasep {

namespace {

// Warn once per (function shape, window) when tails leak past the window edge.
void warn_window_fit(const TestFunction& g, const SimParams& params) {
    if (g.is_zero()) return;
    const double radius = g.support_radius(1e-8);
    if (radius <= 0.5 * params.window) return;
    static std::mutex mu;
    static std::set<std::pair<std::string, long>> warned;
    std::lock_guard<std::mutex> lock(mu);
    if (warned.emplace(g.name(), std::lround(params.window * 1e6)).second) {
        std::fprintf(stderr,
                     "wasep: warning: %s needs radius %.3f but the window half-width is %.3f; "
                     "field values carry the truncated tail\n",
                     g.name().c_str(), radius, 0.5 * params.window);
    }
}

double kernel_overhang(int scale) { return 1.0 / scale; }

} // namespace

double eval_field(const SpinState& state, const TestFunction& g, const SimParams& params) {
    warn_window_fit(g, params);
    const double root_eps = std::sqrt(params.epsilon);
    double sum = 0.0;
    for (int x = 0; x < state.size(); ++x) sum += g(params.site_coord(x)) * state.spin(x);
    return root_eps * sum;
}

double mollified_field(const SpinState& state, const Mollifier& j, int scale, double u,
                       const SimParams& params) {
    if (scale < 1) throw std::invalid_argument("mollified_field: scale must be >= 1");
    const double root_eps = std::sqrt(params.epsilon);
    const double reach = kernel_overhang(scale);
    double sum = 0.0;
    for (int x = 0; x < state.size(); ++x) {
        const double v = u - params.site_coord(x);
        if (v <= -reach || v >= reach) continue;
        sum += j.jn(scale, v) * state.spin(x);
    }
    return root_eps * sum;
}

double nonlinear_integral(const SpinState& state, const TestFunction& g, const Mollifier& j,
                          int scale, double quad_step, const SimParams& params) {
    if (scale < 1) throw std::invalid_argument("nonlinear_integral: scale must be >= 1");
    const double step_cap = std::min(params.epsilon, 0.25 / scale);
    if (!(quad_step > 0.0) || quad_step > step_cap * (1.0 + 1e-12))
        throw std::invalid_argument("nonlinear_integral: quad_step must lie in (0, min(eps, 1/(4N))]");
    warn_window_fit(g, params);
    const double lo = -0.5 * params.window - kernel_overhang(scale) - params.epsilon;
    const double hi = 0.5 * params.window + kernel_overhang(scale) + params.epsilon;
    auto integrand = [&](double u) {
        const double y = mollified_field(state, j, scale, u, params);
        return g(u, 1) * y * y;
    };
    return simpson_refine(integrand, lo, hi, quad_step);
}

double discrete_pair_sum(const SpinState& state, const TestFunction& g, const SimParams& params,
                         int deriv) {
    const int L = state.size();
    double sum = 0.0;
    for (int x = 0; x < L; ++x) {
        const int x1 = x + 1 == L ? 0 : x + 1;
        sum += g(params.site_coord(x), deriv) * state.spin(x) * state.spin(x1);
    }
    return sum;
}

double drift_term(const SpinState& state, const TestFunction& g, const SimParams& params) {
    double sum = 0.0;
    for (int x = 0; x < state.size(); ++x)
        sum += g(params.site_coord(x)) * apply_generator_local(state, x, params);
    return sum / (params.epsilon * std::sqrt(params.epsilon));
}

double taylor_residual_bound(const SimParams& params, const TestFunction& g, double t) {
    const double root_eps = std::sqrt(params.epsilon);
    const double pi = 3.14159265358979323846;
    return root_eps / 6.0 * (2.0 + root_eps * params.gamma) * (pi + 2.0 * params.epsilon) *
           g.weighted_sup(3) * t;
}

FieldRows build_field_rows(const SimParams& params, const TestFunction& g) {
    const int L = params.sites;
    const double eps = params.epsilon;
    const double root_eps = std::sqrt(eps);
    FieldRows r;
    r.field.resize(L);
    r.heat.resize(L);
    r.drift_lin.resize(L);
    r.drift_pair.resize(L);
    r.pair.resize(L);
    r.v0.resize(L);
    r.resid_lin.resize(L);
    r.resid_pair.resize(L);
    r.qv_lin.resize(L);
    r.qv_pair.resize(L);

    std::vector<double> g0(L), g2sq(L);
    for (int x = 0; x < L; ++x) g0[static_cast<std::size_t>(x)] = g(params.site_coord(x));
    for (int x = 0; x < L; ++x) {
        const int xm = x == 0 ? L - 1 : x - 1;
        const int xp = x + 1 == L ? 0 : x + 1;
        const double u = params.site_coord(x);
        const double d1 = g(u, 1);
        const double d2 = g(u, 2);
        const double gb = g0[static_cast<std::size_t>(xp)] - g0[static_cast<std::size_t>(x)];
        g2sq[static_cast<std::size_t>(x)] = gb * gb;

        r.field[static_cast<std::size_t>(x)] = root_eps * g0[static_cast<std::size_t>(x)];
        r.heat[static_cast<std::size_t>(x)] = root_eps * d2;
        r.drift_lin[static_cast<std::size_t>(x)] =
            (g0[static_cast<std::size_t>(xm)] - 2.0 * g0[static_cast<std::size_t>(x)] +
             g0[static_cast<std::size_t>(xp)]) /
            (eps * root_eps);
        r.drift_pair[static_cast<std::size_t>(x)] = params.gamma / eps * (-gb);
        r.pair[static_cast<std::size_t>(x)] = d1;
        r.v0[static_cast<std::size_t>(x)] = 0.5 * eps * d2;
        r.pair_row_sum += d1;
    }
    for (int x = 0; x < L; ++x) {
        const int xm = x == 0 ? L - 1 : x - 1;
        r.resid_lin[static_cast<std::size_t>(x)] =
            r.drift_lin[static_cast<std::size_t>(x)] - r.heat[static_cast<std::size_t>(x)];
        // drift_pair expands to -gamma G' - gamma (eps/2) G'' - gamma (eps^2/6) G''',
        // so compensating with +gamma(pair + v0) leaves a pure third-order error;
        // this is what keeps the residual inside taylor_residual_bound pathwise
        r.resid_pair[static_cast<std::size_t>(x)] =
            r.drift_pair[static_cast<std::size_t>(x)] +
            params.gamma * (r.pair[static_cast<std::size_t>(x)] + r.v0[static_cast<std::size_t>(x)]);
        r.qv_pair[static_cast<std::size_t>(x)] = -2.0 / eps * g2sq[static_cast<std::size_t>(x)];
        r.qv_lin[static_cast<std::size_t>(x)] =
            2.0 / eps * root_eps * params.gamma *
            (g2sq[static_cast<std::size_t>(x)] - g2sq[static_cast<std::size_t>(xm)]);
        r.qv_const += 2.0 / eps * g2sq[static_cast<std::size_t>(x)];
    }
    return r;
}

BandForm KernelTables::nl_band() const { return BandForm(nl_fold, sites_, half, nl_diag); }
BandForm KernelTables::v1_band() const { return BandForm(v1_fold, sites_, half, v1_diag); }
BandForm KernelTables::v3_band() const { return BandForm(v3_fold, sites_, half, 0.0); }

KernelTables build_kernel_tables(const SimParams& params, const TestFunction& g,
                                 const Mollifier& j, int scale) {
    if (scale < 1) throw std::invalid_argument("build_kernel_tables: scale must be >= 1");
    const int L = params.sites;
    const double eps = params.epsilon;
    const double reach = kernel_overhang(scale);

    KernelTables t;
    t.scale = scale;
    t.sites_ = L;
    t.half = static_cast<int>(std::floor(2.0 / (eps * scale))) + 1;
    if (2 * t.half >= L)
        throw std::invalid_argument("build_kernel_tables: kernel band does not fit the ring");
    t.l2sq_jn = j.l2sq_scaled(scale);

    const double h0 = std::min(eps, 0.25 / scale);
    QuadSpec spec;

    // pair-correlation weights C_N(eps d) and their defect against eps^{-1}
    t.c_table.assign(static_cast<std::size_t>(t.half) + 1, 0.0);
    for (int d = 0; d <= t.half; ++d) {
        const double shift = eps * d;
        const double a = shift - reach;
        const double b = reach;
        if (b <= a) continue;
        t.c_table[static_cast<std::size_t>(d)] = simpson_refine(
            [&](double v) { return j.jn(scale, v) * j.jn(scale, v - shift); }, a, b,
            std::min(h0, (b - a) / 8.0), spec);
    }
    for (int d = 1; d <= t.half; ++d) t.s_c += 2.0 * t.c_table[static_cast<std::size_t>(d)];

    {
        QuadSpec fine;
        fine.rel_tol = 1e-9;
        fine.abs_floor = 1e-16;
        fine.max_refine = 26;
        const int jreach = t.half + 2;
        auto defect = [&](double v) {
            double s = 0.0;
            for (int k = -jreach; k <= jreach; ++k) {
                const double w = v - eps * k;
                if (w > -reach && w < reach) s += j.jn(scale, w);
            }
            return eps * s - 1.0;
        };
        t.q4 = simpson_refine([&](double v) { return j.jn(scale, v) * defect(v); }, -reach, reach,
                              std::min(eps / 8.0, 0.125 / scale), fine);
    }

    t.nl_fold.assign(static_cast<std::size_t>(L) * t.half, 0.0);
    t.v1_fold.assign(static_cast<std::size_t>(L) * t.half, 0.0);
    t.v3_fold.assign(static_cast<std::size_t>(L) * t.half, 0.0);

    std::vector<double> coord(static_cast<std::size_t>(L));
    std::vector<double> gp(static_cast<std::size_t>(L));
    for (int x = 0; x < L; ++x) {
        coord[static_cast<std::size_t>(x)] = params.site_coord(x);
        gp[static_cast<std::size_t>(x)] = g(coord[static_cast<std::size_t>(x)], 1);
    }

    // nl_* and v1_* are integrated independently (not derived from each other
    // or from c_table) so banded identities are cross-checks between routes.
    double diag_nl = 0.0, diag_v1 = 0.0;
    for (int x = 0; x < L; ++x) {
        const double ux = coord[static_cast<std::size_t>(x)];
        const double gx = gp[static_cast<std::size_t>(x)];
        const double a = ux - reach;
        const double b = ux + reach;
        const double hd = std::min(h0, (b - a) / 8.0);
        diag_nl += eps * simpson_refine(
                             [&](double u) {
                                 const double w = j.jn(scale, u - ux);
                                 return g(u, 1) * w * w;
                             },
                             a, b, hd, spec);
        diag_v1 += eps * simpson_refine(
                             [&](double u) {
                                 const double w = j.jn(scale, u - ux);
                                 return (g(u, 1) - gx) * w * w;
                             },
                             a, b, hd, spec);

        for (int d = 1; d <= t.half; ++d) {
            const int y = (x + d) % L;
            const double uy = coord[static_cast<std::size_t>(y)];
            const double gy = gp[static_cast<std::size_t>(y)];
            const double lo = std::max(ux, uy) - reach;
            const double hi = std::min(ux, uy) + reach;
            if (hi <= lo) continue; // band wraps the window seam: kernels do not overlap
            const double hp = std::min(h0, (hi - lo) / 8.0);
            const std::size_t idx = static_cast<std::size_t>(x) * t.half + (d - 1);
            t.nl_fold[idx] =
                2.0 * eps *
                simpson_refine(
                    [&](double u) { return g(u, 1) * j.jn(scale, u - ux) * j.jn(scale, u - uy); },
                    lo, hi, hp, spec);
            t.v1_fold[idx] =
                eps * simpson_refine(
                          [&](double u) {
                              return (2.0 * g(u, 1) - gx - gy) * j.jn(scale, u - ux) *
                                     j.jn(scale, u - uy);
                          },
                          lo, hi, hp, spec);
            const double dist = std::abs(uy - ux);
            const double cval = std::abs(dist - eps * d) < 0.5 * eps
                                    ? t.c_table[static_cast<std::size_t>(d)]
                                    : 0.0;
            t.v3_fold[idx] = eps * (gx + gy) * cval;
        }
    }
    t.nl_diag = diag_nl;
    t.v1_diag = diag_v1;
    return t;
}

std::array<double, 5> remainder_terms(const SpinState& state, const FieldRows& rows,
                                      const KernelTables& tables, const SimParams& params) {
    const double eps = params.epsilon;
    double v0 = 0.0;
    const int L = state.size();
    for (int x = 0; x < L; ++x) {
        const int x1 = x + 1 == L ? 0 : x + 1;
        v0 += rows.v0[static_cast<std::size_t>(x)] * state.spin(x) * state.spin(x1);
    }
    const double pair = PairForm(rows.pair).value(state);
    const double v1 = tables.v1_band().value(state);
    const double v2 = eps * tables.l2sq_jn * (rows.pair_row_sum - pair);
    const double v3 = tables.v3_band().value(state) - eps * tables.s_c * pair;
    const double v4 = tables.q4 * pair;
    return {v0, v1, v2, v3, v4};
}

std::array<double, 5> remainder_terms(const SpinState& state, const TestFunction& g,
                                      const Mollifier& j, int scale, const SimParams& params) {
    const FieldRows rows = build_field_rows(params, g);
    const KernelTables tables = build_kernel_tables(params, g, j, scale);
    return remainder_terms(state, rows, tables, params);
}

} // namespace wasep
