#pragma once

#include "wasep/forms.hpp"
#include "wasep/lattice.hpp"
#include "wasep/mollifier.hpp"
#include "wasep/test_function.hpp"

#include <array>
#include <vector>

namespace wasep {

// Y(G) = sqrt(eps) sum_x G(u_x) xi(x). Warns once per call site pattern if the
// (1+u^2)-weighted tails of G stick out of the window.
double eval_field(const SpinState& state, const TestFunction& g, const SimParams& params);

// (Y * J_N)(u) = sqrt(eps) sum_x J_N(u - u_x) xi(x), plain coordinate distance.
double mollified_field(const SpinState& state, const Mollifier& j, int scale, double u,
                       const SimParams& params);

// Composite-Simpson value of int G'(u) (Y*J_N)^2(u) du over the window plus
// kernel overhang, refined to 1e-8 relative. quad_step must not exceed
// min(epsilon, 1/(4N)).
double nonlinear_integral(const SpinState& state, const TestFunction& g, const Mollifier& j,
                          int scale, double quad_step, const SimParams& params);

// sum_x d^deriv G(u_x) xi(x) xi(x+1)
double discrete_pair_sum(const SpinState& state, const TestFunction& g, const SimParams& params,
                         int deriv = 1);

// eps^{-3/2} sum_x G(u_x) L_eps xi(x), evaluated directly from the state.
double drift_term(const SpinState& state, const TestFunction& g, const SimParams& params);

// Pathwise deterministic bound for the third-order discretization residual:
// sqrt(eps)/6 (2 + sqrt(eps) gamma)(pi + 2 eps) sup|(1+u^2)G'''| * t.
double taylor_residual_bound(const SimParams& params, const TestFunction& g, double t);

// Site-indexed coefficient rows of all G-level trajectory observables.
struct FieldRows {
    std::vector<double> field;      // sqrt(eps) G(u_x)
    std::vector<double> heat;       // sqrt(eps) G''(u_x)
    std::vector<double> drift_lin;  // eps^{-3/2} [G(u_{x-1}) - 2G(u_x) + G(u_{x+1})]
    std::vector<double> drift_pair; // eps^{-1} gamma [G(u_x) - G(u_{x+1})]
    std::vector<double> pair;       // G'(u_x)
    std::vector<double> v0;         // (eps/2) G''(u_x)
    std::vector<double> resid_lin;  // drift_lin - heat
    std::vector<double> resid_pair; // drift_pair + gamma*pair + gamma*v0
    std::vector<double> qv_lin;     // 2 eps^{-1} sqrt(eps) gamma (g_b(x)^2 - g_b(x-1)^2)
    std::vector<double> qv_pair;    // -2 eps^{-1} g_b(x)^2
    double qv_const = 0.0;          // 2 eps^{-1} sum_b g_b^2
    double pair_row_sum = 0.0;      // sum_x G'(u_x)
};

FieldRows build_field_rows(const SimParams& params, const TestFunction& g);

// Kernel overlap tables of one (G, J, N) cell. half is the band reach in
// sites; all u-integrals carry the refinement contract of nonlinear_integral.
struct KernelTables {
    int scale = 0; // N
    int half = 0;
    double l2sq_jn = 0.0; // int J_N^2
    double s_c = 0.0;     // sum_{d != 0} C_N(eps d), C_N(d) = int J_N(v) J_N(v-d) dv
    double q4 = 0.0;      // int J_N(v) [eps sum_x J_N(v - eps x) - 1] dv
    std::vector<double> c_table; // C_N(eps d), d = 0..half

    // folded band coefficients, row-major (x, d-1)
    std::vector<double> nl_fold; // 2 eps K(x, x+d), K(x,y) = int G' J_N(.-u_x) J_N(.-u_y)
    double nl_diag = 0.0;        // eps sum_x K(x,x)
    std::vector<double> v1_fold; // eps int [2G'(u) - G'(u_x) - G'(u_{x+d})] J_N J_N
    double v1_diag = 0.0;        // eps sum_x int [G'(u) - G'(u_x)] J_N(.-u_x)^2
    std::vector<double> v3_fold; // eps (G'(u_x) + G'(u_{x+d})) C_N(eps d)

    BandForm nl_band() const;
    BandForm v1_band() const;
    BandForm v3_band() const;

private:
    friend KernelTables build_kernel_tables(const SimParams&, const TestFunction&,
                                            const Mollifier&, int);
    int sites_ = 0;
};

KernelTables build_kernel_tables(const SimParams& params, const TestFunction& g,
                                 const Mollifier& j, int scale);

// Instantaneous remainder summands (V^0 .. V^4) of one state, from tables.
std::array<double, 5> remainder_terms(const SpinState& state, const TestFunction& g,
                                      const Mollifier& j, int scale, const SimParams& params);
std::array<double, 5> remainder_terms(const SpinState& state, const FieldRows& rows,
                                      const KernelTables& tables, const SimParams& params);

} // namespace wasep
