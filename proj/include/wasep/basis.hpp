#pragma once

#include <vector>

namespace wasep {

// Normalized Hermite function of 1-based order n: order n corresponds to the
// physicists' Hermite function psi_{n-1}(u) = h_{n-1}(u) e^{-u^2/2} with
// ||psi_{n-1}||_{L^2} = 1. Supports derivatives 0..3 via the ladder relation
// psi_k' = sqrt(k/2) psi_{k-1} - sqrt((k+1)/2) psi_{k+1}.
double hermite_value(int n, double u, int deriv = 0);

// L^2 norm squared of the derivative of the order-n function: n - 1/2.
double hermite_dnorm_sq(int n);

// Sine basis on [0, horizon] vanishing at both ends:
//   g_m(t) = sqrt(2/horizon) sin(m pi t / horizon), eigenvalue (m pi / horizon)^2.
struct DirichletBasis {
    double horizon;
    explicit DirichletBasis(double horizon_);
    double value(int m, double t) const;
    double dvalue(int m, double t) const;
    double eigenvalue(int m) const;
};

// Weight of the space-time mode (m, n) in the squared negative-order norm used
// to compare distribution-valued paths:
//   weight(m, n) = 1 / ((m^3 + n^3) m^2 n^6).
double sobolev_weight(int m, int n);

struct ModeCoeff {
    int m = 0; // time mode, >= 1
    int n = 0; // space mode, >= 1
    double value = 0.0;
};

// Squared negative norm of a finite mode expansion: sum of weight(m,n) c^2.
// Throws std::invalid_argument on duplicate (m, n) pairs or indices < 1.
double neg_sobolev_norm_sq(const std::vector<ModeCoeff>& coeffs);

// Coefficients of a smooth function phi(t, u) against g_m (x) psi_{n-1} for
// m = 1..m_max, n = 1..n_max, by tensor quadrature: trapezoid on the supplied
// time grid, Gauss-Hermite in space (phi is assumed Schwartz-class in u).
// Throws if the time grid is too coarse to resolve the top mode.
std::vector<ModeCoeff> project_modes(const std::vector<double>& tgrid,
                                     const std::vector<std::vector<double>>& phi_of_t_u,
                                     const std::vector<double>& ugrid_nodes,
                                     const std::vector<double>& ugrid_weights,
                                     double horizon, int m_max, int n_max);

} // namespace wasep
