#include "wasep/basis.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace wasep {

namespace {

constexpr int kMaxOrder = 256;

// psi_k(u) for k = 0..kmax by the stable normalized recurrence
//   p_{k+1} = u sqrt(2/(k+1)) p_k - sqrt(k/(k+1)) p_{k-1},  p_0 = pi^{-1/4} e^{-u^2/2}.
void psi_table(double u, int kmax, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(kmax) + 1);
    const double p0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * u * u);
    out[0] = p0;
    if (kmax == 0) return;
    out[1] = u * std::sqrt(2.0) * p0;
    for (int k = 1; k < kmax; ++k) {
        out[static_cast<std::size_t>(k) + 1] =
            u * std::sqrt(2.0 / (k + 1.0)) * out[static_cast<std::size_t>(k)] -
            std::sqrt(static_cast<double>(k) / (k + 1.0)) * out[static_cast<std::size_t>(k) - 1];
    }
}

} // namespace

double hermite_value(int n, double u, int deriv) {
    if (n < 1) throw std::invalid_argument("hermite_value: order must be >= 1");
    if (deriv < 0 || deriv > 3) throw std::invalid_argument("hermite_value: deriv must be in 0..3");
    const int k = n - 1;
    if (k + deriv > kMaxOrder) throw std::invalid_argument("hermite_value: order too large");

    // Derivatives mix orders k-deriv .. k+deriv; build the table once and
    // apply the ladder deriv times on a coefficient vector indexed by order.
    std::vector<double> psi;
    psi_table(u, k + deriv, psi);

    std::vector<double> coeff(static_cast<std::size_t>(k + deriv) + 1, 0.0);
    coeff[static_cast<std::size_t>(k)] = 1.0;
    for (int d = 0; d < deriv; ++d) {
        std::vector<double> next(coeff.size(), 0.0);
        for (int j = 0; j <= k + d; ++j) {
            const double c = coeff[static_cast<std::size_t>(j)];
            if (c == 0.0) continue;
            if (j >= 1) next[static_cast<std::size_t>(j) - 1] += c * std::sqrt(j / 2.0);
            next[static_cast<std::size_t>(j) + 1] -= c * std::sqrt((j + 1.0) / 2.0);
        }
        coeff.swap(next);
    }

    double v = 0.0;
    for (std::size_t j = 0; j < coeff.size(); ++j)
        if (coeff[j] != 0.0) v += coeff[j] * psi[j];
    return v;
}

double hermite_dnorm_sq(int n) {
    if (n < 1) throw std::invalid_argument("hermite_dnorm_sq: order must be >= 1");
    // ||psi_k'||^2 = k + 1/2 with k = n - 1.
    return static_cast<double>(n) - 0.5;
}

DirichletBasis::DirichletBasis(double horizon_) : horizon(horizon_) {
    if (!(horizon > 0.0)) throw std::invalid_argument("DirichletBasis: horizon must be positive");
}

double DirichletBasis::value(int m, double t) const {
    if (m < 1) throw std::invalid_argument("DirichletBasis::value: m must be >= 1");
    return std::sqrt(2.0 / horizon) * std::sin(m * M_PI * t / horizon);
}

double DirichletBasis::dvalue(int m, double t) const {
    if (m < 1) throw std::invalid_argument("DirichletBasis::dvalue: m must be >= 1");
    const double w = m * M_PI / horizon;
    return std::sqrt(2.0 / horizon) * w * std::cos(w * t);
}

double DirichletBasis::eigenvalue(int m) const {
    if (m < 1) throw std::invalid_argument("DirichletBasis::eigenvalue: m must be >= 1");
    const double w = m * M_PI / horizon;
    return w * w;
}

double sobolev_weight(int m, int n) {
    if (m < 1 || n < 1) throw std::invalid_argument("sobolev_weight: indices must be >= 1");
    const double md = m, nd = n;
    return 1.0 / ((md * md * md + nd * nd * nd) * md * md * nd * nd * nd * nd * nd * nd);
}

double neg_sobolev_norm_sq(const std::vector<ModeCoeff>& coeffs) {
    std::set<std::pair<int, int>> seen;
    double acc = 0.0;
    for (const auto& c : coeffs) {
        if (c.m < 1 || c.n < 1)
            throw std::invalid_argument("neg_sobolev_norm_sq: mode indices must be >= 1");
        if (!seen.insert({c.m, c.n}).second)
            throw std::invalid_argument("neg_sobolev_norm_sq: duplicate mode");
        acc += sobolev_weight(c.m, c.n) * c.value * c.value;
    }
    return acc;
}

std::vector<ModeCoeff> project_modes(const std::vector<double>& tgrid,
                                     const std::vector<std::vector<double>>& phi_of_t_u,
                                     const std::vector<double>& ugrid_nodes,
                                     const std::vector<double>& ugrid_weights,
                                     double horizon, int m_max, int n_max) {
    if (m_max < 1 || n_max < 1) throw std::invalid_argument("project_modes: mode caps must be >= 1");
    const std::size_t nt = tgrid.size();
    const std::size_t nu = ugrid_nodes.size();
    if (nt < 3) throw std::invalid_argument("project_modes: time grid too small");
    if (phi_of_t_u.size() != nt) throw std::invalid_argument("project_modes: grid/value mismatch");
    if (ugrid_weights.size() != nu) throw std::invalid_argument("project_modes: node/weight mismatch");
    // Nyquist-style guard: at least 4 time samples per period of the top mode.
    if (static_cast<double>(nt - 1) < 2.0 * m_max)
        throw std::invalid_argument("project_modes: time grid cannot resolve requested m_max");

    DirichletBasis tb(horizon);

    // Space pairing first: s(m index irrelevant) a_n(t_i) = sum_j w_j phi(t_i, u_j) psi_{n-1}(u_j).
    std::vector<std::vector<double>> a(nt, std::vector<double>(static_cast<std::size_t>(n_max), 0.0));
    std::vector<std::vector<double>> psi_at(nu, std::vector<double>(static_cast<std::size_t>(n_max)));
    for (std::size_t j = 0; j < nu; ++j)
        for (int n = 1; n <= n_max; ++n)
            psi_at[j][static_cast<std::size_t>(n) - 1] = hermite_value(n, ugrid_nodes[j]);
    for (std::size_t i = 0; i < nt; ++i) {
        if (phi_of_t_u[i].size() != nu)
            throw std::invalid_argument("project_modes: ragged value grid");
        for (std::size_t j = 0; j < nu; ++j) {
            const double w = ugrid_weights[j] * phi_of_t_u[i][j];
            for (int n = 1; n <= n_max; ++n)
                a[i][static_cast<std::size_t>(n) - 1] += w * psi_at[j][static_cast<std::size_t>(n) - 1];
        }
    }

    // Time pairing by trapezoid on the given grid.
    std::vector<ModeCoeff> out;
    out.reserve(static_cast<std::size_t>(m_max) * static_cast<std::size_t>(n_max));
    for (int m = 1; m <= m_max; ++m) {
        for (int n = 1; n <= n_max; ++n) {
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < nt; ++i) {
                const double f0 = tb.value(m, tgrid[i]) * a[i][static_cast<std::size_t>(n) - 1];
                const double f1 = tb.value(m, tgrid[i + 1]) * a[i + 1][static_cast<std::size_t>(n) - 1];
                acc += 0.5 * (f0 + f1) * (tgrid[i + 1] - tgrid[i]);
            }
            out.push_back({m, n, acc});
        }
    }
    return out;
}

} // namespace wasep
