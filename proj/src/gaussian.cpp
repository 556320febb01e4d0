#include "wasep/gaussian.hpp"

#include "wasep/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wasep {

namespace {

double overlap_integral(const TestFunction& a, const TestFunction& b, int deriv) {
    if (a.is_zero() || b.is_zero()) return 0.0;
    const double r = std::max(a.support_radius(1e-12), b.support_radius(1e-12));
    QuadSpec spec;
    spec.rel_tol = 1e-10;
    return simpson_refine([&](double u) { return a(u, deriv) * b(u, deriv); }, -r, r,
                          r / 64.0, spec);
}

} // namespace

WhitePairingSampler::WhitePairingSampler(const std::vector<TestFunction>& gs) {
    const int k = static_cast<int>(gs.size());
    if (k == 0) throw std::invalid_argument("WhitePairingSampler: empty function list");
    gram_.resize(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            const double v = overlap_integral(gs[static_cast<std::size_t>(i)],
                                              gs[static_cast<std::size_t>(j)], 0);
            gram_(i, j) = v;
            gram_(j, i) = v;
        }
    Eigen::LLT<Eigen::MatrixXd> llt(gram_ +
                                    1e-14 * Eigen::MatrixXd::Identity(k, k));
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("WhitePairingSampler: Gram matrix is not positive definite");
    chol_ = llt.matrixL();
}

Eigen::VectorXd WhitePairingSampler::sample(Rng& rng) const {
    Eigen::VectorXd z(chol_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return chol_ * z;
}

double sample_white_pairing(const TestFunction& g, Rng& rng) {
    return std::sqrt(g.l2_norm_sq(0)) * rng.normal();
}

Sheet sample_sheet(const SheetGrid& grid, Rng& rng) {
    if (grid.nt < 1 || grid.nu < 1 || grid.horizon <= 0.0 || grid.radius <= 0.0)
        throw std::invalid_argument("sample_sheet: degenerate grid");
    Sheet s;
    s.grid = grid;
    s.b = Eigen::MatrixXd::Zero(grid.nt + 1, 2 * grid.nu + 1);
    const double sd = std::sqrt(grid.dt() * grid.du());
    // independent cell increments, cumulated in t and in |u| on each branch
    for (int sign = 0; sign < 2; ++sign) {
        for (int i = 1; i <= grid.nt; ++i) {
            double row_prefix = 0.0; // sum of this row's increments up to |u_j|
            for (int j = 1; j <= grid.nu; ++j) {
                row_prefix += sd * rng.normal();
                const int col = sign == 0 ? grid.nu + j : grid.nu - j;
                s.b(i, col) = s.b(i - 1, col) + row_prefix;
            }
        }
    }
    return s;
}

double sheet_pairing(const Sheet& sheet, const TestFunction& g, double t) {
    const SheetGrid& grid = sheet.grid;
    const double ratio = t / grid.dt();
    const int ti = static_cast<int>(std::lround(ratio));
    if (ti < 0 || ti > grid.nt || std::abs(ratio - ti) > 1e-9)
        throw std::invalid_argument("sheet_pairing: t is not a grid time");
    const double radius = g.support_radius(1e-8);
    if (radius > grid.radius)
        throw std::invalid_argument("sheet_pairing: test function sticks out of the sheet grid");
    if (grid.du() > 0.05)
        throw std::invalid_argument("sheet_pairing: u-grid too coarse to resolve G''");
    double sum = 0.0;
    for (int j = -grid.nu; j <= grid.nu; ++j) {
        const double w = (j == -grid.nu || j == grid.nu) ? 0.5 : 1.0;
        sum += w * sheet.b(ti, grid.nu + j) * g(j * grid.du(), 2);
    }
    return std::sqrt(2.0) * sum * grid.du();
}

double limit_covariance(const TestFunction& g1, const TestFunction& g2, double t1, double t2) {
    if (t1 < 0.0 || t2 < 0.0) throw std::invalid_argument("limit_covariance: negative time");
    return 2.0 * std::min(t1, t2) * overlap_integral(g1, g2, 1);
}

} // namespace wasep
