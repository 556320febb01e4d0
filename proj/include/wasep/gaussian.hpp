#pragma once

#include "wasep/rng.hpp"
#include "wasep/test_function.hpp"

#include <Eigen/Dense>

#include <vector>

namespace wasep {

// Spatial white-noise pairings: one joint draw of (W(G_1), ..., W(G_k)) with
// exact covariance int G_i G_j, via the Cholesky factor of the Gram matrix.
class WhitePairingSampler {
public:
    explicit WhitePairingSampler(const std::vector<TestFunction>& gs);
    Eigen::VectorXd sample(Rng& rng) const;
    const Eigen::MatrixXd& gram() const { return gram_; }

private:
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd chol_;
};

double sample_white_pairing(const TestFunction& g, Rng& rng);

// Uniform grid for a two-parameter sheet on [0, horizon] x [-radius, radius]:
// time nodes i*horizon/nt, space nodes j*radius/nu for |j| <= nu.
struct SheetGrid {
    double horizon = 1.0;
    double radius = 10.0;
    int nt = 8;
    int nu = 1024;

    double dt() const { return horizon / nt; }
    double du() const { return radius / nu; }
};

// Brownian sheet sample B(t_i, u_j): independent branches for u > 0 and u < 0,
// each with covariance (t ^ t')(|u| ^ |u'|), B(0, .) = B(., 0) = 0.
struct Sheet {
    SheetGrid grid;
    Eigen::MatrixXd b; // (nt+1) x (2 nu + 1), column nu is u = 0
};

Sheet sample_sheet(const SheetGrid& grid, Rng& rng);

// sqrt(2) * int B(t, u) G''(u) du by the trapezoid rule on the sheet grid.
// t must sit on the time grid; G must be resolved by the grid (support inside
// the radius, spacing fine enough), otherwise throws std::invalid_argument.
double sheet_pairing(const Sheet& sheet, const TestFunction& g, double t);

// Covariance of the limiting field: 2 min(t1, t2) int G1' G2'.
double limit_covariance(const TestFunction& g1, const TestFunction& g2, double t1, double t2);

} // namespace wasep
