#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace wasep {

struct QuadSpec {
    double rel_tol = 1e-8;
    double abs_floor = 1e-14; // convergence also accepted when |I_h - I_{h/2}| < abs_floor
    int max_refine = 24;
};

// Composite Simpson on [a, b] starting from step <= h0, halving the step until
// two successive composite values agree to spec. Throws std::runtime_error if
// the refinement budget is exhausted without convergence.
double simpson_refine(const std::function<double(double)>& f, double a, double b,
                      double h0, const QuadSpec& spec = {});

// Nodes and weights of n-point Gauss-Hermite quadrature for weight e^{-x^2},
// computed from the Jacobi matrix eigen-decomposition. Exact for polynomials
// of degree <= 2n-1.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermite gauss_hermite(int n);

} // namespace wasep
