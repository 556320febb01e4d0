#include "wasep/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace wasep {

namespace {

double simpson_fixed(const std::function<double(double)>& f, double a, double b, long n) {
    // n must be even; composite Simpson with n panels of width (b-a)/n.
    const double h = (b - a) / static_cast<double>(n);
    double odd = 0.0, even = 0.0;
    for (long i = 1; i < n; i += 2) odd += f(a + h * static_cast<double>(i));
    for (long i = 2; i < n; i += 2) even += f(a + h * static_cast<double>(i));
    return (h / 3.0) * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

} // namespace

double simpson_refine(const std::function<double(double)>& f, double a, double b,
                      double h0, const QuadSpec& spec) {
    if (!(b > a)) {
        if (a == b) return 0.0;
        throw std::invalid_argument("simpson_refine: b < a");
    }
    if (!(h0 > 0.0)) throw std::invalid_argument("simpson_refine: h0 must be positive");

    long n = static_cast<long>(std::ceil((b - a) / h0));
    if (n < 2) n = 2;
    if (n % 2) ++n;

    double prev = simpson_fixed(f, a, b, n);
    for (int pass = 0; pass < spec.max_refine; ++pass) {
        n *= 2;
        const double cur = simpson_fixed(f, a, b, n);
        const double diff = std::abs(cur - prev);
        if (diff <= spec.rel_tol * std::abs(cur) || diff < spec.abs_floor) return cur;
        prev = cur;
    }
    throw std::runtime_error("simpson_refine: no convergence within refinement budget");
}

GaussHermite gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");

    // Jacobi matrix of the Hermite recurrence: zero diagonal, off-diagonal
    // sqrt(k/2) for k = 1..n-1. Eigenvalues are nodes; weights come from the
    // first component of each normalized eigenvector.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double v = std::sqrt(static_cast<double>(k) / 2.0);
        J(k, k - 1) = v;
        J(k - 1, k) = v;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_hermite: eigen decomposition failed");

    const double sqrt_pi = std::sqrt(M_PI);
    GaussHermite out;
    out.nodes.resize(n);
    out.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        out.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        out.weights[i] = sqrt_pi * v0 * v0;
    }
    return out;
}

} // namespace wasep
