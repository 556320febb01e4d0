#pragma once

#include "wasep/lattice.hpp"

#include <vector>

namespace wasep {

// The three observable shapes appearing along trajectories, each maintained
// incrementally under bond exchanges. An exchange at bond (y, y+1) with
// eta(y) != eta(y+1) flips both spins; forms expose the exact value change
// given the PRE-exchange state. All site indices are periodic.

// sum_x c(x) xi(x)
class LinearForm {
public:
    LinearForm() = default;
    explicit LinearForm(std::vector<double> row) : c_(std::move(row)) {}

    double value(const SpinState& s) const;
    double swap_delta(const SpinState& pre, int y) const;
    bool empty() const { return c_.empty(); }
    const std::vector<double>& row() const { return c_; }

private:
    std::vector<double> c_;
};

// sum_x c(x) xi(x) xi(x+1)
class PairForm {
public:
    PairForm() = default;
    explicit PairForm(std::vector<double> row) : c_(std::move(row)) {}

    double value(const SpinState& s) const;
    double swap_delta(const SpinState& pre, int y) const;
    bool empty() const { return c_.empty(); }
    const std::vector<double>& row() const { return c_; }

private:
    std::vector<double> c_;
};

// diag + sum_x sum_{d=1..half} F(x,d) xi(x) xi(x+d), with folded coefficients
// F(x,d) = A(x,x+d) + A(x+d,x) of an underlying banded matrix A and
// diag = sum_x A(x,x) (constant because xi^2 = 1).
class BandForm {
public:
    BandForm() = default;
    // fold is row-major (x, d-1), d = 1..half; requires 2*half < sites.
    BandForm(std::vector<double> fold, int sites, int half, double diag);

    double value(const SpinState& s) const;
    double swap_delta(const SpinState& pre, int y) const;
    bool empty() const { return half_ == 0 && diag_ == 0.0; }
    int half() const { return half_; }
    double diag() const { return diag_; }
    double fold_at(int x, int d) const { return fold_[static_cast<std::size_t>(x) * half_ + d - 1]; }

private:
    std::vector<double> fold_;
    int sites_ = 0;
    int half_ = 0;
    double diag_ = 0.0;
};

} // namespace wasep
