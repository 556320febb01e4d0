#include "wasep/forms.hpp"

#include <stdexcept>

namespace wasep {

double LinearForm::value(const SpinState& s) const {
    double acc = 0.0;
    for (std::size_t x = 0; x < c_.size(); ++x) acc += c_[x] * s.spin(static_cast<int>(x));
    return acc;
}

double LinearForm::swap_delta(const SpinState& pre, int y) const {
    const int L = static_cast<int>(c_.size());
    const int y1 = y + 1 == L ? 0 : y + 1;
    // both spins flip (they differ), so each term changes by -2 c xi
    return -2.0 * (c_[static_cast<std::size_t>(y)] * pre.spin(y) +
                   c_[static_cast<std::size_t>(y1)] * pre.spin(y1));
}

double PairForm::value(const SpinState& s) const {
    const int L = static_cast<int>(c_.size());
    double acc = 0.0;
    for (int x = 0; x < L; ++x) {
        const int x1 = x + 1 == L ? 0 : x + 1;
        acc += c_[static_cast<std::size_t>(x)] * s.spin(x) * s.spin(x1);
    }
    return acc;
}

double PairForm::swap_delta(const SpinState& pre, int y) const {
    const int L = static_cast<int>(c_.size());
    const int y1 = y + 1 == L ? 0 : y + 1;
    const int ym = y == 0 ? L - 1 : y - 1;
    const int y2 = y1 + 1 == L ? 0 : y1 + 1;
    // bond (y, y+1) keeps its product (both spins flip); neighbors flip sign
    return -2.0 * (c_[static_cast<std::size_t>(ym)] * pre.spin(ym) * pre.spin(y) +
                   c_[static_cast<std::size_t>(y1)] * pre.spin(y1) * pre.spin(y2));
}

BandForm::BandForm(std::vector<double> fold, int sites, int half, double diag)
    : fold_(std::move(fold)), sites_(sites), half_(half), diag_(diag) {
    if (half_ < 0 || sites_ < 0) throw std::invalid_argument("BandForm: negative extent");
    if (half_ > 0 && 2 * half_ >= sites_)
        throw std::invalid_argument("BandForm: band must be narrower than half the ring");
    if (fold_.size() != static_cast<std::size_t>(sites_) * static_cast<std::size_t>(half_))
        throw std::invalid_argument("BandForm: fold size mismatch");
}

double BandForm::value(const SpinState& s) const {
    double acc = diag_;
    for (int x = 0; x < sites_; ++x) {
        const double sx = s.spin(x);
        const double* row = fold_.data() + static_cast<std::size_t>(x) * half_;
        for (int d = 1; d <= half_; ++d) {
            int xd = x + d;
            if (xd >= sites_) xd -= sites_;
            acc += row[d - 1] * sx * s.spin(xd);
        }
    }
    return acc;
}

double BandForm::swap_delta(const SpinState& pre, int y) const {
    if (half_ == 0) return 0.0;
    const int L = sites_;
    const int y1 = y + 1 == L ? 0 : y + 1;

    // Both xi(y) and xi(y+1) flip. Terms containing exactly one of them change
    // sign; the term pairing them (x = y, d = 1) is invariant, so the double
    // count below is added back.
    double sy = 0.0;
    {
        const double* row = fold_.data() + static_cast<std::size_t>(y) * half_;
        for (int d = 1; d <= half_; ++d) {
            int xd = y + d;
            if (xd >= L) xd -= L;
            sy += row[d - 1] * pre.spin(xd);
        }
        for (int d = 1; d <= half_; ++d) {
            int xm = y - d;
            if (xm < 0) xm += L;
            sy += fold_[static_cast<std::size_t>(xm) * half_ + d - 1] * pre.spin(xm);
        }
    }
    double sy1 = 0.0;
    {
        const double* row = fold_.data() + static_cast<std::size_t>(y1) * half_;
        for (int d = 1; d <= half_; ++d) {
            int xd = y1 + d;
            if (xd >= L) xd -= L;
            sy1 += row[d - 1] * pre.spin(xd);
        }
        for (int d = 1; d <= half_; ++d) {
            int xm = y1 - d;
            if (xm < 0) xm += L;
            sy1 += fold_[static_cast<std::size_t>(xm) * half_ + d - 1] * pre.spin(xm);
        }
    }
    const double cross = fold_[static_cast<std::size_t>(y) * half_] * pre.spin(y) * pre.spin(y1);
    return -2.0 * pre.spin(y) * sy - 2.0 * pre.spin(y1) * sy1 + 4.0 * cross;
}

} // namespace wasep
