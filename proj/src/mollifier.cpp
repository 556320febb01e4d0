#include "wasep/mollifier.hpp"

#include "wasep/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace wasep {

namespace {

double raw_bump(double v) {
    const double s = 1.0 - v * v;
    if (s <= 0.0) return 0.0;
    return std::exp(-1.0 / s);
}

} // namespace

Mollifier::Mollifier(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {
    QuadSpec spec;
    spec.rel_tol = 1e-12;
    if (kind_ == Kind::Bump) {
        const double mass = simpson_refine(raw_bump, -1.0, 1.0, 1.0 / 64.0, spec);
        bump_norm_ = 1.0 / mass;
        l2sq_ = simpson_refine([this](double v) { const double x = j(v); return x * x; },
                               -1.0, 1.0, 1.0 / 64.0, spec);
    } else {
        // (15/16)^2 * integral (1-u^2)^4 = (225/256) * (256/315) = 5/7
        l2sq_ = 5.0 / 7.0;
    }
}

Mollifier Mollifier::bump() { return Mollifier(Kind::Bump, "bump"); }
Mollifier Mollifier::polybump() { return Mollifier(Kind::Polybump, "polybump"); }

Mollifier Mollifier::from_name(const std::string& name) {
    if (name == "bump") return bump();
    if (name == "polybump") return polybump();
    throw std::invalid_argument("Mollifier: unknown kind '" + name + "'");
}

double Mollifier::j(double v) const {
    if (kind_ == Kind::Bump) return bump_norm_ * raw_bump(v);
    const double s = 1.0 - v * v;
    if (s <= 0.0) return 0.0;
    return (15.0 / 16.0) * s * s;
}

} // namespace wasep
