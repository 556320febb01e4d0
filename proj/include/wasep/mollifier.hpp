#pragma once

#include <string>

namespace wasep {

// Even probability density supported on [-1, 1], plus its rescalings
// j_N(v) = N j(Nv) used to smear the fluctuation field over scale 1/N.
class Mollifier {
public:
    static Mollifier bump();     // c * exp(-1/(1-u^2)) on (-1, 1)
    static Mollifier polybump(); // (15/16) (1-u^2)^2 on [-1, 1]
    static Mollifier from_name(const std::string& name);

    const std::string& name() const { return name_; }

    double j(double v) const;
    double jn(int scale, double v) const { return scale * j(scale * v); }

    // integral of j^2 over [-1, 1]
    double l2sq() const { return l2sq_; }
    // integral of j_N^2 = N * l2sq()
    double l2sq_scaled(int scale) const { return scale * l2sq_; }

private:
    enum class Kind { Bump, Polybump };
    Mollifier(Kind kind, std::string name);

    Kind kind_;
    std::string name_;
    double bump_norm_ = 0.0;
    double l2sq_ = 0.0;
};

} // namespace wasep
