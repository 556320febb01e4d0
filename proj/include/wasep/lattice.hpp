#pragma once

#include "wasep/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace wasep {

// Scaling and geometry of one simulation cell. The lattice is a periodic ring
// of `sites` sites; site x carries the macroscopic coordinate
//   u_x = epsilon*x for x < sites/2, epsilon*(x - sites) otherwise,
// so coordinates cover [-window/2, window/2) with the wrap seam at the far
// edge of the window where test functions must vanish.
struct SimParams {
    double epsilon = 0.0;
    double gamma = 0.0;
    double window = 0.0;  // macroscopic spatial width W
    double horizon = 0.0; // macroscopic time T
    int sites = 0;        // L = round(window/epsilon)

    static SimParams make(double epsilon, double gamma, double window, double horizon);

    void validate() const; // throws std::invalid_argument on violations

    double site_coord(int x) const {
        return (2 * x < sites) ? epsilon * x : epsilon * (x - sites);
    }
    double micro_horizon() const { return horizon / (epsilon * epsilon); }
    double rate_right() const { return 1.0 + std::sqrt(epsilon) * gamma; }
    double rate_left() const { return 1.0 - std::sqrt(epsilon) * gamma; }
};

// Occupation configuration; centered spins are xi(x) = 2 eta(x) - 1.
struct SpinState {
    std::vector<std::int8_t> occ;
    int particle_count = 0;

    int size() const { return static_cast<int>(occ.size()); }
    int spin(int x) const { return 2 * occ[static_cast<std::size_t>(x)] - 1; }
    void recount();
    bool operator==(const SpinState& o) const { return occ == o.occ; }
};

struct JumpEvent {
    double micro_time = 0.0; // time in microscopic units tau = t / epsilon^2
    std::int32_t source = 0; // site the particle jumps from
    std::int8_t direction = 0; // +1 right, -1 left
    double rate = 0.0;

    // left index of the exchanged bond (source site for right jumps)
    int bond(int sites) const {
        if (direction > 0) return source;
        return source == 0 ? sites - 1 : source - 1;
    }
};

// Event record sufficient to reproduce the state at any time by replay.
struct Trajectory {
    SimParams params;
    SpinState initial;
    std::vector<JumpEvent> events;
    double micro_duration = 0.0;
};

SpinState sample_initial(const SimParams& params, Rng& rng);
SpinState sample_initial(const SimParams& params, std::uint64_t seed);

// All currently enabled jumps with their rates (oracle-scale enumeration).
std::vector<JumpEvent> enabled_jumps(const SpinState& state, const SimParams& params);

// Exact event-driven simulation over `micro_duration` units of microscopic
// time: exponential holding times at the current total rate, events chosen
// proportionally to their rates. The state is advanced in place; the returned
// segment holds the pre-state and the event record.
Trajectory advance(SpinState& state, const SimParams& params, Rng& rng, double micro_duration);

// Replay the event record from traj.initial, invoking f(state, bond, event)
// immediately BEFORE each exchange is applied. Returns the final state.
template <class F>
SpinState replay(const Trajectory& traj, F&& f) {
    SpinState s = traj.initial;
    const int L = traj.params.sites;
    for (const JumpEvent& e : traj.events) {
        const int b = e.bond(L);
        f(static_cast<const SpinState&>(s), b, e);
        const int b1 = b + 1 == L ? 0 : b + 1;
        std::swap(s.occ[static_cast<std::size_t>(b)], s.occ[static_cast<std::size_t>(b1)]);
    }
    return s;
}

SpinState state_at(const Trajectory& traj, double micro_time);

// Action of the generator on the spin at site x:
//   [xi(x-1) - 2 xi(x) + xi(x+1)] + sqrt(eps)*gamma*[xi(x)xi(x+1) - xi(x-1)xi(x)].
double apply_generator_local(const SpinState& state, int x, const SimParams& params);

// Dense rate matrix on all 2^L configurations (L <= 12), indexed by the bit
// pattern sum_x eta(x) 2^x. Rows sum to zero.
Eigen::MatrixXd exact_generator_matrix(const SimParams& params);

int state_index(const SpinState& state);
SpinState state_from_index(int index, int sites);

} // namespace wasep
