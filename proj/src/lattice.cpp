#include "wasep/lattice.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wasep {

SimParams SimParams::make(double epsilon, double gamma, double window, double horizon) {
    SimParams p;
    p.epsilon = epsilon;
    p.gamma = gamma;
    p.window = window;
    p.horizon = horizon;
    p.sites = static_cast<int>(std::lround(window / epsilon));
    p.validate();
    return p;
}

void SimParams::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("SimParams: epsilon must be positive");
    if (!(window > 0.0)) throw std::invalid_argument("SimParams: window must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("SimParams: horizon must be positive");
    if (std::sqrt(epsilon) * std::abs(gamma) > 1.0)
        throw std::invalid_argument("SimParams: sqrt(epsilon)*|gamma| must be <= 1 (rates nonnegative)");
    if (sites < 4) throw std::invalid_argument("SimParams: need at least 4 sites");
    if (std::abs(sites * epsilon - window) > epsilon + 1e-12)
        throw std::invalid_argument("SimParams: sites*epsilon must equal window within one spacing");
}

void SpinState::recount() {
    particle_count = 0;
    for (std::int8_t v : occ) particle_count += v;
}

SpinState sample_initial(const SimParams& params, Rng& rng) {
    SpinState s;
    s.occ.resize(static_cast<std::size_t>(params.sites));
    for (auto& v : s.occ) v = (rng.raw() >> 63) ? 1 : 0;
    s.recount();
    return s;
}

SpinState sample_initial(const SimParams& params, std::uint64_t seed) {
    Rng rng(seed);
    return sample_initial(params, rng);
}

std::vector<JumpEvent> enabled_jumps(const SpinState& state, const SimParams& params) {
    std::vector<JumpEvent> out;
    const int L = state.size();
    const double p = params.rate_right();
    const double q = params.rate_left();
    for (int b = 0; b < L; ++b) {
        const int b1 = b + 1 == L ? 0 : b + 1;
        const int a = state.occ[static_cast<std::size_t>(b)];
        const int c = state.occ[static_cast<std::size_t>(b1)];
        if (a == 1 && c == 0) out.push_back({0.0, b, +1, p});
        else if (a == 0 && c == 1) out.push_back({0.0, b1, -1, q});
    }
    return out;
}

namespace {

// Dynamic index sets of enabled bonds, O(1) insert/erase via position arrays.
class BondSets {
public:
    explicit BondSets(const SpinState& s) : L_(s.size()) {
        pos_right_.assign(static_cast<std::size_t>(L_), -1);
        pos_left_.assign(static_cast<std::size_t>(L_), -1);
        for (int b = 0; b < L_; ++b) classify(s, b);
    }

    int right_count() const { return static_cast<int>(right_.size()); }
    int left_count() const { return static_cast<int>(left_.size()); }
    int right_at(std::size_t i) const { return right_[i]; }
    int left_at(std::size_t i) const { return left_[i]; }

    void reclassify(const SpinState& s, int b) {
        erase(b);
        classify(s, b);
    }

private:
    void classify(const SpinState& s, int b) {
        const int b1 = b + 1 == L_ ? 0 : b + 1;
        const int a = s.occ[static_cast<std::size_t>(b)];
        const int c = s.occ[static_cast<std::size_t>(b1)];
        if (a == 1 && c == 0) {
            pos_right_[static_cast<std::size_t>(b)] = static_cast<int>(right_.size());
            right_.push_back(b);
        } else if (a == 0 && c == 1) {
            pos_left_[static_cast<std::size_t>(b)] = static_cast<int>(left_.size());
            left_.push_back(b);
        }
    }

    void erase(int b) {
        int& pr = pos_right_[static_cast<std::size_t>(b)];
        if (pr >= 0) {
            const int last = right_.back();
            right_[static_cast<std::size_t>(pr)] = last;
            pos_right_[static_cast<std::size_t>(last)] = pr;
            right_.pop_back();
            pr = -1;
        }
        int& pl = pos_left_[static_cast<std::size_t>(b)];
        if (pl >= 0) {
            const int last = left_.back();
            left_[static_cast<std::size_t>(pl)] = last;
            pos_left_[static_cast<std::size_t>(last)] = pl;
            left_.pop_back();
            pl = -1;
        }
    }

    int L_;
    std::vector<int> right_, left_; // bonds enabled for right / left jumps
    std::vector<int> pos_right_, pos_left_;
};

} // namespace

Trajectory advance(SpinState& state, const SimParams& params, Rng& rng, double micro_duration) {
    if (micro_duration < 0.0) throw std::invalid_argument("advance: negative duration");
    if (state.size() != params.sites) throw std::invalid_argument("advance: state/params size mismatch");

    Trajectory traj;
    traj.params = params;
    traj.initial = state;
    traj.micro_duration = micro_duration;

    const int L = params.sites;
    const double p = params.rate_right();
    const double q = params.rate_left();

    BondSets sets(state);
    double tau = 0.0;
    while (true) {
        const double total = p * sets.right_count() + q * sets.left_count();
        if (total <= 0.0) break; // absorbing configuration idles
        tau += rng.exponential(total);
        if (tau > micro_duration) break;

        // pick the set proportionally to its rate mass, then a uniform member
        const double u = rng.uniform01() * total;
        int b;
        JumpEvent ev;
        ev.micro_time = tau;
        if (u <= p * sets.right_count() && sets.right_count() > 0) {
            const auto i = static_cast<std::size_t>(rng.uniform01() * sets.right_count());
            b = sets.right_at(i >= static_cast<std::size_t>(sets.right_count()) ? 0 : i);
            ev.source = b;
            ev.direction = +1;
            ev.rate = p;
        } else {
            const auto i = static_cast<std::size_t>(rng.uniform01() * sets.left_count());
            b = sets.left_at(i >= static_cast<std::size_t>(sets.left_count()) ? 0 : i);
            const int b1 = b + 1 == L ? 0 : b + 1;
            ev.source = b1;
            ev.direction = -1;
            ev.rate = q;
        }
        traj.events.push_back(ev);

        const int b1 = b + 1 == L ? 0 : b + 1;
        std::swap(state.occ[static_cast<std::size_t>(b)], state.occ[static_cast<std::size_t>(b1)]);
        const int bm = b == 0 ? L - 1 : b - 1;
        sets.reclassify(state, bm);
        sets.reclassify(state, b);
        sets.reclassify(state, b1);
    }
    return traj;
}

SpinState state_at(const Trajectory& traj, double micro_time) {
    SpinState s = traj.initial;
    const int L = traj.params.sites;
    for (const JumpEvent& e : traj.events) {
        if (e.micro_time > micro_time) break;
        const int b = e.bond(L);
        const int b1 = b + 1 == L ? 0 : b + 1;
        std::swap(s.occ[static_cast<std::size_t>(b)], s.occ[static_cast<std::size_t>(b1)]);
    }
    return s;
}

double apply_generator_local(const SpinState& state, int x, const SimParams& params) {
    const int L = state.size();
    const int xm = x == 0 ? L - 1 : x - 1;
    const int xp = x + 1 == L ? 0 : x + 1;
    const double sm = state.spin(xm);
    const double s0 = state.spin(x);
    const double sp = state.spin(xp);
    return (sm - 2.0 * s0 + sp) + std::sqrt(params.epsilon) * params.gamma * (s0 * sp - sm * s0);
}

int state_index(const SpinState& state) {
    int idx = 0;
    for (int x = state.size() - 1; x >= 0; --x) idx = 2 * idx + state.occ[static_cast<std::size_t>(x)];
    return idx;
}

SpinState state_from_index(int index, int sites) {
    SpinState s;
    s.occ.resize(static_cast<std::size_t>(sites));
    for (int x = 0; x < sites; ++x) s.occ[static_cast<std::size_t>(x)] = (index >> x) & 1;
    s.recount();
    return s;
}

Eigen::MatrixXd exact_generator_matrix(const SimParams& params) {
    const int L = params.sites;
    if (L > 12) throw std::invalid_argument("exact_generator_matrix: limited to 12 sites");
    const int n = 1 << L;
    const double p = params.rate_right();
    const double q = params.rate_left();

    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int idx = 0; idx < n; ++idx) {
        for (int b = 0; b < L; ++b) {
            const int b1 = b + 1 == L ? 0 : b + 1;
            const int a = (idx >> b) & 1;
            const int c = (idx >> b1) & 1;
            if (a == c) continue;
            const int target = idx ^ (1 << b) ^ (1 << b1);
            const double rate = (a == 1) ? p : q; // occupied left end jumps right, else left
            Q(idx, target) += rate;
            Q(idx, idx) -= rate;
        }
    }
    return Q;
}

} // namespace wasep
