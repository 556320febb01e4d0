#include "doctest.h"

#include "wasep/lattice.hpp"
#include "wasep/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

using namespace wasep;

namespace {

SpinState state_of(std::initializer_list<int> occ) {
    SpinState s;
    for (int v : occ) s.occ.push_back(static_cast<std::int8_t>(v));
    s.recount();
    return s;
}

} // namespace

TEST_CASE("SimParams::make derives the lattice size and validates inputs") {
    const SimParams p = SimParams::make(0.04, 1.0, 20.0, 0.25);
    CHECK(p.sites == 500);
    CHECK(p.rate_right() == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(p.rate_left() == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(p.micro_horizon() == doctest::Approx(0.25 / 0.0016).epsilon(1e-13));

    CHECK_THROWS_AS(SimParams::make(0.0, 1.0, 20.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(SimParams::make(-0.1, 1.0, 20.0, 0.25), std::invalid_argument);
    // weak asymmetry bound: sqrt(eps)*|gamma| must stay below 1
    CHECK_THROWS_AS(SimParams::make(0.25, 2.1, 20.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(SimParams::make(0.25, -2.1, 20.0, 0.25), std::invalid_argument);
    // fewer than 4 sites
    CHECK_THROWS_AS(SimParams::make(0.25, 0.5, 0.5, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(SimParams::make(0.25, 0.5, 1.0, 0.0), std::invalid_argument);

    // window/epsilon mismatch caught by validate on a hand-built struct
    SimParams bad = p;
    bad.sites = 400;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("site_coord wraps the ring into [-W/2, W/2)") {
    const SimParams p = SimParams::make(0.1, 0.0, 1.0, 1.0);
    REQUIRE(p.sites == 10);
    CHECK(p.site_coord(0) == doctest::Approx(0.0));
    CHECK(p.site_coord(4) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(p.site_coord(5) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(p.site_coord(9) == doctest::Approx(-0.1).epsilon(1e-15));
    // all coordinates distinct and inside the window
    std::set<double> coords;
    for (int x = 0; x < p.sites; ++x) {
        const double u = p.site_coord(x);
        CHECK(u >= -0.5 - 1e-15);
        CHECK(u < 0.5);
        coords.insert(u);
    }
    CHECK(coords.size() == 10);
}

TEST_CASE("spin convention and recount") {
    SpinState s = state_of({1, 0, 1, 1, 0, 0});
    CHECK(s.particle_count == 3);
    CHECK(s.spin(0) == 1);
    CHECK(s.spin(1) == -1);
    CHECK(s.size() == 6);
}

TEST_CASE("sample_initial is deterministic per seed and near half filling") {
    const SimParams p = SimParams::make(0.04, 1.0, 20.0, 0.25);
    const SpinState a = sample_initial(p, 12345);
    const SpinState b = sample_initial(p, 12345);
    const SpinState c = sample_initial(p, 54321);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.size() == 500);
    int count = 0;
    for (auto v : a.occ) count += v;
    CHECK(count == a.particle_count);
    // 5 sigma binomial window around L/2
    CHECK(std::fabs(count - 250.0) < 5.0 * std::sqrt(125.0));
}

TEST_CASE("enabled_jumps enumerates exchanges with directional rates") {
    // sqrt(eps)*gamma = 0.2
    const SimParams p = SimParams::make(0.25, 0.4, 1.0, 1.0);
    REQUIRE(p.sites == 4);

    SUBCASE("single particle can hop both ways") {
        const SpinState s = state_of({1, 0, 0, 0});
        auto ev = enabled_jumps(s, p);
        REQUIRE(ev.size() == 2);
        double right = 0, left = 0;
        for (const auto& e : ev) {
            CHECK(e.source == 0);
            if (e.direction > 0) right = e.rate;
            else left = e.rate;
        }
        CHECK(right == doctest::Approx(1.2).epsilon(1e-14));
        CHECK(left == doctest::Approx(0.8).epsilon(1e-14));
    }

    SUBCASE("exclusion blocks interior moves") {
        const SpinState s = state_of({1, 1, 0, 0});
        auto ev = enabled_jumps(s, p);
        REQUIRE(ev.size() == 2);
        for (const auto& e : ev) {
            if (e.direction > 0) {
                CHECK(e.source == 1);
                CHECK(e.rate == doctest::Approx(p.rate_right()));
            } else {
                CHECK(e.source == 0);
                CHECK(e.rate == doctest::Approx(p.rate_left()));
            }
        }
    }

    SUBCASE("full and empty rings are frozen") {
        CHECK(enabled_jumps(state_of({1, 1, 1, 1}), p).empty());
        CHECK(enabled_jumps(state_of({0, 0, 0, 0}), p).empty());
    }

    SUBCASE("total rate matches the directional counts") {
        const SpinState s = state_of({1, 0, 1, 1, 0, 0});
        const SimParams p6 = SimParams::make(0.25, 0.4, 1.5, 1.0);
        REQUIRE(p6.sites == 6);
        auto ev = enabled_jumps(s, p6);
        int nr = 0, nl = 0;
        double total = 0;
        for (const auto& e : ev) {
            total += e.rate;
            (e.direction > 0 ? nr : nl)++;
        }
        CHECK(nr == 2); // sites 0 and 3
        CHECK(nl == 2); // sites 0 and 2
        CHECK(total == doctest::Approx(2 * 1.2 + 2 * 0.8).epsilon(1e-14));
    }
}

TEST_CASE("JumpEvent::bond maps moves to the exchanged edge") {
    JumpEvent e;
    e.source = 3;
    e.direction = 1;
    CHECK(e.bond(6) == 3);
    e.direction = -1;
    CHECK(e.bond(6) == 2);
    e.source = 0;
    CHECK(e.bond(6) == 5);
}

TEST_CASE("advance produces a replayable exact trajectory") {
    const SimParams p = SimParams::make(0.25, 0.5, 6.0, 1.0);
    REQUIRE(p.sites == 24);
    Rng rng(derive_seed(777, "advance", 0));
    SpinState s = sample_initial(p, 42);
    const SpinState initial = s;
    const int n0 = s.particle_count;

    Trajectory traj = advance(s, p, rng, p.micro_horizon());
    CHECK(traj.micro_duration == doctest::Approx(p.micro_horizon()));
    CHECK(traj.initial == initial);
    CHECK_FALSE(traj.events.empty());

    // events strictly ordered in time and inside the window
    double prev = 0.0;
    for (const auto& e : traj.events) {
        CHECK(e.micro_time > prev);
        CHECK(e.micro_time <= traj.micro_duration);
        prev = e.micro_time;
        CHECK((e.direction == 1 || e.direction == -1));
        CHECK(e.rate > 0.0);
    }

    // every recorded event was admissible when applied
    int applied = 0;
    SpinState fin = replay(traj, [&](const SpinState& pre, int bond, const JumpEvent& e) {
        const int b1 = (bond + 1) % p.sites;
        CHECK(pre.occ[bond] + pre.occ[b1] == 1); // one particle, one hole
        const double want = e.direction > 0 ? p.rate_right() : p.rate_left();
        CHECK(e.rate == doctest::Approx(want));
        ++applied;
    });
    CHECK(applied == static_cast<int>(traj.events.size()));
    CHECK(fin == s); // replay reproduces the in-place advanced state
    SpinState fcopy = fin;
    fcopy.recount();
    CHECK(fcopy.particle_count == n0); // conservation
}

TEST_CASE("advance determinism and degenerate cases") {
    const SimParams p = SimParams::make(0.25, 0.5, 6.0, 1.0);

    SpinState s1 = sample_initial(p, 9);
    SpinState s2 = sample_initial(p, 9);
    Rng r1(1234), r2(1234);
    Trajectory t1 = advance(s1, p, r1, 50.0);
    Trajectory t2 = advance(s2, p, r2, 50.0);
    REQUIRE(t1.events.size() == t2.events.size());
    for (std::size_t i = 0; i < t1.events.size(); ++i) {
        CHECK(t1.events[i].micro_time == t2.events[i].micro_time);
        CHECK(t1.events[i].source == t2.events[i].source);
        CHECK(t1.events[i].direction == t2.events[i].direction);
    }
    CHECK(s1 == s2);

    // zero duration: no events, state unchanged
    SpinState s3 = sample_initial(p, 9);
    const SpinState before = s3;
    Rng r3(5);
    Trajectory t3 = advance(s3, p, r3, 0.0);
    CHECK(t3.events.empty());
    CHECK(s3 == before);

    // absorbing full ring
    SpinState full;
    full.occ.assign(24, 1);
    full.recount();
    Rng r4(5);
    Trajectory t4 = advance(full, p, r4, 100.0);
    CHECK(t4.events.empty());
    CHECK(t4.micro_duration == doctest::Approx(100.0));
}

TEST_CASE("state_at reconstructs intermediate states") {
    const SimParams p = SimParams::make(0.25, 0.5, 6.0, 1.0);
    SpinState s = sample_initial(p, 31);
    Rng rng(87);
    const Trajectory traj = advance(s, p, rng, 40.0);
    REQUIRE(traj.events.size() >= 4);

    CHECK(state_at(traj, 0.0) == traj.initial);
    CHECK(state_at(traj, traj.micro_duration) == s);

    // halfway: prefix replay by hand
    const double tau = traj.events[traj.events.size() / 2].micro_time + 1e-9;
    SpinState manual = traj.initial;
    for (const auto& e : traj.events) {
        if (e.micro_time > tau) break;
        const int b = e.bond(p.sites);
        std::swap(manual.occ[b], manual.occ[(b + 1) % p.sites]);
    }
    CHECK(state_at(traj, tau) == manual);
}

TEST_CASE("apply_generator_local matches hand-evaluated formulas") {
    // sqrt(eps)*gamma = 0.2 again
    const SimParams p = SimParams::make(0.25, 0.4, 1.5, 1.0);
    REQUIRE(p.sites == 6);

    // constant block: all +1 neighbors
    CHECK(apply_generator_local(state_of({1, 1, 1, 0, 0, 0}), 1, p) == doctest::Approx(0.0));
    // isolated up spin: -4, asymmetric part cancels
    CHECK(apply_generator_local(state_of({0, 1, 0, 0, 1, 1}), 1, p) == doctest::Approx(-4.0));
    // mixed: xi(x-1)=1, xi(x)=1, xi(x+1)=-1
    CHECK(apply_generator_local(state_of({1, 1, 0, 0, 1, 1}), 1, p) ==
          doctest::Approx(-2.4).epsilon(1e-14));
}

TEST_CASE("exact_generator_matrix is a conservative rate matrix") {
    const SimParams p = SimParams::make(0.25, 0.4, 1.5, 1.0);
    const Eigen::MatrixXd q = exact_generator_matrix(p);
    REQUIRE(q.rows() == 64);
    REQUIRE(q.cols() == 64);

    for (int i = 0; i < 64; ++i) {
        CHECK(std::fabs(q.row(i).sum()) < 1e-12);
        for (int j = 0; j < 64; ++j) {
            if (i != j) CHECK(q(i, j) >= 0.0);
        }
    }

    // single admissible exchange carries the directional rate:
    // (1,0,0,0) -> (0,1,0,0) at rate 1 + sqrt(eps)*gamma
    const SimParams p4 = SimParams::make(0.25, 0.4, 1.0, 1.0);
    const Eigen::MatrixXd q4 = exact_generator_matrix(p4);
    const int from = state_index(state_of({1, 0, 0, 0}));
    const int to = state_index(state_of({0, 1, 0, 0}));
    CHECK(q4(from, to) == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(q4(to, from) == doctest::Approx(0.8).epsilon(1e-14));

    // transitions only between states at equal particle number
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            if (i == j || q4(i, j) == 0.0) continue;
            CHECK(__builtin_popcount(static_cast<unsigned>(i)) ==
                  __builtin_popcount(static_cast<unsigned>(j)));
        }
    }

    // uniform measure on each particle-number sector is stationary
    for (int k = 0; k <= 4; ++k) {
        Eigen::VectorXd pi = Eigen::VectorXd::Zero(16);
        for (int i = 0; i < 16; ++i)
            if (__builtin_popcount(static_cast<unsigned>(i)) == k) pi(i) = 1.0;
        CHECK((pi.transpose() * q4).cwiseAbs().maxCoeff() < 1e-12);
    }

    SimParams big = SimParams::make(0.25, 0.4, 3.25, 1.0);
    REQUIRE(big.sites == 13);
    CHECK_THROWS_AS(exact_generator_matrix(big), std::invalid_argument);
}

TEST_CASE("generator matrix agrees with the local generator on spins") {
    const SimParams p = SimParams::make(0.25, 0.4, 1.5, 1.0);
    const Eigen::MatrixXd q = exact_generator_matrix(p);
    Rng rng(2024);
    for (int rep = 0; rep < 10; ++rep) {
        SpinState s;
        s.occ.resize(6);
        for (auto& v : s.occ) v = static_cast<std::int8_t>(rng.raw() & 1u);
        s.recount();
        const int idx = state_index(s);
        for (int x = 0; x < 6; ++x) {
            // (Q f)(idx) for f(eta) = xi(x), computed from the matrix row
            double acc = 0;
            for (int j = 0; j < 64; ++j) {
                if (q(idx, j) == 0.0 || j == idx) continue;
                acc += q(idx, j) * (state_from_index(j, 6).spin(x) - s.spin(x));
            }
            CHECK(acc == doctest::Approx(apply_generator_local(s, x, p)).epsilon(1e-11));
        }
    }
}

TEST_CASE("state_index round-trips") {
    const SpinState s = state_of({1, 0, 1, 1, 0, 0});
    CHECK(state_index(s) == 1 + 4 + 8);
    CHECK(state_from_index(state_index(s), 6) == s);
    for (int i = 0; i < 64; ++i) CHECK(state_index(state_from_index(i, 6)) == i);
}

TEST_CASE("rng primitives behave as documented") {
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
    CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));

    Rng r(99);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform01();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
    double acc = 0;
    for (int i = 0; i < 20000; ++i) acc += r.exponential(2.0);
    CHECK(acc / 20000 == doctest::Approx(0.5).epsilon(0.05));
    double m = 0, v = 0;
    for (int i = 0; i < 20000; ++i) {
        const double z = r.normal();
        m += z;
        v += z * z;
    }
    CHECK(std::fabs(m / 20000) < 0.03);
    CHECK(v / 20000 == doctest::Approx(1.0).epsilon(0.05));
    CHECK_THROWS_AS(r.exponential(0.0), std::invalid_argument);
}
