#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "flock/analysis.hpp"
#include "flock/core.hpp"
#include "flock/error.hpp"
#include "flock/spectral.hpp"
#include "generators.hpp"

using namespace flock;

TEST_CASE("validate_timestep accepts 0 < h <= 1/k only") {
    CHECK_NOTHROW(validate_timestep({10, 0.5, 0.25, 0.1}));
    CHECK_NOTHROW(validate_timestep({4, 0.5, 0.25, 0.25}));
    CHECK_NOTHROW(validate_timestep({3, 0.5, 0.25, 1.0 / 3.0}));
    CHECK_THROWS_AS(validate_timestep({10, 0.5, 0.25, 0.2}), ConfigError);
    CHECK_THROWS_AS(validate_timestep({10, 0.5, 0.25, 0.0}), ConfigError);
    CHECK_THROWS_AS(validate_timestep({10, 0.5, 0.25, -0.05}), ConfigError);

    try {
        validate_timestep({10, 0.5, 0.25, 0.2});
    } catch (const ConfigError& e) {
        CHECK(e.field() == "h");
    }
    CHECK_THROWS_AS(validate_timestep({10, 1.5, 0.25, 0.1}), ConfigError);
    CHECK_THROWS_AS(validate_timestep({10, 0.5, -0.1, 0.1}), ConfigError);
    CHECK_THROWS_AS(validate_timestep({1, 0.5, 0.1, 0.5}), ConfigError);

    const ModelParams p{7, 0.3, 0.6, 0.1};
    const ModelParams q = validate_timestep(p);
    CHECK(q.k == p.k);
    CHECK(q.h == p.h);
}

TEST_CASE("cs_weight") {
    for (double a : {0.0, 0.25, 0.5, 1.0}) CHECK(cs_weight(0.0, a) == 1.0);
    CHECK(cs_weight(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cs_weight(3.0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cs_weight(123.0, 0.0) == 1.0);
    CHECK(cs_weight(2.0, 0.7) > cs_weight(2.5, 0.7));
    CHECK_THROWS_AS(cs_weight(-1e-9, 0.5), InvalidArgument);
    CHECK_THROWS_AS(cs_weight(std::nan(""), 0.5), InvalidArgument);
}

TEST_CASE("sample_failure_mask endpoints and symmetry") {
    Rng rng(7);
    const auto all = sample_failure_mask({6, 0.5, 0.0, 1.0 / 6}, rng);
    CHECK(all == FailureMask::all_connected(6));
    const auto none = sample_failure_mask({6, 0.5, 1.0, 1.0 / 6}, rng);
    CHECK(none.edge_count() == 0);

    const auto m = sample_failure_mask({9, 0.5, 0.4, 1.0 / 9}, rng);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK_FALSE(m(i, i));
        for (std::size_t j = 0; j < 9; ++j) CHECK(m(i, j) == m(j, i));
    }
}

TEST_CASE("sample_failure_mask link frequency matches 1 - lambda") {
    // 3 pairs per draw; mean of 3e4 Bernoulli(0.5) outcomes, binomial SE.
    Rng rng(2024);
    const ModelParams p{3, 0.0, 0.5, 1.0 / 3};
    const int draws = 10000;
    double on = 0.0;
    for (int d = 0; d < draws; ++d) on += static_cast<double>(sample_failure_mask(p, rng).edge_count());
    const double n = 3.0 * draws;
    const double mean = on / n;
    const double se = std::sqrt(0.25 / n);
    CHECK(std::abs(mean - 0.5) < 3 * se);
}

TEST_CASE("weight_matrix") {
    const ModelParams p{4, 0.5, 0.0, 0.25};
    FlockState s;
    s.positions.assign(4, Vec3{1, 2, 3});
    s.velocities.assign(4, Vec3{0, 0, 0});
    const auto w = weight_matrix(s, FailureMask::all_connected(4), p);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(w(i, j) == (i == j ? 0.0 : 1.0));

    const auto z = weight_matrix(s, FailureMask(4), p);
    for (double x : z.entries().data()) CHECK(x == 0.0);

    FlockState two;
    two.positions = {{0, 0, 0}, {3, 0, 0}};
    two.velocities = {{0, 0, 0}, {0, 0, 0}};
    const auto w2 = weight_matrix(two, FailureMask::all_connected(2), {2, 0.5, 0.0, 0.5});
    CHECK(w2(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w2(1, 0) == w2(0, 1));

    CHECK_THROWS_AS(weight_matrix(two, FailureMask(3), {2, 0.5, 0.0, 0.5}), InvalidArgument);
}

TEST_CASE("WeightMatrix rejects asymmetric input") {
    SquareMatrix a(2);
    a(0, 1) = 0.5;
    CHECK_THROWS_AS(WeightMatrix{a}, InvalidArgument);
    SquareMatrix d(2);
    d(0, 0) = 1.0;
    CHECK_THROWS_AS(WeightMatrix{d}, InvalidArgument);
}

TEST_CASE("step examples") {
    SUBCASE("consensus is a fixed point of the velocity update") {
        const ModelParams p{5, 0.5, 0.0, 0.2};
        Rng rng(1);
        FlockState s = gen::random_state(5, rng);
        s.velocities.assign(5, Vec3{0.3, -1.0, 2.0});
        const FlockState n = step(s, FailureMask::all_connected(5), p);
        CHECK(n.t == s.t + 1);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(n.velocities[i] == s.velocities[i]);
            for (int c = 0; c < 3; ++c)
                CHECK(n.positions[i][c] == doctest::Approx(s.positions[i][c] + 0.2 * s.velocities[i][c]));
        }
    }
    SUBCASE("no links leaves velocities unchanged") {
        const ModelParams p{4, 0.5, 1.0, 0.25};
        Rng rng(3);
        const FlockState s = gen::random_state(4, rng);
        const FlockState n = step(s, FailureMask(4), p);
        CHECK(n.velocities == s.velocities);
        for (std::size_t i = 0; i < 4; ++i)
            for (int c = 0; c < 3; ++c)
                CHECK(n.positions[i][c] == doctest::Approx(s.positions[i][c] + 0.25 * s.velocities[i][c]));
    }
    SUBCASE("two agents, alpha = 0, h = 1/2 meet at the mean velocity") {
        // a_12 = 1, V_1' = (1,0,0) + 0.5 * ((-1,0,0) - (1,0,0)) = 0.
        FlockState s;
        s.positions = {{0, 0, 0}, {1, 0, 0}};
        s.velocities = {{1, 0, 0}, {-1, 0, 0}};
        const FlockState n = step(s, FailureMask::all_connected(2), {2, 0.0, 0.0, 0.5});
        for (const auto& v : n.velocities)
            for (double c : v) CHECK(c == 0.0);
        CHECK(n.positions[0] == Vec3{0.5, 0, 0});
        CHECK(n.positions[1] == Vec3{0.5, 0, 0});
    }
}

TEST_CASE("step_matrix_form") {
    Rng rng(11);
    const ModelParams p{6, 0.5, 0.3, 1.0 / 6};
    const FlockState s = gen::random_state(6, rng);

    SUBCASE("zero Laplacian is the identity on velocities") {
        const FlockState n = step_matrix_form(s, laplacian(FailureMask(6)), p);
        CHECK(n.velocities == s.velocities);
    }
    SUBCASE("consensus velocities are in the kernel") {
        FlockState c = s;
        c.velocities.assign(6, Vec3{1.5, -2, 0.25});
        const auto w = weight_matrix(c, FailureMask::all_connected(6), p);
        const FlockState n = step_matrix_form(c, laplacian(w), p);
        for (std::size_t i = 0; i < 6; ++i)
            for (int d = 0; d < 3; ++d) CHECK(n.velocities[i][d] == doctest::Approx(c.velocities[i][d]).epsilon(1e-14));
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(step_matrix_form(s, laplacian(FailureMask(5)), p), InvalidArgument);
    }
}

TEST_CASE("property: componentwise and matrix-form steps agree") {
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = 2 + rng.next() % 11;  // 2..12
        const ModelParams p = gen::random_params(k, rng);
        const FlockState s = gen::random_state(k, rng, 3.0);
        const FailureMask m = sample_failure_mask(p, rng);
        const WeightMatrix w = weight_matrix(s, m, p);
        const FlockState a = step(s, w, p);
        const FlockState b = step_matrix_form(s, laplacian(w), p);
        for (std::size_t i = 0; i < k; ++i)
            for (int c = 0; c < 3; ++c) {
                REQUIRE(std::abs(a.velocities[i][c] - b.velocities[i][c]) <= 1e-12);
                REQUIRE(a.positions[i][c] == b.positions[i][c]);
            }
    }
}

TEST_CASE("property: mean velocity conserved, max speed nonincreasing, coefficients convex") {
    Rng rng(5150);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 2 + rng.next() % 11;
        const ModelParams p = gen::random_params(k, rng);
        const FlockState s = gen::random_state(k, rng, 2.0);
        const FailureMask m = sample_failure_mask(p, rng);
        const WeightMatrix w = weight_matrix(s, m, p);
        const FlockState n = step(s, w, p);

        const Vec3 before = mean_position_velocity(s).second;
        const Vec3 after = mean_position_velocity(n).second;
        for (int c = 0; c < 3; ++c) REQUIRE(std::abs(after[c] - before[c]) <= 1e-12);

        double max_before = 0.0, max_after = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            max_before = std::max(max_before, norm(s.velocities[i]));
            max_after = std::max(max_after, norm(n.velocities[i]));
        }
        REQUIRE(max_after <= max_before + 1e-12);

        const SquareMatrix c = convex_coefficients(w, p.h);
        for (std::size_t i = 0; i < k; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                REQUIRE(c(i, j) >= 0.0);
                REQUIRE(c(i, j) <= 1.0);
                row += c(i, j);
            }
            REQUIRE(row == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("lambda = 0 dynamics do not depend on the mask stream") {
    Rng init(8);
    const FlockState s0 = gen::random_state(7, init);
    const ModelParams p{7, 0.5, 0.0, 1.0 / 7};
    Rng a(1), b(987654321);
    FlockState sa = s0, sb = s0;
    for (int t = 0; t < 200; ++t) {
        sa = step(sa, sample_failure_mask(p, a), p);
        sb = step(sb, sample_failure_mask(p, b), p);
    }
    CHECK(sa == sb);
}

TEST_CASE("FlockState::validate") {
    FlockState s;
    s.positions = {{0, 0, 0}};
    s.velocities = {{0, 0, 0}};
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s.positions.push_back({1, 1, 1});
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s.velocities.push_back({0, 0, std::nan("")});
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s.velocities.back() = {0, 0, 1};
    CHECK_NOTHROW(s.validate());
}
