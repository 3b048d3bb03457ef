// Exercises libflock through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "flock/flock.h"

namespace {

struct Config {
    flock_config* p = nullptr;
    ~Config() { flock_config_free(p); }
};

}  // namespace

TEST_CASE("version and rng") {
    CHECK(std::string(flock_version()) == "1.0.0");
    CHECK(std::string(flock_rng_algorithm()).find("xoshiro256**") != std::string::npos);
}

TEST_CASE("config errors carry status and message") {
    Config c;
    CHECK(flock_config_parse("{\"k\": 10, \"alpha\": 0.5, \"lambda\": 0.25, \"h\": 0.2}", &c.p) == FLOCK_ERR_CONFIG);
    CHECK(c.p == nullptr);
    CHECK(std::string(flock_last_error()).find("h") != std::string::npos);
    CHECK(flock_config_parse("{", &c.p) == FLOCK_ERR_CONFIG);
    CHECK(flock_config_parse(nullptr, &c.p) == FLOCK_ERR_INVALID_ARGUMENT);
    CHECK(flock_config_load("/nonexistent/flock.json", &c.p) == FLOCK_ERR_IO);

    REQUIRE(flock_config_parse("{\"k\": 4, \"alpha\": 0.5, \"lambda\": 0.25}", &c.p) == FLOCK_OK);
    CHECK(flock_config_set(c.p, "lambda=2") == FLOCK_ERR_CONFIG);
    // a rejected override leaves the config unchanged
    const char* text = nullptr;
    REQUIRE(flock_config_describe(c.p, 0, &text) == FLOCK_OK);
    CHECK(std::string(text).find("\"lambda\":0.25") != std::string::npos);
    CHECK(flock_config_describe(c.p, 1, &text) == FLOCK_ERR_INVALID_ARGUMENT);
}

TEST_CASE("simulate and inspect") {
    Config c;
    REQUIRE(flock_config_parse("{\"k\": 5, \"alpha\": 0.0, \"lambda\": 0.0, \"h\": 0.1, \"horizon\": 500}", &c.p) ==
            FLOCK_OK);
    REQUIRE(flock_config_set_seed(c.p, 17) == FLOCK_OK);
    flock_trajectory* t = nullptr;
    REQUIRE(flock_simulate(c.p, &t) == FLOCK_OK);
    const std::size_t n = flock_trajectory_rows(t);
    REQUIRE(n > 10);
    flock_row first{}, last{};
    REQUIRE(flock_trajectory_row(t, 0, &first) == FLOCK_OK);
    REQUIRE(flock_trajectory_row(t, n - 1, &last) == FLOCK_OK);
    CHECK(first.t == 0);
    CHECK(first.connected == 1);
    CHECK(first.fiedler_colored == doctest::Approx(5.0));
    CHECK(last.v_norm < 1e-6);
    CHECK(flock_trajectory_flocking_step(t, 1e-6) == static_cast<std::int64_t>(last.t));
    CHECK(flock_trajectory_row(t, n, &last) == FLOCK_ERR_INVALID_ARGUMENT);

    double slope = 0.0, r2 = 0.0;
    REQUIRE(flock_trajectory_fit_decay(t, 0, 20, &slope, &r2) == FLOCK_OK);
    CHECK(slope == doctest::Approx(std::log(0.5)).epsilon(1e-9));
    CHECK(flock_trajectory_fit_decay(t, 0, 3, &slope, &r2) == FLOCK_ERR_INVALID_ARGUMENT);

    const auto path = (std::filesystem::temp_directory_path() / "flock_capi_traj.csv").string();
    CHECK(flock_trajectory_write(t, path.c_str()) == FLOCK_OK);
    CHECK(std::filesystem::exists(path + ".meta.json"));
    CHECK(flock_trajectory_write(t, "/nonexistent/dir/x.csv") == FLOCK_ERR_IO);
    flock_trajectory_free(t);
    flock_trajectory_free(nullptr);
}

TEST_CASE("sweep") {
    Config c;
    REQUIRE(flock_config_parse("{\"k\": [3, 4], \"alpha\": 0.5, \"lambda\": [0.0, 1.0], \"horizon\": 400}", &c.p) ==
            FLOCK_OK);
    std::size_t cells = 0;
    REQUIRE(flock_config_cells(c.p, &cells) == FLOCK_OK);
    CHECK(cells == 4);
    flock_trajectory* t = nullptr;
    CHECK(flock_simulate(c.p, &t) == FLOCK_ERR_CONFIG);

    flock_sweep* s = nullptr;
    REQUIRE(flock_sweep_run(c.p, 4, 2, &s) == FLOCK_OK);
    CHECK(flock_sweep_cells(s) == 4);
    double f = -1.0;
    REQUIRE(flock_sweep_flocking_fraction(s, 0, &f) == FLOCK_OK);
    CHECK(f == 1.0);
    REQUIRE(flock_sweep_flocking_fraction(s, 1, &f) == FLOCK_OK);
    CHECK(f == 0.0);
    CHECK(flock_sweep_flocking_fraction(s, 4, &f) == FLOCK_ERR_INVALID_ARGUMENT);
    CHECK(flock_sweep_run(c.p, 0, 1, &s) != FLOCK_OK);
    flock_sweep_free(s);
}

TEST_CASE("critical velocity and Fiedler number") {
    double exact = 0.0;
    REQUIRE(flock_critical_velocity_exact(3, 0.5, &exact) == FLOCK_OK);
    CHECK(exact == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(flock_critical_velocity_exact(6, 0.5, &exact) == FLOCK_ERR_INVALID_ARGUMENT);

    flock_estimate e{};
    REQUIRE(flock_critical_velocity_estimate(3, 0.5, 20000, 1, &e) == FLOCK_OK);
    CHECK(std::abs(e.value - 0.75) <= 3.0 * e.std_error);

    const double k3[9] = {0, 1, 1, 1, 0, 1, 1, 1, 0};
    double phi = 0.0;
    REQUIRE(flock_fiedler(k3, 3, &phi) == FLOCK_OK);
    CHECK(phi == doctest::Approx(3.0).epsilon(1e-12));
    const double asym[4] = {0, 1, 0, 0};
    CHECK(flock_fiedler(asym, 2, &phi) == FLOCK_ERR_INVALID_ARGUMENT);
    CHECK(flock_fiedler(nullptr, 2, &phi) == FLOCK_ERR_INVALID_ARGUMENT);
}

TEST_CASE("verify bounds") {
    Config c;
    REQUIRE(flock_config_parse("{\"k\": 6, \"alpha\": 0.5, \"lambda\": 0.0, \"horizon\": 300, \"seed\": 4}", &c.p) ==
            FLOCK_OK);
    flock_bound_report* r = nullptr;
    REQUIRE(flock_verify_bounds(c.p, &r) == FLOCK_OK);
    const std::size_t n = flock_bound_report_checks(r);
    CHECK(n >= 6);
    bool saw_contraction = false;
    for (std::size_t i = 0; i < n; ++i) {
        flock_check chk{};
        REQUIRE(flock_bound_report_check(r, i, &chk) == FLOCK_OK);
        if (std::string(chk.name) == "contraction") {
            saw_contraction = true;
            CHECK(chk.passed == 1);
            CHECK(chk.checked > 0);
        }
    }
    CHECK(saw_contraction);
    const std::string text = flock_bound_report_text(r);
    CHECK(text.find("OVERALL") != std::string::npos);
    CHECK((text.find("OVERALL PASS") != std::string::npos) == (flock_bound_report_passed(r) == 1));
    flock_bound_report_free(r);
}
