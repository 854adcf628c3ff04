#include <doctest.h>

#include <cmath>
#include <vector>

#include "sfvq/errors.hpp"
#include "sfvq/optim.hpp"

using namespace sfvq;

TEST_CASE("lr schedule halves at the listed batch indices") {
    const LrSchedule s{1e-3, 100000, {60000, 80000}};
    CHECK(lr_at(s, 0) == 1e-3);
    CHECK(lr_at(s, 59999) == 1e-3);
    CHECK(lr_at(s, 60000) == 5e-4);
    CHECK(lr_at(s, 79999) == 5e-4);
    CHECK(lr_at(s, 80000) == 2.5e-4);
    CHECK(lr_at(s, 99999) == 2.5e-4);
}

TEST_CASE("default schedule puts the halvings at 60% and 80%") {
    const LrSchedule s = default_schedule(1e-3, 100000);
    REQUIRE(s.halve_points.size() == 2);
    CHECK(s.halve_points[0] == 60000);
    CHECK(s.halve_points[1] == 80000);
    const LrSchedule small = default_schedule(2e-3, 5000);
    CHECK(small.halve_points[0] == 3000);
    CHECK(small.halve_points[1] == 4000);
}

TEST_CASE("lr_at is non-increasing within a stage") {
    const LrSchedule s{1e-3, 1000, {300, 600, 900}};
    double prev = lr_at(s, 0);
    for (long long b = 1; b < 1000; ++b) {
        const double lr = lr_at(s, b);
        CHECK(lr <= prev);
        prev = lr;
    }
}

TEST_CASE("lr_at rejects batches outside the stage") {
    const LrSchedule s{1e-3, 100, {60}};
    CHECK_THROWS_AS(lr_at(s, 100), InvalidArgument);
    CHECK_THROWS_AS(lr_at(s, -1), InvalidArgument);
    const LrSchedule bad{1e-3, 100, {60, 60}};
    CHECK_THROWS_AS(lr_at(bad, 0), InvalidArgument);
}

TEST_CASE("first adam step equals -lr*g/(|g|+eps)") {
    AdamState st = make_adam_state(1);
    std::vector<double> params{0.0};
    std::vector<double> grads{1.0};
    adam_step(st, params, grads, 1e-3);
    const double expected = -1e-3 * 1.0 / (1.0 + 1e-8);
    CHECK(params[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(st.step == 1);
}

TEST_CASE("zero gradient with zero moments leaves parameters unchanged") {
    AdamState st = make_adam_state(3);
    std::vector<double> params{1.5, -2.0, 0.25};
    const std::vector<double> before = params;
    std::vector<double> grads{0.0, 0.0, 0.0};
    adam_step(st, params, grads, 1e-2);
    CHECK(params == before);
}

TEST_CASE("constant positive gradient keeps decreasing the parameter") {
    // textbook recurrence: with g=1 every bias-corrected step is
    // -lr * m_hat / (sqrt(v_hat) + eps) < 0
    AdamState st = make_adam_state(1);
    std::vector<double> params{0.0};
    std::vector<double> grads{1.0};
    double prev = params[0];
    for (int i = 0; i < 5; ++i) {
        adam_step(st, params, grads, 1e-3);
        CHECK(params[0] < prev);
        prev = params[0];
    }
}

TEST_CASE("adam rejects shape mismatches and non-finite gradients") {
    AdamState st = make_adam_state(2);
    std::vector<double> params{0.0, 0.0};
    std::vector<double> short_grads{1.0};
    CHECK_THROWS_AS(adam_step(st, params, short_grads, 1e-3), DimensionError);
    std::vector<double> nan_grads{1.0, std::nan("")};
    CHECK_THROWS_AS(adam_step(st, params, nan_grads, 1e-3), NumericError);
}

TEST_CASE("adam updates are deterministic") {
    auto run = [] {
        AdamState st = make_adam_state(4);
        std::vector<double> params{0.1, -0.2, 0.3, -0.4};
        for (int i = 0; i < 10; ++i) {
            std::vector<double> grads{0.5, -0.25, 0.125, 1.0};
            adam_step(st, params, grads, 1e-3);
        }
        return params;
    };
    CHECK(run() == run());
}
