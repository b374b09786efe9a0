#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "sistream/scaling.hpp"

using namespace sistream;
using namespace testutil;

TEST_CASE("running scaler: two updates give the hand-computed mean and variance") {
    RunningScaler scaler;
    scaler.update(std::vector<double>{2.0});
    scaler.update(std::vector<double>{4.0});
    CHECK(scaler.mean(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(scaler.variance(0) == doctest::Approx(1.0).epsilon(1e-12));  // population
}

TEST_CASE("running scaler: a single sample has zero variance") {
    RunningScaler scaler;
    scaler.update(std::vector<double>{5.0});
    CHECK(scaler.mean(0) == 5.0);
    CHECK(scaler.variance(0) == 0.0);
}

TEST_CASE("running scaler: recovers the generating distribution") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal(7.0, 2.0);
    RunningScaler scaler;
    for (int i = 0; i < 10000; ++i) scaler.update(std::vector<double>{normal(rng)});
    CHECK(std::abs(scaler.mean(0) - 7.0) < 0.1);
    CHECK(std::abs(scaler.stddev(0) - 2.0) < 0.1);
}

TEST_CASE("running scaler: matches a two-pass batch computation") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(-100.0, 100.0);
    const std::size_t n = 1000, dim = 8;

    std::vector<std::vector<double>> batch(n, std::vector<double>(dim));
    RunningScaler scaler;
    for (auto& row : batch) {
        for (auto& v : row) v = unif(rng);
        scaler.update(row);
    }

    // Independent oracle: two passes over the stored batch.
    for (std::size_t j = 0; j < dim; ++j) {
        double mean = 0.0;
        for (const auto& row : batch) mean += row[j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& row : batch) var += (row[j] - mean) * (row[j] - mean);
        var /= static_cast<double>(n);

        CHECK(scaler.mean(j) == doctest::Approx(mean).epsilon(1e-9));
        CHECK(scaler.variance(j) == doctest::Approx(var).epsilon(1e-9));
    }
}

TEST_CASE("transform centers and scales, zero-variance features map to 0") {
    RunningScaler centered;
    centered.update(std::vector<double>{2.0});
    centered.update(std::vector<double>{4.0});   // mean 3, var 1
    CHECK(centered.transform(std::vector<double>{3.0})[0] == doctest::Approx(0.0));

    RunningScaler spread;
    spread.update(std::vector<double>{-2.0});
    spread.update(std::vector<double>{2.0});     // mean 0, std 2
    CHECK(spread.transform(std::vector<double>{4.0})[0] == doctest::Approx(2.0));

    RunningScaler constant;
    constant.update(std::vector<double>{1.5});
    constant.update(std::vector<double>{1.5});
    CHECK(constant.transform(std::vector<double>{42.0})[0] == 0.0);
}

TEST_CASE("transform keeps label and time index") {
    RunningScaler scaler;
    scaler.update(std::vector<double>{1.0, 2.0});
    const Instance out = scaler.transform(make_instance(17, {1.0, 2.0}, 3));
    CHECK(out.time_index == 17);
    CHECK(*out.label == 3);
}

TEST_CASE("transform is invariant under positive affine rescaling of the data") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    const double a = 3.5, b = -12.0;

    RunningScaler plain, shifted;
    std::vector<double> last;
    for (int i = 0; i < 200; ++i) {
        const double v = unif(rng);
        plain.update(std::vector<double>{v});
        shifted.update(std::vector<double>{a * v + b});
        last = {v};
    }
    const double z1 = plain.transform(last)[0];
    const double z2 = shifted.transform(std::vector<double>{a * last[0] + b})[0];
    CHECK(z1 == doctest::Approx(z2).epsilon(1e-9));
}

TEST_CASE("transform never produces NaN on finite input") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1e6, 1e6);
    RunningScaler scaler;
    for (int i = 0; i < 500; ++i) {
        std::vector<double> x{unif(rng), 0.0, 1e-30 * unif(rng)};
        scaler.update(x);
        for (double v : scaler.transform(x)) CHECK(std::isfinite(v));
    }
}

TEST_CASE("running scaler: dimension mismatch and empty-transform errors") {
    RunningScaler scaler;
    CHECK_THROWS_AS(scaler.transform(std::vector<double>{1.0}), std::logic_error);
    scaler.update(std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(scaler.update(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("running scaler: restriction keeps per-feature history") {
    RunningScaler scaler;
    scaler.update(std::vector<double>{1.0, 10.0, 100.0});
    scaler.update(std::vector<double>{3.0, 30.0, 300.0});
    const std::vector<std::size_t> keep{0, 2};
    scaler.restrict_to(keep);
    REQUIRE(scaler.dimension() == 2);
    CHECK(scaler.mean(0) == doctest::Approx(2.0));
    CHECK(scaler.mean(1) == doctest::Approx(200.0));
    CHECK(scaler.variance(1) == doctest::Approx(10000.0));
}
