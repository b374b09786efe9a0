#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "sistream/hoeffding.hpp"
#include "sistream/scaling.hpp"
#include "sistream/sis.hpp"

using namespace sistream;
using namespace testutil;

namespace {

// Exhaustive oracle for the reordering objective: minimum of
// sum |D_g(i) - D_g(i-1)| over every permutation.
double min_objective_by_enumeration(std::vector<double> distances) {
    std::vector<std::size_t> perm(distances.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double objective = 0.0;
        for (std::size_t i = 1; i < perm.size(); ++i)
            objective += std::abs(distances[perm[i]] - distances[perm[i - 1]]);
        best = std::min(best, objective);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

RecentBuffer buffer_of(const std::vector<Instance>& instances, std::size_t capacity) {
    RecentBuffer buf(capacity);
    for (const auto& inst : instances) buf.push(inst);
    return buf;
}

}  // namespace

TEST_CASE("recent buffer: bounded queue with oldest-first eviction") {
    RecentBuffer buf(2);
    buf.push(make_instance(0, {1.0}, 0));
    CHECK(buf.size() == 1);
    buf.push(make_instance(1, {2.0}, 0));
    buf.push(make_instance(2, {3.0}, 0));
    REQUIRE(buf.size() == 2);
    CHECK(buf.entry(0).time_index == 1);
    CHECK(buf.entry(1).time_index == 2);
}

TEST_CASE("recent buffer: 250 pushes at capacity 200 keep the last 200") {
    RecentBuffer buf(200);
    for (std::size_t t = 0; t < 250; ++t) buf.push(make_instance(t, {0.0}, 0));
    REQUIRE(buf.size() == 200);
    CHECK(buf.entry(0).time_index == 50);
    CHECK(buf.entry(199).time_index == 249);
}

TEST_CASE("recent buffer: rejects unlabeled and out-of-order instances") {
    RecentBuffer buf(4);
    CHECK_THROWS_AS(buf.push(make_unlabeled(0, {1.0})), std::invalid_argument);
    buf.push(make_instance(5, {1.0}, 0));
    CHECK_THROWS_AS(buf.push(make_instance(5, {1.0}, 0)), std::invalid_argument);
}

TEST_CASE("recent buffer: dimension resize truncates, never grows") {
    RecentBuffer buf(4);
    buf.push(make_instance(0, {1.0, 2.0, 3.0, 4.0}, 0));
    buf.push(make_instance(1, {5.0, 6.0, 7.0, 8.0}, 1));

    SUBCASE("prefix truncation to the target dimension") {
        buf.resize_features(3);
        CHECK(buf.entry(0).features == std::vector<double>{1.0, 2.0, 3.0});
        CHECK(buf.entry(1).features == std::vector<double>{5.0, 6.0, 7.0});
    }
    SUBCASE("target equal to the current dimension is the identity") {
        buf.resize_features(4);
        CHECK(buf.entry(0).features == std::vector<double>{1.0, 2.0, 3.0, 4.0});
    }
    SUBCASE("explicit keep set") {
        const std::vector<std::size_t> keep{0, 2, 3};
        buf.resize_features(keep);
        CHECK(buf.entry(0).features == std::vector<double>{1.0, 3.0, 4.0});
    }
    SUBCASE("growing is an error") {
        buf.resize_features(3);
        CHECK_THROWS_AS(buf.resize_features(5), std::invalid_argument);
    }
}

TEST_CASE("reorder sorts by distance ascending and minimizes the objective") {
    // Distances land at {0.9, 0.1, 0.5} up to a vanishing time term: the
    // horizon is a power of two large enough that the additions stay
    // exact.
    RecentBuffer buf(8);
    buf.push(make_instance(0, {0.9}, 0));
    buf.push(make_instance(1, {0.1}, 1));
    buf.push(make_instance(2, {0.5}, 0));
    const auto target = make_unlabeled(3, {0.0});
    const DistanceParams params{std::size_t{1} << 40};

    const Ranking ranking = reorder(buf, target, params);
    REQUIRE(ranking.order.size() == 3);
    CHECK(ranking.order == std::vector<std::size_t>{1, 2, 0});
    CHECK(ranking.distances[0] == doctest::Approx(0.1));
    CHECK(ranking.distances[2] == doctest::Approx(0.9));

    const double objective = ranking_objective(ranking.distances);
    CHECK(objective == doctest::Approx(0.8).epsilon(1e-9));

    std::vector<double> dist(3);
    for (std::size_t i = 0; i < 3; ++i)
        dist[i] = spatio_temporal_distance(target, buf.entry(i), params);
    CHECK(objective == min_objective_by_enumeration(dist));
}

TEST_CASE("reorder: single entry and empty buffer") {
    RecentBuffer buf(4);
    CHECK_THROWS_AS(reorder(buf, make_unlabeled(0, {1.0}), DistanceParams{4}),
                    std::logic_error);
    buf.push(make_instance(0, {1.0}, 0));
    const Ranking ranking = reorder(buf, make_unlabeled(1, {1.0}), DistanceParams{4});
    CHECK(ranking.order == std::vector<std::size_t>{0});
    CHECK(ranking_objective(ranking.distances) == 0.0);
}

TEST_CASE("reorder: equal distances rank the more recent entry first") {
    // Spatial term 1 - lag/256 against time term lag/256: every total
    // distance is exactly 1.0, a genuine tie.
    RecentBuffer buf(8);
    for (std::size_t t = 0; t < 4; ++t) {
        const double lag = static_cast<double>(4 - t);
        buf.push(make_instance(t, {lag / 256.0}, 0));
    }
    const Ranking ranking = reorder(buf, make_unlabeled(4, {1.0}), DistanceParams{256});
    for (double d : ranking.distances) CHECK(d == 1.0);
    CHECK(ranking.order == std::vector<std::size_t>{3, 2, 1, 0});
    CHECK(ranking_objective(ranking.distances) == 0.0);
}

TEST_CASE("ascending sort attains the enumeration minimum for every small buffer") {
    // Features on a dyadic grid and a power-of-two horizon keep every
    // distance, difference and partial sum exact, so the equality is
    // bitwise.
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 6;  // 2..7
        RecentBuffer buf(8);
        for (std::size_t t = 0; t < n; ++t) {
            const double g = static_cast<double>(rng() % (4u << 20)) / double(1 << 20);
            buf.push(make_instance(t, {g}, 0));
        }
        const auto target = make_unlabeled(n, {0.0});
        const DistanceParams params{256};

        std::vector<double> dist;
        for (std::size_t i = 0; i < n; ++i)
            dist.push_back(spatio_temporal_distance(target, buf.entry(i), params));

        const Ranking ranking = reorder(buf, target, params);
        CHECK(ranking_objective(ranking.distances) == min_objective_by_enumeration(dist));
    }
}

TEST_CASE("reorder comparison count is exactly n(n-1)/2 and scales quadratically") {
    auto comparisons_for = [](std::size_t n) {
        RecentBuffer buf(n);
        std::mt19937_64 rng(n);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (std::size_t t = 0; t < n; ++t)
            buf.push(make_instance(t, {unif(rng), unif(rng)}, 0));
        std::uint64_t count = 0;
        reorder(buf, make_unlabeled(n, {0.0, 0.0}), DistanceParams{n}, &count);
        return count;
    };
    const auto c100 = comparisons_for(100);
    const auto c200 = comparisons_for(200);
    CHECK(c100 == 100 * 99 / 2);
    CHECK(c200 == 200 * 199 / 2);
    const double ratio = static_cast<double>(c200) / static_cast<double>(c100);
    CHECK(ratio > 2.5);
    CHECK(ratio < 6.0);
}

TEST_CASE("window search: stops at the first window whose trial error beats eps") {
    // One entry, k=1: training the most similar instance classifies the
    // most recent (same) instance correctly -> b = 1 right away.
    RecentBuffer buf(8);
    buf.push(make_instance(0, {1.0}, 3));
    const auto target = make_unlabeled(1, {1.0});
    const Ranking ranking = reorder(buf, target, DistanceParams{8});

    MajorityClass learner;
    SisConfig cfg{8, 1, 2, 0.1, 2};  // l = 1, so the search may stop at i = 1
    CHECK(optimal_window_train(learner, buf, ranking, cfg) == 1);
    CHECK(learner.predict_one(buf.entry(0)) == 3);
}

TEST_CASE("window search: eps = 0 with a hopeless trial set exhausts the budget") {
    // Alternating labels make a majority learner miss one of the two
    // trial instances, so error is never < 0.
    RecentBuffer buf(16);
    for (std::size_t t = 0; t < 10; ++t)
        buf.push(make_instance(t, {static_cast<double>(t)}, static_cast<int>(t % 2)));
    const auto target = make_unlabeled(10, {10.0});
    const Ranking ranking = reorder(buf, target, DistanceParams{16});

    RecordingLearner learner;
    SisConfig cfg{16, 2, 3, 0.0, 4};  // b=4, r=3 -> u=7
    const std::size_t b = optimal_window_train(learner, buf, ranking, cfg);
    CHECK(b == 4);                    // unchanged
    CHECK(learner.learned.size() == 7);  // trained exactly min(u, n)
}

TEST_CASE("window search: never trains past u nor evaluates outside [l, u]") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> label(0, 2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng() % 12);
        RecentBuffer buf(12);
        for (std::size_t t = 0; t < n; ++t)
            buf.push(make_instance(t, {unif(rng)}, label(rng)));
        const auto target = make_unlabeled(n, {unif(rng)});
        const Ranking ranking = reorder(buf, target, DistanceParams{12});

        SisConfig cfg{12, 1 + rng() % 3, 1 + rng() % 3, 0.25, 1 + rng() % 12};
        const std::size_t lower = cfg.prev_best_b > cfg.radius_r ? cfg.prev_best_b - cfg.radius_r : 1;
        const std::size_t upper = std::min(n, cfg.prev_best_b + cfg.radius_r);

        RecordingLearner learner;
        optimal_window_train(learner, buf, ranking, cfg);
        CHECK(learner.learned.size() <= std::min(upper, buf.capacity()));
        const std::size_t eval_budget =
            upper >= lower ? (upper - lower + 1) * std::min(cfg.trial_k, n) : 0;
        CHECK(learner.predict_calls <= eval_budget);
    }
}

TEST_CASE("window search matches the brute-force prefix oracle") {
    // Oracle: train a fresh learner on ranking-order prefixes of length
    // l..u and take the smallest prefix whose trial error beats eps.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::uniform_int_distribution<int> label(0, 1);

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 12;
        RecentBuffer buf(n);
        for (std::size_t t = 0; t < n; ++t)
            buf.push(make_instance(t, {unif(rng)}, label(rng)));
        const auto target = make_unlabeled(n, {unif(rng)});
        const Ranking ranking = reorder(buf, target, DistanceParams{n});

        SisConfig cfg{n, 2, 2, 0.3, 4};
        const std::size_t lower = cfg.prev_best_b - cfg.radius_r;
        const std::size_t upper = std::min(n, cfg.prev_best_b + cfg.radius_r);

        std::size_t oracle_b = cfg.prev_best_b;
        for (std::size_t len = lower; len <= upper; ++len) {
            MajorityClass fresh;
            for (std::size_t i = 0; i < len; ++i)
                fresh.learn_one(buf.entry(ranking.order[i]));
            std::size_t wrong = 0;
            for (std::size_t j = 0; j < cfg.trial_k; ++j) {
                const Instance& t = buf.entry(n - 1 - j);
                wrong += fresh.predict_one(t) != *t.label;
            }
            if (static_cast<double>(wrong) / static_cast<double>(cfg.trial_k) <
                cfg.error_threshold_eps) {
                oracle_b = len;
                break;
            }
        }

        MajorityClass learner;
        CHECK(optimal_window_train(learner, buf, ranking, cfg) == oracle_b);
    }
}

TEST_CASE("train step: cold start buffers the target without training") {
    SisEngine engine(SisConfig{});
    RecordingLearner learner;
    engine.train_step(learner, make_instance(0, {1.0, 2.0}, 1));
    CHECK(learner.resets == 1);
    CHECK(learner.learned.empty());
    CHECK(engine.buffer().size() == 1);
}

TEST_CASE("train step: training set is a ranking-order subset of the buffer") {
    SisEngine engine(SisConfig{32, 1, 4, 0.1, 0});
    RecordingLearner learner;
    const auto stream = separable_stream(200, 21, 0, 10);
    for (const auto& raw : stream) {
        std::vector<Instance> snapshot(engine.buffer().entries().begin(),
                                       engine.buffer().entries().end());

        engine.train_step(learner, raw);

        CHECK(learner.learned.size() <=
              std::min(engine.prev_best_b() + 4, engine.buffer().capacity()));
        // Each trained instance is a buffer entry, trained at most once,
        // and the sequence follows non-decreasing distance to the target.
        double previous = -1.0;
        std::vector<bool> used(snapshot.size(), false);
        for (std::size_t t : learner.learned) {
            std::size_t pos = snapshot.size();
            for (std::size_t i = 0; i < snapshot.size(); ++i)
                if (snapshot[i].time_index == t) pos = i;
            REQUIRE(pos < snapshot.size());
            CHECK_FALSE(used[pos]);
            used[pos] = true;
            const double d = spatio_temporal_distance(raw, snapshot[pos], DistanceParams{32});
            CHECK(d >= previous);
            previous = d;
        }

        CHECK(engine.prev_best_b() >= 1);
        CHECK(engine.prev_best_b() <= engine.config().capacity_n);
    }
}

TEST_CASE("train step: b settles small on a steady separable stream") {
    SisEngine engine(SisConfig{});
    HoeffdingTree learner;  // stays a leaf under per-step resets
    const auto stream = separable_stream(400, 5, 0, 25);
    RunningScaler scaler;
    for (const auto& raw : stream) {
        scaler.update(raw);
        engine.train_step(learner, scaler.transform(raw));
    }
    CHECK(engine.prev_best_b() <= 5);
}

TEST_CASE("train step: reset makes the learner depend only on buffer and target") {
    const auto stream = separable_stream(120, 8, 0, 10);

    // Same buffer contents, two different pre-step learner states.
    SisEngine e1(SisConfig{64, 1, 5, 0.1, 0});
    SisEngine e2(SisConfig{64, 1, 5, 0.1, 0});
    HoeffdingTree warm;   // gets polluted before the run
    HoeffdingTree cold;
    for (int i = 0; i < 50; ++i)
        warm.learn_one(make_instance(1000 + i, {9.0, 9.0}, 1));

    for (const auto& raw : stream) {
        e1.train_step(warm, raw);
        e2.train_step(cold, raw);
    }
    for (const auto& probe : separable_stream(50, 123, 0, 10))
        CHECK(warm.predict_one(probe) == cold.predict_one(probe));
}

TEST_CASE("sis config validation") {
    CHECK_THROWS_AS(SisEngine(SisConfig{0, 1, 10, 0.1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(SisEngine(SisConfig{8, 9, 10, 0.1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(SisEngine(SisConfig{8, 1, 10, 1.5, 0}), std::invalid_argument);
    CHECK_THROWS_AS(SisEngine(SisConfig{8, 1, 10, 0.1, 9}), std::invalid_argument);
    CHECK(initial_best_b(SisConfig{200, 1, 10, 0.1, 0}) == 10);
    CHECK(initial_best_b(SisConfig{4, 1, 10, 0.1, 0}) == 4);
}
