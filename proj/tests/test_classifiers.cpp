#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "eaco/classifiers.hpp"

using namespace eaco;

namespace {

std::vector<TourRecord> records(const std::vector<length_t> &lengths) {
    std::vector<TourRecord> out;
    for (auto l : lengths) {
        out.push_back({{}, l, false});
    }
    return out;
}

std::vector<std::size_t> indices_where(const std::vector<TourRecord> &t, bool elite) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k].elite == elite) out.push_back(k);
    }
    return out;
}

template <class T>
double mr(const std::vector<T> &v) {
    return (static_cast<double>(*std::min_element(v.begin(), v.end())) +
            static_cast<double>(*std::max_element(v.begin(), v.end()))) / 2.0;
}

} // namespace

TEST(MidRange, Examples) {
    EXPECT_EQ(mid_range(std::span<const length_t>(std::vector<length_t>{10, 20, 30})).value, 20.0);
    EXPECT_EQ(mid_range(std::span<const length_t>(std::vector<length_t>{10, 11, 100})).value, 55.0);
    EXPECT_EQ(mid_range(std::span<const length_t>(std::vector<length_t>{7})).value, 7.0);
    EXPECT_THROW(mid_range(std::span<const length_t>()), std::invalid_argument);
}

TEST(Mean, Examples) {
    EXPECT_NEAR(mean(std::span<const length_t>(std::vector<length_t>{10, 11, 19})).value, 40.0 / 3.0, 1e-9);
    EXPECT_EQ(mean(std::span<const length_t>(std::vector<length_t>(9, 42))).value, 42.0);
    EXPECT_EQ(mean(std::span<const double>(std::vector<double>{1.5, 2.5})).value, 2.0);
    EXPECT_THROW(mean(std::span<const length_t>()), std::invalid_argument);
}

TEST(Median, Examples) {
    EXPECT_EQ(median(std::span<const length_t>(std::vector<length_t>{7, 3, 9})).value, 7.0);
    EXPECT_EQ(median(std::span<const length_t>(std::vector<length_t>{4, 1, 3, 2})).value, 2.0);
    EXPECT_EQ(median(std::span<const length_t>(std::vector<length_t>{4, 1, 3, 2}), MedianConvention::average).value,
              2.5);
    EXPECT_THROW(median(std::span<const length_t>()), std::invalid_argument);
}

TEST(Median, MatchesSortAndIndexOracle) {
    std::mt19937_64 gen(101);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = trial == 0 ? 101 : 1 + gen() % 200;
        std::vector<length_t> v(n);
        for (auto &x : v) x = static_cast<length_t>(gen() % 50);
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t pos = n % 2 ? (n + 1) / 2 : n / 2; // 1-based
        EXPECT_EQ(median(std::span<const length_t>(v)).value, static_cast<double>(sorted[pos - 1]));
    }
}

TEST(Threshold, OrderingAndScaleEquivariance) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + gen() % 50;
        std::vector<length_t> v(n);
        for (auto &x : v) x = 1 + static_cast<length_t>(gen() % 1000);
        const double lo = static_cast<double>(*std::min_element(v.begin(), v.end()));
        const double hi = static_cast<double>(*std::max_element(v.begin(), v.end()));
        const length_t c = 1 + static_cast<length_t>(gen() % 7);
        std::vector<length_t> scaled(v);
        for (auto &x : scaled) x *= c;
        for (ThresholdKind k : {ThresholdKind::mrts, ThresholdKind::mts, ThresholdKind::mets}) {
            const Threshold t = compute_threshold(k, std::span<const length_t>(v));
            EXPECT_EQ(t.kind, k);
            EXPECT_LE(lo, t.value);
            EXPECT_LE(t.value, hi);
            const Threshold ts = compute_threshold(k, std::span<const length_t>(scaled));
            EXPECT_NEAR(ts.value, static_cast<double>(c) * t.value, 1e-9 * ts.value);
            auto a = records(v);
            auto b = records(scaled);
            classify(a, t);
            classify(b, ts);
            EXPECT_EQ(indices_where(a, true), indices_where(b, true));
        }
        EXPECT_EQ(mid_range(std::span<const length_t>(v)).value, mr(v));
    }
}

TEST(Classify, Examples) {
    auto two = records({10, 20});
    const Partition p = classify(two, Threshold{ThresholdKind::mrts, 15.0});
    EXPECT_EQ(p.elite, std::vector<std::size_t>{0});
    EXPECT_EQ(p.non_elite, std::vector<std::size_t>{1});
    EXPECT_TRUE(two[0].elite);
    EXPECT_FALSE(two[1].elite);

    auto five = records({5, 6, 7, 8, 9});
    const Partition q = classify(five, Threshold{ThresholdKind::mts, 7.0});
    EXPECT_EQ(q.elite, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(q.non_elite, (std::vector<std::size_t>{2, 3, 4}));
    EXPECT_FALSE(q.fallback);
}

TEST(Classify, AllEqualFallsBackToLowestIndex) {
    auto same = records({12, 12, 12, 12});
    const Partition p = classify(same, Threshold{ThresholdKind::mts, 12.0});
    EXPECT_TRUE(p.fallback);
    EXPECT_EQ(p.elite, std::vector<std::size_t>{0});
    EXPECT_EQ(p.non_elite, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(Classify, FallbackPicksIterationBest) {
    // A threshold below every length (not produced by the statistics, but legal input).
    auto t = records({30, 20, 20, 40});
    const Partition p = classify(t, Threshold{ThresholdKind::mts, 5.0});
    EXPECT_TRUE(p.fallback);
    EXPECT_EQ(p.elite, std::vector<std::size_t>{1});
}

TEST(Classify, InclusiveBoundary) {
    auto five = records({5, 6, 7, 8, 9});
    const Partition q = classify(five, Threshold{ThresholdKind::mts, 7.0}, Boundary::inclusive);
    EXPECT_EQ(q.elite, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Classify, PartitionInvariants) {
    std::mt19937_64 gen(55);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t m = 1 + gen() % 40;
        std::vector<length_t> v(m);
        for (auto &x : v) x = 100 + static_cast<length_t>(gen() % 20);
        for (ThresholdKind k : {ThresholdKind::mrts, ThresholdKind::mts, ThresholdKind::mets}) {
            auto t = records(v);
            const Threshold th = compute_threshold(k, std::span<const length_t>(v));
            const Partition p = classify(t, th);
            ASSERT_GE(p.elite.size(), 1u);
            ASSERT_LE(p.elite.size(), m);
            ASSERT_EQ(p.elite.size() + p.non_elite.size(), m);
            std::vector<std::size_t> all(p.elite);
            all.insert(all.end(), p.non_elite.begin(), p.non_elite.end());
            std::sort(all.begin(), all.end());
            for (std::size_t k2 = 0; k2 < m; ++k2) ASSERT_EQ(all[k2], k2);
            if (!p.fallback) {
                for (auto e : p.elite) ASSERT_LT(static_cast<double>(v[e]), th.value);
                for (auto e : p.non_elite) ASSERT_GE(static_cast<double>(v[e]), th.value);
            }
        }
    }
}

TEST(Classify, StrictMedianNeverElectsHalf) {
    // With the lower-middle median and a strict boundary at most ceil(m/2) - 1 ants qualify.
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + gen() % 30;
        std::vector<length_t> v(m);
        for (auto &x : v) x = static_cast<length_t>(gen() % 1000);
        auto t = records(v);
        const Partition p = classify(t, median(std::span<const length_t>(v)));
        ASSERT_LE(p.elite.size(), std::max<std::size_t>(1, (m + 1) / 2 - 1));
    }
}

TEST(ThresholdKind, Names) {
    for (ThresholdKind k : {ThresholdKind::mrts, ThresholdKind::mts, ThresholdKind::mets}) {
        EXPECT_EQ(parse_threshold_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_threshold_kind("mode"), ConfigError);
}
