#include <limits>
#include <map>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "eaco/engine.hpp"

using namespace eaco;

namespace {

std::shared_ptr<const Instance> bundled(const std::string &name) {
    static std::map<std::string, std::shared_ptr<const Instance>> cache;
    auto &slot = cache[name];
    if (!slot) {
        slot = std::make_shared<Instance>(load_instance(std::string(EACO_DATA_DIR) + "/tsplib/" + name + ".tsp"));
    }
    return slot;
}

RunConfig config(const std::string &name, Variant v, std::optional<ThresholdKind> k, std::size_t iters,
                 std::uint64_t seed = 1) {
    RunConfig c;
    c.instance = bundled(name);
    c.params.num_ants = default_ant_count(name, c.instance->dimension());
    c.params.max_iterations = iters;
    c.plan.variant = v;
    c.plan.classifier = k;
    c.seed = seed;
    return c;
}

} // namespace

TEST(DefaultAnts, TableCounts) {
    EXPECT_EQ(default_ant_count("bays29", 29), 10u);
    EXPECT_EQ(default_ant_count("st70", 70), 10u);
    EXPECT_EQ(default_ant_count("eil51", 51), 20u);
    EXPECT_EQ(default_ant_count("kroA100", 100), 20u);
    EXPECT_EQ(default_ant_count("lin318", 318), 30u);
    EXPECT_EQ(default_ant_count("other", 30), 10u);
    EXPECT_EQ(default_ant_count("other", 442), 40u);
    EXPECT_EQ(default_ant_count("other", 1002), 100u);
}

TEST(RunConfig, ValidationBeforeFirstIteration) {
    auto c = config("bays29", Variant::dea, std::nullopt, 10);
    EXPECT_THROW(run(c), ConfigError);
    c = config("bays29", Variant::as, ThresholdKind::mts, 10);
    EXPECT_THROW(run(c), ConfigError);
    c = config("bays29", Variant::mmas_ib_pts, std::nullopt, 10);
    c.params.rho = 1.0;
    EXPECT_THROW(run(c), ConfigError);
    c = config("bays29", Variant::ra, std::nullopt, 10);
    c.plan.sigma = 11;
    EXPECT_THROW(run(c), ConfigError);
    RunConfig empty;
    EXPECT_THROW(run(empty), ConfigError);
}

TEST(Run, SingleIteration) {
    const auto r = run(config("bays29", Variant::dea, ThresholdKind::mts, 1));
    ASSERT_EQ(r.trace.size(), 1u);
    EXPECT_EQ(r.iterations, 1u);
    EXPECT_EQ(r.trace[0].index, 1u);
    EXPECT_EQ(r.cause, Termination::max_iterations);
}

TEST(Run, InvariantsForEveryVariant) {
    for (Variant v : {Variant::as, Variant::ea, Variant::ra, Variant::mmas_ib_pts, Variant::dea, Variant::dra,
                      Variant::dea_pun, Variant::dra_pun}) {
        for (ThresholdKind k : {ThresholdKind::mrts, ThresholdKind::mts, ThresholdKind::mets}) {
            if (!is_dynamic(v) && k != ThresholdKind::mrts) continue;
            const auto c = config("st70", v, is_dynamic(v) ? std::optional(k) : std::nullopt, 300, 5);
            const auto r = run(c);
            length_t best = std::numeric_limits<length_t>::max();
            for (std::size_t i = 0; i < r.trace.size(); ++i) {
                const auto &s = r.trace[i];
                ASSERT_EQ(s.index, i + 1);
                ASSERT_GE(s.elite_count, 1u);
                ASSERT_LE(s.elite_count, c.params.num_ants);
                ASSERT_LE(s.best_so_far, s.best_length);
                if (i > 0) {
                    ASSERT_LE(s.best_so_far, r.trace[i - 1].best_so_far);
                }
                ASSERT_EQ(s.threshold.has_value(), is_dynamic(v));
                ASSERT_EQ(s.branching.has_value(), v == Variant::mmas_ib_pts);
                best = std::min(best, s.best_length);
            }
            EXPECT_EQ(r.best.length, best);
            EXPECT_EQ(r.best.length, r.trace.back().best_so_far);
            EXPECT_EQ(tour_length(*c.instance, r.best.perm), r.best.length);
        }
    }
}

TEST(Run, MmasFieldStaysWithinBounds) {
    auto c = config("bays29", Variant::mmas_ib_pts, std::nullopt, 1);
    Colony colony(c);
    for (int it = 0; it < 400; ++it) {
        colony.run_iteration();
        const auto &tau = colony.pheromone();
        const auto b = *tau.bounds();
        for (city_t i = 0; i < tau.size(); ++i) {
            for (city_t j = 0; j < tau.size(); ++j) {
                if (i != j) {
                    ASSERT_GE(tau(i, j), b.min);
                    ASSERT_LE(tau(i, j), b.max);
                }
            }
        }
    }
}

TEST(Run, PunishedFieldStaysAboveFloor) {
    for (Variant v : {Variant::dea_pun, Variant::dra_pun}) {
        Colony colony(config("bays29", v, ThresholdKind::mrts, 1, 3));
        for (int it = 0; it < 300; ++it) {
            colony.run_iteration();
            const auto &tau = colony.pheromone();
            for (city_t i = 0; i < tau.size(); ++i) {
                for (city_t j = 0; j < tau.size(); ++j) {
                    if (i != j) {
                        ASSERT_GE(tau(i, j), tau.floor_epsilon());
                    }
                }
            }
        }
    }
}

TEST(Run, DeterministicTraces) {
    const auto c = config("bays29", Variant::dea, ThresholdKind::mts, 100, 99);
    const auto a = run(c);
    const auto b = run(c);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.best.perm, b.best.perm);
    auto other = c;
    other.seed = 100;
    EXPECT_NE(run(other).trace, a.trace);
}

TEST(Run, StopAtOptimum) {
    auto c = config("bays29", Variant::dra, ThresholdKind::mts, 5000, 1);
    c.stop_at_optimum = true;
    c.optimum = 2020;
    const auto r = run(c);
    if (r.best.length <= 2020) {
        EXPECT_EQ(r.cause, Termination::optimum_reached);
        EXPECT_EQ(r.trace.back().best_so_far, 2020);
        EXPECT_LT(r.iterations, 5000u);
    }
    // A target no tour can reach keeps the run going to the budget.
    c.optimum = 1;
    c.params.max_iterations = 200;
    const auto full = run(c);
    EXPECT_EQ(full.iterations, 200u);
    EXPECT_EQ(full.cause, Termination::max_iterations);
}

TEST(Run, EliteCountVariesOverWindow) {
    for (Variant v : {Variant::dea, Variant::dra, Variant::dea_pun, Variant::dra_pun}) {
        for (ThresholdKind k : {ThresholdKind::mrts, ThresholdKind::mts, ThresholdKind::mets}) {
            const auto r = run(config("st70", v, k, 1000, 2));
            std::set<std::size_t> distinct;
            for (const auto &s : r.trace) distinct.insert(s.elite_count);
            EXPECT_GT(distinct.size(), 1u) << to_string(v) << "/" << to_string(k);
        }
    }
}

TEST(Run, Bays29DeaMetsWithinTwoPercent) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto r = run(config("bays29", Variant::dea, ThresholdKind::mets, 5000, seed));
        EXPECT_LE(r.best.length, 2020 * 1.02) << "seed " << seed;
    }
}

TEST(Sweep, OrderAndSeeding) {
    std::vector<RunConfig> cs(10, config("bays29", Variant::dea, ThresholdKind::mts, 30));
    const auto out = sweep(cs, 40, 3);
    ASSERT_EQ(out.size(), 10u);
    for (std::size_t i = 0; i < out.size(); ++i) {
        ASSERT_TRUE(out[i].ok());
        EXPECT_EQ(out[i].result->config.seed, 40 + i);
        auto single = cs[i];
        single.seed = 40 + i;
        EXPECT_EQ(out[i].result->trace, run(single).trace);
    }
}

TEST(Sweep, IdenticalConfigsIdenticalResults) {
    std::vector<RunConfig> cs(4, config("bays29", Variant::dra, ThresholdKind::mets, 40, 7));
    const auto out = sweep(cs, std::nullopt, 4);
    for (const auto &o : out) EXPECT_EQ(o.result->trace, out[0].result->trace);
}

TEST(Sweep, ErrorsStayLocal) {
    std::vector<RunConfig> cs{config("bays29", Variant::dea, ThresholdKind::mts, 10),
                              config("bays29", Variant::dea, std::nullopt, 10),
                              config("bays29", Variant::dra, ThresholdKind::mts, 10)};
    const auto out = sweep(cs);
    EXPECT_TRUE(out[0].ok());
    EXPECT_FALSE(out[1].ok());
    EXPECT_FALSE(out[1].error.empty());
    EXPECT_TRUE(out[2].ok());
    EXPECT_THROW(sweep({}), ConfigError);
}

TEST(Grid, FullRangesGiveHundredConfigs) {
    const auto base = config("bays29", Variant::dea, ThresholdKind::mts, 10);
    const auto grid = param_grid(base, {1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, {0.7, 0.8, 0.9, 1.0});
    ASSERT_EQ(grid.size(), 100u);
    std::set<std::tuple<double, double, double>> points;
    for (const auto &g : grid) {
        points.insert({g.params.alpha, g.params.beta, g.params.rho});
        EXPECT_NO_THROW(g.validate());
    }
    EXPECT_EQ(points.size(), 100u);
}
