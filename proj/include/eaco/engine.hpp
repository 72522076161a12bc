#pragma once

// Run orchestration: one iteration is construct -> classify -> update ->
// record; a run repeats it until the iteration budget or the known optimum is
// reached; a sweep executes many share-nothing runs on a thread pool.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "eaco/classifiers.hpp"
#include "eaco/colony.hpp"
#include "eaco/tsplib.hpp"
#include "eaco/updaters.hpp"

namespace eaco {

struct RunConfig {
    std::shared_ptr<const Instance> instance;
    Params params;
    UpdatePlan plan;
    std::uint64_t seed = 1;
    bool stop_at_optimum = false;
    std::optional<length_t> optimum;

    void validate() const {
        if (!instance) {
            throw ConfigError("run configuration has no instance");
        }
        params.validate();
        plan.validate(params);
        if (plan.variant == Variant::mmas_ib_pts && params.rho >= 1.0) {
            throw ConfigError("MMAS needs rho < 1");
        }
    }
};

struct IterationStats {
    std::size_t index = 0; // 1-based
    length_t best_length = 0;
    std::optional<double> threshold; // dynamic variants only
    std::size_t elite_count = 0;
    length_t best_so_far = 0;
    std::optional<double> branching; // MMAS only

    bool operator==(const IterationStats &) const = default;
};

enum class Termination { max_iterations, optimum_reached };

inline std::string_view to_string(Termination t) noexcept {
    return t == Termination::max_iterations ? "max_iterations" : "optimum_reached";
}

struct RunResult {
    RunConfig config;
    TourRecord best;
    std::size_t iterations = 0;
    std::vector<IterationStats> trace;
    Termination cause = Termination::max_iterations;
};

/// Ant counts used for the benchmark instances; other instances get
/// max(10, n/10) rounded to a multiple of ten.
inline std::size_t default_ant_count(const std::string &name, std::size_t n) {
    if (name == "bays29" || name == "att48" || name == "st70" || name == "eil76") {
        return 10;
    }
    if (name == "eil51" || name == "kroA100") {
        return 20;
    }
    if (name == "kroA200" || name == "lin318") {
        return 30;
    }
    const std::size_t tenth = (n / 10 + 5) / 10 * 10;
    return std::max<std::size_t>(10, tenth);
}

/// One colony: the pheromone field, the random stream and the best-so-far tour.
class Colony {
public:
    explicit Colony(RunConfig config)
        : config_((config.validate(), std::move(config))), inst_(*config_.instance),
          tau_(init_pheromone(inst_, config_.params, config_.plan.variant)), rng_(config_.seed) {}

    const RunConfig &config() const noexcept { return config_; }
    const PheromoneField &pheromone() const noexcept { return tau_; }
    const std::optional<TourRecord> &best_so_far() const noexcept { return best_; }
    const std::vector<TourRecord> &last_tours() const noexcept { return tours_; }
    std::size_t iteration() const noexcept { return iteration_; }

    IterationStats run_iteration() {
        const Params &p = config_.params;
        const UpdatePlan &plan = config_.plan;
        const std::size_t n = inst_.dimension();
        const std::size_t m = p.num_ants;
        ++iteration_;

        const ChoiceTable choice(tau_, inst_, p);
        tours_.clear();
        tours_.reserve(m);
        for (std::size_t k = 0; k < m; ++k) {
            const auto start = static_cast<city_t>(rng_.index(n));
            tours_.push_back(construct_tour(rng_, start, choice, inst_));
        }

        std::size_t ib = 0;
        for (std::size_t k = 1; k < m; ++k) {
            if (tours_[k].length < tours_[ib].length) {
                ib = k;
            }
        }
        const bool improved = !best_ || tours_[ib].length < best_->length;
        if (improved) {
            best_ = tours_[ib];
            best_->elite = false;
        }

        IterationStats stats;
        stats.index = iteration_;
        stats.best_length = tours_[ib].length;

        switch (plan.variant) {
        case Variant::as:
            evaporate(tau_, p.rho);
            as_deposit(tau_, tours_, p.q_deposit);
            stats.elite_count = m;
            break;
        case Variant::ea:
            evaporate(tau_, p.rho);
            as_deposit(tau_, tours_, p.q_deposit);
            elitist_bonus_static(tau_, *best_, plan.e_static, p.q_deposit);
            stats.elite_count = std::clamp<std::size_t>(plan.e_static, 1, m);
            break;
        case Variant::ra:
            evaporate(tau_, p.rho);
            as_deposit(tau_, tours_, p.q_deposit);
            rank_update_static(tau_, tours_, plan.sigma, p.q_deposit, *best_);
            stats.elite_count = plan.sigma;
            break;
        case Variant::mmas_ib_pts:
            mmas_step(improved, ib, stats);
            break;
        case Variant::dea:
        case Variant::dra:
        case Variant::dea_pun:
        case Variant::dra_pun:
            dynamic_step(stats);
            break;
        }

        stats.best_so_far = best_->length;
        if (stats.elite_count < 1 || stats.elite_count > m) {
            throw InvariantError("elite count " + std::to_string(stats.elite_count) + " outside [1, " +
                                 std::to_string(m) + "] at iteration " + std::to_string(iteration_));
        }
        return stats;
    }

private:
    void mmas_step(bool improved, std::size_t ib, IterationStats &stats) {
        const Params &p = config_.params;
        const MmasSettings &s = config_.plan.mmas;
        if (improved) {
            // Bounds follow the best-so-far tour.
            const double tau_max = 1.0 / ((1.0 - p.rho) * static_cast<double>(best_->length));
            tau_.set_bounds({tau_max / (2.0 * static_cast<double>(inst_.dimension())), tau_max});
        }
        evaporate(tau_, p.rho);
        mmas_update(tau_, tours_[ib]);
        double bf = average_branching_factor(tau_, s.lambda);
        if (bf < s.smoothing_trigger && (!last_smoothing_ || iteration_ - *last_smoothing_ >= s.smoothing_cooldown)) {
            smooth_trails(tau_, s.smoothing_delta);
            last_smoothing_ = iteration_;
            bf = average_branching_factor(tau_, s.lambda);
        }
        stats.branching = bf;
        stats.elite_count = 1;
    }

    void dynamic_step(IterationStats &stats) {
        const Params &p = config_.params;
        const UpdatePlan &plan = config_.plan;
        const auto lengths = lengths_of(tours_);
        const Threshold threshold =
            compute_threshold(*plan.classifier, std::span<const length_t>(lengths), plan.median_convention);
        const Partition part = classify(tours_, threshold, plan.boundary);

        std::vector<TourRecord> elite;
        std::vector<TourRecord> non_elite;
        elite.reserve(part.elite.size());
        non_elite.reserve(part.non_elite.size());
        for (std::size_t k : part.elite) {
            elite.push_back(tours_[k]);
        }
        for (std::size_t k : part.non_elite) {
            non_elite.push_back(tours_[k]);
        }

        evaporate(tau_, p.rho);
        as_deposit(tau_, tours_, p.q_deposit);
        if (is_elitist_family(plan.variant)) {
            dynamic_elitist_update(tau_, elite, p.q_deposit, plan.elite_target, &*best_);
            if (is_punished(plan.variant)) {
                punish_elitist(tau_, non_elite, elite.size(), p.q_punish);
            }
        } else {
            dynamic_rank_update(tau_, elite, p.q_deposit, *best_);
            if (is_punished(plan.variant)) {
                punish_rank(tau_, tours_, p.q_punish, plan.punish_scope);
            }
        }
        stats.threshold = threshold.value;
        stats.elite_count = elite.size();
    }

    RunConfig config_;
    const Instance &inst_;
    PheromoneField tau_;
    Rng rng_;
    std::vector<TourRecord> tours_;
    std::optional<TourRecord> best_;
    std::size_t iteration_ = 0;
    std::optional<std::size_t> last_smoothing_;
};

inline RunResult run(const RunConfig &config) {
    Colony colony(config);
    RunResult result;
    result.config = config;
    result.trace.reserve(config.params.max_iterations);
    while (result.iterations < config.params.max_iterations) {
        result.trace.push_back(colony.run_iteration());
        ++result.iterations;
        const auto &bsf = colony.best_so_far();
        if (result.trace.size() > 1 && result.trace.back().best_so_far > result.trace[result.trace.size() - 2].best_so_far) {
            throw InvariantError("best-so-far length increased");
        }
        if (config.stop_at_optimum && config.optimum && bsf->length <= *config.optimum) {
            result.cause = Termination::optimum_reached;
            break;
        }
    }
    result.best = *colony.best_so_far();
    return result;
}

struct SweepOutcome {
    std::optional<RunResult> result;
    std::string error; // non-empty iff the run failed

    bool ok() const noexcept { return result.has_value(); }
};

/// Runs every configuration on a share-nothing thread pool; results come back
/// in input order. With `seed_base`, run i is seeded seed_base + i. A failing
/// run records its error without affecting the others.
inline std::vector<SweepOutcome> sweep(std::vector<RunConfig> configs, std::optional<std::uint64_t> seed_base = {},
                                       std::size_t threads = 0) {
    if (configs.empty()) {
        throw ConfigError("sweep needs at least one configuration");
    }
    if (seed_base) {
        for (std::size_t i = 0; i < configs.size(); ++i) {
            configs[i].seed = *seed_base + i;
        }
    }
    std::vector<SweepOutcome> out(configs.size());
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                out[i].result = run(configs[i]);
            } catch (const std::exception &e) {
                out[i].error = e.what();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    return out;
}

/// Cartesian grid over alpha, beta and rho around `base`.
inline std::vector<RunConfig> param_grid(const RunConfig &base, const std::vector<double> &alphas,
                                         const std::vector<double> &betas, const std::vector<double> &rhos) {
    std::vector<RunConfig> grid;
    grid.reserve(alphas.size() * betas.size() * rhos.size());
    for (double a : alphas) {
        for (double b : betas) {
            for (double r : rhos) {
                RunConfig c = base;
                c.params.alpha = a;
                c.params.beta = b;
                c.params.rho = r;
                grid.push_back(std::move(c));
            }
        }
    }
    return grid;
}

} // namespace eaco
