#pragma once

// Pheromone update rules: evaporation, the Ant System deposit, static
// elitist and rank-based reinforcement, the MAX-MIN rules (bounds,
// branching factor, trail smoothing), the dynamic second reinforcement and
// the punishment of non-performing tours.

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eaco/classifiers.hpp"
#include "eaco/colony.hpp"

namespace eaco {

/// Where the dynamic elitist bonus lands.
enum class EliteDepositTarget {
    own_tour,    // each elite ant reinforces its own tour with e*Q/L_k
    best_so_far, // the best-so-far tour gains e*Q/L*
};

/// How the rank index k of a punished ant is counted.
enum class PunishRankScope {
    all_ants,  // k is the overall rank among all m ants
    non_elite, // k is the rank within the non-performing ants
};

struct MmasSettings {
    double lambda = 0.05;             // branching-factor cut
    double smoothing_delta = 0.5;     // PTS fraction
    double smoothing_trigger = 1.1;   // smooth when the average branching factor drops below this
    std::size_t smoothing_cooldown = 0;   // minimum iterations between two smoothings
};

struct UpdatePlan {
    Variant variant = Variant::dea;
    std::optional<ThresholdKind> classifier; // dynamic variants only
    std::size_t sigma = 6;                   // static RA elite count
    std::size_t e_static = 6;                // static EA elitist-ant count
    Boundary boundary = Boundary::strict;
    MedianConvention median_convention = MedianConvention::lower_middle;
    EliteDepositTarget elite_target = EliteDepositTarget::own_tour;
    PunishRankScope punish_scope = PunishRankScope::all_ants;
    MmasSettings mmas;

    void validate(const Params &params) const {
        if (is_dynamic(variant) != classifier.has_value()) {
            throw ConfigError(is_dynamic(variant) ? "dynamic variant needs a classifier"
                                                  : "classifier only applies to dynamic variants");
        }
        if (variant == Variant::ra && (sigma < 1 || sigma > params.num_ants)) {
            throw ConfigError("sigma must lie in [1, num_ants] (sigma = " + std::to_string(sigma) +
                              ", m = " + std::to_string(params.num_ants) + ")");
        }
        if (variant == Variant::mmas_ib_pts) {
            if (!(mmas.lambda > 0.0 && mmas.lambda < 1.0)) {
                throw ConfigError("lambda must lie in (0, 1)");
            }
            if (!(mmas.smoothing_delta > 0.0 && mmas.smoothing_delta <= 1.0)) {
                throw ConfigError("smoothing delta must lie in (0, 1]");
            }
        }
    }
};

/// Adds `amount` to every edge of the closed tour `perm` (negative amounts subtract, clamped at the floor).
inline void deposit_on_tour(PheromoneField &tau, std::span<const city_t> perm, double amount) {
    for (std::size_t k = 0; k < perm.size(); ++k) {
        tau.add(perm[k], perm[(k + 1) % perm.size()], amount);
    }
}

/// tau <- rho * tau, clamped at the active lower limit.
inline void evaporate(PheromoneField &tau, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) {
        throw ConfigError("rho must lie in (0, 1]");
    }
    if (rho == 1.0) {
        return;
    }
    const std::size_t n = tau.size();
    const double lo = tau.lower_limit();
    auto raw = tau.raw();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                raw[i * n + j] = std::max(raw[i * n + j] * rho, lo);
            }
        }
    }
}

/// Every ant k adds Q / L_k to the edges of its tour.
inline void as_deposit(PheromoneField &tau, std::span<const TourRecord> tours, double q) {
    for (const auto &t : tours) {
        deposit_on_tour(tau, t.perm, q / static_cast<double>(t.length));
    }
}

/// Best-so-far edges gain e * Q / L*.
inline void elitist_bonus_static(PheromoneField &tau, const TourRecord &best_so_far, std::size_t e, double q) {
    if (e == 0) {
        return;
    }
    deposit_on_tour(tau, best_so_far.perm, static_cast<double>(e) * q / static_cast<double>(best_so_far.length));
}

namespace detail {

/// Indices of `tours` sorted by ascending length; ties keep index order.
inline std::vector<std::size_t> rank_order(std::span<const TourRecord> tours) {
    std::vector<std::size_t> order(tours.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return tours[a].length < tours[b].length; });
    return order;
}

/// The mu-th best (mu = 1..sigma-1) deposits (sigma - mu) Q / L_mu; best-so-far gains sigma Q / L*.
inline void ranked_deposit(PheromoneField &tau, std::span<const TourRecord> tours,
                           std::span<const std::size_t> order, std::size_t sigma, double q,
                           const TourRecord &best_so_far) {
    for (std::size_t mu = 1; mu < sigma; ++mu) {
        const TourRecord &t = tours[order[mu - 1]];
        deposit_on_tour(tau, t.perm, static_cast<double>(sigma - mu) * q / static_cast<double>(t.length));
    }
    deposit_on_tour(tau, best_so_far.perm,
                    static_cast<double>(sigma) * q / static_cast<double>(best_so_far.length));
}

} // namespace detail

/// Static rank-based update over the sigma best tours of the iteration.
inline void rank_update_static(PheromoneField &tau, std::span<const TourRecord> tours, std::size_t sigma, double q,
                               const TourRecord &best_so_far) {
    if (sigma < 1 || sigma > tours.size()) {
        throw ConfigError("sigma must lie in [1, m]");
    }
    const auto order = detail::rank_order(tours);
    detail::ranked_deposit(tau, tours, order, sigma, q, best_so_far);
}

/// Iteration-best edges gain 1 / L_ib, then every trail is clamped into [tau_min, tau_max].
/// Evaporation is the caller's job.
inline void mmas_update(PheromoneField &tau, const TourRecord &iteration_best) {
    if (!tau.bounds()) {
        throw ConfigError("mmas_update needs active trail bounds");
    }
    deposit_on_tour(tau, iteration_best.perm, 1.0 / static_cast<double>(iteration_best.length));
    tau.clamp();
}

/// Number of edges leaving `node` whose trail exceeds min + lambda * (max - min),
/// with min/max over that node's edges. A node whose edges all carry the same
/// trail reports 1.
inline std::size_t branching_factor(const PheromoneField &tau, city_t node, double lambda) {
    const std::size_t n = tau.size();
    if (node >= n) {
        throw std::out_of_range("node out of range");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (city_t j = 0; j < n; ++j) {
        if (j != node) {
            lo = std::min(lo, tau(node, j));
            hi = std::max(hi, tau(node, j));
        }
    }
    if (hi == lo) {
        return 1;
    }
    const double cut = lo + lambda * (hi - lo);
    std::size_t count = 0;
    for (city_t j = 0; j < n; ++j) {
        if (j != node && tau(node, j) > cut) {
            ++count;
        }
    }
    return count;
}

namespace detail {

inline bool all_trails_equal(const PheromoneField &tau, city_t node) {
    const city_t first = node == 0 ? 1 : 0;
    for (city_t j = 0; j < tau.size(); ++j) {
        if (j != node && tau(node, j) != tau(node, first)) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Mean branching factor per node, halved because every undirected edge is seen
/// from both endpoints: a colony that has settled on one tour reads about 1.
/// A node whose edges all carry the same trail contributes 1.
inline double average_branching_factor(const PheromoneField &tau, double lambda) {
    const std::size_t n = tau.size();
    double total = 0.0;
    for (city_t i = 0; i < n; ++i) {
        total += detail::all_trails_equal(tau, i) ? 1.0
                                                  : static_cast<double>(branching_factor(tau, i, lambda)) / 2.0;
    }
    return total / static_cast<double>(n);
}

/// tau <- tau + delta * (tau_max - tau) on every edge.
inline void smooth_trails(PheromoneField &tau, double delta) {
    if (!tau.bounds()) {
        throw ConfigError("trail smoothing needs active trail bounds");
    }
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw ConfigError("smoothing delta must lie in (0, 1]");
    }
    const double tau_max = tau.bounds()->max;
    const std::size_t n = tau.size();
    auto raw = tau.raw();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                raw[i * n + j] += delta * (tau_max - raw[i * n + j]);
            }
        }
    }
}

/// Second reinforcement of the dynamic elitist variant. With e = |elite|,
/// each elite ant adds e * Q / L_k to its own tour (or, with
/// EliteDepositTarget::best_so_far, the best-so-far tour gains e * Q / L*).
inline void dynamic_elitist_update(PheromoneField &tau, std::span<const TourRecord> elite, double q,
                                   EliteDepositTarget target = EliteDepositTarget::own_tour,
                                   const TourRecord *best_so_far = nullptr) {
    if (elite.empty()) {
        throw InvariantError("dynamic elitist update with an empty elite class");
    }
    const double e = static_cast<double>(elite.size());
    if (target == EliteDepositTarget::best_so_far) {
        if (best_so_far == nullptr) {
            throw std::invalid_argument("best-so-far target needs a best-so-far tour");
        }
        deposit_on_tour(tau, best_so_far->perm, e * q / static_cast<double>(best_so_far->length));
        return;
    }
    for (const auto &t : elite) {
        deposit_on_tour(tau, t.perm, e * q / static_cast<double>(t.length));
    }
}

/// Second reinforcement of the dynamic rank variant: rank-based update with sigma = |elite|.
inline void dynamic_rank_update(PheromoneField &tau, std::span<const TourRecord> elite, double q,
                                const TourRecord &best_so_far) {
    if (elite.empty()) {
        throw InvariantError("dynamic rank update with an empty elite class");
    }
    const auto order = detail::rank_order(elite);
    detail::ranked_deposit(tau, elite, order, elite.size(), q, best_so_far);
}

/// Each non-performing ant removes e * Q* / L_k from its tour (floored).
inline void punish_elitist(PheromoneField &tau, std::span<const TourRecord> non_elite, std::size_t e,
                           double q_star) {
    if (q_star < 0.0) {
        throw ConfigError("Q* must be non-negative");
    }
    for (const auto &t : non_elite) {
        deposit_on_tour(tau, t.perm, -static_cast<double>(e) * q_star / static_cast<double>(t.length));
    }
}

/// Non-performing ant at rank k (ascending length, 1-based) removes
/// Q* * (m - k) / L_k from its tour. Elite membership comes from TourRecord::elite.
inline void punish_rank(PheromoneField &tau, std::span<const TourRecord> tours, double q_star,
                        PunishRankScope scope = PunishRankScope::all_ants) {
    if (q_star < 0.0) {
        throw ConfigError("Q* must be non-negative");
    }
    const std::size_t m = tours.size();
    const auto order = detail::rank_order(tours);
    std::size_t k = 0;
    for (std::size_t pos = 0; pos < m; ++pos) {
        const TourRecord &t = tours[order[pos]];
        if (scope == PunishRankScope::all_ants) {
            k = pos + 1;
        } else if (!t.elite) {
            ++k;
        }
        if (t.elite) {
            continue;
        }
        const double weight = static_cast<double>(m - k);
        deposit_on_tour(tau, t.perm, -q_star * weight / static_cast<double>(t.length));
    }
}

} // namespace eaco
