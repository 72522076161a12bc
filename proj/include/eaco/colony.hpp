#pragma once

// Solution construction shared by every variant: the seeded random stream,
// the pheromone field, the proportional transition rule and the tour builder.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eaco/tsplib.hpp"

namespace eaco {

/// Raised for invalid parameter combinations before any iteration runs.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an internal invariant (e.g. a strictly positive trail floor) is broken.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class Variant { as, ea, ra, mmas_ib_pts, dea, dra, dea_pun, dra_pun };

inline bool is_dynamic(Variant v) noexcept {
    return v == Variant::dea || v == Variant::dra || v == Variant::dea_pun || v == Variant::dra_pun;
}

inline bool is_punished(Variant v) noexcept { return v == Variant::dea_pun || v == Variant::dra_pun; }

inline bool is_elitist_family(Variant v) noexcept {
    return v == Variant::ea || v == Variant::dea || v == Variant::dea_pun;
}

inline std::string_view to_string(Variant v) noexcept {
    switch (v) {
    case Variant::as: return "as";
    case Variant::ea: return "ea";
    case Variant::ra: return "ra";
    case Variant::mmas_ib_pts: return "mmas";
    case Variant::dea: return "dea";
    case Variant::dra: return "dra";
    case Variant::dea_pun: return "dea-pun";
    case Variant::dra_pun: return "dra-pun";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s) {
    for (Variant v : {Variant::as, Variant::ea, Variant::ra, Variant::mmas_ib_pts, Variant::dea, Variant::dra,
                      Variant::dea_pun, Variant::dra_pun}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw ConfigError("unknown variant '" + std::string(s) + "'");
}

struct Params {
    double alpha = 1.0;
    double beta = 2.0;
    double rho = 0.9;         // trail persistence
    double q_deposit = 100.0; // Q
    double q_punish = 10.0;   // Q*
    std::size_t num_ants = 10;
    std::size_t max_iterations = 5000;
    std::optional<std::size_t> sigma_fixed; // static EA/RA elite count

    static constexpr double max_exponent = 5.0;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= max_exponent)) {
            throw ConfigError("alpha must lie in [0, 5]");
        }
        if (!(beta >= 0.0 && beta <= max_exponent)) {
            throw ConfigError("beta must lie in [0, 5]");
        }
        if (!(rho > 0.0 && rho <= 1.0)) {
            throw ConfigError("rho must lie in (0, 1]");
        }
        if (!(q_deposit > 0.0) || !std::isfinite(q_deposit)) {
            throw ConfigError("Q must be positive");
        }
        if (!(q_punish >= 0.0) || !std::isfinite(q_punish)) {
            throw ConfigError("Q* must be non-negative");
        }
        if (num_ants < 1) {
            throw ConfigError("need at least one ant");
        }
        if (max_iterations < 1) {
            throw ConfigError("max_iterations must be at least 1");
        }
        if (sigma_fixed && (*sigma_fixed < 1 || *sigma_fixed > num_ants)) {
            throw ConfigError("sigma must lie in [1, num_ants]");
        }
    }
};

/// 64-bit Mersenne Twister with platform-independent conversions. The number
/// and order of draws is part of the reproducibility contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n) by rejection.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x = 0;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

private:
    std::mt19937_64 engine_;
};

struct TrailBounds {
    double min = 0.0;
    double max = 0.0;
};

/// Dense symmetric trail matrix. Off-diagonal entries never drop below the
/// active lower limit (floor_epsilon, or tau_min when bounds are set); the
/// diagonal is unused and stays zero.
class PheromoneField {
public:
    static constexpr double default_floor = 1e-7;

    PheromoneField(std::size_t n, double initial, double floor_epsilon = default_floor)
        : n_(n), floor_(floor_epsilon), tau_(n * n, 0.0) {
        if (!(floor_epsilon > 0.0)) {
            throw ConfigError("floor_epsilon must be positive");
        }
        fill(initial);
    }

    std::size_t size() const noexcept { return n_; }
    double floor_epsilon() const noexcept { return floor_; }
    const std::optional<TrailBounds> &bounds() const noexcept { return bounds_; }

    void set_bounds(TrailBounds b) {
        if (!(b.min > 0.0 && b.min <= b.max)) {
            throw ConfigError("trail bounds need 0 < tau_min <= tau_max");
        }
        bounds_ = b;
    }

    void clear_bounds() noexcept { bounds_.reset(); }

    double lower_limit() const noexcept { return bounds_ ? std::max(floor_, bounds_->min) : floor_; }

    double operator()(city_t i, city_t j) const noexcept { return tau_[i * n_ + j]; }

    double at(city_t i, city_t j) const {
        if (i >= n_ || j >= n_) {
            throw std::out_of_range("pheromone index out of range");
        }
        return tau_[i * n_ + j];
    }

    /// Sets both orientations of edge (i, j); clamped to the lower limit.
    void set(city_t i, city_t j, double value) {
        if (i == j) {
            return;
        }
        value = std::max(value, lower_limit());
        tau_[i * n_ + j] = value;
        tau_[j * n_ + i] = value;
    }

    /// Adds `delta` (possibly negative) to both orientations, clamped to the lower limit.
    void add(city_t i, city_t j, double delta) { set(i, j, tau_[i * n_ + j] + delta); }

    void fill(double value) {
        for (city_t i = 0; i < n_; ++i) {
            for (city_t j = i + 1; j < n_; ++j) {
                set(i, j, value);
            }
        }
    }

    /// Clamps every off-diagonal entry into [lower_limit, tau_max].
    void clamp() {
        const double lo = lower_limit();
        const double hi = bounds_ ? bounds_->max : std::numeric_limits<double>::infinity();
        for (city_t i = 0; i < n_; ++i) {
            for (city_t j = i + 1; j < n_; ++j) {
                const double v = std::clamp(tau_[i * n_ + j], lo, hi);
                tau_[i * n_ + j] = v;
                tau_[j * n_ + i] = v;
            }
        }
    }

    /// Row-major n*n view.
    std::span<const double> values() const noexcept { return tau_; }

    /// Raw mutable access for update rules that maintain symmetry themselves.
    std::span<double> raw() noexcept { return tau_; }

private:
    std::size_t n_;
    double floor_;
    std::optional<TrailBounds> bounds_;
    std::vector<double> tau_;
};

struct TourRecord {
    std::vector<city_t> perm;
    length_t length = 0;
    bool elite = false;
};

namespace detail {

inline double edge_weight(double tau, length_t dist, const Params &p) {
    return std::pow(tau, p.alpha) * std::pow(1.0 / static_cast<double>(dist), p.beta);
}

} // namespace detail

/// Probabilities of moving from `current` to each city; zero on visited
/// cities (and on `current` itself), the rest proportional to tau^alpha * eta^beta.
inline std::vector<double> transition_probabilities(city_t current, const std::vector<bool> &visited,
                                                    const PheromoneField &tau, const Instance &inst,
                                                    const Params &params) {
    const std::size_t n = inst.dimension();
    if (current >= n || visited.size() != n || tau.size() != n) {
        throw std::invalid_argument("transition_probabilities: size mismatch");
    }
    std::vector<double> p(n, 0.0);
    double total = 0.0;
    std::size_t feasible = 0;
    for (city_t j = 0; j < n; ++j) {
        if (visited[j] || j == current) {
            continue;
        }
        ++feasible;
        p[j] = detail::edge_weight(tau(current, j), inst(current, j), params);
        total += p[j];
    }
    if (feasible == 0) {
        throw InvariantError("empty feasible neighbourhood");
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw InvariantError("transition weights do not sum to a positive finite value");
    }
    for (double &x : p) {
        x /= total;
    }
    return p;
}

/// tau^alpha * eta^beta for every edge, built once per iteration.
class ChoiceTable {
public:
    ChoiceTable(const PheromoneField &tau, const Instance &inst, const Params &params)
        : n_(inst.dimension()), w_(n_ * n_, 0.0) {
        for (city_t i = 0; i < n_; ++i) {
            for (city_t j = i + 1; j < n_; ++j) {
                const double w = detail::edge_weight(tau(i, j), inst(i, j), params);
                w_[i * n_ + j] = w;
                w_[j * n_ + i] = w;
            }
        }
    }

    std::size_t size() const noexcept { return n_; }
    double operator()(city_t i, city_t j) const noexcept { return w_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<double> w_;
};

/// Builds one closed tour from `start` by roulette-wheel sampling. Consumes
/// exactly n - 1 uniform draws.
inline TourRecord construct_tour(Rng &rng, city_t start, const ChoiceTable &choice, const Instance &inst) {
    const std::size_t n = inst.dimension();
    if (start >= n) {
        throw std::out_of_range("start city out of range");
    }
    TourRecord rec;
    rec.perm.reserve(n);
    rec.perm.push_back(start);
    std::vector<bool> visited(n, false);
    visited[start] = true;
    city_t current = start;
    for (std::size_t step = 1; step < n; ++step) {
        double total = 0.0;
        for (city_t j = 0; j < n; ++j) {
            if (!visited[j]) {
                total += choice(current, j);
            }
        }
        if (!(total > 0.0) || !std::isfinite(total)) {
            throw InvariantError("transition weights do not sum to a positive finite value");
        }
        const double target = rng.uniform() * total;
        double cumulative = 0.0;
        std::optional<city_t> pick;
        std::optional<city_t> last_positive;
        for (city_t j = 0; j < n; ++j) {
            if (visited[j]) {
                continue;
            }
            const double w = choice(current, j);
            if (w > 0.0) {
                last_positive = j;
            }
            cumulative += w;
            if (cumulative > target) {
                pick = j;
                break;
            }
        }
        // Rounding can leave the cumulative sum a hair below the target.
        const city_t next = pick ? *pick : *last_positive;
        visited[next] = true;
        rec.perm.push_back(next);
        current = next;
    }
    rec.length = tour_length(inst, rec.perm);
    return rec;
}

inline TourRecord construct_tour(Rng &rng, city_t start, const PheromoneField &tau, const Instance &inst,
                                 const Params &params) {
    return construct_tour(rng, start, ChoiceTable(tau, inst, params), inst);
}

/// Greedy nearest-neighbour tour length from `start`; ties go to the lowest index.
inline length_t nearest_neighbor_length(const Instance &inst, city_t start) {
    const std::size_t n = inst.dimension();
    if (start >= n) {
        throw std::out_of_range("start city out of range");
    }
    std::vector<bool> visited(n, false);
    visited[start] = true;
    city_t current = start;
    length_t total = 0;
    for (std::size_t step = 1; step < n; ++step) {
        std::optional<city_t> best;
        for (city_t j = 0; j < n; ++j) {
            if (!visited[j] && (!best || inst(current, j) < inst(current, *best))) {
                best = j;
            }
        }
        total += inst(current, *best);
        visited[*best] = true;
        current = *best;
    }
    return total + inst(current, start);
}

/// Initial trails: m / L_nn for the AS family; tau_max = 1 / ((1 - rho) L_nn)
/// with tau_min = tau_max / (2n) and active bounds for MMAS.
inline PheromoneField init_pheromone(const Instance &inst, const Params &params, Variant variant,
                                     double floor_epsilon = PheromoneField::default_floor) {
    const std::size_t n = inst.dimension();
    const double l_nn = static_cast<double>(nearest_neighbor_length(inst, 0));
    if (variant == Variant::mmas_ib_pts) {
        if (params.rho >= 1.0) {
            throw ConfigError("MMAS needs rho < 1 (tau_max = 1 / ((1 - rho) L_nn) is undefined)");
        }
        const double tau_max = 1.0 / ((1.0 - params.rho) * l_nn);
        const double tau_min = tau_max / (2.0 * static_cast<double>(n));
        PheromoneField field(n, tau_max, std::min(floor_epsilon, tau_min));
        field.set_bounds({tau_min, tau_max});
        field.fill(tau_max);
        return field;
    }
    return PheromoneField(n, static_cast<double>(params.num_ants) / l_nn, floor_epsilon);
}

} // namespace eaco
