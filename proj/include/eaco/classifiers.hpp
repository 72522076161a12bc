#pragma once

// Statistical split of an iteration's ants into performing (elite) and
// non-performing classes. The boundary is the mid-range, mean or median of
// the iteration's tour lengths.

#include <algorithm>
#include <concepts>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eaco/colony.hpp"

namespace eaco {

enum class ThresholdKind { mrts, mts, mets };

inline std::string_view to_string(ThresholdKind k) noexcept {
    switch (k) {
    case ThresholdKind::mrts: return "mrts";
    case ThresholdKind::mts: return "mts";
    case ThresholdKind::mets: return "mets";
    }
    return "?";
}

inline ThresholdKind parse_threshold_kind(std::string_view s) {
    if (s == "mrts") return ThresholdKind::mrts;
    if (s == "mts") return ThresholdKind::mts;
    if (s == "mets") return ThresholdKind::mets;
    throw ConfigError("unknown classifier '" + std::string(s) + "' (expected mrts, mts or mets)");
}

struct Threshold {
    ThresholdKind kind = ThresholdKind::mts;
    double value = 0.0;
};

/// Which element is "the median" of an even-sized sample.
enum class MedianConvention {
    lower_middle, // element n/2 (1-based) of the sorted sample
    average,      // mean of the two middle elements
};

/// Whether a tour exactly at the threshold counts as performing.
enum class Boundary { strict, inclusive };

template <class T>
concept LengthValue = std::integral<T> || std::floating_point<T>;

namespace detail {

template <LengthValue T>
void require_nonempty(std::span<const T> lengths, const char *what) {
    if (lengths.empty()) {
        throw std::invalid_argument(std::string(what) + " of an empty sample");
    }
}

} // namespace detail

/// (best + worst) / 2
template <LengthValue T>
Threshold mid_range(std::span<const T> lengths) {
    detail::require_nonempty(lengths, "mid-range");
    const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
    return {ThresholdKind::mrts, (static_cast<double>(*lo) + static_cast<double>(*hi)) / 2.0};
}

template <LengthValue T>
Threshold mean(std::span<const T> lengths) {
    detail::require_nonempty(lengths, "mean");
    const double n = static_cast<double>(lengths.size());
    if constexpr (std::integral<T>) {
        // Integer sums are exact, so the result is the correctly rounded mean.
        const long long sum = std::accumulate(lengths.begin(), lengths.end(), 0LL);
        return {ThresholdKind::mts, static_cast<double>(sum) / n};
    } else {
        const long double sum = std::accumulate(lengths.begin(), lengths.end(), 0.0L);
        return {ThresholdKind::mts, static_cast<double>(sum / n)};
    }
}

/// Odd n: the middle element. Even n: element n/2 of the ascending sample
/// (lower middle) unless `conv` asks for the average of the two middles.
template <LengthValue T>
Threshold median(std::span<const T> lengths, MedianConvention conv = MedianConvention::lower_middle) {
    detail::require_nonempty(lengths, "median");
    std::vector<T> sorted(lengths.begin(), lengths.end());
    const std::size_t n = sorted.size();
    const std::size_t lower = (n + 1) / 2 - 1; // 0-based ceil(n/2)-1, i.e. n/2 - 1 for even n
    std::nth_element(sorted.begin(), sorted.begin() + lower, sorted.end());
    double value = static_cast<double>(sorted[lower]);
    if (n % 2 == 0 && conv == MedianConvention::average) {
        const T upper = *std::min_element(sorted.begin() + lower + 1, sorted.end());
        value = (value + static_cast<double>(upper)) / 2.0;
    }
    return {ThresholdKind::mets, value};
}

template <LengthValue T>
Threshold compute_threshold(ThresholdKind kind, std::span<const T> lengths,
                            MedianConvention conv = MedianConvention::lower_middle) {
    switch (kind) {
    case ThresholdKind::mrts: return mid_range(lengths);
    case ThresholdKind::mts: return mean(lengths);
    case ThresholdKind::mets: return median(lengths, conv);
    }
    throw std::logic_error("unreachable threshold kind");
}

/// Ant indices of each class, ascending.
struct Partition {
    std::vector<std::size_t> elite;
    std::vector<std::size_t> non_elite;
    bool fallback = false; // true when the iteration best was promoted because no ant beat the threshold
};

/// Splits tours by `threshold` and writes the elite flags. If no tour beats
/// the threshold, the iteration-best ant (lowest index on ties) is promoted.
inline Partition classify(std::span<TourRecord> tours, const Threshold &threshold,
                          Boundary boundary = Boundary::strict) {
    Partition part;
    for (std::size_t k = 0; k < tours.size(); ++k) {
        const double len = static_cast<double>(tours[k].length);
        const bool performing = boundary == Boundary::strict ? len < threshold.value : len <= threshold.value;
        tours[k].elite = performing;
        (performing ? part.elite : part.non_elite).push_back(k);
    }
    if (part.elite.empty() && !tours.empty()) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < tours.size(); ++k) {
            if (tours[k].length < tours[best].length) {
                best = k;
            }
        }
        tours[best].elite = true;
        part.elite.push_back(best);
        part.non_elite.erase(std::find(part.non_elite.begin(), part.non_elite.end(), best));
        part.fallback = true;
    }
    return part;
}

inline std::vector<length_t> lengths_of(std::span<const TourRecord> tours) {
    std::vector<length_t> out;
    out.reserve(tours.size());
    for (const auto &t : tours) {
        out.push_back(t.length);
    }
    return out;
}

} // namespace eaco
