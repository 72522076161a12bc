#pragma once

// Measurement and presentation: deviation from the known optimum, last-k
// averaging, elite-count quartiles, summary rows as CSV/JSON and the
// line-delimited JSON iteration trace.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eaco/engine.hpp"

namespace eaco {

/// 100 * (length - optimum) / optimum. Negative when the length beats the optimum.
inline double deviation_pct(double length, double optimum) {
    if (!(optimum > 0.0)) {
        throw std::invalid_argument("optimum must be positive");
    }
    return 100.0 * (length - optimum) / optimum;
}

inline std::optional<double> deviation_pct(double length, std::optional<length_t> optimum) {
    if (!optimum) {
        return std::nullopt;
    }
    return deviation_pct(length, static_cast<double>(*optimum));
}

/// Rounds half away from zero to `decimals` places and prints fixed-point.
inline std::string format_fixed(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // The small nudge absorbs binary representation error at exact halves (e.g. 0.125).
    double r = std::round(value * scale * (1.0 + 4 * std::numeric_limits<double>::epsilon())) / scale;
    if (r == 0.0) {
        r = 0.0; // no "-0.00"
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
    return buf;
}

/// Mean of the last `k` entries (of all entries when the trace is shorter).
template <LengthValue T>
double average_last_k(std::span<const T> values, std::size_t k = 50) {
    if (values.empty()) {
        throw std::invalid_argument("average of an empty trace");
    }
    if (k == 0) {
        throw std::invalid_argument("window must be positive");
    }
    const std::size_t w = std::min(k, values.size());
    long double sum = 0.0L;
    for (std::size_t i = values.size() - w; i < values.size(); ++i) {
        sum += static_cast<long double>(values[i]);
    }
    return static_cast<double>(sum / static_cast<long double>(w));
}

struct QuartileSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;

    double iqr() const noexcept { return q3 - q1; }
    bool operator==(const QuartileSummary &) const = default;
};

namespace detail {

inline double sorted_median(std::span<const double> s) {
    const std::size_t n = s.size();
    return n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
}

} // namespace detail

/// Five-number summary with Tukey hinges: Q1/Q3 are the medians of the lower
/// and upper halves, each half including the median for odd sizes.
inline QuartileSummary quartiles(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("quartiles of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const std::size_t half = (n + 1) / 2;
    const std::span<const double> all(values);
    QuartileSummary q;
    q.min = values.front();
    q.max = values.back();
    q.median = detail::sorted_median(all);
    q.q1 = detail::sorted_median(all.subspan(0, half));
    q.q3 = detail::sorted_median(all.subspan(n - half));
    return q;
}

struct EliteSummary {
    double mean = 0.0;
    QuartileSummary quartiles;
};

/// Pooled mean and quartiles over every iteration of every run.
inline EliteSummary elite_count_summary(const std::vector<std::vector<std::size_t>> &traces) {
    std::vector<double> pooled;
    for (const auto &t : traces) {
        pooled.insert(pooled.end(), t.begin(), t.end());
    }
    if (pooled.empty()) {
        throw std::invalid_argument("elite-count summary of empty traces");
    }
    const double sum = std::accumulate(pooled.begin(), pooled.end(), 0.0);
    return {sum / static_cast<double>(pooled.size()), quartiles(std::move(pooled))};
}

inline std::vector<std::size_t> elite_counts(const std::vector<IterationStats> &trace) {
    std::vector<std::size_t> out;
    out.reserve(trace.size());
    for (const auto &s : trace) {
        out.push_back(s.elite_count);
    }
    return out;
}

inline std::vector<length_t> iteration_bests(const std::vector<IterationStats> &trace) {
    std::vector<length_t> out;
    out.reserve(trace.size());
    for (const auto &s : trace) {
        out.push_back(s.best_length);
    }
    return out;
}

/// Table label: DEAMR, DRAMed_pun, MMAS+IB+PTS, ...
inline std::string algorithm_label(Variant v, std::optional<ThresholdKind> classifier) {
    switch (v) {
    case Variant::as: return "AS";
    case Variant::ea: return "EA";
    case Variant::ra: return "RA";
    case Variant::mmas_ib_pts: return "MMAS+IB+PTS";
    default: break;
    }
    std::string label = is_elitist_family(v) ? "DEA" : "DRA";
    if (classifier) {
        switch (*classifier) {
        case ThresholdKind::mrts: label += "MR"; break;
        case ThresholdKind::mts: label += "M"; break;
        case ThresholdKind::mets: label += "Med"; break;
        }
    }
    if (is_punished(v)) {
        label += "_pun";
    }
    return label;
}

struct SummaryRow {
    std::string dataset;
    std::string algorithm;
    double best = 0.0;
    std::optional<double> best_dev_pct;
    double avg = 0.0; // mean over runs of the last-50 average
    std::optional<double> avg_dev_pct;
    double mean_elite = 0.0;
    std::size_t m = 0;
    std::size_t seeds = 0;

    bool operator==(const SummaryRow &) const = default;
};

/// Summary over the traces of independent runs of one configuration.
inline SummaryRow summarize_traces(const std::string &dataset, const std::string &algorithm, std::size_t m,
                                   const std::vector<std::vector<IterationStats>> &traces,
                                   std::optional<length_t> optimum, std::size_t window = 50) {
    if (traces.empty()) {
        throw std::invalid_argument("summary needs at least one trace");
    }
    SummaryRow row;
    row.dataset = dataset;
    row.algorithm = algorithm;
    row.m = m;
    row.seeds = traces.size();
    length_t best = std::numeric_limits<length_t>::max();
    double avg_sum = 0.0;
    std::vector<std::vector<std::size_t>> elite;
    for (const auto &t : traces) {
        if (t.empty()) {
            throw std::invalid_argument("empty trace");
        }
        for (const auto &s : t) {
            best = std::min(best, s.best_so_far);
        }
        const auto bests = iteration_bests(t);
        avg_sum += average_last_k(std::span<const length_t>(bests), window);
        elite.push_back(elite_counts(t));
    }
    row.best = static_cast<double>(best);
    row.avg = avg_sum / static_cast<double>(traces.size());
    row.best_dev_pct = deviation_pct(row.best, optimum);
    row.avg_dev_pct = deviation_pct(row.avg, optimum);
    row.mean_elite = elite_count_summary(elite).mean;
    return row;
}

inline SummaryRow summarize(const std::vector<RunResult> &runs, std::size_t window = 50) {
    if (runs.empty()) {
        throw std::invalid_argument("summary needs at least one run");
    }
    const RunConfig &c = runs.front().config;
    std::vector<std::vector<IterationStats>> traces;
    for (const auto &r : runs) {
        traces.push_back(r.trace);
    }
    return summarize_traces(c.instance->name(), algorithm_label(c.plan.variant, c.plan.classifier),
                            c.params.num_ants, traces, c.optimum, window);
}

inline constexpr const char *csv_header = "dataset,algorithm,best,best_dev_pct,avg,avg_dev_pct,mean_elite,m,seeds";

namespace detail {

inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

inline std::string optional_fixed(const std::optional<double> &v, int decimals) {
    return v ? format_fixed(*v, decimals) : std::string();
}

} // namespace detail

/// Lengths with 1 decimal, deviations and elite means with 2; unavailable deviations are empty.
inline std::string to_csv(const std::vector<SummaryRow> &rows) {
    std::ostringstream out;
    out << csv_header << '\n';
    for (const auto &r : rows) {
        out << detail::csv_field(r.dataset) << ',' << detail::csv_field(r.algorithm) << ','
            << format_fixed(r.best, 1) << ',' << detail::optional_fixed(r.best_dev_pct, 2) << ','
            << format_fixed(r.avg, 1) << ',' << detail::optional_fixed(r.avg_dev_pct, 2) << ','
            << format_fixed(r.mean_elite, 2) << ',' << r.m << ',' << r.seeds << '\n';
    }
    return out.str();
}

inline nlohmann::ordered_json to_json_value(const SummaryRow &r) {
    using nlohmann::ordered_json;
    return ordered_json{{"dataset", r.dataset},
                          {"algorithm", r.algorithm},
                          {"best", r.best},
                          {"best_dev_pct", r.best_dev_pct ? ordered_json(*r.best_dev_pct) : ordered_json()},
                          {"avg", r.avg},
                          {"avg_dev_pct", r.avg_dev_pct ? ordered_json(*r.avg_dev_pct) : ordered_json()},
                          {"mean_elite", r.mean_elite},
                          {"m", r.m},
                          {"seeds", r.seeds}};
}

/// JSON array of rows with full-precision numbers, so parsing it back is lossless.
inline std::string to_json(const std::vector<SummaryRow> &rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &r : rows) {
        arr.push_back(to_json_value(r));
    }
    return arr.dump(2) + "\n";
}

inline std::vector<SummaryRow> rows_from_json(const std::string &text) {
    const auto arr = nlohmann::json::parse(text);
    std::vector<SummaryRow> rows;
    for (const auto &j : arr) {
        SummaryRow r;
        r.dataset = j.at("dataset").get<std::string>();
        r.algorithm = j.at("algorithm").get<std::string>();
        r.best = j.at("best").get<double>();
        if (!j.at("best_dev_pct").is_null()) r.best_dev_pct = j.at("best_dev_pct").get<double>();
        r.avg = j.at("avg").get<double>();
        if (!j.at("avg_dev_pct").is_null()) r.avg_dev_pct = j.at("avg_dev_pct").get<double>();
        r.mean_elite = j.at("mean_elite").get<double>();
        r.m = j.at("m").get<std::size_t>();
        r.seeds = j.at("seeds").get<std::size_t>();
        rows.push_back(std::move(r));
    }
    return rows;
}

/// One JSON object per iteration: index, best, threshold, elite_count, best_so_far
/// (and branching for MMAS runs).
inline void write_trace(std::ostream &out, const std::vector<IterationStats> &trace) {
    for (const auto &s : trace) {
        nlohmann::ordered_json j;
        j["index"] = s.index;
        j["best"] = s.best_length;
        j["threshold"] = s.threshold ? nlohmann::ordered_json(*s.threshold) : nlohmann::ordered_json();
        j["elite_count"] = s.elite_count;
        j["best_so_far"] = s.best_so_far;
        if (s.branching) {
            j["branching"] = *s.branching;
        }
        out << j.dump() << '\n';
    }
}

inline std::vector<IterationStats> read_trace(std::istream &in) {
    std::vector<IterationStats> trace;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            IterationStats s;
            s.index = j.at("index").get<std::size_t>();
            s.best_length = j.at("best").get<length_t>();
            if (!j.at("threshold").is_null()) s.threshold = j.at("threshold").get<double>();
            s.elite_count = j.at("elite_count").get<std::size_t>();
            s.best_so_far = j.at("best_so_far").get<length_t>();
            if (j.contains("branching")) s.branching = j.at("branching").get<double>();
            trace.push_back(s);
        } catch (const nlohmann::json::exception &e) {
            throw std::runtime_error("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (trace.empty()) {
        throw std::runtime_error("trace is empty");
    }
    return trace;
}

inline constexpr const char *quartile_header = "dataset,algorithm,min,q1,median,q3,max,iqr,mean,m,runs";

/// Per-configuration five-number summary of the per-iteration elite counts.
inline std::string quartile_csv_line(const std::string &dataset, const std::string &algorithm, std::size_t m,
                                     const EliteSummary &s, std::size_t runs) {
    const auto &q = s.quartiles;
    std::ostringstream out;
    out << detail::csv_field(dataset) << ',' << detail::csv_field(algorithm) << ',' << format_fixed(q.min, 2) << ','
        << format_fixed(q.q1, 2) << ',' << format_fixed(q.median, 2) << ',' << format_fixed(q.q3, 2) << ','
        << format_fixed(q.max, 2) << ',' << format_fixed(q.iqr(), 2) << ',' << format_fixed(s.mean, 2) << ','
        << m << ',' << runs << '\n';
    return out.str();
}

} // namespace eaco
