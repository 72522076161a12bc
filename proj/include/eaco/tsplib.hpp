#pragma once

// TSPLIB reader and the integer distance conventions used throughout the
// library (nint Euclidean, ATT pseudo-Euclidean, explicit matrices).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eaco {

using city_t = std::uint32_t;
using length_t = std::int64_t;

enum class EdgeWeightKind { euc_2d, att, explicit_matrix };

inline std::string_view to_string(EdgeWeightKind kind) {
    switch (kind) {
    case EdgeWeightKind::euc_2d: return "EUC_2D";
    case EdgeWeightKind::att: return "ATT";
    case EdgeWeightKind::explicit_matrix: return "EXPLICIT";
    }
    return "?";
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Raised for any malformed or unsupported TSPLIB input. `line()` is the
/// 1-based line the problem was detected on (0 when not tied to a line).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline int nint(double v) { return static_cast<int>(v + 0.5); }

inline length_t euc_2d(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return nint(std::sqrt(dx * dx + dy * dy));
}

inline length_t att(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double r = std::sqrt((dx * dx + dy * dy) / 10.0);
    const int t = nint(r);
    return t < r ? t + 1 : t;
}

} // namespace detail

/// Immutable symmetric TSP instance with a materialized integer distance
/// matrix. Safe to share between concurrent runs.
class Instance {
public:
    Instance(std::string name, EdgeWeightKind kind, std::vector<Point> coords,
             std::vector<length_t> weights, std::optional<length_t> optimum = std::nullopt)
        : name_(std::move(name)), kind_(kind), coords_(std::move(coords)),
          dist_(std::move(weights)), optimum_(optimum) {
        if (kind_ == EdgeWeightKind::explicit_matrix) {
            n_ = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(dist_.size()))));
            if (n_ * n_ != dist_.size()) {
                throw std::invalid_argument("explicit weight matrix is not square");
            }
            if (!coords_.empty() && coords_.size() != n_) {
                throw std::invalid_argument("display coordinates do not match dimension");
            }
        } else {
            n_ = coords_.size();
            dist_.assign(n_ * n_, 0);
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t j = i + 1; j < n_; ++j) {
                    const length_t d = kind_ == EdgeWeightKind::att
                                           ? detail::att(coords_[i], coords_[j])
                                           : detail::euc_2d(coords_[i], coords_[j]);
                    dist_[i * n_ + j] = d;
                    dist_[j * n_ + i] = d;
                }
            }
        }
        if (n_ < 3) {
            throw std::invalid_argument("instance needs at least 3 cities");
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (dist_[i * n_ + i] != 0) {
                throw std::invalid_argument("non-zero self distance at city " + std::to_string(i + 1));
            }
            for (std::size_t j = i + 1; j < n_; ++j) {
                if (dist_[i * n_ + j] != dist_[j * n_ + i]) {
                    throw std::invalid_argument("asymmetric distance between cities " +
                                                std::to_string(i + 1) + " and " + std::to_string(j + 1));
                }
                if (dist_[i * n_ + j] <= 0) {
                    throw std::invalid_argument("non-positive distance between cities " +
                                                std::to_string(i + 1) + " and " + std::to_string(j + 1));
                }
            }
        }
    }

    const std::string &name() const noexcept { return name_; }
    std::size_t dimension() const noexcept { return n_; }
    EdgeWeightKind edge_weight_kind() const noexcept { return kind_; }
    std::span<const Point> coords() const noexcept { return coords_; }
    std::optional<length_t> optimum() const noexcept { return optimum_; }

    void set_optimum(std::optional<length_t> optimum) { optimum_ = optimum; }

    length_t distance(city_t i, city_t j) const {
        if (i >= n_ || j >= n_) {
            throw std::out_of_range("city index out of range: (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") with n = " + std::to_string(n_));
        }
        return dist_[i * n_ + j];
    }

    /// Unchecked lookup for hot loops.
    length_t operator()(city_t i, city_t j) const noexcept { return dist_[i * n_ + j]; }

    /// Row-major n*n matrix.
    std::span<const length_t> matrix() const noexcept { return dist_; }

private:
    std::string name_;
    EdgeWeightKind kind_;
    std::vector<Point> coords_;
    std::vector<length_t> dist_;
    std::size_t n_ = 0;
    std::optional<length_t> optimum_;
};

inline Instance make_coordinate_instance(std::string name, EdgeWeightKind kind, std::vector<Point> coords) {
    return Instance(std::move(name), kind, std::move(coords), {});
}

inline Instance make_explicit_instance(std::string name, const std::vector<std::vector<length_t>> &rows) {
    std::vector<length_t> flat;
    flat.reserve(rows.size() * rows.size());
    for (const auto &row : rows) {
        if (row.size() != rows.size()) {
            throw std::invalid_argument("explicit matrix rows must have length n");
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return Instance(std::move(name), EdgeWeightKind::explicit_matrix, {}, std::move(flat));
}

/// Throws std::invalid_argument unless `perm` visits every city exactly once.
inline void check_permutation(const Instance &inst, std::span<const city_t> perm) {
    const std::size_t n = inst.dimension();
    if (perm.size() != n) {
        throw std::invalid_argument("tour has " + std::to_string(perm.size()) + " cities, expected " +
                                    std::to_string(n));
    }
    std::vector<bool> seen(n, false);
    for (city_t c : perm) {
        if (c >= n) {
            throw std::invalid_argument("tour contains out-of-range city " + std::to_string(c));
        }
        if (seen[c]) {
            throw std::invalid_argument("tour visits city " + std::to_string(c) + " twice");
        }
        seen[c] = true;
    }
}

/// Closed tour length; the closing edge perm.back() -> perm.front() is included.
inline length_t tour_length(const Instance &inst, std::span<const city_t> perm) {
    check_permutation(inst, perm);
    length_t total = 0;
    for (std::size_t k = 0; k + 1 < perm.size(); ++k) {
        total += inst(perm[k], perm[k + 1]);
    }
    return total + inst(perm.back(), perm.front());
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline bool is_section_keyword(const std::string &line) {
    return line == "EOF" || line.ends_with("_SECTION");
}

struct Token {
    std::string text;
    std::size_t line;
};

} // namespace detail

/// Parses TSPLIB text. Supported: TYPE TSP with EDGE_WEIGHT_TYPE EUC_2D, ATT or
/// EXPLICIT (FULL_MATRIX, UPPER_ROW, LOWER_DIAG_ROW).
inline Instance parse_instance(std::string_view text) {
    std::vector<std::string> lines;
    {
        std::istringstream in{std::string(text)};
        std::string raw;
        while (std::getline(in, raw)) {
            lines.push_back(detail::trim(raw));
        }
    }

    std::string name = "unnamed";
    std::optional<std::size_t> dimension;
    std::optional<EdgeWeightKind> kind;
    std::string weight_format;
    std::vector<Point> coords;
    std::vector<length_t> explicit_weights;
    std::vector<Point> display;
    bool have_coords = false;
    bool have_weights = false;
    std::size_t weight_line = 0;

    auto require_dimension = [&](std::size_t line) {
        if (!dimension) {
            throw ParseError(line, "data section appears before DIMENSION");
        }
        return *dimension;
    };

    // Reads `n` lines of "id x y" starting after `i`; returns index of the last consumed line.
    auto read_points = [&](std::size_t i, std::size_t n, std::vector<Point> &out, const char *section) {
        out.assign(n, Point{});
        std::vector<bool> seen(n, false);
        for (std::size_t k = 0; k < n; ++k) {
            ++i;
            if (i >= lines.size() || lines[i].empty() || detail::is_section_keyword(lines[i])) {
                throw ParseError(i < lines.size() ? i + 1 : lines.size(),
                                 std::string("dimension mismatch: ") + section + " has " + std::to_string(k) +
                                     " entries, DIMENSION is " + std::to_string(n));
            }
            std::istringstream ls(lines[i]);
            long id = 0;
            Point p;
            if (!(ls >> id >> p.x >> p.y)) {
                throw ParseError(i + 1, std::string("malformed ") + section + " entry '" + lines[i] + "'");
            }
            if (id < 1 || static_cast<std::size_t>(id) > n) {
                throw ParseError(i + 1, "node id " + std::to_string(id) + " outside 1.." + std::to_string(n));
            }
            if (seen[id - 1]) {
                throw ParseError(i + 1, "duplicate node id " + std::to_string(id));
            }
            seen[id - 1] = true;
            out[id - 1] = p;
        }
        // A further data line (not a keyword) means the section is longer than DIMENSION.
        if (i + 1 < lines.size() && !lines[i + 1].empty() && !detail::is_section_keyword(lines[i + 1])) {
            std::istringstream ls(lines[i + 1]);
            double a = 0, b = 0, c = 0;
            if (ls >> a >> b >> c) {
                throw ParseError(i + 2, std::string("dimension mismatch: ") + section +
                                            " has more than DIMENSION = " + std::to_string(n) + " entries");
            }
        }
        return i;
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string &line = lines[i];
        if (line.empty()) {
            continue;
        }
        if (line == "EOF") {
            break;
        }
        if (line == "NODE_COORD_SECTION") {
            i = read_points(i, require_dimension(i + 1), coords, "NODE_COORD_SECTION");
            have_coords = true;
            continue;
        }
        if (line == "DISPLAY_DATA_SECTION") {
            i = read_points(i, require_dimension(i + 1), display, "DISPLAY_DATA_SECTION");
            continue;
        }
        if (line == "EDGE_WEIGHT_SECTION") {
            const std::size_t n = require_dimension(i + 1);
            weight_line = i + 1;
            std::size_t expected = 0;
            if (weight_format == "FULL_MATRIX") {
                expected = n * n;
            } else if (weight_format == "UPPER_ROW") {
                expected = n * (n - 1) / 2;
            } else if (weight_format == "LOWER_DIAG_ROW") {
                expected = n * (n + 1) / 2;
            } else if (weight_format.empty()) {
                throw ParseError(i + 1, "EDGE_WEIGHT_SECTION without EDGE_WEIGHT_FORMAT");
            } else {
                throw ParseError(i + 1, "unsupported EDGE_WEIGHT_FORMAT '" + weight_format + "'");
            }
            std::vector<detail::Token> tokens;
            std::size_t j = i + 1;
            for (; j < lines.size() && !detail::is_section_keyword(lines[j]); ++j) {
                std::istringstream ls(lines[j]);
                std::string tok;
                while (ls >> tok) {
                    tokens.push_back({tok, j + 1});
                }
            }
            if (tokens.size() != expected) {
                throw ParseError(tokens.empty() ? i + 1 : tokens.back().line,
                                 "dimension mismatch: EDGE_WEIGHT_SECTION has " + std::to_string(tokens.size()) +
                                     " weights, " + weight_format + " with DIMENSION " + std::to_string(n) +
                                     " needs " + std::to_string(expected));
            }
            std::vector<length_t> values(expected);
            for (std::size_t k = 0; k < expected; ++k) {
                std::size_t used = 0;
                try {
                    values[k] = std::stoll(tokens[k].text, &used);
                } catch (const std::exception &) {
                    used = 0;
                }
                if (used != tokens[k].text.size()) {
                    throw ParseError(tokens[k].line, "malformed edge weight '" + tokens[k].text + "'");
                }
            }
            explicit_weights.assign(n * n, 0);
            auto set = [&](std::size_t r, std::size_t c, length_t v) {
                explicit_weights[r * n + c] = v;
                explicit_weights[c * n + r] = v;
            };
            std::size_t k = 0;
            if (weight_format == "FULL_MATRIX") {
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t c = 0; c < n; ++c) {
                        if (values[r * n + c] != values[c * n + r]) {
                            throw ParseError(weight_line, "asymmetric FULL_MATRIX entry at (" + std::to_string(r + 1) +
                                                              ", " + std::to_string(c + 1) + ")");
                        }
                    }
                }
                explicit_weights = std::move(values);
            } else if (weight_format == "UPPER_ROW") {
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t c = r + 1; c < n; ++c) {
                        set(r, c, values[k++]);
                    }
                }
            } else {
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t c = 0; c <= r; ++c) {
                        set(r, c, values[k++]);
                    }
                }
            }
            have_weights = true;
            i = j - 1;
            continue;
        }

        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw ParseError(i + 1, "expected 'KEY : VALUE' header, got '" + line + "'");
        }
        const std::string key = detail::trim(std::string_view(line).substr(0, colon));
        const std::string value = detail::trim(std::string_view(line).substr(colon + 1));
        if (key == "NAME") {
            name = value;
        } else if (key == "TYPE") {
            if (value != "TSP") {
                throw ParseError(i + 1, "unsupported TYPE '" + value + "' (only symmetric TSP)");
            }
        } else if (key == "DIMENSION") {
            std::size_t used = 0;
            long long d = 0;
            try {
                d = std::stoll(value, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used != value.size() || d < 3) {
                throw ParseError(i + 1, "DIMENSION must be an integer >= 3, got '" + value + "'");
            }
            dimension = static_cast<std::size_t>(d);
        } else if (key == "EDGE_WEIGHT_TYPE") {
            if (value == "EUC_2D") {
                kind = EdgeWeightKind::euc_2d;
            } else if (value == "ATT") {
                kind = EdgeWeightKind::att;
            } else if (value == "EXPLICIT") {
                kind = EdgeWeightKind::explicit_matrix;
            } else {
                throw ParseError(i + 1, "unsupported EDGE_WEIGHT_TYPE '" + value + "'");
            }
        } else if (key == "EDGE_WEIGHT_FORMAT") {
            weight_format = value;
        }
        // COMMENT, DISPLAY_DATA_TYPE, NODE_COORD_TYPE and friends carry nothing we need.
    }

    if (!dimension) {
        throw ParseError(0, "missing DIMENSION");
    }
    if (!kind) {
        throw ParseError(0, "missing EDGE_WEIGHT_TYPE");
    }
    try {
        if (*kind == EdgeWeightKind::explicit_matrix) {
            if (!have_weights) {
                throw ParseError(0, "EXPLICIT instance without EDGE_WEIGHT_SECTION");
            }
            return Instance(name, *kind, std::move(display), std::move(explicit_weights));
        }
        if (!have_coords) {
            throw ParseError(0, "missing NODE_COORD_SECTION");
        }
        return Instance(name, *kind, std::move(coords), {});
    } catch (const std::invalid_argument &e) {
        throw ParseError(weight_line, e.what());
    }
}

inline Instance load_instance(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open instance file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_instance(buf.str());
    } catch (const ParseError &e) {
        throw ParseError(e.line(), path + ": " + std::string(e.what()));
    }
}

/// Writes `inst` as an EXPLICIT FULL_MATRIX TSPLIB file.
inline std::string write_full_matrix(const Instance &inst) {
    std::ostringstream out;
    const std::size_t n = inst.dimension();
    out << "NAME: " << inst.name() << "\nTYPE: TSP\nDIMENSION: " << n
        << "\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n";
    for (city_t i = 0; i < n; ++i) {
        for (city_t j = 0; j < n; ++j) {
            out << (j ? " " : "") << inst(i, j);
        }
        out << '\n';
    }
    out << "EOF\n";
    return out.str();
}

/// Known optima keyed by instance name, read from a plain "name optimum" table.
class OptimumRegistry {
public:
    OptimumRegistry() = default;

    static OptimumRegistry parse(std::string_view text) {
        OptimumRegistry reg;
        std::istringstream in{std::string(text)};
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const std::string line = detail::trim(raw.substr(0, raw.find('#')));
            if (line.empty()) {
                continue;
            }
            std::istringstream ls(line);
            std::string name;
            length_t value = 0;
            std::string extra;
            if (!(ls >> name >> value) || (ls >> extra) || value <= 0) {
                throw ParseError(line_no, "malformed registry entry '" + line + "'");
            }
            reg.optima_[name] = value;
        }
        return reg;
    }

    static OptimumRegistry load(const std::string &path) {
        std::ifstream in(path);
        if (!in) {
            throw std::runtime_error("cannot open optimum registry '" + path + "'");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    std::optional<length_t> find(const std::string &name) const {
        const auto it = optima_.find(name);
        if (it == optima_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t size() const noexcept { return optima_.size(); }

private:
    std::map<std::string, length_t> optima_;
};

} // namespace eaco
