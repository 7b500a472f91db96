#include "phcs/utility.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phcs/error.hpp"

namespace phcs {

namespace {

bool non_decreasing(const std::vector<double>& table) {
    return std::is_sorted(table.begin(), table.end());
}

double interpolate_grid(const std::vector<double>& table, double alpha) {
    if (table.size() == 1) return table.front();
    const double pos = alpha * static_cast<double>(table.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= table.size()) return table.back();
    const double frac = pos - static_cast<double>(lo);
    return table[lo] + frac * (table[lo + 1] - table[lo]);
}

} // namespace

std::string_view to_string(UtilityKind kind) {
    switch (kind) {
    case UtilityKind::constrained_size: return "constrained_size";
    case UtilityKind::additive: return "additive";
    case UtilityKind::linear_tradeoff: return "linear_tradeoff";
    case UtilityKind::log_tradeoff: return "log_tradeoff";
    }
    return "?";
}

UtilityKind parse_utility_kind(std::string_view text) {
    if (text == "constrained_size") return UtilityKind::constrained_size;
    if (text == "additive") return UtilityKind::additive;
    if (text == "linear_tradeoff" || text == "linear") return UtilityKind::linear_tradeoff;
    if (text == "log_tradeoff" || text == "log") return UtilityKind::log_tradeoff;
    throw ConfigError("unknown utility kind '" + std::string(text) + "'");
}

void UtilitySpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("utility.lambda must be non-negative");
    if (!(offset_c >= 0.0) || !std::isfinite(offset_c)) throw ConfigError("utility.c must be non-negative");
    if (!non_decreasing(u_table)) throw ConfigError("utility.u_table must be non-decreasing");
    if (!non_decreasing(v_table)) throw ConfigError("utility.v_table must be non-decreasing");
    for (double x : u_table)
        if (!std::isfinite(x)) throw ConfigError("utility.u_table entries must be finite");
    for (double x : v_table)
        if (!std::isfinite(x)) throw ConfigError("utility.v_table entries must be finite");
}

void UtilitySpec::validate_for(std::size_t m) const {
    validate();
    if (kind == UtilityKind::constrained_size && r_min > m)
        throw ConfigError("utility.r_min = " + std::to_string(r_min) + " exceeds batch size " + std::to_string(m));
    if (kind == UtilityKind::additive && !u_table.empty() && u_table.size() < m + 1)
        throw ConfigError("utility.u_table must cover set sizes 0.." + std::to_string(m));
}

double evaluate(const UtilitySpec& u, std::size_t r, double alpha, std::size_t m) {
    if (r > m) throw DataError("set size " + std::to_string(r) + " exceeds batch size " + std::to_string(m));
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DataError("alpha outside [0, 1]");
    const auto size = static_cast<double>(r);
    switch (u.kind) {
    case UtilityKind::constrained_size:
        if (u.r_min > m) throw DataError("r_min exceeds batch size");
        return r >= u.r_min ? 1.0 - alpha : 0.0;
    case UtilityKind::additive: {
        double ur = size;
        if (!u.u_table.empty()) {
            if (r >= u.u_table.size()) throw DataError("u_table does not cover set size " + std::to_string(r));
            ur = u.u_table[r];
        }
        const double va = u.v_table.empty() ? alpha : interpolate_grid(u.v_table, alpha);
        return ur - u.lambda * va + u.offset_c;
    }
    case UtilityKind::linear_tradeoff:
        return size - u.lambda * alpha;
    case UtilityKind::log_tradeoff:
        if (r == 0 || alpha >= 1.0) return utility_floor;
        return std::log(size) - u.lambda * std::log(1.0 / (1.0 - alpha));
    }
    throw InvariantError("unhandled utility kind");
}

} // namespace phcs
