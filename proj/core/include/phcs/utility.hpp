#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace phcs {

enum class UtilityKind { constrained_size, additive, linear_tradeoff, log_tradeoff };

std::string_view to_string(UtilityKind kind);
UtilityKind parse_utility_kind(std::string_view text);

/// Utility U(r, alpha) over selected-set size r and FDP level alpha.
///
/// constrained_size  (1 - alpha) * 1{r >= r_min}
/// additive          u(r) - lambda * v(alpha) + offset_c
/// linear_tradeoff   r - lambda * alpha
/// log_tradeoff      log r - lambda * log(1 / (1 - alpha))
///
/// For additive, u_table[r] tabulates u on 0..m (identity when empty) and
/// v_table holds v on an evenly spaced grid over [0, 1], interpolated
/// linearly (identity when empty). Both tables must be non-decreasing.
struct UtilitySpec {
    UtilityKind kind = UtilityKind::constrained_size;
    std::size_t r_min = 0;
    double lambda = 0.0;
    double offset_c = 0.0;
    std::vector<double> u_table;
    std::vector<double> v_table;

    /// Checks parameters that do not depend on the batch size.
    void validate() const;
    /// Additionally checks r_min <= m and that u_table covers 0..m.
    void validate_for(std::size_t m) const;
};

/// Stand-in for the log utility's undefined endpoints (r = 0, alpha = 1).
inline constexpr double utility_floor = -std::numeric_limits<double>::infinity();

/// U(r, alpha) for a batch of size m. Throws DataError for r > m or alpha
/// outside [0, 1].
double evaluate(const UtilitySpec& u, std::size_t r, double alpha, std::size_t m);

} // namespace phcs
