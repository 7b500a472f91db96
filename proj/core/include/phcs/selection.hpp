#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "phcs/conformal.hpp"
#include "phcs/utility.hpp"

namespace phcs {

/// Zero-based test-unit indices in ascending order.
using IndexSet = std::vector<std::size_t>;

enum class Variant { cs, ebh_fixed, ph_cs, ph_rcs, ph_rcs_weighted };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

struct PathEntry {
    std::size_t k = 0;
    double order_stat = 0.0;  // E_(k); NaN for k = 0
    std::size_t set_size = 0; // |R_k| = #{j : E_j >= E_(k)}
    double alpha_hat = 0.0;   // min{1, m / (k E_(k))}, 0 for k = 0
};

/// Nested candidate sets R_0 c R_1 c ... c R_m of the e-BH procedure with
/// their FDP estimates. Members of R_k are the first |R_k| units of `order`.
class SelectionPath {
public:
    SelectionPath(std::vector<PathEntry> entries, std::vector<std::size_t> order);

    std::size_t m() const noexcept { return order_.size(); }
    std::span<const PathEntry> entries() const noexcept { return entries_; }
    const PathEntry& entry(std::size_t k) const { return entries_.at(k); }
    /// Units sorted by non-increasing e-value, ties by index.
    std::span<const std::size_t> order() const noexcept { return order_; }
    IndexSet members(std::size_t k) const;

private:
    std::vector<PathEntry> entries_;
    std::vector<std::size_t> order_;
};

struct SelectionOutcome {
    IndexSet members;
    double alpha = 0.0;
    std::size_t k = 0;
    double utility_value = 0.0;
    Variant variant = Variant::ph_cs;
};

/// Benjamini-Hochberg on conformal p-values at a level fixed in advance.
SelectionOutcome bh_select(const PVector& p, double alpha_max);

/// e-BH at a fixed level: the largest k with E_(k) >= m / (alpha k).
SelectionOutcome ebh_select(const EVector& e, double alpha);

SelectionPath build_path(const EVector& e);

/// Maximiser of U(|R_k|, alpha_hat_k) over the path. Ties go to the smallest
/// k. For constrained_size, entries with |R_k| < r_min are considered only
/// when no entry meets the size constraint.
SelectionOutcome maximize_utility(const SelectionPath& path, const UtilitySpec& u);

struct PostHocResult {
    SelectionOutcome outcome;
    SelectionPath path;
};

/// Full PH-CS pipeline from scores: e-variables, path, utility argmax.
PostHocResult ph_cs(const CalibrationScores& cal, std::span<const double> test_scores, const UtilitySpec& u);

/// PH-CS over externally supplied risk-adjusted or weighted e-variables.
PostHocResult ph_rcs(const EVector& e_g, const UtilitySpec& u);

/// CSV dump: k,order_stat,set_size,alpha_hat,utility,chosen.
void write_path_csv(std::ostream& out, const SelectionPath& path, const UtilitySpec& u,
                    std::size_t chosen_k);

} // namespace phcs
