#include "phcs/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "phcs/error.hpp"
#include "phcs/format.hpp"

namespace phcs {

namespace {

void check_level(double alpha, const char* name) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError(std::string(name) + " must lie in (0, 1)");
}

// Units by non-increasing e-value; the index breaks ties.
std::vector<std::size_t> descending_order(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    return order;
}

IndexSet sorted_prefix(std::span<const std::size_t> order, std::size_t count) {
    IndexSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(out.begin(), out.end());
    return out;
}

Variant variant_for(EKind kind) {
    switch (kind) {
    case EKind::weighted: return Variant::ph_rcs_weighted;
    case EKind::risk_adjusted: return Variant::ph_rcs;
    default: return Variant::ph_cs;
    }
}

} // namespace

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::cs: return "cs";
    case Variant::ebh_fixed: return "ebh_fixed";
    case Variant::ph_cs: return "ph_cs";
    case Variant::ph_rcs: return "ph_rcs";
    case Variant::ph_rcs_weighted: return "ph_rcs_weighted";
    }
    return "?";
}

Variant parse_variant(std::string_view text) {
    if (text == "cs") return Variant::cs;
    if (text == "ebh_fixed") return Variant::ebh_fixed;
    if (text == "ph_cs") return Variant::ph_cs;
    if (text == "ph_rcs") return Variant::ph_rcs;
    if (text == "ph_rcs_weighted") return Variant::ph_rcs_weighted;
    throw ConfigError("unknown variant '" + std::string(text) + "'");
}

SelectionPath::SelectionPath(std::vector<PathEntry> entries, std::vector<std::size_t> order)
    : entries_(std::move(entries)), order_(std::move(order)) {
    if (entries_.size() != order_.size() + 1) throw InvariantError("path needs m + 1 entries");
}

IndexSet SelectionPath::members(std::size_t k) const {
    return sorted_prefix(order_, entry(k).set_size);
}

SelectionOutcome bh_select(const PVector& p, double alpha_max) {
    check_level(alpha_max, "alpha_max");
    p.validate();
    const std::size_t m = p.size();
    std::vector<double> sorted = p.values;
    std::sort(sorted.begin(), sorted.end());

    std::size_t k_star = 0;
    for (std::size_t k = m; k >= 1; --k) {
        if (sorted[k - 1] <= alpha_max * static_cast<double>(k) / static_cast<double>(m)) {
            k_star = k;
            break;
        }
    }

    SelectionOutcome out;
    out.variant = Variant::cs;
    out.alpha = alpha_max;
    out.k = k_star;
    if (k_star > 0) {
        const double cutoff = alpha_max * static_cast<double>(k_star) / static_cast<double>(m);
        for (std::size_t j = 0; j < m; ++j)
            if (p.values[j] <= cutoff) out.members.push_back(j);
    }
    return out;
}

SelectionOutcome ebh_select(const EVector& e, double alpha) {
    check_level(alpha, "alpha");
    e.validate();
    const std::size_t m = e.size();
    const auto order = descending_order(e.values);

    std::size_t k_star = 0;
    for (std::size_t k = m; k >= 1; --k) {
        const double threshold = static_cast<double>(m) / (alpha * static_cast<double>(k));
        if (e.values[order[k - 1]] >= threshold) {
            k_star = k;
            break;
        }
    }

    SelectionOutcome out;
    out.variant = Variant::ebh_fixed;
    out.alpha = alpha;
    out.k = k_star;
    if (k_star > 0) {
        const double cutoff = e.values[order[k_star - 1]];
        for (std::size_t j = 0; j < m; ++j)
            if (e.values[j] >= cutoff) out.members.push_back(j);
    }
    return out;
}

SelectionPath build_path(const EVector& e) {
    e.validate();
    const std::size_t m = e.size();
    auto order = descending_order(e.values);

    std::vector<PathEntry> entries;
    entries.reserve(m + 1);
    entries.push_back({0, std::numeric_limits<double>::quiet_NaN(), 0, 0.0});

    std::size_t size = 0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double stat = e.values[order[k - 1]];
        // Extend to every unit tied with E_(k).
        size = std::max(size, k);
        while (size < m && e.values[order[size]] >= stat) ++size;
        const double scaled = static_cast<double>(k) * stat;
        const double alpha_hat = scaled > 0.0 ? std::min(1.0, static_cast<double>(m) / scaled) : 1.0;
        entries.push_back({k, stat, size, alpha_hat});
    }
    return SelectionPath(std::move(entries), std::move(order));
}

SelectionOutcome maximize_utility(const SelectionPath& path, const UtilitySpec& u) {
    const std::size_t m = path.m();
    u.validate_for(m);

    const auto entries = path.entries();
    const bool size_constrained = u.kind == UtilityKind::constrained_size;
    bool any_feasible = false;
    if (size_constrained)
        any_feasible = std::any_of(entries.begin(), entries.end(),
                                   [&](const PathEntry& pe) { return pe.set_size >= u.r_min; });

    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (const PathEntry& pe : entries) {
        if (size_constrained && any_feasible && pe.set_size < u.r_min) continue;
        const double value = evaluate(u, pe.set_size, pe.alpha_hat, m);
        if (!found || value > best_value) {
            best = pe.k;
            best_value = value;
            found = true;
        }
    }

    SelectionOutcome out;
    out.k = best;
    out.alpha = path.entry(best).alpha_hat;
    out.utility_value = best_value;
    out.members = path.members(best);
    out.variant = Variant::ph_cs;
    return out;
}

PostHocResult ph_cs(const CalibrationScores& cal, std::span<const double> test_scores, const UtilitySpec& u) {
    if (test_scores.empty()) throw DataError("no test units");
    const EVector e = conformal_e_batch(cal, test_scores);
    auto path = build_path(e);
    auto outcome = maximize_utility(path, u);
    outcome.variant = Variant::ph_cs;
    return {std::move(outcome), std::move(path)};
}

PostHocResult ph_rcs(const EVector& e_g, const UtilitySpec& u) {
    if (e_g.values.empty()) throw DataError("no test units");
    auto path = build_path(e_g);
    auto outcome = maximize_utility(path, u);
    outcome.variant = variant_for(e_g.kind);
    return {std::move(outcome), std::move(path)};
}

void write_path_csv(std::ostream& out, const SelectionPath& path, const UtilitySpec& u, std::size_t chosen_k) {
    out << "k,order_stat,set_size,alpha_hat,utility,chosen\n";
    for (const PathEntry& pe : path.entries()) {
        out << pe.k << ',' << (pe.k == 0 ? std::string() : format_number(pe.order_stat)) << ','
            << pe.set_size << ',' << format_number(pe.alpha_hat) << ','
            << format_number(evaluate(u, pe.set_size, pe.alpha_hat, path.m())) << ','
            << (pe.k == chosen_k ? 1 : 0) << '\n';
    }
}

} // namespace phcs
