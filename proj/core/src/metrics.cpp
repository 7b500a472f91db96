#include "phcs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phcs/error.hpp"

namespace phcs {

double fdp(std::span<const std::size_t> members, const std::vector<bool>& null_flags) {
    std::size_t false_discoveries = 0;
    for (std::size_t j : members) {
        if (j >= null_flags.size()) throw DataError("member index " + std::to_string(j) + " out of range");
        if (null_flags[j]) ++false_discoveries;
    }
    return static_cast<double>(false_discoveries) /
           static_cast<double>(std::max<std::size_t>(1, members.size()));
}

double generalized_fdp(std::span<const std::size_t> members, std::span<const double> losses) {
    for (double loss : losses)
        if (!(loss >= 0.0 && loss <= 1.0)) throw DataError("loss outside [0, 1]");
    double total = 0.0;
    for (std::size_t j : members) {
        if (j >= losses.size()) throw DataError("member index " + std::to_string(j) + " out of range");
        total += losses[j];
    }
    return total / static_cast<double>(std::max<std::size_t>(1, members.size()));
}

MeanEstimate mean_with_se(std::span<const double> xs) {
    MeanEstimate out;
    if (xs.empty()) return out;
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / n;
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

double trial_ratio(const TrialReport& r) {
    if (r.set_size == 0) return 0.0;
    if (r.declared_alpha == 0.0) {
        if (r.realized_fdp > 0.0) throw InvariantError("positive FDP declared at alpha = 0");
        return 0.0;
    }
    return r.realized_fdp / r.declared_alpha;
}

MeanEstimate reliability_ratio(std::span<const TrialReport> reports) {
    std::vector<double> ratios;
    ratios.reserve(reports.size());
    for (const auto& r : reports) ratios.push_back(trial_ratio(r));
    return mean_with_se(ratios);
}

AggregateReport aggregate(std::span<const TrialReport> reports) {
    std::vector<double> fdps, alphas, sizes, utilities;
    for (const auto& r : reports) {
        fdps.push_back(r.realized_fdp);
        alphas.push_back(r.declared_alpha);
        sizes.push_back(static_cast<double>(r.set_size));
        utilities.push_back(r.realized_utility);
    }
    AggregateReport out;
    out.n_trials = reports.size();
    out.fdp = mean_with_se(fdps);
    out.alpha = mean_with_se(alphas);
    out.reliability = reliability_ratio(reports);
    out.size = mean_with_se(sizes);
    out.utility = mean_with_se(utilities);
    return out;
}

TaylorGap taylor_gap(std::span<const TrialReport> reports) {
    std::vector<double> alphas, fdps, diffs;
    for (const auto& r : reports) {
        alphas.push_back(r.declared_alpha);
        fdps.push_back(r.realized_fdp);
        diffs.push_back(r.declared_alpha - r.realized_fdp);
    }
    TaylorGap out;
    out.mean_alpha = mean_with_se(alphas).mean;
    out.mean_fdp = mean_with_se(fdps).mean;
    out.gap = out.mean_alpha - out.mean_fdp;
    out.se = mean_with_se(diffs).se;
    return out;
}

} // namespace phcs
