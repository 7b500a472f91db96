#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phcs/selection.hpp"

namespace phcs {

/// Realised false discovery proportion: selected nulls / max{1, |R|}.
double fdp(std::span<const std::size_t> members, const std::vector<bool>& null_flags);

/// Generalised FDP with per-unit losses in [0, 1].
double generalized_fdp(std::span<const std::size_t> members, std::span<const double> losses);

struct TrialReport {
    std::size_t trial_id = 0;
    Variant variant = Variant::ph_cs;
    std::size_t set_size = 0;
    double declared_alpha = 0.0;
    double realized_fdp = 0.0;
    double realized_utility = 0.0;
    std::uint64_t seed = 0;
};

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0; // sqrt(unbiased sample variance / n); 0 when n < 2
};

MeanEstimate mean_with_se(std::span<const double> xs);

struct AggregateReport {
    std::size_t n_trials = 0;
    MeanEstimate fdp;         // empirical FDR
    MeanEstimate alpha;       // E[alpha_hat]
    MeanEstimate reliability; // E[FDP / alpha_hat]
    MeanEstimate size;
    MeanEstimate utility;
};

/// Per-trial FDP / alpha. Empty selections contribute 0. A positive FDP at
/// alpha = 0 cannot come out of the path and raises InvariantError.
double trial_ratio(const TrialReport& r);

MeanEstimate reliability_ratio(std::span<const TrialReport> reports);

AggregateReport aggregate(std::span<const TrialReport> reports);

struct TaylorGap {
    double mean_alpha = 0.0;
    double mean_fdp = 0.0;
    double gap = 0.0; // mean_alpha - mean_fdp
    double se = 0.0;  // standard error of the paired difference
};

/// Compares the average declared level with the empirical FDR. Diagnostic
/// only: the relation holds to first order.
TaylorGap taylor_gap(std::span<const TrialReport> reports);

} // namespace phcs
