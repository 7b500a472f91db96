#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phcs/conformal.hpp"
#include "phcs/selection.hpp"

// Brute-force reference implementations. Nothing here reuses the sorting or
// order-statistic code of selection.cpp.
namespace phcs::oracle {

struct OracleReport {
    std::string instance;
    std::string main_result;
    std::string oracle_result;
    bool agree = true;
    std::string detail;
};

/// BH by enumeration: for each k, count p-values at or below alpha k / m;
/// k* is the largest k whose count reaches k.
IndexSet brute_bh(const PVector& p, double alpha_max);

struct BruteEbh {
    IndexSet members;
    /// j in R  <=>  E_j >= m / (alpha |R|), checked unit by unit.
    bool self_consistent = true;
};

/// e-BH by enumeration of every candidate size k.
BruteEbh brute_ebh(const EVector& e, double alpha);

/// Average of the oracle e-variable over all n + 1 ways of assigning the test
/// role within the multiset. Equal to 1 whenever the scores are not all zero.
/// Throws DataError for an all-zero multiset.
double exact_mean_oracle_e(std::span<const double> scores);

/// For every level in the grid, checks
///   FDP(ebh_select(e, alpha)) / alpha <= mean(e_oracle).
/// Reports the first violation.
OracleReport check_level_uniform(const EVector& e_oracle, const EVector& e, const std::vector<bool>& nulls,
                                 std::span<const double> alpha_grid);

/// Compares ebh_select and bh_select against the brute-force versions on one
/// instance.
OracleReport compare_ebh(const EVector& e, double alpha);
OracleReport compare_bh(const PVector& p, double alpha_max);

std::string describe(const IndexSet& set);

} // namespace phcs::oracle
