#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace phcs {

/// Calibration scores S_1..S_n. All finite, non-negative, n >= 1.
class CalibrationScores {
public:
    explicit CalibrationScores(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double sum() const noexcept { return sum_; }

private:
    std::vector<double> values_;
    double sum_ = 0.0;
};

/// Conformal p-variables with the uniform draws that broke ties.
struct PVector {
    std::vector<double> values;
    std::vector<double> tiebreak_draws;

    std::size_t size() const noexcept { return values.size(); }
    void validate() const;
};

enum class EKind { standard, oracle, risk_adjusted, weighted };

std::string_view to_string(EKind kind);

struct EVector {
    std::vector<double> values;
    EKind kind = EKind::standard;
    /// Units whose e-value was forced to 0 because every score was zero.
    std::size_t degenerate = 0;

    std::size_t size() const noexcept { return values.size(); }
    /// Throws DataError on negative or non-finite entries.
    void validate() const;
};

/// Non-negative weights with sum <= m.
struct WeightVector {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double sum() const noexcept;
};

/// Randomised conformal p-variable
///   P = (g + u (1 + t)) / (n + 1),  g = #{S_i > s}, t = #{S_i = s}.
/// u in [0, 1) comes from the caller's stream.
double conformal_p(const CalibrationScores& cal, double test_score, double u);

/// Batch version; sorts the calibration scores once and uses binary search.
PVector conformal_p_batch(const CalibrationScores& cal, std::span<const double> test_scores,
                          std::span<const double> draws);

struct EValue {
    double value = 0.0;
    bool degenerate = false;
};

/// Conformal e-variable s / ((sum_i S_i + s) / (n + 1)).
/// An all-zero denominator yields 0 with the degenerate flag set.
EValue conformal_e(const CalibrationScores& cal, double test_score);

/// Same statistic evaluated at the score of the true test label.
EValue oracle_e(const CalibrationScores& cal, double true_test_score);

/// Risk-adjusted e-variable for the binary loss 1{Y <= c}; this reduces to
/// the conformal e-variable.
EValue binary_risk_e(const CalibrationScores& cal, double test_score);

EVector conformal_e_batch(const CalibrationScores& cal, std::span<const double> test_scores,
                          EKind kind = EKind::standard);

/// Elementwise w_j * E_j. Rejects weight vectors whose sum exceeds m.
EVector weighted_e(const EVector& e, const WeightVector& w);

/// Scales non-negative raw weights so they sum to exactly m (up to rounding,
/// corrected so the budget check passes).
WeightVector rescale_weights(std::span<const double> raw, std::size_t m);

} // namespace phcs
