#include "phcs/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "phcs/error.hpp"

namespace phcs {

namespace {

void check_score(double s, const char* what) {
    if (!std::isfinite(s) || s < 0.0) {
        std::ostringstream msg;
        msg << what << " must be finite and non-negative, got " << s;
        throw DataError(msg.str());
    }
}

EValue e_statistic(const CalibrationScores& cal, double s) {
    check_score(s, "test score");
    const double denominator = (cal.sum() + s) / static_cast<double>(cal.size() + 1);
    if (denominator == 0.0) return {0.0, true};
    return {s / denominator, false};
}

} // namespace

CalibrationScores::CalibrationScores(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DataError("calibration set is empty");
    for (double s : values_) check_score(s, "calibration score");
    sum_ = std::accumulate(values_.begin(), values_.end(), 0.0);
}

void PVector::validate() const {
    if (tiebreak_draws.size() != values.size()) throw DataError("p-vector and draw lengths differ");
    for (double p : values)
        if (!(p >= 0.0 && p <= 1.0)) throw DataError("p-value outside [0, 1]");
}

std::string_view to_string(EKind kind) {
    switch (kind) {
    case EKind::standard: return "standard";
    case EKind::oracle: return "oracle";
    case EKind::risk_adjusted: return "risk_adjusted";
    case EKind::weighted: return "weighted";
    }
    return "?";
}

void EVector::validate() const {
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!std::isfinite(values[j]) || values[j] < 0.0) {
            std::ostringstream msg;
            msg << "e-value " << j << " must be finite and non-negative, got " << values[j];
            throw DataError(msg.str());
        }
    }
}

double WeightVector::sum() const noexcept {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

double conformal_p(const CalibrationScores& cal, double test_score, double u) {
    check_score(test_score, "test score");
    if (!(u >= 0.0 && u < 1.0)) throw DataError("tie-break draw must lie in [0, 1)");
    std::size_t greater = 0;
    std::size_t ties = 0;
    for (double s : cal.values()) {
        if (s > test_score) ++greater;
        else if (s == test_score) ++ties;
    }
    return (static_cast<double>(greater) + u * static_cast<double>(1 + ties)) /
           static_cast<double>(cal.size() + 1);
}

PVector conformal_p_batch(const CalibrationScores& cal, std::span<const double> test_scores,
                          std::span<const double> draws) {
    if (draws.size() != test_scores.size()) throw DataError("one tie-break draw per test unit required");
    std::vector<double> sorted(cal.values().begin(), cal.values().end());
    std::sort(sorted.begin(), sorted.end());
    const double denominator = static_cast<double>(cal.size() + 1);

    PVector out;
    out.values.reserve(test_scores.size());
    out.tiebreak_draws.assign(draws.begin(), draws.end());
    for (std::size_t j = 0; j < test_scores.size(); ++j) {
        const double s = test_scores[j];
        check_score(s, "test score");
        const double u = draws[j];
        if (!(u >= 0.0 && u < 1.0)) throw DataError("tie-break draw must lie in [0, 1)");
        const auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), s);
        const auto greater = static_cast<double>(sorted.end() - hi);
        const auto ties = static_cast<double>(hi - lo);
        out.values.push_back((greater + u * (1.0 + ties)) / denominator);
    }
    return out;
}

EValue conformal_e(const CalibrationScores& cal, double test_score) {
    return e_statistic(cal, test_score);
}

EValue oracle_e(const CalibrationScores& cal, double true_test_score) {
    return e_statistic(cal, true_test_score);
}

EValue binary_risk_e(const CalibrationScores& cal, double test_score) {
    return e_statistic(cal, test_score);
}

EVector conformal_e_batch(const CalibrationScores& cal, std::span<const double> test_scores, EKind kind) {
    EVector out;
    out.kind = kind;
    out.values.reserve(test_scores.size());
    for (double s : test_scores) {
        const EValue e = e_statistic(cal, s);
        out.values.push_back(e.value);
        out.degenerate += e.degenerate ? 1 : 0;
    }
    return out;
}

EVector weighted_e(const EVector& e, const WeightVector& w) {
    if (w.size() != e.size()) {
        std::ostringstream msg;
        msg << "weight vector has " << w.size() << " entries for " << e.size() << " e-values";
        throw DataError(msg.str());
    }
    for (double v : w.values)
        if (!std::isfinite(v) || v < 0.0) throw DataError("weights must be finite and non-negative");
    const double m = static_cast<double>(e.size());
    const double total = w.sum();
    if (total > m) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "weight budget violated: sum of weights " << total << " exceeds m = " << e.size();
        throw DataError(msg.str());
    }
    EVector out;
    out.kind = EKind::weighted;
    out.degenerate = e.degenerate;
    out.values.resize(e.size());
    for (std::size_t j = 0; j < e.size(); ++j) out.values[j] = w.values[j] * e.values[j];
    return out;
}

WeightVector rescale_weights(std::span<const double> raw, std::size_t m) {
    if (raw.size() != m) throw DataError("raw weight count does not match m");
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) throw DataError("raw weights must have a positive finite sum");
    WeightVector w;
    w.values.reserve(m);
    const double scale = static_cast<double>(m) / total;
    for (double v : raw) {
        if (!std::isfinite(v) || v < 0.0) throw DataError("weights must be finite and non-negative");
        w.values.push_back(v * scale);
    }
    // Rounding can push the sum a few ulps past m; shave until it fits.
    while (w.sum() > static_cast<double>(m)) {
        for (double& v : w.values) v = std::nextafter(v, 0.0);
    }
    return w;
}

} // namespace phcs
