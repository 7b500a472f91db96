#include "phcs/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "phcs/error.hpp"

namespace phcs {

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
    case ScoreKind::clipped_odds: return "clipped_odds";
    case ScoreKind::hinge: return "hinge";
    case ScoreKind::exponential: return "exponential";
    }
    return "?";
}

ScoreKind parse_score_kind(std::string_view text) {
    if (text == "clipped_odds") return ScoreKind::clipped_odds;
    if (text == "hinge") return ScoreKind::hinge;
    if (text == "exponential") return ScoreKind::exponential;
    throw ConfigError("unknown score kind '" + std::string(text) + "'");
}

void ScoreSpec::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("score.gamma must be positive");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("score.delta must be positive");
    if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("score.eps must lie in (0, 0.5)");
    if (normalize && !(norm_min < norm_max))
        throw ConfigError("score normalisation needs norm_min < norm_max");
}

Prediction::Prediction(double mu) : mu_(mu) {
    if (!(mu > 0.0 && mu < 1.0)) throw DataError("prediction outside (0, 1): " + std::to_string(mu));
}

Prediction normalize_prediction(double raw, const ScoreSpec& spec) {
    if (!std::isfinite(raw)) throw DataError("non-finite raw prediction");
    if (!(spec.norm_min < spec.norm_max)) throw ConfigError("normalisation needs norm_min < norm_max");
    const double scaled = (raw - spec.norm_min) / (spec.norm_max - spec.norm_min);
    return Prediction(std::clamp(scaled, spec.eps, 1.0 - spec.eps));
}

Prediction clamp_prediction(double probability, const ScoreSpec& spec) {
    if (!std::isfinite(probability)) throw DataError("non-finite prediction");
    return Prediction(std::clamp(probability, spec.eps, 1.0 - spec.eps));
}

double score_value(const ScoreSpec& spec, Prediction mu, double y, double threshold) {
    if (!std::isfinite(y)) throw DataError("non-finite response");
    const double m = mu.value();
    switch (spec.kind) {
    case ScoreKind::clipped_odds:
        // The odds branch is floored at delta so the score stays non-increasing
        // in y even when (mu / (1 - mu))^gamma underflows below delta.
        return y <= threshold ? std::max(std::pow(m / (1.0 - m), spec.gamma), spec.delta) : spec.delta;
    case ScoreKind::hinge:
        return std::max(m - y, 0.0);
    case ScoreKind::exponential:
        return std::exp(m - y);
    }
    throw InvariantError("unhandled score kind");
}

double score_at_threshold(const ScoreSpec& spec, Prediction mu, double c) {
    return score_value(spec, mu, c, c);
}

} // namespace phcs
