#pragma once

#include <string>
#include <string_view>

namespace phcs {

enum class ScoreKind { clipped_odds, hinge, exponential };

std::string_view to_string(ScoreKind kind);
ScoreKind parse_score_kind(std::string_view text);

/// Parameters of a conformity score family S(x, y).
///
/// Every kind is non-negative and non-increasing in the response, which is
/// what the conformal e- and p-variables need for their null guarantees.
struct ScoreSpec {
    ScoreKind kind = ScoreKind::clipped_odds;
    double gamma = 3.0;   // exponent of the odds ratio (clipped_odds)
    double delta = 1e-6;  // value above the threshold (clipped_odds)
    double eps = 1e-6;    // predictions are clamped to [eps, 1 - eps]
    bool normalize = false;
    double norm_min = 0.0;
    double norm_max = 1.0;

    /// Throws ConfigError when a parameter is out of its domain.
    void validate() const;
};

/// Predicted quality mu(x), confined to the open unit interval.
class Prediction {
public:
    /// Rejects values outside (0, 1).
    explicit Prediction(double mu);

    double value() const noexcept { return mu_; }

private:
    double mu_;
};

/// Min-max normalises a raw model output with the training range, then clamps
/// to [eps, 1 - eps]. Out-of-range inputs are clamped, not rejected.
Prediction normalize_prediction(double raw, const ScoreSpec& spec);

/// Clamps an output that is already a probability to [eps, 1 - eps].
Prediction clamp_prediction(double probability, const ScoreSpec& spec);

/// S(x, y) for a unit with prediction mu and requirement threshold c.
///   clipped_odds: max((mu / (1 - mu))^gamma, delta) if y <= c, delta otherwise
///   hinge:        max(mu - y, 0)
///   exponential:  exp(mu - y)
double score_value(const ScoreSpec& spec, Prediction mu, double y, double threshold);

/// Score evaluated at the threshold itself, S(x, c).
double score_at_threshold(const ScoreSpec& spec, Prediction mu, double c);

} // namespace phcs
