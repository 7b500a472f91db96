#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phcs/config.hpp"
#include "phcs/metrics.hpp"
#include "phcs/selection.hpp"

namespace phcs {

/// Everything one selection needs, already reduced to scores.
struct ScoredBatch {
    std::vector<double> cal_scores;
    std::vector<double> test_scores;            // S(x, c) for each test unit
    std::vector<double> true_test_scores;       // S(x, y); empty when unlabeled
    std::vector<bool> nulls;                    // y <= c; empty when unlabeled
    std::optional<std::vector<double>> e_external;
    std::optional<std::vector<double>> weights;
    std::uint64_t data_hash = 0;

    bool labeled() const noexcept { return !nulls.empty(); }
    std::size_t m() const noexcept { return test_scores.size(); }
};

/// Regenerates trial `trial` of a synthetic campaign from its own substream,
/// fits the configured predictor and scores calibration and test units.
ScoredBatch synthetic_trial(const RunConfig& cfg, std::size_t trial);

/// Scores a calibration/test file pair.
ScoredBatch scored_from_files(const RunConfig& cfg);

/// The e-variables the configured variant selects on.
EVector variant_evalues(const RunConfig& cfg, const ScoredBatch& batch, std::size_t trial);

struct SelectResult {
    SelectionOutcome outcome;
    std::optional<SelectionPath> path; // absent for cs and ebh_fixed
    std::size_t m = 0;
    std::size_t degenerate = 0;
    std::optional<double> realized_fdp;
};

/// One selection with the configured variant.
SelectResult select_on(const RunConfig& cfg, const ScoredBatch& batch, std::size_t trial,
                       std::optional<double> level = std::nullopt);

/// Loads the configured data (files, or synthetic trial 0) and selects.
SelectResult run_select(const RunConfig& cfg);

/// Writes path.csv (PH variants) and result.json into cfg.out_dir.
void write_select_outputs(const RunConfig& cfg, const SelectResult& result);

void write_result_json(std::ostream& out, const SelectResult& result);

struct CampaignResult {
    std::vector<TrialReport> primary;  // configured variant
    std::vector<TrialReport> baseline; // CS at cs_level; empty without a baseline
    std::optional<double> cs_level;
};

/// Runs cfg.n_trials independent trials. With a baseline, a second pass
/// replays every trial's data and runs CS at the baseline level; a replay
/// that does not reproduce the first pass's data raises InvariantError.
CampaignResult run_campaign(const RunConfig& cfg);

void write_trials_csv(std::ostream& out, std::span<const TrialReport> reports);
std::vector<TrialReport> read_trials_csv(std::istream& in);

void write_summary(std::ostream& out, std::span<const TrialReport> reports);

/// Size histogram, FDP histogram, utility histogram and (alpha, FDP) scatter,
/// named <prefix>hist_size.csv, <prefix>hist_fdp.csv, <prefix>hist_utility.csv
/// and <prefix>scatter.csv.
void emit_reports(std::span<const TrialReport> reports, const std::filesystem::path& out_dir,
                  const std::string& prefix = "");

/// trials.csv, summary.txt and per-variant report files.
void write_campaign_outputs(const RunConfig& cfg, const CampaignResult& result);

/// Re-aggregates a trials CSV into summary.txt and report files.
void run_report(const RunConfig& cfg);

} // namespace phcs
