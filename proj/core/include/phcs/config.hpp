#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "phcs/datasim.hpp"
#include "phcs/scoring.hpp"
#include "phcs/selection.hpp"
#include "phcs/utility.hpp"

namespace phcs {

/// Flat dotted-key configuration, e.g. "score.gamma" -> "3".
using ConfigMap = std::map<std::string, std::string, std::less<>>;

/// Every key the toolkit understands; each one is also a CLI flag.
std::span<const std::string_view> known_config_keys();

/// Parses `key = value` lines. `[section]` headers prefix the following keys
/// with "section.". '#' and ';' start comments. Unknown keys are rejected.
ConfigMap parse_config(std::string_view text, std::string_view name = "config");
ConfigMap read_config_file(const std::string& path);

enum class RunMode { select, path, simulate, report };

enum class DataSource { synthetic, files };

enum class ModelKind { knn, ridge };

/// How the CS baseline level is set in a campaign.
enum class Baseline {
    none,
    fixed,           // run.cs_alpha_max
    matched,         // campaign mean of the declared PH-CS levels
    matched_fdp,     // campaign mean of the realised PH-CS FDP
};

std::string_view to_string(Baseline b);

struct RunConfig {
    RunMode mode = RunMode::select;
    DataSource source = DataSource::synthetic;
    std::string cal_file;
    std::string test_file;
    std::string in_file; // trials CSV for the report mode
    SyntheticConfig sim;
    ModelKind model = ModelKind::knn;
    std::size_t knn_k = 10;
    double ridge_reg = 1.0;
    ScoreSpec score;
    UtilitySpec utility;
    Variant variant = Variant::ph_cs;
    double alpha = 0.1; // level for ebh_fixed
    Baseline baseline = Baseline::none;
    std::optional<double> cs_alpha_max;
    std::size_t n_trials = 100;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string out_dir = "out";

    void validate() const;
};

/// Builds a typed run configuration. Missing keys keep their defaults; the
/// score defaults to gamma = 3 for synthetic data and 50 for ingested files.
RunConfig make_run_config(RunMode mode, const ConfigMap& kv);

} // namespace phcs
