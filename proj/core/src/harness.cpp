#include "phcs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <limits>
#include <map>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "phcs/datasim.hpp"
#include "phcs/error.hpp"
#include "phcs/format.hpp"
#include "phcs/rng.hpp"

namespace phcs {

namespace {

template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

std::unique_ptr<Regressor> fit_model(const RunConfig& cfg, const LabeledBatch& train) {
    if (cfg.model == ModelKind::ridge) return fit_ridge(train, cfg.ridge_reg);
    return fit_knn(train, cfg.knn_k);
}

std::vector<double> uniform_draws(std::uint64_t seed, std::size_t trial, std::uint32_t lane, std::size_t count) {
    Rng rng(seed, trial, lane);
    std::vector<double> out(count);
    for (double& u : out) u = rng.uniform_open();
    return out;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw DataError("cannot create output directory " + dir.string());
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write " + file.string());
    return out;
}

void write_histogram(std::ostream& out, std::span<const double> values, double lo, double hi, std::size_t bins) {
    out << "bin_lo,bin_hi,count\n";
    if (values.empty()) return;
    std::vector<std::size_t> counts(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        std::size_t b = width > 0.0 ? static_cast<std::size_t>(std::floor((v - lo) / width)) : 0;
        counts[std::min(b, bins - 1)]++;
    }
    for (std::size_t b = 0; b < bins; ++b) {
        const double b_lo = lo + width * static_cast<double>(b);
        const double b_hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
        out << format_number(b_lo) << ',' << format_number(b_hi) << ',' << counts[b] << '\n';
    }
}

constexpr std::size_t kHistogramBins = 20;

} // namespace

ScoredBatch synthetic_trial(const RunConfig& cfg, std::size_t trial) {
    Rng rng(cfg.seed, trial, lanes::data);
    const SyntheticData data = gen_synthetic(cfg.sim, rng);
    const auto model = fit_model(cfg, data.train);

    ScoreSpec spec = cfg.score;
    if (spec.normalize) {
        const auto train_pred = model->predict_all(data.train);
        const auto [lo, hi] = std::minmax_element(train_pred.begin(), train_pred.end());
        spec.norm_min = *lo;
        spec.norm_max = *hi;
        if (!(spec.norm_min < spec.norm_max)) throw DataError("training predictions are constant; cannot normalise");
    }
    const auto prepare = [&](double raw) {
        return spec.normalize ? normalize_prediction(raw, spec) : clamp_prediction(raw, spec);
    };

    ScoredBatch out;
    out.data_hash = hash_batches(data);
    const double c = cfg.sim.c;
    const auto cal_pred = model->predict_all(data.cal);
    out.cal_scores.reserve(data.cal.size());
    for (std::size_t i = 0; i < data.cal.size(); ++i)
        out.cal_scores.push_back(score_value(spec, prepare(cal_pred[i]), data.cal.responses[i], c));

    const auto test_pred = model->predict_all(data.test);
    for (std::size_t j = 0; j < data.test.size(); ++j) {
        const Prediction mu = prepare(test_pred[j]);
        const double y = data.test.responses[j];
        out.test_scores.push_back(score_at_threshold(spec, mu, c));
        out.true_test_scores.push_back(score_value(spec, mu, y, c));
        out.nulls.push_back(y <= c);
    }
    return out;
}

ScoredBatch scored_from_files(const RunConfig& cfg) {
    const PredictionData data = load_predictions(cfg.cal_file, cfg.test_file);
    if (data.test.empty()) throw DataError("no test units");
    if (data.cal.empty()) throw DataError("no calibration units");
    const ScoreSpec& spec = cfg.score;
    const auto prepare = [&](double mu) {
        if (data.mode == FileMode::regression && spec.normalize) return normalize_prediction(mu, spec);
        return clamp_prediction(mu, spec);
    };

    ScoredBatch out;
    for (const auto& row : data.cal) out.cal_scores.push_back(score_value(spec, prepare(row.mu), row.y, row.c));
    const bool labeled = data.labeled();
    for (const auto& row : data.test) {
        const Prediction mu = prepare(row.mu);
        out.test_scores.push_back(score_at_threshold(spec, mu, row.c));
        if (labeled) {
            out.true_test_scores.push_back(score_value(spec, mu, *row.y, row.c));
            out.nulls.push_back(*row.y <= row.c);
        }
    }
    if (data.has_external_e()) {
        out.e_external.emplace();
        for (const auto& row : data.test) out.e_external->push_back(*row.e_g);
    }
    if (data.has_weights()) {
        out.weights.emplace();
        for (const auto& row : data.test) out.weights->push_back(*row.w);
    }
    return out;
}

EVector variant_evalues(const RunConfig& cfg, const ScoredBatch& batch, std::size_t trial) {
    const CalibrationScores cal(batch.cal_scores);
    switch (cfg.variant) {
    case Variant::ph_cs:
    case Variant::ebh_fixed:
        return conformal_e_batch(cal, batch.test_scores, EKind::standard);
    case Variant::ph_rcs:
    case Variant::ph_rcs_weighted: {
        EVector e;
        if (batch.e_external) {
            e.values = *batch.e_external;
            e.kind = EKind::risk_adjusted;
            e.validate();
        } else {
            e = conformal_e_batch(cal, batch.test_scores, EKind::risk_adjusted);
        }
        if (cfg.variant == Variant::ph_rcs) return e;
        WeightVector w;
        if (batch.weights) w.values = *batch.weights;
        else w = rescale_weights(uniform_draws(cfg.seed, trial, lanes::weights, batch.m()), batch.m());
        return weighted_e(e, w);
    }
    case Variant::cs:
        break;
    }
    throw InvariantError("variant cs does not use e-values");
}

SelectResult select_on(const RunConfig& cfg, const ScoredBatch& batch, std::size_t trial, std::optional<double> level) {
    if (batch.m() == 0) throw DataError("no test units");
    SelectResult res;
    res.m = batch.m();
    const Variant variant = level ? Variant::cs : cfg.variant;

    if (variant == Variant::cs) {
        const double alpha_max = level ? *level : cfg.cs_alpha_max.value_or(0.0);
        const CalibrationScores cal(batch.cal_scores);
        const auto draws = uniform_draws(cfg.seed, trial, lanes::tiebreak, batch.m());
        res.outcome = bh_select(conformal_p_batch(cal, batch.test_scores, draws), alpha_max);
    } else if (variant == Variant::ebh_fixed) {
        const EVector e = variant_evalues(cfg, batch, trial);
        res.degenerate = e.degenerate;
        res.outcome = ebh_select(e, cfg.alpha);
    } else {
        cfg.utility.validate_for(batch.m());
        PostHocResult r = [&] {
            if (variant == Variant::ph_cs) return ph_cs(CalibrationScores(batch.cal_scores), batch.test_scores, cfg.utility);
            return ph_rcs(variant_evalues(cfg, batch, trial), cfg.utility);
        }();
        if (variant == Variant::ph_cs) res.degenerate = conformal_e_batch(CalibrationScores(batch.cal_scores), batch.test_scores).degenerate;
        res.outcome = std::move(r.outcome);
        res.path = std::move(r.path);
    }
    if (batch.labeled()) res.realized_fdp = fdp(res.outcome.members, batch.nulls);
    return res;
}

SelectResult run_select(const RunConfig& cfg) {
    cfg.validate();
    const ScoredBatch batch = cfg.source == DataSource::files ? scored_from_files(cfg) : synthetic_trial(cfg, 0);
    return select_on(cfg, batch, 0);
}

void write_result_json(std::ostream& out, const SelectResult& result) {
    nlohmann::ordered_json j;
    j["variant"] = std::string(to_string(result.outcome.variant));
    j["m"] = result.m;
    j["k"] = result.outcome.k;
    j["set_size"] = result.outcome.members.size();
    j["alpha"] = result.outcome.alpha;
    if (result.path) {
        if (std::isfinite(result.outcome.utility_value)) j["utility"] = result.outcome.utility_value;
        else j["utility"] = nullptr;
    }
    j["members"] = result.outcome.members;
    j["degenerate_units"] = result.degenerate;
    if (result.realized_fdp) j["realized_fdp"] = *result.realized_fdp;
    out << j.dump(2) << '\n';
}

void write_select_outputs(const RunConfig& cfg, const SelectResult& result) {
    const std::filesystem::path dir(cfg.out_dir);
    ensure_dir(dir);
    if (result.path) {
        auto out = open_out(dir / "path.csv");
        write_path_csv(out, *result.path, cfg.utility, result.outcome.k);
    }
    auto out = open_out(dir / "result.json");
    write_result_json(out, result);
}

CampaignResult run_campaign(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.source != DataSource::synthetic) throw ConfigError("campaigns need the synthetic data source");
    const std::size_t n = cfg.n_trials;
    const std::size_t m = cfg.sim.m;

    const auto report_for = [&](std::size_t t, const SelectResult& r) {
        TrialReport rep;
        rep.trial_id = t;
        rep.variant = r.outcome.variant;
        rep.set_size = r.outcome.members.size();
        rep.declared_alpha = r.outcome.alpha;
        rep.realized_fdp = r.realized_fdp.value_or(0.0);
        rep.realized_utility = evaluate(cfg.utility, rep.set_size, rep.realized_fdp, m);
        rep.seed = cfg.seed;
        return rep;
    };

    CampaignResult result;
    result.primary.resize(n);
    std::vector<std::uint64_t> hashes(n);
    parallel_for(n, cfg.workers, [&](std::size_t t) {
        const ScoredBatch batch = synthetic_trial(cfg, t);
        hashes[t] = batch.data_hash;
        result.primary[t] = report_for(t, select_on(cfg, batch, t));
    });

    if (cfg.baseline == Baseline::none || cfg.variant == Variant::cs) return result;

    double level = 0.0;
    if (cfg.baseline == Baseline::fixed) {
        level = *cfg.cs_alpha_max;
    } else {
        const AggregateReport agg = aggregate(result.primary);
        level = cfg.baseline == Baseline::matched ? agg.alpha.mean : agg.fdp.mean;
    }
    if (!(level > 0.0 && level < 1.0))
        throw DataError("matched CS level " + format_number(level) + " lies outside (0, 1)");
    result.cs_level = level;

    result.baseline.resize(n);
    parallel_for(n, cfg.workers, [&](std::size_t t) {
        const ScoredBatch batch = synthetic_trial(cfg, t);
        if (batch.data_hash != hashes[t])
            throw InvariantError("replayed data for trial " + std::to_string(t) + " differs from the first pass");
        result.baseline[t] = report_for(t, select_on(cfg, batch, t, level));
    });
    return result;
}

void write_trials_csv(std::ostream& out, std::span<const TrialReport> reports) {
    out << "trial_id,variant,seed,set_size,declared_alpha,realized_fdp,realized_utility\n";
    for (const auto& r : reports) {
        out << r.trial_id << ',' << to_string(r.variant) << ',' << r.seed << ',' << r.set_size << ','
            << format_number(r.declared_alpha) << ',' << format_number(r.realized_fdp) << ','
            << format_number(r.realized_utility) << '\n';
    }
}

std::vector<TrialReport> read_trials_csv(std::istream& in) {
    std::vector<TrialReport> out;
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (header) {
            if (text != "trial_id,variant,seed,set_size,declared_alpha,realized_fdp,realized_utility")
                throw DataError("trials CSV: unexpected header");
            header = false;
            continue;
        }
        const auto f = split(text, ',');
        const auto bad = [&] { return DataError("trials CSV line " + std::to_string(line_no) + ": malformed row"); };
        if (f.size() != 7) throw bad();
        TrialReport r;
        double id, seed, size, utility;
        if (!parse_number(f[0], id) || !parse_number(f[2], seed) || !parse_number(f[3], size) ||
            !parse_number(f[4], r.declared_alpha) || !parse_number(f[5], r.realized_fdp))
            throw bad();
        if (trim(f[6]) == "-inf") utility = -std::numeric_limits<double>::infinity();
        else if (!parse_number(f[6], utility)) throw bad();
        r.trial_id = static_cast<std::size_t>(id);
        r.variant = parse_variant(trim(f[1]));
        // Seeds above 2^53 do not survive a double; reparse as an integer.
        const auto seed_text = trim(f[2]);
        std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), r.seed);
        r.set_size = static_cast<std::size_t>(size);
        r.realized_utility = utility;
        out.push_back(r);
    }
    return out;
}

void write_summary(std::ostream& out, std::span<const TrialReport> reports) {
    // Group by variant, preserving first-appearance order.
    std::vector<Variant> order;
    for (const auto& r : reports)
        if (std::find(order.begin(), order.end(), r.variant) == order.end()) order.push_back(r.variant);
    if (order.empty()) out << "no trials\n";
    for (Variant v : order) {
        std::vector<TrialReport> group;
        for (const auto& r : reports)
            if (r.variant == v) group.push_back(r);
        const AggregateReport agg = aggregate(group);
        const TaylorGap gap = taylor_gap(group);
        const auto line = [&](const char* name, const MeanEstimate& e) {
            out << "  " << name << " = " << format_number(e.mean) << " (se " << format_number(e.se) << ")\n";
        };
        out << "[" << to_string(v) << "]\n";
        out << "  n_trials = " << agg.n_trials << '\n';
        line("mean_fdp", agg.fdp);
        line("mean_alpha", agg.alpha);
        line("reliability_ratio", agg.reliability);
        line("mean_size", agg.size);
        line("mean_utility", agg.utility);
        out << "  taylor_gap = " << format_number(gap.gap) << " (se " << format_number(gap.se) << ")\n";
    }
}

void emit_reports(std::span<const TrialReport> reports, const std::filesystem::path& out_dir, const std::string& prefix) {
    ensure_dir(out_dir);
    {
        std::map<std::size_t, std::size_t> sizes;
        for (const auto& r : reports) sizes[r.set_size]++;
        auto out = open_out(out_dir / (prefix + "hist_size.csv"));
        out << "size,count\n";
        for (const auto& [size, count] : sizes) out << size << ',' << count << '\n';
    }
    {
        std::vector<double> fdps;
        for (const auto& r : reports) fdps.push_back(r.realized_fdp);
        auto out = open_out(out_dir / (prefix + "hist_fdp.csv"));
        write_histogram(out, fdps, 0.0, 1.0, kHistogramBins);
    }
    {
        std::vector<double> utilities;
        for (const auto& r : reports)
            if (std::isfinite(r.realized_utility)) utilities.push_back(r.realized_utility);
        auto out = open_out(out_dir / (prefix + "hist_utility.csv"));
        if (utilities.empty()) {
            out << "bin_lo,bin_hi,count\n";
        } else {
            const auto [lo, hi] = std::minmax_element(utilities.begin(), utilities.end());
            write_histogram(out, utilities, *lo, *hi, *lo < *hi ? kHistogramBins : 1);
        }
    }
    {
        auto out = open_out(out_dir / (prefix + "scatter.csv"));
        out << "declared_alpha,realized_fdp\n";
        for (const auto& r : reports) out << format_number(r.declared_alpha) << ',' << format_number(r.realized_fdp) << '\n';
    }
}

namespace {

void emit_by_variant(std::span<const TrialReport> reports, const std::filesystem::path& dir) {
    std::vector<Variant> seen;
    for (const auto& r : reports)
        if (std::find(seen.begin(), seen.end(), r.variant) == seen.end()) seen.push_back(r.variant);
    for (Variant v : seen) {
        std::vector<TrialReport> group;
        for (const auto& r : reports)
            if (r.variant == v) group.push_back(r);
        emit_reports(group, dir, std::string(to_string(v)) + "_");
    }
}

} // namespace

void write_campaign_outputs(const RunConfig& cfg, const CampaignResult& result) {
    const std::filesystem::path dir(cfg.out_dir);
    ensure_dir(dir);
    std::vector<TrialReport> all = result.primary;
    all.insert(all.end(), result.baseline.begin(), result.baseline.end());
    {
        auto out = open_out(dir / "trials.csv");
        write_trials_csv(out, all);
    }
    {
        auto out = open_out(dir / "summary.txt");
        if (result.cs_level)
            out << "cs_alpha_max = " << format_number(*result.cs_level) << " (" << to_string(cfg.baseline) << ")\n";
        write_summary(out, all);
    }
    emit_by_variant(all, dir);
}

void run_report(const RunConfig& cfg) {
    if (cfg.in_file.empty()) throw ConfigError("report needs run.in (a trials CSV)");
    std::ifstream in(cfg.in_file);
    if (!in) throw DataError("cannot open " + cfg.in_file);
    const auto reports = read_trials_csv(in);
    const std::filesystem::path dir(cfg.out_dir);
    ensure_dir(dir);
    {
        auto out = open_out(dir / "summary.txt");
        write_summary(out, reports);
    }
    emit_by_variant(reports, dir);
}

} // namespace phcs
