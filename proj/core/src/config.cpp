#include "phcs/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "phcs/error.hpp"
#include "phcs/format.hpp"

namespace phcs {

namespace {

constexpr std::array<std::string_view, 35> kKeys = {
    "run.seed",       "run.trials",      "run.workers",     "run.out",          "run.variant",
    "run.alpha",      "run.cs_baseline", "run.cs_alpha_max", "run.in",          "data.source",
    "data.cal",       "data.test",       "score.kind",      "score.gamma",      "score.delta",
    "score.eps",      "score.normalize", "score.norm_min",  "score.norm_max",   "utility.kind",
    "utility.r_min",  "utility.lambda",  "utility.c",       "utility.u_table",  "utility.v_table",
    "sim.n_train",    "sim.n_cal",       "sim.m",           "sim.noise",        "sim.sigma0",
    "sim.het_scale",  "sim.c",           "sim.model",       "sim.knn_k",        "sim.ridge_reg",
};

bool is_known(std::string_view key) {
    for (auto k : kKeys)
        if (k == key) return true;
    return false;
}

const std::string* lookup(const ConfigMap& kv, std::string_view key) {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
}

double get_real(const ConfigMap& kv, std::string_view key, double fallback) {
    const auto* v = lookup(kv, key);
    if (!v) return fallback;
    double x;
    if (!parse_number(*v, x)) throw ConfigError(std::string(key) + ": not a number: '" + *v + "'");
    return x;
}

std::uint64_t get_uint(const ConfigMap& kv, std::string_view key, std::uint64_t fallback) {
    const auto* v = lookup(kv, key);
    if (!v) return fallback;
    const std::string_view text = trim(*v);
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(std::string(key) + ": not a non-negative integer: '" + *v + "'");
    return x;
}

bool get_bool(const ConfigMap& kv, std::string_view key, bool fallback) {
    const auto* v = lookup(kv, key);
    if (!v) return fallback;
    const std::string_view t = trim(*v);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(std::string(key) + ": not a boolean: '" + *v + "'");
}

std::string get_text(const ConfigMap& kv, std::string_view key, std::string fallback) {
    const auto* v = lookup(kv, key);
    return v ? std::string(trim(*v)) : fallback;
}

} // namespace

std::span<const std::string_view> known_config_keys() { return kKeys; }

std::string_view to_string(Baseline b) {
    switch (b) {
    case Baseline::none: return "none";
    case Baseline::fixed: return "fixed";
    case Baseline::matched: return "matched";
    case Baseline::matched_fdp: return "matched_fdp";
    }
    return "?";
}

ConfigMap parse_config(std::string_view text, std::string_view name) {
    ConfigMap out;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = std::string(name) + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
        std::string key(trim(line.substr(0, eq)));
        if (!section.empty()) key = section + "." + key;
        if (!is_known(key)) throw ConfigError(where + "unknown key '" + key + "'");
        out[key] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

ConfigMap read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void RunConfig::validate() const {
    score.validate();
    utility.validate();
    sim.validate();
    if (mode == RunMode::simulate) {
        if (source != DataSource::synthetic) throw ConfigError("simulate needs the synthetic data source");
        if (n_trials < 1) throw ConfigError("run.trials must be at least 1");
        utility.validate_for(sim.m);
    }
    if (source == DataSource::files && (mode == RunMode::select || mode == RunMode::path)) {
        if (cal_file.empty() || test_file.empty()) throw ConfigError("data.cal and data.test are required");
    }
    if (workers < 1) throw ConfigError("run.workers must be at least 1");
    if (variant == Variant::ebh_fixed && !(alpha > 0.0 && alpha < 1.0)) throw ConfigError("run.alpha must lie in (0, 1)");
    if (variant == Variant::cs && !cs_alpha_max) throw ConfigError("variant cs needs run.cs_alpha_max");
    if (baseline == Baseline::fixed && !cs_alpha_max) throw ConfigError("run.cs_baseline = fixed needs run.cs_alpha_max");
    if (cs_alpha_max && !(*cs_alpha_max > 0.0 && *cs_alpha_max < 1.0))
        throw ConfigError("run.cs_alpha_max must lie in (0, 1)");
    if (model == ModelKind::knn && (knn_k < 1 || knn_k > sim.n_train))
        throw ConfigError("sim.knn_k must lie in 1..sim.n_train");
}

RunConfig make_run_config(RunMode mode, const ConfigMap& kv) {
    for (const auto& [key, value] : kv)
        if (!is_known(key)) throw ConfigError("unknown key '" + key + "'");

    RunConfig cfg;
    cfg.mode = mode;
    cfg.cal_file = get_text(kv, "data.cal", "");
    cfg.test_file = get_text(kv, "data.test", "");
    cfg.in_file = get_text(kv, "run.in", "");
    const std::string source = get_text(kv, "data.source", cfg.cal_file.empty() ? "synthetic" : "files");
    if (source == "synthetic") {
        cfg.source = DataSource::synthetic;
        if (!cfg.cal_file.empty() || !cfg.test_file.empty())
            throw ConfigError("data.source = synthetic conflicts with data.cal / data.test");
    } else if (source == "files") {
        cfg.source = DataSource::files;
    } else {
        throw ConfigError("data.source must be 'synthetic' or 'files'");
    }

    cfg.sim.n_train = get_uint(kv, "sim.n_train", cfg.sim.n_train);
    cfg.sim.n_cal = get_uint(kv, "sim.n_cal", cfg.sim.n_cal);
    cfg.sim.m = get_uint(kv, "sim.m", cfg.sim.m);
    cfg.sim.noise = parse_noise_model(get_text(kv, "sim.noise", "homoscedastic"));
    cfg.sim.sigma0 = get_real(kv, "sim.sigma0", cfg.sim.sigma0);
    cfg.sim.het_scale = get_real(kv, "sim.het_scale", cfg.sim.het_scale);
    cfg.sim.c = get_real(kv, "sim.c", cfg.sim.c);
    const std::string model = get_text(kv, "sim.model", "knn");
    if (model == "knn") cfg.model = ModelKind::knn;
    else if (model == "ridge") cfg.model = ModelKind::ridge;
    else throw ConfigError("sim.model must be 'knn' or 'ridge'");
    cfg.knn_k = get_uint(kv, "sim.knn_k", cfg.knn_k);
    cfg.ridge_reg = get_real(kv, "sim.ridge_reg", cfg.ridge_reg);

    cfg.score.kind = parse_score_kind(get_text(kv, "score.kind", "clipped_odds"));
    cfg.score.gamma = get_real(kv, "score.gamma", cfg.source == DataSource::synthetic ? 3.0 : 50.0);
    cfg.score.delta = get_real(kv, "score.delta", cfg.score.delta);
    cfg.score.eps = get_real(kv, "score.eps", cfg.score.eps);
    cfg.score.normalize = get_bool(kv, "score.normalize", cfg.source == DataSource::synthetic);
    cfg.score.norm_min = get_real(kv, "score.norm_min", cfg.score.norm_min);
    cfg.score.norm_max = get_real(kv, "score.norm_max", cfg.score.norm_max);

    cfg.utility.kind = parse_utility_kind(get_text(kv, "utility.kind", "constrained_size"));
    cfg.utility.r_min = get_uint(kv, "utility.r_min", 0);
    cfg.utility.lambda = get_real(kv, "utility.lambda", 0.0);
    cfg.utility.offset_c = get_real(kv, "utility.c", 0.0);
    if (const auto* t = lookup(kv, "utility.u_table")) cfg.utility.u_table = parse_number_list(*t);
    if (const auto* t = lookup(kv, "utility.v_table")) cfg.utility.v_table = parse_number_list(*t);

    cfg.variant = parse_variant(get_text(kv, "run.variant", "ph_cs"));
    cfg.alpha = get_real(kv, "run.alpha", cfg.alpha);
    const std::string baseline = get_text(kv, "run.cs_baseline", "none");
    if (baseline == "none") cfg.baseline = Baseline::none;
    else if (baseline == "fixed") cfg.baseline = Baseline::fixed;
    else if (baseline == "matched") cfg.baseline = Baseline::matched;
    else if (baseline == "matched_fdp") cfg.baseline = Baseline::matched_fdp;
    else throw ConfigError("run.cs_baseline must be none, fixed, matched or matched_fdp");
    if (lookup(kv, "run.cs_alpha_max")) cfg.cs_alpha_max = get_real(kv, "run.cs_alpha_max", 0.0);

    cfg.n_trials = get_uint(kv, "run.trials", cfg.n_trials);
    cfg.seed = get_uint(kv, "run.seed", cfg.seed);
    cfg.workers = get_uint(kv, "run.workers", cfg.workers);
    cfg.out_dir = get_text(kv, "run.out", cfg.out_dir);
    return cfg;
}

} // namespace phcs
