#include "phcs/datasim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "phcs/error.hpp"
#include "phcs/format.hpp"

namespace phcs {

std::string_view to_string(NoiseModel noise) {
    return noise == NoiseModel::homoscedastic ? "homoscedastic" : "heteroscedastic";
}

NoiseModel parse_noise_model(std::string_view text) {
    if (text == "homoscedastic") return NoiseModel::homoscedastic;
    if (text == "heteroscedastic") return NoiseModel::heteroscedastic;
    throw ConfigError("unknown noise model '" + std::string(text) + "'");
}

void SyntheticConfig::validate() const {
    if (n_train == 0 || n_cal == 0 || m == 0) throw ConfigError("sim.n_train, sim.n_cal and sim.m must be positive");
    if (!(sigma0 >= 0.0) || !(het_scale >= 0.0)) throw ConfigError("noise scales must be non-negative");
    if (!std::isfinite(c)) throw ConfigError("sim.c must be finite");
}

double synthetic_mean(std::span<const double> x) {
    return 5.0 * (x[0] * x[1] + std::exp(x[3] - 1.0));
}

double synthetic_noise_sd(const SyntheticConfig& cfg, std::span<const double> x) {
    if (cfg.noise == NoiseModel::homoscedastic) return cfg.sigma0;
    return cfg.het_scale * (5.5 - std::abs(synthetic_mean(x))) / 2.0;
}

namespace {

LabeledBatch draw_batch(const SyntheticConfig& cfg, std::size_t n, BatchRole role, Rng& rng) {
    LabeledBatch batch;
    batch.role = role;
    batch.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(synthetic_dim));
    batch.responses.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = batch.covariates.data() + i * synthetic_dim;
        for (std::size_t d = 0; d < synthetic_dim; ++d) row[d] = rng.uniform(-1.0, 1.0);
        const std::span<const double> x(row, synthetic_dim);
        batch.responses[i] = synthetic_mean(x) + synthetic_noise_sd(cfg, x) * rng.normal();
    }
    return batch;
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

} // namespace

SyntheticData gen_synthetic(const SyntheticConfig& cfg, Rng& rng) {
    cfg.validate();
    SyntheticData data;
    data.train = draw_batch(cfg, cfg.n_train, BatchRole::train, rng);
    data.cal = draw_batch(cfg, cfg.n_cal, BatchRole::calibration, rng);
    data.test = draw_batch(cfg, cfg.m, BatchRole::test, rng);
    return data;
}

std::uint64_t hash_batches(const SyntheticData& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const LabeledBatch* b : {&data.train, &data.cal, &data.test}) {
        fnv1a(h, b->covariates.data(), sizeof(double) * static_cast<std::size_t>(b->covariates.size()));
        fnv1a(h, b->responses.data(), sizeof(double) * b->responses.size());
    }
    return h;
}

std::vector<double> Regressor::predict_all(const LabeledBatch& batch) const {
    std::vector<double> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) out[i] = predict(batch.row(i));
    return out;
}

KnnRegressor::KnnRegressor(const LabeledBatch& train, std::size_t k)
    : points_(train.covariates), responses_(train.responses), k_(k) {
    if (train.size() == 0) throw DataError("k-NN needs a non-empty training set");
    if (k == 0 || k > train.size()) throw ConfigError("k-NN needs 1 <= k <= n_train");
}

double KnnRegressor::predict(std::span<const double> x) const {
    const std::size_t n = responses_.size();
    const auto dim = static_cast<std::size_t>(points_.cols());
    if (x.size() != dim) throw DataError("query dimension does not match training data");
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* p = points_.data() + i * dim;
        double d2 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = p[d] - x[d];
            d2 += diff * diff;
        }
        dist[i] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i) sum += responses_[dist[i].second];
    return sum / static_cast<double>(k_);
}

RidgeRegressor::RidgeRegressor(const LabeledBatch& train, double reg) {
    if (train.size() == 0) throw DataError("ridge regression needs a non-empty training set");
    if (!(reg >= 0.0) || !std::isfinite(reg)) throw ConfigError("ridge penalty must be non-negative");
    const Eigen::Index n = train.covariates.rows();
    const Eigen::Index p = train.covariates.cols();

    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = train.covariates;
    const Eigen::Map<const Eigen::VectorXd> y(train.responses.data(), n);

    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().tail(p).array() += reg;
    const Eigen::VectorXd rhs = design.transpose() * y;

    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13)) {
        throw DataError(reg == 0.0 ? "normal equations are singular; use a ridge penalty reg > 0"
                                   : "normal equations are numerically singular; increase the ridge penalty");
    }
    const Eigen::VectorXd beta = llt.solve(rhs);
    intercept_ = beta(0);
    coef_ = beta.tail(p);
}

double RidgeRegressor::predict(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(coef_.size())) throw DataError("query dimension does not match model");
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), coef_.size());
    return intercept_ + coef_.dot(v);
}

std::unique_ptr<Regressor> fit_knn(const LabeledBatch& train, std::size_t k) {
    return std::make_unique<KnnRegressor>(train, k);
}

std::unique_ptr<Regressor> fit_ridge(const LabeledBatch& train, double reg) {
    return std::make_unique<RidgeRegressor>(train, reg);
}

bool PredictionData::labeled() const {
    return !test.empty() && std::all_of(test.begin(), test.end(), [](const TestRow& r) { return r.y.has_value(); });
}

bool PredictionData::has_external_e() const {
    return !test.empty() && std::all_of(test.begin(), test.end(), [](const TestRow& r) { return r.e_g.has_value(); });
}

bool PredictionData::has_weights() const {
    return !test.empty() && std::all_of(test.begin(), test.end(), [](const TestRow& r) { return r.w.has_value(); });
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<double>>> rows; // (line number, fields)
};

[[noreturn]] void fail_at(std::string_view file, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << file << ':' << line << ": " << what;
    throw DataError(msg.str());
}

CsvTable parse_table(std::string_view text, std::string_view name) {
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        const auto fields = split(line, ',');
        if (table.header.empty()) {
            for (auto f : fields) table.header.emplace_back(trim(f));
        } else {
            if (fields.size() != table.header.size())
                fail_at(name, line_no,
                        "expected " + std::to_string(table.header.size()) + " fields, got " + std::to_string(fields.size()));
            std::vector<double> values(fields.size());
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (!parse_number(fields[i], values[i]) || !std::isfinite(values[i]))
                    fail_at(name, line_no, "cannot parse '" + std::string(trim(fields[i])) + "' as a number");
            }
            table.rows.emplace_back(line_no, std::move(values));
        }
        if (end == text.size()) break;
    }
    if (table.header.empty()) fail_at(name, line_no, "missing header");
    return table;
}

std::optional<std::size_t> column(const CsvTable& t, std::string_view name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return i;
    return std::nullopt;
}

void check_unit_interval(double mu, std::string_view file, std::size_t line) {
    if (!(mu >= 0.0 && mu <= 1.0)) fail_at(file, line, "prediction outside [0, 1] in classifier mode");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

PredictionData parse_predictions(std::string_view cal_text, std::string_view test_text, std::string_view cal_name,
                                 std::string_view test_name) {
    const CsvTable cal = parse_table(cal_text, cal_name);
    const CsvTable test = parse_table(test_text, test_name);

    PredictionData data;
    const auto mu_col = column(cal, "mu");
    if (!mu_col) fail_at(cal_name, 1, "calibration header needs a 'mu' column");
    const auto label_col = column(cal, "label");
    const auto y_col = column(cal, "y");
    const auto c_col = column(cal, "c");
    if (label_col && cal.header.size() == 2) {
        data.mode = FileMode::classifier;
    } else if (y_col && c_col && cal.header.size() == 3) {
        data.mode = FileMode::regression;
    } else {
        fail_at(cal_name, 1, "calibration header must be 'mu,label' or 'mu,y,c'");
    }

    for (const auto& [line, v] : cal.rows) {
        CalibrationRow row;
        row.mu = v[*mu_col];
        if (data.mode == FileMode::classifier) {
            check_unit_interval(row.mu, cal_name, line);
            const double label = v[*label_col];
            if (label != 0.0 && label != 1.0) fail_at(cal_name, line, "label must be 0 or 1");
            row.y = label;
            row.c = 0.0;
        } else {
            row.y = v[*y_col];
            row.c = v[*c_col];
        }
        data.cal.push_back(row);
    }

    const auto t_mu = column(test, "mu");
    const auto t_c = column(test, "c");
    if (!t_mu || !t_c) fail_at(test_name, 1, "test header needs 'mu' and 'c' columns");
    const auto t_y = column(test, "y");
    const auto t_e = column(test, "e_g");
    const auto t_w = column(test, "w");
    const std::size_t known = 2 + (t_y ? 1 : 0) + (t_e ? 1 : 0) + (t_w ? 1 : 0);
    if (known != test.header.size()) fail_at(test_name, 1, "unknown column in test header");

    for (const auto& [line, v] : test.rows) {
        TestRow row;
        row.mu = v[*t_mu];
        row.c = v[*t_c];
        if (data.mode == FileMode::classifier) check_unit_interval(row.mu, test_name, line);
        if (t_y) row.y = v[*t_y];
        if (t_e) {
            if (v[*t_e] < 0.0) fail_at(test_name, line, "e_g must be non-negative");
            row.e_g = v[*t_e];
        }
        if (t_w) {
            if (v[*t_w] < 0.0) fail_at(test_name, line, "w must be non-negative");
            row.w = v[*t_w];
        }
        data.test.push_back(row);
    }
    return data;
}

PredictionData load_predictions(const std::string& cal_file, const std::string& test_file) {
    const std::string cal_text = read_file(cal_file);
    const std::string test_text = read_file(test_file);
    return parse_predictions(cal_text, test_text, cal_file, test_file);
}

} // namespace phcs
