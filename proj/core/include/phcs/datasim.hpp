#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "phcs/rng.hpp"

namespace phcs {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t synthetic_dim = 20;

enum class NoiseModel { homoscedastic, heteroscedastic };

std::string_view to_string(NoiseModel noise);
NoiseModel parse_noise_model(std::string_view text);

struct SyntheticConfig {
    std::size_t n_train = 1000;
    std::size_t n_cal = 1000;
    std::size_t m = 100;
    NoiseModel noise = NoiseModel::homoscedastic;
    double sigma0 = 0.15;
    double het_scale = 0.1;
    double c = 0.0;

    void validate() const;
};

enum class BatchRole { train, calibration, test };

struct LabeledBatch {
    Matrix covariates;
    std::vector<double> responses;
    BatchRole role = BatchRole::train;

    std::size_t size() const noexcept { return responses.size(); }
    std::span<const double> row(std::size_t i) const {
        return {covariates.data() + i * covariates.cols(), static_cast<std::size_t>(covariates.cols())};
    }
};

struct SyntheticData {
    LabeledBatch train;
    LabeledBatch cal;
    LabeledBatch test;
};

/// f(x) = 5 (x1 x2 + exp(x4 - 1)), with 1-based coordinates.
double synthetic_mean(std::span<const double> x);

/// Noise standard deviation at x for the configured model.
double synthetic_noise_sd(const SyntheticConfig& cfg, std::span<const double> x);

/// Draws train, calibration, and test batches (in that order) from one
/// stream: x ~ U[-1, 1]^20, y = f(x) + noise.
SyntheticData gen_synthetic(const SyntheticConfig& cfg, Rng& rng);

/// FNV-1a over the raw bytes of every batch; used to check that a replayed
/// trial regenerated exactly the same data.
std::uint64_t hash_batches(const SyntheticData& data);

class Regressor {
public:
    virtual ~Regressor() = default;
    virtual double predict(std::span<const double> x) const = 0;

    std::vector<double> predict_all(const LabeledBatch& batch) const;
};

/// Mean response of the k nearest training points (Euclidean). Distance ties
/// resolve toward the lower training index.
class KnnRegressor final : public Regressor {
public:
    KnnRegressor(const LabeledBatch& train, std::size_t k);
    double predict(std::span<const double> x) const override;

private:
    Matrix points_;
    std::vector<double> responses_;
    std::size_t k_;
};

/// Ridge regression with an unpenalised intercept, solved from the normal
/// equations by Cholesky factorisation.
class RidgeRegressor final : public Regressor {
public:
    RidgeRegressor(const LabeledBatch& train, double reg);
    double predict(std::span<const double> x) const override;

    double intercept() const noexcept { return intercept_; }
    const Eigen::VectorXd& coefficients() const noexcept { return coef_; }

private:
    double intercept_ = 0.0;
    Eigen::VectorXd coef_;
};

std::unique_ptr<Regressor> fit_knn(const LabeledBatch& train, std::size_t k);
std::unique_ptr<Regressor> fit_ridge(const LabeledBatch& train, double reg);

enum class FileMode { classifier, regression };

/// One calibration unit. In classifier mode y is the 0/1 label and c = 0.
struct CalibrationRow {
    double mu = 0.0;
    double y = 0.0;
    double c = 0.0;
};

struct TestRow {
    double mu = 0.0;
    double c = 0.0;
    std::optional<double> y;
    std::optional<double> e_g;
    std::optional<double> w;
};

struct PredictionData {
    FileMode mode = FileMode::classifier;
    std::vector<CalibrationRow> cal;
    std::vector<TestRow> test;

    bool labeled() const;
    bool has_external_e() const;
    bool has_weights() const;
};

/// Parses the calibration CSV (`mu,label` or `mu,y,c`) and the test CSV
/// (`mu,c` plus optional `y`, `e_g`, `w`). Lines starting with '#' and blank
/// lines are skipped. Errors name the file and line.
PredictionData load_predictions(const std::string& cal_file, const std::string& test_file);

/// Same, from in-memory text; `cal_name` and `test_name` label diagnostics.
PredictionData parse_predictions(std::string_view cal_text, std::string_view test_text,
                                 std::string_view cal_name = "calibration",
                                 std::string_view test_name = "test");

} // namespace phcs
