#pragma once

// Fully connected regressor M(x) -> M_info: Adam mini-batch training with
// dropout, early stopping on a validation split, k-fold RMSE and JSON
// persistence.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mfid/core.hpp"
#include "mfid/dataset.hpp"

namespace mfid::surrogate {

enum class Activation { relu, leaky_relu, linear };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

struct MlpConfig {
    std::vector<int> widths;        // hidden layers
    Activation activation = Activation::relu;
    std::vector<double> dropout;    // one rate per hidden layer
    int epochs = 100;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double validation_fraction = 0.3;
    int patience = 20;
    double leaky_slope = 0.3;

    static MlpConfig sfr_default();
    static MlpConfig aid_default();
    static MlpConfig for_problem(Problem p);
    void validate() const;
};

class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DenseLayer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
};

struct TrainingHistory {
    std::vector<double> train_loss;       // mean mini-batch loss per epoch
    std::vector<double> validation_loss;  // standardized MSE per epoch
    int best_epoch = -1;                  // -1 when no epoch ran
    bool stopped_early = false;
};

class SurrogateModel {
public:
    std::size_t input_dim() const { return static_cast<std::size_t>(input_mean.size()); }

    double predict(std::span<const double> x) const;
    Vector predict(const std::vector<Vector>& xs) const;

    /// Standardized copy of x as fed to the first layer.
    Eigen::VectorXd standardize(std::span<const double> x) const;

    std::size_t parameter_count() const;

    Activation activation = Activation::relu;
    double leaky_slope = 0.3;
    std::vector<DenseLayer> layers;  // hidden layers followed by the scalar output layer
    Eigen::VectorXd input_mean, input_scale;
    double label_mean = 0.0, label_scale = 1.0;
    double cv_rmse = 0.0;
    TrainingHistory history;
};

/// Requires n >= 10. Throws TrainingDiverged if the loss goes non-finite.
SurrogateModel train(const dataset::Dataset& data, const MlpConfig& cfg, std::uint64_t seed);

/// RMSE between predictions and labels.
double rmse(const SurrogateModel& model, const std::vector<Vector>& xs, const Vector& ys);

struct KFoldResult {
    double mean_rmse = 0.0;
    double std_rmse = 0.0;
    std::vector<double> fold_rmse;
};

/// Shuffled k-fold cross validation. Throws std::invalid_argument if n < k.
KFoldResult kfold_rmse(const dataset::Dataset& data, const MlpConfig& cfg, int k, std::uint64_t seed);

/// Trains on all rows and attaches the k-fold mean RMSE as cv_rmse.
SurrogateModel fit_with_cv(const dataset::Dataset& data, const MlpConfig& cfg, int k, std::uint64_t seed);

/// Directional derivative of the squared error (f(x) - y)^2 with respect to
/// the parameters along `direction` (length parameter_count(), same order as
/// flatten_parameters): backpropagation vs central difference. Returns the
/// relative error, 0 when both sides vanish.
double gradient_check(const SurrogateModel& model, std::span<const double> x, double y,
                      std::span<const double> direction, double h = 1e-5);

Vector flatten_parameters(const SurrogateModel& model);
void assign_parameters(SurrogateModel& model, std::span<const double> params);

/// Network with the given shape and seeded initial weights, identity scaling.
SurrogateModel initialize(std::size_t input_dim, const MlpConfig& cfg, std::uint64_t seed);

std::string to_json(const SurrogateModel& model);
SurrogateModel from_json(const std::string& text);
void save_model(const SurrogateModel& model, const std::string& path);
SurrogateModel load_model(const std::string& path);

}  // namespace mfid::surrogate
