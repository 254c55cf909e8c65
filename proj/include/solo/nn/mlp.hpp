#pragma once

#include "solo/core/dataset.hpp"
#include "solo/core/design.hpp"
#include "solo/core/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace solo::nn {

/// Fully connected regressor: each hidden layer is
/// Linear -> [BatchNorm1d] -> LeakyReLU -> Dropout, followed by a Linear
/// output of width one.
struct MlpSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden;
    double leaky_slope = 0.01;
    double dropout = 0.1;
    std::vector<bool> batchnorm; ///< per hidden layer; empty means all on
    double bn_momentum = 0.1;
    double bn_eps = 1e-5;

    bool uses_batchnorm(std::size_t layer) const { return batchnorm.empty() || batchnorm.at(layer); }
    void validate() const;
};

struct DenseLayer {
    Eigen::MatrixXd weight; ///< in x out
    Eigen::VectorXd bias;   ///< out
};

struct BatchNormLayer {
    Eigen::VectorXd gamma, beta;
    Eigen::VectorXd running_mean, running_var;
};

struct MlpParams {
    MlpSpec spec;
    std::vector<DenseLayer> layers;     ///< hidden.size() + 1
    std::vector<BatchNormLayer> norms;  ///< one per hidden layer (unused when disabled)
    Eigen::VectorXd input_mean;
    Eigen::VectorXd input_std;
    bool training = false;

    std::size_t parameter_count() const;
};

enum class Mode { train, eval };

/// Fan-in scaled uniform init (Kaiming-uniform for LeakyReLU); batch-norm
/// scale 1, shift 0, running mean 0, variance 1; identity input scaling.
MlpParams init_network(const MlpSpec& spec, RngStream& rng);

/// Raw network output y (the reciprocal-objective prediction) for each row
/// of `batch`. Rows are unstandardized designs. Train mode uses batch
/// statistics (needs >= 2 rows when batch norm is active) and draws dropout
/// masks from `rng`; eval mode is deterministic and ignores `rng`.
Eigen::VectorXd forward(const MlpParams& params, const Eigen::MatrixXd& batch, Mode mode, RngStream* rng = nullptr);

struct TrainHyper {
    double learning_rate = 0.01;
    std::size_t epochs = 1000;
    std::size_t batch_size = 1024;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainResult {
    MlpParams params;
    std::vector<double> loss_trace; ///< mean train-mode batch loss per epoch
};

/// Standardizes inputs with dataset statistics and fits y ~ 1/F by ADAM on
/// mean-square error. Throws DataError on a nonpositive objective.
TrainResult train(MlpParams params, const Dataset& data, const TrainHyper& hyper);

/// Design matrix (one row per record) and reciprocal targets.
Eigen::MatrixXd design_matrix(const Dataset& data);
Eigen::VectorXd reciprocal_targets(const Dataset& data);

inline constexpr double kOutputFloor = 1e-9;

/// 1 / max(y, floor) with y the eval-mode output.
double predict_objective(const MlpParams& params, std::span<const double> design);
inline double predict_objective(const MlpParams& params, const DesignVector& v)
{
    return predict_objective(params, v.values());
}

/// Mean of (1/F - y)^2 over the dataset, eval mode.
double empirical_mse(const MlpParams& params, const Dataset& data);

/// Max relative difference between backprop and central differences of the
/// one-sample squared error, over every trainable parameter. Eval mode, no
/// dropout. The denominator is floored at 1e-6.
double gradient_check(const MlpParams& params, std::span<const double> probe, double h, double target = 1.0);
inline double gradient_check(const MlpParams& params, const DesignVector& probe, double h, double target = 1.0)
{
    return gradient_check(params, probe.values(), h, target);
}

/// Eval-mode network folded into plain affine layers (input scaling and
/// batch norm absorbed). Immutable and safe to share across threads.
class Predictor {
public:
    Predictor() = default;
    explicit Predictor(const MlpParams& params);

    std::size_t input_dim() const noexcept { return input_dim_; }
    double raw(std::span<const double> design) const;
    double objective(std::span<const double> design) const;
    /// Serial reference and OpenMP-parallel batch prediction of objectives.
    std::vector<double> objective_batch_serial(const std::vector<std::vector<double>>& designs) const;
    std::vector<double> objective_batch(const std::vector<std::vector<double>>& designs) const;

private:
    std::size_t input_dim_ = 0;
    double slope_ = 0.01;
    std::vector<Eigen::MatrixXd> weight_; ///< out x in
    std::vector<Eigen::VectorXd> bias_;
};

/// Structured-text checkpoint of spec, tensors and normalization state.
/// Reals use shortest round-trip formatting, so a reload reproduces eval
/// outputs bit for bit.
void save_checkpoint(std::ostream& out, const MlpParams& params);
MlpParams load_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const MlpParams& params);
MlpParams load_checkpoint(const std::string& path);

namespace detail {

/// Gradients laid out like the trainable parameters.
struct Gradients {
    std::vector<Eigen::MatrixXd> weight;
    std::vector<Eigen::VectorXd> bias;
    std::vector<Eigen::VectorXd> gamma;
    std::vector<Eigen::VectorXd> beta;
};

/// Mean-square loss of `batch` against `targets` and its gradient.
/// `standardized` means the rows are already scaled by the stored input
/// statistics. `masks`, when given, holds one dropout mask (already divided
/// by the keep probability) per hidden layer.
double loss_and_gradient(const MlpParams& params, const Eigen::MatrixXd& batch, const Eigen::VectorXd& targets,
                         Mode mode, const std::vector<Eigen::MatrixXd>* masks, Gradients* grad,
                         bool standardized = false, MlpParams* stats_out = nullptr);

/// Calls fn(param, grad) over every trainable scalar in a fixed order.
template <class Params, class Fn>
void for_each_parameter(Params& params, const Gradients& g, Fn&& fn)
{
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& w = params.layers[l].weight;
        for (Eigen::Index k = 0; k < w.size(); ++k) fn(w.data()[k], g.weight[l].data()[k]);
        auto& b = params.layers[l].bias;
        for (Eigen::Index k = 0; k < b.size(); ++k) fn(b.data()[k], g.bias[l].data()[k]);
    }
    for (std::size_t l = 0; l < params.norms.size(); ++l) {
        if (!params.spec.uses_batchnorm(l)) continue;
        auto& ga = params.norms[l].gamma;
        for (Eigen::Index k = 0; k < ga.size(); ++k) fn(ga.data()[k], g.gamma[l].data()[k]);
        auto& be = params.norms[l].beta;
        for (Eigen::Index k = 0; k < be.size(); ++k) fn(be.data()[k], g.beta[l].data()[k]);
    }
}

/// Test hook: perturbs the analytic gradient before gradient_check compares it.
using GradientTamper = void (*)(Gradients&);
double gradient_check(const MlpParams& params, std::span<const double> probe, double h, double target,
                      GradientTamper tamper);

} // namespace detail

} // namespace solo::nn
