#include "solo/nn/mlp.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace solo::nn {

void TrainHyper::validate() const
{
    require(learning_rate > 0.0, "learning rate must be positive");
    require(epochs >= 1, "epochs must be >= 1");
    require(batch_size >= 1, "batch size must be >= 1");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "ADAM betas must lie in [0,1)");
    require(adam_eps > 0.0, "ADAM epsilon must be positive");
}

namespace {

struct AdamState {
    detail::Gradients m, v;
    std::size_t step = 0;
};

detail::Gradients zeros_like(const MlpParams& p)
{
    detail::Gradients g;
    for (const auto& l : p.layers) {
        g.weight.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
        g.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
    for (const auto& n : p.norms) {
        g.gamma.push_back(Eigen::VectorXd::Zero(n.gamma.size()));
        g.beta.push_back(Eigen::VectorXd::Zero(n.beta.size()));
    }
    return g;
}

template <class A, class G>
void adam_update(A& param, A& m, A& v, const G& grad, const TrainHyper& h, double bc1, double bc2)
{
    m = h.beta1 * m + (1.0 - h.beta1) * grad;
    v = h.beta2 * v + (1.0 - h.beta2) * grad.cwiseProduct(grad);
    param.array() -= h.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + h.adam_eps);
}

void adam_step(MlpParams& p, AdamState& s, const detail::Gradients& g, const TrainHyper& h)
{
    ++s.step;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(s.step));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(s.step));
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        adam_update(p.layers[l].weight, s.m.weight[l], s.v.weight[l], g.weight[l], h, bc1, bc2);
        adam_update(p.layers[l].bias, s.m.bias[l], s.v.bias[l], g.bias[l], h, bc1, bc2);
    }
    for (std::size_t l = 0; l < p.norms.size(); ++l) {
        if (!p.spec.uses_batchnorm(l)) continue;
        adam_update(p.norms[l].gamma, s.m.gamma[l], s.v.gamma[l], g.gamma[l], h, bc1, bc2);
        adam_update(p.norms[l].beta, s.m.beta[l], s.v.beta[l], g.beta[l], h, bc1, bc2);
    }
}

} // namespace

TrainResult train(MlpParams params, const Dataset& data, const TrainHyper& hyper)
{
    hyper.validate();
    require(data.n_train() >= 1, "train needs at least one record");
    require(data[0].design.size() == params.spec.input_dim, "dataset design length must equal network input dimension");

    const Eigen::MatrixXd raw = design_matrix(data);
    const Eigen::VectorXd targets = reciprocal_targets(data);
    const Eigen::Index n = raw.rows();

    // per-feature standardization (population std; constant features keep scale 1)
    params.input_mean = raw.colwise().mean().transpose();
    const Eigen::MatrixXd centered = raw.rowwise() - params.input_mean.transpose();
    params.input_std = (centered.array().square().colwise().mean()).sqrt().transpose();
    for (Eigen::Index c = 0; c < params.input_std.size(); ++c)
        if (!(params.input_std(c) > 1e-12)) params.input_std(c) = 1.0;
    const Eigen::MatrixXd x = centered.array().rowwise() / params.input_std.transpose().array();

    RngStream rng = RngStream::named(hyper.seed, "nn-train");
    AdamState adam{zeros_like(params), zeros_like(params), 0};
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    // batches of batch_size; a trailing single row joins the previous batch
    const auto bs = static_cast<Eigen::Index>(std::min<std::size_t>(hyper.batch_size, static_cast<std::size_t>(n)));
    std::vector<std::pair<Eigen::Index, Eigen::Index>> spans;
    for (Eigen::Index s = 0; s < n; s += bs) spans.emplace_back(s, std::min(bs, n - s));
    if (spans.size() > 1 && spans.back().second == 1) {
        spans.pop_back();
        spans.back().second += 1;
    }

    TrainResult result;
    result.loss_trace.reserve(hyper.epochs);
    params.training = true;
    const bool dropout = params.spec.dropout > 0.0 && !params.spec.hidden.empty();
    Eigen::MatrixXd xb;
    Eigen::VectorXd tb;
    detail::Gradients grad;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        if (spans.size() > 1)
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        double epoch_loss = 0.0;
        for (const auto& [start, len] : spans) {
            xb.resize(len, x.cols());
            tb.resize(len);
            for (Eigen::Index r = 0; r < len; ++r) {
                const Eigen::Index src = order[static_cast<std::size_t>(start + r)];
                xb.row(r) = x.row(src);
                tb(r) = targets(src);
            }
            std::vector<Eigen::MatrixXd> masks;
            if (dropout) {
                const double keep = 1.0 - params.spec.dropout;
                for (auto w : params.spec.hidden) {
                    Eigen::MatrixXd m(len, static_cast<Eigen::Index>(w));
                    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform() < keep ? 1.0 / keep : 0.0;
                    masks.push_back(std::move(m));
                }
            }
            const double loss = detail::loss_and_gradient(params, xb, tb, Mode::train, dropout ? &masks : nullptr, &grad,
                                                          true, &params);
            if (!std::isfinite(loss)) throw DataError("training diverged (non-finite loss) at epoch " + std::to_string(epoch));
            epoch_loss += loss * static_cast<double>(len);
            adam_step(params, adam, grad, hyper);
        }
        result.loss_trace.push_back(epoch_loss / static_cast<double>(n));
    }
    params.training = false;
    result.params = std::move(params);
    return result;
}

} // namespace solo::nn
