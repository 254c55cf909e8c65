#include "solo/nn/mlp.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace solo::nn {

void MlpSpec::validate() const
{
    require(input_dim >= 1, "MLP input dimension must be >= 1");
    for (auto w : hidden) require(w >= 1, "MLP hidden widths must be >= 1");
    require(batchnorm.empty() || batchnorm.size() == hidden.size(), "batchnorm flags must match hidden layers");
    require(dropout >= 0.0 && dropout < 1.0, "dropout rate must lie in [0,1)");
    require(leaky_slope >= 0.0, "leaky slope must be nonnegative");
}

std::size_t MlpParams::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    for (std::size_t l = 0; l < norms.size(); ++l)
        if (spec.uses_batchnorm(l)) n += static_cast<std::size_t>(norms[l].gamma.size() + norms[l].beta.size());
    return n;
}

MlpParams init_network(const MlpSpec& spec, RngStream& rng)
{
    spec.validate();
    MlpParams p;
    p.spec = spec;
    std::size_t in = spec.input_dim;
    std::vector<std::size_t> widths = spec.hidden;
    widths.push_back(1);
    for (std::size_t l = 0; l < widths.size(); ++l) {
        const std::size_t out = widths[l];
        const bool hidden = l + 1 < widths.size();
        // kaiming-uniform: bound = gain * sqrt(3 / fan_in), gain for leaky relu
        const double gain = hidden ? std::sqrt(2.0 / (1.0 + spec.leaky_slope * spec.leaky_slope)) : 1.0;
        const double bound = gain * std::sqrt(3.0 / static_cast<double>(in));
        const double bias_bound = 1.0 / std::sqrt(static_cast<double>(in));
        DenseLayer layer;
        layer.weight.resize(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
        layer.bias.resize(static_cast<Eigen::Index>(out));
        for (Eigen::Index k = 0; k < layer.weight.size(); ++k) layer.weight.data()[k] = rng.uniform(-bound, bound);
        for (Eigen::Index k = 0; k < layer.bias.size(); ++k) layer.bias(k) = rng.uniform(-bias_bound, bias_bound);
        p.layers.push_back(std::move(layer));
        if (hidden) {
            const auto w = static_cast<Eigen::Index>(out);
            p.norms.push_back({Eigen::VectorXd::Ones(w), Eigen::VectorXd::Zero(w), Eigen::VectorXd::Zero(w),
                               Eigen::VectorXd::Ones(w)});
        }
        in = out;
    }
    p.input_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.input_dim));
    p.input_std = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(spec.input_dim));
    return p;
}

namespace {

struct LayerCache {
    Eigen::MatrixXd input;   // a_{l-1}
    Eigen::MatrixXd zhat;    // normalized pre-activation (or z without BN)
    Eigen::VectorXd inv_std; // per feature, BN only
    Eigen::MatrixXd pre_act; // input to LeakyReLU
    bool batch_stats = false;
};

struct ForwardCache {
    std::vector<LayerCache> hidden;
    Eigen::MatrixXd last_input;
};

Eigen::MatrixXd standardize(const MlpParams& p, const Eigen::MatrixXd& x)
{
    require(x.cols() == static_cast<Eigen::Index>(p.spec.input_dim), "batch column count must equal input dimension");
    if (!x.allFinite()) throw ContractViolation("non-finite network input");
    return (x.rowwise() - p.input_mean.transpose()).array().rowwise() / p.input_std.transpose().array();
}

Eigen::VectorXd run(const MlpParams& p, const Eigen::MatrixXd& x_std, Mode mode,
                    const std::vector<Eigen::MatrixXd>* masks, ForwardCache* cache, MlpParams* stats_out)
{
    const Eigen::Index n = x_std.rows();
    const double slope = p.spec.leaky_slope;
    Eigen::MatrixXd a = x_std;
    if (cache) cache->hidden.resize(p.spec.hidden.size());
    for (std::size_t l = 0; l < p.spec.hidden.size(); ++l) {
        const DenseLayer& layer = p.layers[l];
        Eigen::MatrixXd z = a * layer.weight;
        z.rowwise() += layer.bias.transpose();
        LayerCache* c = cache ? &cache->hidden[l] : nullptr;
        if (c) c->input = a;

        Eigen::MatrixXd y;
        if (p.spec.uses_batchnorm(l)) {
            const BatchNormLayer& bn = p.norms[l];
            const bool batch_stats = mode == Mode::train && n >= 2;
            Eigen::VectorXd inv_std;
            Eigen::MatrixXd zhat;
            if (batch_stats) {
                const Eigen::RowVectorXd mean = z.colwise().mean();
                const Eigen::MatrixXd centered = z.rowwise() - mean;
                const Eigen::RowVectorXd var = centered.array().square().colwise().mean();
                inv_std = (var.array() + p.spec.bn_eps).rsqrt().transpose();
                zhat = centered.array().rowwise() * inv_std.transpose().array();
                if (stats_out) {
                    const double m = p.spec.bn_momentum;
                    const double unbias = static_cast<double>(n) / static_cast<double>(n - 1);
                    auto& tgt = stats_out->norms[l];
                    tgt.running_mean = (1.0 - m) * tgt.running_mean + m * mean.transpose();
                    tgt.running_var = (1.0 - m) * tgt.running_var + m * unbias * var.transpose();
                }
            }
            else {
                inv_std = (bn.running_var.array() + p.spec.bn_eps).rsqrt();
                zhat = (z.rowwise() - bn.running_mean.transpose()).array().rowwise() * inv_std.transpose().array();
            }
            y = (zhat.array().rowwise() * bn.gamma.transpose().array()).rowwise() + bn.beta.transpose().array();
            if (c) {
                c->zhat = std::move(zhat);
                c->inv_std = std::move(inv_std);
                c->batch_stats = batch_stats;
            }
        }
        else {
            y = std::move(z);
        }
        a = y.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
        if (c) c->pre_act = std::move(y);
        if (masks) a.array() *= (*masks)[l].array();
    }
    if (cache) cache->last_input = a;
    const DenseLayer& out = p.layers.back();
    Eigen::VectorXd result = (a * out.weight).col(0);
    result.array() += out.bias(0);
    return result;
}

std::vector<Eigen::MatrixXd> draw_masks(const MlpParams& p, Eigen::Index rows, RngStream& rng)
{
    std::vector<Eigen::MatrixXd> masks;
    const double keep = 1.0 - p.spec.dropout;
    for (auto w : p.spec.hidden) {
        Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(w));
        for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform() < keep ? 1.0 / keep : 0.0;
        masks.push_back(std::move(m));
    }
    return masks;
}

} // namespace

Eigen::VectorXd forward(const MlpParams& params, const Eigen::MatrixXd& batch, Mode mode, RngStream* rng)
{
    const Eigen::MatrixXd x = standardize(params, batch);
    std::vector<Eigen::MatrixXd> masks;
    const bool dropout = mode == Mode::train && params.spec.dropout > 0.0 && !params.spec.hidden.empty();
    if (dropout) {
        require(rng != nullptr, "train-mode forward with dropout needs an RNG stream");
        masks = draw_masks(params, x.rows(), *rng);
    }
    if (mode == Mode::train)
        for (std::size_t l = 0; l < params.spec.hidden.size(); ++l)
            require(!params.spec.uses_batchnorm(l) || x.rows() >= 2, "train-mode batch norm needs at least two rows");
    return run(params, x, mode, dropout ? &masks : nullptr, nullptr, nullptr);
}

namespace detail {

double loss_and_gradient(const MlpParams& params, const Eigen::MatrixXd& batch, const Eigen::VectorXd& targets,
                         Mode mode, const std::vector<Eigen::MatrixXd>* masks, Gradients* grad, bool standardized,
                         MlpParams* stats_out)
{
    const Eigen::MatrixXd x = standardized ? batch : standardize(params, batch);
    const Eigen::Index n = x.rows();
    ForwardCache cache;
    const Eigen::VectorXd y = run(params, x, mode, masks, grad ? &cache : nullptr, stats_out);
    const Eigen::VectorXd diff = y - targets;
    const double loss = diff.squaredNorm() / static_cast<double>(n);
    if (!grad) return loss;

    const std::size_t nh = params.spec.hidden.size();
    grad->weight.assign(nh + 1, {});
    grad->bias.assign(nh + 1, {});
    grad->gamma.assign(nh, {});
    grad->beta.assign(nh, {});

    // dL/dy for the output layer
    Eigen::MatrixXd dout = (2.0 / static_cast<double>(n)) * diff;
    grad->weight[nh] = cache.last_input.transpose() * dout;
    grad->bias[nh] = dout.colwise().sum().transpose();
    Eigen::MatrixXd da = dout * params.layers[nh].weight.transpose();

    const double slope = params.spec.leaky_slope;
    for (std::size_t l = nh; l-- > 0;) {
        const LayerCache& c = cache.hidden[l];
        if (masks) da.array() *= (*masks)[l].array();
        Eigen::MatrixXd dy = da.array() * c.pre_act.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; }).array();
        Eigen::MatrixXd dz;
        if (params.spec.uses_batchnorm(l)) {
            const BatchNormLayer& bn = params.norms[l];
            grad->gamma[l] = (dy.array() * c.zhat.array()).colwise().sum().transpose();
            grad->beta[l] = dy.colwise().sum().transpose();
            const Eigen::MatrixXd dzhat = dy.array().rowwise() * bn.gamma.transpose().array();
            if (c.batch_stats) {
                const double nn = static_cast<double>(n);
                const Eigen::RowVectorXd sum_dzhat = dzhat.colwise().sum();
                const Eigen::RowVectorXd sum_dzhat_zhat = (dzhat.array() * c.zhat.array()).colwise().sum();
                Eigen::MatrixXd t = (nn * dzhat).rowwise() - sum_dzhat;
                t -= (c.zhat.array().rowwise() * sum_dzhat_zhat.array()).matrix();
                dz = (t.array().rowwise() * (c.inv_std.transpose().array() / nn)).matrix();
            }
            else {
                dz = dzhat.array().rowwise() * c.inv_std.transpose().array();
            }
        }
        else {
            dz = std::move(dy);
        }
        grad->weight[l] = c.input.transpose() * dz;
        grad->bias[l] = dz.colwise().sum().transpose();
        if (l > 0) da = dz * params.layers[l].weight.transpose();
    }
    for (std::size_t l = 0; l < nh; ++l) {
        if (grad->gamma[l].size() == 0) {
            const auto w = static_cast<Eigen::Index>(params.spec.hidden[l]);
            grad->gamma[l] = Eigen::VectorXd::Zero(w);
            grad->beta[l] = Eigen::VectorXd::Zero(w);
        }
    }
    return loss;
}

double gradient_check(const MlpParams& params, std::span<const double> probe, double h, double target,
                      GradientTamper tamper)
{
    require(h > 0.0, "gradient_check step must be positive");
    require(probe.size() == params.spec.input_dim, "probe length must equal input dimension");
    Eigen::MatrixXd x(1, static_cast<Eigen::Index>(probe.size()));
    for (std::size_t i = 0; i < probe.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = probe[i];
    Eigen::VectorXd t(1);
    t(0) = target;

    Gradients g;
    loss_and_gradient(params, x, t, Mode::eval, nullptr, &g);
    if (tamper) tamper(g);

    MlpParams work = params;
    double worst = 0.0;
    for_each_parameter(work, g, [&](double& p, double analytic) {
        const double saved = p;
        p = saved + h;
        const double up = loss_and_gradient(work, x, t, Mode::eval, nullptr, nullptr);
        p = saved - h;
        const double down = loss_and_gradient(work, x, t, Mode::eval, nullptr, nullptr);
        p = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    });
    return worst;
}

} // namespace detail

double gradient_check(const MlpParams& params, std::span<const double> probe, double h, double target)
{
    return detail::gradient_check(params, probe, h, target, nullptr);
}

Predictor::Predictor(const MlpParams& p) : input_dim_(p.spec.input_dim), slope_(p.spec.leaky_slope)
{
    const std::size_t nh = p.spec.hidden.size();
    for (std::size_t l = 0; l <= nh; ++l) {
        Eigen::MatrixXd w = p.layers[l].weight; // in x out
        Eigen::VectorXd b = p.layers[l].bias;
        if (l < nh && p.spec.uses_batchnorm(l)) {
            const auto& bn = p.norms[l];
            const Eigen::VectorXd scale = bn.gamma.array() * (bn.running_var.array() + p.spec.bn_eps).rsqrt();
            w = w * scale.asDiagonal();
            b = ((b - bn.running_mean).array() * scale.array()).matrix() + bn.beta;
        }
        if (l == 0) {
            // absorb (x - mean) / std
            const Eigen::VectorXd inv = p.input_std.cwiseInverse();
            b -= w.transpose() * (p.input_mean.cwiseProduct(inv));
            w = inv.asDiagonal() * w;
        }
        weight_.push_back(w.transpose());
        bias_.push_back(std::move(b));
    }
}

double Predictor::raw(std::span<const double> design) const
{
    require(design.size() == input_dim_, "predictor input length mismatch");
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(design.data(), static_cast<Eigen::Index>(design.size()));
    const double slope = slope_;
    for (std::size_t l = 0; l < weight_.size(); ++l) {
        Eigen::VectorXd z = weight_[l] * a + bias_[l];
        if (l + 1 < weight_.size()) z = z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
        a = std::move(z);
    }
    return a(0);
}

double Predictor::objective(std::span<const double> design) const
{
    return 1.0 / std::max(raw(design), kOutputFloor);
}

std::vector<double> Predictor::objective_batch_serial(const std::vector<std::vector<double>>& designs) const
{
    std::vector<double> out(designs.size());
    for (std::size_t i = 0; i < designs.size(); ++i) out[i] = objective(designs[i]);
    return out;
}

std::vector<double> Predictor::objective_batch(const std::vector<std::vector<double>>& designs) const
{
    std::vector<double> out(designs.size());
    const auto n = static_cast<std::ptrdiff_t>(designs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = objective(designs[static_cast<std::size_t>(i)]);
    return out;
}

double predict_objective(const MlpParams& params, std::span<const double> design)
{
    return Predictor(params).objective(design);
}

Eigen::MatrixXd design_matrix(const Dataset& data)
{
    require(!data.empty(), "empty dataset");
    const auto n = static_cast<Eigen::Index>(data.n_train());
    const auto d = static_cast<Eigen::Index>(data[0].design.size());
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto v = data[static_cast<std::size_t>(r)].design.values();
        for (Eigen::Index c = 0; c < d; ++c) x(r, c) = v[static_cast<std::size_t>(c)];
    }
    return x;
}

Eigen::VectorXd reciprocal_targets(const Dataset& data)
{
    Eigen::VectorXd t(static_cast<Eigen::Index>(data.n_train()));
    for (std::size_t i = 0; i < data.n_train(); ++i) {
        const double f = data[i].objective;
        if (!(f > 0.0) || !std::isfinite(f)) throw DataError("rejected record " + std::to_string(i) + ": objective must be positive");
        t(static_cast<Eigen::Index>(i)) = 1.0 / f;
    }
    return t;
}

double empirical_mse(const MlpParams& params, const Dataset& data)
{
    const Eigen::VectorXd y = forward(params, design_matrix(data), Mode::eval);
    return (reciprocal_targets(data) - y).squaredNorm() / static_cast<double>(data.n_train());
}

} // namespace solo::nn
