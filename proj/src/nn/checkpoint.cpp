#include "solo/nn/mlp.hpp"

#include "solo/core/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace solo::nn {

using nlohmann::json;

namespace {

json to_json(const Eigen::MatrixXd& m)
{
    std::vector<double> flat(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0, k = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) flat[static_cast<std::size_t>(k++)] = m(r, c);
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd matrix_from_json(const json& j)
{
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto flat = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols) throw DataError("checkpoint tensor size mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0, k = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(k++)];
    return m;
}

json to_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

void save_checkpoint(std::ostream& out, const MlpParams& p)
{
    json spec = {{"input_dim", p.spec.input_dim},     {"hidden", p.spec.hidden},
                 {"leaky_slope", p.spec.leaky_slope}, {"dropout", p.spec.dropout},
                 {"batchnorm", p.spec.batchnorm},     {"bn_momentum", p.spec.bn_momentum},
                 {"bn_eps", p.spec.bn_eps}};
    json layers = json::array();
    for (const auto& l : p.layers) layers.push_back({{"weight", to_json(l.weight)}, {"bias", to_json(l.bias)}});
    json norms = json::array();
    for (const auto& n : p.norms)
        norms.push_back({{"gamma", to_json(n.gamma)},
                         {"beta", to_json(n.beta)},
                         {"running_mean", to_json(n.running_mean)},
                         {"running_var", to_json(n.running_var)}});
    json j = {{"format", "solo-mlp"},
              {"version", 1},
              {"spec", spec},
              {"layers", layers},
              {"norms", norms},
              {"input_mean", to_json(p.input_mean)},
              {"input_std", to_json(p.input_std)}};
    out << j.dump() << '\n';
}

MlpParams load_checkpoint(std::istream& in)
{
    MlpParams p;
    try {
        const json j = json::parse(in);
        if (j.at("format") != "solo-mlp" || j.at("version") != 1) throw DataError("unsupported checkpoint format");
        const json& s = j.at("spec");
        p.spec.input_dim = s.at("input_dim").get<std::size_t>();
        p.spec.hidden = s.at("hidden").get<std::vector<std::size_t>>();
        p.spec.leaky_slope = s.at("leaky_slope").get<double>();
        p.spec.dropout = s.at("dropout").get<double>();
        p.spec.batchnorm = s.at("batchnorm").get<std::vector<bool>>();
        p.spec.bn_momentum = s.at("bn_momentum").get<double>();
        p.spec.bn_eps = s.at("bn_eps").get<double>();
        p.spec.validate();
        for (const auto& l : j.at("layers"))
            p.layers.push_back({matrix_from_json(l.at("weight")), vector_from_json(l.at("bias"))});
        for (const auto& n : j.at("norms"))
            p.norms.push_back({vector_from_json(n.at("gamma")), vector_from_json(n.at("beta")),
                               vector_from_json(n.at("running_mean")), vector_from_json(n.at("running_var"))});
        p.input_mean = vector_from_json(j.at("input_mean"));
        p.input_std = vector_from_json(j.at("input_std"));
    }
    catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
    if (p.layers.size() != p.spec.hidden.size() + 1 || p.norms.size() != p.spec.hidden.size())
        throw DataError("checkpoint layer count does not match its spec");
    return p;
}

void save_checkpoint(const std::string& path, const MlpParams& params)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    save_checkpoint(out, params);
}

MlpParams load_checkpoint(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return load_checkpoint(in);
}

} // namespace solo::nn
