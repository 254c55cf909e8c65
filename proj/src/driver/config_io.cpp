#include "solo/driver/config_io.hpp"

#include "solo/core/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace solo::driver {

namespace pt = boost::property_tree;

namespace {

std::string num(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

template <class T>
T parse_number(const std::string& key, const std::string& s)
{
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ContractViolation("config: bad value '" + s + "' for " + key);
    return v;
}

bool parse_bool(const std::string& key, const std::string& s)
{
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ContractViolation("config: bad boolean '" + s + "' for " + key);
}

struct Field {
    std::function<std::string()> get;
    std::function<void(const std::string& key, const std::string&)> set;
};

using Table = std::map<std::string, std::map<std::string, Field>>;

Field real(double& x)
{
    return {[&x] { return num(x); }, [&x](const std::string& k, const std::string& s) { x = parse_number<double>(k, s); }};
}

template <class U>
Field integer(U& x)
{
    return {[&x] { return std::to_string(x); }, [&x](const std::string& k, const std::string& s) { x = parse_number<U>(k, s); }};
}

Field boolean(bool& x)
{
    return {[&x] { return std::string(x ? "true" : "false"); },
            [&x](const std::string& k, const std::string& s) { x = parse_bool(k, s); }};
}

Field widths(std::vector<std::size_t>& v)
{
    return {[&v] {
                std::string out;
                for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
                return out;
            },
            [&v](const std::string& k, const std::string& s) {
                v.clear();
                std::stringstream ss(s);
                for (std::string item; std::getline(ss, item, ',');)
                    if (!item.empty()) v.push_back(parse_number<std::size_t>(k, item));
            }};
}

template <class C>
void bat_fields(std::map<std::string, Field>& t, C& c)
{
    t["population"] = integer(c.population);
    t["q_min"] = real(c.q_min);
    t["q_max"] = real(c.q_max);
    t["t_max"] = integer(c.t_max);
    t["alpha"] = real(c.alpha);
    t["gamma"] = real(c.gamma);
    t["r0"] = real(c.r0);
    t["a0"] = real(c.a0);
    t["max_evaluations"] = integer(c.max_evaluations);
    t["top_k"] = integer(c.top_k);
}

Table fields(SoloConfig& c)
{
    Table t;
    auto& s = t["solo"];
    s["variant"] = {[&c] { return std::string(to_string(c.variant)); },
                    [&c](const std::string&, const std::string& v) { c.variant = variant_from_string(v); }};
    s["initial_batch"] = integer(c.initial_batch);
    s["per_loop"] = integer(c.per_loop);
    s["optima_fraction"] = real(c.optima_fraction);
    s["max_loops"] = integer(c.max_loops);
    s["budget"] = integer(c.budget);
    s["stop_on_convergence"] = boolean(c.stop_on_convergence);
    s["tolerance"] = real(c.tolerance);
    s["patience"] = integer(c.patience);
    s["warm_start"] = boolean(c.warm_start);
    s["warm_epochs"] = integer(c.warm_epochs);
    s["seed"] = integer(c.seed);

    auto& n = t["net"];
    n["hidden"] = widths(c.net.hidden);
    n["leaky_slope"] = real(c.net.leaky_slope);
    n["dropout"] = real(c.net.dropout);
    n["batchnorm"] = {[&c] {
                          for (bool b : c.net.batchnorm)
                              if (!b) return std::string("false");
                          return std::string("true");
                      },
                      [&c](const std::string& k, const std::string& v) {
                          c.net.batchnorm = parse_bool(k, v) ? std::vector<bool>{}
                                                             : std::vector<bool>(c.net.hidden.size(), false);
                      }};
    n["bn_momentum"] = real(c.net.bn_momentum);
    n["bn_eps"] = real(c.net.bn_eps);

    auto& tr = t["train"];
    tr["learning_rate"] = real(c.train.learning_rate);
    tr["epochs"] = integer(c.train.epochs);
    tr["batch_size"] = integer(c.train.batch_size);
    tr["beta1"] = real(c.train.beta1);
    tr["beta2"] = real(c.train.beta2);
    tr["adam_eps"] = real(c.train.adam_eps);

    auto& se = t["search"];
    se["optimizer"] = {[&c] { return std::string(to_string(c.search.optimizer)); },
                       [&c](const std::string&, const std::string& v) { c.search.optimizer = optimizer_from_string(v); }};
    se["penalty_c"] = real(c.search.penalty_c);
    se["seed_best"] = integer(c.search.seed_best);

    auto& g = t["gsa"];
    g["initial_temperature"] = real(c.search.gsa.initial_temperature);
    g["t_max"] = integer(c.search.gsa.t_max);
    g["qv"] = real(c.search.gsa.qv);
    g["qa"] = real(c.search.gsa.qa);
    g["local_search"] = boolean(c.search.gsa.local_search);
    g["restart_ratio"] = real(c.search.gsa.restart_ratio);
    g["max_evaluations"] = integer(c.search.gsa.max_evaluations);
    g["top_k"] = integer(c.search.gsa.top_k);

    bat_fields(t["ba"], c.search.ba);
    t["ba"]["w_init"] = real(c.search.ba.w_init);
    t["ba"]["w_final"] = real(c.search.ba.w_final);
    bat_fields(t["bba"], c.search.bba);
    return t;
}

} // namespace

void read_config(std::istream& in, SoloConfig& cfg)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error& e) {
        throw ContractViolation(std::string("config: ") + e.what());
    }
    Table t = fields(cfg);
    // [net] hidden must land before batchnorm, which sizes itself from it
    for (const char* first : {"solo", "net", "train", "search", "gsa", "ba", "bba"}) {
        auto sec = tree.get_child_optional(first);
        if (!sec) continue;
        auto& fs = t.at(first);
        if (auto h = sec->get_optional<std::string>("hidden")) fs.at("hidden").set("net.hidden", *h);
        for (const auto& [key, node] : *sec) {
            if (std::string(first) == "net" && key == "hidden") continue;
            auto it = fs.find(key);
            if (it == fs.end()) throw ContractViolation("config: unknown key " + std::string(first) + "." + key);
            it->second.set(std::string(first) + "." + key, node.data());
        }
    }
    for (const auto& [name, _] : tree)
        if (!t.count(name)) throw ContractViolation("config: unknown section [" + name + "]");
}

void write_config(std::ostream& out, const SoloConfig& cfg)
{
    SoloConfig copy = cfg;
    Table t = fields(copy);
    for (const char* sec : {"solo", "net", "train", "search", "gsa", "ba", "bba"}) {
        out << '[' << sec << "]\n";
        for (const auto& [key, f] : t.at(sec)) out << key << " = " << f.get() << '\n';
        out << '\n';
    }
}

} // namespace solo::driver
