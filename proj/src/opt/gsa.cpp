#include "solo/opt/gsa.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace solo::opt {

void GsaConfig::validate() const
{
    require(initial_temperature > 0.0, "GSA initial temperature must be positive");
    require(qv > 1.0 && qv < 3.0, "GSA visiting parameter must lie in (1,3)");
    require(t_max >= 1, "GSA t_max must be >= 1");
    require(restart_ratio >= 0.0 && restart_ratio < 1.0, "GSA restart ratio must lie in [0,1)");
}

double gsa_temperature(std::size_t t, const GsaConfig& cfg)
{
    require(t >= 1, "gsa_temperature: t must be >= 1");
    const double e = cfg.qv - 1.0;
    return cfg.initial_temperature * (std::pow(2.0, e) - 1.0) / (std::pow(1.0 + static_cast<double>(t), e) - 1.0);
}

double gsa_acceptance_probability(double delta_e, std::size_t t, double temperature, double qa)
{
    require(temperature > 0.0, "gsa_acceptance: temperature must be positive");
    if (delta_e <= 0.0) return 1.0;
    const double base = 1.0 - (1.0 - qa) * (static_cast<double>(t) / temperature) * delta_e;
    if (base <= 0.0) return 0.0;
    return std::min(1.0, std::pow(base, 1.0 / (1.0 - qa)));
}

bool gsa_acceptance(double delta_e, std::size_t t, double temperature, double qa, RngStream& rng)
{
    if (delta_e <= 0.0) return true;
    const double p = gsa_acceptance_probability(delta_e, t, temperature, qa);
    return rng.uniform() < p;
}

namespace {

constexpr double kTailLimit = 1e8;

struct VisitFactors {
    double factor4_p;
    double factor6;
};

VisitFactors visit_factors(double qv)
{
    const double f2 = std::exp((4.0 - qv) * std::log(qv - 1.0));
    const double f3 = std::exp((2.0 - qv) * std::log(2.0) / (qv - 1.0));
    const double f4p = std::sqrt(std::numbers::pi) * f2 / (f3 * (3.0 - qv));
    const double f5 = 1.0 / (qv - 1.0) - 0.5;
    const double d1 = 2.0 - f5;
    const double f6 = std::numbers::pi * (1.0 - f5) / std::sin(std::numbers::pi * (1.0 - f5)) / std::exp(std::lgamma(d1));
    return {f4p, f6};
}

double visit_scale(double temperature, double qv, const VisitFactors& f)
{
    const double factor1 = std::exp(std::log(temperature) / (qv - 1.0));
    const double factor4 = f.factor4_p * factor1;
    return std::exp(-(qv - 1.0) * std::log(f.factor6 / factor4) / (3.0 - qv));
}

double clamp_tail(double v, RngStream& rng)
{
    if (v > kTailLimit) return kTailLimit * rng.uniform();
    if (v < -kTailLimit) return -kTailLimit * rng.uniform();
    return v;
}

} // namespace

std::vector<double> tsallis_visit_sample(double temperature, double qv, std::size_t n, RngStream& rng)
{
    require(temperature > 0.0, "visiting temperature must be positive");
    require(qv > 1.0 && qv < 3.0, "visiting parameter must lie in (1,3)");
    const VisitFactors f = visit_factors(qv);
    const double sigma = visit_scale(temperature, qv, f);
    std::vector<double> out(n);
    for (auto& v : out) {
        const double x = rng.normal() * sigma;
        const double y = std::abs(rng.normal());
        const double den = std::exp((qv - 1.0) * std::log(y) / (3.0 - qv));
        v = x / den;
    }
    return out;
}

double reflect_unit(double x)
{
    if (x >= 0.0 && x <= 1.0) return x;
    double y = std::fmod(std::abs(x), 2.0);
    if (y > 1.0) y = 2.0 - y;
    return y;
}

namespace {

void pattern_search(TracedObjective& h, std::vector<double>& x, double& fx)
{
    double step = 0.1;
    while (step >= 1e-4 && !h.exhausted()) {
        bool improved = false;
        for (std::size_t i = 0; i < x.size() && !h.exhausted(); ++i) {
            for (double dir : {1.0, -1.0}) {
                if (h.exhausted()) break;
                const double old = x[i];
                const double trial = std::clamp(old + dir * step, 0.0, 1.0);
                if (trial == old) continue;
                x[i] = trial;
                const double ft = h(x);
                if (ft < fx) {
                    fx = ft;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if (!improved) step *= 0.5;
    }
}

} // namespace

SearchResult gsa_minimize(const Objective& h, std::size_t n, const GsaConfig& cfg, RngStream& rng)
{
    cfg.validate();
    require(n >= 1, "gsa_minimize: dimension must be >= 1");
    SearchResult result;
    result.trace.top = TopK(cfg.top_k);
    TracedObjective eval(h, result, cfg.max_evaluations, "gsa_minimize");

    std::size_t local_reserve = 0;
    if (cfg.local_search && cfg.max_evaluations != 0)
        local_reserve = std::min(cfg.max_evaluations / 4, 100 * n);
    auto anneal_exhausted = [&] {
        return cfg.max_evaluations != 0 && result.trace.evaluations + local_reserve >= cfg.max_evaluations;
    };

    const VisitFactors factors = visit_factors(cfg.qv);
    const double restart_temperature = cfg.restart_ratio * cfg.initial_temperature;
    auto random_state = [&] {
        std::vector<double> x(n);
        for (auto& v : x) v = rng.uniform();
        return x;
    };

    std::vector<double> x = random_state();
    double e = eval(x);
    std::vector<double> cand(n);

    std::size_t iteration = 0;
    std::size_t t = 0; // temperature step, restarts reset it
    while (iteration < cfg.t_max && !anneal_exhausted()) {
        ++t;
        const double temperature = gsa_temperature(t, cfg);
        if (temperature < restart_temperature) {
            x = random_state();
            e = eval(x);
            t = 0;
            continue;
        }
        const double sigma = visit_scale(temperature, cfg.qv, factors);
        // strategy chain: n all-coordinate moves, then n single-coordinate moves
        for (std::size_t step = 0; step < 2 * n && !anneal_exhausted(); ++step) {
            cand = x;
            auto draw = [&] {
                const double xs = rng.normal() * sigma;
                const double y = std::abs(rng.normal());
                return clamp_tail(xs / std::exp((cfg.qv - 1.0) * std::log(y) / (3.0 - cfg.qv)), rng);
            };
            if (step < n) {
                for (std::size_t i = 0; i < n; ++i) cand[i] = reflect_unit(x[i] + draw());
            }
            else {
                const std::size_t i = step - n;
                cand[i] = reflect_unit(x[i] + draw());
            }
            const double ec = eval(cand);
            if (gsa_acceptance(ec - e, t, temperature, cfg.qa, rng)) {
                x.swap(cand);
                e = ec;
            }
        }
        ++iteration;
    }

    if (cfg.local_search) {
        std::vector<double> xb = result.best;
        double fb = result.best_value;
        pattern_search(eval, xb, fb);
    }
    return result;
}

} // namespace solo::opt
