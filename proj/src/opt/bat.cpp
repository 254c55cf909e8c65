#include "solo/opt/bat.hpp"

#include "solo/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace solo::opt {

namespace {

template <class C>
void validate_common(const C& c)
{
    require(c.population >= 1, "bat population must be >= 1");
    require(c.q_min <= c.q_max, "bat q_min must not exceed q_max");
    require(c.alpha > 0.0 && c.alpha < 1.0, "bat loudness decay alpha must lie in (0,1)");
    require(c.gamma > 0.0, "bat pulse-rate growth gamma must be positive");
    require(c.t_max >= 1, "bat t_max must be >= 1");
}

// Shared population bookkeeping. rho* is the best design evaluated so far,
// including candidates the loudness gate rejected.
struct Colony {
    std::vector<std::vector<double>> pos, vel;
    std::vector<double> score;
    std::vector<double> best;
    double best_value = 0.0;

    void offer(const std::vector<double>& x, double v)
    {
        if (best.empty() || v < best_value) {
            best = x;
            best_value = v;
        }
    }
};

} // namespace

void BaConfig::validate() const
{
    validate_common(*this);
    require(w_init >= 0.0 && w_final >= 0.0, "bat inertia weights must be nonnegative");
}

void BbaConfig::validate() const { validate_common(*this); }

double ba_inertia(std::size_t t, const BaConfig& cfg)
{
    const double s = 1.0 - static_cast<double>(t) / static_cast<double>(cfg.t_max);
    return s * s * (cfg.w_init - cfg.w_final) + cfg.w_final;
}

SearchSpace SearchSpace::discrete(std::vector<double> levels)
{
    require(!levels.empty(), "discrete search space needs at least one level");
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    SearchSpace s;
    s.levels = std::move(levels);
    return s;
}

double SearchSpace::snap(double x) const
{
    if (levels.empty()) return std::clamp(x, 0.0, 1.0);
    auto it = std::lower_bound(levels.begin(), levels.end(), x);
    if (it == levels.begin()) return *it;
    if (it == levels.end()) return levels.back();
    const double hi = *it, lo = *(it - 1);
    return (x - lo) <= (hi - x) ? lo : hi;
}

SearchResult ba_minimize(const Objective& h, std::size_t n, const BaConfig& cfg, const SearchSpace& space,
                         RngStream& rng)
{
    cfg.validate();
    require(n >= 1, "ba_minimize: dimension must be >= 1");
    SearchResult result;
    result.trace.top = TopK(cfg.top_k);
    TracedObjective eval(h, result, cfg.max_evaluations, "ba_minimize");

    const std::size_t m_count = cfg.population;
    Colony c;
    c.pos.assign(m_count, std::vector<double>(n));
    c.vel.assign(m_count, std::vector<double>(n, 0.0));
    c.score.assign(m_count, 0.0);
    require(cfg.seeds.size() <= m_count, "ba_minimize: more seeds than bats");
    for (std::size_t m = 0; m < m_count && !eval.exhausted(); ++m) {
        if (m < cfg.seeds.size()) {
            require(cfg.seeds[m].size() == n, "ba_minimize: seed has the wrong length");
            for (std::size_t i = 0; i < n; ++i) c.pos[m][i] = space.snap(cfg.seeds[m][i]);
        }
        else
            for (auto& x : c.pos[m]) x = space.snap(rng.uniform());
        c.score[m] = eval(c.pos[m]);
        c.offer(c.pos[m], c.score[m]);
    }

    double loudness = cfg.a0;
    std::vector<double> cand(n);
    for (std::size_t t = 1; t <= cfg.t_max && !eval.exhausted(); ++t) {
        loudness *= cfg.alpha;
        const double pulse = cfg.r0 * (1.0 - std::exp(-cfg.gamma * static_cast<double>(t)));
        const double w = ba_inertia(t, cfg);
        for (std::size_t m = 0; m < m_count && !eval.exhausted(); ++m) {
            const double q = cfg.q_min + (cfg.q_max - cfg.q_min) * rng.uniform();
            auto& v = c.vel[m];
            const auto& prev = c.pos[m];
            // pulled toward rho*; the (rho - rho*) sign drives bats away from it
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = w * v[i] + (c.best[i] - prev[i]) * q;
                cand[i] = prev[i] + v[i];
            }
            for (std::size_t i = 0; i < n; ++i)
                if (rng.uniform() > pulse) cand[i] = c.best[i] + rng.normal() * loudness;
            for (auto& x : cand) x = space.snap(x);

            const double hc = eval(cand);
            c.offer(cand, hc);
            const bool reject = hc > c.score[m] || rng.uniform() > loudness;
            if (!reject) {
                c.pos[m] = cand;
                c.score[m] = hc;
            }
        }
    }
    return result;
}

double bba_transfer(double v, std::size_t n)
{
    require(n >= 1, "bba_transfer: N must be >= 1");
    return std::abs(2.0 / std::numbers::pi * std::atan(std::numbers::pi / 2.0 * v)) + 1.0 / static_cast<double>(n);
}

SearchResult bba_minimize(const Objective& h, std::size_t n, const BbaConfig& cfg, RngStream& rng)
{
    cfg.validate();
    require(n >= 1, "bba_minimize: dimension must be >= 1");
    SearchResult result;
    result.trace.top = TopK(cfg.top_k);
    TracedObjective eval(h, result, cfg.max_evaluations, "bba_minimize");

    const std::size_t m_count = cfg.population;
    Colony c;
    c.pos.assign(m_count, std::vector<double>(n));
    c.vel.assign(m_count, std::vector<double>(n, 0.0));
    c.score.assign(m_count, 0.0);
    for (std::size_t m = 0; m < m_count && !eval.exhausted(); ++m) {
        for (auto& x : c.pos[m]) x = rng.uniform() < 0.5 ? 0.0 : 1.0;
        c.score[m] = eval(c.pos[m]);
        c.offer(c.pos[m], c.score[m]);
    }

    double loudness = cfg.a0;
    std::vector<double> cand(n);
    for (std::size_t t = 1; t <= cfg.t_max && !eval.exhausted(); ++t) {
        loudness *= cfg.alpha;
        const double pulse = cfg.r0 * (1.0 - std::exp(-cfg.gamma * static_cast<double>(t)));
        for (std::size_t m = 0; m < m_count && !eval.exhausted(); ++m) {
            const double q = cfg.q_min + (cfg.q_max - cfg.q_min) * rng.uniform();
            auto& v = c.vel[m];
            const auto& prev = c.pos[m];
            for (std::size_t i = 0; i < n; ++i) {
                v[i] += (prev[i] - c.best[i]) * q;
                cand[i] = rng.uniform() < bba_transfer(v[i], n) ? 1.0 - prev[i] : prev[i];
            }
            for (std::size_t i = 0; i < n; ++i)
                if (rng.uniform() > pulse) cand[i] = c.best[i];

            const double hc = eval(cand);
            c.offer(cand, hc);
            const bool reject = hc > c.score[m] || rng.uniform() > loudness;
            if (!reject) {
                c.pos[m] = cand;
                c.score[m] = hc;
            }
        }
    }
    return result;
}

} // namespace solo::opt
