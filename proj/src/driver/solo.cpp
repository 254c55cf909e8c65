#include "solo/driver/solo.hpp"

#include "solo/core/error.hpp"
#include "solo/driver/batch.hpp"
#include "solo/opt/penalty.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace solo::driver {

std::string_view to_string(Variant v) noexcept
{
    switch (v) {
    case Variant::regular: return "regular";
    case Variant::greedy: return "greedy";
    case Variant::mixed_truss: return "mixed-truss";
    }
    return "regular";
}

Variant variant_from_string(std::string_view text)
{
    if (text == "regular") return Variant::regular;
    if (text == "greedy") return Variant::greedy;
    if (text == "mixed-truss") return Variant::mixed_truss;
    throw ContractViolation("unknown variant '" + std::string(text) + "'");
}

SoloConfig default_config(const Problem& p)
{
    SoloConfig c;
    c.initial_batch = p.initial_batch;
    c.per_loop = p.per_loop;
    c.net.input_dim = p.dim;
    c.net.hidden = p.hidden;
    c.net.dropout = p.dropout;
    if (!p.batchnorm) c.net.batchnorm.assign(p.hidden.size(), false);
    c.search.optimizer = p.optimizer;
    // roughly 2e5 surrogate evaluations per annealing search
    c.search.gsa.t_max = 1'000'000;
    c.search.gsa.max_evaluations = 200'000;
    if (p.is_discrete()) {
        c.variant = Variant::mixed_truss;
        c.optima_fraction = 0.1;
        // ten samples per loop: continue from the last weights instead of
        // paying a full cold fit every loop
        c.warm_start = true;
        c.warm_epochs = 100;
        // random bats rarely reach the incumbent in 72+ dimensions
        c.search.seed_best = 5;
    }
    return c;
}

double RunReport::best() const
{
    if (dataset.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (auto f = dataset.best_feasible()) return *f;
    return dataset.best().objective;
}

bool check_convergence(const std::vector<double>& best_f, double tol, std::size_t patience)
{
    require(patience >= 1, "check_convergence: patience must be >= 1");
    // compare against the entry `patience` loops back
    if (best_f.size() <= patience) return false;
    const double first = best_f[best_f.size() - 1 - patience];
    const double last = best_f.back();
    const double scale = std::max(std::abs(first), std::numeric_limits<double>::min());
    return std::abs(first - last) / scale < tol;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double evaluate_into(const Problem& p, RunReport& rep, const std::vector<DesignVector>& designs,
                     const std::vector<SampleTag>& tags)
{
    const auto t0 = Clock::now();
    const auto evals = evaluate_batch(p, designs);
    for (std::size_t i = 0; i < designs.size(); ++i)
        rep.dataset.append({designs[i], evals[i].objective, evals[i].feasible, tags[i]});
    rep.fem_calls += designs.size();
    return since(t0);
}

const VolumeConstraint* volume_of(const Problem& p) { return p.volume ? &*p.volume : nullptr; }

opt::SearchResult run_search(const Problem& p, const SearchSettings& s, const opt::Objective& f, RngStream& rng,
                             std::size_t top_k, std::size_t budget_override = 0)
{
    switch (s.optimizer) {
    case OptimizerKind::gsa: {
        auto cfg = s.gsa;
        cfg.top_k = std::max(cfg.top_k, top_k);
        if (budget_override) {
            cfg.max_evaluations = budget_override;
            cfg.t_max = std::numeric_limits<std::size_t>::max();
        }
        if (p.volume) {
            const double c = s.penalty_c > 0.0 ? s.penalty_c : 100.0 * p.reference_objective;
            return opt::gsa_minimize(opt::penalize_volume(f, *p.volume, c), p.dim, cfg, rng);
        }
        return opt::gsa_minimize(f, p.dim, cfg, rng);
    }
    case OptimizerKind::ba: {
        auto cfg = s.ba;
        cfg.top_k = std::max(cfg.top_k, top_k);
        if (budget_override) {
            cfg.max_evaluations = budget_override;
            cfg.t_max = budget_override / cfg.population + 1;
        }
        const auto space = p.is_discrete() ? opt::SearchSpace::discrete(p.space.catalog) : opt::SearchSpace::continuous();
        if (p.volume) {
            const double c = s.penalty_c > 0.0 ? s.penalty_c : 100.0 * p.reference_objective;
            return opt::ba_minimize(opt::penalize_volume(f, *p.volume, c), p.dim, cfg, space, rng);
        }
        return opt::ba_minimize(f, p.dim, cfg, space, rng);
    }
    case OptimizerKind::bba: {
        auto cfg = s.bba;
        cfg.top_k = std::max(cfg.top_k, top_k);
        if (budget_override) {
            cfg.max_evaluations = budget_override;
            cfg.t_max = budget_override / cfg.population + 1;
        }
        return opt::bba_minimize(f, p.dim, cfg, rng);
    }
    }
    throw ContractViolation("unknown optimizer");
}

void check_config(const Problem& p, const SoloConfig& cfg)
{
    require(cfg.per_loop >= 1, "samples per loop must be >= 1");
    require(cfg.initial_batch >= 1, "initial batch must be >= 1");
    require(cfg.budget >= cfg.initial_batch, "budget must cover the initial batch");
    require(optimizer_compatible(p, cfg.search.optimizer),
            "optimizer " + std::string(to_string(cfg.search.optimizer)) + " does not fit problem " + p.id);
}

std::vector<DesignVector> initial_designs(const Problem& p, std::size_t n, RngStream& rng)
{
    auto v = sampling::initial_batch(n, p.dim, p.space, volume_of(p), rng);
    if (v.size() > n) v.erase(v.begin() + static_cast<std::ptrdiff_t>(n), v.end());
    return v;
}

nn::MlpSpec spec_for(const Problem& p, const SoloConfig& cfg)
{
    nn::MlpSpec s = cfg.net;
    s.input_dim = p.dim;
    return s;
}

// search coordinates of the k lowest feasible records
std::vector<std::vector<double>> best_seeds(const Problem& p, const Dataset& d, std::size_t k)
{
    std::vector<const EvaluationRecord*> r;
    for (const auto& rec : d.records())
        if (rec.feasible) r.push_back(&rec);
    k = std::min(k, r.size());
    std::partial_sort(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k), r.end(),
                      [](auto* a, auto* b) { return a->objective < b->objective; });
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(p.search_point(r[i]->design));
    return out;
}

DesignVector best_design(const Dataset& d)
{
    const EvaluationRecord* best = nullptr;
    for (const auto& r : d.records())
        if (r.feasible && (!best || r.objective < best->objective)) best = &r;
    return best ? best->design : d.best().design;
}

} // namespace

RunReport run_solo(const Problem& p, const SoloConfig& cfg)
{
    check_config(p, cfg);
    RunReport rep;
    RngStream sampler = RngStream::named(cfg.seed, "sampler");
    RngStream init_rng = RngStream::named(cfg.seed, "net-init");
    RngStream search_rng = RngStream::named(cfg.seed, "search");
    RngStream train_rng = RngStream::named(cfg.seed, "train");

    {
        auto init = initial_designs(p, std::min(cfg.initial_batch, cfg.budget), sampler);
        evaluate_into(p, rep, init, std::vector<SampleTag>(init.size(), SampleTag::initial));
    }

    const nn::MlpSpec spec = spec_for(p, cfg);
    std::optional<nn::MlpParams> params;
    std::vector<double> best_trace;
    rep.stop_reason = "max-loops";
    for (std::size_t loop = 1; loop <= cfg.max_loops; ++loop) {
        if (rep.fem_calls >= cfg.budget) {
            rep.stop_reason = "budget";
            break;
        }
        LoopRecord rec;
        rec.loop = loop;

        auto t0 = Clock::now();
        nn::TrainHyper hyper = cfg.train;
        hyper.seed = train_rng.next_u64();
        if (params && cfg.warm_start) {
            if (cfg.warm_epochs) hyper.epochs = cfg.warm_epochs;
        }
        else {
            RngStream r = init_rng.derive(loop);
            params = nn::init_network(spec, r);
        }
        params = nn::train(std::move(*params), rep.dataset, hyper).params;
        rec.eps_mse = nn::empirical_mse(*params, rep.dataset);
        rec.t_train = since(t0);

        const std::size_t n_new = std::min(cfg.per_loop, cfg.budget - rep.fem_calls);
        std::size_t n_opt = n_new;
        if (cfg.variant != Variant::greedy) {
            const double frac = cfg.variant == Variant::mixed_truss && cfg.optima_fraction <= 0.0 ? 0.1 : cfg.optima_fraction;
            n_opt = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(frac * static_cast<double>(n_new))), 1,
                                            n_new);
        }

        t0 = Clock::now();
        const nn::Predictor pred(*params);
        const opt::Objective f = [&pred](std::span<const double> x) { return pred.objective(x); };
        SearchSettings search = cfg.search;
        if (search.optimizer == OptimizerKind::ba && search.seed_best)
            search.ba.seeds = best_seeds(p, rep.dataset, std::min(search.seed_best, search.ba.population));
        const auto found = run_search(p, search, f, search_rng, 4 * n_opt + 10);
        rec.t_search = since(t0);

        const DesignVector rho_hat = p.design_from_search(found.best);
        rec.e_rho_hat = pred.objective(rho_hat.values());

        std::vector<DesignVector> designs{rho_hat};
        std::vector<SampleTag> tags{SampleTag::search_optimum};
        auto known = [&](const DesignVector& v) {
            return rep.dataset.contains(v) || std::find(designs.begin(), designs.end(), v) != designs.end();
        };
        for (const auto& item : found.trace.top.items()) {
            if (designs.size() >= n_opt) break;
            DesignVector d = p.design_from_search(item.design);
            if (known(d)) continue;
            designs.push_back(std::move(d));
            tags.push_back(SampleTag::search_optimum);
        }
        const std::size_t n_dist = n_new - designs.size();
        for (auto& g : sampling::generate_batch(rho_hat, p.shape, p.table, n_dist, volume_of(p), sampler, known)) {
            designs.push_back(std::move(g.design));
            tags.push_back(g.tag);
        }

        const std::size_t first = rep.dataset.n_train();
        rec.t_fem = evaluate_into(p, rep, designs, tags);
        rec.f_rho_hat = rep.dataset[first].objective;
        rec.rel_err = (rec.e_rho_hat - rec.f_rho_hat) / rec.f_rho_hat;
        rec.n_train = rep.dataset.n_train();
        rec.best_f = rep.best();
        rep.loops.push_back(rec);
        best_trace.push_back(rec.best_f);

        if (cfg.stop_on_convergence && check_convergence(best_trace, cfg.tolerance, cfg.patience)) {
            rep.stop_reason = "converged";
            break;
        }
    }
    if (rep.stop_reason == "max-loops" && rep.fem_calls >= cfg.budget) rep.stop_reason = "budget";
    rep.final_design = best_design(rep.dataset);
    rep.surrogate = std::move(params);
    return rep;
}

RunReport run_offline_baseline(const Problem& p, std::size_t n_train, const SoloConfig& cfg)
{
    require(n_train >= 1, "offline baseline needs n_train >= 1");
    require(optimizer_compatible(p, cfg.search.optimizer), "optimizer does not fit problem " + p.id);
    RunReport rep;
    RngStream sampler = RngStream::named(cfg.seed, "sampler");
    RngStream init_rng = RngStream::named(cfg.seed, "net-init");
    RngStream search_rng = RngStream::named(cfg.seed, "search");
    RngStream train_rng = RngStream::named(cfg.seed, "train");

    LoopRecord rec;
    rec.loop = 1;
    // rho_hat is one of the n_train evaluations
    auto init = initial_designs(p, n_train > 1 ? n_train - 1 : 1, sampler);
    rec.t_fem = evaluate_into(p, rep, init, std::vector<SampleTag>(init.size(), SampleTag::initial));

    auto t0 = Clock::now();
    nn::TrainHyper hyper = cfg.train;
    hyper.seed = train_rng.next_u64();
    RngStream r = init_rng.derive(1);
    auto params = nn::train(nn::init_network(spec_for(p, cfg), r), rep.dataset, hyper).params;
    rec.eps_mse = nn::empirical_mse(params, rep.dataset);
    rec.t_train = since(t0);

    t0 = Clock::now();
    const nn::Predictor pred(params);
    const opt::Objective f = [&pred](std::span<const double> x) { return pred.objective(x); };
    const auto found = run_search(p, cfg.search, f, search_rng, 10);
    rec.t_search = since(t0);

    const DesignVector rho_hat = p.design_from_search(found.best);
    rec.e_rho_hat = pred.objective(rho_hat.values());
    rec.t_fem += evaluate_into(p, rep, {rho_hat}, {SampleTag::search_optimum});
    rec.f_rho_hat = rep.dataset.records().back().objective;
    rec.rel_err = (rec.e_rho_hat - rec.f_rho_hat) / rec.f_rho_hat;
    rec.n_train = rep.dataset.n_train();
    rec.best_f = rep.best();
    rep.loops.push_back(rec);
    rep.stop_reason = "single-shot";
    rep.final_design = best_design(rep.dataset);
    rep.surrogate = std::move(params);
    return rep;
}

RunReport run_stochastic_search(const Problem& p, const SoloConfig& cfg)
{
    require(cfg.per_loop >= 1 && cfg.initial_batch >= 1 && cfg.budget >= cfg.initial_batch,
            "stochastic search: invalid batch sizes or budget");
    RunReport rep;
    RngStream sampler = RngStream::named(cfg.seed, "sampler");
    {
        auto init = initial_designs(p, cfg.initial_batch, sampler);
        evaluate_into(p, rep, init, std::vector<SampleTag>(init.size(), SampleTag::initial));
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> best_trace;
    rep.stop_reason = "max-loops";
    for (std::size_t loop = 1; loop <= cfg.max_loops; ++loop) {
        if (rep.fem_calls >= cfg.budget) {
            rep.stop_reason = "budget";
            break;
        }
        LoopRecord rec;
        rec.loop = loop;
        const DesignVector base = best_design(rep.dataset);
        rec.f_rho_hat = rep.best();
        rec.e_rho_hat = rec.rel_err = rec.eps_mse = nan;
        std::vector<DesignVector> designs;
        std::vector<SampleTag> tags;
        auto known = [&](const DesignVector& v) {
            return rep.dataset.contains(v) || std::find(designs.begin(), designs.end(), v) != designs.end();
        };
        const std::size_t n_new = std::min(cfg.per_loop, cfg.budget - rep.fem_calls);
        for (auto& g : sampling::generate_batch(base, p.shape, p.table, n_new, volume_of(p), sampler, known)) {
            designs.push_back(std::move(g.design));
            tags.push_back(g.tag);
        }
        rec.t_fem = evaluate_into(p, rep, designs, tags);
        rec.n_train = rep.dataset.n_train();
        rec.best_f = rep.best();
        rep.loops.push_back(rec);
        best_trace.push_back(rec.best_f);
        if (cfg.stop_on_convergence && check_convergence(best_trace, cfg.tolerance, cfg.patience)) {
            rep.stop_reason = "converged";
            break;
        }
    }
    if (rep.stop_reason == "max-loops" && rep.fem_calls >= cfg.budget) rep.stop_reason = "budget";
    rep.final_design = best_design(rep.dataset);
    return rep;
}

RunReport run_direct_heuristic(const Problem& p, OptimizerKind optimizer, std::size_t budget, std::uint64_t seed,
                               const SearchSettings& settings, std::size_t record_every)
{
    require(budget >= 1, "direct heuristic needs a positive budget");
    require(record_every >= 1, "record_every must be >= 1");
    require(optimizer_compatible(p, optimizer), "optimizer does not fit problem " + p.id);
    SearchSettings s = settings;
    s.optimizer = optimizer;
    RngStream rng = RngStream::named(seed, "direct-search");

    RunReport rep;
    double best_any = std::numeric_limits<double>::infinity();
    double best_feasible = std::numeric_limits<double>::infinity();
    std::optional<DesignVector> best_design_seen;
    const auto t0 = Clock::now();
    const opt::Objective h = [&](std::span<const double> x) {
        const DesignVector d = p.design_from_search(x);
        const Evaluation e = p.evaluate(d);
        ++rep.fem_calls;
        best_any = std::min(best_any, e.objective);
        if (e.feasible && e.objective < best_feasible) {
            best_feasible = e.objective;
            best_design_seen = d;
        }
        if (rep.fem_calls % record_every == 0) {
            LoopRecord rec;
            rec.loop = rep.loops.size() + 1;
            rec.n_train = rep.fem_calls;
            rec.best_f = std::isfinite(best_feasible) ? best_feasible : best_any;
            rec.f_rho_hat = e.objective;
            rec.e_rho_hat = rec.rel_err = rec.eps_mse = std::numeric_limits<double>::quiet_NaN();
            rec.t_fem = since(t0);
            rep.loops.push_back(rec);
        }
        return e.objective;
    };
    // the volume penalty is not used here: designs are projected before evaluation
    const auto found = [&] {
        Problem q = p;
        q.volume.reset();
        return run_search(q, s, h, rng, 10, budget);
    }();
    if (rep.loops.empty() || rep.loops.back().n_train != rep.fem_calls) {
        LoopRecord rec;
        rec.loop = rep.loops.size() + 1;
        rec.n_train = rep.fem_calls;
        rec.best_f = std::isfinite(best_feasible) ? best_feasible : best_any;
        rec.f_rho_hat = found.best_value;
        rec.e_rho_hat = rec.rel_err = rec.eps_mse = std::numeric_limits<double>::quiet_NaN();
        rec.t_fem = since(t0);
        rep.loops.push_back(rec);
    }
    rep.final_design = best_design_seen ? *best_design_seen : p.design_from_search(found.best);
    rep.stop_reason = "budget";
    return rep;
}

} // namespace solo::driver
