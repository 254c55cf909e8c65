#pragma once

#include "solo/core/dataset.hpp"
#include "solo/driver/problem.hpp"
#include "solo/nn/mlp.hpp"
#include "solo/opt/bat.hpp"
#include "solo/opt/gsa.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace solo::driver {

/// regular: rho_hat plus disturbances. greedy: every new sample comes from
/// the search's best distinct designs. mixed_truss: 10 % search optima and
/// 90 % disturbances.
enum class Variant { regular, greedy, mixed_truss };

std::string_view to_string(Variant v) noexcept;
Variant variant_from_string(std::string_view text);

struct SearchSettings {
    OptimizerKind optimizer = OptimizerKind::gsa;
    opt::GsaConfig gsa;
    opt::BaConfig ba;
    opt::BbaConfig bba;
    /// Volume penalty factor; 0 picks 100 x the reference objective.
    double penalty_c = 0.0;
    /// BA only: start this many bats at the best feasible records.
    std::size_t seed_best = 0;
};

struct SoloConfig {
    Variant variant = Variant::regular;
    std::size_t initial_batch = 100;
    std::size_t per_loop = 100;
    /// Share of each loop's samples taken from the search's distinct optima
    /// (rho_hat always counts as one). Ignored for greedy, which uses 1.
    double optima_fraction = 0.0;
    std::size_t max_loops = 1000;
    std::size_t budget = 1000;          ///< max expensive evaluations
    bool stop_on_convergence = true;
    double tolerance = 1e-3;
    std::size_t patience = 3;
    bool warm_start = false;
    /// Epochs for warm-started retrains (0 = same as train.epochs).
    std::size_t warm_epochs = 0;
    nn::MlpSpec net;                    ///< input_dim is filled from the problem
    nn::TrainHyper train;
    SearchSettings search;
    std::uint64_t seed = 0;
};

/// Problem-specific defaults: net widths, batch sizes, optimizer, and a
/// surrogate-search budget of 2e5 evaluations for continuous problems.
SoloConfig default_config(const Problem& p);

struct LoopRecord {
    std::size_t loop = 0;
    std::size_t n_train = 0;
    double best_f = 0.0;
    double f_rho_hat = 0.0;
    double e_rho_hat = 0.0;
    double rel_err = 0.0;
    double eps_mse = 0.0;
    double t_fem = 0.0;
    double t_train = 0.0;
    double t_search = 0.0;
};

struct RunReport {
    std::vector<LoopRecord> loops;
    std::optional<DesignVector> final_design;
    Dataset dataset;
    std::optional<nn::MlpParams> surrogate;
    std::size_t fem_calls = 0;
    std::string stop_reason;

    /// Best objective over feasible records (all records when none is).
    double best() const;

    /// Header: loop,n_train,best_F,F_rho_hat,e_rho_hat,rel_err,eps_mse,t_fem,t_train,t_search
    void write_csv(std::ostream& out, bool with_timing = true) const;
};

/// Reads the CSV written by RunReport::write_csv back into loop records.
std::vector<LoopRecord> read_report_csv(std::istream& in);

/// True when best F moved by less than tol (relative) over the last
/// `patience` loops, i.e. between entry size-1-patience and the last one.
/// False while fewer than patience + 1 entries exist.
bool check_convergence(const std::vector<double>& best_f, double tol, std::size_t patience);

/// Train, search the surrogate, evaluate rho_hat, disturb, evaluate, repeat.
RunReport run_solo(const Problem& p, const SoloConfig& cfg);

/// n_train random samples (rho_hat included), one training, one search.
RunReport run_offline_baseline(const Problem& p, std::size_t n_train, const SoloConfig& cfg);

/// As run_solo but rho_hat is the best record so far and there is no network.
RunReport run_stochastic_search(const Problem& p, const SoloConfig& cfg);

/// The optimizer applied to the expensive objective itself. Records one
/// loop line every `record_every` evaluations; no dataset is kept.
RunReport run_direct_heuristic(const Problem& p, OptimizerKind optimizer, std::size_t budget, std::uint64_t seed,
                               const SearchSettings& settings = {}, std::size_t record_every = 100);

} // namespace solo::driver
