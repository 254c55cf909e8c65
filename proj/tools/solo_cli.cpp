// Command-line front end: run a method on a benchmark, self-test, export
// plot series.

#include "solo/core/error.hpp"
#include "solo/driver/config_io.hpp"
#include "solo/driver/solo.hpp"
#include "solo/fem/truss.hpp"
#include "solo/interp/interpolation.hpp"
#include "solo/nn/mlp.hpp"
#include "solo/opt/gsa.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace solo;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct RunArgs {
    std::string problem = "analytic-smoke";
    std::string method = "solo";
    std::uint64_t seed = 0;
    std::optional<std::size_t> budget;
    std::string out;
    std::string config;
    bool timing = false;
};

const std::vector<std::string> kMethods{"solo", "solo-g", "solo-r", "offline", "ss", "direct-gsa", "direct-ba", "direct-bba"};

fs::path output_dir(const RunArgs& a)
{
    if (!a.out.empty()) return a.out;
    const char* root = std::getenv("SOLO_OUTPUT_ROOT");
    const fs::path base = root && *root ? fs::path(root) : fs::path("solo-runs");
    return base / (a.problem + "_" + a.method + "_seed" + std::to_string(a.seed));
}

void write_design(std::ostream& out, const DesignVector& d, sampling::GridShape shape)
{
    out << std::setprecision(17);
    for (std::size_t r = 0; r < shape.rows; ++r) {
        for (std::size_t c = 0; c < shape.cols; ++c) out << (c ? " " : "") << d[r * shape.cols + c];
        out << '\n';
    }
}

int cmd_run(const RunArgs& a)
{
    driver::Problem p;
    try {
        p = driver::make_problem(a.problem);
    }
    catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    if (std::find(kMethods.begin(), kMethods.end(), a.method) == kMethods.end()) {
        std::cerr << "error: unknown method '" << a.method << "'\n";
        return kUsage;
    }

    driver::SoloConfig cfg = driver::default_config(p);
    cfg.seed = a.seed;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) {
            std::cerr << "error: cannot read config '" << a.config << "'\n";
            return kUsage;
        }
        try {
            driver::read_config(in, cfg);
        }
        catch (const ContractViolation& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kUsage;
        }
        cfg.seed = a.seed;
    }
    if (a.budget) cfg.budget = *a.budget;

    const bool binary = p.space.kind == DesignKind::binary;
    std::optional<driver::OptimizerKind> direct;
    if (a.method == "direct-gsa") direct = driver::OptimizerKind::gsa;
    if (a.method == "direct-ba") direct = driver::OptimizerKind::ba;
    if (a.method == "direct-bba") direct = driver::OptimizerKind::bba;
    if ((a.method == "solo-g" || a.method == "solo-r") && !binary) {
        std::cerr << "error: " << a.method << " needs a binary problem, " << p.id << " is not\n";
        return kUsage;
    }
    if (direct && !driver::optimizer_compatible(p, *direct)) {
        std::cerr << "error: " << a.method << " does not fit the design space of " << p.id << '\n';
        return kUsage;
    }
    if (!driver::optimizer_compatible(p, cfg.search.optimizer)) {
        std::cerr << "error: optimizer " << driver::to_string(cfg.search.optimizer) << " does not fit " << p.id << '\n';
        return kUsage;
    }
    if (!direct && cfg.budget < cfg.initial_batch) {
        std::cerr << "error: budget " << cfg.budget << " is below the initial batch " << cfg.initial_batch << '\n';
        return kUsage;
    }

    const fs::path dir = output_dir(a);
    try {
        fs::create_directories(dir);
        driver::RunReport rep;
        if (a.method == "solo") rep = driver::run_solo(p, cfg);
        else if (a.method == "solo-g") {
            cfg.variant = driver::Variant::greedy;
            rep = driver::run_solo(p, cfg);
        }
        else if (a.method == "solo-r") {
            cfg.variant = driver::Variant::regular;
            cfg.optima_fraction = 0.1;
            rep = driver::run_solo(p, cfg);
        }
        else if (a.method == "offline") rep = driver::run_offline_baseline(p, cfg.budget, cfg);
        else if (a.method == "ss") rep = driver::run_stochastic_search(p, cfg);
        else rep = driver::run_direct_heuristic(p, *direct, cfg.budget, cfg.seed, cfg.search);

        {
            std::ofstream out(dir / "report.csv");
            rep.write_csv(out, a.timing);
        }
        {
            std::ofstream out(dir / "config.ini");
            driver::write_config(out, cfg);
        }
        if (!rep.dataset.empty()) rep.dataset.save((dir / "dataset.jsonl").string());
        if (rep.surrogate) nn::save_checkpoint((dir / "surrogate.json").string(), *rep.surrogate);
        if (rep.final_design) {
            std::ofstream out(dir / "final_design.txt");
            write_design(out, *rep.final_design, p.shape);
        }
        const double best = rep.loops.empty() ? rep.best() : rep.loops.back().best_f;
        std::cout << p.id << ' ' << a.method << " seed=" << a.seed << " evaluations=" << rep.fem_calls
                  << " best=" << std::setprecision(10) << best << " stop=" << rep.stop_reason << " out=" << dir.string()
                  << '\n';
    }
    catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

void break_gradient(nn::detail::Gradients& g) { g.weight.front()(0, 0) += 0.5; }

int cmd_selftest(const std::string& fault)
{
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    struct Row {
        std::string name;
        bool ok;
        std::string detail;
    };
    std::vector<Row> rows;
    auto check = [&](const std::string& name, auto&& fn) {
        try {
            auto [ok, detail] = fn();
            rows.push_back({name, ok, detail});
        }
        catch (const std::exception& e) {
            rows.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };
    auto str = [](double x) {
        std::ostringstream s;
        s << std::setprecision(3) << x;
        return s.str();
    };

    check("gradient-check", [&] {
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            RngStream rng(seed, 1);
            nn::MlpSpec spec;
            spec.input_dim = 6;
            spec.hidden = {8, 5};
            auto params = nn::init_network(spec, rng);
            for (auto& n : params.norms) {
                for (Eigen::Index k = 0; k < n.gamma.size(); ++k) {
                    n.gamma(k) = rng.uniform(0.5, 1.5);
                    n.beta(k) = rng.uniform(-0.5, 0.5);
                    n.running_mean(k) = rng.uniform(-0.2, 0.2);
                    n.running_var(k) = rng.uniform(0.5, 2.0);
                }
            }
            std::vector<double> probe(6);
            for (auto& x : probe) x = rng.uniform();
            const double err = fault == "gradient" ? nn::detail::gradient_check(params, probe, 1e-5, 1.0, &break_gradient)
                                                   : nn::gradient_check(params, probe, 1e-5);
            worst = std::max(worst, err);
        }
        return std::pair{worst < 1e-4, "max rel err " + str(worst)};
    });

    check("truss-single-bar", [&] {
        truss::TrussModel m;
        const double len = 100.0, area = 2.0, force = 7.0;
        m.nodes = {{0, 0, 0}, {0, 0, len}};
        m.bars = {{0, 1}};
        m.fixed = {{true, true, true}, {true, true, false}};
        m.loads = {{0, 0, 0}, {0, 0, force}};
        m.elastic_modulus = 1e4;
        m.unit_weight = {0.1};
        m.catalog = {area};
        const auto r = truss::solve_truss(m, std::vector<double>{area});
        const double u = force * len / (m.elastic_modulus * area);
        const double err = std::max(std::abs(r.displacements[1][2] - u) / u, std::abs(r.stresses[0] - force / area) / (force / area));
        return std::pair{err < 1e-8, "rel err " + str(err)};
    });

    check("rbf-interpolation", [&] {
        RngStream rng(7, 0);
        std::vector<interp::Point2> centers;
        std::vector<double> values;
        for (int i = 0; i < 30; ++i) {
            centers.push_back({rng.uniform(), rng.uniform()});
            values.push_back(rng.uniform());
        }
        const auto model = interp::rbf_fit(centers, values, interp::default_shape_distance(centers));
        double worst = 0.0;
        for (std::size_t i = 0; i < centers.size(); ++i)
            worst = std::max(worst, std::abs(interp::rbf_eval(model, centers[i]) - values[i]));
        return std::pair{worst < 1e-8, "max nodal err " + str(worst)};
    });

    check("gsa-acceptance", [&] {
        RngStream rng(11, 0);
        const double p = opt::gsa_acceptance_probability(0.1, 1, 1.0, -5.0);
        int hits = 0;
        const int trials = 100000;
        for (int i = 0; i < trials; ++i) hits += opt::gsa_acceptance(0.1, 1, 1.0, -5.0, rng);
        const double freq = static_cast<double>(hits) / trials;
        return std::pair{std::abs(freq - p) < 0.01, "freq " + str(freq) + " vs p " + str(p)};
    });

    bool all = true;
    for (const auto& r : rows) {
        std::cout << (r.ok ? "PASS " : "FAIL ") << std::left << std::setw(20) << r.name << r.detail << '\n';
        all = all && r.ok;
    }
    std::cout << "selftest " << (all ? "passed" : "FAILED") << " in "
              << str(std::chrono::duration<double>(Clock::now() - t0).count()) << " s\n";
    return all ? kOk : kFailure;
}

int cmd_export(const std::string& report, const std::string& out_path)
{
    std::ifstream in(report);
    if (!in) {
        std::cerr << "error: cannot open report '" << report << "'\n";
        return kFailure;
    }
    std::vector<driver::LoopRecord> rows;
    try {
        rows = driver::read_report_csv(in);
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return kFailure;
        }
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    // re-read the cells as text so values pass through unchanged
    in.clear();
    in.seekg(0);
    std::string line;
    std::getline(in, line);
    out << "n_train,best_F\n";
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string loop, n, best;
        std::getline(ss, loop, ',');
        std::getline(ss, n, ',');
        std::getline(ss, best, ',');
        out << n << ',' << best << '\n';
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Surrogate-assisted topology optimization"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Threads for batch evaluation (default: all cores)");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run one method on one problem");
    run_cmd->add_option("--problem", run.problem, "Problem id")->required();
    run_cmd->add_option("--method", run.method, "solo, solo-g, solo-r, offline, ss, direct-gsa, direct-ba, direct-bba");
    run_cmd->add_option("--seed", run.seed, "Random seed");
    run_cmd->add_option("--budget", run.budget, "Expensive evaluation budget");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--config", run.config, "INI config file; flags override it");
    run_cmd->add_flag("--timing", run.timing, "Write wall-clock phase times (reports are no longer reproducible)");
    run_cmd->add_option("--threads", threads, "Threads for batch evaluation");

    std::string fault;
    auto* self_cmd = app.add_subcommand("selftest", "Run built-in numerical checks");
    self_cmd->add_option("--inject-fault", fault, "Negative control: 'gradient' corrupts backprop")
        ->check(CLI::IsMember({"gradient"}));

    std::string report, export_out;
    auto* export_cmd = app.add_subcommand("export-plotdata", "Emit (n_train, best objective) from a report");
    export_cmd->add_option("report", report, "report.csv")->required();
    export_cmd->add_option("--out", export_out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    if (threads > 0) omp_set_num_threads(threads);

    if (*run_cmd) return cmd_run(run);
    if (*self_cmd) return cmd_selftest(fault);
    if (*export_cmd) return cmd_export(report, export_out);
    return kUsage;
}
