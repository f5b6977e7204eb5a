// Command-line harness: factorize, solve, sweep, estimate RICs, check bounds.
//
// Exit codes: 0 success, 2 invalid input or violated precondition,
// 3 numerical failure.

#include "tubal/analysis.hpp"
#include "tubal/errors.hpp"
#include "tubal/experiment.hpp"
#include "tubal/io.hpp"
#include "tubal/measurement.hpp"
#include "tubal/solver.hpp"
#include "tubal/t_algebra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace tubal;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DimensionError("cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw DimensionError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DimensionError("cannot open " + path + " for writing");
    os << text;
}

// A single recovery problem, either synthetic (generated from a seed) or read
// from container files.
struct Instance {
    LinearMap map{Eigen::MatrixXd::Zero(1, 1), Dims3{1, 1, 1}};
    Eigen::VectorXd y;
    std::optional<Tensor3> x_true;
    Index r = 1;
    double sigma = 0.0;
    double noise_norm = 0.0;
    json meta;
};

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Instance build_instance(const json& spec, std::optional<std::uint64_t> seed_override) {
    Instance inst;
    if (spec.contains("map")) {
        const json meta = read_json_file(spec.at("map_meta").get<std::string>());
        inst.map = io::load_map(spec.at("map").get<std::string>(), meta);
        inst.y = io::load_vector(spec.at("y").get<std::string>());
        if (spec.contains("x_true")) inst.x_true = io::load_tensor(spec.at("x_true").get<std::string>());
        inst.r = get_or<Index>(spec, "r", 1);
        if (inst.x_true) inst.noise_norm = (inst.y - apply(inst.map, *inst.x_true)).norm();
        inst.meta = {{"source", "files"}, {"map", io::map_metadata(inst.map)}};
        return inst;
    }
    const Index n = get_or<Index>(spec, "n", 10);
    const Index n1 = get_or<Index>(spec, "n1", n);
    const Index n2 = get_or<Index>(spec, "n2", n);
    const Index n3 = get_or<Index>(spec, "n3", 5);
    inst.r = get_or<Index>(spec, "r", 1);
    const double factor = get_or<double>(spec, "sample_factor", 2.0);
    const Index m = spec.contains("m")
                        ? spec.at("m").get<Index>()
                        : static_cast<Index>(std::llround(factor * static_cast<double>(inst.r) *
                                                          static_cast<double>(n1 + n2 + 1) * static_cast<double>(n3)));
    inst.sigma = get_or<double>(spec, "sigma", 0.0);
    const auto seed = seed_override.value_or(get_or<std::uint64_t>(spec, "seed", 0));
    const auto mode = variance_mode_from_string(get_or<std::string>(spec, "variance_mode", "one_over_m"));
    if (!(inst.sigma >= 0.0)) throw DimensionError("sigma must be >= 0");
    if (m < 1) throw DimensionError("m must be >= 1");

    inst.map = gaussian_map(m, Dims3{n1, n2, n3}, seed, mode);
    inst.x_true = generate_lowrank(n1, n2, n3, inst.r, seed);
    const NoisySample s = add_noise(apply(inst.map, *inst.x_true), inst.sigma, seed);
    inst.y = s.y;
    inst.noise_norm = s.noise_norm;
    inst.meta = {{"source", "synthetic"}, {"seed", seed}, {"sigma", inst.sigma}, {"noise_norm", s.noise_norm},
                 {"map", io::map_metadata(inst.map)}, {"r", inst.r}};
    return inst;
}

SolverConfig solver_from_spec(const json& spec) {
    const double lambda = get_or<double>(spec, "lambda", 0.1);
    const std::string preset = get_or<std::string>(spec, "preset", "default");
    SolverConfig base;
    if (preset == "continuation") {
        base = continuation_config(lambda);
    } else if (preset != "default") {
        throw DimensionError("unknown solver preset '" + preset + "'");
    }
    base.lambda = lambda;
    json merged = io::to_json(base);
    if (spec.contains("solver")) merged.update(spec.at("solver"));
    return io::solver_config_from_json(merged, lambda);
}

int cmd_tsvd(const std::string& in, const std::string& factors_prefix, const std::string& out) {
    const Tensor3 x = io::load_tensor(in);
    const TsvdFactors f = tsvd(x);
    if (!factors_prefix.empty()) {
        io::save_tensor(factors_prefix + "_U.tubl", f.u);
        io::save_tensor(factors_prefix + "_S.tubl", f.s);
        io::save_tensor(factors_prefix + "_V.tubl", f.v);
    }
    const Eigen::VectorXd d = f.first_slice_diagonal();
    const Tensor3 rec = tprod(tprod(f.u, f.s), conj_transpose(f.v));
    const double nx = fro_norm(x);
    json j{{"dims", {x.n1(), x.n2(), x.n3()}},
           {"tubal_rank", tubal_rank(x)},
           {"average_rank", average_rank(x).value()},
           {"tnn", tnn(x)},
           {"first_slice_diagonal", std::vector<double>(d.data(), d.data() + d.size())},
           {"reconstruction_error", nx > 0 ? fro_norm(rec - x) / nx : fro_norm(rec - x)}};
    write_text(out, io::dump(j));
    return 0;
}

int cmd_solve(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out,
              const std::string& x_out) {
    const json spec = read_json_file(spec_path);
    const Instance inst = build_instance(spec, seed);
    const SolverConfig cfg = solver_from_spec(spec);
    const SolveResult res = admm_solve(inst.map, inst.y, cfg);
    if (!x_out.empty()) io::save_tensor(x_out, res.x_hat);

    json j{{"instance", inst.meta}, {"config", io::to_json(cfg)}, {"result", io::to_json(res)}};
    j["objective"] = rtnnm_objective(inst.map, inst.y, res.x_hat, cfg.lambda);
    if (inst.x_true) {
        const double snr = snr_db(*inst.x_true, res.x_hat);
        j["snr_db"] = std::isfinite(snr) ? json(snr) : json("inf");
        j["relative_error"] = fro_norm(res.x_hat - *inst.x_true) / fro_norm(*inst.x_true);
    }
    write_text(out, io::dump(j));
    return 0;
}

int cmd_experiment(const std::string& spec_path, const std::string& case_name, std::optional<std::uint64_t> seed,
                   const std::string& out, const std::string& format, int workers, bool timing,
                   std::optional<int> trials) {
    ExperimentSpec spec;
    if (!spec_path.empty()) {
        spec = experiment_spec_from_json(read_json_file(spec_path));
    } else if (case_name == "case1") {
        spec = ExperimentSpec::case1();
    } else if (case_name == "case2") {
        spec = ExperimentSpec::case2();
    } else if (case_name == "case3") {
        spec = ExperimentSpec::case3();
    } else {
        throw DimensionError("experiment needs --spec or --case case1|case2|case3");
    }
    if (seed) spec.base_seed = *seed;
    if (trials) spec.trials = *trials;
    spec.validate();
    std::cerr << spec.case_name << ": n = " << spec.n << ", n3 = " << spec.n3 << ", r = " << spec.rank()
              << ", m = " << spec.samples() << ", " << spec.trials << " trials per cell\n";

    const ExperimentResult result = run_experiment(spec, workers);
    int failures = 0;
    for (const auto& c : result.cells) failures += c.failures;
    if (failures > 0) std::cerr << "warning: " << failures << " trials aborted with a numerical failure\n";

    write_text(out, format_from_string(format) == Format::csv ? experiment_csv(result)
                                                              : io::dump(to_json(result, timing)));
    return 0;
}

int cmd_rip(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out,
            const std::string& format) {
    const json spec = spec_path.empty() ? json::object() : read_json_file(spec_path);
    MapSpec ms;
    if (spec.contains("dims")) {
        const auto d = spec.at("dims").get<std::vector<Index>>();
        if (d.size() != 3) throw DimensionError("dims must have three entries");
        ms.dims = Dims3{d[0], d[1], d[2]};
    }
    ms.m = get_or<Index>(spec, "m", ms.m);
    ms.seed = get_or<std::uint64_t>(spec, "map_seed", ms.seed);
    ms.variance_mode = variance_mode_from_string(get_or<std::string>(spec, "variance_mode", "one_over_m"));
    const auto ranks = get_or<std::vector<Index>>(spec, "ranks", {1, 2, 3});
    const int trials = get_or<int>(spec, "trials", 100);
    const double t = get_or<double>(spec, "t", 2.0);
    const std::uint64_t probe_seed = seed.value_or(get_or<std::uint64_t>(spec, "seed", 0));

    const auto rows = run_rip_campaign(ms, ranks, trials, probe_seed, t);
    write_text(out, format_from_string(format) == Format::csv ? rip_csv(rows) : io::dump(to_json(rows)));
    return 0;
}

int cmd_bounds(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out) {
    const json spec = read_json_file(spec_path);
    json j;
    if (spec.contains("delta")) {
        // Constants only.
        const double delta = spec.at("delta").get<double>();
        const double t = spec.at("t").get<double>();
        const Index r = spec.at("r").get<Index>();
        const Index n3 = spec.at("n3").get<Index>();
        const double lambda = get_or<double>(spec, "lambda", 0.1);
        const auto eta = eta_constants(delta, t, n3);
        j = {{"threshold", ric_threshold(t, n3)}, {"eta1", eta.eta1}, {"eta2", eta.eta2}};
        j["corollary"] = io::to_json(corollary_constants(delta, t, r, n3, lambda));
        if (spec.contains("epsilon")) {
            j["theorem"] = io::to_json(theorem1_constants(delta, t, r, n3, lambda, spec.at("epsilon").get<double>()));
        }
    } else {
        // Solve an instance and verify both bounds over a grid of t. The
        // tightest satisfied t is a tool convention.
        const Instance inst = build_instance(spec, seed);
        if (!inst.x_true) throw DimensionError("bounds verification needs the ground truth (x_true)");
        json with_preset = spec;
        if (!with_preset.contains("preset")) with_preset["preset"] = "continuation";
        const SolverConfig cfg = solver_from_spec(with_preset);
        const SolveResult res = admm_solve(inst.map, inst.y, cfg);
        const double epsilon = get_or<double>(spec, "epsilon", inst.noise_norm);
        const auto t_grid = get_or<std::vector<double>>(spec, "t_grid", {1.5, 2, 3, 4, 5, 6, 8, 10});
        const int trials = get_or<int>(spec, "rip_trials", 100);
        const auto probe = get_or<std::uint64_t>(spec, "probe_seed", 0x626f756e64);
        const BoundSweep sweep =
            sweep_bounds(*inst.x_true, res.x_hat, inst.map, inst.y, inst.r, cfg.lambda, epsilon, t_grid, trials, probe);

        json entries = json::array();
        for (const auto& e : sweep.entries) {
            json je{{"t", e.t}, {"order", e.order}, {"delta_hat", e.delta_hat}, {"threshold", e.threshold}};
            je["report"] = e.report ? io::to_json(*e.report) : json(nullptr);
            entries.push_back(std::move(je));
        }
        j = {{"instance", inst.meta},
             {"config", io::to_json(cfg)},
             {"epsilon", epsilon},
             {"iterations", res.iterations},
             {"entries", std::move(entries)}};
        j["tightest_t"] = sweep.tightest ? json(sweep.entries[*sweep.tightest].t) : json(nullptr);
        bool all = true;
        for (const auto& e : sweep.entries) all = all && (!e.report || e.report->satisfied());
        j["all_satisfied"] = all;
    }
    write_text(out, io::dump(j));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-tubal-rank tensor recovery: t-SVD, RTNNM solver, t-RIP bounds and SNR sweeps"};
    app.require_subcommand(1);

    std::string spec_path, out, format = "csv", in, factors, x_out, case_name;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    int workers = 1;
    bool timing = false;

    auto* tsvd_cmd = app.add_subcommand("tsvd", "Factorize a tensor container file");
    tsvd_cmd->add_option("--in", in, "Input tensor (.tubl)")->required();
    tsvd_cmd->add_option("--factors", factors, "Write <prefix>_U/_S/_V.tubl");
    tsvd_cmd->add_option("--out", out, "Summary JSON path (default stdout)");

    auto* solve_cmd = app.add_subcommand("solve", "Solve one RTNNM instance described by a JSON spec");
    solve_cmd->add_option("--spec", spec_path, "Instance spec (JSON)")->required();
    solve_cmd->add_option("--seed", seed, "Override the instance seed");
    solve_cmd->add_option("--out", out, "Result JSON path (default stdout)");
    solve_cmd->add_option("--x-out", x_out, "Write the recovered tensor (.tubl)");

    auto* exp_cmd = app.add_subcommand("experiment", "SNR sweep over a sigma x lambda grid");
    exp_cmd->add_option("--spec", spec_path, "Experiment spec (JSON)");
    exp_cmd->add_option("--case", case_name, "Built-in grid: case1, case2 or case3");
    exp_cmd->add_option("--seed", seed, "Override base_seed");
    exp_cmd->add_option("--trials", trials, "Override trials per cell");
    exp_cmd->add_option("--out", out, "Output path (default stdout)");
    exp_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    exp_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    exp_cmd->add_flag("--timing", timing, "Include wall times and a timestamp in JSON output");

    auto* rip_cmd = app.add_subcommand("rip", "Estimate t-RICs of a Gaussian map over a list of ranks");
    rip_cmd->add_option("--spec", spec_path, "Campaign spec (JSON)");
    rip_cmd->add_option("--seed", seed, "Probe seed");
    rip_cmd->add_option("--out", out, "Output path (default stdout)");
    rip_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* bounds_cmd = app.add_subcommand("bounds", "Bound constants, or verification on a solved instance");
    bounds_cmd->add_option("--spec", spec_path, "Bounds spec (JSON)")->required();
    bounds_cmd->add_option("--seed", seed, "Override the instance seed");
    bounds_cmd->add_option("--out", out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*tsvd_cmd) return cmd_tsvd(in, factors, out);
        if (*solve_cmd) return cmd_solve(spec_path, seed, out, x_out);
        if (*exp_cmd) return cmd_experiment(spec_path, case_name, seed, out, format, workers, timing, trials);
        if (*rip_cmd) return cmd_rip(spec_path, seed, out, format);
        if (*bounds_cmd) return cmd_bounds(spec_path, seed, out);
    } catch (const ConditionError& e) {
        std::cerr << "error [" << e.condition() << "]: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
