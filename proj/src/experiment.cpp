#include "tubal/experiment.hpp"

#include "tubal/errors.hpp"
#include "tubal/io.hpp"
#include "tubal/random.hpp"
#include "tubal/t_algebra.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace tubal {

namespace {

using nlohmann::json;

ExperimentSpec reference_grid(std::string name, Index n, double fraction, double factor) {
    ExperimentSpec s;
    s.case_name = std::move(name);
    s.n = n;
    s.n3 = 5;
    s.r_abs.reset();
    s.r_fraction = fraction;
    s.sample_factor = factor;
    s.sigma_list = {0.01, 0.03, 0.05, 0.07, 0.1};
    s.lambda_list = {1e1, 1e0, 1e-1, 1e-2, 1e-3, 1e-4};
    return s;
}

json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw DimensionError("expected a number, got \"" + s + "\"");
}

std::string fixed4(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

} // namespace

std::string format_number(double v) {
    if (!std::isfinite(v)) return fixed4(v);
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

Index ExperimentSpec::rank() const {
    if (r_abs) return *r_abs;
    if (!r_fraction) throw DimensionError("spec: r is not set");
    return std::max<Index>(1, static_cast<Index>(std::llround(*r_fraction * static_cast<double>(n))));
}

Index ExperimentSpec::samples() const {
    const double m = sample_factor * static_cast<double>(rank()) * static_cast<double>(2 * n + 1) *
                     static_cast<double>(n3);
    return static_cast<Index>(std::llround(m));
}

void ExperimentSpec::validate() const {
    if (case_name.empty()) throw DimensionError("spec: case_name must not be empty");
    if (n < 1 || n3 < 1) throw DimensionError("spec: n and n3 must be >= 1");
    if (r_abs.has_value() == r_fraction.has_value()) {
        throw DimensionError("spec: give exactly one of r and r_fraction");
    }
    if (r_fraction && !(*r_fraction > 0.0 && std::isfinite(*r_fraction))) {
        throw DimensionError("spec: r_fraction must be positive");
    }
    const Index r = rank();
    if (r < 1 || r > n) throw DimensionError("spec: r = " + std::to_string(r) + " outside [1, n]");
    if (!(sample_factor > 0.0) || !std::isfinite(sample_factor)) {
        throw DimensionError("spec: sample factor must be positive");
    }
    if (samples() < 1) throw DimensionError("spec: sample rule gives m < 1");
    if (trials < 1) throw DimensionError("spec: trials must be >= 1");
    for (double s : sigma_list) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw DimensionError("spec: every sigma must be finite and >= 0");
    }
    for (double l : lambda_list) {
        if (!(l > 0.0) || !std::isfinite(l)) throw DimensionError("spec: every lambda must be finite and > 0");
    }
    solver.validate();
}

ExperimentSpec ExperimentSpec::case1() { return reference_grid("case1", 10, 0.1, 2.0); }
ExperimentSpec ExperimentSpec::case2() { return reference_grid("case2", 20, 0.2, 1.5); }
ExperimentSpec ExperimentSpec::case3() { return reference_grid("case3", 30, 0.3, 1.5); }

json to_json(const ExperimentSpec& s) {
    json j{{"case_name", s.case_name},
           {"n", s.n},
           {"n3", s.n3},
           {"sample_rule", {{"factor", s.sample_factor}}},
           {"sigma_list", s.sigma_list},
           {"lambda_list", s.lambda_list},
           {"trials", s.trials},
           {"base_seed", s.base_seed},
           {"variance_mode", to_string(s.variance_mode)},
           {"shared_instances", s.shared_instances}};
    if (s.r_abs) j["r"] = *s.r_abs;
    if (s.r_fraction) j["r_fraction"] = *s.r_fraction;
    json solver = io::to_json(s.solver);
    solver.erase("lambda");
    j["solver"] = std::move(solver);
    return j;
}

ExperimentSpec experiment_spec_from_json(const json& j) {
    try {
        if (!j.is_object()) throw DimensionError("spec: expected a JSON object");
        ExperimentSpec s;
        s.case_name = j.value("case_name", s.case_name);
        s.n = j.value("n", s.n);
        s.n3 = j.value("n3", s.n3);
        if (j.contains("r") || j.contains("r_fraction")) {
            s.r_abs.reset();
            s.r_fraction.reset();
            if (j.contains("r")) s.r_abs = j.at("r").get<Index>();
            if (j.contains("r_fraction")) s.r_fraction = j.at("r_fraction").get<double>();
        }
        if (j.contains("sample_rule")) s.sample_factor = j.at("sample_rule").at("factor").get<double>();
        s.sigma_list = j.value("sigma_list", s.sigma_list);
        s.lambda_list = j.value("lambda_list", s.lambda_list);
        s.trials = j.value("trials", s.trials);
        s.base_seed = j.value("base_seed", s.base_seed);
        if (j.contains("variance_mode")) s.variance_mode = variance_mode_from_string(j.at("variance_mode").get<std::string>());
        s.shared_instances = j.value("shared_instances", s.shared_instances);
        if (j.contains("solver")) s.solver = io::solver_config_from_json(j.at("solver"));
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw DimensionError(std::string("spec: ") + e.what());
    }
}

Tensor3 generate_lowrank(Index n1, Index n2, Index n3, Index r, std::uint64_t seed) {
    if (n1 < 1 || n2 < 1 || n3 < 1) throw DimensionError("generate_lowrank: dims must be >= 1");
    if (r < 1 || r > std::min(n1, n2)) throw DimensionError("generate_lowrank: r must lie in [1, min(n1, n2)]");
    GaussianSource g(seed, Stream::data);
    const Tensor3 a = g.tensor(n1, r, n3);
    const Tensor3 b = g.tensor(r, n2, n3);
    return tprod(a, b);
}

std::uint64_t trial_seed(const ExperimentSpec& spec, std::size_t sigma_idx, std::size_t lambda_idx, int trial) {
    if (spec.shared_instances) sigma_idx = lambda_idx = 0;
    return derive_seed(spec.base_seed, {hash_string(spec.case_name), static_cast<std::uint64_t>(sigma_idx),
                                        static_cast<std::uint64_t>(lambda_idx), static_cast<std::uint64_t>(trial)});
}

TrialOutcome run_trial(const ExperimentSpec& spec, std::size_t sigma_idx, std::size_t lambda_idx, int trial) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = trial_seed(spec, sigma_idx, lambda_idx, trial);
    const Index r = spec.rank();
    const Dims3 dims{spec.n, spec.n, spec.n3};

    TrialOutcome out;
    try {
        const LinearMap map = gaussian_map(spec.samples(), dims, seed, spec.variance_mode);
        const Tensor3 x = generate_lowrank(spec.n, spec.n, spec.n3, r, seed);
        const NoisySample sample = add_noise(apply(map, x), spec.sigma_list.at(sigma_idx), seed);
        SolverConfig cfg = spec.solver;
        cfg.lambda = spec.lambda_list.at(lambda_idx);
        const SolveResult res = admm_solve(map, sample.y, cfg);
        out.snr = snr_db(x, res.x_hat);
        out.iterations = res.iterations;
        out.converged = res.converged;
    } catch (const NumericalError&) {
        out.failed = true;
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

const CellStats& ExperimentResult::cell(std::size_t sigma_idx, std::size_t lambda_idx) const {
    const std::size_t ns = spec.sigma_list.size();
    if (sigma_idx >= ns || lambda_idx >= spec.lambda_list.size()) throw DimensionError("cell index out of range");
    return cells[lambda_idx * ns + sigma_idx];
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int workers) {
    spec.validate();
    if (workers < 1) throw DimensionError("workers must be >= 1");

    const std::size_t ns = spec.sigma_list.size();
    const std::size_t nl = spec.lambda_list.size();
    const auto nt = static_cast<std::size_t>(spec.trials);
    const std::size_t total = ns * nl * nt;

    // Task index = (l * ns + s) * nt + trial; each slot is written by one thread.
    std::vector<TrialOutcome> outcomes(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            const std::size_t c = i / nt;
            try {
                outcomes[i] = run_trial(spec, c % ns, c / ns, static_cast<int>(i % nt));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(total);
            }
        }
    };
    const auto n_threads = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(workers), total));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_threads; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);

    ExperimentResult result;
    result.spec = spec;
    result.r = spec.rank();
    result.m = spec.samples();
    result.cells.resize(ns * nl);
    for (std::size_t l = 0; l < nl; ++l) {
        for (std::size_t s = 0; s < ns; ++s) {
            CellStats& cs = result.cells[l * ns + s];
            cs.sigma = spec.sigma_list[s];
            cs.lambda = spec.lambda_list[l];
            double sum = 0.0, iters = 0.0, wall = 0.0;
            std::vector<double> snrs;
            for (std::size_t t = 0; t < nt; ++t) {
                const TrialOutcome& o = outcomes[(l * ns + s) * nt + t];
                wall += o.wall_ms;
                if (o.failed) {
                    ++cs.failures;
                    continue;
                }
                snrs.push_back(o.snr);
                sum += o.snr;
                iters += o.iterations;
                cs.converged += o.converged ? 1 : 0;
            }
            cs.count = static_cast<int>(snrs.size());
            cs.mean_wall_ms = wall / static_cast<double>(nt);
            if (cs.count == 0) {
                cs.mean_snr = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            cs.mean_snr = sum / cs.count;
            cs.mean_iterations = iters / cs.count;
            if (cs.count > 1 && std::isfinite(cs.mean_snr)) {
                double ss = 0.0;
                for (double v : snrs) ss += (v - cs.mean_snr) * (v - cs.mean_snr);
                cs.std_snr = std::sqrt(ss / (cs.count - 1));
            }
        }
    }
    return result;
}

Format format_from_string(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw DimensionError("unknown format '" + s + "' (expected csv or json)");
}

std::string experiment_csv(const ExperimentResult& r) {
    std::ostringstream os;
    os << "lambda\\sigma";
    for (double s : r.spec.sigma_list) os << ',' << format_number(s);
    os << '\n';
    if (r.spec.sigma_list.empty()) return os.str();
    for (std::size_t l = 0; l < r.spec.lambda_list.size(); ++l) {
        os << format_number(r.spec.lambda_list[l]);
        for (std::size_t s = 0; s < r.spec.sigma_list.size(); ++s) os << ',' << fixed4(r.cell(s, l).mean_snr);
        os << '\n';
    }
    return os.str();
}

json to_json(const ExperimentResult& r, bool include_timing) {
    json cells = json::array();
    for (const auto& c : r.cells) {
        json jc{{"sigma", c.sigma},
                {"lambda", c.lambda},
                {"mean_snr", number_or_string(c.mean_snr)},
                {"std_snr", number_or_string(c.std_snr)},
                {"count", c.count},
                {"failures", c.failures},
                {"converged", c.converged},
                {"mean_iterations", c.mean_iterations}};
        if (include_timing) jc["mean_wall_ms"] = c.mean_wall_ms;
        cells.push_back(std::move(jc));
    }
    json seeds = json::array();
    for (std::size_t l = 0; l < r.spec.lambda_list.size(); ++l) {
        for (std::size_t s = 0; s < r.spec.sigma_list.size(); ++s) {
            seeds.push_back({{"sigma_index", s}, {"lambda_index", l}, {"trial0_seed", trial_seed(r.spec, s, l, 0)}});
        }
    }
    json j{{"library_version", kLibraryVersion},
           {"spec", to_json(r.spec)},
           {"r", r.r},
           {"m", r.m},
           {"seed_rule", r.spec.shared_instances ? "derive_seed(base_seed, {hash(case_name), 0, 0, trial})"
                                                 : "derive_seed(base_seed, {hash(case_name), sigma_index, lambda_index, trial})"},
           {"seeds", std::move(seeds)},
           {"cells", std::move(cells)}};
    if (include_timing) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j["timestamp"] = buf;
    }
    return j;
}

ExperimentResult experiment_result_from_json(const json& j) {
    try {
        ExperimentResult r;
        r.spec = experiment_spec_from_json(j.at("spec"));
        r.r = j.at("r").get<Index>();
        r.m = j.at("m").get<Index>();
        for (const auto& jc : j.at("cells")) {
            CellStats c;
            c.sigma = jc.at("sigma").get<double>();
            c.lambda = jc.at("lambda").get<double>();
            c.mean_snr = number_from(jc.at("mean_snr"));
            c.std_snr = number_from(jc.at("std_snr"));
            c.count = jc.at("count").get<int>();
            c.failures = jc.at("failures").get<int>();
            c.converged = jc.at("converged").get<int>();
            c.mean_iterations = jc.at("mean_iterations").get<double>();
            c.mean_wall_ms = jc.value("mean_wall_ms", 0.0);
            r.cells.push_back(c);
        }
        if (r.cells.size() != r.spec.sigma_list.size() * r.spec.lambda_list.size()) {
            throw DimensionError("result JSON: cell count does not match the grid");
        }
        return r;
    } catch (const json::exception& e) {
        throw DimensionError(std::string("result JSON: ") + e.what());
    }
}

std::vector<RipRow> run_rip_campaign(const LinearMap& map, const std::vector<Index>& ranks, int trials,
                                     std::uint64_t seed, double t) {
    const double thr = ric_threshold(t, map.dims().n3);
    std::vector<RipRow> rows;
    for (Index r : ranks) {
        RipRow row;
        row.estimate = estimate_ric(map, r, trials, seed);
        row.t = t;
        row.threshold = thr;
        row.satisfied = row.estimate.delta_hat < thr;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RipRow> run_rip_campaign(const MapSpec& map_spec, const std::vector<Index>& ranks, int trials,
                                     std::uint64_t seed, double t) {
    const LinearMap map = gaussian_map(map_spec.m, map_spec.dims, map_spec.seed, map_spec.variance_mode);
    return run_rip_campaign(map, ranks, trials, seed, t);
}

std::string rip_csv(const std::vector<RipRow>& rows) {
    std::ostringstream os;
    os << "r,trials,delta_hat,threshold,satisfied\n";
    for (const auto& row : rows) {
        os << row.estimate.r << ',' << row.estimate.trials << ',' << format_number(row.estimate.delta_hat) << ','
           << format_number(row.threshold) << ',' << (row.satisfied ? "true" : "false") << '\n';
    }
    return os.str();
}

json to_json(const std::vector<RipRow>& rows) {
    json out = json::array();
    for (const auto& row : rows) {
        json j = io::to_json(row.estimate);
        j["t"] = row.t;
        j["threshold"] = row.threshold;
        j["satisfied"] = row.satisfied;
        out.push_back(std::move(j));
    }
    return out;
}

} // namespace tubal
