#pragma once

#include "tubal/analysis.hpp"
#include "tubal/measurement.hpp"
#include "tubal/solver.hpp"
#include "tubal/tensor.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tubal {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// One Table-1 style sweep: a grid of noise levels and regularization
/// parameters, `trials` independent instances per cell.
struct ExperimentSpec {
    std::string case_name = "case1";
    Index n = 10;
    Index n3 = 5;
    // Exactly one of these is set. A fraction of n is rounded to the nearest
    // integer, minimum 1.
    std::optional<Index> r_abs;
    std::optional<double> r_fraction = 0.1;
    double sample_factor = 2.0; // m = round(factor * r * (2n + 1) * n3)
    std::vector<double> sigma_list;
    std::vector<double> lambda_list;
    int trials = 50;
    std::uint64_t base_seed = 0;
    VarianceMode variance_mode = VarianceMode::one_over_m;
    SolverConfig solver; // lambda is overwritten per cell
    // When set, trial t uses the same map, ground truth and noise direction
    // in every cell (common random numbers); off by default.
    bool shared_instances = false;

    Index rank() const;
    Index samples() const;
    // Throws DimensionError on any out-of-range field.
    void validate() const;

    // The three geometries of the reference sweep with its sigma/lambda grid.
    static ExperimentSpec case1();
    static ExperimentSpec case2();
    static ExperimentSpec case3();
};

nlohmann::json to_json(const ExperimentSpec& s);
// Missing fields take the ExperimentSpec defaults. Throws DimensionError.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);

/// Tubal-rank-r tensor X1 * X2 with i.i.d. N(0,1) factors of sizes
/// n1 x r x n3 and r x n2 x n3, drawn from the data stream of `seed`.
Tensor3 generate_lowrank(Index n1, Index n2, Index n3, Index r, std::uint64_t seed);

// Seed of one trial: derive_seed(base, {hash(case), sigma index, lambda index,
// trial}), with both grid indices taken as 0 under shared_instances. Map,
// data and noise come from separate streams of this seed.
std::uint64_t trial_seed(const ExperimentSpec& spec, std::size_t sigma_idx, std::size_t lambda_idx, int trial);

struct TrialOutcome {
    double snr = 0.0;
    int iterations = 0;
    bool converged = false;
    bool failed = false;
    double wall_ms = 0.0;
};

// Generates and solves one instance of the sweep.
TrialOutcome run_trial(const ExperimentSpec& spec, std::size_t sigma_idx, std::size_t lambda_idx, int trial);

struct CellStats {
    double sigma = 0.0;
    double lambda = 0.0;
    double mean_snr = 0.0;
    double std_snr = 0.0; // sample standard deviation, 0 for fewer than two trials
    int count = 0;        // trials that produced an estimate
    int failures = 0;     // trials aborted by a numerical failure
    int converged = 0;
    double mean_iterations = 0.0;
    double mean_wall_ms = 0.0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    Index r = 0;
    Index m = 0;
    // Lambda-major: cells[l * sigma_list.size() + s].
    std::vector<CellStats> cells;

    const CellStats& cell(std::size_t sigma_idx, std::size_t lambda_idx) const;
};

/// Runs every (sigma, lambda, trial) with up to `workers` threads. Results are
/// reduced in index order, so the output does not depend on scheduling.
ExperimentResult run_experiment(const ExperimentSpec& spec, int workers = 1);

enum class Format { csv, json };
Format format_from_string(const std::string& s);

// Table layout: header "lambda\sigma,<sigmas>", one row per lambda, mean SNR
// to 4 decimals. Empty grids give the header only.
std::string experiment_csv(const ExperimentResult& r);
// Timing and timestamp are non-deterministic and only written on request.
nlohmann::json to_json(const ExperimentResult& r, bool include_timing = false);
ExperimentResult experiment_result_from_json(const nlohmann::json& j);

struct MapSpec {
    Dims3 dims{10, 10, 5};
    Index m = 210;
    std::uint64_t seed = 0;
    VarianceMode variance_mode = VarianceMode::one_over_m;
};

struct RipRow {
    RipEstimate estimate;
    double t = 0.0;
    double threshold = 0.0;
    bool satisfied = false; // delta_hat < threshold
};

std::vector<RipRow> run_rip_campaign(const LinearMap& map, const std::vector<Index>& ranks, int trials,
                                     std::uint64_t seed, double t);
std::vector<RipRow> run_rip_campaign(const MapSpec& map_spec, const std::vector<Index>& ranks, int trials,
                                     std::uint64_t seed, double t);

std::string rip_csv(const std::vector<RipRow>& rows);
nlohmann::json to_json(const std::vector<RipRow>& rows);

// Shortest round-trip fixed-point form, used for grid labels.
std::string format_number(double v);

} // namespace tubal
