#pragma once

#include "tubal/analysis.hpp"
#include "tubal/measurement.hpp"
#include "tubal/solver.hpp"
#include "tubal/tensor.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace tubal::io {

// Binary container layout (all integers and doubles little-endian):
//
//   bytes 0..3   "TUBL"
//   byte  4      kind: 'T' tensor, 'V' vector, 'M' matrix
//   byte  5      format version (1)
//   bytes 6..7   zero
//   bytes 8..31  dims as three uint64: tensor (n1, n2, n3), vector (m, 1, 1),
//                matrix (rows, cols, 1)
//   bytes 32..   IEEE-754 doubles; tensors in storage order, matrices
//                column-major
enum class Kind : char { tensor = 'T', vector = 'V', matrix = 'M' };

void write_tensor(std::ostream& os, const Tensor3& x);
Tensor3 read_tensor(std::istream& is);
void write_vector(std::ostream& os, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(std::istream& is);
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& is);

void save_tensor(const std::filesystem::path& path, const Tensor3& x);
Tensor3 load_tensor(const std::filesystem::path& path);
void save_vector(const std::filesystem::path& path, const Eigen::VectorXd& v);
Eigen::VectorXd load_vector(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);

// A map is stored as its matrix plus a JSON sidecar with dims and provenance.
nlohmann::json map_metadata(const LinearMap& map);
void save_map(const std::filesystem::path& matrix_path, const LinearMap& map);
LinearMap load_map(const std::filesystem::path& matrix_path, const nlohmann::json& metadata);

// Small-tensor debug form: {"dims": [n1, n2, n3], "data": [...]}.
nlohmann::json tensor_to_json(const Tensor3& x);
Tensor3 tensor_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SolverConfig& c);
SolverConfig solver_config_from_json(const nlohmann::json& j, double default_lambda = 0.1);

// Scalars and histories only; x_hat goes to the binary container.
nlohmann::json to_json(const SolveResult& r);

nlohmann::json to_json(const BoundConstants& c);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const RipEstimate& e);
RipEstimate rip_estimate_from_json(const nlohmann::json& j);

// Full-precision JSON dump (17 significant digits for doubles).
std::string dump(const nlohmann::json& j);

} // namespace tubal::io
