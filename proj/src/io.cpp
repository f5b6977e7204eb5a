#include "tubal/io.hpp"

#include "tubal/errors.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tubal::io {

namespace {

using nlohmann::json;

constexpr std::array<char, 4> kMagic{'T', 'U', 'B', 'L'};
constexpr char kVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    if (!is) throw DimensionError("container truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
}

void write_block(std::ostream& os, Kind kind, std::uint64_t d0, std::uint64_t d1, std::uint64_t d2,
                 const double* data, std::size_t count) {
    os.write(kMagic.data(), 4);
    const std::array<char, 4> hdr{static_cast<char>(kind), kVersion, 0, 0};
    os.write(hdr.data(), 4);
    put_u64(os, d0);
    put_u64(os, d1);
    put_u64(os, d2);
    for (std::size_t i = 0; i < count; ++i) put_u64(os, std::bit_cast<std::uint64_t>(data[i]));
    if (!os) throw NumericalError("failed writing container");
}

struct Header {
    std::uint64_t d0, d1, d2;
};

Header read_header(std::istream& is, Kind expected) {
    std::array<char, 8> hdr{};
    is.read(hdr.data(), 8);
    if (!is || std::memcmp(hdr.data(), kMagic.data(), 4) != 0) throw DimensionError("not a TUBL container");
    if (hdr[4] != static_cast<char>(expected)) {
        throw DimensionError(std::string("container holds kind '") + hdr[4] + "', expected '" +
                             static_cast<char>(expected) + "'");
    }
    if (hdr[5] != kVersion) throw DimensionError("unsupported container version");
    Header h{get_u64(is), get_u64(is), get_u64(is)};
    constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
    if (h.d0 == 0 || h.d1 == 0 || h.d2 == 0 || h.d0 > kLimit || h.d1 > kLimit || h.d2 > kLimit ||
        h.d0 * h.d1 > kLimit || h.d0 * h.d1 * h.d2 > kLimit) {
        throw DimensionError("container dims out of range");
    }
    return h;
}

void read_doubles(std::istream& is, double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<double>(get_u64(is));
}

template <typename Fn>
void with_out(const std::filesystem::path& path, Fn fn) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DimensionError("cannot open " + path.string() + " for writing");
    fn(os);
}

template <typename Fn>
auto with_in(const std::filesystem::path& path, Fn fn) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DimensionError("cannot open " + path.string());
    return fn(is);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

void write_tensor(std::ostream& os, const Tensor3& x) {
    write_block(os, Kind::tensor, static_cast<std::uint64_t>(x.n1()), static_cast<std::uint64_t>(x.n2()),
                static_cast<std::uint64_t>(x.n3()), x.data().data(), x.data().size());
}

Tensor3 read_tensor(std::istream& is) {
    const Header h = read_header(is, Kind::tensor);
    std::vector<double> data(h.d0 * h.d1 * h.d2);
    read_doubles(is, data.data(), data.size());
    return Tensor3::from_data(
        Dims3{static_cast<Index>(h.d0), static_cast<Index>(h.d1), static_cast<Index>(h.d2)}, std::move(data));
}

void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
    if (v.size() == 0) throw DimensionError("cannot serialize an empty vector");
    write_block(os, Kind::vector, static_cast<std::uint64_t>(v.size()), 1, 1, v.data(),
                static_cast<std::size_t>(v.size()));
}

Eigen::VectorXd read_vector(std::istream& is) {
    const Header h = read_header(is, Kind::vector);
    if (h.d1 != 1 || h.d2 != 1) throw DimensionError("vector container must have dims (m, 1, 1)");
    Eigen::VectorXd v(static_cast<Index>(h.d0));
    read_doubles(is, v.data(), h.d0);
    return v;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    if (m.size() == 0) throw DimensionError("cannot serialize an empty matrix");
    write_block(os, Kind::matrix, static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols()), 1,
                m.data(), static_cast<std::size_t>(m.size()));
}

Eigen::MatrixXd read_matrix(std::istream& is) {
    const Header h = read_header(is, Kind::matrix);
    if (h.d2 != 1) throw DimensionError("matrix container must have dims (rows, cols, 1)");
    Eigen::MatrixXd m(static_cast<Index>(h.d0), static_cast<Index>(h.d1));
    read_doubles(is, m.data(), h.d0 * h.d1);
    return m;
}

void save_tensor(const std::filesystem::path& path, const Tensor3& x) {
    with_out(path, [&](std::ostream& os) { write_tensor(os, x); });
}
Tensor3 load_tensor(const std::filesystem::path& path) {
    return with_in(path, [](std::istream& is) { return read_tensor(is); });
}
void save_vector(const std::filesystem::path& path, const Eigen::VectorXd& v) {
    with_out(path, [&](std::ostream& os) { write_vector(os, v); });
}
Eigen::VectorXd load_vector(const std::filesystem::path& path) {
    return with_in(path, [](std::istream& is) { return read_vector(is); });
}
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    with_out(path, [&](std::ostream& os) { write_matrix(os, m); });
}
Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
    return with_in(path, [](std::istream& is) { return read_matrix(is); });
}

json map_metadata(const LinearMap& map) {
    json j;
    j["m"] = map.m();
    j["dims"] = {map.dims().n1, map.dims().n2, map.dims().n3};
    if (map.provenance()) {
        j["seed"] = map.provenance()->seed;
        j["variance_mode"] = to_string(map.provenance()->variance_mode);
    }
    return j;
}

void save_map(const std::filesystem::path& matrix_path, const LinearMap& map) {
    save_matrix(matrix_path, map.matrix());
}

LinearMap load_map(const std::filesystem::path& matrix_path, const json& metadata) {
    const auto dims = metadata.at("dims").get<std::vector<Index>>();
    if (dims.size() != 3) throw DimensionError("map metadata: dims must have three entries");
    std::optional<GaussianProvenance> prov;
    if (metadata.contains("seed")) {
        prov = GaussianProvenance{metadata.at("seed").get<std::uint64_t>(),
                                  variance_mode_from_string(metadata.value("variance_mode", "one_over_m"))};
    }
    return LinearMap(load_matrix(matrix_path), Dims3{dims[0], dims[1], dims[2]}, prov);
}

json tensor_to_json(const Tensor3& x) {
    return json{{"dims", {x.n1(), x.n2(), x.n3()}},
                {"data", std::vector<double>(x.data().begin(), x.data().end())}};
}

Tensor3 tensor_from_json(const json& j) {
    const auto dims = j.at("dims").get<std::vector<Index>>();
    if (dims.size() != 3) throw DimensionError("tensor JSON: dims must have three entries");
    return Tensor3::from_data(Dims3{dims[0], dims[1], dims[2]}, j.at("data").get<std::vector<double>>());
}

json to_json(const SolverConfig& c) {
    return json{{"lambda", c.lambda},     {"rho0", c.rho0},   {"rho_max", c.rho_max},
                {"vartheta", c.vartheta}, {"varpi", c.varpi}, {"max_iters", c.max_iters}};
}

SolverConfig solver_config_from_json(const json& j, double default_lambda) {
    SolverConfig c;
    c.lambda = default_lambda;
    c.lambda = j.value("lambda", c.lambda);
    c.rho0 = j.value("rho0", c.rho0);
    c.rho_max = j.value("rho_max", c.rho_max);
    c.vartheta = j.value("vartheta", c.vartheta);
    c.varpi = j.value("varpi", c.varpi);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.validate();
    return c;
}

json to_json(const SolveResult& r) {
    json res = json::array();
    for (const auto& g : r.residual_history) res.push_back({g[0], g[1], g[2]});
    return json{{"iterations", r.iterations},
                {"converged", r.converged},
                {"final_rho", r.final_state.rho},
                {"dims", {r.x_hat.n1(), r.x_hat.n2(), r.x_hat.n3()}},
                {"residual_history", std::move(res)},
                {"objective_history", r.objective_history}};
}

json to_json(const BoundConstants& c) { return json{{"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"c4", c.c4}}; }

json to_json(const BoundReport& r) {
    return json{{"t", r.t},
                {"r", r.r},
                {"n3", r.n3},
                {"delta", r.delta},
                {"eta1", r.eta1},
                {"eta2", r.eta2},
                {"theorem", to_json(r.theorem)},
                {"corollary", to_json(r.corollary)},
                {"lambda", r.lambda},
                {"epsilon", r.epsilon},
                {"tail_tnn", r.tail_tnn},
                {"lhs_meas", r.lhs_meas},
                {"rhs_meas", r.rhs_meas},
                {"lhs_fro", r.lhs_fro},
                {"rhs_fro", r.rhs_fro},
                {"satisfied", {r.meas_satisfied, r.fro_satisfied}}};
}

json to_json(const RipEstimate& e) {
    json samples = json::array();
    for (double s : e.distortion_samples) samples.push_back(finite_or_null(s));
    return json{{"r", e.r}, {"trials", e.trials}, {"delta_hat", e.delta_hat}, {"distortion_samples", samples}};
}

RipEstimate rip_estimate_from_json(const json& j) {
    RipEstimate e;
    e.r = j.at("r").get<Index>();
    e.trials = j.at("trials").get<int>();
    e.delta_hat = j.at("delta_hat").get<double>();
    e.distortion_samples = j.at("distortion_samples").get<std::vector<double>>();
    return e;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace tubal::io
