#include "corrstress.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 ok, 2 parse or shape, 3 domain (not SPD, dimension mismatch),
// 4 bad generator or rotation, 5 trace or determinant violation, 6 infeasible,
// 7 optimizer not converged.
int exit_code(cst_status s) {
    switch (s) {
        case CST_OK:
            return 0;
        case CST_ERR_PARSE:
        case CST_ERR_NOT_SQUARE:
        case CST_ERR_NOT_SYMMETRIC:
        case CST_ERR_BAD_SPEC:
        case CST_ERR_INVALID_ARG:
            return 2;
        case CST_ERR_BAD_INDICES:
        case CST_ERR_BAD_GENERATOR:
        case CST_ERR_NOT_ANTISYMMETRIC:
            return 4;
        case CST_ERR_NOT_TRACELESS:
        case CST_ERR_DET_MISMATCH:
            return 5;
        case CST_ERR_INFEASIBLE:
            return 6;
        case CST_ERR_NOT_CONVERGED:
            return 7;
        default:
            return 3;
    }
}

[[noreturn]] void bail(cst_status s) {
    std::cerr << "error: " << cst_last_error() << "\n";
    std::exit(exit_code(s));
}

[[noreturn]] void bail_msg(int code, const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    std::exit(code);
}

void check(cst_status s) {
    if (s != CST_OK) bail(s);
}

struct MatrixFree {
    void operator()(cst_matrix* p) const { cst_matrix_free(p); }
};
struct DirectionFree {
    void operator()(cst_direction* p) const { cst_direction_free(p); }
};
struct CompletionFree {
    void operator()(cst_completion* p) const { cst_completion_free(p); }
};
using MatrixPtr = std::unique_ptr<cst_matrix, MatrixFree>;
using DirectionPtr = std::unique_ptr<cst_direction, DirectionFree>;
using CompletionPtr = std::unique_ptr<cst_completion, CompletionFree>;

struct Common {
    bool json_out = false;
    double scale = 1.0;
    double tol = 0.0;  // 0 means library default
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_flag("--json", c.json_out, "machine-readable JSON output");
    cmd->add_option("--scale", c.scale,
                    "display scale; matrix entries are divided by it on output")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", c.tol, "relative eigenvalue tolerance for the SPD check")
        ->check(CLI::PositiveNumber);
}

MatrixPtr load_spd(const std::string& path, const Common& c) {
    cst_matrix* raw = nullptr;
    check(cst_matrix_load(path.c_str(), c.tol, &raw));
    return MatrixPtr(raw);
}

std::vector<double> matrix_entries(const cst_matrix* m) {
    const size_t n = static_cast<size_t>(cst_matrix_dim(m));
    std::vector<double> e(n * n);
    check(cst_matrix_entries(m, e.data()));
    return e;
}

std::vector<double> direction_entries(const cst_direction* d) {
    const size_t n = static_cast<size_t>(cst_direction_dim(d));
    std::vector<double> e(n * n);
    check(cst_direction_entries(d, e.data()));
    return e;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

void print_matrix(const std::vector<double>& e, int n, double scale) {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " %12s", fmt(e[i * n + j] / scale).c_str());
            std::cout << buf;
        }
        std::cout << "\n";
    }
}

json matrix_json(const std::vector<double>& e, int n, double scale) {
    json rows = json::array();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int j = 0; j < n; ++j) row.push_back(e[i * n + j] / scale);
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const std::vector<double>& v, double scale) {
    json a = json::array();
    for (double x : v) a.push_back(x / scale);
    return a;
}

bool csv_like(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bail_msg(2, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Plain square matrix loader for inputs that are not SPD (rotation generators).
// Mirrors the library file format: JSON {"n","entries",["scale"]} or headerless CSV.
struct RawMatrix {
    int n = 0;
    std::vector<double> entries;  // row-major, scale already applied
};

RawMatrix raw_from_csv(const std::string& text, const std::string& path) {
    RawMatrix out;
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                bail_msg(2, path + ": bad number '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) bail_msg(2, path + ": empty matrix");
    out.n = static_cast<int>(rows.size());
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != out.n) bail_msg(2, path + ": matrix is not square");
        out.entries.insert(out.entries.end(), r.begin(), r.end());
    }
    return out;
}

RawMatrix load_raw_matrix(const std::string& path) {
    const std::string text = read_file(path);
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (!csv_like(path) && first != std::string::npos && text[first] == '{') {
        try {
            json j = json::parse(text);
            RawMatrix out;
            out.n = j.at("n").get<int>();
            const double scale = j.value("scale", 1.0);
            if (out.n <= 0) bail_msg(2, path + ": bad dimension");
            const auto& rows = j.at("entries");
            if (static_cast<int>(rows.size()) != out.n) bail_msg(2, path + ": bad row count");
            for (const auto& row : rows) {
                if (static_cast<int>(row.size()) != out.n)
                    bail_msg(2, path + ": bad column count");
                for (const auto& v : row) out.entries.push_back(v.get<double>() * scale);
            }
            return out;
        } catch (const json::exception& e) {
            bail_msg(2, path + ": " + e.what());
        }
    }
    return raw_from_csv(text, path);
}

std::vector<double> load_vector(const std::string& path) {
    const std::string text = read_file(path);
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            json j = json::parse(text);
            std::vector<double> v;
            for (const auto& x : j.at("values")) v.push_back(x.get<double>());
            if (v.empty()) bail_msg(2, path + ": empty vector");
            return v;
        } catch (const json::exception& e) {
            bail_msg(2, path + ": " + e.what());
        }
    }
    std::vector<double> v;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok)) {
        std::istringstream ls(tok);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            if (cell.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                bail_msg(2, path + ": bad number '" + cell + "'");
            }
        }
    }
    if (v.empty()) bail_msg(2, path + ": empty vector");
    return v;
}

DirectionPtr make_direction(const std::string& spec, int n, bool allow_covariance) {
    cst_direction* raw = nullptr;
    if (spec.rfind("file:", 0) == 0) {
        // resolved here so --allow-covariance can lift the traceless requirement
        check(cst_direction_load(spec.substr(5).c_str(), allow_covariance ? 1 : 0, &raw));
    } else {
        check(cst_direction_generator(spec.c_str(), n, &raw));
    }
    return DirectionPtr(raw);
}

void write_direction_file(const std::string& path, const cst_direction* x) {
    const int n = cst_direction_dim(x);
    json out{{"n", n}, {"entries", matrix_json(direction_entries(x), n, 1.0)}};
    std::ofstream f(path, std::ios::binary);
    if (!f) bail_msg(2, "cannot write " + path);
    f << out.dump(2) << "\n";
}

int run_validate(const std::string& file, const Common& c) {
    MatrixPtr m = load_spd(file, c);
    const int n = cst_matrix_dim(m.get());
    std::vector<double> eigs(n), vols(n), corr(static_cast<size_t>(n) * n);
    check(cst_matrix_eigenvalues(m.get(), eigs.data()));
    check(cst_matrix_cov_to_corr(m.get(), corr.data(), vols.data()));
    double det = 0.0;
    check(cst_matrix_det(m.get(), &det));
    const double det_scaled = det / std::pow(c.scale, n);
    const double vol_scale = std::sqrt(c.scale);

    if (c.json_out) {
        json out{{"n", n},
                 {"scale", c.scale},
                 {"spd", true},
                 {"det", det_scaled},
                 {"eigenvalues", vector_json(eigs, c.scale)},
                 {"volatilities", vector_json(vols, vol_scale)},
                 {"correlation", matrix_json(corr, n, 1.0)},
                 {"entries", matrix_json(matrix_entries(m.get()), n, c.scale)}};
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "dimension: " << n << "\n";
        if (c.scale != 1.0) std::cout << "display scale: " << fmt(c.scale) << "\n";
        std::cout << "eigenvalues:";
        for (double v : eigs) std::cout << " " << fmt(v / c.scale);
        std::cout << "\ndeterminant: " << fmt(det_scaled) << "\n";
        std::cout << "volatilities:";
        for (double v : vols) std::cout << " " << fmt(v / vol_scale);
        std::cout << "\ncorrelation matrix:\n";
        print_matrix(corr, n, 1.0);
        std::cout << "positive definite: yes\n";
    }
    return 0;
}

int run_distance(const std::string& f1, const std::string& f2, const Common& c) {
    MatrixPtr a = load_spd(f1, c);
    MatrixPtr b = load_spd(f2, c);
    double d = 0.0;
    check(cst_rao_distance(a.get(), b.get(), &d));
    cst_direction* xr = nullptr;
    check(cst_log_map(a.get(), b.get(), 1, &xr));
    DirectionPtr x(xr);
    const int n = cst_direction_dim(x.get());
    std::vector<double> logeig(n);
    check(cst_direction_eigenvalues(x.get(), logeig.data()));
    std::vector<double> contrib(n);
    for (int k = 0; k < n; ++k) contrib[k] = 0.5 * logeig[k] * logeig[k];

    if (c.json_out) {
        json out{{"distance", d},
                 {"distance_squared", d * d},
                 {"plausibility", std::exp(-d)},
                 {"log_eigenvalues", vector_json(logeig, 1.0)},
                 {"contributions", vector_json(contrib, 1.0)}};
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "distance: " << fmt(d) << "\n";
        std::cout << "squared distance: " << fmt(d * d) << "\n";
        std::cout << "plausibility: " << fmt(std::exp(-d)) << "\n";
        std::cout << "log eigenvalues:";
        for (double v : logeig) std::cout << " " << fmt(v);
        std::cout << "\ncontributions to squared distance:";
        for (double v : contrib) std::cout << " " << fmt(v);
        std::cout << "\n";
    }
    return 0;
}

int run_logmap(const std::string& f1, const std::string& f2, bool allow_covariance,
               const std::string& output, const Common& c) {
    MatrixPtr a = load_spd(f1, c);
    MatrixPtr b = load_spd(f2, c);
    cst_direction* xr = nullptr;
    check(cst_log_map(a.get(), b.get(), allow_covariance ? 1 : 0, &xr));
    DirectionPtr x(xr);
    const int n = cst_direction_dim(x.get());
    std::vector<double> eigs(n);
    check(cst_direction_eigenvalues(x.get(), eigs.data()));
    double trace = 0.0, d = 0.0, p = 0.0;
    check(cst_direction_trace(x.get(), &trace));
    check(cst_stress_distance(x.get(), 1.0, &d));
    check(cst_plausibility(x.get(), 1.0, &p));
    double sumsq = 0.0;
    for (double v : eigs) sumsq += v * v;

    if (!output.empty()) write_direction_file(output, x.get());
    if (c.json_out) {
        json out{{"n", n},
                 {"entries", matrix_json(direction_entries(x.get()), n, 1.0)},
                 {"trace", trace},
                 {"eigenvalues", vector_json(eigs, 1.0)},
                 {"sum_squared_eigenvalues", sumsq},
                 {"distance", d},
                 {"plausibility", p}};
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "direction (" << n << "x" << n << "):\n";
        print_matrix(direction_entries(x.get()), n, 1.0);
        std::cout << "trace: " << fmt(trace) << "\n";
        std::cout << "eigenvalues:";
        for (double v : eigs) std::cout << " " << fmt(v);
        std::cout << "\nsum of squared eigenvalues: " << fmt(sumsq) << "\n";
        std::cout << "distance at t=1: " << fmt(d) << "\n";
        std::cout << "plausibility at t=1: " << fmt(p) << "\n";
    }
    return 0;
}

int run_stress(const std::string& file, const std::string& gen, double t,
               bool allow_covariance, const std::string& output, const Common& c) {
    MatrixPtr base = load_spd(file, c);
    const int n = cst_matrix_dim(base.get());
    DirectionPtr x = make_direction(gen, n, allow_covariance);
    cst_matrix* sr = nullptr;
    check(cst_exp_map(base.get(), x.get(), t, &sr));
    MatrixPtr stressed(sr);
    double d = 0.0, p = 0.0;
    check(cst_stress_distance(x.get(), t, &d));
    check(cst_plausibility(x.get(), t, &p));

    if (!output.empty()) {
        const bool as_csv = csv_like(output) || (!output.empty() && csv_like(file) &&
                                                 output.find(".json") == std::string::npos);
        check(cst_matrix_save(stressed.get(), output.c_str(), c.scale, as_csv ? 1 : 0));
    }
    if (c.json_out) {
        json out{{"n", n},
                 {"scale", c.scale},
                 {"t", t},
                 {"entries", matrix_json(matrix_entries(stressed.get()), n, c.scale)},
                 {"distance", d},
                 {"plausibility", p}};
        if (!output.empty()) out["written"] = output;
        std::cout << out.dump() << "\n";
    } else {
        if (output.empty()) {
            std::cout << "stressed matrix";
            if (c.scale != 1.0) std::cout << " (display scale " << fmt(c.scale) << ")";
            std::cout << ":\n";
            print_matrix(matrix_entries(stressed.get()), n, c.scale);
        } else {
            std::cout << "wrote " << output << "\n";
        }
        std::cout << "distance: " << fmt(d) << "\n";
        std::cout << "plausibility: " << fmt(p) << "\n";
    }
    return 0;
}

int run_sweep(const std::string& file, const std::string& gen, double t_max, int steps,
              bool allow_covariance, const Common& c) {
    if (t_max < 0.0) bail_msg(2, "--t-max must be nonnegative");
    if (t_max > 0.0 && steps < 2) bail_msg(2, "--steps must be at least 2");
    MatrixPtr base = load_spd(file, c);
    const int n = cst_matrix_dim(base.get());
    DirectionPtr x = make_direction(gen, n, allow_covariance);

    const int eff_steps = t_max == 0.0 ? 0 : steps;
    const int rows = eff_steps + 1;
    const int stride = n + 4;
    std::vector<double> buf(static_cast<size_t>(rows) * stride);
    check(cst_path_samples(base.get(), x.get(), t_max, eff_steps, buf.data()));

    const double det_scale = std::pow(c.scale, n);
    if (c.json_out) {
        json out = json::array();
        for (int r = 0; r < rows; ++r) {
            const double* row = buf.data() + static_cast<size_t>(r) * stride;
            json eigs = json::array();
            for (int k = 0; k < n; ++k) eigs.push_back(row[3 + k] / c.scale);
            out.push_back(json{{"t", row[0]},
                               {"distance", row[1]},
                               {"plausibility", row[2]},
                               {"eigenvalues", eigs},
                               {"det", row[3 + n] / det_scale}});
        }
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "t,distance,plausibility";
        for (int k = 1; k <= n; ++k) std::cout << ",eig" << k;
        std::cout << ",det\n";
        for (int r = 0; r < rows; ++r) {
            const double* row = buf.data() + static_cast<size_t>(r) * stride;
            std::cout << csv_num(row[0]) << "," << csv_num(row[1]) << ","
                      << csv_num(row[2]);
            for (int k = 0; k < n; ++k) std::cout << "," << csv_num(row[3 + k] / c.scale);
            std::cout << "," << csv_num(row[3 + n] / det_scale) << "\n";
        }
    }
    return 0;
}

int run_complete(const std::string& spec_path, const std::string& output, const Common& c) {
    const std::string text = read_file(spec_path);
    const std::string dir = std::filesystem::path(spec_path).parent_path().string();
    cst_completion* cr = nullptr;
    const cst_status st = cst_complete(text.c_str(), dir.empty() ? nullptr : dir.c_str(), &cr);
    if (st != CST_OK && st != CST_ERR_NOT_CONVERGED) bail(st);
    CompletionPtr result(cr);
    if (st == CST_ERR_NOT_CONVERGED) {
        std::cerr << "warning: " << cst_last_error() << "\n";
    }
    if (cst_completion_multiple_minima(result.get())) {
        std::cerr << "warning: restarts disagree; several local optima are about equally "
                     "plausible, reporting the best found\n";
    }

    cst_matrix* tr = nullptr;
    check(cst_completion_target(result.get(), &tr));
    MatrixPtr target(tr);
    cst_direction* xr = nullptr;
    check(cst_completion_direction(result.get(), &xr));
    DirectionPtr x(xr);
    double d = 0.0, p = 0.0;
    check(cst_completion_distance(result.get(), &d));
    check(cst_completion_plausibility(result.get(), &p));
    const int n = cst_matrix_dim(target.get());
    std::vector<double> eigs(n);
    check(cst_direction_eigenvalues(x.get(), eigs.data()));
    double sumsq = 0.0;
    for (double v : eigs) sumsq += v * v;

    if (!output.empty()) {
        check(cst_matrix_save(target.get(), output.c_str(), c.scale, csv_like(output) ? 1 : 0));
    }
    if (c.json_out) {
        json out{{"n", n},
                 {"scale", c.scale},
                 {"target", matrix_json(matrix_entries(target.get()), n, c.scale)},
                 {"direction", matrix_json(direction_entries(x.get()), n, 1.0)},
                 {"distance", d},
                 {"distance_squared", d * d},
                 {"sum_squared_eigenvalues", sumsq},
                 {"plausibility", p},
                 {"iterations", cst_completion_iterations(result.get())},
                 {"converged", cst_completion_converged(result.get()) != 0},
                 {"multiple_minima", cst_completion_multiple_minima(result.get()) != 0}};
        if (!output.empty()) out["written"] = output;
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "completed matrix";
        if (c.scale != 1.0) std::cout << " (display scale " << fmt(c.scale) << ")";
        std::cout << ":\n";
        print_matrix(matrix_entries(target.get()), n, c.scale);
        std::cout << "recovered direction:\n";
        print_matrix(direction_entries(x.get()), n, 1.0);
        std::cout << "distance: " << fmt(d) << "\n";
        std::cout << "squared distance: " << fmt(d * d) << "\n";
        std::cout << "sum of squared eigenvalues: " << fmt(sumsq) << "\n";
        std::cout << "plausibility: " << fmt(p) << "\n";
        std::cout << "iterations: " << cst_completion_iterations(result.get()) << "\n";
        std::cout << "converged: " << (cst_completion_converged(result.get()) ? "yes" : "no")
                  << "\n";
    }
    return st == CST_ERR_NOT_CONVERGED ? 7 : 0;
}

int run_mahalanobis(const std::string& sigma_file, const std::string& vec_file,
                    const Common& c) {
    MatrixPtr m = load_spd(sigma_file, c);
    std::vector<double> x = load_vector(vec_file);
    if (static_cast<int>(x.size()) != cst_matrix_dim(m.get())) {
        bail_msg(3, "vector length " + std::to_string(x.size()) +
                        " does not match matrix dimension " +
                        std::to_string(cst_matrix_dim(m.get())));
    }
    double d = 0.0;
    check(cst_mahalanobis(m.get(), x.data(), &d));
    if (c.json_out) {
        json out{{"distance", d}, {"distance_squared", d * d}};
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "mahalanobis distance: " << fmt(d) << "\n";
        std::cout << "squared: " << fmt(d * d) << "\n";
    }
    return 0;
}

int run_isospectral(const std::string& file, const std::string& rotation_file, double t,
                    int steps, const Common& c) {
    MatrixPtr base = load_spd(file, c);
    const int n = cst_matrix_dim(base.get());
    RawMatrix rot = load_raw_matrix(rotation_file);
    if (rot.n != n) {
        bail_msg(3, "rotation generator is " + std::to_string(rot.n) + "x" +
                        std::to_string(rot.n) + " but the matrix is " + std::to_string(n) +
                        "x" + std::to_string(n));
    }
    cst_matrix* er = nullptr;
    check(cst_isospectral_point(base.get(), rot.entries.data(), t, &er));
    MatrixPtr endpoint(er);
    double length = 0.0;
    if (t != 0.0) {
        check(cst_isospectral_length(base.get(), rot.entries.data(), 0.0, t, steps, &length));
    }
    double geo = 0.0;
    check(cst_rao_distance(base.get(), endpoint.get(), &geo));
    std::vector<double> eigs(n);
    check(cst_matrix_eigenvalues(endpoint.get(), eigs.data()));

    if (c.json_out) {
        json out{{"n", n},
                 {"scale", c.scale},
                 {"t", t},
                 {"entries", matrix_json(matrix_entries(endpoint.get()), n, c.scale)},
                 {"eigenvalues", vector_json(eigs, c.scale)},
                 {"path_length", length},
                 {"geodesic_distance", geo},
                 {"excess", length - geo}};
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "rotated matrix at t=" << fmt(t);
        if (c.scale != 1.0) std::cout << " (display scale " << fmt(c.scale) << ")";
        std::cout << ":\n";
        print_matrix(matrix_entries(endpoint.get()), n, c.scale);
        std::cout << "eigenvalues (unchanged):";
        for (double v : eigs) std::cout << " " << fmt(v / c.scale);
        std::cout << "\npath length on [0," << fmt(t) << "]: " << fmt(length) << "\n";
        std::cout << "geodesic distance to endpoint: " << fmt(geo) << "\n";
        std::cout << "excess over geodesic: " << fmt(length - geo) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlation stress tests as constant-determinant geodesics"};
    app.require_subcommand(1);
    int rc = 0;

    Common c_validate;
    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "check a covariance matrix file");
    validate->add_option("file", validate_file, "matrix file (JSON or CSV)")->required();
    add_common(validate, c_validate);
    validate->callback([&] { rc = run_validate(validate_file, c_validate); });

    Common c_distance;
    std::string dist_a, dist_b;
    auto* distance = app.add_subcommand("distance", "distance between two covariance matrices");
    distance->add_option("first", dist_a, "matrix file")->required();
    distance->add_option("second", dist_b, "matrix file")->required();
    add_common(distance, c_distance);
    distance->callback([&] { rc = run_distance(dist_a, dist_b, c_distance); });

    Common c_logmap;
    std::string logmap_a, logmap_b, logmap_out;
    bool logmap_allow = false;
    auto* logmap = app.add_subcommand(
        "logmap", "direction generating the geodesic between two matrices");
    logmap->add_option("first", logmap_a, "matrix file")->required();
    logmap->add_option("second", logmap_b, "matrix file")->required();
    logmap->add_flag("--allow-covariance", logmap_allow,
                     "accept endpoints whose determinants differ");
    logmap->add_option("-o,--output", logmap_out, "write the direction to this JSON file");
    add_common(logmap, c_logmap);
    logmap->callback(
        [&] { rc = run_logmap(logmap_a, logmap_b, logmap_allow, logmap_out, c_logmap); });

    Common c_stress;
    std::string stress_file, stress_gen, stress_out;
    double stress_t = 1.0;
    bool stress_allow = false;
    auto* stress = app.add_subcommand("stress", "apply a stress to a covariance matrix");
    stress->add_option("file", stress_file, "matrix file")->required();
    stress->add_option("-g,--generator", stress_gen,
                       "pair:i,j | diag:i,j | row:i | all | file:X.json")
        ->required();
    stress->add_option("--t", stress_t, "stress size along the path (default 1)");
    stress->add_flag("--allow-covariance", stress_allow,
                     "accept directions with nonzero trace");
    stress->add_option("-o,--output", stress_out, "write the stressed matrix here");
    add_common(stress, c_stress);
    stress->callback([&] {
        rc = run_stress(stress_file, stress_gen, stress_t, stress_allow, stress_out,
                        c_stress);
    });

    Common c_sweep;
    std::string sweep_file, sweep_gen;
    double sweep_tmax = 10.0;
    int sweep_steps = 100;
    bool sweep_allow = false;
    auto* sweep = app.add_subcommand("sweep", "CSV of path statistics for t in [0, t-max]");
    sweep->add_option("file", sweep_file, "matrix file")->required();
    sweep->add_option("-g,--generator", sweep_gen,
                      "pair:i,j | diag:i,j | row:i | all | file:X.json")
        ->required();
    sweep->add_option("--t-max", sweep_tmax, "endpoint of the sweep (default 10)");
    sweep->add_option("--steps", sweep_steps, "number of steps (default 100)");
    sweep->add_flag("--allow-covariance", sweep_allow,
                    "accept directions with nonzero trace");
    add_common(sweep, c_sweep);
    sweep->callback([&] {
        rc = run_sweep(sweep_file, sweep_gen, sweep_tmax, sweep_steps, sweep_allow, c_sweep);
    });

    Common c_complete;
    std::string complete_spec, complete_out;
    auto* complete = app.add_subcommand(
        "complete", "most plausible completion of a partially pinned stress target");
    complete->add_option("spec", complete_spec, "completion spec JSON file")->required();
    complete->add_option("-o,--output", complete_out, "write the completed matrix here");
    add_common(complete, c_complete);
    complete->callback([&] { rc = run_complete(complete_spec, complete_out, c_complete); });

    Common c_mahal;
    std::string mahal_sigma, mahal_vec;
    auto* mahal = app.add_subcommand("mahalanobis", "Mahalanobis size of a return move");
    mahal->add_option("sigma", mahal_sigma, "covariance matrix file")->required();
    mahal->add_option("vector", mahal_vec, "move vector file")->required();
    add_common(mahal, c_mahal);
    mahal->callback([&] { rc = run_mahalanobis(mahal_sigma, mahal_vec, c_mahal); });

    Common c_iso;
    std::string iso_file, iso_rot;
    double iso_t = 1.0;
    int iso_steps = 400;
    auto* iso = app.add_subcommand(
        "isospectral", "eigenvalue-preserving rotation path, with its Rao length");
    iso->add_option("file", iso_file, "matrix file")->required();
    iso->add_option("-r,--rotation", iso_rot, "antisymmetric generator file")->required();
    iso->add_option("--t", iso_t, "rotation parameter (default 1)");
    iso->add_option("--steps", iso_steps, "quadrature steps for the length (default 400)")
        ->check(CLI::Range(2, 1000000));
    add_common(iso, c_iso);
    iso->callback([&] { rc = run_isospectral(iso_file, iso_rot, iso_t, iso_steps, c_iso); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return rc;
}
