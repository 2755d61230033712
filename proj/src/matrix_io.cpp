#include "corrstress/matrix_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace corrstress {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Matrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("entries")) {
        throw ParseError(where + ": expected an object with an 'entries' array");
    }
    const auto& rows = j.at("entries");
    if (!rows.is_array() || rows.empty()) {
        throw ParseError(where + ": 'entries' must be a non-empty array of rows");
    }
    const int n_rows = static_cast<int>(rows.size());
    int n = n_rows;
    if (j.contains("n")) {
        n = j.at("n").get<int>();
        if (n != n_rows) {
            throw ParseError(where + ": 'n' is " + std::to_string(n) + " but there are " +
                             std::to_string(n_rows) + " rows");
        }
    }
    double scale = 1.0;
    if (j.contains("scale")) scale = j.at("scale").get<double>();
    Matrix m(n_rows, n_rows);
    for (int i = 0; i < n_rows; ++i) {
        const auto& row = rows.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != n_rows) {
            throw ParseError(where + ": row " + std::to_string(i) + " has " +
                             std::to_string(row.size()) + " entries, expected " +
                             std::to_string(n_rows));
        }
        for (int k = 0; k < n_rows; ++k) m(i, k) = row.at(k).get<double>() * scale;
    }
    return m;
}

Matrix matrix_from_csv(const std::string& text, const std::string& where) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError(where + ": bad number '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(where + ": no rows");
    const size_t n = rows.size();
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw ParseError(where + ": row " + std::to_string(i) + " has " +
                             std::to_string(rows[i].size()) + " entries, expected " +
                             std::to_string(n));
        }
        for (size_t k = 0; k < n; ++k) m(i, k) = rows[i][k];
    }
    return m;
}

std::string format_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

bool looks_like_csv(const std::string& path) {
    if (path.size() >= 4) {
        std::string ext = path.substr(path.size() - 4);
        for (auto& c : ext) c = static_cast<char>(std::tolower(c));
        if (ext == ".csv") return true;
        if (path.size() >= 5) {
            std::string ext5 = path.substr(path.size() - 5);
            for (auto& c : ext5) c = static_cast<char>(std::tolower(c));
            if (ext5 == ".json") return false;
        }
    }
    std::ifstream in(path);
    char first = 0;
    while (in.get(first) && std::isspace(static_cast<unsigned char>(first))) {
    }
    return first != '{';
}

Matrix parse_matrix_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    try {
        return matrix_from_json(j, "matrix");
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad matrix JSON: ") + e.what());
    }
}

Matrix load_matrix_file(const std::string& path) {
    const std::string text = read_file(path);
    if (looks_like_csv(path)) return matrix_from_csv(text, path);
    try {
        json j = json::parse(text);
        return matrix_from_json(j, path);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string format_matrix_json(const Matrix& m, double display_scale) {
    std::ostringstream out;
    out << "{\n  \"n\": " << m.rows() << ",\n  \"entries\": [\n";
    for (int i = 0; i < m.rows(); ++i) {
        out << "    [";
        for (int k = 0; k < m.cols(); ++k) {
            out << format_num(m(i, k) / display_scale);
            if (k + 1 < m.cols()) out << ", ";
        }
        out << (i + 1 < m.rows() ? "],\n" : "]\n");
    }
    if (display_scale != 1.0) {
        out << "  ],\n  \"scale\": " << format_num(display_scale) << "\n}\n";
    } else {
        out << "  ]\n}\n";
    }
    return out.str();
}

std::string format_matrix_csv(const Matrix& m, double display_scale) {
    std::ostringstream out;
    for (int i = 0; i < m.rows(); ++i) {
        for (int k = 0; k < m.cols(); ++k) {
            out << format_num(m(i, k) / display_scale);
            if (k + 1 < m.cols()) out << ",";
        }
        out << "\n";
    }
    return out.str();
}

void save_matrix_json(const std::string& path, const Matrix& m, double display_scale) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << format_matrix_json(m, display_scale);
}

void save_matrix_csv(const std::string& path, const Matrix& m, double display_scale) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << format_matrix_csv(m, display_scale);
}

Vector load_vector_file(const std::string& path) {
    const std::string text = read_file(path);
    std::string_view sv(text);
    size_t pos = sv.find_first_not_of(" \t\r\n");
    if (pos != std::string::npos && sv[pos] == '{') {
        try {
            json j = json::parse(text);
            const auto& vals = j.at("values");
            Vector v(vals.size());
            for (size_t k = 0; k < vals.size(); ++k) v(k) = vals.at(k).get<double>();
            return v;
        } catch (const json::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
    }
    std::vector<double> vals;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError(path + ": bad number '" + cell + "'");
            }
        }
    }
    if (vals.empty()) throw ParseError(path + ": no values");
    Vector v(vals.size());
    for (size_t k = 0; k < vals.size(); ++k) v(k) = vals[k];
    return v;
}

}  // namespace corrstress
