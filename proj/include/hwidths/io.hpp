#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwidths/system.hpp"

namespace hwidths {

using nlohmann::json;

/// 17 significant digits: enough to round-trip an IEEE double exactly.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i)
            row += ',';
        row += cells[i];
    }
    row += '\n';
    return row;
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ParseError(what + ": expected a nonempty array of rows");
    const size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty())
        throw ParseError(what + ": expected nonempty rows");
    const size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError(what + ": ragged rows");
        for (size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number())
                throw ParseError(what + ": entries must be numbers");
            m(i, k) = j[i][k].get<double>();
        }
    }
    return m;
}

inline json system_to_json(const LtiSystem& sys) {
    return json{{"A", matrix_to_json(sys.A)},
                {"B", matrix_to_json(sys.B)},
                {"C", matrix_to_json(sys.C)},
                {"D", matrix_to_json(sys.D)}};
}

/// {"A": [[..]], "B": [[..]], "C": [[..]], "D": [[..]]}; a missing D means
/// zero.
inline LtiSystem system_from_json(const json& j) {
    if (!j.is_object())
        throw ParseError("system: expected a JSON object");
    for (const char* key : {"A", "B", "C"})
        if (!j.contains(key))
            throw ParseError(std::string("system: missing field ") + key);
    const Matrix a = matrix_from_json(j.at("A"), "A");
    const Matrix b = matrix_from_json(j.at("B"), "B");
    const Matrix c = matrix_from_json(j.at("C"), "C");
    Matrix d;
    if (j.contains("D"))
        d = matrix_from_json(j.at("D"), "D");
    else
        d = Matrix::Zero(c.rows(), b.cols());
    try {
        return LtiSystem(a, b, c, d);
    } catch (const DimensionMismatch&) {
        throw;
    } catch (const BadParameter& err) {
        throw ParseError(std::string("system: ") + err.what());
    }
}

inline json parametric_to_json(const ParametricLtiSystem& psys) {
    json terms = json::array();
    for (const auto& t : psys.terms)
        terms.push_back(system_to_json(t));
    json params = json::array();
    for (const auto& r : psys.box)
        params.push_back(json{{"name", r.name}, {"min", r.min}, {"max", r.max}});
    return json{{"base", system_to_json(psys.base)},
                {"terms", std::move(terms)},
                {"parameters", std::move(params)}};
}

inline ParametricLtiSystem parametric_from_json(const json& j) {
    if (!j.is_object() || !j.contains("base") || !j.contains("terms") ||
        !j.contains("parameters"))
        throw ParseError("parametric system: need base, terms, parameters");
    const LtiSystem base = system_from_json(j.at("base"));
    std::vector<LtiSystem> terms;
    for (const auto& tj : j.at("terms")) {
        Matrix a = tj.contains("A") ? matrix_from_json(tj.at("A"), "term A")
                                    : Matrix(Matrix::Zero(base.A.rows(), base.A.cols()));
        Matrix b = tj.contains("B") ? matrix_from_json(tj.at("B"), "term B")
                                    : Matrix(Matrix::Zero(base.B.rows(), base.B.cols()));
        Matrix c = tj.contains("C") ? matrix_from_json(tj.at("C"), "term C")
                                    : Matrix(Matrix::Zero(base.C.rows(), base.C.cols()));
        Matrix d = tj.contains("D") ? matrix_from_json(tj.at("D"), "term D")
                                    : Matrix(Matrix::Zero(base.D.rows(), base.D.cols()));
        terms.emplace_back(a, b, c, d);
    }
    std::vector<ParameterRange> box;
    for (const auto& pj : j.at("parameters")) {
        if (!pj.contains("name") || !pj.contains("min") || !pj.contains("max"))
            throw ParseError("parametric system: parameter needs name, min, max");
        box.push_back({pj.at("name").get<std::string>(), pj.at("min").get<double>(),
                       pj.at("max").get<double>()});
    }
    try {
        return ParametricLtiSystem(base, std::move(terms), std::move(box));
    } catch (const Error&) {
        throw;
    }
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open file: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& err) {
        throw ParseError("malformed JSON in " + path + ": " + err.what());
    }
}

inline LtiSystem load_system(const std::string& path) {
    return system_from_json(load_json_file(path));
}

inline ParametricLtiSystem load_parametric(const std::string& path) {
    return parametric_from_json(load_json_file(path));
}

inline void save_json(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

} // namespace hwidths
