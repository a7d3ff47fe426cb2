#pragma once

#include <Eigen/Dense>

#include "hwidths/errors.hpp"

namespace hwidths {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Public constructors admit no NaN/Inf; call at every entry point that
/// accepts user data.
inline void check_finite(const Matrix& m, const char* what) {
    if (!m.allFinite())
        throw BadParameter(std::string(what) + ": non-finite entries");
}

inline void check_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw DimensionMismatch(std::string(what) + ": matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

} // namespace hwidths
