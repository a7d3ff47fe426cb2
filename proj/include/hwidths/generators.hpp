#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "hwidths/system.hpp"

namespace hwidths {

namespace detail {

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = gauss(rng);
    return m;
}

} // namespace detail

/// Random asymptotically stable system: A = R - (rho(R) + margin) I with R
/// Gaussian, random B and C, D = 0.
inline LtiSystem random_stable(Index order, std::uint64_t seed, Index inputs = 1,
                               Index outputs = 1, double margin = 0.5) {
    if (order < 1 || inputs < 1 || outputs < 1)
        throw BadParameter("random_stable: dimensions must be positive");
    if (!(margin > 0.0))
        throw BadParameter("random_stable: margin must be positive");
    std::mt19937_64 rng(seed);
    const Matrix r = detail::gaussian_matrix(order, order, rng);
    const auto moduli = detail::schur_eigen_moduli(real_schur(r).T);
    const double rho = *std::max_element(moduli.begin(), moduli.end());
    const Matrix a = r - (rho + margin) * Matrix::Identity(order, order);
    const Matrix b = detail::gaussian_matrix(order, inputs, rng);
    const Matrix c = detail::gaussian_matrix(outputs, order, rng);
    return LtiSystem(a, b, c);
}

/// SISO RC line: A is the negative Laplacian of a path grounded at the
/// input node, B = e1, C reads the far end.
inline LtiSystem rc_ladder(Index order) {
    if (order < 1)
        throw BadParameter("rc_ladder: order must be positive");
    Matrix a = Matrix::Zero(order, order);
    for (Index i = 0; i < order; ++i) {
        a(i, i) = -2.0;
        if (i + 1 < order) {
            a(i, i + 1) = 1.0;
            a(i + 1, i) = 1.0;
        }
    }
    a(order - 1, order - 1) = -1.0;
    Matrix b = Matrix::Zero(order, 1);
    b(0, 0) = 1.0;
    Matrix c = Matrix::Zero(1, order);
    c(0, order - 1) = 1.0;
    return LtiSystem(a, b, c);
}

/// 1-D heat equation on [0,1] with Dirichlet ends, diffusivity as the single
/// parameter: A(p) = p * (N+1)^2 * tridiag(1,-2,1), boundary input through
/// the first node, average temperature output.
inline ParametricLtiSystem heat1d(Index order, double p_min = 0.1, double p_max = 10.0) {
    if (order < 1)
        throw BadParameter("heat1d: order must be positive");
    if (!(p_min > 0.0) || !(p_min <= p_max))
        throw BadParameter("heat1d: need 0 < min <= max");
    const double scale = static_cast<double>((order + 1) * (order + 1));
    Matrix lap = Matrix::Zero(order, order);
    for (Index i = 0; i < order; ++i) {
        lap(i, i) = -2.0 * scale;
        if (i + 1 < order) {
            lap(i, i + 1) = scale;
            lap(i + 1, i) = scale;
        }
    }
    Matrix b = Matrix::Zero(order, 1);
    b(0, 0) = scale;
    Matrix c = Matrix::Constant(1, order, 1.0 / static_cast<double>(order));

    LtiSystem base(Matrix::Zero(order, order), b, c);
    LtiSystem term(lap, Matrix::Zero(order, 1), Matrix::Zero(1, order));
    return ParametricLtiSystem(base, {term}, {{"diffusivity", p_min, p_max}});
}

/// Diagonal system from explicit mode lists, for closed-form oracles:
/// Gramians have entries b_i b_j / (-l_i - l_j) and c_i c_j / (-l_i - l_j).
inline LtiSystem diag_system(const std::vector<double>& lambdas, const std::vector<double>& b,
                             const std::vector<double>& c) {
    const Index n = static_cast<Index>(lambdas.size());
    if (n < 1)
        throw BadParameter("diag_system: need at least one mode");
    if (b.size() != lambdas.size() || c.size() != lambdas.size())
        throw BadParameter("diag_system: lambda, b, c lists must have equal length");
    Matrix a = Matrix::Zero(n, n);
    Matrix bm(n, 1), cm(1, n);
    for (Index i = 0; i < n; ++i) {
        a(i, i) = lambdas[i];
        bm(i, 0) = b[i];
        cm(0, i) = c[i];
    }
    return LtiSystem(a, bm, cm);
}

using GeneratedSystem = std::variant<LtiSystem, ParametricLtiSystem>;

/// String-dispatched front end used by the CLI.
inline GeneratedSystem generate(const std::string& model, Index order, std::uint64_t seed,
                                Index inputs = 1, Index outputs = 1) {
    if (model == "random_stable")
        return random_stable(order, seed, inputs, outputs);
    if (model == "rc_ladder")
        return rc_ladder(order);
    if (model == "heat1d")
        return heat1d(order);
    if (model == "diag") {
        // Default mode set -1, -2, ..., -N with unit injection and readout.
        std::vector<double> lambdas(order), ones(order, 1.0);
        for (Index i = 0; i < order; ++i)
            lambdas[i] = -static_cast<double>(i + 1);
        return diag_system(lambdas, ones, ones);
    }
    throw BadParameter("generate: unknown model '" + model + "'");
}

} // namespace hwidths
