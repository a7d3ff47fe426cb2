#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hwidths/errors.hpp"
#include "hwidths/tolerances.hpp"
#include "hwidths/types.hpp"

namespace hwidths {

struct SchurResult {
    Matrix Q;  // orthogonal
    Matrix T;  // quasi-upper-triangular, 1x1/2x2 diagonal blocks
};

struct SvdResult {
    Matrix U;       // rows x rows
    Vector sigma;   // nonincreasing, length min(rows, cols)
    Matrix V;       // cols x cols
};

struct SymmetricEig {
    Vector values;   // nonincreasing
    Matrix vectors;  // orthonormal columns, same order
};

/// M = Q T Q^T with T quasi-upper-triangular. Real arithmetic throughout;
/// complex pairs stay in 2x2 blocks.
inline SchurResult real_schur(const Matrix& m, const Tolerances& tol = default_tolerances()) {
    check_square(m, "real_schur");
    check_finite(m, "real_schur");
    Eigen::RealSchur<Matrix> schur;
    schur.setMaxIterations(tol.schur_sweeps_per_row * std::max<Index>(m.rows(), 1));
    schur.compute(m, /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw NonConvergence("real_schur: QR iteration exceeded its budget");
    return {schur.matrixU(), schur.matrixT()};
}

inline SvdResult svd(const Matrix& m, const Tolerances& = default_tolerances()) {
    check_finite(m, "svd");
    Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Eigendecomposition of a symmetric matrix, eigenvalues nonincreasing.
/// The input is symmetrized internally; asymmetry beyond the tolerance is an
/// error.
inline SymmetricEig symmetric_eig(const Matrix& m, const Tolerances& tol = default_tolerances()) {
    check_square(m, "symmetric_eig");
    check_finite(m, "symmetric_eig");
    const double scale = m.norm();
    if ((m - m.transpose()).norm() > tol.symmetry_check * std::max(scale, 1e-300))
        throw NotSymmetric("symmetric_eig: input is not symmetric to tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
    if (eig.info() != Eigen::Success)
        throw NonConvergence("symmetric_eig: iteration failed");
    const Index n = m.rows();
    SymmetricEig out;
    out.values = eig.eigenvalues().reverse();
    out.vectors.resize(n, n);
    for (Index j = 0; j < n; ++j)
        out.vectors.col(j) = eig.eigenvectors().col(n - 1 - j);
    return out;
}

/// Matrix exponential by scaling-and-squaring with the degree-13 Pade
/// approximant (coefficients from Higham 2005).
inline Matrix expm(const Matrix& m, const Tolerances& = default_tolerances()) {
    check_square(m, "expm");
    check_finite(m, "expm");
    const Index n = m.rows();
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;

    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13)
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    const Matrix a = m / std::pow(2.0, squarings);

    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                          b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                     b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k)
        r = r * r;
    if (!r.allFinite())
        throw Overflow("expm: result is not finite");
    return r;
}

/// Dense linear solve with a condition estimate; raises Singular when the
/// estimated condition number exceeds the policy limit.
inline Matrix solve(const Matrix& m, const Matrix& rhs, const Tolerances& tol = default_tolerances()) {
    check_square(m, "solve");
    check_finite(m, "solve");
    check_finite(rhs, "solve rhs");
    if (m.rows() != rhs.rows())
        throw DimensionMismatch("solve: rhs row count does not match");
    Eigen::PartialPivLU<Matrix> lu(m);
    const double rc = lu.rcond();
    if (!(rc > 1.0 / tol.condition_limit))
        throw Singular("solve: condition estimate exceeds limit");
    return lu.solve(rhs);
}

namespace detail {

/// Sizes of the 1x1/2x2 diagonal blocks of a quasi-upper-triangular T, in
/// order. Relies on exact zeros below the subdiagonal as produced by
/// real_schur.
inline std::vector<int> schur_block_sizes(const Matrix& t) {
    std::vector<int> sizes;
    const Index n = t.rows();
    Index i = 0;
    while (i < n) {
        if (i + 1 < n && t(i + 1, i) != 0.0) {
            sizes.push_back(2);
            i += 2;
        } else {
            sizes.push_back(1);
            i += 1;
        }
    }
    return sizes;
}

/// Real parts of the eigenvalues read off the diagonal blocks of T.
inline std::vector<double> schur_eigen_real_parts(const Matrix& t) {
    std::vector<double> re;
    Index i = 0;
    for (int sz : schur_block_sizes(t)) {
        if (sz == 1) {
            re.push_back(t(i, i));
        } else {
            const double half_trace = 0.5 * (t(i, i) + t(i + 1, i + 1));
            re.push_back(half_trace);
            re.push_back(half_trace);
        }
        i += sz;
    }
    return re;
}

/// Moduli of the eigenvalues of T. A 2x2 Schur block holds a complex pair,
/// so |lambda|^2 equals the block determinant.
inline std::vector<double> schur_eigen_moduli(const Matrix& t) {
    std::vector<double> mod;
    Index i = 0;
    for (int sz : schur_block_sizes(t)) {
        if (sz == 1) {
            mod.push_back(std::abs(t(i, i)));
        } else {
            const double det = t(i, i) * t(i + 1, i + 1) - t(i, i + 1) * t(i + 1, i);
            const double r = std::sqrt(std::max(det, 0.0));
            mod.push_back(r);
            mod.push_back(r);
        }
        i += sz;
    }
    return mod;
}

} // namespace detail
} // namespace hwidths
