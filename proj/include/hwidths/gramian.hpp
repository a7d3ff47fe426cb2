#pragma once

#include <cmath>

#include "hwidths/linalg.hpp"
#include "hwidths/system.hpp"

namespace hwidths {

namespace detail {

/// Back-substitution for S Y + Y R = F with S, R quasi-upper-triangular
/// (Bartels-Stewart). Columns of R left to right, rows of S bottom to top;
/// each diagonal block pair gives a dense system of size at most 4.
inline Matrix solve_quasi_triangular_sylvester(const Matrix& s, const Matrix& r, const Matrix& f) {
    const auto sblocks = schur_block_sizes(s);
    const auto rblocks = schur_block_sizes(r);
    std::vector<Index> soff(sblocks.size() + 1, 0), roff(rblocks.size() + 1, 0);
    for (size_t i = 0; i < sblocks.size(); ++i)
        soff[i + 1] = soff[i] + sblocks[i];
    for (size_t i = 0; i < rblocks.size(); ++i)
        roff[i + 1] = roff[i] + rblocks[i];

    Matrix y = Matrix::Zero(s.rows(), r.rows());
    for (size_t lb = 0; lb < rblocks.size(); ++lb) {
        const Index l0 = roff[lb], q = rblocks[lb];
        for (size_t kb = sblocks.size(); kb-- > 0;) {
            const Index k0 = soff[kb], p = sblocks[kb];
            Matrix rhs = f.block(k0, l0, p, q);
            if (soff[kb + 1] < s.rows())
                rhs -= s.block(k0, soff[kb + 1], p, s.rows() - soff[kb + 1]) *
                       y.block(soff[kb + 1], l0, s.rows() - soff[kb + 1], q);
            if (l0 > 0)
                rhs -= y.block(k0, 0, p, l0) * r.block(0, l0, l0, q);

            // (I_q kron S_kk + R_ll^T kron I_p) vec(Y_kl) = vec(rhs)
            const Index sz = p * q;
            Matrix small = Matrix::Zero(sz, sz);
            for (Index cq = 0; cq < q; ++cq)
                small.block(cq * p, cq * p, p, p) = s.block(k0, k0, p, p);
            for (Index cq = 0; cq < q; ++cq)
                for (Index rq = 0; rq < q; ++rq)
                    small.block(rq * p, cq * p, p, p).diagonal().array() +=
                        r(l0 + cq, l0 + rq);
            Eigen::Map<Vector> vec_rhs(rhs.data(), sz);
            Eigen::FullPivLU<Matrix> lu(small);
            if (!lu.isInvertible())
                throw SylvesterSingular(
                    "sylvester: coefficient spectra overlap (singular block pair)");
            const Vector sol = lu.solve(vec_rhs);
            for (Index cq = 0; cq < q; ++cq)
                y.block(k0, l0 + cq, p, 1) = sol.segment(cq * p, p);
        }
    }
    return y;
}

/// Reversal permutation turning the quasi-lower S^T into quasi-upper form:
/// A^T = (U J)(J S^T J)(U J)^T.
inline void transpose_schur(const SchurResult& in, Matrix& u_out, Matrix& t_out) {
    const Index n = in.T.rows();
    u_out.resize(n, n);
    t_out.resize(n, n);
    for (Index j = 0; j < n; ++j)
        u_out.col(j) = in.Q.col(n - 1 - j);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            t_out(i, j) = in.T(n - 1 - j, n - 1 - i);
}

} // namespace detail

/// Solves A X + X B + W = 0 for general square A, B with disjoint spectra
/// of A and -B.
inline Matrix sylvester(const Matrix& a, const Matrix& b, const Matrix& w,
                        const Tolerances& tol = default_tolerances()) {
    check_square(a, "sylvester A");
    check_square(b, "sylvester B");
    if (w.rows() != a.rows() || w.cols() != b.rows())
        throw DimensionMismatch("sylvester: W must be rows(A) x rows(B)");
    const SchurResult sa = real_schur(a, tol);
    const SchurResult sb = real_schur(b, tol);
    const Matrix f = -sa.Q.transpose() * w * sb.Q;
    const Matrix y = detail::solve_quasi_triangular_sylvester(sa.T, sb.T, f);
    return sa.Q * y * sb.Q.transpose();
}

/// Relative residual of A X + X A^T + W = 0 as certified by the acceptance
/// suite.
inline double lyapunov_residual(const Matrix& a, const Matrix& x, const Matrix& w) {
    const double num = (a * x + x * a.transpose() + w).norm();
    const double den = 2.0 * a.norm() * x.norm() + w.norm();
    return num / std::max(den, 1e-300);
}

/// Solves A X + X A^T + W = 0 for stable A by Bartels-Stewart: one real
/// Schur form of A, back-substitution over 1x1/2x2 block pairs. The result
/// is symmetrized exactly.
inline Matrix lyapunov(const Matrix& a, const Matrix& w,
                       const Tolerances& tol = default_tolerances()) {
    check_square(a, "lyapunov A");
    check_square(w, "lyapunov W");
    if (w.rows() != a.rows())
        throw DimensionMismatch("lyapunov: W must match A");
    const SchurResult sa = real_schur(a, tol);
    const auto re = detail::schur_eigen_real_parts(sa.T);
    if (*std::max_element(re.begin(), re.end()) >= -tol.stability_margin)
        throw Unstable("lyapunov: A is not asymptotically stable");

    Matrix u2, t2;
    detail::transpose_schur(sa, u2, t2);
    const Matrix f = -sa.Q.transpose() * w * u2;
    const Matrix y = detail::solve_quasi_triangular_sylvester(sa.T, t2, f);
    Matrix x = sa.Q * y * u2.transpose();
    x = 0.5 * (x + x.transpose()).eval();

    if (lyapunov_residual(a, x, w) > tol.lyap_residual)
        throw NonConvergence("lyapunov: residual exceeds certification threshold");
    return x;
}

namespace detail {

/// Clips tiny negative eigenvalues to zero; negativity beyond the tolerance
/// window is a failure.
inline Matrix psd_repair(const Matrix& x, const Tolerances& tol, const char* what) {
    const SymmetricEig eig = symmetric_eig(x, tol);
    const double top = eig.values.size() ? std::max(eig.values[0], 0.0) : 0.0;
    Vector clipped = eig.values;
    for (Index i = 0; i < clipped.size(); ++i) {
        if (clipped[i] < 0.0) {
            if (clipped[i] < -tol.psd_clip * std::max(top, 1e-300))
                throw NonConvergence(std::string(what) +
                                     ": Gramian indefinite beyond repair window");
            clipped[i] = 0.0;
        }
    }
    return eig.vectors * clipped.asDiagonal() * eig.vectors.transpose();
}

} // namespace detail

/// Controllability/observability Gramians with residual certificates.
struct GramianPair {
    Matrix P;        // controllability, symmetric PSD
    Matrix Q;        // observability, symmetric PSD
    double residP = 0.0;
    double residQ = 0.0;
};

inline GramianPair gramians(const LtiSystem& sys, const Tolerances& tol = default_tolerances()) {
    require_stable(sys, "gramians", tol);
    GramianPair g;
    const Matrix bbt = sys.B * sys.B.transpose();
    const Matrix ctc = sys.C.transpose() * sys.C;
    g.P = detail::psd_repair(lyapunov(sys.A, bbt, tol), tol, "gramians P");
    g.Q = detail::psd_repair(lyapunov(sys.A.transpose(), ctc, tol), tol, "gramians Q");
    g.P = 0.5 * (g.P + g.P.transpose()).eval();
    g.Q = 0.5 * (g.Q + g.Q.transpose()).eval();
    g.residP = lyapunov_residual(sys.A, g.P, bbt);
    g.residQ = lyapunov_residual(sys.A.transpose(), g.Q, ctc);
    return g;
}

} // namespace hwidths
