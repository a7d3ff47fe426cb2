#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "hwidths/hankel.hpp"

namespace hwidths {

namespace detail {

/// Swaps two adjacent diagonal blocks of a quasi-upper-triangular T (sizes
/// p, q in {1,2}) by an orthogonal similarity, accumulating into U. The
/// columns of [X; I] with A11 X - X A22 = -A12 span the invariant subspace
/// of the trailing block; a QR factorization turns that into the swap.
inline void swap_schur_blocks(Matrix& t, Matrix& u, Index off, Index p, Index q) {
    const Index w = p + q;
    const Matrix a11 = t.block(off, off, p, p);
    const Matrix a22 = t.block(off + p, off + p, q, q);
    const Matrix a12 = t.block(off, off + p, p, q);

    // (I_q kron A11 - A22^T kron I_p) vec(X) = vec(-A12)
    Matrix small = Matrix::Zero(p * q, p * q);
    for (Index cq = 0; cq < q; ++cq)
        small.block(cq * p, cq * p, p, p) = a11;
    for (Index cq = 0; cq < q; ++cq)
        for (Index rq = 0; rq < q; ++rq)
            small.block(rq * p, cq * p, p, p).diagonal().array() -= a22(cq, rq);
    Matrix rhs = -a12;
    Eigen::Map<Vector> vec_rhs(rhs.data(), p * q);
    Eigen::FullPivLU<Matrix> lu(small);
    if (!lu.isInvertible())
        throw NonConvergence("schur reorder: adjacent blocks share eigenvalues");
    const Vector xv = lu.solve(vec_rhs);
    Matrix stacked(w, q);
    for (Index cq = 0; cq < q; ++cq)
        stacked.block(0, cq, p, 1) = xv.segment(cq * p, p);
    stacked.bottomRows(q) = Matrix::Identity(q, q);

    const Matrix qw = Eigen::HouseholderQR<Matrix>(stacked).householderQ();
    t.middleRows(off, w) = qw.transpose() * t.middleRows(off, w);
    t.middleCols(off, w) = t.middleCols(off, w) * qw;
    u.middleCols(off, w) = u.middleCols(off, w) * qw;

    const double scale = t.norm();
    if (t.block(off + q, off, p, q).norm() > 1e-7 * std::max(scale, 1e-300))
        throw NonConvergence("schur reorder: swap residual too large");
    t.block(off + q, off, p, q).setZero();
}

struct OrderedSchur {
    Matrix Q;
    Matrix T;
    Index stable_count = 0;   // leading block size with Re(lambda) < 0
};

/// Real Schur form with all stable eigenvalues moved to the leading block.
inline OrderedSchur ordered_schur_stable_first(const Matrix& a, const Tolerances& tol) {
    const SchurResult schur = real_schur(a, tol);
    OrderedSchur out{schur.Q, schur.T, 0};

    struct Block {
        Index off;
        Index size;
        bool stable;
    };
    auto rebuild = [&]() {
        std::vector<Block> blocks;
        Index i = 0;
        for (int sz : schur_block_sizes(out.T)) {
            const double re = (sz == 1) ? out.T(i, i)
                                        : 0.5 * (out.T(i, i) + out.T(i + 1, i + 1));
            blocks.push_back({i, sz, re < 0.0});
            i += sz;
        }
        return blocks;
    };

    std::vector<Block> blocks = rebuild();
    size_t target = 0;
    while (target < blocks.size()) {
        if (blocks[target].stable) {
            ++target;
            continue;
        }
        size_t next_stable = target + 1;
        while (next_stable < blocks.size() && !blocks[next_stable].stable)
            ++next_stable;
        if (next_stable == blocks.size())
            break;
        for (size_t j = next_stable; j > target; --j) {
            swap_schur_blocks(out.T, out.Q, blocks[j - 1].off, blocks[j - 1].size,
                              blocks[j].size);
            std::swap(blocks[j - 1].stable, blocks[j].stable);
            std::swap(blocks[j - 1].size, blocks[j].size);
            blocks[j].off = blocks[j - 1].off + blocks[j - 1].size;
        }
        ++target;
    }
    for (const Block& b : rebuild())
        if (b.stable)
            out.stable_count += b.size;
    return out;
}

/// Stable subsystem of (a, b, c): Schur-reorders stable eigenvalues first,
/// then block-diagonalizes with a Sylvester solve so the anti-stable part
/// decouples exactly.
inline LtiSystem stable_part(const Matrix& a, const Matrix& b, const Matrix& c,
                             const Matrix& d, Index expected_order, const Tolerances& tol) {
    const OrderedSchur os = ordered_schur_stable_first(a, tol);
    const Index k = os.stable_count;
    if (k != expected_order)
        throw NonConvergence("stable_part: stable eigenvalue count " + std::to_string(k) +
                             " does not match the expected order " +
                             std::to_string(expected_order));
    const Index nu = a.rows();
    const Matrix bt = os.Q.transpose() * b;
    const Matrix ct = c * os.Q;
    if (k == nu)
        return LtiSystem(os.T, bt, ct, d);
    const Matrix ts = os.T.topLeftCorner(k, k);
    const Matrix tu = os.T.bottomRightCorner(nu - k, nu - k);
    const Matrix tx = os.T.topRightCorner(k, nu - k);
    // Ts Z - Z Tu = -Tx, solved directly on the quasi-triangular factors.
    const Matrix z = solve_quasi_triangular_sylvester(ts, -tu, -tx);
    const Matrix bs = bt.topRows(k) - z * bt.bottomRows(nu - k);
    return LtiSystem(ts, bs, ct.leftCols(k), d);
}

} // namespace detail

/// Balanced realization via the square-root method: P = F_P F_P^T,
/// Q = F_Q F_Q^T, SVD F_Q^T F_P = W S V^T, T = F_P V S^{-1/2},
/// T^{-1} = S^{-1/2} W^T F_Q^T. States with sigma below the minimality
/// threshold are truncated up front (recorded in pre_truncated).
struct BalancedRealization {
    LtiSystem sys;
    Matrix T;        // N x r state transform
    Matrix Tinv;     // r x N
    Vector sigma;    // balanced Gramian diagonal, length r
    Index original_order = 0;
    bool pre_truncated = false;
};

inline BalancedRealization balance(const LtiSystem& sys,
                                   const Tolerances& tol = default_tolerances()) {
    require_stable(sys, "balance", tol);
    const GramianPair g = gramians(sys, tol);
    const Matrix factor_p = detail::psd_factor(symmetric_eig(g.P, tol));
    const Matrix factor_q = detail::psd_factor(symmetric_eig(g.Q, tol));
    const SvdResult dec = svd(factor_q.transpose() * factor_p, tol);

    const Index n = sys.order();
    const double s1 = dec.sigma.size() ? dec.sigma[0] : 0.0;
    if (!(s1 > 0.0))
        throw NearNonMinimal("balance: all Hankel singular values vanish");
    Index r = 0;
    while (r < n && dec.sigma[r] > tol.minimality_rel * s1)
        ++r;

    BalancedRealization bal;
    bal.original_order = n;
    bal.pre_truncated = (r < n);
    bal.sigma = dec.sigma.head(r);
    const Vector inv_sqrt = bal.sigma.cwiseSqrt().cwiseInverse();
    bal.T = factor_p * dec.V.leftCols(r) * inv_sqrt.asDiagonal();
    bal.Tinv = inv_sqrt.asDiagonal() * dec.U.leftCols(r).transpose() * factor_q.transpose();
    bal.sys = LtiSystem(bal.Tinv * sys.A * bal.T, bal.Tinv * sys.B, sys.C * bal.T, sys.D);
    return bal;
}

struct ReducedModel {
    LtiSystem system;
    std::string method;            // balanced_truncation | optimal_hankel
    Index order = 0;
    Index requested_order = 0;
    bool order_shifted = false;    // moved to a sigma-cluster edge
    double achieved_error = -1.0;  // Hankel error, filled post hoc
};

/// Leading balanced sub-blocks; stability holds under the sigma-gap
/// condition. Orders inside a sigma cluster are shifted down to the cluster
/// edge.
inline ReducedModel balanced_truncation(const LtiSystem& sys, Index n,
                                        const Tolerances& tol = default_tolerances()) {
    if (n < 1)
        throw BadOrder("balanced_truncation: order must be at least 1");
    const BalancedRealization bal = balance(sys, tol);
    const Index r = bal.sigma.size();
    const double sigma1 = bal.sigma[0];
    ReducedModel red;
    red.method = "balanced_truncation";
    red.requested_order = n;
    Index k = std::min(n, r);
    while (k >= 1 && k < r && bal.sigma[k - 1] - bal.sigma[k] < tol.minimality_rel * sigma1)
        --k;
    if (k < 1)
        throw BadOrder("balanced_truncation: no admissible order at or below the request");
    red.order = k;
    red.order_shifted = (k != n);
    red.system = LtiSystem(bal.sys.A.topLeftCorner(k, k), bal.sys.B.topRows(k),
                           bal.sys.C.leftCols(k), bal.sys.D);
    if (!(spectral_abscissa(red.system, tol) < 0.0))
        throw NonConvergence("balanced_truncation: reduced model is not stable");
    return red;
}

/// Glover's optimal Hankel norm approximation of order n: permute the
/// balanced realization so the sigma_{n+1} cluster comes last, form the
/// one-step all-pass completion
///   Gamma = Sigma_1^2 - sigma^2 I,   B2 = -C2^T U,
///   Ahat = Gamma^{-1}(sigma^2 A11^T + Sigma_1 A11 Sigma_1 - sigma C1^T U B1^T),
///   Bhat = Gamma^{-1}(Sigma_1 B1 + sigma C1^T U),
///   Chat = C1 Sigma_1 + sigma U B1^T,   Dhat = D - sigma U,
/// and keep the stable part. Non-square systems are padded with zero
/// channels to square for the construction and stripped afterwards.
inline ReducedModel optimal_hankel(const LtiSystem& sys, Index n,
                                   const Tolerances& tol = default_tolerances()) {
    if (n < 1)
        throw BadOrder("optimal_hankel: order must be at least 1");
    const Index m0 = sys.inputs(), p0 = sys.outputs();
    const Index mp = std::max(m0, p0);
    LtiSystem padded = sys;
    if (m0 != p0) {
        Matrix b = Matrix::Zero(sys.order(), mp);
        b.leftCols(m0) = sys.B;
        Matrix c = Matrix::Zero(mp, sys.order());
        c.topRows(p0) = sys.C;
        Matrix d = Matrix::Zero(mp, mp);
        d.topLeftCorner(p0, m0) = sys.D;
        padded = LtiSystem(sys.A, b, c, d);
    }

    const BalancedRealization bal = balance(padded, tol);
    const Index r = bal.sigma.size();
    ReducedModel red;
    red.method = "optimal_hankel";
    red.requested_order = n;

    if (n >= r) {
        // Nothing above the minimality floor to discard.
        red.order = r;
        red.order_shifted = (r != n);
        red.system = bal.sys;
    } else {
        const double sigma1 = bal.sigma[0];
        const double cluster = tol.cluster_rel * sigma1;
        Index lo = n, hi = n;   // 0-based index of sigma_{n+1}
        while (lo > 0 && bal.sigma[lo - 1] - bal.sigma[n] < cluster)
            --lo;
        while (hi + 1 < r && bal.sigma[n] - bal.sigma[hi + 1] < cluster)
            ++hi;
        // Gamma = Sigma_1^2 - sigma^2 I must stay invertible well above
        // roundoff; sigma values whose squares sit within the lambda radius
        // of the cluster are absorbed into it (the multiplicity-enlargement
        // resolution), shifting the realized order down.
        const double lambda_radius = 1e-13 * sigma1 * sigma1;
        auto lam = [&](Index i) { return bal.sigma[i] * bal.sigma[i]; };
        for (bool grew = true; grew;) {
            grew = false;
            if (lo > 0 && lam(lo - 1) - lam(lo) < lambda_radius) {
                --lo;
                grew = true;
            }
            if (hi + 1 < r && lam(hi) - lam(hi + 1) < lambda_radius) {
                ++hi;
                grew = true;
            }
        }
        const Index n_eff = lo;
        const Index rmult = hi - lo + 1;
        if (n_eff < 1)
            throw BadOrder("optimal_hankel: sigma_{n+1} cluster reaches sigma_1, "
                           "no order-n model is distinguished");
        red.order_shifted = (n_eff != n);
        const double sigma = bal.sigma[lo];

        // Permute the cluster states last.
        std::vector<Index> keep;
        keep.reserve(r - rmult);
        for (Index i = 0; i < lo; ++i)
            keep.push_back(i);
        for (Index i = hi + 1; i < r; ++i)
            keep.push_back(i);
        std::vector<Index> drop;
        for (Index i = lo; i <= hi; ++i)
            drop.push_back(i);

        const Index nk = static_cast<Index>(keep.size());
        Matrix a11(nk, nk), a12(nk, rmult), a22(rmult, rmult);
        Matrix b1(nk, mp), b2(rmult, mp), c1(mp, nk), c2(mp, rmult);
        Vector s1v(nk);
        for (Index i = 0; i < nk; ++i) {
            s1v[i] = bal.sigma[keep[i]];
            b1.row(i) = bal.sys.B.row(keep[i]);
            c1.col(i) = bal.sys.C.col(keep[i]);
            for (Index j = 0; j < nk; ++j)
                a11(i, j) = bal.sys.A(keep[i], keep[j]);
            for (Index j = 0; j < rmult; ++j)
                a12(i, j) = bal.sys.A(keep[i], drop[j]);
        }
        for (Index i = 0; i < rmult; ++i) {
            b2.row(i) = bal.sys.B.row(drop[i]);
            c2.col(i) = bal.sys.C.col(drop[i]);
            for (Index j = 0; j < rmult; ++j)
                a22(i, j) = bal.sys.A(drop[i], drop[j]);
        }

        Vector gamma = s1v.array().square() - sigma * sigma;
        const double gmin = gamma.cwiseAbs().minCoeff();
        // Gamma entries below the roundoff of sigma^2 invert to pure noise.
        if (!(gmin > 1e-14 * sigma1 * sigma1))
            throw DegenerateGamma("optimal_hankel: Gamma nearly singular across the cut");

        // U with B2 = -C2^T U and U^T U as close to I as the constraint
        // allows: minimum-norm solution plus an isometric completion in the
        // null space of C2^T.
        const SvdResult cdec = svd(Matrix(c2.transpose()), tol);
        const double ctop = cdec.sigma.size() ? cdec.sigma[0] : 0.0;
        Index crank = 0;
        while (crank < cdec.sigma.size() && cdec.sigma[crank] > 1e-12 * ctop)
            ++crank;
        Matrix u0 = Matrix::Zero(mp, mp);
        for (Index i = 0; i < crank; ++i)
            u0 += (cdec.V.col(i) / cdec.sigma[i]) * (cdec.U.col(i).transpose() * (-b2));
        const double consistency = (c2.transpose() * u0 + b2).norm();
        if (consistency > 1e-6 * std::max(b2.norm(), 1e-300))
            throw DegenerateGamma("optimal_hankel: B2 = -C2^T U has no consistent solution");
        Matrix u = u0;
        if (crank < mp) {
            const Matrix nullspace = cdec.V.rightCols(mp - crank);
            const SymmetricEig gdec =
                symmetric_eig(Matrix(Matrix::Identity(mp, mp) - u0.transpose() * u0), tol);
            Matrix z = Matrix::Zero(mp - crank, mp);
            const Index zrows = std::min<Index>(mp - crank, gdec.values.size());
            for (Index i = 0; i < zrows; ++i) {
                const double lam = std::max(gdec.values[i], 0.0);
                z.row(i) = std::sqrt(lam) * gdec.vectors.col(i).transpose();
            }
            u += nullspace * z;
        }

        const Matrix s1d = s1v.asDiagonal();
        const Matrix ginv = gamma.cwiseInverse().asDiagonal();
        const Matrix ahat = ginv * (sigma * sigma * a11.transpose() + s1d * a11 * s1d -
                                    sigma * c1.transpose() * u * b1.transpose());
        const Matrix bhat = ginv * (s1d * b1 + sigma * c1.transpose() * u);
        const Matrix chat = c1 * s1d + sigma * u * b1.transpose();
        const Matrix dhat = bal.sys.D - sigma * u;

        red.order = n_eff;
        red.system = detail::stable_part(ahat, bhat, chat, dhat, n_eff, tol);
    }

    if (m0 != p0) {
        red.system = LtiSystem(red.system.A, red.system.B.leftCols(m0),
                               red.system.C.topRows(p0),
                               red.system.D.topLeftCorner(p0, m0));
    }
    if (!(spectral_abscissa(red.system, tol) < 0.0))
        throw NonConvergence("optimal_hankel: reduced model is not stable");
    return red;
}

/// Hankel norm of the difference system.
inline double hankel_error(const LtiSystem& sys, const ReducedModel& red,
                           const Tolerances& tol = default_tolerances()) {
    return hankel_norm(error_system(sys, red.system), tol);
}

} // namespace hwidths
