#pragma once

#include <cmath>
#include <vector>

#include "hwidths/gramian.hpp"
#include "hwidths/quadrature.hpp"
#include "hwidths/system.hpp"

namespace hwidths {

namespace detail {

/// One-sided PSD factor X = F F^T from the symmetric eigendecomposition.
/// Eigenvalues at the roundoff floor are truncated to exact zero: keeping
/// them would give the factor sqrt(eps)-size junk columns that dominate
/// every small singular value computed from factor products downstream.
inline Matrix psd_factor(const SymmetricEig& eig) {
    const double top = eig.values.size() ? std::max(eig.values[0], 0.0) : 0.0;
    Vector rt = eig.values;
    for (Index i = 0; i < rt.size(); ++i)
        rt[i] = rt[i] > 1e-14 * top ? std::sqrt(rt[i]) : 0.0;
    return eig.vectors * rt.asDiagonal();
}

} // namespace detail

/// Hankel singular values and Schmidt coefficient vectors of a stable LTI
/// system.
///
/// sigma_i are the square roots of the eigenvalues of P Q, obtained from the
/// symmetrized product F_Q^T P F_Q in factored form: with P = F_P F_P^T and
/// Q = F_Q F_Q^T, the singular values of G = F_P^T F_Q are exactly
/// sqrt(eig(F_Q^T P F_Q)), and the right singular vectors u_i are its
/// eigenvectors. Working on G instead of the assembled product keeps the
/// absolute error of the small sigma at eps*sigma_1 rather than
/// sqrt(eps)*sigma_1.
///
/// The Schmidt vectors come from the inverse-free identity
///   Q (P F_Q u_i) = sigma_i^2 (F_Q u_i)  =>  v_i := P F_Q u_i / sigma_i^2
/// with v_i^T Q v_j = (u_i^T M u_j terms) = delta_ij, which survives a
/// numerically singular Q.
struct HankelSpectrum {
    Vector sigma;     // nonincreasing, >= 0
    Matrix V;         // Schmidt coefficient vectors as columns
    LtiSystem sys;
    GramianPair gram;
    Index rank = 0;   // number of sigma above the zero threshold
    double cert_floor = 0.0;   // vectors with sigma_i >= this carry the
                               // certified PQ-eigen residual
};

inline HankelSpectrum hankel_spectrum(const LtiSystem& sys,
                                      const Tolerances& tol = default_tolerances()) {
    require_stable(sys, "hankel_spectrum", tol);
    const Index n = sys.order();
    HankelSpectrum spec;
    spec.sys = sys;
    spec.gram = gramians(sys, tol);

    const SymmetricEig eig_p = symmetric_eig(spec.gram.P, tol);
    const SymmetricEig eig_q = symmetric_eig(spec.gram.Q, tol);
    const Matrix factor_p = detail::psd_factor(eig_p);
    const Matrix factor_q = detail::psd_factor(eig_q);
    const SvdResult dec = svd(factor_p.transpose() * factor_q, tol);

    spec.sigma = dec.sigma;
    const double sigma1 = spec.sigma.size() ? spec.sigma[0] : 0.0;
    // An identically zero operator (B = 0, error system of identical models)
    // shows sigma1 at the eps-level noise floor of the factor product.
    // Detect that case and report an exact zero spectrum.
    const double op_scale = factor_p.norm() * factor_q.norm();
    spec.rank = 0;
    if (sigma1 > 1e-12 * op_scale) {
        const double zero_cut = tol.zero_sigma_rel * sigma1;
        while (spec.rank < n && spec.sigma[spec.rank] > zero_cut)
            ++spec.rank;
    }
    for (Index i = spec.rank; i < n; ++i)
        spec.sigma[i] = 0.0;

    spec.V = Matrix::Zero(n, n);
    for (Index i = 0; i < spec.rank; ++i) {
        Vector v = spec.gram.P * (factor_q * dec.V.col(i));
        const double qnorm = std::sqrt(std::max(v.dot(spec.gram.Q * v), 0.0));
        if (qnorm > 0.0)
            v /= qnorm;
        spec.V.col(i) = v;
    }

    // Schmidt vectors are non-unique within a sigma cluster: Gram-Schmidt in
    // the Q-inner product inside each cluster. Below the certification floor
    // (sigma_i^2 under the roundoff of the Gramian product, which scales
    // with the Gramians, not with sigma_1) the vectors are noise-dominated,
    // so there orthogonality against every earlier mode is enforced instead
    // of inherited.
    spec.cert_floor = tol.schmidt_cert_floor * op_scale;
    const double cert_floor = spec.cert_floor;
    {
        Index lo = 0;
        while (lo < spec.rank) {
            Index hi = lo;
            while (hi + 1 < spec.rank &&
                   spec.sigma[hi] - spec.sigma[hi + 1] < tol.cluster_rel * sigma1)
                ++hi;
            for (Index i = lo; i <= hi; ++i) {
                Vector v = spec.V.col(i);
                const Index gs_from = spec.sigma[i] >= cert_floor ? lo : Index(0);
                for (Index j = gs_from; j < i; ++j)
                    v -= (spec.V.col(j).dot(spec.gram.Q * v)) * spec.V.col(j);
                const double qnorm = std::sqrt(std::max(v.dot(spec.gram.Q * v), 0.0));
                if (qnorm > 1e-150)
                    spec.V.col(i) = v / qnorm;
                else if (v.norm() > 0.0)
                    spec.V.col(i) = v / v.norm();
            }
            lo = hi + 1;
        }
    }

    // Q-orthogonal completion for the zero singular values.
    if (spec.rank < n) {
        Index filled = spec.rank;
        for (Index cand = 0; cand < n && filled < n; ++cand) {
            Vector v = Vector::Unit(n, cand);
            for (Index j = 0; j < spec.rank; ++j)
                v -= (spec.V.col(j).dot(spec.gram.Q * v)) * spec.V.col(j);
            for (Index j = spec.rank; j < filled; ++j)
                v -= spec.V.col(j).dot(v) * spec.V.col(j);
            const double nrm = v.norm();
            if (nrm > 1e-8) {
                spec.V.col(filled++) = v / nrm;
            }
        }
        if (filled < n)
            throw NonConvergence("hankel_spectrum: failed to complete the Schmidt frame");
    }

    // Certify P Q v_i = sigma_i^2 v_i where the eigenvalue sits above the
    // eps * sigma1^2 noise floor of the product.
    const Matrix pq = spec.gram.P * spec.gram.Q;
    for (Index i = 0; i < spec.rank; ++i) {
        if (spec.sigma[i] < cert_floor)
            break;
        const Vector v = spec.V.col(i);
        const double s2 = spec.sigma[i] * spec.sigma[i];
        const double resid = (pq * v - s2 * v).norm() /
                             std::max(sigma1 * sigma1 * v.norm(), 1e-300);
        if (resid > tol.schmidt_residual)
            throw NonConvergence("hankel_spectrum: Schmidt vector residual exceeds tolerance");
    }
    return spec;
}

/// L2-L2 induced norm of the Hankel operator; equals sigma_1.
inline double hankel_norm(const LtiSystem& sys, const Tolerances& tol = default_tolerances()) {
    const HankelSpectrum spec = hankel_spectrum(sys, tol);
    return spec.sigma.size() ? spec.sigma[0] : 0.0;
}

/// Evaluators for the i-th Schmidt pair:
///   g_i(t) = C e^{At} v_i              on t in [0, inf)
///   f_i(s) = (1/sigma_i) B^T e^{-A^T s} Q v_i   on s in (-inf, 0]
/// Inner products come exactly from the Gramian identities
///   <g_i, g_j> = v_i^T Q v_j,   <f_i, f_j> = (sigma_j / sigma_i) v_i^T Q v_j.
struct SingularFunctionEvaluator {
    Index index = 0;        // 1-based
    double sigma = 0.0;
    Matrix A, B, C;
    Vector v;
    Vector qv;              // Q v_i

    Vector g(double t) const {
        return C * expm(A * t) * v;
    }

    Vector f(double s) const {
        return (1.0 / sigma) * (B.transpose() * expm(-A.transpose() * s) * qv);
    }
};

inline SingularFunctionEvaluator schmidt_pair(const HankelSpectrum& spec, Index i,
                                              const Tolerances& tol = default_tolerances()) {
    const Index n = spec.sigma.size();
    if (i < 1 || i > n)
        throw IndexOutOfRange("schmidt_pair: index out of range");
    const double sigma1 = n ? spec.sigma[0] : 0.0;
    if (!(spec.sigma[i - 1] > tol.zero_sigma_rel * sigma1))
        throw ZeroSingularValue("schmidt_pair: singular value is zero to tolerance");
    SingularFunctionEvaluator ev;
    ev.index = i;
    ev.sigma = spec.sigma[i - 1];
    ev.A = spec.sys.A;
    ev.B = spec.sys.B;
    ev.C = spec.sys.C;
    ev.v = spec.V.col(i - 1);
    ev.qv = spec.gram.Q * ev.v;
    return ev;
}

/// Exact Gramian-identity inner products of the singular functions.
inline double g_inner(const HankelSpectrum& spec, Index i, Index j) {
    return spec.V.col(i - 1).dot(spec.gram.Q * spec.V.col(j - 1));
}

inline double f_inner(const HankelSpectrum& spec, Index i, Index j) {
    return (spec.sigma[j - 1] / spec.sigma[i - 1]) * g_inner(spec, i, j);
}

/// Verification record for the singular-pair identity: the controllability
/// map sends f_i to (1/sigma_i) P Q v_i, which must equal sigma_i v_i.
struct HankelApplication {
    Index index = 0;
    Vector image_coeffs;   // (1/sigma_i) P Q v_i
    double defect = 0.0;   // ||image - sigma_i v_i|| / sigma_i
};

inline HankelApplication apply_hankel_to_f(const HankelSpectrum& spec, Index i,
                                           const Tolerances& tol = default_tolerances()) {
    const SingularFunctionEvaluator ev = schmidt_pair(spec, i, tol);
    HankelApplication rec;
    rec.index = i;
    rec.image_coeffs = (spec.gram.P * ev.qv) / ev.sigma;
    rec.defect = (rec.image_coeffs - ev.sigma * ev.v).norm() / ev.sigma;
    return rec;
}

/// Quadrature discretization of the Hankel operator, used as an oracle that
/// is independent of the Gramian route. The past grid mirrors the future
/// grid; entries are sqrt(w_k) h(t_k + t_j) sqrt(w_j) per channel block with
/// h(tau) = C e^{A tau} B (the Dirac/D term never fires for t > 0 > s).
struct DiscretizedHankel {
    double horizon = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    Matrix M;   // (p * K) x (m * K)

    Vector singular_values(const Tolerances& tol = default_tolerances()) const {
        return svd(M, tol).sigma;
    }
};

inline DiscretizedHankel discretize(const LtiSystem& sys, int nodes_per_panel = 8,
                                    int panels = 12,
                                    const Tolerances& tol = default_tolerances()) {
    require_stable(sys, "discretize", tol);
    if (nodes_per_panel < 1 || panels < 1)
        throw BadParameter("discretize: need at least one node and one panel");
    const double alpha = spectral_abscissa(sys, tol);
    DiscretizedHankel disc;
    disc.horizon = std::log(1e12) / std::abs(alpha);
    const QuadratureRule rule = graded_panels(disc.horizon, nodes_per_panel, panels);
    disc.nodes = rule.nodes;
    disc.weights = rule.weights;

    const Index k = static_cast<Index>(rule.nodes.size());
    const Index p = sys.outputs(), m = sys.inputs();
    std::vector<Matrix> rows(k), cols(k);
    for (Index i = 0; i < k; ++i) {
        const Matrix e = expm(sys.A * rule.nodes[i], tol);
        rows[i] = std::sqrt(rule.weights[i]) * (sys.C * e);
        cols[i] = e * sys.B * std::sqrt(rule.weights[i]);
    }
    disc.M.resize(p * k, m * k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j)
            disc.M.block(i * p, j * m, p, m) = rows[i] * cols[j];
    return disc;
}

} // namespace hwidths
