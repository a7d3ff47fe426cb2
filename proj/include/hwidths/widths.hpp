#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hwidths/hankel.hpp"
#include "hwidths/parallel.hpp"

namespace hwidths {

enum class Side { output, input };

/// Candidate subspace in the orthonormal Schmidt coordinate frames: columns
/// are coordinates in {g_i} (output side) or {f_i} (input side). All width
/// computations happen in these N coordinates; the Hankel operator acts as
/// diag(sigma) there.
struct SubspaceCoords {
    Matrix basis;   // N x n, orthonormal columns
    Side side = Side::output;

    SubspaceCoords() = default;

    SubspaceCoords(const Matrix& candidate, Side s) : side(s) {
        check_finite(candidate, "SubspaceCoords");
        if (candidate.cols() > candidate.rows())
            throw DimensionMismatch("SubspaceCoords: more directions than frame dimension");
        if (candidate.cols() == 0) {
            basis = Matrix::Zero(candidate.rows(), 0);
            return;
        }
        Eigen::ColPivHouseholderQR<Matrix> qr(candidate);
        if (qr.rank() < candidate.cols())
            throw BadParameter("SubspaceCoords: candidate directions are rank deficient");
        basis = qr.householderQ() * Matrix::Identity(candidate.rows(), candidate.cols());
    }

    Index dim() const { return basis.cols(); }
    Index frame() const { return basis.rows(); }
};

namespace detail {

/// Drops components on zero-sigma coordinates (directions outside the image
/// of the Hankel operator) and re-orthonormalizes. May lower the dimension.
inline Matrix project_to_image(const Matrix& basis, const Vector& sigma, double zero_cut) {
    Matrix masked = basis;
    for (Index i = 0; i < sigma.size(); ++i)
        if (!(sigma[i] > zero_cut))
            masked.row(i).setZero();
    if (masked.cols() == 0)
        return masked;
    Eigen::ColPivHouseholderQR<Matrix> qr(masked);
    const Index r = qr.rank();
    return qr.householderQ() * Matrix::Identity(masked.rows(), r);
}

inline Matrix random_directions(Index n, Index k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(n, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < n; ++i)
            m(i, j) = gauss(rng);
    return m;
}

inline double max_singular_value(const Matrix& m) {
    if (m.size() == 0)
        return 0.0;
    return Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
}

} // namespace detail

/// Raw form of worst_error_output for candidate direction sets that may be
/// rank deficient after projection into the image (pooled global bases).
inline double worst_error_output_raw(const HankelSpectrum& spec, const Matrix& directions,
                                     const Tolerances& tol = default_tolerances()) {
    if (directions.rows() != spec.sigma.size())
        throw DimensionMismatch("worst_error_output: frame dimension mismatch");
    const double sigma1 = spec.sigma.size() ? spec.sigma[0] : 0.0;
    const Matrix pi =
        detail::project_to_image(directions, spec.sigma, tol.zero_sigma_rel * sigma1);
    const Matrix d = spec.sigma.asDiagonal();
    if (pi.cols() == 0)
        return sigma1;
    return detail::max_singular_value(d - pi * (pi.transpose() * d));
}

/// Worst approximation error of the Hankel image of the unit ball by the
/// candidate output subspace: sigma_max((I - Pi Pi^T) diag(sigma)).
/// Directions outside the image span contribute nothing and are projected
/// out first.
inline double worst_error_output(const HankelSpectrum& spec, const SubspaceCoords& s,
                                 const Tolerances& tol = default_tolerances()) {
    if (s.side != Side::output)
        throw DimensionMismatch("worst_error_output: candidate is not output-side");
    return worst_error_output_raw(spec, s.basis, tol);
}

/// Worst output error after projecting the *input* onto the candidate
/// subspace: sigma_max(diag(sigma) (I - Pi Pi^T)). A candidate direction in
/// ker(H) wastes budget; the formula accounts for that automatically.
inline double worst_error_input(const HankelSpectrum& spec, const SubspaceCoords& s,
                                const Tolerances& = default_tolerances()) {
    if (s.side != Side::input)
        throw DimensionMismatch("worst_error_input: candidate is not input-side");
    if (s.frame() != spec.sigma.size())
        throw DimensionMismatch("worst_error_input: frame dimension mismatch");
    const Matrix d = spec.sigma.asDiagonal();
    if (s.dim() == 0)
        return spec.sigma.size() ? spec.sigma[0] : 0.0;
    return detail::max_singular_value(d - (d * s.basis) * s.basis.transpose());
}

/// Reference value sigma_{n+1}, with sigma_{N+1} := 0 (finite rank).
inline double sigma_ref(const HankelSpectrum& spec, Index n) {
    return n < spec.sigma.size() ? spec.sigma[n] : 0.0;
}

struct GreedyStep {
    double error = 0.0;       // worst error of span{g_1..g_i}
    double probe_min = 0.0;   // best error over random one-dimensional enlargements
};

/// Greedy span in Schmidt coordinates (the leading unit vectors) plus a
/// sampled certificate: at each step no probed enlargement of the previous
/// span beats span{g_1..g_i} by more than the slack. Sampling is evidence
/// for the infimum, not proof; the theorem supplies exactness.
struct GreedyResult {
    SubspaceCoords coords;
    std::vector<GreedyStep> steps;
    bool certified = true;
    double slack = 0.0;
};

inline GreedyResult greedy_sequence(const HankelSpectrum& spec, Index n, Index probes = 500,
                                    std::uint64_t seed = 42,
                                    const Tolerances& tol = default_tolerances()) {
    const Index dim = spec.sigma.size();
    if (n < 0 || n > dim)
        throw BadOrder("greedy_sequence: order out of range");
    const double sigma1 = dim ? spec.sigma[0] : 0.0;
    GreedyResult out;
    out.slack = tol.width_slack_rel * sigma1;
    out.coords = SubspaceCoords(Matrix::Identity(dim, dim).leftCols(n), Side::output);
    out.steps.resize(n);
    for (Index i = 1; i <= n; ++i) {
        const SubspaceCoords span_i(Matrix::Identity(dim, dim).leftCols(i), Side::output);
        const double err_i = worst_error_output(spec, span_i, tol);
        std::vector<double> probe_errors(probes, 0.0);
        parallel_for(probes, [&](std::int64_t t) {
            Matrix cand(dim, i);
            cand.leftCols(i - 1) = Matrix::Identity(dim, dim).leftCols(i - 1);
            cand.col(i - 1) =
                detail::random_directions(dim, 1, split_seed(seed, (i << 20) + t));
            probe_errors[t] = worst_error_output(spec, SubspaceCoords(cand, Side::output), tol);
        });
        double probe_min = err_i;
        for (double e : probe_errors)
            probe_min = std::min(probe_min, e);
        out.steps[i - 1] = {err_i, probe_min};
        if (probe_min < err_i - out.slack)
            out.certified = false;
    }
    return out;
}

struct WidthReport {
    Index n = 0;
    double error = 0.0;       // achieved worst-case error
    double sigma_next = 0.0;  // reference sigma_{n+1}
    double gap = 0.0;         // error - sigma_{n+1}
    std::string provenance;   // greedy | random | user
    double probe_min = 0.0;   // empirical infimum over random candidates
    Index probes = 0;
    std::uint64_t seed = 0;
};

/// Kolmogorov n-width of the Hankel image of the unit ball: the greedy span
/// attains sigma_{n+1}; random candidates certify the lower-bound direction
/// empirically.
inline WidthReport nwidth(const HankelSpectrum& spec, Index n, Index probes = 500,
                          std::uint64_t seed = 42,
                          const Tolerances& tol = default_tolerances()) {
    const Index dim = spec.sigma.size();
    if (n < 0 || n > dim)
        throw BadOrder("nwidth: order out of range");
    WidthReport rep;
    rep.n = n;
    rep.provenance = "greedy";
    rep.probes = probes;
    rep.seed = seed;
    rep.sigma_next = sigma_ref(spec, n);
    const SubspaceCoords greedy(Matrix::Identity(dim, dim).leftCols(n), Side::output);
    rep.error = worst_error_output(spec, greedy, tol);
    rep.gap = rep.error - rep.sigma_next;
    rep.probe_min = rep.error;
    if (n >= 1 && n <= dim && probes > 0) {
        std::vector<double> errs(probes, 0.0);
        parallel_for(probes, [&](std::int64_t t) {
            const Matrix cand = detail::random_directions(dim, n, split_seed(seed, t));
            errs[t] = worst_error_output(spec, SubspaceCoords(cand, Side::output), tol);
        });
        for (double e : errs)
            rep.probe_min = std::min(rep.probe_min, e);
    }
    return rep;
}

/// Active-subspace analogue on the input side; span{f_1..f_n} attains
/// sigma_{n+1}.
inline WidthReport active_subspace(const HankelSpectrum& spec, Index n, Index probes = 500,
                                   std::uint64_t seed = 42,
                                   const Tolerances& tol = default_tolerances()) {
    const Index dim = spec.sigma.size();
    if (n < 0 || n > dim)
        throw BadOrder("active_subspace: order out of range");
    WidthReport rep;
    rep.n = n;
    rep.provenance = "greedy";
    rep.probes = probes;
    rep.seed = seed;
    rep.sigma_next = sigma_ref(spec, n);
    const SubspaceCoords lead(Matrix::Identity(dim, dim).leftCols(n), Side::input);
    rep.error = worst_error_input(spec, lead, tol);
    rep.gap = rep.error - rep.sigma_next;
    rep.probe_min = rep.error;
    if (n >= 1 && probes > 0) {
        std::vector<double> errs(probes, 0.0);
        parallel_for(probes, [&](std::int64_t t) {
            const Matrix cand = detail::random_directions(dim, n, split_seed(seed, t));
            errs[t] = worst_error_input(spec, SubspaceCoords(cand, Side::input), tol);
        });
        for (double e : errs)
            rep.probe_min = std::min(rep.probe_min, e);
    }
    return rep;
}

struct DualityReport {
    Index n = 0;               // possibly extended to the cluster edge
    Index requested_n = 0;
    bool multiplicity_warning = false;
    double sigma_agreement = 0.0;    // max |sigma_i - sigma*_i|
    double max_angle = 0.0;          // principal angles, radians
};

/// Checks that the output singular functions of the adjoint realization span
/// the input singular subspace of the original system: the time-reflected
/// f_i have coefficient vectors Q v_i, the adjoint's g*_i have coefficients
/// v*_i, and both live in the inner product <x, y> = x^T P y.
inline DualityReport duality_check(const LtiSystem& sys, Index n,
                                   const Tolerances& tol = default_tolerances()) {
    const HankelSpectrum spec = hankel_spectrum(sys, tol);
    const HankelSpectrum spec_adj = hankel_spectrum(adjoint(sys), tol);
    const Index dim = spec.sigma.size();
    if (n < 1 || n > dim)
        throw BadOrder("duality_check: order out of range");

    DualityReport rep;
    rep.requested_n = n;
    rep.sigma_agreement = (spec.sigma - spec_adj.sigma).cwiseAbs().maxCoeff();

    const double sigma1 = spec.sigma[0];
    Index n_eff = n;
    while (n_eff < dim && spec.sigma[n_eff - 1] - spec.sigma[n_eff] < tol.cluster_rel * sigma1) {
        rep.multiplicity_warning = true;
        ++n_eff;
    }
    n_eff = std::min(n_eff, spec.rank);
    rep.n = n_eff;
    if (n_eff == 0) {
        rep.max_angle = 0.0;
        return rep;
    }

    const Matrix half_p = detail::psd_factor(symmetric_eig(spec.gram.P, tol));
    Matrix w(dim, n_eff), va(dim, n_eff);
    for (Index i = 0; i < n_eff; ++i) {
        w.col(i) = spec.gram.Q * spec.V.col(i);
        va.col(i) = spec_adj.V.col(i);
    }
    const Matrix wm = half_p.transpose() * w;
    const Matrix vm = half_p.transpose() * va;
    const Matrix qw = Eigen::HouseholderQR<Matrix>(wm).householderQ() *
                      Matrix::Identity(dim, n_eff);
    const Matrix qv = Eigen::HouseholderQR<Matrix>(vm).householderQ() *
                      Matrix::Identity(dim, n_eff);
    const Vector cosines = svd(qw.transpose() * qv, tol).sigma;
    const double cmin = std::clamp(cosines[cosines.size() - 1], -1.0, 1.0);
    rep.max_angle = std::acos(cmin);
    return rep;
}

} // namespace hwidths
