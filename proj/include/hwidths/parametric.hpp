#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "hwidths/widths.hpp"

namespace hwidths {

/// Tensor grid over the parameter box; a count of 1 on an axis samples its
/// midpoint. Points come out with the last axis fastest. axis_counts is kept
/// so continuity checks can slice along axes.
struct ParameterGrid {
    std::vector<Vector> points;
    std::vector<Index> axis_counts;
};

inline ParameterGrid tensor_grid(const ParametricLtiSystem& psys,
                                 const std::vector<Index>& counts) {
    const size_t dims = psys.parameter_count();
    if (counts.size() != dims)
        throw BadParameter("tensor_grid: one count per parameter axis");
    for (Index c : counts)
        if (c < 1)
            throw BadParameter("tensor_grid: counts must be positive");
    ParameterGrid grid;
    grid.axis_counts.assign(counts.begin(), counts.end());
    Index total = 1;
    for (Index c : counts)
        total *= c;
    grid.points.reserve(total);
    for (Index flat = 0; flat < total; ++flat) {
        Vector p(dims);
        Index rest = flat;
        for (size_t ax = dims; ax-- > 0;) {
            const Index c = counts[ax];
            const Index k = rest % c;
            rest /= c;
            const double lo = psys.box[ax].min, hi = psys.box[ax].max;
            p[ax] = (c == 1) ? 0.5 * (lo + hi)
                             : lo + (hi - lo) * static_cast<double>(k) /
                                        static_cast<double>(c - 1);
        }
        grid.points.push_back(std::move(p));
    }
    return grid;
}

/// Hankel singular values over a parameter grid. Unstable grid points are
/// flagged and excluded; the max in lower_bound runs over the stable ones.
struct SweepResult {
    std::vector<Vector> points;
    std::vector<Vector> sigma_table;   // empty at excluded points
    std::vector<bool> stable;
    std::vector<Index> axis_counts;    // empty when the grid is an explicit list
    Index state_dim = 0;

    Index stable_count() const {
        return static_cast<Index>(std::count(stable.begin(), stable.end(), true));
    }

    /// max over the grid of sigma_{n+1}(Sigma(p)); sigma_{N+1} := 0.
    double lower_bound(Index n) const {
        double best = -1.0;
        for (size_t k = 0; k < points.size(); ++k) {
            if (!stable[k])
                continue;
            const double v = n < sigma_table[k].size() ? sigma_table[k][n] : 0.0;
            best = std::max(best, v);
        }
        if (best < 0.0)
            throw AllPointsUnstable("lower_bound: no stable grid points");
        return best;
    }

    Index argmax_index(Index n) const {
        Index arg = -1;
        double best = -1.0;
        for (size_t k = 0; k < points.size(); ++k) {
            if (!stable[k])
                continue;
            const double v = n < sigma_table[k].size() ? sigma_table[k][n] : 0.0;
            if (v > best) {
                best = v;
                arg = static_cast<Index>(k);
            }
        }
        if (arg < 0)
            throw AllPointsUnstable("argmax_index: no stable grid points");
        return arg;
    }
};

inline SweepResult sweep(const ParametricLtiSystem& psys, const ParameterGrid& grid,
                         const Tolerances& tol = default_tolerances()) {
    SweepResult res;
    res.points = grid.points;
    res.axis_counts = grid.axis_counts;
    res.state_dim = psys.base.A.rows();
    const Index total = static_cast<Index>(grid.points.size());
    if (total == 0)
        throw BadParameter("sweep: empty grid");
    res.sigma_table.resize(total);
    res.stable.assign(total, false);
    std::vector<char> ok(total, 0);
    parallel_for(total, [&](std::int64_t k) {
        const LtiSystem sys = instantiate(psys, grid.points[k]);
        if (is_stable(sys, tol)) {
            res.sigma_table[k] = hankel_spectrum(sys, tol).sigma;
            ok[k] = 1;
        }
    });
    for (Index k = 0; k < total; ++k)
        res.stable[k] = ok[k] != 0;
    if (res.stable_count() == 0)
        throw AllPointsUnstable("sweep: every grid point is unstable");
    return res;
}

/// Adjacent-jump diagnostic for sigma_i along the grid axes. Jumps are
/// measured relative to the local sigma scale; a jump more than 10x the
/// median jump is flagged as a suspected discontinuity or crossing.
struct ContinuityReport {
    Index sigma_index = 0;            // 1-based
    double max_jump = 0.0;            // relative to local scale
    double median_jump = 0.0;
    std::vector<std::pair<Index, Index>> flagged;   // flat point index pairs
};

inline ContinuityReport continuity_check(const SweepResult& res, Index i) {
    if (i < 1 || i > res.state_dim)
        throw IndexOutOfRange("continuity_check: sigma index out of range");
    ContinuityReport rep;
    rep.sigma_index = i;

    std::vector<Index> counts = res.axis_counts;
    if (counts.empty())
        counts = {static_cast<Index>(res.points.size())};
    std::vector<Index> strides(counts.size(), 1);
    for (size_t ax = counts.size() - 1; ax-- > 0;)
        strides[ax] = strides[ax + 1] * counts[ax + 1];

    std::vector<double> jumps;
    std::vector<std::pair<Index, Index>> pairs;
    const Index total = static_cast<Index>(res.points.size());
    for (size_t ax = 0; ax < counts.size(); ++ax) {
        for (Index flat = 0; flat < total; ++flat) {
            const Index k = (flat / strides[ax]) % counts[ax];
            if (k + 1 >= counts[ax])
                continue;
            const Index next = flat + strides[ax];
            if (!res.stable[flat] || !res.stable[next])
                continue;
            const double a = res.sigma_table[flat][i - 1];
            const double b = res.sigma_table[next][i - 1];
            const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
            jumps.push_back(std::abs(b - a) / scale);
            pairs.emplace_back(flat, next);
        }
    }
    if (jumps.empty())
        return rep;
    std::vector<double> sorted = jumps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    rep.median_jump = sorted[sorted.size() / 2];
    rep.max_jump = *std::max_element(jumps.begin(), jumps.end());
    for (size_t j = 0; j < jumps.size(); ++j)
        if (jumps[j] > 10.0 * rep.median_jump)
            rep.flagged.push_back(pairs[j]);
    return rep;
}

/// Outcome of the global-basis experiment: with one non-parametric output
/// basis for the whole family, the best achievable worst-case error is
/// bounded below by max_p sigma_{n+1}(Sigma(p)).
struct GlobalBasisReport {
    Index n = 0;
    double lower_bound = 0.0;
    double achieved_pod = 0.0;     // pooled-SVD basis
    double achieved_best = 0.0;    // min over POD + random candidates
    Index candidates = 0;
    bool bound_respected = false;  // achieved_best >= lower_bound - slack
    double slack = 0.0;
};

/// Builds candidate global output bases over the pooled Schmidt functions of
/// all grid points and evaluates their sup-over-grid worst-case error.
///
/// Inner products between Schmidt functions of different parameter values
/// are exact via the cross-observability Sylvester equation
///   A(p)^T X + X A(p') + C(p)^T C(p') = 0,   <g_i(p), g_j(p')> = v_i^T X v_j,
/// so no time grids enter. The pooled-SVD ("POD") basis maximizes captured
/// sigma-weighted energy in the pooled span; it is a heuristic, which is all
/// the lower-bound direction of the theorem needs.
inline GlobalBasisReport global_basis_gap(const ParametricLtiSystem& psys, Index n,
                                          const ParameterGrid& grid, Index probes = 8,
                                          std::uint64_t seed = 42,
                                          const Tolerances& tol = default_tolerances()) {
    if (n < 0)
        throw BadOrder("global_basis_gap: order must be nonnegative");
    const Index total = static_cast<Index>(grid.points.size());
    if (total == 0)
        throw BadParameter("global_basis_gap: empty grid");

    std::vector<LtiSystem> systems;
    std::vector<HankelSpectrum> spectra;
    systems.reserve(total);
    for (Index k = 0; k < total; ++k) {
        LtiSystem sys = instantiate(psys, grid.points[k]);
        if (is_stable(sys, tol))
            systems.push_back(std::move(sys));
    }
    if (systems.empty())
        throw AllPointsUnstable("global_basis_gap: every grid point is unstable");
    const Index pts = static_cast<Index>(systems.size());
    spectra.reserve(pts);
    for (const auto& sys : systems)
        spectra.push_back(hankel_spectrum(sys, tol));

    const Index dim = spectra[0].sigma.size();
    GlobalBasisReport rep;
    rep.n = n;
    double max_sigma1 = 0.0;
    for (const auto& s : spectra) {
        max_sigma1 = std::max(max_sigma1, s.sigma.size() ? s.sigma[0] : 0.0);
        rep.lower_bound = std::max(rep.lower_bound, sigma_ref(s, n));
    }
    rep.slack = tol.width_slack_rel * max_sigma1;

    // Gram matrix of the pooled dictionary {g_i(p_k)}.
    const Index big = pts * dim;
    Matrix gram(big, big);
    for (Index k = 0; k < pts; ++k) {
        for (Index l = k; l < pts; ++l) {
            const Matrix x =
                (l == k) ? spectra[k].gram.Q
                         : sylvester(Matrix(systems[k].A.transpose()), systems[l].A,
                                     Matrix(systems[k].C.transpose() * systems[l].C), tol);
            const Matrix block = spectra[k].V.transpose() * x * spectra[l].V;
            gram.block(k * dim, l * dim, dim, dim) = block;
            if (l != k)
                gram.block(l * dim, k * dim, dim, dim) = block.transpose();
        }
    }
    gram = 0.5 * (gram + gram.transpose()).eval();

    // Orthonormal coordinates on the pooled span: Gram = E E^T with E cut at
    // the numerical rank.
    const SymmetricEig gdec = symmetric_eig(gram, tol);
    const double gtop = std::max(gdec.values[0], 0.0);
    Index grank = 0;
    while (grank < big && gdec.values[grank] > 1e-12 * gtop)
        ++grank;
    Matrix e(big, grank);
    for (Index j = 0; j < grank; ++j)
        e.col(j) = gdec.vectors.col(j) * std::sqrt(gdec.values[j]);

    // sigma-weighted correlation in those coordinates; its top eigenvectors
    // are the POD basis.
    Vector wts(big);
    for (Index k = 0; k < pts; ++k)
        wts.segment(k * dim, dim) = spectra[k].sigma;
    const Vector wts2 = wts.array().square();
    const Matrix corr = e.transpose() * wts2.asDiagonal() * e;
    const SymmetricEig cdec = symmetric_eig(Matrix(0.5 * (corr + corr.transpose())), tol);

    const Index nb = std::min(n, grank);
    auto achieved = [&](const Matrix& zbasis) {
        double worst = 0.0;
        for (Index k = 0; k < pts; ++k) {
            const Matrix coords = e.middleRows(k * dim, dim) * zbasis;
            worst = std::max(worst, worst_error_output_raw(spectra[k], coords, tol));
        }
        return worst;
    };

    rep.achieved_pod = achieved(cdec.vectors.leftCols(nb));
    rep.achieved_best = rep.achieved_pod;
    rep.candidates = 1;
    for (Index t = 0; t < probes; ++t) {
        Matrix z = detail::random_directions(grank, nb, split_seed(seed, t));
        if (nb > 0) {
            Eigen::HouseholderQR<Matrix> qr(z);
            z = qr.householderQ() * Matrix::Identity(grank, nb);
        }
        rep.achieved_best = std::min(rep.achieved_best, achieved(z));
        ++rep.candidates;
    }
    rep.bound_respected = rep.achieved_best >= rep.lower_bound - rep.slack;
    return rep;
}

} // namespace hwidths
