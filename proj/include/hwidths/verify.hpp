#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwidths/generators.hpp"
#include "hwidths/io.hpp"
#include "hwidths/parametric.hpp"
#include "hwidths/reduction.hpp"
#include "hwidths/widths.hpp"

namespace hwidths::verify {

struct Check {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct SystemReport {
    std::string name;
    Index order = 0;
    std::vector<Check> checks;
    std::string error;   // nonempty when the battery aborted
};

struct NamedSystem {
    std::string name;
    LtiSystem sys;
};

/// The seeded benchmark corpus every "corpus" claim refers to: sizes
/// {2, 5, 10, 20}, five seeds each; seeds 4 and 5 are two-input/two-output.
inline std::vector<NamedSystem> default_corpus() {
    std::vector<NamedSystem> corpus;
    for (Index n : {2, 5, 10, 20}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Index channels = seed >= 4 ? 2 : 1;
            corpus.push_back({"random_stable_N" + std::to_string(n) + "_seed" +
                                  std::to_string(seed),
                              random_stable(n, seed, channels, channels)});
        }
    }
    return corpus;
}

namespace detail_v {

inline void add(std::vector<Check>& checks, const std::string& name, double measured,
                double threshold) {
    checks.push_back({name, measured <= threshold, measured, threshold});
}

/// Orders n of interest for reduction/width checks: 1, N/2, N-1, deduped.
inline std::vector<Index> probe_orders(Index n) {
    std::vector<Index> orders;
    for (Index k : {Index(1), n / 2, n - 1})
        if (k >= 1 && k < n && (orders.empty() || orders.back() != k))
            orders.push_back(k);
    return orders;
}

} // namespace detail_v

/// Full invariant battery for one system. `probes` scales the random
/// subspace sampling (the acceptance suite uses 1e4; the CLI default is
/// lighter).
inline SystemReport run_battery(const std::string& name, const LtiSystem& sys,
                                Index probes = 500, std::uint64_t seed = 42,
                                const Tolerances& tol = default_tolerances()) {
    SystemReport rep;
    rep.name = name;
    rep.order = sys.order();
    auto& checks = rep.checks;
    try {
        const Index n = sys.order();
        const GramianPair g = gramians(sys, tol);
        detail_v::add(checks, "lyapunov_residual_P", g.residP, tol.lyap_residual);
        detail_v::add(checks, "lyapunov_residual_Q", g.residQ, tol.lyap_residual);

        const double min_eig_p = symmetric_eig(g.P, tol).values.minCoeff();
        const double min_eig_q = symmetric_eig(g.Q, tol).values.minCoeff();
        const double psd_floor_p = tol.psd_clip * std::max(g.P.norm(), 1e-300);
        const double psd_floor_q = tol.psd_clip * std::max(g.Q.norm(), 1e-300);
        detail_v::add(checks, "gramian_P_psd", -min_eig_p, psd_floor_p);
        detail_v::add(checks, "gramian_Q_psd", -min_eig_q, psd_floor_q);

        const GramianPair gadj = gramians(adjoint(sys), tol);
        detail_v::add(checks, "gramian_duality",
                      (gadj.P - g.Q).norm() / std::max(g.Q.norm(), 1e-300),
                      tol.lyap_residual);

        const HankelSpectrum spec = hankel_spectrum(sys, tol);
        const double sigma1 = spec.sigma.size() ? spec.sigma[0] : 0.0;

        double order_violation = 0.0;
        for (Index i = 0; i + 1 < n; ++i)
            order_violation = std::max(order_violation, spec.sigma[i + 1] - spec.sigma[i]);
        detail_v::add(checks, "sigma_nonincreasing", order_violation, 0.0);

        const Matrix pq = spec.gram.P * spec.gram.Q;
        const double cert_floor = spec.cert_floor;
        double schmidt_resid = 0.0;
        double qorth = 0.0;
        for (Index i = 0; i < spec.rank; ++i) {
            if (spec.sigma[i] < cert_floor)
                break;
            const Vector v = spec.V.col(i);
            const double s2 = spec.sigma[i] * spec.sigma[i];
            schmidt_resid = std::max(schmidt_resid, (pq * v - s2 * v).norm() /
                                                        (sigma1 * sigma1 * v.norm()));
            for (Index j = 0; j < spec.rank; ++j) {
                if (std::abs(spec.sigma[i] - spec.sigma[j]) < tol.cluster_rel * sigma1 &&
                    i != j)
                    continue;
                const double want = i == j ? 1.0 : 0.0;
                qorth = std::max(qorth, std::abs(g_inner(spec, i + 1, j + 1) - want));
            }
        }
        detail_v::add(checks, "schmidt_residual", schmidt_resid, tol.schmidt_residual);
        detail_v::add(checks, "schmidt_q_orthonormal", qorth, tol.schmidt_residual);

        const HankelSpectrum spec_adj = hankel_spectrum(adjoint(sys), tol);
        detail_v::add(checks, "adjoint_sigma_agreement",
                      (spec.sigma - spec_adj.sigma).cwiseAbs().maxCoeff(), 1e-10 * sigma1);

        double attain_gap = 0.0;
        for (Index k = 0; k <= n; ++k) {
            const SubspaceCoords greedy(Matrix::Identity(n, n).leftCols(k), Side::output);
            attain_gap = std::max(attain_gap, std::abs(worst_error_output(spec, greedy, tol) -
                                                       sigma_ref(spec, k)));
        }
        detail_v::add(checks, "greedy_attainment", attain_gap, tol.attain_rel * sigma1);

        double probe_violation = 0.0;
        double io_symmetry = 0.0;
        for (Index k : detail_v::probe_orders(n)) {
            const WidthReport out = nwidth(spec, k, probes, seed, tol);
            const WidthReport in = active_subspace(spec, k, probes, seed, tol);
            probe_violation = std::max(probe_violation, out.sigma_next - out.probe_min);
            probe_violation = std::max(probe_violation, in.sigma_next - in.probe_min);
            io_symmetry = std::max(io_symmetry, std::abs(out.error - in.error));
        }
        detail_v::add(checks, "lower_bound_probes", probe_violation,
                      tol.width_slack_rel * sigma1);
        detail_v::add(checks, "input_output_symmetry", io_symmetry, tol.attain_rel * sigma1);

        double max_angle = 0.0;
        for (Index k : detail_v::probe_orders(n)) {
            if (k >= spec.rank)
                continue;
            const double lambda_gap =
                spec.sigma[k - 1] * spec.sigma[k - 1] - spec.sigma[k] * spec.sigma[k];
            if (lambda_gap < tol.cluster_rel * sigma1 * sigma1)
                continue;
            max_angle = std::max(max_angle, duality_check(sys, k, tol).max_angle);
        }
        detail_v::add(checks, "duality_angles", max_angle, tol.angle_tol);

        const BalancedRealization bal = balance(sys, tol);
        const Index r = bal.sigma.size();
        const GramianPair gbal = gramians(bal.sys, tol);
        const Matrix sig_diag = bal.sigma.asDiagonal();
        const double bal_dev =
            std::max((gbal.P - sig_diag).norm(), (gbal.Q - sig_diag).norm()) /
            std::max(sig_diag.norm(), 1e-300);
        detail_v::add(checks, "balanced_gramians", bal_dev, 1e-8);
        detail_v::add(checks, "balance_inverse",
                      (bal.Tinv * bal.T - Matrix::Identity(r, r)).norm(), 1e-10);

        double ohna_dev = 0.0, ohna_vs_bt = 0.0, bt_sandwich = 0.0;
        for (Index k : detail_v::probe_orders(r)) {
            const double gap = bal.sigma[k - 1] - bal.sigma[k];
            const double next = bal.sigma[k];
            if (gap < tol.cluster_rel * sigma1)
                continue;
            const ReducedModel bt = balanced_truncation(sys, k, tol);
            const double bt_err = hankel_error(sys, bt, tol);
            double tail = 0.0;
            for (Index i = k; i < r; ++i)
                tail += bal.sigma[i];
            bt_sandwich = std::max(bt_sandwich, next - bt_err);
            bt_sandwich = std::max(bt_sandwich, bt_err - 2.0 * tail);
            if (next < tol.cluster_rel * sigma1)
                continue;
            const ReducedModel oh = optimal_hankel(sys, k, tol);
            const double oh_err = hankel_error(sys, oh, tol);
            ohna_dev = std::max(ohna_dev, std::abs(oh_err - next) / next);
            ohna_vs_bt = std::max(ohna_vs_bt, oh_err - bt_err);
        }
        detail_v::add(checks, "ohna_achieves_sigma", ohna_dev, tol.ohna_rel);
        detail_v::add(checks, "ohna_below_bt", ohna_vs_bt, 1e-10 * sigma1);
        detail_v::add(checks, "bt_error_sandwich", bt_sandwich, tol.width_slack_rel * sigma1);

        const DiscretizedHankel disc = discretize(sys, 8, 12, tol);
        const Vector dsv = disc.singular_values(tol);
        double disc_dev = 0.0;
        for (Index i = 0; i < std::min<Index>(n, 5); ++i)
            disc_dev = std::max(disc_dev, std::abs(dsv[i] - spec.sigma[i]) /
                                              std::max(spec.sigma[i], 1e-300));
        detail_v::add(checks, "discretized_operator_sigma", disc_dev, tol.discnorm_rel);
    } catch (const Error& err) {
        rep.error = err.what();
    }
    return rep;
}

inline json report_to_json(const std::vector<SystemReport>& reports, std::uint64_t seed,
                           Index probes) {
    json out;
    out["seed"] = seed;
    out["probes"] = probes;
    json systems = json::array();
    Index pass = 0, fail = 0, aborted = 0;
    for (const auto& rep : reports) {
        json checks = json::array();
        for (const auto& c : rep.checks) {
            checks.push_back(json{{"name", c.name},
                                  {"pass", c.pass},
                                  {"measured", c.measured},
                                  {"threshold", c.threshold}});
            (c.pass ? pass : fail) += 1;
        }
        json sj{{"name", rep.name}, {"order", rep.order}, {"checks", std::move(checks)}};
        if (!rep.error.empty()) {
            sj["error"] = rep.error;
            ++aborted;
        }
        systems.push_back(std::move(sj));
    }
    out["systems"] = std::move(systems);
    out["summary"] =
        json{{"pass", pass}, {"fail", fail}, {"aborted", aborted}, {"all_pass", fail == 0 && aborted == 0}};
    return out;
}

} // namespace hwidths::verify
