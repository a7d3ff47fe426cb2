#pragma once

namespace hwidths {

/// Global epsilon policy. Every quantified slack used by the library lives
/// here so that downstream theorem checks can state their tolerances
/// explicitly. Functions take a `const Tolerances&` defaulting to
/// `default_tolerances()`.
struct Tolerances {
    // linalg residual contracts (relative Frobenius)
    double schur_residual = 1e-12;   // per row, see real_schur
    double svd_residual = 1e-12;
    double eig_residual = 1e-12;
    double symmetry_check = 1e-10;   // symmetric_eig precondition
    double expm_accuracy = 1e-11;
    double solve_residual = 1e-11;
    double condition_limit = 1e14;   // solve() raises Singular above this
    int schur_sweeps_per_row = 30;

    // gramian
    double lyap_residual = 1e-10;
    double psd_clip = 1e-10;         // eigenvalues in [-psd_clip*||X||, 0) -> 0

    // system / stability
    double stability_margin = 1e-8;  // analysis requires abscissa < -margin

    // hankel
    double zero_sigma_rel = 1e-12;   // sigma below this * sigma1 counts as zero
    double schmidt_residual = 1e-8;  // ||PQ v - s^2 v|| / (sigma1^2 ||v||)
    double schmidt_cert_floor = 1e-4;  // residual certified for sigma >= this * sigma1;
                                       // below it sigma^2 sits under the eps*sigma1^2
                                       // noise floor of PQ and no double-precision
                                       // route can certify the vector
    double quadrature_rel = 1e-6;
    double discnorm_rel = 1e-3;      // discretized vs analytic sigma

    // widths
    double width_slack_rel = 1e-8;   // lower-bound slack, * sigma1
    double attain_rel = 1e-10;       // greedy attainment, * sigma1
    double angle_tol = 1e-6;         // duality principal angles
    double cluster_rel = 1e-8;       // sigma multiplicity clustering, * sigma1

    // reduction
    double minimality_rel = 1e-10;   // balance() pre-truncation threshold
    double ohna_rel = 1e-6;          // achieved error vs sigma_{n+1}
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

} // namespace hwidths
