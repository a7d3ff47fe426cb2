#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hwidths/generators.hpp"
#include "hwidths/reduction.hpp"
#include "hwidths/widths.hpp"

using namespace hwidths;

namespace {

LtiSystem two_state() {
    return diag_system({-1.0, -2.0}, {1.0, 1.0}, {1.0, 1.0});
}

const double kSigma1 = 3.0 / 8.0 + std::sqrt(73.0) / 24.0;
const double kSigma2 = 3.0 / 8.0 - std::sqrt(73.0) / 24.0;

/// MIMO system that is balanced by construction: decoupled modes with
/// matched input/output weights, sigma_i = b_i^2 / (2 |lambda_i|).
LtiSystem balanced_diag() {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    Matrix b = Matrix::Zero(2, 2);
    b(0, 0) = std::sqrt(2.0);
    b(1, 1) = std::sqrt(2.0);
    return LtiSystem(a, b, b.transpose());
}

} // namespace

TEST_CASE("ordered schur puts stable eigenvalues first", "[reduction]") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + static_cast<Index>(rng() % 7);
        Matrix m(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                m(i, j) = gauss(rng);
        // shift to get a genuinely mixed spectrum
        const detail::OrderedSchur os = detail::ordered_schur_stable_first(
            m, default_tolerances());
        REQUIRE((os.Q * os.T * os.Q.transpose() - m).norm() <= 1e-10 * std::max(m.norm(), 1.0));
        REQUIRE((os.Q.transpose() * os.Q - Matrix::Identity(n, n)).norm() <= 1e-12 * n);
        const auto re = detail::schur_eigen_real_parts(os.T);
        Index stable_seen = 0;
        for (size_t i = 0; i < re.size(); ++i)
            if (re[i] < 0.0) {
                CHECK(static_cast<Index>(i) == stable_seen);   // stable block is leading
                ++stable_seen;
            }
        CHECK(stable_seen == os.stable_count);
    }
}

TEST_CASE("balance of an already balanced system", "[reduction]") {
    const BalancedRealization bal = balance(balanced_diag());
    REQUIRE(bal.sigma.size() == 2);
    CHECK(bal.sigma[0] == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(bal.sigma[1] == Catch::Approx(0.5).epsilon(1e-10));
    CHECK_FALSE(bal.pre_truncated);
    // T within column sign of the identity
    for (Index j = 0; j < 2; ++j) {
        const double plus = (bal.T.col(j) - Matrix::Identity(2, 2).col(j)).norm();
        const double minus = (bal.T.col(j) + Matrix::Identity(2, 2).col(j)).norm();
        CHECK(std::min(plus, minus) <= 1e-8);
    }
}

TEST_CASE("balance of the 2-state example", "[reduction]") {
    const BalancedRealization bal = balance(two_state());
    CHECK(bal.sigma[0] == Catch::Approx(kSigma1).epsilon(1e-10));
    CHECK(bal.sigma[1] == Catch::Approx(kSigma2).epsilon(1e-10));
    CHECK((bal.Tinv * bal.T - Matrix::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("balanced Gramians equal diag(sigma)", "[reduction]") {
    const LtiSystem sys = random_stable(10, 31);
    const BalancedRealization bal = balance(sys);
    const GramianPair g = gramians(bal.sys);
    const Matrix expected = bal.sigma.asDiagonal();
    CHECK((g.P - expected).norm() <= 1e-8 * expected.norm());
    CHECK((g.Q - expected).norm() <= 1e-8 * expected.norm());
    CHECK((bal.Tinv * bal.T - Matrix::Identity(bal.sigma.size(), bal.sigma.size()))
              .norm() <= 1e-10);
}

TEST_CASE("balance pre-truncates non-minimal states", "[reduction]") {
    const LtiSystem sys = diag_system({-1.0, -2.0}, {1.0, 0.0}, {1.0, 1.0});
    const BalancedRealization bal = balance(sys);
    CHECK(bal.pre_truncated);
    CHECK(bal.sigma.size() == 1);
    CHECK(bal.sys.order() == 1);

    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const LtiSystem zero_sys(a, Matrix::Zero(2, 1), Matrix::Ones(1, 2));
    CHECK_THROWS_AS(balance(zero_sys), NearNonMinimal);
}

TEST_CASE("balanced truncation error sandwich on the 2-state example", "[reduction]") {
    const LtiSystem sys = two_state();
    ReducedModel red = balanced_truncation(sys, 1);
    CHECK(red.order == 1);
    red.achieved_error = hankel_error(sys, red);
    CHECK(red.achieved_error >= kSigma2 - 1e-10);
    CHECK(red.achieved_error <= 2.0 * kSigma2 + 1e-10);
    CHECK(is_stable(red.system));
}

TEST_CASE("balanced truncation preserves leading balanced structure", "[reduction]") {
    const LtiSystem sys = balanced_diag();
    const ReducedModel red = balanced_truncation(sys, 1);
    const HankelSpectrum spec = hankel_spectrum(red.system);
    CHECK(spec.sigma[0] == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("balanced truncation order handling", "[reduction]") {
    CHECK_THROWS_AS(balanced_truncation(two_state(), 0), BadOrder);

    // truncating nothing: n = minimal order
    const LtiSystem nonmin = diag_system({-1.0, -2.0}, {1.0, 0.0}, {1.0, 1.0});
    const ReducedModel full = balanced_truncation(nonmin, 1);
    CHECK(hankel_error(nonmin, full) <= 1e-8);

    // exact multiplicity: no gap anywhere at or below n = 1
    const LtiSystem twin(-Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                         Matrix::Identity(2, 2));
    CHECK_THROWS_AS(balanced_truncation(twin, 1), BadOrder);
}

TEST_CASE("optimal Hankel norm approximation attains sigma_{n+1}", "[reduction]") {
    const LtiSystem sys = two_state();
    ReducedModel red = optimal_hankel(sys, 1);
    CHECK(red.order == 1);
    red.achieved_error = hankel_error(sys, red);
    CHECK(red.achieved_error == Catch::Approx(kSigma2).epsilon(1e-6));
    CHECK(is_stable(red.system));
    // the feedthrough correction D - sigma U is part of the construction
    CHECK(red.system.D.norm() > 0.0);
}

TEST_CASE("optimal Hankel handles n = N and bad orders", "[reduction]") {
    const LtiSystem sys = two_state();
    const ReducedModel copy = optimal_hankel(sys, 2);
    CHECK(copy.order == 2);
    CHECK(hankel_error(sys, copy) <= 1e-10);
    CHECK_THROWS_AS(optimal_hankel(sys, 0), BadOrder);

    const LtiSystem twin(-Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                         Matrix::Identity(2, 2));
    CHECK_THROWS_AS(optimal_hankel(twin, 1), BadOrder);
}

TEST_CASE("optimal vs balanced truncation over a sample corpus", "[reduction]") {
    for (std::uint64_t seed : {3, 4}) {
        for (Index channels : {Index(1), Index(2)}) {
            const LtiSystem sys = random_stable(6, seed, channels, channels);
            const HankelSpectrum spec = hankel_spectrum(sys);
            for (Index k = 1; k < 6; ++k) {
                const double next = sigma_ref(spec, k);
                const double gap = spec.sigma[k - 1] - next;
                if (gap < 1e-8 * spec.sigma[0] || next < 1e-8 * spec.sigma[0])
                    continue;
                const ReducedModel oh = optimal_hankel(sys, k);
                const ReducedModel bt = balanced_truncation(sys, k);
                const double oh_err = hankel_error(sys, oh);
                const double bt_err = hankel_error(sys, bt);
                CHECK(std::abs(oh_err - next) <= 1e-6 * next);
                CHECK(oh_err <= bt_err + 1e-10 * spec.sigma[0]);
                CHECK(bt_err <= 2.0 * spec.sigma.tail(6 - k).sum() + 1e-10);
            }
        }
    }
}

TEST_CASE("non-square systems go through zero-channel padding", "[reduction]") {
    const LtiSystem sys = random_stable(5, 17, 2, 1);   // 2 inputs, 1 output
    const HankelSpectrum spec = hankel_spectrum(sys);
    const ReducedModel red = optimal_hankel(sys, 2);
    CHECK(red.system.inputs() == 2);
    CHECK(red.system.outputs() == 1);
    const double err = hankel_error(sys, red);
    CHECK(std::abs(err - sigma_ref(spec, 2)) <= 1e-6 * sigma_ref(spec, 2));
}

TEST_CASE("no random perturbation of the optimal model does better", "[reduction]") {
    const LtiSystem sys = random_stable(6, 41);
    const HankelSpectrum spec = hankel_spectrum(sys);
    const Index n = 2;
    const ReducedModel red = optimal_hankel(sys, n);
    const double opt_err = hankel_error(sys, red);
    CHECK(std::abs(opt_err - sigma_ref(spec, n)) <= 1e-6 * sigma_ref(spec, n));

    std::mt19937_64 rng(4242);
    std::normal_distribution<double> gauss;
    int tested = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double delta = std::pow(10.0, -1.0 - (trial % 3));
        LtiSystem pert = red.system;
        auto jiggle = [&](Matrix& m) {
            for (Index i = 0; i < m.rows(); ++i)
                for (Index j = 0; j < m.cols(); ++j)
                    m(i, j) += delta * gauss(rng) * std::max(m.norm(), 1e-3);
        };
        jiggle(pert.A);
        jiggle(pert.B);
        jiggle(pert.C);
        if (!is_stable(pert))
            continue;
        ++tested;
        const double err = hankel_norm(error_system(sys, pert));
        CHECK(err >= opt_err - 1e-8);
    }
    CHECK(tested > 100);
}
