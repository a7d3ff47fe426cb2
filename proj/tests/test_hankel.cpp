#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hwidths/generators.hpp"
#include "hwidths/hankel.hpp"

using namespace hwidths;

namespace {

LtiSystem one_state() {
    return diag_system({-1.0}, {1.0}, {1.0});
}

LtiSystem two_state() {
    return diag_system({-1.0, -2.0}, {1.0, 1.0}, {1.0, 1.0});
}

// closed form for the 2-state example: eigenvalues of [[1/2,1/3],[1/3,1/4]]
const double kSigma1 = 3.0 / 8.0 + std::sqrt(73.0) / 24.0;
const double kSigma2 = 3.0 / 8.0 - std::sqrt(73.0) / 24.0;

} // namespace

TEST_CASE("closed-form Hankel singular values", "[hankel]") {
    const HankelSpectrum one = hankel_spectrum(one_state());
    REQUIRE(one.sigma.size() == 1);
    CHECK(std::abs(one.sigma[0] - 0.5) <= 1e-12);

    const HankelSpectrum two = hankel_spectrum(two_state());
    REQUIRE(two.sigma.size() == 2);
    CHECK(std::abs(two.sigma[0] - kSigma1) <= 1e-10);
    CHECK(std::abs(two.sigma[1] - kSigma2) <= 1e-10);
}

TEST_CASE("zero B gives a zero spectrum", "[hankel]") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const LtiSystem sys(a, Matrix::Zero(2, 1), Matrix::Ones(1, 2));
    const HankelSpectrum spec = hankel_spectrum(sys);
    CHECK(spec.sigma.maxCoeff() == 0.0);
    CHECK(spec.rank == 0);
    // the completion still spans R^N
    CHECK(std::abs(spec.V.determinant()) > 1e-8);
}

TEST_CASE("spectrum invariants on a random system", "[hankel]") {
    const LtiSystem sys = random_stable(9, 13, 2, 2);
    const HankelSpectrum spec = hankel_spectrum(sys);
    const double sigma1 = spec.sigma[0];
    for (Index i = 0; i + 1 < spec.sigma.size(); ++i)
        CHECK(spec.sigma[i] >= spec.sigma[i + 1]);
    CHECK(spec.sigma.minCoeff() >= 0.0);

    const Matrix pq = spec.gram.P * spec.gram.Q;
    for (Index i = 0; i < spec.rank; ++i) {
        if (spec.sigma[i] < spec.cert_floor)
            break;
        const Vector v = spec.V.col(i);
        const double s2 = spec.sigma[i] * spec.sigma[i];
        CHECK((pq * v - s2 * v).norm() <= 1e-8 * sigma1 * sigma1 * v.norm());
        for (Index j = 0; j < spec.rank; ++j) {
            if (i == j)
                CHECK(g_inner(spec, i + 1, j + 1) == Catch::Approx(1.0).margin(1e-8));
            else if (std::abs(spec.sigma[i] - spec.sigma[j]) > 1e-8 * sigma1)
                CHECK(std::abs(g_inner(spec, i + 1, j + 1)) <= 1e-8);
        }
    }
}

TEST_CASE("hankel norm", "[hankel]") {
    CHECK(hankel_norm(one_state()) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(hankel_norm(two_state()) == Catch::Approx(kSigma1).epsilon(1e-10));

    const LtiSystem sys = random_stable(5, 2);
    const double scale = hankel_norm(sys);
    CHECK(hankel_norm(error_system(sys, sys)) <= 1e-10 * scale);
}

TEST_CASE("adjoint has identical singular values", "[hankel]") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const LtiSystem sys = random_stable(20, seed);
        const HankelSpectrum spec = hankel_spectrum(sys);
        const HankelSpectrum spec_adj = hankel_spectrum(adjoint(sys));
        CHECK((spec.sigma - spec_adj.sigma).cwiseAbs().maxCoeff() <= 1e-10 * spec.sigma[0]);
    }
}

TEST_CASE("schmidt pair of the 1-state example is sqrt(2) e^{-t}", "[hankel]") {
    const HankelSpectrum spec = hankel_spectrum(one_state());
    const SingularFunctionEvaluator ev = schmidt_pair(spec, 1);
    for (double t : {0.0, 0.5, 1.0, 3.0}) {
        CHECK(ev.g(t)[0] == Catch::Approx(std::sqrt(2.0) * std::exp(-t)).epsilon(1e-10));
    }
    // f lives on the past half-axis; for this self-adjoint example
    // f(s) = sqrt(2) e^{s}
    for (double s : {0.0, -0.5, -2.0}) {
        CHECK(ev.f(s)[0] == Catch::Approx(std::sqrt(2.0) * std::exp(s)).epsilon(1e-10));
    }
    CHECK(g_inner(spec, 1, 1) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("gramian-identity inner products match quadrature", "[hankel]") {
    const LtiSystem sys = two_state();
    const HankelSpectrum spec = hankel_spectrum(sys);
    const double horizon = std::log(1e12) / std::abs(spectral_abscissa(sys));
    const QuadratureRule rule = graded_panels(horizon, 10, 16);

    for (Index i = 1; i <= 2; ++i) {
        const SingularFunctionEvaluator gi = schmidt_pair(spec, i);
        for (Index j = i; j <= 2; ++j) {
            const SingularFunctionEvaluator gj = schmidt_pair(spec, j);
            double quad_g = 0.0, quad_f = 0.0;
            for (size_t k = 0; k < rule.nodes.size(); ++k) {
                quad_g += rule.weights[k] * gi.g(rule.nodes[k]).dot(gj.g(rule.nodes[k]));
                quad_f += rule.weights[k] * gi.f(-rule.nodes[k]).dot(gj.f(-rule.nodes[k]));
            }
            CHECK(std::abs(quad_g - g_inner(spec, i, j)) <= 1e-6);
            CHECK(std::abs(quad_f - f_inner(spec, i, j)) <= 1e-6);
        }
    }
}

TEST_CASE("applying the controllability map to f_i", "[hankel]") {
    const HankelSpectrum one = hankel_spectrum(one_state());
    const HankelApplication rec = apply_hankel_to_f(one, 1);
    CHECK((rec.image_coeffs - 0.5 * one.V.col(0)).norm() <= 1e-12);
    CHECK(rec.defect <= 1e-8);

    // The defect normalizes by sigma_i^2, so it is certifiable only above
    // the noise floor eps * sigma_1^2 / sigma_i^2 <= 1e-8.
    const LtiSystem sys = random_stable(8, 23);
    const HankelSpectrum spec = hankel_spectrum(sys);
    for (Index i = 1; i <= spec.rank; ++i) {
        if (spec.sigma[i - 1] < 1e-2 * spec.sigma[0])
            continue;
        CHECK(apply_hankel_to_f(spec, i).defect <= 1e-8);
    }

    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const LtiSystem nob(a, Matrix::Zero(2, 1), Matrix::Ones(1, 2));
    const HankelSpectrum zero_spec = hankel_spectrum(nob);
    CHECK_THROWS_AS(apply_hankel_to_f(zero_spec, 1), ZeroSingularValue);
    CHECK_THROWS_AS(schmidt_pair(zero_spec, 5), IndexOutOfRange);
}

TEST_CASE("discretized operator reproduces the 1-state singular value", "[hankel]") {
    const DiscretizedHankel disc = discretize(one_state(), 8, 12);
    const Vector sv = disc.singular_values();
    CHECK(std::abs(sv[0] - 0.5) <= 5e-4);
}

TEST_CASE("discretized operator has effective rank N", "[hankel]") {
    const LtiSystem sys = two_state();
    const DiscretizedHankel disc = discretize(sys, 8, 12);
    const Vector sv = disc.singular_values();
    CHECK(sv[2] / sv[0] <= 1e-8);
}

TEST_CASE("zero C gives a zero discretization", "[hankel]") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const LtiSystem sys(a, Matrix::Ones(2, 1), Matrix::Zero(1, 2));
    CHECK(discretize(sys, 8, 12).M.norm() == 0.0);
}

TEST_CASE("analytic sigma matches the discretized operator over a sample corpus",
          "[hankel]") {
    for (std::uint64_t seed : {4, 5}) {
        const LtiSystem sys = random_stable(6, seed);
        const HankelSpectrum spec = hankel_spectrum(sys);
        const Vector coarse = discretize(sys, 8, 12).singular_values();
        const Vector fine = discretize(sys, 12, 18).singular_values();
        double gap_coarse = 0.0, gap_fine = 0.0;
        for (Index i = 0; i < std::min<Index>(5, spec.sigma.size()); ++i) {
            const double rc = std::abs(coarse[i] - spec.sigma[i]) / spec.sigma[i];
            const double rf = std::abs(fine[i] - spec.sigma[i]) / spec.sigma[i];
            CHECK(rc <= 1e-3);
            gap_coarse = std::max(gap_coarse, rc);
            gap_fine = std::max(gap_fine, rf);
        }
        // refining the grid does not widen the gap, until both sit at the
        // roundoff floor
        CHECK(gap_fine <= std::max(gap_coarse, 1e-8));
    }
}

TEST_CASE("derived singular functions agree with the discretized-operator SVD",
          "[hankel]") {
    // certification of the f/g closed forms: sampled g_i and f_i against the
    // left/right singular vectors of the quadrature matrix
    const LtiSystem sys = two_state();
    const HankelSpectrum spec = hankel_spectrum(sys);
    const DiscretizedHankel disc = discretize(sys, 10, 14);
    const SvdResult dec = svd(disc.M);
    const Index k = static_cast<Index>(disc.nodes.size());

    for (Index i = 1; i <= 2; ++i) {
        const SingularFunctionEvaluator ev = schmidt_pair(spec, i);
        Vector g_sampled(k), f_sampled(k);
        for (Index j = 0; j < k; ++j) {
            const double w = std::sqrt(disc.weights[j]);
            g_sampled[j] = w * ev.g(disc.nodes[j])[0];
            f_sampled[j] = w * ev.f(-disc.nodes[j])[0];
        }
        g_sampled.normalize();
        f_sampled.normalize();
        const double cos_g = std::abs(g_sampled.dot(dec.U.col(i - 1)));
        const double cos_f = std::abs(f_sampled.dot(dec.V.col(i - 1)));
        CHECK(std::acos(std::min(cos_g, 1.0)) <= 1e-3);
        CHECK(std::acos(std::min(cos_f, 1.0)) <= 1e-3);
    }
}

TEST_CASE("unstable systems are rejected by spectrum and discretization", "[hankel]") {
    Matrix a(1, 1);
    a(0, 0) = 0.1;
    const LtiSystem unstable(a, Matrix::Ones(1, 1), Matrix::Ones(1, 1));
    CHECK_THROWS_AS(hankel_spectrum(unstable), Unstable);
    CHECK_THROWS_AS(discretize(unstable, 8, 12), Unstable);
    CHECK_THROWS_AS(discretize(one_state(), 0, 12), BadParameter);
}
