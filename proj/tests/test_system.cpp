#include <catch2/catch_amalgamated.hpp>

#include "hwidths/generators.hpp"
#include "hwidths/system.hpp"

using namespace hwidths;

namespace {

LtiSystem two_state_example() {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    Matrix b = Matrix::Ones(2, 1);
    Matrix c = Matrix::Ones(1, 2);
    return LtiSystem(a, b, c);
}

} // namespace

TEST_CASE("spectral abscissa on closed forms", "[system]") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const LtiSystem sys(a, Matrix::Ones(2, 1), Matrix::Ones(1, 2));
    CHECK(spectral_abscissa(sys) == Catch::Approx(-1.0));

    const LtiSystem marginal(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
    CHECK(spectral_abscissa(marginal) == Catch::Approx(0.0).margin(1e-14));
    CHECK_FALSE(is_stable(marginal));

    CHECK(spectral_abscissa(rc_ladder(5)) < 0.0);
}

TEST_CASE("adjoint swaps B and C transposes and is an involution", "[system]") {
    const LtiSystem sys = two_state_example();
    const LtiSystem adj = adjoint(sys);
    CHECK((adj.A - sys.A.transpose()).norm() == 0.0);
    CHECK((adj.B - sys.C.transpose()).norm() == 0.0);
    CHECK((adj.C - sys.B.transpose()).norm() == 0.0);

    const LtiSystem twice = adjoint(adjoint(sys));
    CHECK((twice.A - sys.A).norm() == 0.0);
    CHECK((twice.B - sys.B).norm() == 0.0);
    CHECK((twice.C - sys.C).norm() == 0.0);
    CHECK((twice.D - sys.D).norm() == 0.0);

    // symmetric SISO realization is self-adjoint
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(0, 1) = 0.25;
    a(1, 0) = 0.25;
    a(1, 1) = -2.0;
    Matrix b(2, 1);
    b << 1.0, 2.0;
    const LtiSystem selfadj(a, b, b.transpose());
    const LtiSystem sadj = adjoint(selfadj);
    CHECK((sadj.A - selfadj.A).norm() == 0.0);
    CHECK((sadj.B - selfadj.B).norm() == 0.0);
    CHECK((sadj.C - selfadj.C).norm() == 0.0);
}

TEST_CASE("error_system shape and dimension checks", "[system]") {
    const LtiSystem s1 = random_stable(3, 1);
    const LtiSystem s2 = random_stable(4, 2);
    const LtiSystem diff = error_system(s1, s2);
    CHECK(diff.order() == 7);
    CHECK(diff.inputs() == 1);
    CHECK(diff.outputs() == 1);
    CHECK(diff.A.block(0, 3, 3, 4).norm() == 0.0);
    CHECK(diff.A.block(3, 0, 4, 3).norm() == 0.0);
    CHECK((diff.C.rightCols(4) + s2.C).norm() == 0.0);

    const LtiSystem mimo = random_stable(3, 1, 2, 2);
    CHECK_THROWS_AS(error_system(s1, mimo), DimensionMismatch);
}

TEST_CASE("instantiate is affine and clamps to the box", "[system]") {
    const ParametricLtiSystem family = heat1d(4);

    Vector p1(1), p2(1);
    p1 << 0.5;
    p2 << 7.0;
    for (double alpha : {0.0, 0.3, 1.0}) {
        const Vector mix = alpha * p1 + (1.0 - alpha) * p2;
        const LtiSystem lhs = instantiate(family, mix);
        const LtiSystem a = instantiate(family, p1);
        const LtiSystem b = instantiate(family, p2);
        CHECK((lhs.A - (alpha * a.A + (1.0 - alpha) * b.A)).norm() < 1e-12 * lhs.A.norm());
        CHECK((lhs.B - (alpha * a.B + (1.0 - alpha) * b.B)).norm() < 1e-12);
    }

    Vector outside(1);
    outside << 100.0;
    CHECK_FALSE(in_box(family, outside));
    Vector edge(1);
    edge << 10.0;
    const LtiSystem clamped = instantiate(family, outside);
    const LtiSystem at_edge = instantiate(family, edge);
    CHECK((clamped.A - at_edge.A).norm() == 0.0);

    // zero terms reduce to the base
    const ParametricLtiSystem constant(
        two_state_example(),
        {LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2))},
        {{"unused", -1.0, 1.0}});
    Vector mid(1);
    mid << 0.25;
    CHECK((instantiate(constant, mid).A - constant.base.A).norm() == 0.0);

    // scalar affine arithmetic: A(p) = -p at p = 2
    const ParametricLtiSystem scalar(
        LtiSystem(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1)),
        {LtiSystem(-Matrix::Ones(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1))},
        {{"rate", 1.0, 2.0}});
    Vector two(1);
    two << 2.0;
    CHECK(instantiate(scalar, two).A(0, 0) == Catch::Approx(-2.0));
}

TEST_CASE("generators produce stable systems with the advertised shapes", "[system]") {
    const LtiSystem rnd = random_stable(8, 7);
    CHECK(spectral_abscissa(rnd) < 0.0);
    CHECK(rnd.inputs() == 1);

    const LtiSystem ladder = rc_ladder(5);
    CHECK(ladder.order() == 5);
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j)
            if (std::abs(i - j) > 1)
                CHECK(ladder.A(i, j) == 0.0);
    CHECK(is_stable(ladder));

    const ParametricLtiSystem heat = heat1d(6);
    Vector mid(1);
    mid << 0.5 * (heat.box[0].min + heat.box[0].max);
    CHECK(is_stable(instantiate(heat, mid)));

    // determinism: same seed, same system
    const LtiSystem again = random_stable(8, 7);
    CHECK((again.A - rnd.A).norm() == 0.0);
    CHECK((again.B - rnd.B).norm() == 0.0);

    CHECK_THROWS_AS(random_stable(0, 1), BadParameter);
    CHECK_THROWS_AS(generate("nope", 3, 1), BadParameter);
}

TEST_CASE("parametric construction validates the box", "[system]") {
    CHECK_THROWS_AS(ParametricLtiSystem(two_state_example(), {}, {}), BadParameter);
    CHECK_THROWS_AS(
        ParametricLtiSystem(
            two_state_example(),
            {LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2))},
            {{"bad", 2.0, 1.0}}),
        BadParameter);
}
