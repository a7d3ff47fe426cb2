#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hwidths/linalg.hpp"
#include "hwidths/types.hpp"

namespace hwidths {

/// Continuous-time state-space realization. Construction never fails on an
/// unstable A; analysis operations guard on the stability margin themselves.
struct LtiSystem {
    Matrix A, B, C, D;

    LtiSystem() = default;

    /// An empty D means zero feedthrough.
    LtiSystem(Matrix a, Matrix b, Matrix c, Matrix d = Matrix())
        : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
        check_square(A, "LtiSystem A");
        check_finite(A, "LtiSystem A");
        check_finite(B, "LtiSystem B");
        check_finite(C, "LtiSystem C");
        if (B.rows() != A.rows())
            throw DimensionMismatch("LtiSystem: B must have N rows");
        if (C.cols() != A.rows())
            throw DimensionMismatch("LtiSystem: C must have N columns");
        if (D.size() == 0)
            D = Matrix::Zero(C.rows(), B.cols());
        check_finite(D, "LtiSystem D");
        if (D.rows() != C.rows() || D.cols() != B.cols())
            throw DimensionMismatch("LtiSystem: D must be p x m");
    }

    Index order() const { return A.rows(); }
    Index inputs() const { return B.cols(); }
    Index outputs() const { return C.rows(); }
};

/// Max real part of the eigenvalues of A, read off the Schur blocks.
inline double spectral_abscissa(const LtiSystem& sys, const Tolerances& tol = default_tolerances()) {
    const SchurResult schur = real_schur(sys.A, tol);
    const auto re = detail::schur_eigen_real_parts(schur.T);
    return *std::max_element(re.begin(), re.end());
}

inline bool is_stable(const LtiSystem& sys, const Tolerances& tol = default_tolerances()) {
    return spectral_abscissa(sys, tol) < -tol.stability_margin;
}

inline void require_stable(const LtiSystem& sys, const char* what,
                           const Tolerances& tol = default_tolerances()) {
    const double alpha = spectral_abscissa(sys, tol);
    if (!(alpha < -tol.stability_margin))
        throw Unstable(std::string(what) + ": system is not asymptotically stable (abscissa " +
                       std::to_string(alpha) + ")");
}

/// Realization whose Hankel operator is the adjoint of sys's. An involution.
inline LtiSystem adjoint(const LtiSystem& sys) {
    return LtiSystem(sys.A.transpose(), sys.C.transpose(), sys.B.transpose(), sys.D.transpose());
}

/// Realization of the difference of two transfer behaviors, used for Hankel
/// error norms.
inline LtiSystem error_system(const LtiSystem& s1, const LtiSystem& s2) {
    if (s1.inputs() != s2.inputs() || s1.outputs() != s2.outputs())
        throw DimensionMismatch("error_system: input/output dimensions must match");
    const Index n1 = s1.order(), n2 = s2.order();
    Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
    a.topLeftCorner(n1, n1) = s1.A;
    a.bottomRightCorner(n2, n2) = s2.A;
    Matrix b(n1 + n2, s1.inputs());
    b.topRows(n1) = s1.B;
    b.bottomRows(n2) = s2.B;
    Matrix c(s1.outputs(), n1 + n2);
    c.leftCols(n1) = s1.C;
    c.rightCols(n2) = -s2.C;
    return LtiSystem(a, b, c, s1.D - s2.D);
}

struct ParameterRange {
    std::string name;
    double min = 0.0;
    double max = 0.0;
};

/// Affine-in-parameter family: A(p) = A0 + sum_k p_k A_k and likewise for
/// B, C, D, restricted to a compact box.
struct ParametricLtiSystem {
    LtiSystem base;
    std::vector<LtiSystem> terms;
    std::vector<ParameterRange> box;

    ParametricLtiSystem() = default;

    ParametricLtiSystem(LtiSystem base_, std::vector<LtiSystem> terms_,
                        std::vector<ParameterRange> box_)
        : base(std::move(base_)), terms(std::move(terms_)), box(std::move(box_)) {
        if (box.empty())
            throw BadParameter("ParametricLtiSystem: parameter box must be nonempty");
        if (terms.size() != box.size())
            throw DimensionMismatch("ParametricLtiSystem: one coefficient term per parameter");
        for (const auto& r : box)
            if (!(r.min <= r.max))
                throw BadParameter("ParametricLtiSystem: min > max for parameter " + r.name);
        for (const auto& t : terms) {
            if (t.A.rows() != base.A.rows() || t.B.cols() != base.B.cols() ||
                t.C.rows() != base.C.rows())
                throw DimensionMismatch("ParametricLtiSystem: term dimensions differ from base");
        }
    }

    size_t parameter_count() const { return box.size(); }
};

inline bool in_box(const ParametricLtiSystem& psys, const Vector& p) {
    if (static_cast<size_t>(p.size()) != psys.parameter_count())
        throw DimensionMismatch("in_box: parameter vector length");
    for (Index k = 0; k < p.size(); ++k)
        if (p[k] < psys.box[k].min || p[k] > psys.box[k].max)
            return false;
    return true;
}

/// Affine evaluation at a parameter point; points outside the box are
/// clamped to it (query in_box first to warn).
inline LtiSystem instantiate(const ParametricLtiSystem& psys, const Vector& p) {
    if (static_cast<size_t>(p.size()) != psys.parameter_count())
        throw DimensionMismatch("instantiate: parameter vector length");
    Matrix a = psys.base.A, b = psys.base.B, c = psys.base.C, d = psys.base.D;
    for (Index k = 0; k < p.size(); ++k) {
        const double pk = std::clamp(p[k], psys.box[k].min, psys.box[k].max);
        a += pk * psys.terms[k].A;
        b += pk * psys.terms[k].B;
        c += pk * psys.terms[k].C;
        d += pk * psys.terms[k].D;
    }
    return LtiSystem(a, b, c, d);
}

} // namespace hwidths
