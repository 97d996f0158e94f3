#pragma once

#include "geodyn/geometry.hpp"

namespace geodyn {

// Point of TM in coordinates (x^i, y^i); dim 2n.
struct TBPoint {
    Vec x;
    Vec y;
};

// Coordinate-basis coefficients of a 2-form at a TBPoint, as the
// antisymmetric 2n×2n matrix W with W(a,b) = Ω(e_a, e_b). Convention:
// (dz^a ∧ dz^b)(u, w) = u^a w^b − u^b w^a, so Ω = Σ_{a<b} W_ab dz^a∧dz^b.
struct TwoFormAt {
    TBPoint at;
    Mat coeffs;  // 2n×2n, antisymmetric

    bool nondegenerate() const;
};

// Sasaki metric G = g_ij dx^i⊗dx^j + g_ij δy^i⊗δy^j expanded into the
// coordinate basis via δy^j = dy^j + Γ^j_{hk} y^k dx^h.
Mat sasaki_metric(const MetricField& g, const TBPoint& at);

// Ω₁ = g_ij dx^i ∧ δy^j
TwoFormAt omega1(const MetricField& g, const TBPoint& at);

// Ω₂ = ½ ω_ij dx^i ∧ dx^j + g_ij dx^i ∧ δy^j, ω the lowered helicity form.
TwoFormAt omega2(const MetricField& g, const VectorField& X, const TBPoint& at);

// Coefficients of the one-forms η₁ = g_ij y^i dx^j and
// η₂ = −g_ij X^i dx^j + g_ij y^i dx^j (2n-covectors at `at`).
Vec eta1(const MetricField& g, const TBPoint& at);
Vec eta2(const MetricField& g, const VectorField& X, const TBPoint& at);

// dH of H = ½ g_ij(x) y^i y^j − f(x) at `at` (2n-covector).
Vec dH(const MetricField& g, const VectorField& X, const TBPoint& at);

// X_H solving Ω(X_H, ·) = dH; unique when Ω is nondegenerate.
Vec hamilton_gradient(const TwoFormAt& omega, const Vec& dH_covector);

}  // namespace geodyn
