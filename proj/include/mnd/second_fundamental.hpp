#pragma once

// Second fundamental form of a smooth surface point, as a 2x2 complex
// symmetric matrix on a deterministic tangent basis, and the planar-point
// test built on it.

#include <array>
#include <algorithm>
#include <cmath>

#include "core.hpp"
#include "homogeneous.hpp"
#include "projective.hpp"

namespace mnd {

struct SecondFundamentalForm {
    std::array<std::array<cplx, 2>, 2> S;  // entries v_i^T Hess(f) v_j
    P4 basis[2];                           // tangent directions used
    double scale;                          // max |Hessian entry| at x
};

// Tangent basis construction.  The tangent hyperplane at x is the bilinear
// condition grad(f)(x) . v = 0; on X the Euler relation puts x itself inside
// it and in the radical of the restricted Hessian form, so any two directions
// completing x to a spanning set give the same 2x2 entries.  For determinism
// we start from the standard basis vectors with the largest component
// orthogonal to the gradient (equivalently smallest |grad_i|, ties by index),
// enforce bilinear tangency by subtracting along conj(grad), then project out
// x and earlier directions in the Hermitian sense for conditioning.
inline SecondFundamentalForm secondFundamentalForm(const HomogeneousPolynomial& f, const ProjectivePoint& x) {
    if (f.numVars() != 4) throw contract_error("secondFundamentalForm: expected a surface in P^3");
    HomogeneousPolynomial fn = f.normalized();
    double fscale = 1.0;
    if (std::abs(fn.evaluate(x.v)) > defaults::residual_tol * fscale * 1e3)
        throw contract_error("secondFundamentalForm: point not on the surface");

    P4 g = gradient(fn, x.v);
    double gn2 = 0.0;
    for (int i = 0; i < 4; ++i) gn2 += std::norm(g[i]);
    if (std::sqrt(gn2) < 1e-9) throw contract_error("secondFundamentalForm: singular point (gradient ~ 0)");

    // Candidate order: ascending |g_i|, ties by index.
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double ga = std::abs(g[a]), gb = std::abs(g[b]);
        if (ga != gb) return ga < gb;
        return a < b;
    });

    double xn = 0.0;
    for (int i = 0; i < 4; ++i) xn += std::norm(x.v[i]);
    xn = std::sqrt(xn);
    P4 xhat;
    for (int i = 0; i < 4; ++i) xhat[i] = x.v[i] / xn;

    P4 basis[2];
    int found = 0;
    for (int oi = 0; oi < 4 && found < 2; ++oi) {
        P4 v{};
        v[order[oi]] = 1.0;
        // Bilinear tangency: v -= (g.v / g.conj(g)) conj(g).
        cplx gv = g[order[oi]];
        for (int i = 0; i < 4; ++i) v[i] -= (gv / gn2) * std::conj(g[i]);
        // Hermitian projection against x and the previous direction.
        auto projectOut = [&](const P4& u) {
            cplx d = 0.0;
            for (int i = 0; i < 4; ++i) d += std::conj(u[i]) * v[i];
            for (int i = 0; i < 4; ++i) v[i] -= d * u[i];
        };
        projectOut(xhat);
        if (found == 1) projectOut(basis[0]);
        double nv = 0.0;
        for (int i = 0; i < 4; ++i) nv += std::norm(v[i]);
        nv = std::sqrt(nv);
        if (nv < 0.2) continue;  // nearly dependent; try the next candidate
        for (int i = 0; i < 4; ++i) v[i] /= nv;
        basis[found++] = v;
    }
    if (found < 2) throw numeric_error("secondFundamentalForm: could not build a tangent basis");

    auto H = hessian(fn, x.v);
    double hs = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) hs = std::max(hs, std::abs(H[i][j]));

    SecondFundamentalForm out;
    out.basis[0] = basis[0];
    out.basis[1] = basis[1];
    out.scale = hs;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cplx s = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) s += basis[a][i] * H[i][j] * basis[b][j];
            out.S[a][b] = s;
        }
    return out;
}

// True when the second fundamental form vanishes at x, i.e. the tangent plane
// section has a point of multiplicity >= 3 there.  Cross-checked by looking
// at the order of contact of sampled tangent lines.
inline bool isPlanarPoint(const HomogeneousPolynomial& f, const ProjectivePoint& x,
                          double tol = defaults::planar_tol) {
    SecondFundamentalForm sff = secondFundamentalForm(f, x);
    double scale = std::max(sff.scale, 1e-12);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            if (std::abs(sff.S[a][b]) > tol * scale) return false;

    // Sampled tangent directions must all meet X with multiplicity >= 3:
    // the t^2 coefficient of the line restriction has to vanish too.
    HomogeneousPolynomial fn = f.normalized();
    const std::array<std::pair<cplx, cplx>, 5> combos{{{1.0, 0.0},
                                                       {0.0, 1.0},
                                                       {1.0, 1.0},
                                                       {1.0, -1.0},
                                                       {1.0, cplx(0.0, 1.0)}}};
    for (const auto& [al, be] : combos) {
        P4 w;
        double nw = 0.0;
        for (int i = 0; i < 4; ++i) {
            w[i] = al * sff.basis[0][i] + be * sff.basis[1][i];
            nw += std::norm(w[i]);
        }
        nw = std::sqrt(nw);
        for (auto& c : w) c /= nw;
        UnivariatePolynomial q = restrictToLine(fn, x.v, w);
        double qs = q.maxAbs();
        // A vanishing restriction means the whole line lies on the surface
        // (infinite contact order), which is consistent with planarity.
        if (qs < 1e-10 || q.degree() < 2) continue;
        if (std::abs(q.coeffs()[2]) > 10.0 * tol * qs) return false;
    }
    return true;
}

}  // namespace mnd
