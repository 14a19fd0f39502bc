#pragma once

// Focal geometry of 2-parameter line families in P^3.
//
// A family is a smooth map s = (s1, s2) -> line(p(s), v(s)) on an open box.
// Along one member, first-order variation of the family is captured by a
// 2x2 matrix pencil A(t) = A0 + t*A1: the two parameter velocities of the
// moving point p(s) + t*v(s), read in a basis of the normal space of the
// line (tangent directions of P^3 modulo the line itself).  Foci of the
// member are the points where det A(t) vanishes; the determinant is an
// exact quadratic in t, so each member carries at most two of them.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "homogeneous.hpp"
#include "projective.hpp"
#include "rng.hpp"
#include "roots.hpp"
#include "univariate.hpp"

namespace mnd {

enum class DerivativeMode { Analytic, FiniteDifference };

// One member of the family: representatives, not normalized.  The evaluator
// must return representatives that vary smoothly with s (no re-scaling
// jumps), otherwise finite differences of it are meaningless.
struct LineSample {
    P4 p{};
    P4 v{};
};

// Member plus its first derivatives in both parameters.
struct LineJet {
    P4 p{}, v{};
    std::array<P4, 2> dp{};
    std::array<P4, 2> dv{};
};

struct LineFamily {
    std::array<cplx, 2> center{};  // parameter box center
    double radius = 1.0;           // box half-width, per parameter
    DerivativeMode mode = DerivativeMode::FiniteDifference;
    double fdStep = 1e-5;  // relative central-difference step
    std::function<LineSample(cplx, cplx)> eval;
    std::function<LineJet(cplx, cplx)> jet;  // required in Analytic mode

    bool inDomain(cplx s1, cplx s2) const {
        return std::abs(s1 - center[0]) < radius && std::abs(s2 - center[1]) < radius;
    }
};

namespace detail {

inline P4 axpy4(const P4& a, cplx c, const P4& b) {
    P4 r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + c * b[i];
    return r;
}

inline P4 scale4(const P4& a, cplx c) {
    P4 r;
    for (int i = 0; i < 4; ++i) r[i] = c * a[i];
    return r;
}

inline cplx hdot4(const P4& a, const P4& b) {  // conjugate-linear in a
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm4(const P4& a) { return std::sqrt(std::abs(hdot4(a, a))); }

}  // namespace detail

// Member with derivatives, honouring the family's derivative mode.  Finite
// differences are central, with a step relative to the parameter magnitude.
inline LineJet familyJet(const LineFamily& fam, cplx s1, cplx s2) {
    if (!fam.eval) throw contract_error("LineFamily: evaluator not set");
    if (fam.mode == DerivativeMode::Analytic) {
        if (!fam.jet) throw contract_error("LineFamily: analytic mode without a jet");
        return fam.jet(s1, s2);
    }
    LineJet j;
    LineSample mid = fam.eval(s1, s2);
    j.p = mid.p;
    j.v = mid.v;
    for (int k = 0; k < 2; ++k) {
        cplx sk = (k == 0) ? s1 : s2;
        double h = fam.fdStep * std::max(1.0, std::abs(sk));
        LineSample hi = (k == 0) ? fam.eval(s1 + h, s2) : fam.eval(s1, s2 + h);
        LineSample lo = (k == 0) ? fam.eval(s1 - h, s2) : fam.eval(s1, s2 - h);
        for (int i = 0; i < 4; ++i) {
            j.dp[k][i] = (hi.p[i] - lo.p[i]) / (2.0 * h);
            j.dv[k][i] = (hi.v[i] - lo.v[i]) / (2.0 * h);
        }
    }
    return j;
}

// The pencil A(t) = A0 + t*A1 of a member, in an orthonormal basis (n1, n2)
// of the normal space of the line.  Column i holds the normal components of
// d/ds_i [p(s) + t v(s)]; the basis is fixed per call, so the two matrices
// live in the same chart and det A(t) expands exactly as a quadratic.
struct CharacteristicPencil {
    Eigen::Matrix2cd A0, A1;
    std::array<cplx, 2> member{};

    Eigen::Matrix2cd at(cplx t) const { return A0 + t * A1; }

    // Coefficients (c0, c1, c2) of det A(t) = c0 + c1 t + c2 t^2, expanded
    // exactly from the pencil rather than sampled.
    std::array<cplx, 3> detCoefficients() const {
        cplx c0 = A0(0, 0) * A0(1, 1) - A0(0, 1) * A0(1, 0);
        cplx c1 = A0(0, 0) * A1(1, 1) + A1(0, 0) * A0(1, 1) - A0(0, 1) * A1(1, 0) -
                  A1(0, 1) * A0(1, 0);
        cplx c2 = A1(0, 0) * A1(1, 1) - A1(0, 1) * A1(1, 0);
        return {c0, c1, c2};
    }

    double entryScale() const {
        double m = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                m = std::max({m, std::abs(A0(i, j)), std::abs(A1(i, j))});
        return m;
    }
};

inline CharacteristicPencil characteristicPencil(const LineFamily& fam, cplx s1, cplx s2) {
    LineJet j = familyJet(fam, s1, s2);

    double np = detail::norm4(j.p);
    if (np < 1e-14) throw contract_error("characteristicPencil: zero point representative");
    P4 e1 = detail::scale4(j.p, 1.0 / np);
    P4 vperp = detail::axpy4(j.v, -detail::hdot4(e1, j.v), e1);
    double nv = detail::norm4(vperp);
    if (nv <= 1e-12 * detail::norm4(j.v))
        throw contract_error("characteristicPencil: direction parallel to point");
    P4 e2 = detail::scale4(vperp, 1.0 / nv);

    // Normal basis: project the standard vectors off span(e1, e2) and keep
    // the two with the largest residuals.  The four projections span the
    // 2-dimensional complement, so the best two are never degenerate; no
    // chart retry is needed with this selection.
    std::array<P4, 4> cand{};
    std::array<double, 4> cn{};
    for (int k = 0; k < 4; ++k) {
        P4 ek{};
        ek[k] = 1.0;
        P4 r = detail::axpy4(ek, -detail::hdot4(e1, ek), e1);
        r = detail::axpy4(r, -detail::hdot4(e2, ek), e2);
        cand[k] = r;
        cn[k] = detail::norm4(r);
    }
    int b1 = 0;
    for (int k = 1; k < 4; ++k)
        if (cn[k] > cn[b1]) b1 = k;
    P4 n1 = detail::scale4(cand[b1], 1.0 / cn[b1]);
    int b2 = -1;
    double best = -1.0;
    for (int k = 0; k < 4; ++k) {
        if (k == b1) continue;
        P4 r = detail::axpy4(cand[k], -detail::hdot4(n1, cand[k]), n1);
        double nr = detail::norm4(r);
        if (nr > best) {
            best = nr;
            b2 = k;
        }
    }
    P4 r2 = detail::axpy4(cand[b2], -detail::hdot4(n1, cand[b2]), n1);
    P4 n2 = detail::scale4(r2, 1.0 / best);

    CharacteristicPencil pc;
    pc.member = {s1, s2};
    for (int i = 0; i < 2; ++i) {
        pc.A0(0, i) = detail::hdot4(n1, j.dp[static_cast<std::size_t>(i)]);
        pc.A0(1, i) = detail::hdot4(n2, j.dp[static_cast<std::size_t>(i)]);
        pc.A1(0, i) = detail::hdot4(n1, j.dv[static_cast<std::size_t>(i)]);
        pc.A1(1, i) = detail::hdot4(n2, j.dv[static_cast<std::size_t>(i)]);
    }
    return pc;
}

inline Eigen::Matrix2cd characteristicMatrix(const LineFamily& fam, cplx s1, cplx s2, cplx t) {
    return characteristicPencil(fam, s1, s2).at(t);
}

enum class Fundamentality { Yes, No, Unknown };

inline const char* fundamentalityName(Fundamentality f) {
    switch (f) {
        case Fundamentality::Yes: return "yes";
        case Fundamentality::No: return "no";
        default: return "unknown";
    }
}

struct Focus {
    cplx t;
    int multiplicity = 1;
    ProjectivePoint point;
    Fundamentality fundamental = Fundamentality::Unknown;
};

struct FocusReport {
    std::array<cplx, 2> member{};
    UnivariatePolynomial focalPolynomial;
    std::vector<Focus> foci;
};

// Foci of one member: roots of det A(t), with coincident roots merged into
// a single focus of higher multiplicity.  A determinant that vanishes
// identically (checked against the entry scale on a handful of nodes)
// signals a family that does not fill space near this member and is
// reported as an error rather than as foci.
inline FocusReport fociOnMember(const LineFamily& fam, cplx s1, cplx s2,
                                double tol = 1e-6) {
    CharacteristicPencil pc = characteristicPencil(fam, s1, s2);
    auto c = pc.detCoefficients();

    double scale = pc.entryScale();
    double maxdet = 0.0;
    for (int k = 0; k < 5; ++k) {
        cplx t = std::cos(std::numbers::pi * (2.0 * k + 1.0) / 10.0);
        cplx d = c[0] + t * (c[1] + t * c[2]);
        maxdet = std::max(maxdet, std::abs(d));
    }
    if (maxdet < 1e-9 * scale * scale)
        throw numeric_error("fociOnMember: focal determinant vanishes identically");

    FocusReport rep;
    rep.member = {s1, s2};
    rep.focalPolynomial = UnivariatePolynomial(std::vector<cplx>{c[0], c[1], c[2]});

    LineJet j = familyJet(fam, s1, s2);
    if (rep.focalPolynomial.degree() > 0) {
        auto clusters = clusteredRoots(rep.focalPolynomial, std::max(tol, defaults::cluster_tol));
        for (const auto& cl : clusters) {
            Focus f{cl.center, cl.multiplicity,
                    ProjectivePoint(detail::axpy4(j.p, cl.center, j.v)),
                    Fundamentality::Unknown};
            rep.foci.push_back(std::move(f));
        }
    }
    return rep;
}

namespace detail {

// Chordal distance residual of a point from the line of member s: the
// component of the unit representative of x orthogonal to span(p, v).
// Gram-Schmidt without pivoting keeps it smooth in s wherever the family
// invariants hold, which Gauss-Newton relies on.
inline Eigen::Vector4cd lineResidual(const LineFamily& fam, const Eigen::Vector4cd& xhat,
                                     cplx s1, cplx s2) {
    LineSample m = fam.eval(s1, s2);
    Eigen::Vector4cd p = toEigen(m.p), v = toEigen(m.v);
    p /= p.norm();
    Eigen::Vector4cd w = v - p.dot(v) * p;
    double nw = w.norm();
    if (nw <= 1e-12) throw numeric_error("line family member degenerated");
    w /= nw;
    return xhat - p.dot(xhat) * p - w.dot(xhat) * w;
}

struct GNOutcome {
    bool converged = false;  // reached a stationary point
    bool onLine = false;     // residual below tol there
    cplx s1, s2;
};

inline GNOutcome gaussNewtonToLine(const LineFamily& fam, const Eigen::Vector4cd& xhat,
                                   cplx s1, cplx s2, double tol, int maxIters = 40) {
    GNOutcome out;
    out.s1 = s1;
    out.s2 = s2;
    double fd = 1e-6;
    for (int it = 0; it < maxIters; ++it) {
        if (!fam.inDomain(out.s1, out.s2)) return out;
        Eigen::Vector4cd r = lineResidual(fam, xhat, out.s1, out.s2);
        if (r.norm() < tol) {
            out.converged = true;
            out.onLine = true;
            return out;
        }
        Eigen::Matrix<cplx, 4, 2> J;
        for (int k = 0; k < 2; ++k) {
            cplx sk = (k == 0) ? out.s1 : out.s2;
            double h = fd * std::max(1.0, std::abs(sk));
            Eigen::Vector4cd hi = (k == 0) ? lineResidual(fam, xhat, out.s1 + h, out.s2)
                                           : lineResidual(fam, xhat, out.s1, out.s2 + h);
            Eigen::Vector4cd lo = (k == 0) ? lineResidual(fam, xhat, out.s1 - h, out.s2)
                                           : lineResidual(fam, xhat, out.s1, out.s2 - h);
            J.col(k) = (hi - lo) / (2.0 * h);
        }
        Eigen::Vector2cd step = J.colPivHouseholderQr().solve(-r);
        double sn = std::abs(step(0)) + std::abs(step(1));
        if (!std::isfinite(sn)) return out;
        if (sn < 1e-14 * std::max(1.0, std::abs(out.s1) + std::abs(out.s2))) {
            out.converged = true;  // stationary, but off the line
            return out;
        }
        // Damp steps that would leave the box outright.
        double cap = 0.5 * fam.radius;
        if (sn > cap) step *= cap / sn;
        out.s1 += step(0);
        out.s2 += step(1);
    }
    Eigen::Vector4cd r = lineResidual(fam, xhat, out.s1, out.s2);
    out.onLine = r.norm() < tol;
    out.converged = out.onLine;
    return out;
}

// Smallest/largest singular value ratio of the 4x2 residual Jacobian; a
// rank drop means the on-line solution set is positive-dimensional there.
inline bool jacobianRankDrops(const LineFamily& fam, const Eigen::Vector4cd& xhat,
                              cplx s1, cplx s2) {
    Eigen::Matrix<cplx, 4, 2> J;
    for (int k = 0; k < 2; ++k) {
        cplx sk = (k == 0) ? s1 : s2;
        double h = 1e-6 * std::max(1.0, std::abs(sk));
        Eigen::Vector4cd hi =
            (k == 0) ? lineResidual(fam, xhat, s1 + h, s2) : lineResidual(fam, xhat, s1, s2 + h);
        Eigen::Vector4cd lo =
            (k == 0) ? lineResidual(fam, xhat, s1 - h, s2) : lineResidual(fam, xhat, s1, s2 - h);
        J.col(k) = (hi - lo) / (2.0 * h);
    }
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 4, 2>> svd(J);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(1);
    if (smax < 1e-10) return true;  // residual is flat: whole patch on the line
    return smin < 1e-3 * smax;
}

}  // namespace detail

// Does the set of members whose line passes through x contain a curve?
// Multistart Gauss-Newton looks for members through x; with at least two
// found, a path between them is continued while watching the Jacobian of
// the residual for a rank drop.  Isolated solutions break the continuation
// and give No; an unbroken path with a flat Jacobian gives Yes.
inline Fundamentality isFundamentalPoint(const LineFamily& fam, const ProjectivePoint& x,
                                         double tol = 1e-6, int sampleBudget = 60) {
    if (sampleBudget < 4) throw contract_error("isFundamentalPoint: sample budget too small");
    Eigen::Vector4cd xhat = toEigen(x.v);
    xhat /= xhat.norm();

    Rng rng(splitmix64(0xF0CA1D0Full));
    std::vector<std::array<cplx, 2>> sols;
    int ranCleanly = 0;
    for (int trial = 0; trial < sampleBudget; ++trial) {
        cplx s1 = fam.center[0] + 0.85 * fam.radius * rng.box();
        cplx s2 = fam.center[1] + 0.85 * fam.radius * rng.box();
        detail::GNOutcome out;
        try {
            out = detail::gaussNewtonToLine(fam, xhat, s1, s2, tol);
        } catch (const numeric_error&) {
            continue;
        }
        ++ranCleanly;
        if (!out.onLine) continue;
        bool fresh = true;
        for (const auto& s : sols)
            if (std::abs(s[0] - out.s1) + std::abs(s[1] - out.s2) < 1e-3 * fam.radius) {
                fresh = false;
                break;
            }
        if (fresh) sols.push_back({out.s1, out.s2});
        if (sols.size() >= 6) break;  // plenty for the path test
    }

    if (sols.size() < 2) {
        // A curve of solutions is a strong attractor for the multistart, so
        // zero or one hits across a clean budget is negative evidence.  Only
        // a budget dominated by evaluator failures stays unresolved.
        if (ranCleanly >= std::max(4, sampleBudget / 4)) return Fundamentality::No;
        return Fundamentality::Unknown;
    }

    // Pick the two solutions farthest apart and walk between them.
    std::size_t ia = 0, ib = 1;
    double dmax = -1.0;
    for (std::size_t i = 0; i < sols.size(); ++i)
        for (std::size_t j = i + 1; j < sols.size(); ++j) {
            double d = std::abs(sols[i][0] - sols[j][0]) + std::abs(sols[i][1] - sols[j][1]);
            if (d > dmax) {
                dmax = d;
                ia = i;
                ib = j;
            }
        }
    cplx a1 = sols[ia][0], a2 = sols[ia][1];
    cplx b1 = sols[ib][0], b2 = sols[ib][1];

    cplx w1 = a1, w2 = a2;
    int drops = 0;
    const int nSteps = 8;
    for (int k = 1; k <= nSteps; ++k) {
        double tau = static_cast<double>(k) / nSteps;
        cplx g1 = a1 + tau * (b1 - a1), g2 = a2 + tau * (b2 - a2);
        // Start from the straight-line target; the previous waypoint keeps
        // the walk anchored through the drift check below.
        detail::GNOutcome out;
        try {
            out = detail::gaussNewtonToLine(fam, xhat, g1, g2, tol);
        } catch (const numeric_error&) {
            return Fundamentality::Unknown;
        }
        if (!out.onLine) return Fundamentality::No;  // the two members are isolated
        double drift = std::abs(out.s1 - g1) + std::abs(out.s2 - g2);
        if (drift > 0.75 * dmax) return Fundamentality::No;  // snapped back to an endpoint
        w1 = out.s1;
        w2 = out.s2;
        if (detail::jacobianRankDrops(fam, xhat, w1, w2)) ++drops;
    }
    if (drops == nSteps) return Fundamentality::Yes;
    if (drops == 0) return Fundamentality::No;
    return Fundamentality::Unknown;
}

// ---- stock families ------------------------------------------------------

// Every line through a fixed point q, chart by two direction parameters.
// The moving point p + t v has velocity t * dv_i, so the pencil is A(t) =
// t * A1 with A1 nonsingular: one focus of multiplicity two, sitting at q.
inline LineFamily linesThroughPoint(const ProjectivePoint& q) {
    ProjectiveFrame fr = frameForCenter(q);
    Eigen::Matrix4cd Tinv = fr.Tinv;
    P4 p = q.v;
    P4 w0 = fromEigen(Tinv.col(0));
    P4 w1 = fromEigen(Tinv.col(1));
    P4 w2 = fromEigen(Tinv.col(2));

    LineFamily fam;
    fam.center = {0.0, 0.0};
    fam.radius = 1.0;
    fam.mode = DerivativeMode::Analytic;
    fam.eval = [p, w0, w1, w2](cplx s1, cplx s2) {
        LineSample m;
        m.p = p;
        for (int i = 0; i < 4; ++i) m.v[i] = w0[i] + s1 * w1[i] + s2 * w2[i];
        return m;
    };
    fam.jet = [p, w0, w1, w2](cplx s1, cplx s2) {
        LineJet j;
        j.p = p;
        for (int i = 0; i < 4; ++i) j.v[i] = w0[i] + s1 * w1[i] + s2 * w2[i];
        j.dp = {P4{}, P4{}};
        j.dv = {w1, w2};
        return j;
    };
    return fam;
}

// Vertical lines through a moving plane point: constant nonsingular pencil,
// hence no foci anywhere.
inline LineFamily translationFamily() {
    LineFamily fam;
    fam.center = {0.0, 0.0};
    fam.radius = 2.0;
    fam.mode = DerivativeMode::Analytic;
    fam.eval = [](cplx s1, cplx s2) {
        return LineSample{P4{s1, s2, 0.0, 1.0}, P4{0.0, 0.0, 1.0, 0.0}};
    };
    fam.jet = [](cplx s1, cplx s2) {
        LineJet j;
        j.p = P4{s1, s2, 0.0, 1.0};
        j.v = P4{0.0, 0.0, 1.0, 0.0};
        j.dp = {P4{1.0, 0.0, 0.0, 0.0}, P4{0.0, 1.0, 0.0, 0.0}};
        j.dv = {P4{}, P4{}};
        return j;
    };
    return fam;
}

// Tangent lines of the quadric x0^2 + x1^2 + x2^2 = x3^2, one per surface
// point: the base point is the tangency point (spherical chart, away from
// the poles) and the direction is a tangent field turned by a parameter-
// dependent angle, so neither parameter velocity aligns with the line.
// Each member carries the tangency point as one focus and the point where
// it touches the caustic of the family as the other; a direction field
// aligned with a parameter (say the longitude field) degenerates the
// second focus to the line's point at infinity, which the t-chart cannot
// represent, so the turning angle is part of the construction.
inline LineFamily sphereTangentFamily() {
    LineFamily fam;
    fam.center = {0.3, 0.4};
    fam.radius = 0.25;
    fam.mode = DerivativeMode::Analytic;
    auto frames = [](cplx s1, cplx s2) {
        cplx c1 = std::cos(s1), n1 = std::sin(s1);
        cplx c2 = std::cos(s2), n2 = std::sin(s2);
        struct Fr {
            P4 p, lat, lon, dlat1, dlat2, dlon2;
        } f;
        f.p = P4{c1 * c2, c1 * n2, n1, 1.0};
        f.lat = P4{-n1 * c2, -n1 * n2, c1, 0.0};   // dp/ds1
        f.lon = P4{-c1 * n2, c1 * c2, 0.0, 0.0};   // dp/ds2
        f.dlat1 = P4{-c1 * c2, -c1 * n2, -n1, 0.0};
        f.dlat2 = P4{n1 * n2, -n1 * c2, 0.0, 0.0};  // also d(lon)/ds1
        f.dlon2 = P4{-c1 * c2, -c1 * n2, 0.0, 0.0};
        return f;
    };
    const double a1 = 0.7, a2 = -0.4;  // turning-angle gradient
    fam.eval = [frames, a1, a2](cplx s1, cplx s2) {
        auto f = frames(s1, s2);
        cplx al = 0.3 + a1 * s1 + a2 * s2;
        cplx ca = std::cos(al), sa = std::sin(al);
        LineSample m;
        m.p = f.p;
        for (int i = 0; i < 4; ++i) m.v[i] = ca * f.lat[i] + sa * f.lon[i];
        return m;
    };
    fam.jet = [frames, a1, a2](cplx s1, cplx s2) {
        auto f = frames(s1, s2);
        cplx al = 0.3 + a1 * s1 + a2 * s2;
        cplx ca = std::cos(al), sa = std::sin(al);
        LineJet j;
        j.p = f.p;
        for (int i = 0; i < 4; ++i) j.v[i] = ca * f.lat[i] + sa * f.lon[i];
        j.dp = {f.lat, f.lon};
        for (int i = 0; i < 4; ++i) {
            j.dv[0][i] = a1 * (-sa * f.lat[i] + ca * f.lon[i]) + ca * f.dlat1[i] +
                         sa * f.dlat2[i];
            j.dv[1][i] = a2 * (-sa * f.lat[i] + ca * f.lon[i]) + ca * f.dlat2[i] +
                         sa * f.dlon2[i];
        }
        return j;
    };
    return fam;
}

// Tangent lines with contact order >= 3: chart by the surface point near an
// anchor, direction picked in the tangent pencil so the Hessian form also
// vanishes on it (the asymptotic branch fixed at the anchor).  On such a
// family the tangency point is a focus of multiplicity two; contrast with
// order-2 contact, where it is a simple focus.
inline LineFamily asymptoticTangentFamily(const HomogeneousPolynomial& f,
                                          const ProjectivePoint& anchor, int branch = 0,
                                          double radius = 0.03) {
    if (f.numVars() != 4 || f.degree() < 3)
        throw contract_error("asymptoticTangentFamily: need a surface of degree >= 3");
    if (branch != 0 && branch != 1)
        throw contract_error("asymptoticTangentFamily: branch must be 0 or 1");
    HomogeneousPolynomial fn = f.normalized();
    if (std::abs(fn.evaluate(anchor.v)) > 1e-8)
        throw contract_error("asymptoticTangentFamily: anchor not on the surface");

    P4 g0 = gradient(fn, anchor.v);
    int solveIdx = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(g0[i]) > std::abs(g0[solveIdx])) solveIdx = i;
    if (std::abs(g0[solveIdx]) < 1e-9)
        throw contract_error("asymptoticTangentFamily: anchor is a singular point");
    int fixIdx = -1;
    for (int i = 0; i < 4; ++i) {
        if (i == solveIdx) continue;
        if (fixIdx < 0 || std::abs(anchor.v[i]) > std::abs(anchor.v[fixIdx])) fixIdx = i;
    }
    std::array<int, 2> par{};
    int np = 0;
    for (int i = 0; i < 4; ++i)
        if (i != solveIdx && i != fixIdx) par[static_cast<std::size_t>(np++)] = i;

    HomogeneousPolynomial dfs = partialDerivative(fn, solveIdx);
    P4 anchorRep = anchor.v;

    // Surface point of the chart: move the two parameter coordinates, keep
    // the fixed one, and solve the remaining coordinate by Newton from the
    // anchor value (implicit-function branch, smooth on a small box).
    auto pointAt = [fn, dfs, anchorRep, solveIdx, par](cplx s1, cplx s2) {
        P4 x = anchorRep;
        x[par[0]] += s1;
        x[par[1]] += s2;
        for (int it = 0; it < 40; ++it) {
            cplx val = fn.evaluate(x);
            if (std::abs(val) < 1e-14) break;
            cplx der = dfs.evaluate(x);
            if (std::abs(der) < 1e-12)
                throw numeric_error("asymptoticTangentFamily: chart Newton stalled");
            x[solveIdx] -= val / der;
        }
        if (std::abs(fn.evaluate(x)) > 1e-10)
            throw numeric_error("asymptoticTangentFamily: chart Newton did not converge");
        return x;
    };

    // Tangent pencil u1 + mu u2 at x and the quadratic the Hessian form
    // induces on it; asymptotic directions are its roots.
    auto pencilAt = [fn, solveIdx, par](const P4& x) {
        P4 g = gradient(fn, x);
        if (std::abs(g[solveIdx]) < 1e-10)
            throw numeric_error("asymptoticTangentFamily: gradient chart degenerated");
        std::array<P4, 2> u{};
        for (int k = 0; k < 2; ++k) {
            u[static_cast<std::size_t>(k)][par[static_cast<std::size_t>(k)]] = 1.0;
            u[static_cast<std::size_t>(k)][solveIdx] = -g[par[static_cast<std::size_t>(k)]] / g[solveIdx];
        }
        auto H = hessian(fn, x);
        auto form = [&](const P4& a, const P4& b) {
            cplx s = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) s += a[i] * H[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * b[j];
            return s;
        };
        cplx qa = form(u[1], u[1]);
        cplx qb = 2.0 * form(u[0], u[1]);
        cplx qc = form(u[0], u[0]);
        if (std::abs(qa) < 1e-10 * (std::abs(qb) + std::abs(qc) + 1e-30))
            throw numeric_error("asymptoticTangentFamily: asymptotic root at chart infinity");
        cplx disc = std::sqrt(qb * qb - 4.0 * qa * qc);
        std::array<cplx, 2> mu{(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)};
        struct Out {
            std::array<P4, 2> u;
            std::array<cplx, 2> mu;
        };
        return Out{u, mu};
    };

    auto at0 = pencilAt(anchorRep);
    if (std::abs(at0.mu[0] - at0.mu[1]) <
        1e-4 * (std::abs(at0.mu[0]) + std::abs(at0.mu[1]) + 1.0))
        throw numeric_error("asymptoticTangentFamily: asymptotic directions coincide at anchor"
                            " (planar point?)");
    // Deterministic branch labels: order the anchor roots lexicographically.
    bool swapAtAnchor = std::real(at0.mu[1]) < std::real(at0.mu[0]) ||
                        (std::real(at0.mu[1]) == std::real(at0.mu[0]) &&
                         std::imag(at0.mu[1]) < std::imag(at0.mu[0]));
    cplx muAnchor = at0.mu[static_cast<std::size_t>(swapAtAnchor ? 1 - branch : branch)];

    LineFamily fam;
    fam.center = {0.0, 0.0};
    fam.radius = radius;
    fam.mode = DerivativeMode::FiniteDifference;
    fam.eval = [pointAt, pencilAt, muAnchor](cplx s1, cplx s2) {
        P4 x = pointAt(s1, s2);
        auto pen = pencilAt(x);
        cplx mu = (std::abs(pen.mu[0] - muAnchor) <= std::abs(pen.mu[1] - muAnchor))
                      ? pen.mu[0]
                      : pen.mu[1];
        LineSample m;
        m.p = x;
        for (int i = 0; i < 4; ++i) m.v[i] = pen.u[0][i] + mu * pen.u[1][i];
        return m;
    };
    return fam;
}

// Bivariate polynomial in the two family parameters; the building block for
// families specified as data (component functions of p and v).
struct BiPoly {
    struct Term {
        int i = 0, j = 0;
        cplx c;
    };
    std::vector<Term> terms;

    cplx operator()(cplx s1, cplx s2) const {
        cplx acc = 0.0;
        for (const auto& t : terms) {
            cplx m = t.c;
            for (int k = 0; k < t.i; ++k) m *= s1;
            for (int k = 0; k < t.j; ++k) m *= s2;
            acc += m;
        }
        return acc;
    }

    BiPoly derivative(int var) const {
        BiPoly d;
        for (const auto& t : terms) {
            int e = (var == 0) ? t.i : t.j;
            if (e == 0) continue;
            Term dt = t;
            dt.c *= static_cast<double>(e);
            if (var == 0)
                --dt.i;
            else
                --dt.j;
            d.terms.push_back(dt);
        }
        return d;
    }
};

// Family with polynomial component functions and analytic jets derived from
// them.  Independence of p and v is checked at the box center.
inline LineFamily polynomialFamily(const std::array<BiPoly, 4>& pc,
                                   const std::array<BiPoly, 4>& vc,
                                   std::array<cplx, 2> center = {0.0, 0.0},
                                   double radius = 1.0) {
    std::array<BiPoly, 4> pc1, pc2, vc1, vc2;
    for (int i = 0; i < 4; ++i) {
        pc1[static_cast<std::size_t>(i)] = pc[static_cast<std::size_t>(i)].derivative(0);
        pc2[static_cast<std::size_t>(i)] = pc[static_cast<std::size_t>(i)].derivative(1);
        vc1[static_cast<std::size_t>(i)] = vc[static_cast<std::size_t>(i)].derivative(0);
        vc2[static_cast<std::size_t>(i)] = vc[static_cast<std::size_t>(i)].derivative(1);
    }
    LineFamily fam;
    fam.center = center;
    fam.radius = radius;
    fam.mode = DerivativeMode::Analytic;
    fam.eval = [pc, vc](cplx s1, cplx s2) {
        LineSample m;
        for (int i = 0; i < 4; ++i) {
            m.p[i] = pc[static_cast<std::size_t>(i)](s1, s2);
            m.v[i] = vc[static_cast<std::size_t>(i)](s1, s2);
        }
        return m;
    };
    fam.jet = [pc, vc, pc1, pc2, vc1, vc2](cplx s1, cplx s2) {
        LineJet j;
        for (int i = 0; i < 4; ++i) {
            auto k = static_cast<std::size_t>(i);
            j.p[i] = pc[k](s1, s2);
            j.v[i] = vc[k](s1, s2);
            j.dp[0][i] = pc1[k](s1, s2);
            j.dp[1][i] = pc2[k](s1, s2);
            j.dv[0][i] = vc1[k](s1, s2);
            j.dv[1][i] = vc2[k](s1, s2);
        }
        return j;
    };

    LineSample m = fam.eval(center[0], center[1]);
    double np = detail::norm4(m.p);
    if (np < 1e-12) throw contract_error("polynomialFamily: zero point at box center");
    P4 ph = detail::scale4(m.p, 1.0 / np);
    P4 vp = detail::axpy4(m.v, -detail::hdot4(ph, m.v), ph);
    if (detail::norm4(vp) <= 1e-10 * std::max(1.0, detail::norm4(m.v)))
        throw contract_error("polynomialFamily: direction parallel to point at box center");
    return fam;
}

}  // namespace mnd
