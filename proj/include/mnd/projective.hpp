#pragma once

// Projective points and lines in P^3, the base plane P^2, and the unitary
// coordinate frames that move a projection center to the standard position
// (0:0:0:1).  Lines are stored as base point + direction; the projection is
// "drop the last coordinate" once a frame is applied.

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "core.hpp"
#include "homogeneous.hpp"

namespace mnd {

namespace detail {

template <std::size_t N>
std::array<cplx, N> normalizeCoords(std::array<cplx, N> v) {
    double m = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double a = std::abs(v[i]);
        if (a > m + 1e-15 * m) {
            m = a;
            arg = i;
        }
    }
    if (m == 0.0) throw contract_error("projective point: zero coordinate vector");
    cplx piv = v[arg];
    for (auto& c : v) c /= piv;
    return v;
}

template <std::size_t N>
double coordDistance(const std::array<cplx, N>& a, const std::array<cplx, N>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace detail

// Point of P^3, kept in the normalized representative whose largest-magnitude
// coordinate is exactly 1 (ties broken by lowest index).
struct ProjectivePoint {
    P4 v;
    explicit ProjectivePoint(const P4& raw) : v(detail::normalizeCoords(raw)) {}
    ProjectivePoint(cplx a, cplx b, cplx c, cplx d) : ProjectivePoint(P4{a, b, c, d}) {}
};

struct PlanePoint {
    P3 v;
    explicit PlanePoint(const P3& raw) : v(detail::normalizeCoords(raw)) {}
    PlanePoint(cplx a, cplx b, cplx c) : PlanePoint(P3{a, b, c}) {}
};

inline bool samePoint(const ProjectivePoint& a, const ProjectivePoint& b, double tol = defaults::point_eq_tol) {
    return detail::coordDistance(a.v, b.v) <= tol;
}
inline bool samePoint(const PlanePoint& a, const PlanePoint& b, double tol = defaults::point_eq_tol) {
    return detail::coordDistance(a.v, b.v) <= tol;
}

// Line in P^3 through basePoint with the given direction.  The direction is
// orthogonalized against the base (Hermitian) and scaled to unit norm, so the
// two vectors always span rank 2.
struct ProjectiveLine {
    P4 base;
    P4 dir;

    ProjectiveLine(const ProjectivePoint& p, const P4& direction) : base(p.v) {
        cplx bb = 0.0, bd = 0.0;
        for (int i = 0; i < 4; ++i) {
            bb += std::conj(base[i]) * base[i];
            bd += std::conj(base[i]) * direction[i];
        }
        double nd2 = 0.0;
        for (int i = 0; i < 4; ++i) {
            dir[i] = direction[i] - (bd / bb) * base[i];
            nd2 += std::norm(dir[i]);
        }
        double nd = std::sqrt(nd2);
        double nb = std::sqrt(std::abs(bb));
        if (nd <= 1e-12 * nb) throw contract_error("ProjectiveLine: direction parallel to base point");
        for (auto& c : dir) c /= nd;
    }

    P4 at(cplx t) const {
        P4 x;
        for (int i = 0; i < 4; ++i) x[i] = base[i] + t * dir[i];
        return x;
    }
};

inline ProjectiveLine lineThrough(const ProjectivePoint& p, const ProjectivePoint& q) {
    if (samePoint(p, q, 1e-12)) throw contract_error("lineThrough: points coincide");
    return ProjectiveLine(p, q.v);
}

// Unitary change of coordinates T with T(center) = (0:0:0:1); inverse is the
// conjugate transpose.  Built from a single Householder reflection, with the
// phase arranged so the map is exact on the center.
struct ProjectiveFrame {
    Eigen::Matrix4cd T;
    Eigen::Matrix4cd Tinv;
};

inline Eigen::Vector4cd toEigen(const P4& x) {
    Eigen::Vector4cd v;
    for (int i = 0; i < 4; ++i) v(i) = x[i];
    return v;
}
inline P4 fromEigen(const Eigen::Vector4cd& v) { return {v(0), v(1), v(2), v(3)}; }

inline ProjectiveFrame frameForCenter(const ProjectivePoint& center) {
    Eigen::Vector4cd l = toEigen(center.v);
    l /= l.norm();
    cplx phase = (std::abs(l(3)) > 1e-14) ? l(3) / std::abs(l(3)) : cplx(1.0);
    Eigen::Vector4cd b = Eigen::Vector4cd::Zero();
    b(3) = phase;
    Eigen::Vector4cd w = l - b;
    Eigen::Matrix4cd H;
    double wn2 = std::real(w.squaredNorm());
    if (wn2 < 1e-28) {
        H = Eigen::Matrix4cd::Identity();
    } else {
        H = Eigen::Matrix4cd::Identity() - (2.0 / wn2) * (w * w.adjoint());
    }
    ProjectiveFrame f;
    f.T = (cplx(1.0) / phase) * H;
    f.Tinv = f.T.adjoint();
    return f;
}

inline P4 applyFrame(const ProjectiveFrame& f, const P4& x) { return fromEigen(f.T * toEigen(x)); }
inline P4 applyFrameInverse(const ProjectiveFrame& f, const P4& x) { return fromEigen(f.Tinv * toEigen(x)); }

// f composed with the inverse frame: the defining equation of the surface in
// the moved coordinates.  Degree is preserved.
inline HomogeneousPolynomial pushforward(const HomogeneousPolynomial& f, const ProjectiveFrame& frame) {
    std::array<std::array<cplx, 4>, 4> M;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) M[i][j] = frame.Tinv(i, j);
    return composeLinear(f, M);
}

// Image of x under the projection from the frame's center.
inline PlanePoint project(const ProjectiveFrame& f, const ProjectivePoint& x) {
    Eigen::Vector4cd y = f.T * toEigen(x.v);
    double head = std::sqrt(std::norm(y(0)) + std::norm(y(1)) + std::norm(y(2)));
    if (head <= 1e-12 * y.norm()) throw contract_error("project: point equals the center");
    return PlanePoint(P3{y(0), y(1), y(2)});
}

// The line through the center that projects to y: the fiber of the
// projection over y.
inline ProjectiveLine fiberLine(const ProjectiveFrame& f, const PlanePoint& y) {
    Eigen::Vector4cd lift;
    lift << y.v[0], y.v[1], y.v[2], cplx(0.0);
    P4 base = fromEigen(f.Tinv * lift);
    Eigen::Vector4cd e4 = Eigen::Vector4cd::Zero();
    e4(3) = 1.0;
    P4 dir = fromEigen(f.Tinv * e4);
    return ProjectiveLine(ProjectivePoint(base), dir);
}

}  // namespace mnd
