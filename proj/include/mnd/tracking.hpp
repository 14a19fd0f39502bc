#pragma once

// Loop tracking over the base plane: solve the fiber at a base point, build
// one loop per branch puncture of a pencil slice, and continue the whole
// fiber along each loop to read off its permutation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "branch_curve.hpp"
#include "config.hpp"
#include "contact.hpp"
#include "core.hpp"
#include "permutation.hpp"
#include "projective.hpp"
#include "roots.hpp"
#include "rng.hpp"

namespace mnd {

struct FiberPoint {
    cplx t;
    ProjectivePoint x;
};

// The d points of the fiber over a base point, ordered by the root sort of
// the fiber polynomial (deterministic given the base point).
struct Fiber {
    P3 basePoint{};
    std::vector<FiberPoint> points;
};

inline Fiber solveBaseFiber(const FiberSystem& fs, const P3& y, double tol = defaults::residual_tol) {
    P3 yn = detail::normalizeCoords(y);
    UnivariatePolynomial q = fs.fiberPoly(yn);
    auto clusters = clusteredRoots(q, defaults::cluster_tol);
    if (static_cast<int>(clusters.size()) != fs.d)
        throw numeric_error("solveBaseFiber: multiple fiber point, base too close to the branch curve");
    Fiber fb;
    fb.basePoint = yn;
    for (const auto& cl : clusters) {
        cplx t = cl.center;
        detail::newtonPolish(q, t, 12);
        if (std::abs(q(t)) > tol * q.residualScale(t))
            throw numeric_error("solveBaseFiber: fiber root failed to reach the residual target");
        Eigen::Vector4cd lifted;
        lifted << yn[0], yn[1], yn[2], t;
        fb.points.push_back({t, ProjectivePoint(fromEigen(fs.frame.Tinv * lifted))});
    }
    for (std::size_t i = 0; i < fb.points.size(); ++i)
        for (std::size_t j = i + 1; j < fb.points.size(); ++j)
            if (std::abs(fb.points[i].t - fb.points[j].t) <= defaults::cluster_tol)
                throw numeric_error("solveBaseFiber: fiber points collide");
    return fb;
}

inline Fiber solveBaseFiber(const HomogeneousPolynomial& f, const ProjectiveFrame& frame, const P3& y,
                            double tol = defaults::residual_tol) {
    return solveBaseFiber(fiberSystem(f, frame), y, tol);
}

enum class LoopKind { SegmentCircleSegment };

// A closed polyline in the slice parameter u: out from the base, once
// counterclockwise around a single puncture, and back the same way.
struct Loop {
    LoopKind kind = LoopKind::SegmentCircleSegment;
    P3 sliceBase{};
    P3 sliceDir{};
    cplx center;
    double radius = 0.0;
    std::vector<cplx> path;  // front() == back()

    double arcLength() const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) s += std::abs(path[i + 1] - path[i]);
        return s;
    }
};

namespace detail {

// Distance from a point p to the segment [a, b].
inline double segmentDistance(cplx a, cplx b, cplx p) {
    cplx ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double s = std::clamp(std::real(std::conj(ab) * (p - a)) / len2, 0.0, 1.0);
    return std::abs(a + s * ab - p);
}

// Polyline from a to b dodging the obstacle disks: whenever the straight
// segment cuts a disk, replace the chord inside it by the shorter arc along
// an inflated boundary circle, then route the remainder recursively.
inline void routeSegment(cplx a, cplx b, const std::vector<cplx>& obstacles,
                         const std::vector<double>& safeRadius, int depth,
                         std::vector<cplx>& out) {
    if (depth > 12) {
        out.push_back(b);
        return;
    }
    cplx ab = b - a;
    double len = std::abs(ab);
    int hit = -1;
    double hitS = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < obstacles.size(); ++k) {
        if (len == 0.0) break;
        double s = std::clamp(std::real(std::conj(ab) * (obstacles[k] - a)) / (len * len), 0.0, 1.0);
        if (std::abs(a + s * ab - obstacles[k]) < safeRadius[k] &&
            std::abs(a - obstacles[k]) > safeRadius[k] * 0.999 &&
            std::abs(b - obstacles[k]) > safeRadius[k] * 0.999 && s < hitS) {
            hit = static_cast<int>(k);
            hitS = s;
        }
    }
    if (hit < 0) {
        out.push_back(b);
        return;
    }
    cplx c = obstacles[static_cast<std::size_t>(hit)];
    double r = safeRadius[static_cast<std::size_t>(hit)] * 1.1;
    // entry and exit angles of the chord through the inflated circle
    double proj = std::real(std::conj(ab) * (c - a)) / len;
    double perp2 = std::norm(c - a) - proj * proj;
    double half = std::sqrt(std::max(r * r - perp2, 1e-30));
    cplx dirU = ab / len;
    cplx p = a + (proj - half) * dirU;
    cplx q = a + (proj + half) * dirU;
    double a0 = std::arg(p - c), a1 = std::arg(q - c);
    double sweep = a1 - a0;
    while (sweep > std::numbers::pi) sweep -= 2.0 * std::numbers::pi;
    while (sweep < -std::numbers::pi) sweep += 2.0 * std::numbers::pi;
    int n = std::max(4, static_cast<int>(std::ceil(std::abs(sweep) / 0.5)));
    routeSegment(a, p, obstacles, safeRadius, depth + 1, out);
    for (int i = 1; i <= n; ++i)
        out.push_back(c + std::polar(r, a0 + sweep * double(i) / double(n)));
    routeSegment(q, b, obstacles, safeRadius, depth + 1, out);
}

}  // namespace detail

// One loop per puncture: approach segment (with detours around the other
// punctures' safety disks), a full counterclockwise circle, and the same way
// back.  Loops come out ordered by angle of the puncture seen from the base.
inline std::vector<Loop> generateLoops(const PencilSlice& slice, cplx basePointParam = 0.0,
                                       int circleNodes = 24) {
    const auto& ps = slice.punctures;
    if (ps.empty()) return {};
    for (const auto& p : ps)
        if (std::abs(p.u - basePointParam) < 1e-9)
            throw contract_error("generateLoops: base parameter sits on a puncture");

    std::vector<std::size_t> order(ps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return std::arg(ps[i].u - basePointParam) < std::arg(ps[j].u - basePointParam);
    });

    std::vector<double> radius(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        double r = 0.5 * std::abs(ps[i].u - basePointParam);
        for (std::size_t j = 0; j < ps.size(); ++j)
            if (j != i) r = std::min(r, 0.5 * std::abs(ps[i].u - ps[j].u));
        radius[i] = r;
    }

    std::vector<Loop> loops;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        std::size_t i = order[oi];
        Loop lp;
        lp.sliceBase = slice.base;
        lp.sliceDir = slice.dir;
        lp.center = ps[i].u;
        lp.radius = radius[i];

        std::vector<cplx> obstacles;
        std::vector<double> safe;
        for (std::size_t j = 0; j < ps.size(); ++j)
            if (j != i) {
                obstacles.push_back(ps[j].u);
                safe.push_back(0.6 * radius[j]);
            }

        cplx entry = ps[i].u + lp.radius * (basePointParam - ps[i].u) / std::abs(basePointParam - ps[i].u);
        std::vector<cplx> approach{basePointParam};
        detail::routeSegment(basePointParam, entry, obstacles, safe, 0, approach);

        lp.path = approach;
        double a0 = std::arg(entry - ps[i].u);
        for (int k = 1; k <= circleNodes; ++k) {
            double ang = a0 + 2.0 * std::numbers::pi * double(k) / double(circleNodes);
            lp.path.push_back(ps[i].u + std::polar(lp.radius, ang));
        }
        lp.path.back() = entry;  // close the circle exactly
        for (std::size_t k = approach.size(); k-- > 0;) lp.path.push_back(approach[k]);

        // safety invariant: the whole path keeps clear of other punctures
        for (std::size_t j = 0; j < ps.size(); ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k + 1 < lp.path.size(); ++k)
                if (detail::segmentDistance(lp.path[k], lp.path[k + 1], ps[j].u) < 0.5 * radius[j])
                    throw numeric_error("generateLoops: overlapping safety disks");
        }
        loops.push_back(std::move(lp));
    }
    return loops;
}

// Running log of a tracking session.
struct TrackingCertificate {
    long long steps = 0;
    long long rejectedSteps = 0;
    double minSeparation = std::numeric_limits<double>::infinity();
    double residualMax = 0.0;
    int loopsTracked = 0;
    int slicesUsed = 0;
};

namespace detail {

struct TrackAttemptFailure {};  // internal: step underflow or matching trouble

inline Permutation trackLoopOnce(const SliceRestriction& h, const std::vector<cplx>& startTs,
                                 const Loop& loop, const TrackerConfig& cfg, double stepFraction,
                                 TrackingCertificate* cert) {
    const int d = static_cast<int>(startTs.size());
    std::vector<cplx> ts = startTs;
    const double arc = loop.arcLength();
    const double baseStep = std::max(arc * stepFraction, 1e-12);

    auto minSep = [&](const std::vector<cplx>& v) {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) m = std::min(m, std::abs(v[i] - v[j]));
        return m;
    };

    for (std::size_t leg = 0; leg + 1 < loop.path.size(); ++leg) {
        cplx a = loop.path[leg], b = loop.path[leg + 1];
        double len = std::abs(b - a);
        if (len == 0.0) continue;
        double s = 0.0;
        double ds = std::min(1.0, baseStep / len);
        int halvings = 0;
        while (s < 1.0) {
            double step = std::min(ds, 1.0 - s);
            cplx u0 = a + s * (b - a);
            cplx u1 = a + (s + step) * (b - a);
            cplx du = u1 - u0;

            double sepBefore = (d > 1) ? minSep(ts) : 1.0;
            std::vector<cplx> next(ts.size());
            bool ok = true;
            double resMax = 0.0;
            for (int i = 0; i < d && ok; ++i) {
                cplx t = ts[static_cast<std::size_t>(i)];
                cplx dh = h.ht(u0, t);
                if (std::abs(dh) < 1e-280) { ok = false; break; }
                t -= h.hu(u0, t) / dh * du;  // first-order predictor
                for (int it = 0; it < cfg.maxNewtonIters; ++it) {
                    cplx val = h.h(u1, t);
                    cplx der = h.ht(u1, t);
                    if (std::abs(der) < 1e-280) break;
                    cplx corr = val / der;
                    t -= corr;
                    if (std::abs(corr) < 1e-13 * std::max(1.0, std::abs(t))) break;
                }
                double res = std::abs(h.h(u1, t)) / h.scaleAt(u1, t);
                if (res > cfg.correctorTol) { ok = false; break; }
                // a corrector that moved half-way to a neighbor has jumped sheets
                if (std::abs(t - ts[static_cast<std::size_t>(i)]) > 0.45 * sepBefore) { ok = false; break; }
                resMax = std::max(resMax, res);
                next[static_cast<std::size_t>(i)] = t;
            }
            if (ok && d > 1 && minSep(next) <= cfg.clusterTol) ok = false;
            if (!ok) {
                if (cert) ++cert->rejectedSteps;
                ds *= 0.5;
                if (++halvings > cfg.maxHalvings)
                    throw TrackAttemptFailure{};
                continue;
            }
            ts = std::move(next);
            s += step;
            ds = std::min(ds * 2.0, std::min(1.0, baseStep / len) * 4.0);
            if (cert) {
                ++cert->steps;
                cert->residualMax = std::max(cert->residualMax, resMax);
                if (d > 1) cert->minSeparation = std::min(cert->minSeparation, minSep(ts));
            }
        }
    }

    // nearest-neighbor endpoint matching with a margin
    std::vector<int> images(static_cast<std::size_t>(d), -1);
    std::vector<bool> taken(static_cast<std::size_t>(d), false);
    for (int i = 0; i < d; ++i) {
        double best = std::numeric_limits<double>::infinity();
        double second = best;
        int arg = -1;
        for (int j = 0; j < d; ++j) {
            double dd = std::abs(ts[static_cast<std::size_t>(i)] - startTs[static_cast<std::size_t>(j)]);
            if (dd < best) {
                second = best;
                best = dd;
                arg = j;
            } else {
                second = std::min(second, dd);
            }
        }
        if (d > 1 && second < cfg.marginRatio * best) throw TrackAttemptFailure{};
        if (taken[static_cast<std::size_t>(arg)]) throw TrackAttemptFailure{};
        taken[static_cast<std::size_t>(arg)] = true;
        images[static_cast<std::size_t>(i)] = arg;
    }
    return Permutation::fromImages(images);
}

}  // namespace detail

// Continue the fiber around the loop and return the permutation matching end
// points to start points.  Matching ambiguity restarts the whole loop at half
// the step size.
inline Permutation trackLoop(const FiberSystem& fs, const Fiber& fiber, const Loop& loop,
                             const TrackerConfig& cfg = {}, TrackingCertificate* cert = nullptr) {
    if (loop.path.size() < 2) return Permutation(static_cast<int>(fiber.points.size()));
    SliceRestriction h = sliceRestriction(fs, loop.sliceBase, loop.sliceDir);
    std::vector<cplx> ts;
    ts.reserve(fiber.points.size());
    for (const auto& p : fiber.points) ts.push_back(p.t);

    double frac = cfg.initialStepFraction;
    for (int attempt = 0; attempt < 4; ++attempt, frac *= 0.5) {
        try {
            Permutation p = detail::trackLoopOnce(h, ts, loop, cfg, frac, cert);
            if (cert) ++cert->loopsTracked;
            return p;
        } catch (const detail::TrackAttemptFailure&) {
            continue;
        }
    }
    throw numeric_error("trackLoop: no unambiguous continuation within the halving budget");
}

inline Permutation trackLoop(const HomogeneousPolynomial& f, const ProjectiveFrame& frame,
                             const Fiber& fiber, const Loop& loop, const TrackerConfig& cfg = {},
                             TrackingCertificate* cert = nullptr) {
    return trackLoop(fiberSystem(f, frame), fiber, loop, cfg, cert);
}

}  // namespace mnd
