#pragma once

// Branch locus machinery: exact fiber polynomials of a framed projection, the
// discriminant curve in the base plane recovered by torus-node interpolation,
// its square-free part, local multiplicities, and pencil slices for loops.

#include <vector>
#include <array>
#include <string>
#include <functional>
#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "core.hpp"
#include "rng.hpp"
#include "univariate.hpp"
#include "roots.hpp"
#include "homogeneous.hpp"
#include "projective.hpp"

namespace mnd {

// Coefficient forms of the fiber polynomial: after moving the center to
// (0:0:0:1) the surface reads g(y,t) = sum_k parts[k](y) t^k with parts[k]
// homogeneous of degree d-k in the base coordinates y and parts[d] a nonzero
// constant (the center is off the surface). Exact in the coefficients, so
// fibers over any y come from one shared symbolic object.
struct FiberSystem {
    ProjectiveFrame frame;
    std::vector<HomogeneousPolynomial> parts;
    int d = 0;
    cplx leading;

    UnivariatePolynomial fiberPoly(const P3& y) const {
        std::vector<cplx> c(static_cast<std::size_t>(d) + 1);
        for (int k = 0; k <= d; ++k)
            c[static_cast<std::size_t>(k)] = parts[static_cast<std::size_t>(k)].isZero()
                                                 ? cplx(0.0)
                                                 : parts[static_cast<std::size_t>(k)].evaluate(y);
        UnivariatePolynomial p(std::move(c));
        if (p.degree() != d)
            throw numeric_error("FiberSystem: fiber polynomial degenerated; center too close to the surface");
        return p;
    }
};

inline FiberSystem fiberSystem(const HomogeneousPolynomial& f, const ProjectiveFrame& frame) {
    if (f.numVars() != 4) throw contract_error("fiberSystem: expected a 4-variable form");
    if (f.degree() < 2) throw contract_error("fiberSystem: surface degree must be >= 2");
    FiberSystem fs;
    fs.frame = frame;
    HomogeneousPolynomial g = pushforward(f.normalized(), frame);
    fs.parts = collectByLastVar(g);
    fs.d = f.degree();
    const auto& top = fs.parts[static_cast<std::size_t>(fs.d)];
    double scale = g.maxAbsCoeff();
    if (top.isZero() || std::abs(top.terms()[0].c) <= 1e-10 * scale)
        throw contract_error("fiberSystem: projection center lies on the surface");
    fs.leading = top.terms()[0].c;
    return fs;
}

struct PlaneCurve {
    HomogeneousPolynomial poly;
    int degree = 0;

    PlaneCurve() = default;
    explicit PlaneCurve(HomogeneousPolynomial p) : poly(std::move(p)), degree(poly.degree()) {
        if (poly.numVars() != 3) throw contract_error("PlaneCurve: expected a 3-variable form");
        if (poly.isZero()) throw contract_error("PlaneCurve: zero polynomial");
    }

    // Bound on |poly| over representatives normalized to max coordinate 1.
    double onPointScale() const {
        double s = 0.0;
        for (const auto& m : poly.terms()) s += std::abs(m.c);
        return s;
    }

    bool vanishesAt(const P3& y, double tol = defaults::point_eq_tol) const {
        P3 yn = detail::normalizeCoords(y);
        return std::abs(poly.evaluate(yn)) <= tol * onPointScale();
    }
};

namespace detail {

inline double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    std::size_t n = index + 1;
    while (n > 0) {
        f /= base;
        r += f * static_cast<double>(n % static_cast<std::size_t>(base));
        n /= static_cast<std::size_t>(base);
    }
    return r;
}

// Unit-modulus coordinates keep every monomial of every degree at modulus 1,
// so the interpolation matrix is a well-scaled character matrix.
inline P3 torusNode(std::size_t j, std::size_t offset) {
    constexpr double twoPi = 6.283185307179586476925286766559;
    const int bases[3] = {2, 3, 5};
    P3 y;
    for (int i = 0; i < 3; ++i) {
        double a = twoPi * halton(j + offset, bases[i]);
        y[static_cast<std::size_t>(i)] = cplx(std::cos(a), std::sin(a));
    }
    return y;
}

inline std::vector<std::array<int, 4>> exponents3(int degree) {
    std::vector<std::array<int, 4>> es;
    for (int a = degree; a >= 0; --a)
        for (int b = degree - a; b >= 0; --b) es.push_back({a, b, degree - a - b, 0});
    return es;
}

}  // namespace detail

// Fit a degree-D form in 3 variables to a black-box function by sampling it on
// deterministic torus nodes and solving the square character system. Validated
// against held-out nodes; the node set is reseeded when ill-conditioned or
// when the evaluator rejects a node line.
inline HomogeneousPolynomial interpolateForm3(int degree,
                                              const std::function<cplx(const P3&)>& valueAt,
                                              double heldOutTol = 1e-8,
                                              const std::string& what = "interpolateForm3") {
    if (degree < 1) throw contract_error(what + ": degree must be >= 1");
    const auto es = detail::exponents3(degree);
    const int n = static_cast<int>(es.size());
    const int held = std::max(8, n / 8);
    std::string lastIssue = "no attempt made";

    for (int attempt = 0; attempt < 4; ++attempt) {
        const std::size_t offset = 1000 + 7919 * static_cast<std::size_t>(attempt);
        Eigen::MatrixXcd a(n, n);
        Eigen::VectorXcd rhs(n);
        double valScale = 0.0;
        try {
            for (int j = 0; j < n; ++j) {
                P3 y = detail::torusNode(static_cast<std::size_t>(j), offset);
                for (int m = 0; m < n; ++m) {
                    cplx mono = 1.0;
                    for (int i = 0; i < 3; ++i)
                        for (int e = 0; e < es[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)]; ++e)
                            mono *= y[static_cast<std::size_t>(i)];
                    a(j, m) = mono;
                }
                rhs(j) = valueAt(y);
                valScale = std::max(valScale, std::abs(rhs(j)));
            }
        } catch (const numeric_error& e) {
            lastIssue = e.what();
            continue;
        }
        if (valScale == 0.0) throw numeric_error(what + ": sampled values are identically zero");

        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
        const auto& r = qr.matrixR();
        double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double v = std::abs(r(i, i));
            dmax = std::max(dmax, v);
            dmin = std::min(dmin, v);
        }
        if (!(dmin > 0.0) || dmax / dmin > 1e8) {
            lastIssue = "node matrix ill-conditioned";
            continue;
        }
        Eigen::VectorXcd coef = qr.solve(rhs);

        std::vector<Monomial> terms;
        terms.reserve(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) terms.push_back({es[static_cast<std::size_t>(m)], coef(m)});
        HomogeneousPolynomial fit(3, degree, std::move(terms));
        if (fit.isZero()) throw numeric_error(what + ": interpolated form is zero");

        double worst = 0.0;
        bool usable = true;
        try {
            for (int h = 0; h < held; ++h) {
                P3 y = detail::torusNode(static_cast<std::size_t>(n + h), offset);
                worst = std::max(worst, std::abs(fit.evaluate(y) - valueAt(y)));
            }
        } catch (const numeric_error& e) {
            lastIssue = e.what();
            usable = false;
        }
        if (!usable) continue;
        if (worst <= heldOutTol * std::max(1.0, valScale)) return fit;
        lastIssue = "held-out residual " + std::to_string(worst) + " above tolerance";
    }
    throw numeric_error(what + ": interpolation failed validation (" + lastIssue + ")");
}

// The branch divisor of the projection: the plane form whose value at y is the
// discriminant of the fiber polynomial over y. Degree d(d-1).
inline PlaneCurve discriminantCurve(const HomogeneousPolynomial& f, const ProjectiveFrame& frame,
                                    double heldOutTol = 1e-8) {
    FiberSystem fs = fiberSystem(f, frame);
    const int degree = fs.d * (fs.d - 1);
    auto val = [&fs](const P3& y) { return univariateDiscriminant(fs.fiberPoly(y)); };
    HomogeneousPolynomial fit = interpolateForm3(degree, val, heldOutTol, "discriminantCurve");
    return PlaneCurve(fit.normalized());
}

inline PlaneCurve discriminantCurve(const FiberSystem& fs, double heldOutTol = 1e-8) {
    const int degree = fs.d * (fs.d - 1);
    auto val = [&fs](const P3& y) { return univariateDiscriminant(fs.fiberPoly(y)); };
    HomogeneousPolynomial fit = interpolateForm3(degree, val, heldOutTol, "discriminantCurve");
    return PlaneCurve(fit.normalized());
}

// Square-free part: same zero set, all component multiplicities reduced to 1.
//
// Pointwise values of the reduced form come from root products on lines
// through a fixed vantage point z off the curve: if the restriction of c to
// the line from z to y has distinct roots u_1..u_s (the parameter is 0 at z,
// 1 at y), then reduced(y)/reduced(z) = prod (1 - u_i)/(-u_i) exactly. The
// values are interpolated back into a form of the reduced degree.
inline PlaneCurve squareFreePart(const PlaneCurve& c, double clusterTol = defaults::cluster_tol,
                                 double heldOutTol = 1e-6) {
    const int bigD = c.degree;
    if (bigD <= 1) return PlaneCurve(c.poly.normalized());

    Rng rng(0x53514652ull);
    P3 z{};
    bool haveZ = false;
    for (int attempt = 0; attempt < 64 && !haveZ; ++attempt) {
        P3 cand{rng.box(), rng.box(), rng.box()};
        cand = detail::normalizeCoords(cand);
        if (std::abs(c.poly.evaluate(cand)) > 1e-3 * c.onPointScale()) {
            z = cand;
            haveZ = true;
        }
    }
    if (!haveZ) throw numeric_error("squareFreePart: could not find a vantage point off the curve");

    // Interpolated curves carry relative coefficient noise around the
    // validation tolerance, which scatters an m-fold root by ~noise^(1/m),
    // well past the exact-arithmetic cluster tolerance. Distinct intersection
    // points on random lines sit orders of magnitude further apart, so a
    // loosened linkage radius is the right merge scale here.
    const double mergeTol = std::max(clusterTol, 1e-5);

    // Clustered roots of c along the line z + u*dir, or empty on a bad line.
    auto lineClusters = [&](const P3& dir) -> std::vector<RootCluster> {
        UnivariatePolynomial r = restrictToLine(c.poly, z, dir);
        if (r.degree() != bigD) return {};
        std::vector<RootCluster> clusters;
        try {
            clusters = clusteredRoots(r, mergeTol);
        } catch (const numeric_error&) {
            return {};
        }
        int msum = 0;
        for (const auto& cl : clusters) msum += cl.multiplicity;
        if (msum != bigD) return {};
        return clusters;
    };

    // Distinct-root counts only drop on special lines, so the reduced degree
    // is the max over a handful of probes.
    int reduced = 0;
    std::vector<RootCluster> witnessClusters;
    P3 witnessDir{};
    for (int probe = 0; probe < 8; ++probe) {
        P3 w{rng.box(), rng.box(), rng.box()};
        auto clusters = lineClusters(w);
        if (static_cast<int>(clusters.size()) > reduced) {
            reduced = static_cast<int>(clusters.size());
            witnessClusters = clusters;
            witnessDir = w;
        }
    }
    if (reduced <= 0) throw numeric_error("squareFreePart: could not probe the curve along any line");
    if (reduced == bigD) return PlaneCurve(c.poly.normalized());

    // Scaling the representative y by a phase keeps the projective line but
    // moves the parametrization, so a root-finding hiccup on one node line can
    // be dodged; the product scales by the phase to the reduced degree.
    auto val = [&](const P3& y) -> cplx {
        for (int k = 0; k < 6; ++k) {
            cplx lam = std::polar(1.0, 0.9371 * k);
            P3 yk{lam * y[0], lam * y[1], lam * y[2]};
            P3 dir{yk[0] - z[0], yk[1] - z[1], yk[2] - z[2]};
            auto clusters = lineClusters(dir);
            if (static_cast<int>(clusters.size()) != reduced) continue;
            cplx prod = 1.0;
            for (const auto& cl : clusters) prod *= (cplx(1.0) - cl.center) / (-cl.center);
            return prod / std::pow(lam, reduced);
        }
        throw numeric_error("squareFreePart: degenerate node line");
    };
    HomogeneousPolynomial fit = interpolateForm3(reduced, val, heldOutTol, "squareFreePart");
    PlaneCurve out(fit.normalized());

    // Zero sets must agree: the reduced form vanishes at every root of the
    // original curve along the witness line.
    for (const auto& cl : witnessClusters) {
        P3 pt{z[0] + cl.center * witnessDir[0], z[1] + cl.center * witnessDir[1],
              z[2] + cl.center * witnessDir[2]};
        if (!out.vanishesAt(pt, 1e-5))
            throw numeric_error("squareFreePart: reduced curve misses a zero of the input");
    }
    return out;
}

// Order of vanishing of the curve at y along generic lines: the minimum over
// a few random directions of the first nonzero restriction coefficient.
inline int localMultiplicity(const PlaneCurve& c, const P3& y, double tol = defaults::cluster_tol) {
    P3 yn = detail::normalizeCoords(y);
    if (!c.vanishesAt(yn, std::max(tol, defaults::point_eq_tol)))
        throw contract_error("localMultiplicity: point is not on the curve");
    Rng rng(0xB7A9Cull);
    int best = c.degree + 1;
    for (int k = 0; k < 3; ++k) {
        P3 w{rng.box(), rng.box(), rng.box()};
        UnivariatePolynomial q = restrictToLine(c.poly, yn, w);
        double qs = q.maxAbs();
        if (qs <= 0.0) continue;
        int ord = 0;
        while (ord <= q.degree() && std::abs(q.coeffs()[static_cast<std::size_t>(ord)]) <= tol * qs) ++ord;
        best = std::min(best, ord);
    }
    if (best > c.degree) throw numeric_error("localMultiplicity: all probe directions degenerate");
    return best;
}

struct Puncture {
    cplx u;
    int multiplicity = 1;
};

// A line through a base point off the curve together with the clustered
// parameters where it crosses the curve. Loop generation starts here.
struct PencilSlice {
    P3 base{};
    P3 dir{};
    std::vector<Puncture> punctures;
};

inline PencilSlice pencilSlice(const PlaneCurve& c, const P3& basePoint, std::uint64_t seed,
                               double clusterTol = defaults::cluster_tol,
                               double separationFloor = 1e-4) {
    P3 b = detail::normalizeCoords(basePoint);
    if (c.vanishesAt(b, 1e-7)) throw contract_error("pencilSlice: base point lies on the curve");
    Rng rng(seed);
    for (int attempt = 0; attempt < 40; ++attempt) {
        P3 w{rng.box(), rng.box(), rng.box()};
        // orthogonalize against the base representative for conditioning
        cplx bb = 0.0, wb = 0.0;
        for (int i = 0; i < 3; ++i) {
            bb += b[static_cast<std::size_t>(i)] * std::conj(b[static_cast<std::size_t>(i)]);
            wb += w[static_cast<std::size_t>(i)] * std::conj(b[static_cast<std::size_t>(i)]);
        }
        double norm = 0.0;
        for (int i = 0; i < 3; ++i) {
            w[static_cast<std::size_t>(i)] -= (wb / bb) * b[static_cast<std::size_t>(i)];
            norm += std::norm(w[static_cast<std::size_t>(i)]);
        }
        norm = std::sqrt(norm);
        if (norm < 1e-6) continue;
        for (auto& wi : w) wi /= norm;

        UnivariatePolynomial q = restrictToLine(c.poly, b, w);
        if (q.degree() != c.degree) continue;
        std::vector<RootCluster> clusters;
        try {
            clusters = clusteredRoots(q, clusterTol);
        } catch (const numeric_error&) {
            continue;
        }
        int msum = 0;
        double scale = 1.0;
        for (const auto& cl : clusters) {
            msum += cl.multiplicity;
            scale = std::max(scale, std::abs(cl.center));
        }
        if (msum != c.degree) continue;
        double minsep = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j)
                minsep = std::min(minsep, std::abs(clusters[i].center - clusters[j].center));
        if (clusters.size() >= 2 && minsep <= separationFloor * scale) continue;

        PencilSlice s;
        s.base = b;
        s.dir = w;
        for (const auto& cl : clusters) s.punctures.push_back({cl.center, cl.multiplicity});
        return s;
    }
    throw numeric_error("pencilSlice: no well-separated slice line found within the retry budget");
}

}  // namespace mnd
