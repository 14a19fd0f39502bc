#pragma once

// Simultaneous root finding (Aberth-Ehrlich), root clustering with
// multiplicity escalation, and the resultant-based discriminant.

#include <vector>
#include <algorithm>
#include <numeric>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "core.hpp"
#include "univariate.hpp"

namespace mnd {

struct RootCluster {
    cplx center;
    int multiplicity = 1;
    double radius = 0.0;  // max member distance from center
};

namespace detail {

// Fujiwara upper bound on root magnitudes.
inline double rootRadiusBound(const UnivariatePolynomial& q) {
    const auto& a = q.coeffs();
    int n = q.degree();
    double an = std::abs(a[n]);
    double r = 0.0;
    for (int k = 0; k < n; ++k) {
        double base = std::abs(a[k]) / an;
        if (k == 0) base *= 0.5;
        if (base > 0.0) r = std::max(r, std::pow(base, 1.0 / double(n - k)));
    }
    return 2.0 * std::max(r, 1e-12);
}

inline void newtonPolish(const UnivariatePolynomial& q, cplx& z, int iters) {
    for (int it = 0; it < iters; ++it) {
        auto [p, dp] = q.evalWithDerivative(z);
        if (std::abs(dp) == 0.0) return;
        cplx step = p / dp;
        z -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(z))) return;
    }
}

}  // namespace detail

// All complex roots of q, with residual |q(r)| <= tol * scale at each.
// Multiple roots come back as tight clumps of simple approximations; callers
// that care about multiplicity structure go through clusteredRoots below.
inline std::vector<cplx> allRoots(const UnivariatePolynomial& qin, double tol = defaults::root_tol) {
    if (qin.isZero()) throw contract_error("allRoots: zero polynomial");
    UnivariatePolynomial q = qin.normalized();
    int n = q.degree();
    if (n == 0) return {};
    const auto& a = q.coeffs();
    if (n == 1) return {-a[0] / a[1]};
    if (n == 2) {
        // Numerically stable quadratic formula.
        cplx b = a[1] / a[2], c = a[0] / a[2];
        cplx s = std::sqrt(b * b - 4.0 * c);
        if (std::real(std::conj(b) * s) < 0.0) s = -s;
        cplx r1 = -0.5 * (b + s);
        cplx r2 = (std::abs(r1) > 0.0) ? c / r1 : -0.5 * (b - s);
        return {r1, r2};
    }

    // Aberth-Ehrlich from perturbed scaled roots of unity.  The angular
    // offset breaks the symmetric stalls that plague polynomials like z^n - c.
    double r0 = detail::rootRadiusBound(q);
    std::vector<cplx> z(n);
    for (int j = 0; j < n; ++j) {
        double ang = 2.0 * std::numbers::pi * (double(j) + 0.357) / double(n) + 0.5 / double(n);
        double rad = r0 * (0.65 + 0.1 * std::cos(3.0 * ang + 0.7));
        z[j] = rad * cplx(std::cos(ang), std::sin(ang));
    }

    std::vector<bool> done(n, false);
    const int maxIter = 400;
    for (int iter = 0; iter < maxIter; ++iter) {
        bool all = true;
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            auto [p, dp] = q.evalWithDerivative(z[i]);
            double sc = q.residualScale(z[i]);
            if (std::abs(p) <= tol * sc) {
                done[i] = true;
                continue;
            }
            all = false;
            cplx w;
            if (std::abs(dp) > 0.0) {
                cplx nr = p / dp;
                cplx s = 0.0;
                for (int j = 0; j < n; ++j)
                    if (j != i) s += 1.0 / (z[i] - z[j]);
                cplx den = 1.0 - nr * s;
                w = (std::abs(den) > 1e-12) ? nr / den : nr;
            } else {
                // Sitting on a critical point: nudge deterministically.
                w = cplx(1e-6 * (1.0 + std::abs(z[i])), 1e-6);
            }
            // Cap the step to avoid wild excursions early on.
            double cap = 0.5 * r0 + std::abs(z[i]);
            if (std::abs(w) > cap) w *= cap / std::abs(w);
            z[i] -= w;
            moved = std::max(moved, std::abs(w));
        }
        if (all) break;
        if (iter == maxIter - 1) {
            // Accept if every residual is at least loosely converged; the
            // cluster escalation downstream tolerates sqrt-of-eps accuracy.
            for (int i = 0; i < n; ++i) {
                double res = std::abs(q(z[i])) / q.residualScale(z[i]);
                if (res > 1e-6) throw numeric_error("allRoots: no convergence");
            }
        }
        (void)moved;
    }
    for (auto& zi : z) detail::newtonPolish(q, zi, 3);
    std::sort(z.begin(), z.end(), [](cplx a_, cplx b_) {
        if (std::real(a_) != std::real(b_)) return std::real(a_) < std::real(b_);
        return std::imag(a_) < std::imag(b_);
    });
    return z;
}

// Single-linkage clustering of a root list at the given radius.  Pure
// function of the list: no polynomial data is consulted.
inline std::vector<RootCluster> clusterRoots(const std::vector<cplx>& roots, double clusterTol = defaults::cluster_tol) {
    std::size_t n = roots.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(roots[i] - roots[j]) <= clusterTol) parent[find(i)] = find(j);

    std::vector<RootCluster> out;
    std::vector<int> slot(n, -1);
    std::vector<std::vector<cplx>> members;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(members.size());
            members.emplace_back();
        }
        members[slot[r]].push_back(roots[i]);
    }
    for (auto& m : members) {
        RootCluster c;
        c.multiplicity = static_cast<int>(m.size());
        cplx sum = 0.0;
        for (auto& z : m) sum += z;
        c.center = sum / double(m.size());
        for (auto& z : m) c.radius = std::max(c.radius, std::abs(z - c.center));
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
        if (std::real(a.center) != std::real(b.center)) return std::real(a.center) < std::real(b.center);
        return std::imag(a.center) < std::imag(b.center);
    });
    return out;
}

namespace detail {

// Smallest k with |q^(k)(z)| not negligible against its own coefficient
// scale: the apparent vanishing order of q at z.
inline int apparentMultiplicity(const std::vector<UnivariatePolynomial>& chain, cplx z, double theta) {
    for (int k = 0; k < static_cast<int>(chain.size()); ++k) {
        double v = std::abs(chain[k](z));
        if (v > theta * chain[k].residualScale(z)) return k;
    }
    return static_cast<int>(chain.size());
}

}  // namespace detail

// Root clustering that recovers true multiplicities.  An m-fold root is only
// located to ~eps^(1/m) by any black-box solver, so plain linkage at
// cluster_tol undershoots for m >= 3 (a triple root scatters its three
// approximations ~1e-5 apart).  We detect that through the derivative chain
// and re-merge at a residual-driven radius, then polish each center on the
// (m-1)-st derivative where it is a simple root again.
inline std::vector<RootCluster> clusteredRoots(const UnivariatePolynomial& qin,
                                               double clusterTol = defaults::cluster_tol,
                                               double rootTol = defaults::root_tol) {
    UnivariatePolynomial q = qin.normalized();
    std::vector<cplx> roots = allRoots(q, rootTol);
    if (roots.empty()) return {};

    std::vector<UnivariatePolynomial> chain;
    chain.push_back(q);
    for (int k = 0; k < q.degree(); ++k) chain.push_back(chain.back().derivative());

    const double theta = 1e-4;
    auto clusters = clusterRoots(roots, clusterTol);

    for (int round = 0; round < q.degree(); ++round) {
        bool changed = false;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            int m = detail::apparentMultiplicity(chain, clusters[i].center, theta);
            if (m <= clusters[i].multiplicity) continue;
            // Looks like part of an m-fold root whose members did not linkage
            // together.  The m-fold center is a root of the (m-1)-st
            // derivative; polishing onto it measures how far this member
            // scattered, which sets the radius other members must lie in.
            cplx zc = clusters[i].center;
            detail::newtonPolish(chain[static_cast<std::size_t>(m - 1)], zc, 12);
            double delta = std::abs(zc - clusters[i].center);
            double tau = 3.0 * delta + 10.0 * clusterTol * std::max(1.0, std::abs(zc));
            std::vector<cplx> merged;
            std::vector<RootCluster> rest;
            for (std::size_t j = 0; j < clusters.size(); ++j) {
                if (std::abs(clusters[j].center - zc) <= tau) {
                    for (int t = 0; t < clusters[j].multiplicity; ++t)
                        merged.push_back(clusters[j].center);  // members collapsed already
                } else {
                    rest.push_back(clusters[j]);
                }
            }
            if (merged.size() <= static_cast<std::size_t>(clusters[i].multiplicity)) continue;
            // Only accept if the polished center really looks at least that
            // degenerate; otherwise the merge would swallow distinct roots.
            if (detail::apparentMultiplicity(chain, zc, theta) < static_cast<int>(merged.size()))
                continue;
            RootCluster big;
            big.multiplicity = static_cast<int>(merged.size());
            big.center = zc;
            for (auto& z : merged) big.radius = std::max(big.radius, std::abs(z - zc));
            rest.push_back(big);
            clusters = std::move(rest);
            changed = true;
            break;
        }
        if (!changed) break;
    }

    // Center polish: an m-fold root of q is a simple root of q^(m-1).
    for (auto& c : clusters) {
        int m = std::min<int>(c.multiplicity, static_cast<int>(chain.size()) - 1);
        if (m >= 2) detail::newtonPolish(chain[m - 1], c.center, 8);
        else detail::newtonPolish(q, c.center, 3);
    }
    std::sort(clusters.begin(), clusters.end(), [](const RootCluster& a, const RootCluster& b) {
        if (std::real(a.center) != std::real(b.center)) return std::real(a.center) < std::real(b.center);
        return std::imag(a.center) < std::imag(b.center);
    });
    return clusters;
}

// Discriminant via the Sylvester resultant of q and q':
//   disc(q) = (-1)^(n(n-1)/2) Res(q, q') / lc(q).
inline cplx univariateDiscriminant(const UnivariatePolynomial& q) {
    int n = q.degree();
    if (n < 2) throw contract_error("univariateDiscriminant: degree must be >= 2");
    UnivariatePolynomial dq = q.derivative();
    int m = dq.degree();  // n-1 except for freak cancellation; Sylvester needs n-1
    if (m < n - 1) {
        // Derivative degenerated (leading coefficients cancelled numerically);
        // treat missing leading coefficients as exact zeros.
        m = n - 1;
    }
    int size = n + m;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(size, size);
    const auto& a = q.coeffs();
    const auto& b = dq.coeffs();
    // Rows of shifted q coefficients (m rows), then shifted q' (n rows),
    // highest-degree coefficient first in each row.
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k)
            S(r, r + k) = a[n - k];
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) {
            int deg = m - k;
            cplx v = (deg < static_cast<int>(b.size())) ? b[deg] : cplx(0.0);
            S(m + r, r + k) = v;
        }
    cplx res = Eigen::PartialPivLU<Eigen::MatrixXcd>(S).determinant();
    double sign = ((n * (n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    return sign * res / q.leading();
}

}  // namespace mnd
