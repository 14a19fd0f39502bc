#pragma once

// Contact of lines with a surface: intersection types, branching weights,
// tangent-line sampling through a candidate center, and the planar-center
// membership test built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "branch_curve.hpp"
#include "core.hpp"
#include "homogeneous.hpp"
#include "projective.hpp"
#include "rng.hpp"
#include "roots.hpp"
#include "univariate.hpp"

namespace mnd {

enum class ContactTag { SimpleSecant, SimpleTangent, Asymptotic, Bitangent, Other };

inline const char* tagName(ContactTag t) {
    switch (t) {
        case ContactTag::SimpleSecant: return "SimpleSecant";
        case ContactTag::SimpleTangent: return "SimpleTangent";
        case ContactTag::Asymptotic: return "Asymptotic";
        case ContactTag::Bitangent: return "Bitangent";
        default: return "Other";
    }
}

// Tag from the sorted multiplicity vector.  A type with an entry >= 3 counts
// as asymptotic even if a second entry is also >= 2.
inline ContactTag classifyContactType(const std::vector<int>& type) {
    int atLeast2 = 0;
    bool any3 = false;
    for (int n : type) {
        if (n >= 2) ++atLeast2;
        if (n >= 3) any3 = true;
    }
    if (atLeast2 == 0) return ContactTag::SimpleSecant;
    if (any3) return ContactTag::Asymptotic;
    if (atLeast2 >= 2) return ContactTag::Bitangent;
    return ContactTag::SimpleTangent;
}

struct ContactPoint {
    ProjectivePoint point;
    int multiplicity = 1;
};

struct ContactProfile {
    ProjectiveLine line;
    std::vector<int> type;  // multiplicities n_i, sorted descending, summing to d
    int branchingWeight = 0;  // sum of (n_i - 1)
    ContactTag tag = ContactTag::Other;
    std::vector<ContactPoint> contactPoints;
};

// Intersection type of a line with the surface f = 0.  The restriction of f
// to the line is clustered into roots; if the chosen parametrization puts an
// intersection at u = infinity (f vanishes on the direction vector) the line
// is reparametrized until the restriction has full degree.  A line on which
// every reparametrization degenerates lies in the surface.
inline ContactProfile contactProfile(const HomogeneousPolynomial& f, const ProjectiveLine& line,
                                     double tol = defaults::cluster_tol) {
    if (f.numVars() != 4) throw contract_error("contactProfile: expected a surface in P^3");
    HomogeneousPolynomial fn = f.normalized();
    const int d = fn.degree();
    if (d < 1) throw contract_error("contactProfile: constant polynomial");

    // Mixing dir <- dir + mu * base keeps the span and moves the point at
    // infinity; a degree-d restriction can degenerate for at most d values of
    // mu, so d + 2 distinct tries either succeed or prove containment.
    P4 base = line.base;
    P4 dir = line.dir;
    UnivariatePolynomial r(std::vector<cplx>{cplx(0.0)});
    bool ok = false;
    for (int attempt = 0; attempt <= d + 1 && !ok; ++attempt) {
        P4 dirA = dir;
        if (attempt > 0) {
            cplx mu = std::polar(0.7 + 0.19 * attempt, 2.39996 * attempt);
            for (int i = 0; i < 4; ++i) dirA[i] = dir[i] + mu * base[i];
        }
        UnivariatePolynomial cand = restrictToLine(fn, base, dirA);
        if (cand.degree() == d && std::abs(cand.leading()) > 1e-8 * cand.maxAbs()) {
            r = cand;
            dir = dirA;
            ok = true;
        }
    }
    if (!ok) throw contract_error("contactProfile: line is contained in the surface");

    auto clusters = clusteredRoots(r, tol);
    ContactProfile p{line};
    for (const auto& cl : clusters) {
        p.type.push_back(cl.multiplicity);
        P4 x;
        for (int i = 0; i < 4; ++i) x[i] = base[i] + cl.center * dir[i];
        p.contactPoints.push_back({ProjectivePoint(x), cl.multiplicity});
    }
    std::sort(p.type.begin(), p.type.end(), std::greater<int>());
    p.branchingWeight = d - static_cast<int>(p.type.size());
    p.tag = classifyContactType(p.type);
    return p;
}

// The surface restricted to the family of fiber lines over a pencil line
// y(u) = base + u * dir in the base plane: h(u, t) = sum_k A_k(u) t^k with
// exact univariate coefficients.  Newton refinement of tangency points and
// the loop tracker both live on this bivariate function.
struct SliceRestriction {
    int d = 0;
    std::vector<UnivariatePolynomial> A;   // A_k(u)
    std::vector<UnivariatePolynomial> Au;  // d A_k / du

    cplx h(cplx u, cplx t) const {
        cplx s = 0.0;
        for (int k = d; k >= 0; --k) s = s * t + A[static_cast<std::size_t>(k)](u);
        return s;
    }
    cplx ht(cplx u, cplx t) const {
        cplx s = 0.0;
        for (int k = d; k >= 1; --k) s = s * t + double(k) * A[static_cast<std::size_t>(k)](u);
        return s;
    }
    cplx htt(cplx u, cplx t) const {
        cplx s = 0.0;
        for (int k = d; k >= 2; --k) s = s * t + double(k) * double(k - 1) * A[static_cast<std::size_t>(k)](u);
        return s;
    }
    cplx hu(cplx u, cplx t) const {
        cplx s = 0.0;
        for (int k = d; k >= 0; --k) s = s * t + Au[static_cast<std::size_t>(k)](u);
        return s;
    }
    cplx hut(cplx u, cplx t) const {
        cplx s = 0.0;
        for (int k = d; k >= 1; --k) s = s * t + double(k) * Au[static_cast<std::size_t>(k)](u);
        return s;
    }

    // Fiber polynomial over y(u); callers must check the degree.
    UnivariatePolynomial fiberAt(cplx u) const {
        std::vector<cplx> c(static_cast<std::size_t>(d) + 1);
        for (int k = 0; k <= d; ++k) c[static_cast<std::size_t>(k)] = A[static_cast<std::size_t>(k)](u);
        return UnivariatePolynomial(std::move(c));
    }

    // Coefficient-sum bound for |h| over representatives near (u, t).
    double scaleAt(cplx u, cplx t) const {
        double s = 0.0, tm = 1.0, ta = std::max(1.0, std::abs(t));
        for (int k = 0; k <= d; ++k) {
            s += A[static_cast<std::size_t>(k)].residualScale(u) * tm;
            tm *= ta;
        }
        return std::max(s, 1e-300);
    }
};

inline SliceRestriction sliceRestriction(const FiberSystem& fs, const P3& base, const P3& dir) {
    SliceRestriction s;
    s.d = fs.d;
    s.A.reserve(static_cast<std::size_t>(fs.d) + 1);
    s.Au.reserve(static_cast<std::size_t>(fs.d) + 1);
    for (int k = 0; k <= fs.d; ++k) {
        const auto& part = fs.parts[static_cast<std::size_t>(k)];
        UnivariatePolynomial a = part.isZero()
                                     ? UnivariatePolynomial(std::vector<cplx>{cplx(0.0)})
                                     : restrictToLine(part, base, dir);
        s.Au.push_back(a.derivative());
        s.A.push_back(std::move(a));
    }
    return s;
}

namespace detail {

// Newton refinement of a tangency: solve h = h_t = 0 for (u, t) from a
// sampled branch point.  When the 2x2 Jacobian degenerates (contact order
// three or more: h_t and h_tt both vanish) the t-variable carries no
// information, so freeze t and drive h alone with u.
inline std::optional<std::pair<cplx, cplx>> polishTangency(const SliceRestriction& s,
                                                           cplx u, cplx t) {
    for (int it = 0; it < 40; ++it) {
        cplx F0 = s.h(u, t), F1 = s.ht(u, t);
        cplx a = s.hu(u, t), b = F1;
        cplx c = s.hut(u, t), e = s.htt(u, t);
        cplx det = a * e - b * c;
        double jscale = (std::abs(a) + std::abs(b)) * (std::abs(c) + std::abs(e));
        cplx du, dt;
        if (std::abs(det) > 1e-12 * std::max(jscale, 1e-280)) {
            du = (e * F0 - b * F1) / det;
            dt = (a * F1 - c * F0) / det;
        } else if (std::abs(a) > 1e-12) {
            du = F0 / a;
            dt = 0.0;
        } else {
            return std::nullopt;
        }
        u -= du;
        t -= dt;
        if (std::abs(du) + std::abs(dt) < 1e-14 * (1.0 + std::abs(u) + std::abs(t))) break;
    }
    double hs = s.scaleAt(u, t);
    if (std::abs(s.h(u, t)) > 1e-10 * hs) return std::nullopt;
    if (std::abs(s.ht(u, t)) > 1e-7 * hs * std::max(1.0, std::abs(u))) return std::nullopt;
    return std::make_pair(u, t);
}

// Stratified source of tangent lines through the projection center: pencil
// slices of the reduced branch curve yield branch points, each refined by
// Newton on the exact slice restriction before the fiber line is profiled.
class TangentLineSampler {
public:
    TangentLineSampler(const HomogeneousPolynomial& f, const ProjectivePoint& center,
                       std::uint64_t seed, double tol)
        : f_(f.normalized()), tol_(tol), rng_(splitmix64(seed ^ 0x7A9E0C5Dull)) {
        frame_ = frameForCenter(center);
        fs_ = fiberSystem(f_, frame_);
        reduced_ = squareFreePart(discriminantCurve(fs_));
    }

    // One refined tangent-line profile, or nullopt when this attempt failed;
    // callers budget the number of attempts.
    std::optional<ContactProfile> next() {
        if (queue_.empty()) refill();
        if (queue_.empty()) return std::nullopt;
        cplx u0 = queue_.back();
        queue_.pop_back();

        UnivariatePolynomial q0 = slice_.fiberAt(u0);
        if (q0.degree() != fs_.d) return std::nullopt;
        cplx t0 = tangencyGuess(q0, u0);
        cplx u = u0;
        if (auto polished = polishTangency(slice_, u0, t0)) u = polished->first;

        P3 y;
        for (int i = 0; i < 3; ++i)
            y[static_cast<std::size_t>(i)] = sliceBase_[static_cast<std::size_t>(i)] +
                                             u * sliceDir_[static_cast<std::size_t>(i)];
        ContactProfile p = contactProfile(f_, fiberLine(frame_, PlanePoint(y)), tol_);
        if (p.branchingWeight < 1) return std::nullopt;
        return p;
    }

    const PlaneCurve& reducedBranchCurve() const { return reduced_; }

private:
    // Start Newton at the most tangency-like root of the sampled fiber: the
    // center of a multiple cluster if one shows up, otherwise the root where
    // h_t is smallest.
    cplx tangencyGuess(const UnivariatePolynomial& q0, cplx u0) const {
        auto clusters = clusteredRoots(q0, std::max(tol_, 1e-6));
        cplx best = clusters.front().center;
        int bestMult = 0;
        double bestHt = std::numeric_limits<double>::infinity();
        for (const auto& cl : clusters) {
            double ht = std::abs(slice_.ht(u0, cl.center));
            if (cl.multiplicity > bestMult || (cl.multiplicity == bestMult && ht < bestHt)) {
                best = cl.center;
                bestMult = cl.multiplicity;
                bestHt = ht;
            }
        }
        return best;
    }

    void refill() {
        for (int attempt = 0; attempt < 24 && queue_.empty(); ++attempt) {
            P3 b{rng_.box(), rng_.box(), rng_.box()};
            std::uint64_t sliceSeed = rng_.bits();
            try {
                PencilSlice sl = pencilSlice(reduced_, b, sliceSeed, 1e-4);
                sliceBase_ = sl.base;
                sliceDir_ = sl.dir;
                slice_ = sliceRestriction(fs_, sl.base, sl.dir);
                for (const auto& pu : sl.punctures) queue_.push_back(pu.u);
            } catch (const contract_error&) {
                continue;  // base point landed on the curve; redraw
            } catch (const numeric_error&) {
                continue;
            }
        }
    }

    HomogeneousPolynomial f_;
    double tol_;
    Rng rng_;
    ProjectiveFrame frame_;
    FiberSystem fs_;
    PlaneCurve reduced_;
    SliceRestriction slice_;
    P3 sliceBase_{}, sliceDir_{};
    std::vector<cplx> queue_;
};

}  // namespace detail

// Profiles of lines tangent to the surface and passing through L, sampled
// from the branch curve of the projection with center L.
inline std::vector<ContactProfile> sampleTangentLinesThrough(const HomogeneousPolynomial& f,
                                                             const ProjectivePoint& L, int count,
                                                             std::uint64_t seed,
                                                             double tol = defaults::cluster_tol) {
    if (count < 0) throw contract_error("sampleTangentLinesThrough: negative count");
    if (count == 0) return {};
    detail::TangentLineSampler sampler(f, L, seed, tol);
    std::vector<ContactProfile> out;
    int attempts = 10 * count + 30;
    for (int a = 0; a < attempts && static_cast<int>(out.size()) < count; ++a) {
        if (auto p = sampler.next()) out.push_back(std::move(*p));
    }
    if (static_cast<int>(out.size()) < count)
        throw numeric_error("sampleTangentLinesThrough: tangent-line budget exhausted");
    return out;
}

enum class PXStatus { NotInPX, ProbablyInPX };

struct PXVerdict {
    PXStatus status = PXStatus::ProbablyInPX;
    std::optional<ContactProfile> witness;  // simple tangent through L, present iff NotInPX
    int samplesChecked = 0;
};

// Sampling test for membership of L in the exceptional center set: a single
// simple tangent through L rules membership out; exhausting the budget with
// every sampled tangent line branched at least twice is reported as probable
// membership, never as a certificate.
inline PXVerdict testPX(const HomogeneousPolynomial& f, const ProjectivePoint& L,
                        int sampleBudget = 200, std::uint64_t seed = 0,
                        double tol = defaults::cluster_tol) {
    if (sampleBudget < 1) throw contract_error("testPX: sample budget must be positive");
    detail::TangentLineSampler sampler(f, L, seed, tol);
    PXVerdict v;
    int attempts = 10 * sampleBudget + 30;
    for (int a = 0; a < attempts && v.samplesChecked < sampleBudget; ++a) {
        auto p = sampler.next();
        if (!p) continue;
        ++v.samplesChecked;
        if (p->branchingWeight == 1) {
            v.status = PXStatus::NotInPX;
            v.witness = std::move(*p);
            return v;
        }
    }
    if (v.samplesChecked == 0) throw numeric_error("testPX: no tangent line found within the budget");
    v.status = PXStatus::ProbablyInPX;
    return v;
}

}  // namespace mnd
