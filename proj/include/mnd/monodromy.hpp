#pragma once

// Top-level engine: generators of the monodromy group of a projection from a
// center L, accumulated from loops around the branch punctures of pencil
// slices until the full symmetric group is reached or the slice budget runs
// out.

#include <cstdint>
#include <vector>

#include "config.hpp"
#include "perm_group.hpp"
#include "tracking.hpp"

namespace mnd {

enum class MonodromyVerdict { Uniform, NoEvidenceOfSd };

inline const char* verdictName(MonodromyVerdict v) {
    return v == MonodromyVerdict::Uniform ? "Uniform" : "NoEvidenceOfSd";
}

struct MonodromyGenerator {
    Loop loop;
    Permutation perm;
};

struct MonodromyResult {
    int degree = 0;
    std::vector<MonodromyGenerator> generators;
    GroupClassification group;
    MonodromyVerdict verdict = MonodromyVerdict::NoEvidenceOfSd;
    int afterLoops = 0;  // loops tracked before a NoEvidenceOfSd verdict
    bool transitive = false;
    TrackingCertificate certificate;
};

namespace detail {

// Same loop with the circle tightened by half: the approach is kept and
// extended radially, which cannot meet other punctures (they sit at least two
// radii from the center).
inline Loop shrinkLoop(const Loop& lp, int circleNodes) {
    Loop out = lp;
    out.radius = 0.5 * lp.radius;
    std::size_t m = (lp.path.size() - static_cast<std::size_t>(circleNodes)) / 2;
    std::vector<cplx> approach(lp.path.begin(), lp.path.begin() + static_cast<std::ptrdiff_t>(m));
    cplx entryOld = approach.back();
    cplx entry = lp.center + (entryOld - lp.center) * 0.5;
    approach.push_back(entry);
    out.path = approach;
    double a0 = std::arg(entry - lp.center);
    for (int k = 1; k <= circleNodes; ++k) {
        double ang = a0 + 2.0 * std::numbers::pi * double(k) / double(circleNodes);
        out.path.push_back(lp.center + std::polar(out.radius, ang));
    }
    out.path.back() = entry;
    for (std::size_t k = approach.size(); k-- > 0;) out.path.push_back(approach[k]);
    return out;
}

}  // namespace detail

// Full run for one center.  Uniform is claimed only when the tracked loops
// reach the full symmetric group; anything less is reported as absence of
// evidence, never as a certified non-uniform center.
inline MonodromyResult runMonodromy(const HomogeneousPolynomial& f, const ProjectivePoint& L,
                                    const RunConfig& cfg = {}) {
    HomogeneousPolynomial fn = f.normalized();
    ProjectiveFrame frame = frameForCenter(L);
    FiberSystem fs = fiberSystem(fn, frame);  // rejects centers on the surface
    PlaneCurve reduced = squareFreePart(discriminantCurve(fs));

    const int d = fs.d;
    const std::uint64_t full = factorialU64(d);
    GroupHandle group(d);
    MonodromyResult res;
    res.degree = d;

    TrackerConfig tcfg;
    tcfg.correctorTol = cfg.trackerTol;
    tcfg.clusterTol = cfg.clusterTol;

    Rng rng(splitmix64(cfg.seed ^ 0x5ca1ab1e0ddba11ull));
    const int sliceBudget = 1 + std::max(0, cfg.extraSlices);
    for (int si = 0; si < sliceBudget && group.order() < full; ++si) {
        // real base points keep the logs readable; complex draws are the
        // fallback when the real box keeps landing near the curve
        PencilSlice slice;
        bool haveSlice = false;
        for (int attempt = 0; attempt < 60 && !haveSlice; ++attempt) {
            P3 y = (attempt < 40)
                       ? P3{cplx(rng.real(-1.0, 1.0)), cplx(rng.real(-1.0, 1.0)), cplx(rng.real(-1.0, 1.0))}
                       : P3{rng.box(), rng.box(), rng.box()};
            if (reduced.vanishesAt(y, 1e-3)) continue;
            try {
                slice = pencilSlice(reduced, y, rng.bits(), std::max(cfg.clusterTol, 1e-4));
                haveSlice = true;
            } catch (const contract_error&) {
            } catch (const numeric_error&) {
            }
        }
        if (!haveSlice) continue;

        Fiber fiber;
        std::vector<Loop> loops;
        try {
            fiber = solveBaseFiber(fs, slice.base, cfg.residualTol);
            loops = generateLoops(slice, 0.0, tcfg.circleNodes);
        } catch (const numeric_error&) {
            continue;
        }
        ++res.certificate.slicesUsed;

        for (const Loop& lp : loops) {
            if (group.order() >= full) break;
            bool tracked = false;
            Loop attempt = lp;
            for (int shrink = 0; shrink < 3 && !tracked; ++shrink) {
                try {
                    Permutation p = trackLoop(fs, fiber, attempt, tcfg, &res.certificate);
                    group.addGenerator(p);
                    res.generators.push_back({attempt, std::move(p)});
                    tracked = true;
                } catch (const numeric_error&) {
                    attempt = detail::shrinkLoop(attempt, tcfg.circleNodes);
                }
            }
        }
    }

    res.afterLoops = res.certificate.loopsTracked;
    std::vector<Permutation> gens;
    gens.reserve(res.generators.size());
    for (const auto& g : res.generators) gens.push_back(g.perm);
    res.transitive = !gens.empty() && isTransitive(gens, d);
    res.group = group.classify();
    res.verdict = (group.order() == full) ? MonodromyVerdict::Uniform : MonodromyVerdict::NoEvidenceOfSd;
    return res;
}

}  // namespace mnd
