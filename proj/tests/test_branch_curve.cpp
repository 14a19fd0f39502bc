#include <catch2/catch_amalgamated.hpp>

#include <mnd/branch_curve.hpp>
#include <mnd/roots.hpp>
#include <mnd/rng.hpp>

#include <algorithm>

using namespace mnd;

namespace {

ProjectiveFrame standardFrame() { return frameForCenter(ProjectivePoint(P4{0.0, 0.0, 0.0, 1.0})); }

// Dense random form of the given degree in `nvars` variables.
HomogeneousPolynomial randomForm(Rng& rng, int nvars, int degree) {
    std::vector<Monomial> terms;
    std::array<int, 4> e{0, 0, 0, 0};
    if (nvars == 3) {
        for (int a = degree; a >= 0; --a)
            for (int b = degree - a; b >= 0; --b) {
                e = {a, b, degree - a - b, 0};
                terms.push_back({e, rng.box()});
            }
    } else {
        for (int a = degree; a >= 0; --a)
            for (int b = degree - a; b >= 0; --b)
                for (int c = degree - a - b; c >= 0; --c) {
                    e = {a, b, c, degree - a - b - c};
                    terms.push_back({e, rng.box()});
                }
    }
    return HomogeneousPolynomial(nvars, degree, std::move(terms));
}

P3 randomP3(Rng& rng) { return P3{rng.box(), rng.box(), rng.box()}; }

// Checks that two 3-variable forms agree projectively: the value ratio is the
// same complex constant at every sample point.
void requireProportional(const HomogeneousPolynomial& got, const std::function<cplx(const P3&)>& oracle,
                         Rng& rng, double tol = 1e-7) {
    cplx ratio = 0.0;
    int checked = 0;
    for (int i = 0; i < 24; ++i) {
        P3 y = randomP3(rng);
        cplx o = oracle(y);
        cplx g = got.evaluate(y);
        if (std::abs(o) < 1e-3) continue;  // stay away from the zero set for stable ratios
        if (ratio == cplx(0.0)) {
            ratio = g / o;
            continue;
        }
        REQUIRE(std::abs(g / o - ratio) <= tol * std::max(1.0, std::abs(ratio)));
        ++checked;
    }
    REQUIRE(checked >= 10);
    REQUIRE(std::abs(ratio) > 0.0);
}

}  // namespace

TEST_CASE("fiber system of the Fermat cubic", "[branch]") {
    auto fs = fiberSystem(fermatCubic(), standardFrame());
    REQUIRE(fs.d == 3);
    REQUIRE(fs.parts.size() == 4);
    REQUIRE(std::abs(fs.leading) > 0.1);

    // over y the fiber is t^3 + (y0^3+y1^3+y2^3), up to overall scale
    Rng rng(404);
    for (int i = 0; i < 10; ++i) {
        P3 y = randomP3(rng);
        auto p = fs.fiberPoly(y);
        REQUIRE(p.degree() == 3);
        cplx c0 = p.coeffs()[0] / p.coeffs()[3];
        cplx expect = y[0] * y[0] * y[0] + y[1] * y[1] * y[1] + y[2] * y[2] * y[2];
        REQUIRE(std::abs(c0 - expect) < 1e-10 * std::max(1.0, std::abs(expect)));
        REQUIRE(std::abs(p.coeffs()[1]) < 1e-12);
        REQUIRE(std::abs(p.coeffs()[2]) < 1e-12);
    }

    // center on the surface is rejected: (1:-1:0:0) lies on the Fermat cubic
    auto badFrame = frameForCenter(ProjectivePoint(P4{1.0, -1.0, 0.0, 0.0}));
    REQUIRE_THROWS_AS(fiberSystem(fermatCubic(), badFrame), contract_error);

    REQUIRE_THROWS_AS(fiberSystem(randomForm(rng, 3, 2), standardFrame()), contract_error);
}

TEST_CASE("discriminant curve of the Fermat cubic", "[branch]") {
    auto curve = discriminantCurve(fermatCubic(), standardFrame());
    REQUIRE(curve.degree == 6);

    // disc(t^3 + c) = -27 c^2, so the curve is proportional to (y0^3+y1^3+y2^3)^2
    Rng rng(8081);
    requireProportional(curve.poly, [](const P3& y) {
        cplx s = y[0] * y[0] * y[0] + y[1] * y[1] * y[1] + y[2] * y[2] * y[2];
        return s * s;
    }, rng);

    REQUIRE(curve.vanishesAt(P3{1.0, -1.0, 0.0}));
    REQUIRE(curve.vanishesAt(P3{0.0, 1.0, -1.0}));
    REQUIRE_FALSE(curve.vanishesAt(P3{1.0, 0.0, 0.0}));
}

TEST_CASE("discriminant curve of the quadric", "[branch]") {
    auto curve = discriminantCurve(standardQuadric(), standardFrame());
    REQUIRE(curve.degree == 2);

    // disc(t^2 + c) = -4c: the branch conic is y0^2+y1^2+y2^2
    Rng rng(8082);
    requireProportional(curve.poly, [](const P3& y) { return y[0] * y[0] + y[1] * y[1] + y[2] * y[2]; },
                        rng);
    REQUIRE(curve.vanishesAt(P3{1.0, cplx(0.0, 1.0), 0.0}));
}

TEST_CASE("discriminant degree law on random surfaces", "[branch]") {
    Rng rng(111213);
    for (int d = 2; d <= 4; ++d) {
        auto f = randomForm(rng, 4, d);
        auto L = ProjectivePoint(P4{rng.box(), rng.box(), rng.box(), rng.box()});
        auto fs = fiberSystem(f, frameForCenter(L));
        auto curve = discriminantCurve(fs);
        REQUIRE(curve.degree == d * (d - 1));
    }
}

TEST_CASE("branch criterion: multiple fiber roots exactly on the curve", "[branch]") {
    Rng rng(141516);
    auto f = fermatCubic();
    auto fs = fiberSystem(f, standardFrame());
    auto curve = discriminantCurve(fs);

    // off the curve (with margin): all fiber roots separated
    int offChecked = 0;
    for (int i = 0; i < 30; ++i) {
        P3 y = detail::torusNode(static_cast<std::size_t>(i), 777);
        if (std::abs(curve.poly.evaluate(y)) < 1e-2 * curve.onPointScale()) continue;
        auto roots = allRoots(fs.fiberPoly(y));
        double minsep = 1e9;
        for (std::size_t a = 0; a < roots.size(); ++a)
            for (std::size_t b = a + 1; b < roots.size(); ++b)
                minsep = std::min(minsep, std::abs(roots[a] - roots[b]));
        REQUIRE(minsep > 1e-3);
        ++offChecked;
    }
    REQUIRE(offChecked >= 20);

    // on the curve: fiber over a slice puncture has a collision
    auto slice = pencilSlice(curve, P3{0.31, -0.22, 1.0}, 99);
    for (const auto& p : slice.punctures) {
        P3 y{slice.base[0] + p.u * slice.dir[0], slice.base[1] + p.u * slice.dir[1],
             slice.base[2] + p.u * slice.dir[2]};
        auto roots = allRoots(fs.fiberPoly(y));
        double minsep = 1e9;
        for (std::size_t a = 0; a < roots.size(); ++a)
            for (std::size_t b = a + 1; b < roots.size(); ++b)
                minsep = std::min(minsep, std::abs(roots[a] - roots[b]));
        REQUIRE(minsep < 1e-3);
    }
}

TEST_CASE("square-free part of the Fermat branch divisor", "[branch]") {
    auto divisor = discriminantCurve(fermatCubic(), standardFrame());
    auto reduced = squareFreePart(divisor);
    REQUIRE(reduced.degree == 3);

    Rng rng(17);
    requireProportional(reduced.poly, [](const P3& y) {
        return y[0] * y[0] * y[0] + y[1] * y[1] * y[1] + y[2] * y[2] * y[2];
    }, rng, 1e-5);

    // idempotent on an already-reduced curve
    auto again = squareFreePart(reduced);
    REQUIRE(again.degree == 3);
    Rng rng2(18);
    requireProportional(again.poly, [&reduced](const P3& y) { return reduced.poly.evaluate(y); }, rng2,
                        1e-5);
}

TEST_CASE("square-free part leaves reduced curves alone", "[branch]") {
    auto conic = discriminantCurve(standardQuadric(), standardFrame());
    auto reduced = squareFreePart(conic);
    REQUIRE(reduced.degree == 2);
    Rng rng(19);
    requireProportional(reduced.poly, [&conic](const P3& y) { return conic.poly.evaluate(y); }, rng, 1e-6);
}

TEST_CASE("square-free part splits hand-built multiplicity structures", "[branch]") {
    Rng rng(2021);
    auto lin = randomForm(rng, 3, 1);
    auto quad = randomForm(rng, 3, 2);

    // l^2 * q has reduced form l * q
    PlaneCurve c(lin * lin * quad);
    REQUIRE(c.degree == 4);
    auto reduced = squareFreePart(c);
    REQUIRE(reduced.degree == 3);
    Rng rng2(2022);
    requireProportional(reduced.poly, [&](const P3& y) { return lin.evaluate(y) * quad.evaluate(y); },
                        rng2, 1e-5);

    // a perfect cube q^3 reduces to q
    PlaneCurve cube(quad * quad * quad);
    auto reducedCube = squareFreePart(cube);
    REQUIRE(reducedCube.degree == 2);
    Rng rng3(2023);
    requireProportional(reducedCube.poly, [&](const P3& y) { return quad.evaluate(y); }, rng3, 1e-5);
}

TEST_CASE("local multiplicity", "[branch]") {
    auto divisor = discriminantCurve(fermatCubic(), standardFrame());
    REQUIRE(localMultiplicity(divisor, P3{1.0, -1.0, 0.0}) == 2);
    REQUIRE(localMultiplicity(divisor, P3{0.0, 1.0, -1.0}) == 2);

    auto reduced = squareFreePart(divisor);
    REQUIRE(localMultiplicity(reduced, P3{1.0, -1.0, 0.0}) == 1);

    auto conic = discriminantCurve(standardQuadric(), standardFrame());
    REQUIRE(localMultiplicity(conic, P3{1.0, cplx(0.0, 1.0), 0.0}) == 1);

    // hand-built singularities: x0*x1 has a node at (0:0:1), x0^2*x1 a triple point
    HomogeneousPolynomial x0(3, 1, {{{1, 0, 0, 0}, 1.0}});
    HomogeneousPolynomial x1(3, 1, {{{0, 1, 0, 0}, 1.0}});
    PlaneCurve node(x0 * x1);
    REQUIRE(localMultiplicity(node, P3{0.0, 0.0, 1.0}) == 2);
    PlaneCurve triple(x0 * x0 * x1);
    REQUIRE(localMultiplicity(triple, P3{0.0, 0.0, 1.0}) == 3);
    REQUIRE(localMultiplicity(node, P3{0.0, 1.0, 1.0}) == 1);

    REQUIRE_THROWS_AS(localMultiplicity(node, P3{1.0, 1.0, 1.0}), contract_error);
}

TEST_CASE("pencil slices", "[branch]") {
    auto divisor = discriminantCurve(fermatCubic(), standardFrame());
    auto reduced = squareFreePart(divisor);

    // reduced cubic: three simple punctures
    auto slice = pencilSlice(reduced, P3{0.31, -0.22, 1.0}, 7);
    REQUIRE(slice.punctures.size() == 3);
    int msum = 0;
    for (const auto& p : slice.punctures) {
        REQUIRE(p.multiplicity == 1);
        msum += p.multiplicity;
    }
    REQUIRE(msum == 3);

    // unreduced divisor: same three points, each with multiplicity 2; the
    // cluster tolerance is widened because the divisor is interpolated and
    // its double roots scatter with the coefficient noise
    auto dslice = pencilSlice(divisor, P3{0.31, -0.22, 1.0}, 7, 1e-4);
    REQUIRE(dslice.punctures.size() == 3);
    for (const auto& p : dslice.punctures) REQUIRE(p.multiplicity == 2);

    // branch conic of the quadric: two simple punctures
    auto conic = discriminantCurve(standardQuadric(), standardFrame());
    auto cslice = pencilSlice(conic, P3{0.4, 0.1, 1.0}, 11);
    REQUIRE(cslice.punctures.size() == 2);

    // punctures really sit on the curve
    for (const auto& p : slice.punctures) {
        P3 y{slice.base[0] + p.u * slice.dir[0], slice.base[1] + p.u * slice.dir[1],
             slice.base[2] + p.u * slice.dir[2]};
        REQUIRE(reduced.vanishesAt(y, 1e-6));
    }

    // determinism under a fixed seed
    auto slice2 = pencilSlice(reduced, P3{0.31, -0.22, 1.0}, 7);
    REQUIRE(slice2.punctures.size() == slice.punctures.size());
    for (std::size_t i = 0; i < slice.punctures.size(); ++i)
        REQUIRE(std::abs(slice2.punctures[i].u - slice.punctures[i].u) < 1e-14);

    // base point on the curve is rejected
    REQUIRE_THROWS_AS(pencilSlice(reduced, P3{1.0, -1.0, 0.0}, 3), contract_error);

    // multiplicity sums match the degree on random products
    Rng rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        auto a = randomForm(rng, 3, 1 + static_cast<int>(rng.index(2)));
        auto b = randomForm(rng, 3, 1 + static_cast<int>(rng.index(2)));
        PlaneCurve c(a * b);
        P3 base = randomP3(rng);
        if (c.vanishesAt(base, 1e-6)) continue;
        auto s = pencilSlice(c, base, 1000 + static_cast<std::uint64_t>(trial));
        int total = 0;
        for (const auto& p : s.punctures) total += p.multiplicity;
        REQUIRE(total == c.degree);
    }
}

TEST_CASE("plane curve construction guards", "[branch]") {
    Rng rng(41);
    REQUIRE_THROWS_AS(PlaneCurve(randomForm(rng, 4, 2)), contract_error);
    REQUIRE_THROWS_AS(interpolateForm3(0, [](const P3&) { return cplx(1.0); }), contract_error);

    // interpolation recovers a known form exactly
    auto target = randomForm(rng, 3, 5);
    auto fit = interpolateForm3(5, [&](const P3& y) { return target.evaluate(y); });
    Rng rng2(42);
    requireProportional(fit, [&](const P3& y) { return target.evaluate(y); }, rng2, 1e-9);
}
