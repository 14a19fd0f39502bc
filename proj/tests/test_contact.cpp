#include <catch2/catch_amalgamated.hpp>

#include <mnd/contact.hpp>
#include <mnd/rng.hpp>
#include <mnd/roots.hpp>

#include <algorithm>
#include <cmath>

using namespace mnd;

namespace {

HomogeneousPolynomial randomForm(Rng& rng, int degree) {
    std::vector<Monomial> terms;
    for (int a = degree; a >= 0; --a)
        for (int b = degree - a; b >= 0; --b)
            for (int c = degree - a - b; c >= 0; --c)
                terms.push_back({{a, b, c, degree - a - b - c}, rng.box()});
    return HomogeneousPolynomial(4, degree, std::move(terms));
}

// Shifted quadric 2x0^2 + x1^2 + x2^2 + x3^2 - 2 x0 x3; its restriction to
// the line (1 : i : 0 : t) is (t - 1)^2, so it is tangent there.
HomogeneousPolynomial shiftedQuadric() {
    std::vector<Monomial> t;
    t.push_back({{2, 0, 0, 0}, 2.0});
    t.push_back({{0, 2, 0, 0}, 1.0});
    t.push_back({{0, 0, 2, 0}, 1.0});
    t.push_back({{0, 0, 0, 2}, 1.0});
    t.push_back({{1, 0, 0, 1}, -2.0});
    return HomogeneousPolynomial(4, 2, std::move(t));
}

double residualOn(const HomogeneousPolynomial& f, const ProjectivePoint& x) {
    HomogeneousPolynomial fn = f.normalized();
    double s = 0.0;
    for (const auto& m : fn.terms()) s += std::abs(m.c);
    return std::abs(fn.evaluate(x.v)) / s;
}

// Distance from a point to the span of the line, with base and dir already
// Hermitian-orthogonal by construction of ProjectiveLine.
double distToLine(const ProjectivePoint& x, const ProjectiveLine& line) {
    cplx cb = 0.0, cd = 0.0;
    double nb2 = 0.0, nx = 0.0;
    for (int i = 0; i < 4; ++i) {
        cb += std::conj(line.base[i]) * x.v[i];
        cd += std::conj(line.dir[i]) * x.v[i];
        nb2 += std::norm(line.base[i]);
        nx += std::norm(x.v[i]);
    }
    double r2 = 0.0;
    for (int i = 0; i < 4; ++i)
        r2 += std::norm(x.v[i] - (cb / nb2) * line.base[i] - cd * line.dir[i]);
    return std::sqrt(r2 / nx);
}

void checkTagMatchesType(const ContactProfile& p) {
    int atLeast2 = 0;
    bool any3 = false;
    for (int n : p.type) {
        if (n >= 2) ++atLeast2;
        if (n >= 3) any3 = true;
    }
    if (atLeast2 == 0) CHECK(p.tag == ContactTag::SimpleSecant);
    else if (any3) CHECK(p.tag == ContactTag::Asymptotic);
    else if (atLeast2 >= 2) CHECK(p.tag == ContactTag::Bitangent);
    else CHECK(p.tag == ContactTag::SimpleTangent);
    if (p.tag == ContactTag::Asymptotic || p.tag == ContactTag::Bitangent)
        CHECK(p.branchingWeight > 1);
}

}  // namespace

TEST_CASE("contact profiles of pinned lines", "[contact]") {
    auto F = fermatCubic();
    auto Q = standardQuadric();

    // (1 : 0 : 0 : t) meets the Fermat cubic where 1 + t^3 = 0.
    auto secant = contactProfile(F, ProjectiveLine(ProjectivePoint(1.0, 0.0, 0.0, 0.0), P4{0.0, 0.0, 0.0, 1.0}));
    REQUIRE(secant.type == std::vector<int>{1, 1, 1});
    CHECK(secant.branchingWeight == 0);
    CHECK(secant.tag == ContactTag::SimpleSecant);
    REQUIRE(secant.contactPoints.size() == 3);
    for (const auto& cp : secant.contactPoints) {
        CHECK(residualOn(F, cp.point) < 1e-10);
        CHECK(distToLine(cp.point, secant.line) < 1e-10);
    }

    // (1 : -1 : 0 : t) restricts to t^3: a flex line.
    auto flex = contactProfile(F, ProjectiveLine(ProjectivePoint(1.0, -1.0, 0.0, 0.0), P4{0.0, 0.0, 0.0, 1.0}));
    REQUIRE(flex.type == std::vector<int>{3});
    CHECK(flex.branchingWeight == 2);
    CHECK(flex.tag == ContactTag::Asymptotic);
    REQUIRE(flex.contactPoints.size() == 1);
    CHECK(samePoint(flex.contactPoints[0].point, ProjectivePoint(1.0, -1.0, 0.0, 0.0), 1e-8));

    // (1 : i : 0 : t) restricts to t^2 on the quadric.
    auto tang = contactProfile(Q, ProjectiveLine(ProjectivePoint(1.0, cplx(0, 1), 0.0, 0.0), P4{0.0, 0.0, 0.0, 1.0}));
    REQUIRE(tang.type == std::vector<int>{2});
    CHECK(tang.branchingWeight == 1);
    CHECK(tang.tag == ContactTag::SimpleTangent);
    CHECK(samePoint(tang.contactPoints[0].point, ProjectivePoint(1.0, cplx(0, 1), 0.0, 0.0), 1e-8));
}

TEST_CASE("contact profile pins bitangent and mixed types", "[contact]") {
    auto Q = standardQuadric();
    auto Q2 = shiftedQuadric();
    ProjectiveLine line(ProjectivePoint(1.0, cplx(0, 1), 0.0, 0.0), P4{0.0, 0.0, 0.0, 1.0});

    // Q * Q2 restricts to t^2 (t-1)^2: a bitangent of the quartic.
    auto bit = contactProfile(Q * Q2, line);
    REQUIRE(bit.type == std::vector<int>{2, 2});
    CHECK(bit.branchingWeight == 2);
    CHECK(bit.tag == ContactTag::Bitangent);

    // (x3-x0)^2 + (x0+x1)^2 restricts to (t-1)^2 on the flex line of the
    // Fermat cubic, so the product restricts to t^3 (t-1)^2: an entry >= 3
    // outranks the bitangent.
    std::vector<Monomial> q3t;
    q3t.push_back({{2, 0, 0, 0}, 2.0});
    q3t.push_back({{0, 2, 0, 0}, 1.0});
    q3t.push_back({{0, 0, 0, 2}, 1.0});
    q3t.push_back({{1, 1, 0, 0}, 2.0});
    q3t.push_back({{1, 0, 0, 1}, -2.0});
    HomogeneousPolynomial Q3(4, 2, std::move(q3t));
    auto mixed = contactProfile(fermatCubic() * Q3,
                                ProjectiveLine(ProjectivePoint(1.0, -1.0, 0.0, 0.0), P4{0.0, 0.0, 0.0, 1.0}));
    REQUIRE(mixed.type == std::vector<int>{3, 2});
    CHECK(mixed.branchingWeight == 3);
    CHECK(mixed.tag == ContactTag::Asymptotic);
}

TEST_CASE("contact profile reparametrizes a direction on the surface", "[contact]") {
    auto F = fermatCubic();
    // The direction point (1 : -1 : 0 : 0) lies on the cubic, so the naive
    // restriction along u -> (u : -u : 1 : 0) is the constant 1.  The line
    // still meets the surface, in a single triple point at the direction.
    ProjectiveLine line(ProjectivePoint(0.0, 0.0, 1.0, 0.0), P4{1.0, -1.0, 0.0, 0.0});
    auto p = contactProfile(F, line);
    REQUIRE(p.type == std::vector<int>{3});
    CHECK(p.branchingWeight == 2);
    REQUIRE(p.contactPoints.size() == 1);
    CHECK(samePoint(p.contactPoints[0].point, ProjectivePoint(1.0, -1.0, 0.0, 0.0), 1e-8));

    // A line actually contained in the surface is rejected.
    ProjectiveLine inside(ProjectivePoint(1.0, -1.0, 0.0, 0.0), P4{0.0, 0.0, 1.0, -1.0});
    CHECK_THROWS_AS(contactProfile(F, inside), contract_error);
}

TEST_CASE("contact type invariants over random lines and surfaces", "[contact]") {
    Rng rng(0xC0117AC7ull);
    for (int d = 2; d <= 5; ++d) {
        for (int trial = 0; trial < 12; ++trial) {
            auto f = randomForm(rng, d);
            ProjectivePoint a(P4{rng.box(), rng.box(), rng.box(), rng.box()});
            P4 v{rng.box(), rng.box(), rng.box(), rng.box()};
            auto p = contactProfile(f, ProjectiveLine(a, v));

            int sum = 0;
            for (int n : p.type) sum += n;
            CHECK(sum == d);
            CHECK(std::is_sorted(p.type.rbegin(), p.type.rend()));
            CHECK(p.branchingWeight == d - static_cast<int>(p.type.size()));
            checkTagMatchesType(p);
            REQUIRE(p.contactPoints.size() == p.type.size());
            for (const auto& cp : p.contactPoints) {
                CHECK(residualOn(f, cp.point) < 1e-7);
                CHECK(distToLine(cp.point, p.line) < 1e-8);
            }

            // A random line is a simple secant, and its restriction has a
            // discriminant clearly away from zero.
            auto r = restrictToLine(f.normalized(), p.line.base, p.line.dir).normalized();
            if (p.branchingWeight == 0) CHECK(std::abs(univariateDiscriminant(r)) > 1e-9);
        }
    }
}

TEST_CASE("tangency makes the restricted discriminant vanish", "[contact]") {
    // b >= 1 profiles come with a vanishing discriminant, b = 0 without.
    auto Q = standardQuadric();
    auto profiles = sampleTangentLinesThrough(Q, ProjectivePoint(0.3, -1.1, 0.7, 1.0), 5, 21);
    for (const auto& p : profiles) {
        REQUIRE(p.branchingWeight >= 1);
        auto r = restrictToLine(Q.normalized(), p.line.base, p.line.dir).normalized();
        CHECK(std::abs(univariateDiscriminant(r)) < 1e-9);
    }
}

TEST_CASE("tangent lines at a planar point are all asymptotic", "[contact]") {
    auto F = fermatCubic();
    // At (1 : -1 : 0 : 0) the gradient is (3, 3, 0, 0); tangent vectors have
    // the shape (a, -a, b, c).  Every tangent line meets the cubic to order
    // three there: the defining property of a planar point.
    ProjectivePoint x(1.0, -1.0, 0.0, 0.0);
    Rng rng(99);
    for (int trial = 0; trial < 8; ++trial) {
        cplx a = rng.box(), b = rng.box(), c = rng.box();
        auto p = contactProfile(F, ProjectiveLine(x, P4{a, -a, b, c}));
        bool found = false;
        for (const auto& cp : p.contactPoints)
            if (samePoint(cp.point, x, 1e-6)) {
                found = true;
                CHECK(cp.multiplicity >= 3);
            }
        CHECK(found);
    }

    // At a non-planar point of the quadric the order is exactly two.
    auto Q = standardQuadric();
    ProjectivePoint y(1.0, cplx(0, 1), 0.0, 0.0);
    auto p = contactProfile(Q, ProjectiveLine(y, P4{0.0, 0.0, 1.0, 0.0}));
    bool found = false;
    for (const auto& cp : p.contactPoints)
        if (samePoint(cp.point, y, 1e-6)) {
            found = true;
            CHECK(cp.multiplicity == 2);
        }
    CHECK(found);
}

TEST_CASE("sampled tangent lines through the Fermat coordinate center are flexes", "[contact]") {
    auto F = fermatCubic();
    ProjectivePoint L(0.0, 0.0, 0.0, 1.0);
    auto profiles = sampleTangentLinesThrough(F, L, 6, 3);
    REQUIRE(profiles.size() == 6);
    for (const auto& p : profiles) {
        CHECK(p.type == std::vector<int>{3});
        CHECK(p.branchingWeight == 2);
        CHECK(p.tag == ContactTag::Asymptotic);
        CHECK(distToLine(L, p.line) < 1e-8);
        for (const auto& cp : p.contactPoints) CHECK(residualOn(F, cp.point) < 1e-8);
    }
}

TEST_CASE("sampled tangent lines to the quadric are simple tangents", "[contact]") {
    auto Q = standardQuadric();
    ProjectivePoint L(0.4, 0.1, -0.9, 1.0);
    auto profiles = sampleTangentLinesThrough(Q, L, 6, 5);
    REQUIRE(profiles.size() == 6);
    for (const auto& p : profiles) {
        CHECK(p.type == std::vector<int>{2});
        CHECK(p.branchingWeight == 1);
        CHECK(p.tag == ContactTag::SimpleTangent);
        CHECK(distToLine(L, p.line) < 1e-8);
        for (const auto& cp : p.contactPoints) CHECK(residualOn(Q, cp.point) < 1e-8);
    }

    CHECK(sampleTangentLinesThrough(Q, L, 0, 5).empty());
}

TEST_CASE("tangent sampling is deterministic in the seed", "[contact]") {
    auto F = fermatCubic();
    ProjectivePoint L(0.0, 0.0, 1.0, 2.0);
    auto p1 = sampleTangentLinesThrough(F, L, 4, 17);
    auto p2 = sampleTangentLinesThrough(F, L, 4, 17);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].type == p2[i].type);
        CHECK(detail::coordDistance(p1[i].line.base, p2[i].line.base) < 1e-15);
        CHECK(detail::coordDistance(p1[i].line.dir, p2[i].line.dir) < 1e-15);
    }
}

TEST_CASE("px membership test", "[contact]") {
    auto F = fermatCubic();
    auto Q = standardQuadric();

    // Through the coordinate center of the Fermat cubic every tangent line is
    // a flex, so the budget runs out without a simple-tangent witness.
    auto v1 = testPX(F, ProjectivePoint(0.0, 0.0, 0.0, 1.0), 25, 11);
    CHECK(v1.status == PXStatus::ProbablyInPX);
    CHECK(v1.samplesChecked == 25);
    CHECK(!v1.witness.has_value());

    // A generic center sees a simple tangent almost immediately.
    auto v2 = testPX(F, ProjectivePoint(0.0, 0.0, 1.0, 2.0), 200, 7);
    REQUIRE(v2.status == PXStatus::NotInPX);
    REQUIRE(v2.witness.has_value());
    CHECK(v2.witness->branchingWeight == 1);
    CHECK(distToLine(ProjectivePoint(0.0, 0.0, 1.0, 2.0), v2.witness->line) < 1e-8);
    CHECK(v2.samplesChecked >= 1);

    // All tangents of a quadric are simple.
    auto v3 = testPX(Q, ProjectivePoint(1.0, 0.2, 0.4, -0.5), 200, 13);
    REQUIRE(v3.status == PXStatus::NotInPX);
    CHECK(v3.witness->branchingWeight == 1);
    CHECK(v3.witness->tag == ContactTag::SimpleTangent);

    // Determinism.
    auto v2b = testPX(F, ProjectivePoint(0.0, 0.0, 1.0, 2.0), 200, 7);
    CHECK(v2b.samplesChecked == v2.samplesChecked);
    CHECK(detail::coordDistance(v2b.witness->line.base, v2.witness->line.base) < 1e-15);

    // Guards: center on the surface, empty budget.
    CHECK_THROWS_AS(testPX(F, ProjectivePoint(1.0, -1.0, 0.0, 0.0), 10, 1), contract_error);
    CHECK_THROWS_AS(testPX(F, ProjectivePoint(0.0, 0.0, 1.0, 2.0), 0, 1), contract_error);
}
