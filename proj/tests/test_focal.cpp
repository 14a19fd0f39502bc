#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <mnd/contact.hpp>
#include <mnd/focal.hpp>
#include <mnd/homogeneous.hpp>
#include <mnd/projective.hpp>
#include <mnd/rng.hpp>

using mnd::cplx;
using mnd::P4;

namespace {

double entryDiff(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Exact affine dependence on t shows up as a vanishing second difference.
void checkAffineInT(const mnd::LineFamily& fam, cplx s1, cplx s2) {
    auto a0 = mnd::characteristicMatrix(fam, s1, s2, 0.0);
    auto a1 = mnd::characteristicMatrix(fam, s1, s2, 1.0);
    auto a2 = mnd::characteristicMatrix(fam, s1, s2, 2.0);
    double scale = std::max(1.0, std::max(a0.cwiseAbs().maxCoeff(), a2.cwiseAbs().maxCoeff()));
    REQUIRE(entryDiff(a2 + a0, a1 + a1) < 1e-12 * scale);
}

}  // namespace

TEST_CASE("lines through a point: double focus at the point", "[focal]") {
    mnd::ProjectivePoint q(0.3, -0.7, 1.1, 1.0);
    mnd::LineFamily fam = mnd::linesThroughPoint(q);

    // The base point never moves, so A(0) = 0 and the pencil is t times a
    // constant nonsingular matrix.
    auto a0 = mnd::characteristicMatrix(fam, 0.15, -0.4, 0.0);
    REQUIRE(a0.cwiseAbs().maxCoeff() < 1e-14);
    auto a1 = mnd::characteristicMatrix(fam, 0.15, -0.4, 1.0);
    REQUIRE(std::abs(a1.determinant()) > 1e-3);
    checkAffineInT(fam, 0.15, -0.4);

    for (auto s : {std::array<cplx, 2>{0.0, 0.0}, {0.4, 0.2}, {cplx(-0.3, 0.1), 0.55}}) {
        mnd::FocusReport rep = mnd::fociOnMember(fam, s[0], s[1]);
        REQUIRE(rep.focalPolynomial.degree() == 2);
        REQUIRE(rep.foci.size() == 1);
        REQUIRE(rep.foci[0].multiplicity == 2);
        REQUIRE(std::abs(rep.foci[0].t) < 1e-6);
        REQUIRE(mnd::samePoint(rep.foci[0].point, q, 1e-8));
    }
}

TEST_CASE("translation family: constant pencil, no foci", "[focal]") {
    mnd::LineFamily fam = mnd::translationFamily();

    auto a0 = mnd::characteristicMatrix(fam, 0.2, -0.9, 0.0);
    auto aBig = mnd::characteristicMatrix(fam, 0.2, -0.9, cplx(5.0, -3.0));
    REQUIRE(entryDiff(a0, aBig) < 1e-14);
    REQUIRE(std::abs(a0.determinant()) > 1e-6);

    mnd::FocusReport rep = mnd::fociOnMember(fam, 0.2, -0.9);
    REQUIRE(rep.focalPolynomial.degree() == 0);
    REQUIRE(rep.foci.empty());
}

TEST_CASE("sphere tangent family: tangency focus plus caustic focus", "[focal]") {
    mnd::LineFamily fam = mnd::sphereTangentFamily();
    mnd::Rng rng(20240817);

    for (int trial = 0; trial < 5; ++trial) {
        cplx s1 = fam.center[0] + rng.real(-0.2, 0.2);
        cplx s2 = fam.center[1] + rng.real(-0.2, 0.2);
        mnd::FocusReport rep = mnd::fociOnMember(fam, s1, s2, 1e-6);

        // Order-2 contact: the tangency is a simple focus, and the second
        // focus sits where the member touches the caustic of the family.
        REQUIRE(rep.focalPolynomial.degree() == 2);
        REQUIRE(rep.foci.size() == 2);
        int msum = 0;
        for (const auto& f : rep.foci) msum += f.multiplicity;
        REQUIRE(msum == 2);

        std::size_t tangIdx =
            std::abs(rep.foci[0].t) <= std::abs(rep.foci[1].t) ? 0 : 1;
        const auto& tang = rep.foci[tangIdx];
        const auto& caustic = rep.foci[1 - tangIdx];
        REQUIRE(std::abs(tang.t) < 1e-6);
        REQUIRE(std::abs(caustic.t) > 1e-2);

        mnd::LineSample m = fam.eval(s1, s2);
        REQUIRE(mnd::samePoint(tang.point, mnd::ProjectivePoint(m.p), 1e-6));
        // The tangency focus lies on the quadric the family is tangent to.
        const P4& x = tang.point.v;
        cplx qv = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - x[3] * x[3];
        REQUIRE(std::abs(qv) < 1e-9);
    }
}

TEST_CASE("asymptotic tangents of a cubic: multiplicity-two focus at the tangency", "[focal]") {
    // Anchor on the Fermat cubic with real asymptotic directions; contact
    // order three means the line meets the cubic only at the tangency, and
    // the focal polynomial degenerates to a double root there.
    double a = -std::cbrt(0.782);
    mnd::ProjectivePoint anchor(a, 0.5, -0.7, 1.0);
    mnd::LineFamily fam = mnd::asymptoticTangentFamily(mnd::fermatCubic(), anchor);

    mnd::LineSample m0 = fam.eval(0.0, 0.0);
    REQUIRE(mnd::samePoint(mnd::ProjectivePoint(m0.p), anchor, 1e-10));
    mnd::ContactProfile prof =
        mnd::contactProfile(mnd::fermatCubic(), mnd::ProjectiveLine(anchor, m0.v));
    REQUIRE(prof.tag == mnd::ContactTag::Asymptotic);
    REQUIRE(prof.type == std::vector<int>{3});

    mnd::Rng rng(5150);
    for (int trial = 0; trial < 4; ++trial) {
        cplx s1 = rng.real(-0.02, 0.02);
        cplx s2 = rng.real(-0.02, 0.02);
        mnd::FocusReport rep = mnd::fociOnMember(fam, s1, s2, 1e-6);
        REQUIRE(rep.focalPolynomial.degree() == 2);
        REQUIRE(rep.foci.size() == 1);
        REQUIRE(rep.foci[0].multiplicity == 2);
        REQUIRE(std::abs(rep.foci[0].t) < 1e-6);
        mnd::LineSample m = fam.eval(s1, s2);
        REQUIRE(mnd::samePoint(rep.foci[0].point, mnd::ProjectivePoint(m.p), 1e-6));
    }

    // The two branches at the anchor give genuinely different lines.
    mnd::LineFamily other = mnd::asymptoticTangentFamily(mnd::fermatCubic(), anchor, 1);
    mnd::LineSample m1 = other.eval(0.0, 0.0);
    cplx cross = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            cross += std::abs(m0.v[i] * m1.v[j] - m0.v[j] * m1.v[i]);
    REQUIRE(std::abs(cross) > 1e-3);
}

TEST_CASE("finite-difference jets match analytic ones", "[focal]") {
    mnd::LineFamily an = mnd::sphereTangentFamily();
    mnd::LineFamily fd = an;
    fd.mode = mnd::DerivativeMode::FiniteDifference;

    cplx s1 = 0.33, s2 = 0.47;
    mnd::LineJet ja = mnd::familyJet(an, s1, s2);
    mnd::LineJet jf = mnd::familyJet(fd, s1, s2);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 4; ++i) {
            auto ku = static_cast<std::size_t>(k);
            REQUIRE(std::abs(ja.dp[ku][i] - jf.dp[ku][i]) < 1e-7);
            REQUIRE(std::abs(ja.dv[ku][i] - jf.dv[ku][i]) < 1e-7);
        }

    auto pa = mnd::characteristicPencil(an, s1, s2);
    auto pf = mnd::characteristicPencil(fd, s1, s2);
    REQUIRE(entryDiff(pa.A0, pf.A0) < 1e-7);
    REQUIRE(entryDiff(pa.A1, pf.A1) < 1e-7);

    mnd::FocusReport ra = mnd::fociOnMember(an, s1, s2);
    mnd::FocusReport rf = mnd::fociOnMember(fd, s1, s2);
    REQUIRE(ra.foci.size() == rf.foci.size());
    for (std::size_t i = 0; i < ra.foci.size(); ++i)
        REQUIRE(std::abs(ra.foci[i].t - rf.foci[i].t) < 1e-5);
}

TEST_CASE("random polynomial families: affine pencil, quadratic determinant", "[focal]") {
    mnd::Rng rng(818);
    int built = 0;
    for (int trial = 0; trial < 8 && built < 5; ++trial) {
        std::array<mnd::BiPoly, 4> pc, vc;
        for (int i = 0; i < 4; ++i) {
            auto k = static_cast<std::size_t>(i);
            pc[k].terms = {{0, 0, rng.box()}, {1, 0, 0.5 * rng.box()}, {0, 1, 0.5 * rng.box()},
                           {1, 1, 0.25 * rng.box()}};
            vc[k].terms = {{0, 0, rng.box()}, {1, 0, 0.5 * rng.box()}, {0, 2, 0.25 * rng.box()}};
        }
        mnd::LineFamily fam;
        try {
            fam = mnd::polynomialFamily(pc, vc, {0.0, 0.0}, 1.0);
        } catch (const mnd::contract_error&) {
            continue;  // degenerate draw
        }
        ++built;

        cplx s1 = 0.3 * rng.box(), s2 = 0.3 * rng.box();
        checkAffineInT(fam, s1, s2);

        mnd::FocusReport rep = mnd::fociOnMember(fam, s1, s2);
        REQUIRE(rep.focalPolynomial.degree() <= 2);
        REQUIRE(rep.focalPolynomial.degree() == 2);  // full measure in the draw
        int msum = 0;
        for (const auto& f : rep.foci) msum += f.multiplicity;
        REQUIRE(msum == rep.focalPolynomial.degree());
    }
    REQUIRE(built >= 5);
}

TEST_CASE("family that does not fill space is rejected", "[focal]") {
    // All members are the same line: the base point slides along it and the
    // direction never changes, so the normal velocity vanishes identically.
    std::array<mnd::BiPoly, 4> pc, vc;
    pc[0].terms = {{0, 0, 1.0}};
    pc[1].terms = {{0, 0, 0.5}, {1, 0, 1.0}};   // p = b + s1 * v
    pc[2].terms = {{0, 0, -0.3}};
    pc[3].terms = {{0, 0, 1.0}, {1, 0, 2.0}};
    vc[1].terms = {{0, 0, 1.0}};
    vc[3].terms = {{0, 0, 2.0}};
    mnd::LineFamily fam = mnd::polynomialFamily(pc, vc, {0.0, 0.0}, 0.5);

    REQUIRE_THROWS_AS(mnd::fociOnMember(fam, 0.1, -0.2), mnd::numeric_error);
}

TEST_CASE("foci agree across line reparametrization", "[focal]") {
    mnd::LineFamily base = mnd::sphereTangentFamily();

    // Same lines, different representatives: p' = p + 0.3 v, v' = 1.7 v.
    mnd::LineFamily re = base;
    re.eval = [base](cplx s1, cplx s2) {
        mnd::LineSample m = base.eval(s1, s2);
        mnd::LineSample out;
        for (int i = 0; i < 4; ++i) {
            out.p[i] = m.p[i] + 0.3 * m.v[i];
            out.v[i] = 1.7 * m.v[i];
        }
        return out;
    };
    re.jet = [base](cplx s1, cplx s2) {
        mnd::LineJet j = base.jet(s1, s2);
        mnd::LineJet out;
        for (int i = 0; i < 4; ++i) {
            out.p[i] = j.p[i] + 0.3 * j.v[i];
            out.v[i] = 1.7 * j.v[i];
            for (std::size_t k = 0; k < 2; ++k) {
                out.dp[k][i] = j.dp[k][i] + 0.3 * j.dv[k][i];
                out.dv[k][i] = 1.7 * j.dv[k][i];
            }
        }
        return out;
    };

    cplx s1 = 0.28, s2 = 0.52;
    mnd::FocusReport ra = mnd::fociOnMember(base, s1, s2);
    mnd::FocusReport rb = mnd::fociOnMember(re, s1, s2);
    REQUIRE(ra.foci.size() == rb.foci.size());
    for (std::size_t i = 0; i < ra.foci.size(); ++i) {
        // t-charts differ, points in P^3 must not.
        REQUIRE(mnd::samePoint(ra.foci[i].point, rb.foci[i].point, 1e-8));
        cplx tExpected = (ra.foci[i].t - 0.3) / 1.7;
        REQUIRE(std::abs(rb.foci[i].t - tExpected) < 1e-6);
    }
}

TEST_CASE("fundamental point detection", "[focal]") {
    mnd::ProjectivePoint q(0.3, -0.7, 1.1, 1.0);
    mnd::LineFamily fam = mnd::linesThroughPoint(q);

    REQUIRE(mnd::isFundamentalPoint(fam, q) == mnd::Fundamentality::Yes);

    // A point off the center lies on at most one member: not fundamental.
    mnd::ProjectiveFrame fr = mnd::frameForCenter(q);
    Eigen::Vector4cd xe = mnd::toEigen(q.v) + fr.Tinv.col(0) + 0.2 * fr.Tinv.col(1) -
                          0.3 * fr.Tinv.col(2);
    mnd::ProjectivePoint x(mnd::fromEigen(xe));
    REQUIRE(mnd::isFundamentalPoint(fam, x) == mnd::Fundamentality::No);

    // A point strictly inside the sphere meets no tangent line at all.
    mnd::LineFamily sph = mnd::sphereTangentFamily();
    REQUIRE(mnd::isFundamentalPoint(sph, mnd::ProjectivePoint(0.0, 0.0, 0.0, 1.0)) ==
            mnd::Fundamentality::No);

    REQUIRE_THROWS_AS(mnd::isFundamentalPoint(fam, q, 1e-6, 2), mnd::contract_error);
}

TEST_CASE("bitangent family of a quartic: foci at the two tangency points", "[focal]") {
    // Quartic = product of two quadrics; a line tangent to both is a
    // bitangent of the product surface.  Members are parametrized by the
    // tangency point on the first quadric (Segre chart), with the direction
    // picked in its tangent pencil so the line also touches the second.
    using mnd::cplx;
    auto Pof = [](cplx s1, cplx s2) { return P4{1.0, s1, s2, s1 * s2}; };
    auto d1of = [](cplx s2) { return P4{0.0, 1.0, 0.0, s2}; };
    auto d2of = [](cplx s1) { return P4{0.0, 0.0, 1.0, s1}; };
    // Second quadric x0^2 + 2 x1^2 + 3 x2^2 + 5 x3^2 and its polar form.
    auto b2 = [](const P4& x, const P4& y) {
        return x[0] * y[0] + 2.0 * x[1] * y[1] + 3.0 * x[2] * y[2] + 5.0 * x[3] * y[3];
    };

    std::array<cplx, 2> c0{0.2, -0.3};
    // Tangency to the second quadric is a quadratic condition on the pencil
    // w = d1 + u d2; fix the branch by the root chosen at the box center.
    auto tangentRoots = [&](cplx s1, cplx s2) {
        P4 P = Pof(s1, s2), d1 = d1of(s2), d2 = d2of(s1);
        cplx qP = b2(P, P);
        cplx a0 = b2(P, d1) * b2(P, d1) - qP * b2(d1, d1);
        cplx a1 = 2.0 * (b2(P, d1) * b2(P, d2) - qP * b2(d1, d2));
        cplx a2 = b2(P, d2) * b2(P, d2) - qP * b2(d2, d2);
        cplx disc = std::sqrt(a1 * a1 - 4.0 * a0 * a2);
        return std::array<cplx, 2>{(-a1 + disc) / (2.0 * a2), (-a1 - disc) / (2.0 * a2)};
    };
    cplx uAnchor = tangentRoots(c0[0], c0[1])[0];

    mnd::LineFamily fam;
    fam.center = c0;
    fam.radius = 0.02;
    fam.mode = mnd::DerivativeMode::FiniteDifference;
    fam.eval = [=](cplx s1, cplx s2) {
        auto roots = tangentRoots(s1, s2);
        cplx u = (std::abs(roots[0] - uAnchor) <= std::abs(roots[1] - uAnchor)) ? roots[0]
                                                                                : roots[1];
        P4 d1 = d1of(s2), d2 = d2of(s1);
        mnd::LineSample m;
        m.p = Pof(s1, s2);
        for (int i = 0; i < 4; ++i) m.v[i] = d1[i] + u * d2[i];
        return m;
    };

    cplx s1 = 0.205, s2 = -0.295;
    mnd::LineSample m = fam.eval(s1, s2);

    // Sanity: the member really is bitangent to the product quartic.
    mnd::HomogeneousPolynomial Q1(4, 2, {{{1, 0, 0, 1}, 1.0}, {{0, 1, 1, 0}, -1.0}});
    mnd::HomogeneousPolynomial Q2(4, 2, {{{2, 0, 0, 0}, 1.0},
                                         {{0, 2, 0, 0}, 2.0},
                                         {{0, 0, 2, 0}, 3.0},
                                         {{0, 0, 0, 2}, 5.0}});
    mnd::ProjectiveLine line(mnd::ProjectivePoint(m.p), m.v);
    mnd::ContactProfile prof = mnd::contactProfile(Q1 * Q2, line);
    REQUIRE(prof.tag == mnd::ContactTag::Bitangent);
    REQUIRE(prof.type == std::vector<int>{2, 2});

    // The second tangency parameter, from the double root of the restriction
    // of the second quadric to the member.
    cplx t2 = -b2(m.p, m.v) / b2(m.v, m.v);

    mnd::FocusReport rep = mnd::fociOnMember(fam, s1, s2, 1e-6);
    REQUIRE(rep.focalPolynomial.degree() == 2);
    REQUIRE(rep.foci.size() == 2);
    REQUIRE(rep.foci[0].multiplicity == 1);
    REQUIRE(rep.foci[1].multiplicity == 1);

    // One focus per tangency point, in some order.
    cplx ta = rep.foci[0].t, tb = rep.foci[1].t;
    if (std::abs(ta) > std::abs(tb)) std::swap(ta, tb);
    REQUIRE(std::abs(ta) < 1e-5);
    REQUIRE(std::abs(tb - t2) < 1e-5 * std::max(1.0, std::abs(t2)));

    mnd::ProjectivePoint tangency1(m.p);
    mnd::ProjectivePoint tangency2(P4{m.p[0] + t2 * m.v[0], m.p[1] + t2 * m.v[1],
                                      m.p[2] + t2 * m.v[2], m.p[3] + t2 * m.v[3]});
    bool firstIsBase = mnd::samePoint(rep.foci[0].point, tangency1, 1e-5);
    const auto& fA = firstIsBase ? rep.foci[0] : rep.foci[1];
    const auto& fB = firstIsBase ? rep.foci[1] : rep.foci[0];
    REQUIRE(mnd::samePoint(fA.point, tangency1, 1e-5));
    REQUIRE(mnd::samePoint(fB.point, tangency2, 1e-5));
}
