#include <catch2/catch_amalgamated.hpp>

#include <mnd/io.hpp>
#include <mnd/rng.hpp>

using namespace mnd;

TEST_CASE("polynomial text parsing", "[io]") {
    auto F = parsePolynomialText("x0^3 + x1^3 + x2^3 + x3^3");
    CHECK(F.degree() == 3);
    CHECK(F.terms().size() == 4);
    P4 x{1.0, -1.0, 0.0, 0.0};
    CHECK(std::abs(F.evaluate(x)) < 1e-14);

    // Aliases, explicit '*', complex coefficients, negative terms.
    auto p = parsePolynomialText("2 x*y - (0,1) z^2 + 0.5 t y");
    CHECK(p.degree() == 2);
    P4 v{1.0, 2.0, 3.0, 4.0};
    // 2*1*2 - i*9 + 0.5*4*2 = 8 - 9i, then normalized by max |coeff| = 2.
    cplx want = cplx(8.0, -9.0) / 2.0;
    CHECK(std::abs(p.evaluate(v) - want) < 1e-12);

    CHECK_THROWS_AS(parsePolynomialText("x0^2 + x1"), contract_error);
    CHECK_THROWS_AS(parsePolynomialText(""), contract_error);
    CHECK_THROWS_AS(parsePolynomialText("x9^2"), contract_error);
}

TEST_CASE("polynomial text printing round-trips", "[io]") {
    auto F = fermatCubic();
    auto text = printPolynomialText(F);
    auto back = parsePolynomialText(text);
    REQUIRE(back.terms().size() == F.terms().size());
    Rng rng(55);
    for (int s = 0; s < 5; ++s) {
        P4 x{rng.box(), rng.box(), rng.box(), rng.box()};
        CHECK(std::abs(F.evaluate(x) - back.evaluate(x)) < 1e-12);
    }
}

TEST_CASE("polynomial json round-trips exactly", "[io]") {
    auto j = json::parse(R"({"vars":4,"degree":3,"terms":[
        {"e":[3,0,0,0],"c":[1,0]},
        {"e":[0,3,0,0],"c":[1,0]},
        {"e":[0,0,3,0],"c":[1,0]},
        {"e":[0,0,0,3],"c":[1,0]}]})");
    auto p = polyFromJson(j);
    CHECK(p.degree() == 3);
    CHECK(p.terms().size() == 4);
    auto j2 = polyToJson(p);
    auto p2 = polyFromJson(j2);
    REQUIRE(p2.terms().size() == p.terms().size());
    for (std::size_t i = 0; i < p.terms().size(); ++i) {
        CHECK(p2.terms()[i].e == p.terms()[i].e);
        CHECK(p2.terms()[i].c == p.terms()[i].c);
    }
    CHECK_THROWS_AS(polyFromJson(json::parse(R"({"vars":4,"degree":2,"terms":[{"e":[1,0,0],"c":[1,0]}]})")),
                    contract_error);
}

TEST_CASE("point argument parsing", "[io]") {
    P4 a = parsePointArg("0,0,0,1");
    CHECK(a[3] == cplx(1.0));
    CHECK(a[0] == cplx(0.0));
    P4 b = parsePointArg("1,0,1+2i,3i");
    CHECK(b[2] == cplx(1.0, 2.0));
    CHECK(b[3] == cplx(0.0, 3.0));
    P4 c = parsePointArg("-1.5,2e-3,0,-2i");
    CHECK(c[0] == cplx(-1.5));
    CHECK(c[1] == cplx(2e-3));
    CHECK(c[3] == cplx(0.0, -2.0));
    CHECK_THROWS_AS(parsePointArg("1,2,3"), contract_error);
}

TEST_CASE("run config round-trips losslessly", "[io]") {
    RunConfig c;
    c.seed = 123456789012345ull;
    c.clusterTol = 3.25e-8;
    c.trackerTol = 1e-12;
    c.residualTol = 2e-9;
    c.pxSamples = 77;
    c.extraSlices = 5;
    c.scanGrid = 4;
    c.outputPath = "/tmp/report.json";
    auto j = configToJson(c);
    auto text = j.dump();
    auto back = configFromJson(json::parse(text));
    CHECK(back == c);
    // Defaults fill missing fields.
    auto partial = configFromJson(json::parse(R"({"seed": 9})"));
    CHECK(partial.seed == 9);
    CHECK(partial.pxSamples == RunConfig{}.pxSamples);
}
