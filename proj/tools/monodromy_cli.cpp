// Command line front end for the monodromy engine.
//
// Subcommands: analyze, scan, branch-curve, contact, px-test, focal-demo,
// numerology, fermat-regression.  Every command accepts --json (machine
// report on stdout) and most accept --out FILE.  Reports carry a
// schemaVersion and are byte-stable for fixed inputs and seed, except for
// the timestamp field.
//
// Exit codes: 0 success, 1 regression mismatch, 2 bad input or contract
// violation, 3 numerical failure, 4 unexpected error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <mnd/branch_curve.hpp>
#include <mnd/config.hpp>
#include <mnd/contact.hpp>
#include <mnd/core.hpp>
#include <mnd/focal.hpp>
#include <mnd/homogeneous.hpp>
#include <mnd/io.hpp>
#include <mnd/monodromy.hpp>
#include <mnd/numerology.hpp>
#include <mnd/perm_group.hpp>
#include <mnd/permutation.hpp>
#include <mnd/projective.hpp>
#include <mnd/rng.hpp>
#include <mnd/second_fundamental.hpp>
#include <mnd/tracking.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;
using namespace mnd;

constexpr int kSchemaVersion = 1;

std::string timestampNow() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json baseReport(const std::string& command) {
    json j;
    j["schemaVersion"] = kSchemaVersion;
    j["command"] = command;
    j["timestamp"] = timestampNow();
    return j;
}

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw contract_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Surface input: a path to a polynomial JSON or text file, or the
// polynomial text itself.
HomogeneousPolynomial loadSurface(const std::string& arg) {
    if (arg.empty()) throw contract_error("--surface is required");
    if (!std::filesystem::exists(arg) && arg.find('/') != std::string::npos)
        throw contract_error("cannot open " + arg);
    std::string text = std::filesystem::exists(arg) ? readFile(arg) : arg;
    auto pos = text.find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) throw contract_error("surface input is empty");
    if (text[pos] == '{') return polyFromJson(json::parse(text));
    return parsePolynomialText(text);
}

ProjectivePoint parsePointOption(const std::string& pointArg, const std::string& pointJson) {
    if (!pointArg.empty()) return ProjectivePoint(parsePointArg(pointArg));
    if (!pointJson.empty()) {
        std::string text = std::filesystem::exists(pointJson) ? readFile(pointJson) : pointJson;
        return ProjectivePoint(point4FromJson(json::parse(text)));
    }
    throw contract_error("a point is required (--point or --point-json)");
}

int threadBudget(std::size_t jobs) {
    long n = 0;
    if (const char* env = std::getenv("MONODROMY_THREADS")) n = std::strtol(env, nullptr, 10);
    if (n <= 0) n = static_cast<long>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    long cap = static_cast<long>(jobs == 0 ? 1 : jobs);
    return static_cast<int>(std::min(n, cap));
}

std::string fmtC(cplx z) {
    char buf[64];
    if (std::abs(z.imag()) < 1e-12 * std::max(1.0, std::abs(z.real()))) {
        std::snprintf(buf, sizeof buf, "%.6g", z.real());
    } else {
        std::snprintf(buf, sizeof buf, "(%.6g,%.6g)", z.real(), z.imag());
    }
    return buf;
}

std::string fmtPoint(const P4& x) {
    std::string s = "(";
    for (int i = 0; i < 4; ++i) {
        if (i) s += " : ";
        s += fmtC(x[i]);
    }
    return s + ")";
}

json permCyclesJson(const Permutation& p) {
    json cycles = json::array();
    for (const auto& cyc : p.cycles()) cycles.push_back(cyc);
    return cycles;
}

json certificateJson(const TrackingCertificate& c) {
    return json{{"steps", c.steps},
                {"rejectedSteps", c.rejectedSteps},
                {"minSeparation", c.minSeparation},
                {"residualMax", c.residualMax},
                {"loopsTracked", c.loopsTracked},
                {"slicesUsed", c.slicesUsed}};
}

json generatorJson(const MonodromyGenerator& g) {
    json loop;
    loop["center"] = complexToJson(g.loop.center);
    loop["radius"] = g.loop.radius;
    return json{{"loop", loop},
                {"perm", permCyclesJson(g.perm)},
                {"permText", g.perm.cycleString()}};
}

void putMonodromy(json& rep, const MonodromyResult& r) {
    rep["degree"] = r.degree;
    json gens = json::array();
    for (const auto& g : r.generators) gens.push_back(generatorJson(g));
    rep["generators"] = gens;
    rep["groupOrder"] = r.group.order;
    rep["classification"] = r.group.name();
    rep["verdict"] = verdictName(r.verdict);
    rep["transitive"] = r.transitive;
    rep["afterLoops"] = r.afterLoops;
    rep["certificate"] = certificateJson(r.certificate);
}

json profileJson(const ContactProfile& p) {
    json j;
    j["tag"] = tagName(p.tag);
    j["type"] = p.type;
    j["branchingWeight"] = p.branchingWeight;
    j["line"] = json{{"base", pointToJson(p.line.base)}, {"dir", pointToJson(p.line.dir)}};
    json pts = json::array();
    for (const auto& cp : p.contactPoints)
        pts.push_back(json{{"point", pointToJson(cp.point.v)}, {"multiplicity", cp.multiplicity}});
    j["contactPoints"] = pts;
    return j;
}

json rationalJson(const Rational& r) {
    return json{{"num", r.num}, {"den", r.den}, {"text", r.str()}};
}

void writeOut(const json& report, const std::string& outPath) {
    if (outPath.empty()) return;
    std::ofstream out(outPath);
    if (!out) throw contract_error("cannot write " + outPath);
    out << report.dump(2) << "\n";
}

void emit(const json& report, const std::string& outPath, bool jsonStdout,
          const std::string& humanText) {
    writeOut(report, outPath);
    if (jsonStdout) {
        std::cout << report.dump(2) << "\n";
    } else if (!humanText.empty()) {
        std::cout << humanText;
    }
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOpts {
    std::string surface, point, pointJson, config, out;
    std::uint64_t seed = 0;
    bool seedSet = false;
    bool jsonOut = false;
};

int runAnalyze(const AnalyzeOpts& o) {
    RunConfig cfg;
    if (!o.config.empty()) cfg = configFromJson(json::parse(readFile(o.config)));
    if (o.seedSet) cfg.seed = o.seed;
    HomogeneousPolynomial f = loadSurface(o.surface);
    ProjectivePoint L = parsePointOption(o.point, o.pointJson);

    MonodromyResult r = runMonodromy(f, L, cfg);

    json rep = baseReport("analyze");
    rep["surfaceDegree"] = f.degree();
    rep["center"] = pointToJson(L.v);
    rep["seed"] = cfg.seed;
    putMonodromy(rep, r);

    std::ostringstream os;
    os << "surface degree " << f.degree() << ", center " << fmtPoint(L.v) << "\n";
    os << "fiber degree " << r.degree << ", loops used " << r.afterLoops << " of "
       << r.certificate.loopsTracked << " tracked on " << r.certificate.slicesUsed
       << " slice(s)\n";
    for (const auto& g : r.generators)
        os << "  loop center " << fmtC(g.loop.center) << " radius " << g.loop.radius << ": "
           << g.perm.cycleString() << "\n";
    os << "group order " << r.group.order << " [" << r.group.name() << "], "
       << (r.transitive ? "transitive" : "intransitive") << ", verdict "
       << verdictName(r.verdict) << "\n";
    os << "certificate: " << r.certificate.steps << " steps (" << r.certificate.rejectedSteps
       << " rejected), min separation " << r.certificate.minSeparation << ", max residual "
       << r.certificate.residualMax << "\n";

    std::string outPath = !o.out.empty() ? o.out : cfg.outputPath;
    emit(rep, outPath, o.jsonOut, os.str());
    return 0;
}

// ------------------------------------------------------------------- scan

struct ScanOpts {
    std::string surface, config, out, box = "-1,1";
    int grid = 0;
    bool gridSet = false;
    std::uint64_t seed = 0;
    bool seedSet = false;
    double jitter = 0.05;
    bool jsonOut = false;
};

int runScan(const ScanOpts& o) {
    RunConfig cfg;
    if (!o.config.empty()) cfg = configFromJson(json::parse(readFile(o.config)));
    if (o.seedSet) cfg.seed = o.seed;
    int grid = o.gridSet ? o.grid : cfg.scanGrid;
    if (grid < 1) throw contract_error("scan: grid must be at least 1");

    double lo = -1.0, hi = 1.0;
    if (std::sscanf(o.box.c_str(), "%lf,%lf", &lo, &hi) != 2 || !(lo < hi))
        throw contract_error("scan: --box wants LO,HI with LO < HI");
    if (o.jitter < 0.0) throw contract_error("scan: jitter must be nonnegative");

    HomogeneousPolynomial f = loadSurface(o.surface).normalized();

    double h = grid > 1 ? (hi - lo) / (grid - 1) : (hi - lo);
    struct Job {
        int index;
        P4 point;
        std::uint64_t seed;
        bool onSurface = false;
    };
    std::vector<Job> jobs;
    Rng master(cfg.seed);
    int index = 0;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            for (int k = 0; k < grid; ++k) {
                double a = grid > 1 ? lo + i * h : 0.5 * (lo + hi);
                double b = grid > 1 ? lo + j * h : 0.5 * (lo + hi);
                double c = grid > 1 ? lo + k * h : 0.5 * (lo + hi);
                Rng pr = master.fork(static_cast<std::uint64_t>(index));
                if (o.jitter > 0.0) {
                    a += o.jitter * h * pr.real(-1.0, 1.0);
                    b += o.jitter * h * pr.real(-1.0, 1.0);
                    c += o.jitter * h * pr.real(-1.0, 1.0);
                }
                Job job;
                job.index = index;
                job.point = P4{a, b, c, 1.0};
                job.seed = pr.seed();
                ProjectivePoint P(job.point);
                job.onSurface = std::abs(f.evaluate(P.v)) < 1e-9;
                jobs.push_back(job);
                ++index;
            }

    struct Outcome {
        bool skipped = false;
        std::string error;
        json summary;
        bool candidate = false;
    };
    std::vector<Outcome> outcomes(jobs.size());

    auto runJob = [&](std::size_t i) {
        const Job& job = jobs[i];
        Outcome& out = outcomes[i];
        json pt = json::array({job.point[0].real(), job.point[1].real(), job.point[2].real()});
        if (job.onSurface) {
            out.skipped = true;
            out.summary = json{{"index", job.index}, {"point", pt}, {"skipped", "on surface"}};
            return;
        }
        try {
            RunConfig pcfg = cfg;
            pcfg.seed = job.seed;
            MonodromyResult r = runMonodromy(f, ProjectivePoint(job.point), pcfg);
            out.candidate = r.verdict == MonodromyVerdict::NoEvidenceOfSd;
            out.summary = json{{"index", job.index},
                               {"point", pt},
                               {"seed", job.seed},
                               {"degree", r.degree},
                               {"groupOrder", r.group.order},
                               {"classification", r.group.name()},
                               {"verdict", verdictName(r.verdict)},
                               {"afterLoops", r.afterLoops}};
        } catch (const std::exception& e) {
            out.error = e.what();
            out.summary = json{{"index", job.index}, {"point", pt}, {"error", e.what()}};
        }
    };

    int nThreads = threadBudget(jobs.size());
    if (nThreads <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) runJob(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nThreads));
        for (int t = 0; t < nThreads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) runJob(i);
            });
        for (auto& th : pool) th.join();
    }

    json candidates = json::array();
    json errors = json::array();
    json skipped = json::array();
    for (const auto& out : outcomes) {
        if (out.skipped) skipped.push_back(out.summary);
        else if (!out.error.empty()) errors.push_back(out.summary);
        else if (out.candidate) candidates.push_back(out.summary);
    }

    json rep = baseReport("scan");
    rep["surfaceDegree"] = f.degree();
    rep["grid"] = grid;
    rep["box"] = json::array({lo, hi});
    rep["jitter"] = o.jitter;
    rep["seed"] = cfg.seed;
    rep["pointsSampled"] = jobs.size();
    rep["candidates"] = candidates;
    rep["errors"] = errors;
    rep["skipped"] = skipped;
    rep["note"] = "sampling only; an empty candidate list is not a proof";

    std::ostringstream os;
    os << "scanned " << jobs.size() << " points (" << grid << "^3 grid in [" << lo << "," << hi
       << "]^3, jitter " << o.jitter << ", seed " << cfg.seed << ", " << nThreads
       << " thread(s))\n";
    os << "candidates: " << candidates.size() << ", skipped: " << skipped.size()
       << ", errors: " << errors.size() << "\n";
    for (const auto& c : candidates)
        os << "  candidate at (" << c["point"][0].get<double>() << ", "
           << c["point"][1].get<double>() << ", " << c["point"][2].get<double>() << ") order "
           << c["groupOrder"].get<std::uint64_t>() << " [" << c["classification"].get<std::string>()
           << "]\n";
    for (const auto& e : errors)
        os << "  error at index " << e["index"].get<int>() << ": " << e["error"].get<std::string>()
           << "\n";

    std::string outPath = !o.out.empty() ? o.out : cfg.outputPath;
    emit(rep, outPath, o.jsonOut, os.str());
    return 0;
}

// ----------------------------------------------------------- branch-curve

struct BranchCurveOpts {
    std::string surface, point, pointJson, out, sliceCsv;
    std::uint64_t seed = 0;
    bool reduced = false;
    bool jsonOut = false;
};

int runBranchCurve(const BranchCurveOpts& o) {
    HomogeneousPolynomial f = loadSurface(o.surface);
    ProjectivePoint L = parsePointOption(o.point, o.pointJson);

    PlaneCurve full = discriminantCurve(f, frameForCenter(L));
    PlaneCurve curve = o.reduced ? squareFreePart(full) : full;

    if (!o.out.empty()) {
        json cj = polyToJson(curve.poly);
        std::ofstream out(o.out);
        if (!out) throw contract_error("cannot write " + o.out);
        out << cj.dump(2) << "\n";
    }

    json rep = baseReport("branch-curve");
    rep["surfaceDegree"] = f.degree();
    rep["center"] = pointToJson(L.v);
    rep["degree"] = curve.degree;
    rep["fullDegree"] = full.degree;
    rep["reduced"] = o.reduced;
    rep["curve"] = polyToJson(curve.poly);

    std::ostringstream os;
    os << "discriminant curve degree " << full.degree;
    if (o.reduced) os << ", square-free part degree " << curve.degree;
    os << "\n";
    if (!o.out.empty()) os << "curve written to " << o.out << "\n";

    if (!o.sliceCsv.empty()) {
        Rng rng(o.seed);
        P3 base{};
        bool found = false;
        for (int attempt = 0; attempt < 64 && !found; ++attempt) {
            base = P3{rng.real(-1.0, 1.0), rng.real(-1.0, 1.0), 1.0};
            found = !curve.vanishesAt(base, 1e-6);
        }
        if (!found) throw numeric_error("branch-curve: no slice base point off the curve");
        PencilSlice slice = pencilSlice(curve, base, o.seed);
        std::ofstream csv(o.sliceCsv);
        if (!csv) throw contract_error("cannot write " + o.sliceCsv);
        csv << "re,im,multiplicity\n";
        char buf[96];
        json punctures = json::array();
        for (const auto& p : slice.punctures) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", p.u.real(), p.u.imag(),
                          p.multiplicity);
            csv << buf;
            punctures.push_back(json{{"u", complexToJson(p.u)}, {"multiplicity", p.multiplicity}});
        }
        rep["slice"] = json{{"base", pointToJson(slice.base)},
                            {"dir", pointToJson(slice.dir)},
                            {"punctures", punctures}};
        os << "slice punctures (" << slice.punctures.size() << ") written to " << o.sliceCsv
           << "\n";
    }

    emit(rep, "", o.jsonOut, os.str());
    return 0;
}

// ---------------------------------------------------------------- contact

struct ContactOpts {
    std::string surface, line, base, dir, out;
    bool jsonOut = false;
};

int runContact(const ContactOpts& o) {
    HomogeneousPolynomial f = loadSurface(o.surface);

    ProjectiveLine line = [&] {
        if (!o.line.empty()) {
            // eight comma separated entries: two points spanning the line
            std::vector<std::string> parts;
            std::string cur;
            for (char ch : o.line) {
                if (ch == ',') {
                    parts.push_back(cur);
                    cur.clear();
                } else {
                    cur += ch;
                }
            }
            parts.push_back(cur);
            if (parts.size() != 8)
                throw contract_error("--line wants 8 comma separated entries (two points)");
            P4 a{}, b{};
            for (int i = 0; i < 4; ++i) a[i] = parseComplexEntry(parts[i]);
            for (int i = 0; i < 4; ++i) b[i] = parseComplexEntry(parts[4 + i]);
            return lineThrough(ProjectivePoint(a), ProjectivePoint(b));
        }
        if (o.base.empty() || o.dir.empty())
            throw contract_error("contact: give --line A0,..,B3 or both --base and --dir");
        return ProjectiveLine(ProjectivePoint(parsePointArg(o.base)), parsePointArg(o.dir));
    }();

    ContactProfile prof = contactProfile(f, line);

    json rep = baseReport("contact");
    rep["surfaceDegree"] = f.degree();
    rep["profile"] = profileJson(prof);

    std::ostringstream os;
    os << "intersection type (";
    for (std::size_t i = 0; i < prof.type.size(); ++i) os << (i ? " " : "") << prof.type[i];
    os << "), tag " << tagName(prof.tag) << ", branching weight " << prof.branchingWeight << "\n";
    for (const auto& cp : prof.contactPoints)
        os << "  contact point " << fmtPoint(cp.point.v) << " multiplicity " << cp.multiplicity
           << "\n";

    emit(rep, o.out, o.jsonOut, os.str());
    return 0;
}

// ---------------------------------------------------------------- px-test

struct PxOpts {
    std::string surface, point, pointJson, out;
    int budget = 200;
    std::uint64_t seed = 0;
    bool jsonOut = false;
};

int runPxTest(const PxOpts& o) {
    HomogeneousPolynomial f = loadSurface(o.surface);
    ProjectivePoint L = parsePointOption(o.point, o.pointJson);

    PXVerdict v = testPX(f, L, o.budget, o.seed);

    json rep = baseReport("px-test");
    rep["surfaceDegree"] = f.degree();
    rep["point"] = pointToJson(L.v);
    rep["budget"] = o.budget;
    rep["seed"] = o.seed;
    rep["status"] = v.status == PXStatus::ProbablyInPX ? "ProbablyInPX" : "NotInPX";
    rep["samplesChecked"] = v.samplesChecked;
    if (v.witness) rep["witness"] = profileJson(*v.witness);

    // the verdict is the payload, so this command always prints JSON
    writeOut(rep, o.out);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------- focal-demo

BiPoly biPolyFromJson(const json& j) {
    BiPoly p;
    for (const auto& t : j) {
        BiPoly::Term term;
        term.i = t.at("i").get<int>();
        term.j = t.at("j").get<int>();
        const auto& c = t.at("c");
        if (c.is_array())
            term.c = cplx(c.at(0).get<double>(), c.at(1).get<double>());
        else
            term.c = cplx(c.get<double>(), 0.0);
        p.terms.push_back(term);
    }
    return p;
}

struct FocalOpts {
    std::string family, familyJson, point = "0,0,0,1", out;
    int samples = 20;
    std::uint64_t seed = 0;
    bool checkFundamental = false;
    bool jsonOut = false;
};

int runFocalDemo(const FocalOpts& o) {
    if (o.samples < 1) throw contract_error("focal-demo: samples must be positive");

    LineFamily fam;
    if (o.family == "point") {
        fam = linesThroughPoint(ProjectivePoint(parsePointArg(o.point)));
    } else if (o.family == "sphere-tangent") {
        fam = sphereTangentFamily();
    } else if (o.family == "custom-json") {
        if (o.familyJson.empty())
            throw contract_error("focal-demo: --family custom-json needs --family-json FILE");
        json fj = json::parse(readFile(o.familyJson));
        std::array<BiPoly, 4> pc, vc;
        const json& pj = fj.at("p");
        const json& vj = fj.at("v");
        if (pj.size() != 4 || vj.size() != 4)
            throw contract_error("focal-demo: family JSON wants 4 components for p and v");
        for (int i = 0; i < 4; ++i) {
            pc[i] = biPolyFromJson(pj.at(i));
            vc[i] = biPolyFromJson(vj.at(i));
        }
        std::array<cplx, 2> center{cplx(0.0), cplx(0.0)};
        if (fj.contains("center"))
            for (int k = 0; k < 2; ++k) {
                const json& c = fj["center"].at(k);
                center[k] = c.is_array() ? cplx(c.at(0).get<double>(), c.at(1).get<double>())
                                         : cplx(c.get<double>(), 0.0);
            }
        double radius = fj.value("radius", 1.0);
        fam = polynomialFamily(pc, vc, center, radius);
    } else {
        throw contract_error("focal-demo: --family must be point, sphere-tangent, or custom-json");
    }

    Rng rng(o.seed);
    json members = json::array();
    std::map<int, int> degreeCounts;
    int maxMult = 0;
    int failures = 0;
    for (int m = 0; m < o.samples; ++m) {
        cplx s1 = fam.center[0] + 0.8 * fam.radius * rng.box();
        cplx s2 = fam.center[1] + 0.8 * fam.radius * rng.box();
        json entry;
        entry["index"] = m;
        entry["s"] = json::array({complexToJson(s1), complexToJson(s2)});
        try {
            FocusReport rep = fociOnMember(fam, s1, s2);
            entry["focalDegree"] = rep.focalPolynomial.degree();
            ++degreeCounts[rep.focalPolynomial.degree()];
            json foci = json::array();
            for (const auto& focus : rep.foci) {
                maxMult = std::max(maxMult, focus.multiplicity);
                json fj;
                fj["t"] = complexToJson(focus.t);
                fj["multiplicity"] = focus.multiplicity;
                fj["point"] = pointToJson(focus.point.v);
                Fundamentality fund = focus.fundamental;
                if (o.checkFundamental)
                    fund = isFundamentalPoint(fam, focus.point, 1e-6, 40);
                fj["fundamental"] = fundamentalityName(fund);
                foci.push_back(fj);
            }
            entry["foci"] = foci;
        } catch (const std::exception& e) {
            entry["error"] = e.what();
            ++failures;
        }
        members.push_back(entry);
    }

    json rep = baseReport("focal-demo");
    rep["family"] = o.family;
    rep["samples"] = o.samples;
    rep["seed"] = o.seed;
    rep["members"] = members;
    json hist = json::object();
    for (const auto& [deg, count] : degreeCounts) hist[std::to_string(deg)] = count;
    rep["summary"] =
        json{{"degreeCounts", hist}, {"maxMultiplicity", maxMult}, {"failures", failures}};

    std::ostringstream os;
    os << "family " << o.family << ", " << o.samples << " member(s), seed " << o.seed << "\n";
    os << "focal degree counts:";
    for (const auto& [deg, count] : degreeCounts) os << " " << deg << "x" << count;
    os << "; max multiplicity " << maxMult << "; failures " << failures << "\n";
    int shown = 0;
    for (const auto& entry : members) {
        if (shown >= 5) break;
        if (entry.contains("error")) continue;
        os << "  member " << entry["index"].get<int>() << ": foci";
        for (const auto& fj : entry["foci"])
            os << " t=" << fmtC(cplx(fj["t"][0].get<double>(), fj["t"][1].get<double>())) << " (m"
               << fj["multiplicity"].get<int>() << ")";
        os << "\n";
        ++shown;
    }

    emit(rep, o.out, o.jsonOut, os.str());
    return 0;
}

// ------------------------------------------------------------- numerology

int runNumerology(int degree, const std::string& out) {
    DegreeReport r = degreeReport(degree);
    json rep = baseReport("numerology");
    rep["d"] = r.d;
    rep["degR"] = r.degR;
    rep["degKR"] = r.degKR;
    rep["genusBoundR"] = rationalJson(r.genusBoundR);
    rep["planarGenusOfB"] = rationalJson(r.planarGenusOfB);
    rep["branchMustBeSingular"] = r.branchMustBeSingular;
    if (degree == 3) rep["cubicRamificationClassCheck"] = cubicRamificationClassCheck();
    writeOut(rep, out);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------ fermat-regression

struct RegressionOpts {
    std::string out;
    std::uint64_t seed = 0;
    bool jsonOut = false;
};

int runFermatRegression(const RegressionOpts& o) {
    HomogeneousPolynomial f = fermatCubic();
    Rng master(o.seed);
    json checks = json::array();
    bool allPass = true;
    std::ostringstream os;

    auto record = [&](const std::string& name, bool pass, const json& detail) {
        checks.push_back(json{{"name", name}, {"pass", pass}, {"detail", detail}});
        allPass = allPass && pass;
        os << (pass ? "PASS" : "FAIL") << " " << name << "\n";
    };

    // coordinate centers carry the order 3 group of 3-cycles
    {
        bool pass = true;
        json detail = json::array();
        for (int i = 0; i < 4; ++i) {
            P4 e{};
            e[i] = 1.0;
            RunConfig cfg;
            cfg.seed = o.seed;
            MonodromyResult r = runMonodromy(f, ProjectivePoint(e), cfg);
            bool threeCycles = true;
            for (const auto& g : r.generators) {
                auto ct = g.perm.cycleType();
                if (!ct.empty() && ct != std::vector<int>{3}) threeCycles = false;
            }
            bool ok = r.degree == 3 && r.group.order == 3 && threeCycles &&
                      r.verdict == MonodromyVerdict::NoEvidenceOfSd;
            pass = pass && ok;
            detail.push_back(json{{"center", i},
                                  {"groupOrder", r.group.order},
                                  {"classification", r.group.name()},
                                  {"pass", ok}});
        }
        record("coordinate-centers-order-3", pass, detail);
    }

    // generic centers give the full symmetric group on 3 sheets
    {
        bool pass = true;
        json detail = json::array();
        HomogeneousPolynomial fn = f.normalized();
        for (int i = 0; i < 10; ++i) {
            Rng pr = master.fork(100 + static_cast<std::uint64_t>(i));
            P4 P{};
            do {
                P = P4{pr.real(-1.2, 1.2), pr.real(-1.2, 1.2), pr.real(-1.2, 1.2), 1.0};
            } while (std::abs(fn.evaluate(ProjectivePoint(P).v)) < 1e-6);
            RunConfig cfg;
            cfg.seed = pr.seed();
            MonodromyResult r = runMonodromy(f, ProjectivePoint(P), cfg);
            bool ok = r.group.order == 6 && r.group.kind == GroupClassification::Kind::Symmetric &&
                      r.transitive;
            pass = pass && ok;
            detail.push_back(json{{"index", i},
                                  {"groupOrder", r.group.order},
                                  {"classification", r.group.name()},
                                  {"pass", ok}});
        }
        record("random-centers-symmetric", pass, detail);
    }

    // branch divisor for the center (0:0:0:1) is (x0^3+x1^3+x2^3)^2 up to scale
    {
        ProjectivePoint L3(0.0, 0.0, 0.0, 1.0);
        PlaneCurve disc = discriminantCurve(f, frameForCenter(L3));
        HomogeneousPolynomial cubic(3, 3,
                                    {Monomial{{3, 0, 0, 0}, 1.0}, Monomial{{0, 3, 0, 0}, 1.0},
                                     Monomial{{0, 0, 3, 0}, 1.0}});
        HomogeneousPolynomial expected = cubic * cubic;

        auto termMap = [](const HomogeneousPolynomial& p) {
            std::map<std::array<int, 4>, cplx> m;
            for (const auto& t : p.normalized().terms()) m[t.e] = t.c;
            return m;
        };
        auto dm = termMap(disc.poly);
        auto em = termMap(expected);
        bool pass = disc.degree == 6 && dm.size() == em.size();
        if (pass) {
            // align the overall scale on the largest expected coefficient
            auto pivot = em.begin();
            for (auto it = em.begin(); it != em.end(); ++it)
                if (std::abs(it->second) > std::abs(pivot->second)) pivot = it;
            auto hit = dm.find(pivot->first);
            if (hit == dm.end()) {
                pass = false;
            } else {
                cplx ratio = hit->second / pivot->second;
                for (const auto& [e, c] : em) {
                    auto it = dm.find(e);
                    if (it == dm.end() || std::abs(it->second - ratio * c) > 1e-6) pass = false;
                }
            }
        }
        int reducedDegree = squareFreePart(disc).degree;
        pass = pass && reducedDegree == 3;
        record("branch-divisor-square", pass,
               json{{"degree", disc.degree}, {"reducedDegree", reducedDegree}});
    }

    // px membership: coordinate centers in, generic centers out
    {
        bool pass = true;
        json detail = json::array();
        for (int i = 0; i < 4; ++i) {
            P4 e{};
            e[i] = 1.0;
            PXVerdict v = testPX(f, ProjectivePoint(e), 40, o.seed);
            bool ok = v.status == PXStatus::ProbablyInPX;
            pass = pass && ok;
            detail.push_back(json{{"center", i}, {"status", ok ? "ProbablyInPX" : "NotInPX"}});
        }
        for (int i = 0; i < 3; ++i) {
            Rng pr = master.fork(200 + static_cast<std::uint64_t>(i));
            P4 P{pr.real(-1.2, 1.2), pr.real(-1.2, 1.2), pr.real(-1.2, 1.2), 1.0};
            PXVerdict v = testPX(f, ProjectivePoint(P), 200, pr.seed());
            bool ok = v.status == PXStatus::NotInPX;
            pass = pass && ok;
            detail.push_back(json{{"random", i}, {"status", ok ? "NotInPX" : "ProbablyInPX"}});
        }
        record("px-membership", pass, detail);
    }

    json rep = baseReport("fermat-regression");
    rep["seed"] = o.seed;
    rep["checks"] = checks;
    rep["pass"] = allPass;

    os << (allPass ? "all checks passed" : "REGRESSION MISMATCH") << "\n";
    emit(rep, o.out, o.jsonOut, os.str());
    return allPass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monodromy groups of generic projections of surfaces in P^3"};
    app.require_subcommand(1);

    AnalyzeOpts an;
    auto* analyze = app.add_subcommand("analyze", "monodromy group for one projection center");
    analyze->add_option("--surface", an.surface, "surface polynomial (file or text)")->required();
    analyze->add_option("--point", an.point, "projection center a,b,c,d");
    analyze->add_option("--point-json", an.pointJson, "projection center as JSON");
    auto* anSeed = analyze->add_option("--seed", an.seed, "RNG seed");
    analyze->add_option("--config", an.config, "run configuration JSON");
    analyze->add_option("--out", an.out, "write the JSON report here");
    analyze->add_flag("--json", an.jsonOut, "print the JSON report on stdout");

    ScanOpts sc;
    auto* scan = app.add_subcommand("scan", "grid scan of real projection centers");
    scan->add_option("--surface", sc.surface, "surface polynomial (file or text)")->required();
    auto* scGrid = scan->add_option("--grid", sc.grid, "points per axis");
    scan->add_option("--box", sc.box, "coordinate range LO,HI (default -1,1)");
    scan->add_option("--jitter", sc.jitter, "jitter as a fraction of the spacing");
    auto* scSeed = scan->add_option("--seed", sc.seed, "RNG seed");
    scan->add_option("--config", sc.config, "run configuration JSON");
    scan->add_option("--out", sc.out, "write the JSON report here");
    scan->add_flag("--json", sc.jsonOut, "print the JSON report on stdout");

    BranchCurveOpts bc;
    auto* branch = app.add_subcommand("branch-curve", "discriminant curve of a projection");
    branch->add_option("--surface", bc.surface, "surface polynomial (file or text)")->required();
    branch->add_option("--point", bc.point, "projection center a,b,c,d");
    branch->add_option("--point-json", bc.pointJson, "projection center as JSON");
    branch->add_option("--out", bc.out, "write the curve as polynomial JSON");
    branch->add_flag("--reduced", bc.reduced, "emit the square-free part");
    branch->add_option("--slice-csv", bc.sliceCsv, "write punctures of a pencil slice as CSV");
    branch->add_option("--seed", bc.seed, "RNG seed for the slice");
    branch->add_flag("--json", bc.jsonOut, "print the JSON report on stdout");

    ContactOpts co;
    auto* contact = app.add_subcommand("contact", "contact profile of a line with the surface");
    contact->add_option("--surface", co.surface, "surface polynomial (file or text)")->required();
    contact->add_option("--line", co.line, "two points spanning the line: A0,A1,A2,A3,B0,B1,B2,B3");
    contact->add_option("--base", co.base, "base point a,b,c,d");
    contact->add_option("--dir", co.dir, "direction a,b,c,d");
    contact->add_option("--out", co.out, "write the JSON report here");
    contact->add_flag("--json", co.jsonOut, "print the JSON report on stdout");

    PxOpts px;
    auto* pxtest = app.add_subcommand("px-test", "sampling test for exceptional centers");
    pxtest->add_option("--surface", px.surface, "surface polynomial (file or text)")->required();
    pxtest->add_option("--point", px.point, "candidate center a,b,c,d");
    pxtest->add_option("--point-json", px.pointJson, "candidate center as JSON");
    pxtest->add_option("--budget", px.budget, "tangent line sample budget");
    pxtest->add_option("--seed", px.seed, "RNG seed");
    pxtest->add_option("--out", px.out, "write the JSON verdict here");
    pxtest->add_flag("--json", px.jsonOut, "print the JSON verdict (always on)");

    FocalOpts fo;
    auto* focal = app.add_subcommand("focal-demo", "foci of members of a line family");
    focal->add_option("--family", fo.family, "point | sphere-tangent | custom-json")->required();
    focal->add_option("--family-json", fo.familyJson, "custom family description file");
    focal->add_option("--samples", fo.samples, "number of members to sample");
    focal->add_option("--seed", fo.seed, "RNG seed");
    focal->add_option("--point", fo.point, "base point for the point family");
    focal->add_flag("--check-fundamental", fo.checkFundamental,
                    "run the fundamental point test on every focus");
    focal->add_option("--out", fo.out, "write the JSON report here");
    focal->add_flag("--json", fo.jsonOut, "print the JSON report on stdout");

    int nmDegree = 0;
    std::string nmOut;
    auto* numerology = app.add_subcommand("numerology", "degree and genus bookkeeping");
    numerology->add_option("--degree", nmDegree, "surface degree")->required();
    numerology->add_option("--out", nmOut, "write the JSON report here");
    numerology->add_flag("--json", "output is always JSON");

    RegressionOpts rg;
    auto* regress = app.add_subcommand("fermat-regression", "end to end regression checks");
    auto* rgSeed = regress->add_option("--seed", rg.seed, "RNG seed");
    regress->add_option("--out", rg.out, "write the JSON report here");
    regress->add_flag("--json", rg.jsonOut, "print the JSON report on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    an.seedSet = anSeed->count() > 0;
    sc.seedSet = scSeed->count() > 0;
    sc.gridSet = scGrid->count() > 0;
    (void)rgSeed;

    try {
        if (app.got_subcommand(analyze)) return runAnalyze(an);
        if (app.got_subcommand(scan)) return runScan(sc);
        if (app.got_subcommand(branch)) return runBranchCurve(bc);
        if (app.got_subcommand(contact)) return runContact(co);
        if (app.got_subcommand(pxtest)) return runPxTest(px);
        if (app.got_subcommand(focal)) return runFocalDemo(fo);
        if (app.got_subcommand(numerology)) return runNumerology(nmDegree, nmOut);
        if (app.got_subcommand(regress)) return runFermatRegression(rg);
    } catch (const contract_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
