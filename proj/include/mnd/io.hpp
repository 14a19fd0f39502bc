#pragma once

// Text and JSON formats: polynomials, points, and run configuration.
//
// Polynomial text looks like
//   x0^3 + x1^3 + (0,1) x0 x2^2 - 2.5 x3^3
// with complex coefficients written (re,im).  Variables are x0..x3; the
// aliases x,y,z,t are accepted on input.  The JSON form is
//   {"vars":4,"degree":3,"terms":[{"e":[3,0,0,0],"c":[1,0]},...]}.

#include <string>
#include <sstream>
#include <cctype>
#include <vector>

#include <nlohmann/json.hpp>

#include "core.hpp"
#include "homogeneous.hpp"
#include "config.hpp"

namespace mnd {

using nlohmann::json;

namespace detail {

struct TextCursor {
    const std::string& s;
    std::size_t i = 0;
    void skipWs() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skipWs();
        return i >= s.size();
    }
    char peek() {
        skipWs();
        return i < s.size() ? s[i] : '\0';
    }
};

inline double parseReal(TextCursor& c) {
    c.skipWs();
    std::size_t used = 0;
    double v = std::stod(c.s.substr(c.i), &used);
    c.i += used;
    return v;
}

inline int parseVarIndex(TextCursor& c) {
    c.skipWs();
    char ch = c.s[c.i];
    if (ch == 'x' || ch == 'X') {
        if (c.i + 1 < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i + 1]))) {
            int idx = c.s[c.i + 1] - '0';
            c.i += 2;
            return idx;
        }
        ++c.i;
        return 0;
    }
    if (ch == 'y') { ++c.i; return 1; }
    if (ch == 'z') { ++c.i; return 2; }
    if (ch == 't' || ch == 'w') { ++c.i; return 3; }
    throw contract_error("polynomial parse: expected a variable at '" + c.s.substr(c.i, 8) + "'");
}

}  // namespace detail

inline HomogeneousPolynomial parsePolynomialText(const std::string& text, int numVars = 4) {
    detail::TextCursor c{text};
    std::vector<Monomial> terms;
    int degree = -1;
    bool first = true;
    while (!c.done()) {
        double sign = 1.0;
        char ch = c.peek();
        if (ch == '+' || ch == '-') {
            sign = (ch == '-') ? -1.0 : 1.0;
            ++c.i;
        } else if (!first) {
            throw contract_error("polynomial parse: expected '+' or '-'");
        }
        first = false;

        Monomial m;
        m.c = sign;
        bool sawFactor = false;
        while (!c.done()) {
            char p = c.peek();
            if (p == '+' || p == '-') break;
            if (p == '*') { ++c.i; continue; }
            if (p == '(') {
                ++c.i;
                double re = detail::parseReal(c);
                if (c.peek() != ',') throw contract_error("polynomial parse: expected ',' in complex coefficient");
                ++c.i;
                double im = detail::parseReal(c);
                if (c.peek() != ')') throw contract_error("polynomial parse: expected ')'");
                ++c.i;
                m.c *= cplx(re, im);
                sawFactor = true;
            } else if (std::isdigit(static_cast<unsigned char>(p)) || p == '.') {
                m.c *= detail::parseReal(c);
                sawFactor = true;
            } else {
                int v = detail::parseVarIndex(c);
                if (v >= numVars) throw contract_error("polynomial parse: variable index out of range");
                int e = 1;
                if (c.peek() == '^') {
                    ++c.i;
                    e = static_cast<int>(detail::parseReal(c));
                    if (e < 1) throw contract_error("polynomial parse: exponent must be positive");
                }
                m.e[v] += e;
                sawFactor = true;
            }
        }
        if (!sawFactor) throw contract_error("polynomial parse: empty term");
        int tdeg = m.e[0] + m.e[1] + m.e[2] + m.e[3];
        if (degree < 0) degree = tdeg;
        if (tdeg != degree) throw contract_error("polynomial parse: terms of unequal degree (input must be homogeneous)");
        terms.push_back(m);
    }
    if (terms.empty()) throw contract_error("polynomial parse: no terms");
    return HomogeneousPolynomial(numVars, degree, std::move(terms)).normalized();
}

inline std::string printPolynomialText(const HomogeneousPolynomial& p) {
    std::ostringstream os;
    bool first = true;
    for (const auto& m : p.terms()) {
        cplx c = m.c;
        if (!first) {
            if (std::imag(c) == 0.0 && std::real(c) < 0.0) {
                os << " - ";
                c = -c;
            } else {
                os << " + ";
            }
        }
        first = false;
        bool unitCoeff = (c == cplx(1.0)) && (m.e[0] + m.e[1] + m.e[2] + m.e[3] > 0);
        if (!unitCoeff) {
            if (std::imag(c) == 0.0)
                os << std::real(c);
            else
                os << "(" << std::real(c) << "," << std::imag(c) << ")";
        }
        for (int i = 0; i < p.numVars(); ++i) {
            if (m.e[i] == 0) continue;
            os << " x" << i;
            if (m.e[i] > 1) os << "^" << m.e[i];
        }
    }
    return os.str();
}

inline json complexToJson(cplx c) { return json::array({std::real(c), std::imag(c)}); }
inline cplx complexFromJson(const json& j) {
    if (!j.is_array() || j.size() != 2) throw contract_error("complex value must be [re,im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json polyToJson(const HomogeneousPolynomial& p) {
    json terms = json::array();
    for (const auto& m : p.terms()) {
        json e = json::array();
        for (int i = 0; i < p.numVars(); ++i) e.push_back(m.e[i]);
        terms.push_back(json{{"e", e}, {"c", complexToJson(m.c)}});
    }
    return json{{"vars", p.numVars()}, {"degree", p.degree()}, {"terms", terms}};
}

inline HomogeneousPolynomial polyFromJson(const json& j) {
    int nv = j.at("vars").get<int>();
    int deg = j.at("degree").get<int>();
    std::vector<Monomial> terms;
    for (const auto& t : j.at("terms")) {
        Monomial m;
        const auto& e = t.at("e");
        if (static_cast<int>(e.size()) != nv) throw contract_error("polynomial json: exponent length != vars");
        for (int i = 0; i < nv; ++i) m.e[i] = e[i].get<int>();
        m.c = complexFromJson(t.at("c"));
        terms.push_back(m);
    }
    return HomogeneousPolynomial(nv, deg, std::move(terms));
}

template <std::size_t N>
json pointToJson(const std::array<cplx, N>& x) {
    json a = json::array();
    for (const auto& c : x) a.push_back(complexToJson(c));
    return a;
}

inline P4 point4FromJson(const json& j) {
    if (!j.is_array() || j.size() != 4) throw contract_error("point json: expected 4 coordinates");
    P4 x;
    for (int i = 0; i < 4; ++i) x[i] = complexFromJson(j[i]);
    return x;
}

// CLI point syntax: comma-separated coordinates, each either a real number
// or re+imi / re-imi (e.g. "0,0,1,2" or "1,0,1+2i,3i").
inline cplx parseComplexEntry(const std::string& s) {
    std::string t;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
    if (t.empty()) throw contract_error("point parse: empty coordinate");
    if (t.back() == 'i' || t.back() == 'I') {
        t.pop_back();
        // Split into real +/- imag at the last sign that is not an exponent
        // sign and not leading.
        for (std::size_t k = t.size(); k-- > 1;) {
            char ch = t[k];
            if ((ch == '+' || ch == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
                double re = std::stod(t.substr(0, k));
                std::string imPart = t.substr(k);
                double im = (imPart == "+" || imPart == "-") ? (imPart == "-" ? -1.0 : 1.0) : std::stod(imPart);
                return {re, im};
            }
        }
        if (t.empty() || t == "+") return {0.0, 1.0};
        if (t == "-") return {0.0, -1.0};
        return {0.0, std::stod(t)};
    }
    return {std::stod(t), 0.0};
}

inline P4 parsePointArg(const std::string& arg) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : arg) {
        if (ch == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) throw contract_error("point parse: expected 4 comma-separated coordinates");
    P4 x;
    for (int i = 0; i < 4; ++i) x[i] = parseComplexEntry(parts[i]);
    return x;
}

inline json configToJson(const RunConfig& c) {
    return json{{"seed", c.seed},
                {"clusterTol", c.clusterTol},
                {"trackerTol", c.trackerTol},
                {"residualTol", c.residualTol},
                {"pxSamples", c.pxSamples},
                {"extraSlices", c.extraSlices},
                {"scanGrid", c.scanGrid},
                {"outputPath", c.outputPath}};
}

inline RunConfig configFromJson(const json& j) {
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.clusterTol = j.value("clusterTol", c.clusterTol);
    c.trackerTol = j.value("trackerTol", c.trackerTol);
    c.residualTol = j.value("residualTol", c.residualTol);
    c.pxSamples = j.value("pxSamples", c.pxSamples);
    c.extraSlices = j.value("extraSlices", c.extraSlices);
    c.scanGrid = j.value("scanGrid", c.scanGrid);
    c.outputPath = j.value("outputPath", c.outputPath);
    return c;
}

}  // namespace mnd
