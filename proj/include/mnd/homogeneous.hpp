#pragma once

// Sparse homogeneous polynomials in 3 or 4 variables over C.
//
// Construction never rescales silently: pieces of a surface (the coefficient
// forms of its fiber polynomial, say) must keep their relative scale.
// normalized() produces the unit-max-coefficient representative; user-facing
// entry points apply it once to their inputs.  Coefficients below
// coeff_floor relative to the largest one are dropped at construction.

#include <array>
#include <map>
#include <vector>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "core.hpp"
#include "univariate.hpp"

namespace mnd {

using P4 = std::array<cplx, 4>;
using P3 = std::array<cplx, 3>;

struct Monomial {
    std::array<int, 4> e{0, 0, 0, 0};  // exponents; entries past numVars are 0
    cplx c{0.0};
};

class HomogeneousPolynomial {
public:
    HomogeneousPolynomial() = default;

    HomogeneousPolynomial(int numVars, int degree, std::vector<Monomial> terms)
        : nvars_(numVars), degree_(degree) {
        if (numVars < 1 || numVars > 4) throw contract_error("HomogeneousPolynomial: numVars must be 1..4");
        std::map<std::uint32_t, cplx> acc;
        for (const auto& t : terms) {
            int total = 0;
            for (int i = 0; i < 4; ++i) {
                if (t.e[i] < 0) throw contract_error("HomogeneousPolynomial: negative exponent");
                if (i >= numVars && t.e[i] != 0) throw contract_error("HomogeneousPolynomial: exponent on unused variable");
                total += t.e[i];
            }
            if (total != degree) throw contract_error("HomogeneousPolynomial: term degree mismatch");
            acc[pack(t.e)] += t.c;
        }
        double m = 0.0;
        for (const auto& [k, c] : acc) m = std::max(m, std::abs(c));
        double floor = m * defaults::coeff_floor;
        for (const auto& [k, c] : acc)
            if (std::abs(c) > floor) terms_.push_back({unpack(k), c});
    }

    int numVars() const { return nvars_; }
    int degree() const { return degree_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }

    double maxAbsCoeff() const {
        double m = 0.0;
        for (const auto& t : terms_) m = std::max(m, std::abs(t.c));
        return m;
    }

    HomogeneousPolynomial normalized() const {
        double m = maxAbsCoeff();
        if (m == 0.0) return *this;
        std::vector<Monomial> t = terms_;
        for (auto& x : t) x.c /= m;
        return HomogeneousPolynomial(nvars_, degree_, std::move(t));
    }

    HomogeneousPolynomial scaled(cplx s) const {
        std::vector<Monomial> t = terms_;
        for (auto& x : t) x.c *= s;
        return HomogeneousPolynomial(nvars_, degree_, std::move(t));
    }

    cplx evaluate(const cplx* x) const {
        cplx acc = 0.0;
        for (const auto& t : terms_) {
            cplx v = t.c;
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < t.e[i]; ++k) v *= x[i];
            acc += v;
        }
        return acc;
    }
    cplx evaluate(const P4& x) const { return evaluate(x.data()); }
    cplx evaluate(const P3& x) const {
        if (nvars_ > 3) throw contract_error("evaluate: point has too few coordinates");
        return evaluate(x.data());
    }

    static std::uint32_t pack(const std::array<int, 4>& e) {
        return std::uint32_t(e[0]) | (std::uint32_t(e[1]) << 8) | (std::uint32_t(e[2]) << 16) | (std::uint32_t(e[3]) << 24);
    }
    static std::array<int, 4> unpack(std::uint32_t k) {
        return {int(k & 0xff), int((k >> 8) & 0xff), int((k >> 16) & 0xff), int((k >> 24) & 0xff)};
    }

private:
    int nvars_ = 4;
    int degree_ = 0;
    std::vector<Monomial> terms_;
};

inline HomogeneousPolynomial operator+(const HomogeneousPolynomial& a, const HomogeneousPolynomial& b) {
    if (a.numVars() != b.numVars() || a.degree() != b.degree())
        throw contract_error("operator+: shape mismatch");
    std::vector<Monomial> t = a.terms();
    t.insert(t.end(), b.terms().begin(), b.terms().end());
    return HomogeneousPolynomial(a.numVars(), a.degree(), std::move(t));
}

inline HomogeneousPolynomial operator*(const HomogeneousPolynomial& a, const HomogeneousPolynomial& b) {
    if (a.numVars() != b.numVars()) throw contract_error("operator*: variable count mismatch");
    std::vector<Monomial> t;
    t.reserve(a.terms().size() * b.terms().size());
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms()) {
            Monomial m;
            for (int i = 0; i < 4; ++i) m.e[i] = ta.e[i] + tb.e[i];
            m.c = ta.c * tb.c;
            t.push_back(m);
        }
    return HomogeneousPolynomial(a.numVars(), a.degree() + b.degree(), std::move(t));
}

inline HomogeneousPolynomial partialDerivative(const HomogeneousPolynomial& p, int var) {
    if (var < 0 || var >= p.numVars()) throw contract_error("partialDerivative: bad variable index");
    if (p.degree() == 0) throw contract_error("partialDerivative: constant polynomial");
    std::vector<Monomial> t;
    for (const auto& m : p.terms()) {
        if (m.e[var] == 0) continue;
        Monomial d = m;
        d.c *= double(d.e[var]);
        d.e[var] -= 1;
        t.push_back(d);
    }
    return HomogeneousPolynomial(p.numVars(), p.degree() - 1, std::move(t));
}

inline P4 gradient(const HomogeneousPolynomial& p, const P4& x) {
    P4 g{cplx(0.0), cplx(0.0), cplx(0.0), cplx(0.0)};
    for (const auto& m : p.terms()) {
        for (int i = 0; i < p.numVars(); ++i) {
            if (m.e[i] == 0) continue;
            cplx v = m.c * double(m.e[i]);
            for (int j = 0; j < p.numVars(); ++j) {
                int e = m.e[j] - (j == i ? 1 : 0);
                for (int k = 0; k < e; ++k) v *= x[j];
            }
            g[i] += v;
        }
    }
    return g;
}

inline std::array<std::array<cplx, 4>, 4> hessian(const HomogeneousPolynomial& p, const P4& x) {
    std::array<std::array<cplx, 4>, 4> h{};
    for (const auto& m : p.terms()) {
        for (int i = 0; i < p.numVars(); ++i) {
            for (int j = 0; j < p.numVars(); ++j) {
                double factor = (i == j) ? double(m.e[i]) * double(m.e[i] - 1)
                                         : double(m.e[i]) * double(m.e[j]);
                if (factor <= 0.0) continue;
                cplx v = m.c * factor;
                for (int t = 0; t < p.numVars(); ++t) {
                    int e = m.e[t] - (t == i ? 1 : 0) - (t == j ? 1 : 0);
                    for (int k = 0; k < e; ++k) v *= x[t];
                }
                h[i][j] += v;
            }
        }
    }
    return h;
}

// q(u) = p(base + u * dir), recovered exactly by inverse DFT from values at
// degree+1 scaled roots of unity.  The scaled-unit-circle nodes keep the
// Vandermonde solve perfectly conditioned.
inline UnivariatePolynomial restrictToLine(const HomogeneousPolynomial& p, const P4& base, const P4& dir) {
    int n = p.degree() + 1;
    double nb = 0.0, nd = 0.0;
    for (int i = 0; i < p.numVars(); ++i) {
        nb += std::norm(base[i]);
        nd += std::norm(dir[i]);
    }
    nb = std::sqrt(nb);
    nd = std::sqrt(nd);
    if (nd == 0.0) throw contract_error("restrictToLine: zero direction");
    double rho = std::clamp(nb / nd, 0.25, 4.0);
    if (nb == 0.0) rho = 1.0;

    std::vector<cplx> vals(n);
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * std::numbers::pi * double(k) / double(n);
        cplx u = rho * cplx(std::cos(ang), std::sin(ang));
        P4 x{};
        for (int i = 0; i < p.numVars(); ++i) x[i] = base[i] + u * dir[i];
        vals[k] = p.evaluate(x);
    }
    std::vector<cplx> coef(n);
    for (int j = 0; j < n; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k) {
            double ang = -2.0 * std::numbers::pi * double(j) * double(k) / double(n);
            s += vals[k] * cplx(std::cos(ang), std::sin(ang));
        }
        coef[j] = s / (double(n) * std::pow(rho, j));
    }
    return UnivariatePolynomial(std::move(coef));
}

inline UnivariatePolynomial restrictToLine(const HomogeneousPolynomial& p, const P3& base, const P3& dir) {
    if (p.numVars() != 3) throw contract_error("restrictToLine: expected a 3-variable form");
    P4 b{base[0], base[1], base[2], cplx(0.0)};
    P4 d{dir[0], dir[1], dir[2], cplx(0.0)};
    return restrictToLine(p, b, d);
}

// g(x) = p(M x) for a linear substitution M (row i of M gives the linear form
// replacing variable i).  Expanded term by term through sparse products.
inline HomogeneousPolynomial composeLinear(const HomogeneousPolynomial& p,
                                           const std::array<std::array<cplx, 4>, 4>& M) {
    int nv = p.numVars();
    auto linearForm = [&](int i) {
        std::vector<Monomial> t;
        for (int j = 0; j < nv; ++j) {
            if (M[i][j] == cplx(0.0)) continue;
            Monomial m;
            m.e[j] = 1;
            m.c = M[i][j];
            t.push_back(m);
        }
        return HomogeneousPolynomial(nv, 1, std::move(t));
    };
    std::vector<HomogeneousPolynomial> forms(nv);
    for (int i = 0; i < nv; ++i) forms[i] = linearForm(i);

    HomogeneousPolynomial acc(nv, p.degree(), {});
    for (const auto& term : p.terms()) {
        HomogeneousPolynomial prod(nv, 0, {Monomial{{0, 0, 0, 0}, term.c}});
        for (int i = 0; i < nv; ++i)
            for (int k = 0; k < term.e[i]; ++k) prod = prod * forms[i];
        acc = acc + prod;
    }
    return acc;
}

// Split a 4-variable form by the exponent of the last variable:
//   p(x0..x3) = sum_k a_k(x0,x1,x2) x3^k.
// a_k keeps p's scale; a_degree is the constant p(0,0,0,1).
inline std::vector<HomogeneousPolynomial> collectByLastVar(const HomogeneousPolynomial& p) {
    if (p.numVars() != 4) throw contract_error("collectByLastVar: expected a 4-variable form");
    std::vector<std::vector<Monomial>> buckets(p.degree() + 1);
    for (const auto& m : p.terms()) {
        Monomial t = m;
        int k = t.e[3];
        t.e[3] = 0;
        buckets[k].push_back(t);
    }
    std::vector<HomogeneousPolynomial> out;
    out.reserve(buckets.size());
    for (int k = 0; k <= p.degree(); ++k)
        out.push_back(HomogeneousPolynomial(3, p.degree() - k, std::move(buckets[k])));
    return out;
}

inline HomogeneousPolynomial fermatCubic() {
    std::vector<Monomial> t;
    for (int i = 0; i < 4; ++i) {
        Monomial m;
        m.e[i] = 3;
        m.c = 1.0;
        t.push_back(m);
    }
    return HomogeneousPolynomial(4, 3, std::move(t));
}

inline HomogeneousPolynomial standardQuadric() {
    std::vector<Monomial> t;
    for (int i = 0; i < 4; ++i) {
        Monomial m;
        m.e[i] = 2;
        m.c = 1.0;
        t.push_back(m);
    }
    return HomogeneousPolynomial(4, 2, std::move(t));
}

}  // namespace mnd
