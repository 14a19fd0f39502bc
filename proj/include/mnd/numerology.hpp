#pragma once

// Closed-form degree/genus bookkeeping for the branch curve of a generic
// projection of a smooth degree-d surface in P^3. Exact integer arithmetic
// throughout: these are combinatorial identities, not numerics.

#include <string>
#include <numeric>

#include "core.hpp"

namespace mnd {

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) {
        if (den == 0) throw contract_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    bool isInteger() const { return den == 1; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    bool operator==(const Rational&) const = default;
    bool operator<(const Rational& o) const { return num * o.den < o.num * den; }
};

struct DegreeReport {
    int d = 0;
    long long degR = 0;              // d(d-1): branch curve degree in the base plane
    long long degKR = 0;             // d(d-1)(2d-5): canonical degree of the smooth model
    Rational genusBoundR;            // (degKR + 2)/2
    Rational planarGenusOfB;         // (degR-1)(degR-2)/2: genus of a smooth plane curve of that degree
    bool branchMustBeSingular = false;
};

inline DegreeReport degreeReport(int d) {
    if (d < 2) throw contract_error("degreeReport: d must be >= 2");
    const long long n = d;
    DegreeReport r;
    r.d = d;
    r.degR = n * (n - 1);
    r.degKR = n * (n - 1) * (2 * n - 5);
    r.genusBoundR = Rational(r.degKR + 2, 2);
    r.planarGenusOfB = Rational((r.degR - 1) * (r.degR - 2), 2);
    // If the branch curve were smooth of degree d(d-1), its genus would be the
    // planar value; the actual genus is capped by the canonical bound, so a
    // strict gap forces singularities (nodes/cusps) on the branch curve.
    r.branchMustBeSingular = r.genusBoundR < r.planarGenusOfB;
    return r;
}

// Divisor-class arithmetic for the cubic surface in the hyperplane class:
// K_X = O_X(d-4) = O_X(-1), the pulled-back plane canonical class is O_X(-3),
// and the ramification class satisfies 2R = O_X(2), i.e. R = O_X(1).
inline bool cubicRamificationClassCheck() {
    const long long canonicalX = 3 - 4;
    const long long pulledBackCanonicalPlane = -3;
    const long long ramificationClass = 1;
    return canonicalX == pulledBackCanonicalPlane + 2 * ramificationClass;
}

}  // namespace mnd
