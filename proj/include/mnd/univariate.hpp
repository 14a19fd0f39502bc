#pragma once

// Dense univariate polynomials over C, constant coefficient first.

#include <vector>
#include <algorithm>
#include <cmath>

#include "core.hpp"

namespace mnd {

class UnivariatePolynomial {
public:
    UnivariatePolynomial() : coef_{cplx(0.0)} {}

    // Trailing coefficients below coeff_floor relative to the largest one are
    // treated as zero so that degree() is meaningful.
    explicit UnivariatePolynomial(std::vector<cplx> coef) : coef_(std::move(coef)) {
        if (coef_.empty()) coef_.push_back(cplx(0.0));
        double m = maxAbs();
        double floor = m * defaults::coeff_floor;
        while (coef_.size() > 1 && std::abs(coef_.back()) <= floor) coef_.pop_back();
    }

    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return coef_; }
    cplx leading() const { return coef_.back(); }

    bool isZero() const { return coef_.size() == 1 && coef_[0] == cplx(0.0); }

    double maxAbs() const {
        double m = 0.0;
        for (const auto& c : coef_) m = std::max(m, std::abs(c));
        return m;
    }

    cplx operator()(cplx z) const {
        cplx acc = 0.0;
        for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    // Value and first derivative in one Horner pass.
    std::pair<cplx, cplx> evalWithDerivative(cplx z) const {
        cplx p = 0.0, dp = 0.0;
        for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) {
            dp = dp * z + p;
            p = p * z + *it;
        }
        return {p, dp};
    }

    UnivariatePolynomial derivative() const {
        if (degree() == 0) return UnivariatePolynomial(std::vector<cplx>{cplx(0.0)});
        std::vector<cplx> d(coef_.size() - 1);
        for (std::size_t k = 1; k < coef_.size(); ++k) d[k - 1] = double(k) * coef_[k];
        return UnivariatePolynomial(std::move(d));
    }

    // Running magnitude bound sum_k |a_k| max(1,|z|)^k; the usual backward
    // error scale for judging residuals.
    double residualScale(cplx z) const {
        double az = std::max(1.0, std::abs(z));
        double s = 0.0, p = 1.0;
        for (const auto& c : coef_) {
            s += std::abs(c) * p;
            p *= az;
        }
        return std::max(s, 1e-300);
    }

    UnivariatePolynomial normalized() const {
        double m = maxAbs();
        if (m == 0.0) return *this;
        std::vector<cplx> c = coef_;
        for (auto& x : c) x /= m;
        return UnivariatePolynomial(std::move(c));
    }

private:
    std::vector<cplx> coef_;
};

inline UnivariatePolynomial operator*(const UnivariatePolynomial& a, const UnivariatePolynomial& b) {
    std::vector<cplx> c(a.coeffs().size() + b.coeffs().size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.coeffs().size(); ++i)
        for (std::size_t j = 0; j < b.coeffs().size(); ++j)
            c[i + j] += a.coeffs()[i] * b.coeffs()[j];
    return UnivariatePolynomial(std::move(c));
}

}  // namespace mnd
