#pragma once

// Permutations of {1..d} (stored 0-based), with cycle notation I/O.

#include <vector>
#include <string>
#include <sstream>
#include <algorithm>
#include <numeric>
#include <cctype>

#include "core.hpp"

namespace mnd {

class Permutation {
public:
    explicit Permutation(int degree) : img_(degree) {
        if (degree < 1) throw contract_error("Permutation: degree must be >= 1");
        std::iota(img_.begin(), img_.end(), 0);
    }

    static Permutation fromImages(std::vector<int> images) {
        Permutation p(static_cast<int>(images.size()));
        std::vector<bool> seen(images.size(), false);
        for (int v : images) {
            if (v < 0 || v >= static_cast<int>(images.size()) || seen[v])
                throw contract_error("Permutation: images are not a bijection");
            seen[v] = true;
        }
        p.img_ = std::move(images);
        return p;
    }

    // Cycle notation, 1-based: "(1 2 3)(4 5)"; "()" is the identity.
    static Permutation fromCycles(const std::string& text, int degree) {
        Permutation p(degree);
        std::vector<bool> used(degree, false);
        std::size_t i = 0;
        auto skip = [&] {
            while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ','))
                ++i;
        };
        skip();
        while (i < text.size()) {
            if (text[i] != '(') throw contract_error("Permutation parse: expected '('");
            ++i;
            std::vector<int> cyc;
            skip();
            while (i < text.size() && text[i] != ')') {
                std::size_t consumed = 0;
                int v = std::stoi(text.substr(i), &consumed);
                i += consumed;
                if (v < 1 || v > degree) throw contract_error("Permutation parse: entry out of range");
                if (used[v - 1]) throw contract_error("Permutation parse: repeated entry, cycles must be disjoint");
                used[v - 1] = true;
                cyc.push_back(v - 1);
                skip();
            }
            if (i >= text.size()) throw contract_error("Permutation parse: missing ')'");
            ++i;
            skip();
            for (std::size_t k = 0; k < cyc.size(); ++k)
                p.img_[cyc[k]] = cyc[(k + 1) % cyc.size()];
        }
        return fromImages(p.img_);
    }

    int degree() const { return static_cast<int>(img_.size()); }
    int apply(int i) const { return img_[i]; }
    const std::vector<int>& images() const { return img_; }

    bool isIdentity() const {
        for (int i = 0; i < degree(); ++i)
            if (img_[i] != i) return false;
        return true;
    }

    // (a * b)(x) = a(b(x)): b acts first.
    Permutation compose(const Permutation& b) const {
        if (degree() != b.degree()) throw contract_error("compose: degree mismatch");
        std::vector<int> r(img_.size());
        for (int i = 0; i < degree(); ++i) r[i] = img_[b.img_[i]];
        Permutation p(degree());
        p.img_ = std::move(r);
        return p;
    }

    Permutation inverse() const {
        std::vector<int> r(img_.size());
        for (int i = 0; i < degree(); ++i) r[img_[i]] = i;
        Permutation p(degree());
        p.img_ = std::move(r);
        return p;
    }

    // Cycle lengths sorted descending, fixed points included as 1s.
    std::vector<int> cycleType() const {
        std::vector<int> type;
        std::vector<bool> seen(img_.size(), false);
        for (int i = 0; i < degree(); ++i) {
            if (seen[i]) continue;
            int len = 0, j = i;
            while (!seen[j]) {
                seen[j] = true;
                j = img_[j];
                ++len;
            }
            type.push_back(len);
        }
        std::sort(type.rbegin(), type.rend());
        return type;
    }

    // +1 for even, -1 for odd.
    int parity() const {
        int cycles = static_cast<int>(cycleType().size());
        return ((degree() - cycles) % 2 == 0) ? 1 : -1;
    }

    bool isTransposition() const {
        auto t = cycleType();
        return !t.empty() && t[0] == 2 && (t.size() < 2 || t[1] == 1);
    }

    // Nontrivial cycles as 1-based index lists, each starting at its smallest
    // element, ordered by that element.
    std::vector<std::vector<int>> cycles() const {
        std::vector<std::vector<int>> out;
        std::vector<bool> seen(img_.size(), false);
        for (int i = 0; i < degree(); ++i) {
            if (seen[i] || img_[i] == i) {
                seen[i] = true;
                continue;
            }
            std::vector<int> cyc;
            int j = i;
            while (!seen[j]) {
                seen[j] = true;
                cyc.push_back(j + 1);
                j = img_[j];
            }
            out.push_back(std::move(cyc));
        }
        return out;
    }

    std::string cycleString() const {
        auto cs = cycles();
        if (cs.empty()) return "()";
        std::ostringstream os;
        for (const auto& cyc : cs) {
            os << '(';
            for (std::size_t k = 0; k < cyc.size(); ++k) {
                if (k) os << ' ';
                os << cyc[k];
            }
            os << ')';
        }
        return os.str();
    }

    bool operator==(const Permutation&) const = default;
    bool operator<(const Permutation& o) const { return img_ < o.img_; }

private:
    std::vector<int> img_;
};

inline Permutation operator*(const Permutation& a, const Permutation& b) { return a.compose(b); }

}  // namespace mnd
