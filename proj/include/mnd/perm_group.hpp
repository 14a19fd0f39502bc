#pragma once

// Permutation groups on up to 16 points via deterministic Schreier-Sims
// stabilizer chains. 16! ~ 2.1e13, so orders fit comfortably in 64 bits.

#include <vector>
#include <string>
#include <algorithm>

#include "core.hpp"
#include "permutation.hpp"

namespace mnd {

inline constexpr int kMaxGroupDegree = 16;

inline unsigned long long factorialU64(int n) {
    unsigned long long r = 1;
    for (int i = 2; i <= n; ++i) r *= static_cast<unsigned long long>(i);
    return r;
}

// Orbit of point 0 under forward application of the generators reaches the
// whole group orbit (finite order makes inverses redundant).
inline bool isTransitive(const std::vector<Permutation>& gens, int degree) {
    if (degree < 1) throw contract_error("isTransitive: degree must be >= 1");
    std::vector<bool> seen(degree, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (const auto& g : gens) {
            if (g.degree() != degree) throw contract_error("isTransitive: degree mismatch");
            int y = g.apply(x);
            if (!seen[y]) {
                seen[y] = true;
                ++count;
                stack.push_back(y);
            }
        }
    }
    return count == degree;
}

// Certificate that <gens> = S_d: a transitive group generated by
// transpositions is the full symmetric group. A false return means
// "no certificate", not "proven smaller".
inline bool jordanSymmetricCheck(const std::vector<Permutation>& gens, int degree) {
    for (const auto& g : gens) {
        if (g.degree() != degree) throw contract_error("jordanSymmetricCheck: degree mismatch");
        if (!g.isTransposition()) return false;
    }
    return isTransitive(gens, degree);
}

struct GroupClassification {
    enum class Kind { Symmetric, Alternating, Other };
    Kind kind = Kind::Other;
    unsigned long long order = 1;

    std::string name() const {
        switch (kind) {
            case Kind::Symmetric: return "Symmetric";
            case Kind::Alternating: return "Alternating";
            default: return "Other";
        }
    }
};

class GroupHandle {
public:
    explicit GroupHandle(int degree, std::vector<Permutation> gens = {}) : degree_(degree) {
        if (degree < 1 || degree > kMaxGroupDegree)
            throw contract_error("GroupHandle: degree must be in [1,16]");
        for (auto& g : gens) addGenerator(g);
    }

    int degree() const { return degree_; }
    const std::vector<Permutation>& generators() const { return inputGens_; }

    void addGenerator(const Permutation& g) {
        if (g.degree() != degree_) throw contract_error("GroupHandle: generator degree mismatch");
        if (g.isIdentity()) return;
        inputGens_.push_back(g);
        if (contains(g)) return;
        if (levels_.empty()) appendBasePointFor(g);
        levels_[0].gens.push_back(g);
        verifyLevel(0);
    }

    bool contains(const Permutation& g) const {
        return sift(g, 0).first.isIdentity();
    }

    unsigned long long order() const {
        unsigned long long n = 1;
        for (const auto& lv : levels_) n *= static_cast<unsigned long long>(lv.orbit.size());
        return n;
    }

    // The only index-2 subgroup of S_d is A_d, so order alone settles the
    // symmetric/alternating cases; the parity scan is a cheap cross-check.
    GroupClassification classify() const {
        GroupClassification c;
        c.order = order();
        const unsigned long long full = factorialU64(degree_);
        bool allEven = true;
        for (const auto& g : inputGens_)
            if (g.parity() < 0) allEven = false;
        if (c.order == full)
            c.kind = GroupClassification::Kind::Symmetric;
        else if (c.order * 2 == full && allEven)
            c.kind = GroupClassification::Kind::Alternating;
        else
            c.kind = GroupClassification::Kind::Other;
        return c;
    }

    // Full enumeration via transversal products. Throws if the order exceeds cap.
    std::vector<Permutation> elements(std::size_t cap = 1u << 20) const {
        if (order() > cap) throw contract_error("GroupHandle::elements: order exceeds cap");
        std::vector<Permutation> out{Permutation(degree_)};
        for (std::size_t i = levels_.size(); i-- > 0;) {
            std::vector<Permutation> next;
            next.reserve(out.size() * levels_[i].orbit.size());
            for (int pt : levels_[i].orbit)
                for (const auto& tail : out) next.push_back(transversal(i, pt) * tail);
            out = std::move(next);
        }
        return out;
    }

private:
    struct Level {
        int base = 0;
        std::vector<Permutation> gens;
        std::vector<int> orbit;             // discovery order, orbit[0] == base
        std::vector<int> slot;              // point -> index in orbit, or -1
        std::vector<Permutation> reps;      // reps[slot[p]] maps base -> p
    };

    int degree_;
    std::vector<Permutation> inputGens_;
    std::vector<Level> levels_;

    const Permutation& transversal(std::size_t level, int pt) const {
        return levels_[level].reps[levels_[level].slot[pt]];
    }

    void appendBasePointFor(const Permutation& g) {
        for (int i = 0; i < degree_; ++i) {
            if (g.apply(i) != i) {
                Level lv;
                lv.base = i;
                levels_.push_back(std::move(lv));
                return;
            }
        }
        throw contract_error("GroupHandle: cannot extend base with identity");
    }

    void rebuildOrbit(std::size_t level) {
        Level& lv = levels_[level];
        lv.orbit.assign(1, lv.base);
        lv.slot.assign(degree_, -1);
        lv.slot[lv.base] = 0;
        lv.reps.assign(1, Permutation(degree_));
        for (std::size_t i = 0; i < lv.orbit.size(); ++i) {
            for (const auto& s : lv.gens) {
                int img = s.apply(lv.orbit[i]);
                if (lv.slot[img] < 0) {
                    lv.slot[img] = static_cast<int>(lv.orbit.size());
                    lv.orbit.push_back(img);
                    lv.reps.push_back(s * lv.reps[i]);
                }
            }
        }
    }

    // Strip g through levels >= start; returns the residue and the level at
    // which stripping stopped (levels_.size() if it fixes every base point).
    std::pair<Permutation, std::size_t> sift(Permutation g, std::size_t start) const {
        for (std::size_t i = start; i < levels_.size(); ++i) {
            int img = g.apply(levels_[i].base);
            if (levels_[i].slot[img] < 0) return {std::move(g), i};
            g = transversal(i, img).inverse() * g;
        }
        return {std::move(g), levels_.size()};
    }

    // Re-establish the strong generating property from `level` down: every
    // Schreier generator of this level must sift to the identity below it.
    // Recursion may reallocate levels_, so index it afresh on every access.
    void verifyLevel(std::size_t level) {
        rebuildOrbit(level);
        for (std::size_t i = 0; i < levels_[level].orbit.size(); ++i) {
            for (std::size_t si = 0; si < levels_[level].gens.size(); ++si) {
                const Permutation s = levels_[level].gens[si];
                const Permutation rep = levels_[level].reps[i];
                const int pt = levels_[level].orbit[i];
                Permutation schreier = transversal(level, s.apply(pt)).inverse() * (s * rep);
                auto [residue, at] = sift(std::move(schreier), level + 1);
                if (residue.isIdentity()) continue;
                if (at == levels_.size()) appendBasePointFor(residue);
                std::size_t stop = std::min(at, levels_.size() - 1);
                for (std::size_t k = level + 1; k <= stop; ++k) levels_[k].gens.push_back(residue);
                for (std::size_t k = stop; k > level; --k) verifyLevel(k);
            }
        }
    }
};

inline GroupClassification groupOrderAndClassify(const std::vector<Permutation>& gens, int degree) {
    return GroupHandle(degree, gens).classify();
}

// Centralizer of the generated group inside the full symmetric group, by
// direct search over S_d. Intended for small degrees only.
inline GroupHandle centralizerInSd(const std::vector<Permutation>& gens, int degree) {
    if (degree < 1 || degree > 8) throw contract_error("centralizerInSd: degree must be in [1,8]");
    std::vector<int> images(degree);
    std::iota(images.begin(), images.end(), 0);
    GroupHandle result(degree);
    do {
        Permutation p = Permutation::fromImages(images);
        bool commutes = true;
        for (const auto& g : gens) {
            if (g.degree() != degree) throw contract_error("centralizerInSd: degree mismatch");
            if (!(p * g == g * p)) {
                commutes = false;
                break;
            }
        }
        if (commutes && !result.contains(p)) result.addGenerator(p);
    } while (std::next_permutation(images.begin(), images.end()));
    return result;
}

}  // namespace mnd
