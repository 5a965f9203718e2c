#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewsds/sds.hpp"

// Equivalence of difference families over Z_v: X_i -> m * X_{pi(i)} + b_i with
// one unit multiplier m shared by all blocks, an independent translation b_i
// per block, and pi permuting only blocks of equal size. Complementation is
// not part of the relation since it changes lambda.

namespace skewsds {

/// X'_k = multiplier * X_{source[k]} + shift[k]
struct FamilyTransform {
    std::uint32_t multiplier = 1;
    std::vector<std::uint32_t> shifts;
    std::vector<std::size_t> source;

    DifferenceFamily apply(const DifferenceFamily& f) const
    {
        if (shifts.size() != f.size() || source.size() != f.size())
            throw std::invalid_argument("transform arity does not match family");
        DifferenceFamily out(f.modulus());
        for (std::size_t k = 0; k < f.size(); ++k)
            out.push_back(f[source[k]].affine(multiplier, shifts[k]));
        return out;
    }
};

struct CanonicalForm {
    std::uint32_t v = 0;
    /// Sorted residue lists, ordered by (size desc, lexicographic).
    std::vector<std::vector<std::uint32_t>> blocks;
    /// Maps the input family onto this form.
    FamilyTransform witness;

    DifferenceFamily to_family() const { return DifferenceFamily::from_lists(v, blocks); }

    friend bool operator==(const CanonicalForm& a, const CanonicalForm& b) { return a.v == b.v && a.blocks == b.blocks; }
    friend std::strong_ordering operator<=>(const CanonicalForm& a, const CanonicalForm& b)
    {
        if (auto c = a.v <=> b.v; c != 0)
            return c;
        return a.blocks <=> b.blocks;
    }
};

namespace detail {

/// Start index of the lexicographically least rotation (two-pointer minimum
/// expression, linear time).
template <typename T>
std::size_t least_rotation(const std::vector<T>& s)
{
    const std::size_t n = s.size();
    std::size_t i = 0, j = 1, k = 0;
    while (i < n && j < n && k < n) {
        const T& a = s[(i + k) % n];
        const T& b = s[(j + k) % n];
        if (a == b) {
            ++k;
            continue;
        }
        if (a > b)
            i += k + 1;
        else
            j += k + 1;
        if (i == j)
            ++j;
        k = 0;
    }
    return std::min(i, j);
}

// Sorted member list least in lexicographic order equals the least rotation of
// the characteristic string with members encoded as 0.
inline std::pair<std::vector<std::uint32_t>, std::uint32_t> least_translate(const Block& b)
{
    const auto v = b.modulus();
    std::vector<std::uint8_t> s(v, 1);
    for (auto x : b.members())
        s[x] = 0;
    const auto start = static_cast<std::uint32_t>(least_rotation(s));
    std::vector<std::uint32_t> out;
    out.reserve(b.size());
    for (std::uint32_t i = 0; i < v; ++i) {
        if (s[(i + start) % v] == 0)
            out.push_back(i);
    }
    return {std::move(out), (v - start) % v};
}

} // namespace detail

inline CanonicalForm canonical_form(const DifferenceFamily& f)
{
    const auto v = f.modulus();
    const std::size_t t = f.size();
    CanonicalForm best;
    best.v = v;
    bool have = false;

    std::vector<std::vector<std::uint32_t>> lists(t);
    std::vector<std::uint32_t> shifts(t);
    std::vector<std::size_t> order(t);
    for (std::uint32_t m = 1; m < std::max<std::uint32_t>(v, 2); ++m) {
        if (std::gcd(m, v) != 1)
            continue;
        for (std::size_t i = 0; i < t; ++i) {
            auto [list, shift] = detail::least_translate(f[i].affine(m, 0));
            lists[i] = std::move(list);
            shifts[i] = shift;
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (lists[a].size() != lists[b].size())
                return lists[a].size() > lists[b].size();
            return lists[a] < lists[b];
        });
        bool better = !have;
        if (have) {
            for (std::size_t k = 0; k < t; ++k) {
                const auto& cand = lists[order[k]];
                if (cand != best.blocks[k]) {
                    better = cand < best.blocks[k];
                    break;
                }
            }
        }
        if (!better)
            continue;
        have = true;
        best.blocks.resize(t);
        best.witness.multiplier = m;
        best.witness.shifts.resize(t);
        best.witness.source = order;
        for (std::size_t k = 0; k < t; ++k) {
            best.blocks[k] = lists[order[k]];
            best.witness.shifts[k] = shifts[order[k]];
        }
    }
    return best;
}

struct EquivalenceReport {
    bool equivalent = false;
    std::string reason;
    /// When equivalent: each family's transform onto the shared canonical form.
    std::optional<FamilyTransform> first_to_canonical;
    std::optional<FamilyTransform> second_to_canonical;
};

inline EquivalenceReport are_equivalent(const DifferenceFamily& a, const DifferenceFamily& b)
{
    if (a.modulus() != b.modulus())
        throw std::invalid_argument("families over different moduli (" + std::to_string(a.modulus()) + " vs " +
                                    std::to_string(b.modulus()) + ")");
    EquivalenceReport r;
    auto sa = a.sizes(), sb = b.sizes();
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) {
        r.reason = "block size multisets differ";
        return r;
    }
    auto ca = canonical_form(a);
    auto cb = canonical_form(b);
    r.equivalent = ca == cb;
    if (r.equivalent) {
        r.reason = "canonical forms coincide";
        r.first_to_canonical = ca.witness;
        r.second_to_canonical = cb.witness;
    } else {
        r.reason = "canonical forms differ";
    }
    return r;
}

} // namespace skewsds
