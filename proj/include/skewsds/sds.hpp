#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "skewsds/block.hpp"
#include "skewsds/zmod.hpp"

namespace skewsds {

/// (v; k_1, ..., k_t; lambda) with derived order n = sum k_i - lambda.
struct ParameterSet {
    std::uint32_t v = 0;
    std::vector<std::uint32_t> sizes;
    std::int64_t lambda = 0;

    std::int64_t order() const
    {
        return std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0}) - lambda;
    }

    /// lambda (v - 1) = sum k_i (k_i - 1)
    bool satisfies_counting() const
    {
        std::int64_t pairs = 0;
        for (auto k : sizes)
            pairs += std::int64_t{k} * (std::int64_t{k} - 1);
        return v >= 2 && lambda * (std::int64_t{v} - 1) == pairs;
    }

    /// Membership in the three-block family: v = 3 (mod 4) prime,
    /// lambda = k1 + k2 + k3 - (3v - 1)/4 and v/2 > k1 >= k2 >= k3 >= 0.
    bool in_P() const
    {
        if (sizes.size() != 3 || v % 4 != 3 || !is_prime(v) || !satisfies_counting())
            return false;
        if (order() != (3 * std::int64_t{v} - 1) / 4)
            return false;
        return 2 * std::int64_t{sizes[0]} < v && sizes[0] >= sizes[1] && sizes[1] >= sizes[2];
    }

    std::string to_string() const
    {
        std::string s = "(" + std::to_string(v) + ";";
        for (std::size_t i = 0; i < sizes.size(); ++i)
            s += (i ? "," : "") + std::to_string(sizes[i]);
        return s + ";" + std::to_string(lambda) + ")";
    }

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

/// sum k_i (k_i - 1) / (v - 1) when integral.
inline std::optional<std::int64_t> derive_lambda(std::uint32_t v, const std::vector<std::uint32_t>& sizes)
{
    if (v < 2)
        return std::nullopt;
    std::int64_t pairs = 0;
    for (auto k : sizes)
        pairs += std::int64_t{k} * (std::int64_t{k} - 1);
    if (pairs % (std::int64_t{v} - 1) != 0)
        return std::nullopt;
    return pairs / (std::int64_t{v} - 1);
}

/// An ordered list of base blocks over a common Z_v.
class DifferenceFamily {
public:
    explicit DifferenceFamily(std::uint32_t v)
        : v_(v)
    {
        if (v == 0)
            throw std::invalid_argument("modulus must be positive");
    }

    DifferenceFamily(std::uint32_t v, std::vector<Block> blocks)
        : DifferenceFamily(v)
    {
        for (auto& b : blocks)
            push_back(std::move(b));
    }

    static DifferenceFamily from_lists(std::uint32_t v, const std::vector<std::vector<std::uint32_t>>& lists)
    {
        DifferenceFamily f(v);
        for (const auto& l : lists)
            f.push_back(Block(v, l));
        return f;
    }

    void push_back(Block b)
    {
        if (b.modulus() != v_)
            throw std::invalid_argument("block over Z_" + std::to_string(b.modulus()) + " added to family over Z_" +
                                        std::to_string(v_));
        blocks_.push_back(std::move(b));
    }

    std::uint32_t modulus() const noexcept { return v_; }
    std::size_t size() const noexcept { return blocks_.size(); }
    const Block& operator[](std::size_t i) const { return blocks_.at(i); }
    Block& operator[](std::size_t i) { return blocks_.at(i); }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    auto begin() const noexcept { return blocks_.begin(); }
    auto end() const noexcept { return blocks_.end(); }

    std::vector<std::uint32_t> sizes() const
    {
        std::vector<std::uint32_t> out;
        for (const auto& b : blocks_)
            out.push_back(static_cast<std::uint32_t>(b.size()));
        return out;
    }

    std::optional<ParameterSet> parameters() const
    {
        auto sz = sizes();
        auto lambda = derive_lambda(v_, sz);
        if (!lambda)
            return std::nullopt;
        return ParameterSet{v_, std::move(sz), *lambda};
    }

    friend bool operator==(const DifferenceFamily&, const DifferenceFamily&) = default;

private:
    std::uint32_t v_;
    std::vector<Block> blocks_;
};

/// counts[c] = #{(a, b, i) : a, b in X_i, a - b = c (mod v)} for c in 1..v-1;
/// counts[0] is always 0. Each shift is one popcount of X_i AND rotate(X_i, c).
inline std::vector<std::int64_t> difference_counts(const DifferenceFamily& f)
{
    const auto v = f.modulus();
    std::vector<std::int64_t> counts(v, 0);
    for (const auto& block : f) {
        if (block.size() < 2)
            continue;
        for (std::uint32_t c = 1; c < v; ++c)
            counts[c] += static_cast<std::int64_t>(block.intersection_size(block.rotated(c)));
    }
    return counts;
}

struct VerifyReport {
    bool ok = false;
    std::int64_t lambda = 0;
    /// Per-shift counts, index c in 0..v-1 (entry 0 unused).
    std::vector<std::int64_t> counts;
    /// count value -> number of shifts c attaining it
    std::map<std::int64_t, std::uint32_t> histogram;
    std::int64_t worst_deviation = 0;
    std::uint32_t worst_shift = 0;
};

inline VerifyReport verify_sds(const DifferenceFamily& f, std::int64_t lambda)
{
    VerifyReport r;
    r.lambda = lambda;
    r.counts = difference_counts(f);
    for (std::uint32_t c = 1; c < f.modulus(); ++c) {
        ++r.histogram[r.counts[c]];
        const auto dev = r.counts[c] > lambda ? r.counts[c] - lambda : lambda - r.counts[c];
        if (dev > r.worst_deviation) {
            r.worst_deviation = dev;
            r.worst_shift = c;
        }
    }
    r.ok = r.worst_deviation == 0;
    return r;
}

/// All members of the family with modulus v, one per decomposition
/// 4v - 1 = s1^2 + s2^2 + s3^2 into odd positive squares, k_i = (v - s_i)/2.
/// Sorted descending by (k1, k2, k3).
inline std::vector<ParameterSet> enumerate_P(std::uint32_t v)
{
    if (v % 4 != 3 || !is_prime(v))
        throw std::invalid_argument("v must be a prime congruent to 3 mod 4, got " + std::to_string(v));
    const std::int64_t target = 4 * std::int64_t{v} - 1;
    auto odd_sqrt = [](std::int64_t n) -> std::optional<std::int64_t> {
        if (n <= 0)
            return std::nullopt;
        auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
        while (r * r > n)
            --r;
        while ((r + 1) * (r + 1) <= n)
            ++r;
        if (r * r != n || r % 2 == 0)
            return std::nullopt;
        return r;
    };

    std::vector<ParameterSet> out;
    // s1 >= s2 >= s3 so that k1 <= k2 <= k3; reversed when stored.
    for (std::int64_t s1 = 1; s1 * s1 <= target; s1 += 2) {
        for (std::int64_t s2 = 1; s2 <= s1 && s1 * s1 + s2 * s2 < target; s2 += 2) {
            auto s3 = odd_sqrt(target - s1 * s1 - s2 * s2);
            if (!s3 || *s3 > s2 || *s3 > v)
                continue;
            ParameterSet p;
            p.v = v;
            p.sizes = {static_cast<std::uint32_t>((v - *s3) / 2), static_cast<std::uint32_t>((v - s2) / 2),
                       static_cast<std::uint32_t>((v - s1) / 2)};
            p.lambda = std::int64_t{p.sizes[0]} + p.sizes[1] + p.sizes[2] - (3 * std::int64_t{v} - 1) / 4;
            if (!p.satisfies_counting())
                throw std::logic_error("three-squares decomposition violates the counting identity for " +
                                       p.to_string());
            out.push_back(std::move(p));
        }
    }
    std::sort(out.begin(), out.end(), [](const ParameterSet& a, const ParameterSet& b) { return a.sizes > b.sizes; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// 0 not in b, and exactly one of i, -i in b for every nonzero i.
inline bool is_skew(const Block& b)
{
    const auto v = b.modulus();
    if (b.contains(0))
        return false;
    for (std::uint32_t i = 1; i < v; ++i) {
        if (b.contains(i) == b.contains(v - i))
            return false;
    }
    return true;
}

inline bool is_symmetric(const Block& b) { return b.negated() == b; }

struct ComplementResult {
    DifferenceFamily family;
    std::int64_t lambda;
};

/// Replaces block i by its complement in Z_v. The order n is unchanged; the
/// new lambda is recomputed from the counting identity.
inline ComplementResult complement_block(const DifferenceFamily& f, std::size_t i)
{
    if (i >= f.size())
        throw std::out_of_range("block index " + std::to_string(i) + " out of range");
    DifferenceFamily out = f;
    out[i] = f[i].complement();
    auto params = out.parameters();
    if (!params)
        throw std::domain_error("complemented family has non-integral lambda");
    if (auto before = f.parameters(); before && before->order() != params->order())
        throw std::logic_error("complementation changed the order");
    return {std::move(out), params->lambda};
}

/// Prepends the Paley-Todd set (quadratic residues) as a new first block.
/// An SDS of order n becomes one of order n + (v+1)/4.
inline DifferenceFamily compose_with_paley_todd(const DifferenceFamily& f)
{
    const Modulus v(f.modulus());
    DifferenceFamily out(v);
    out.push_back(quadratic_residues(v));
    for (const auto& b : f)
        out.push_back(b);
    return out;
}

} // namespace skewsds
