#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"

using namespace skewsds;

namespace {

const Catalog& corpus()
{
    static const Catalog c = [] {
        std::ifstream in(SKEWSDS_CATALOG_PATH);
        return load_catalog(in);
    }();
    return c;
}

const DifferenceFamily& family(const std::string& id) { return *corpus().at(id).family; }

// Applies a random element of the group: unit multiplier, per-block shift and a
// permutation of equal-size blocks.
DifferenceFamily random_image(const DifferenceFamily& f, std::mt19937_64& rng)
{
    const auto v = f.modulus();
    std::uint32_t m;
    do
        m = 1 + rng() % (v - 1);
    while (std::gcd(m, v) != 1);
    std::vector<std::size_t> idx(f.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            if (f[idx[i]].size() == f[idx[j]].size() && rng() % 2)
                std::swap(idx[i], idx[j]);
    DifferenceFamily out(v);
    for (auto i : idx)
        out.push_back(f[i].affine(m, static_cast<std::uint32_t>(rng() % v)));
    return out;
}

// Orbit of a family under the whole group, as a set of block-list multisets.
bool brute_equivalent(const DifferenceFamily& a, const DifferenceFamily& b)
{
    const auto v = a.modulus();
    auto key = [](const DifferenceFamily& f) {
        std::multiset<std::vector<std::uint32_t>> s;
        for (const auto& blk : f)
            s.insert(blk.members());
        return s;
    };
    // translates are absorbed by normalizing each block to its least translate
    auto normalized = [&](const DifferenceFamily& f) {
        DifferenceFamily g(v);
        for (const auto& blk : f) {
            auto [list, shift] = detail::least_translate(blk);
            g.push_back(Block(v, list));
        }
        return key(g);
    };
    auto target = normalized(b);
    for (std::uint32_t m = 1; m < v; ++m) {
        DifferenceFamily g(v);
        for (const auto& blk : a)
            g.push_back(blk.affine(m, 0));
        if (normalized(g) == target)
            return true;
    }
    return false;
}

} // namespace

TEST(LeastRotation, MatchesBruteForce)
{
    std::mt19937_64 rng(9);
    for (int t = 0; t < 2000; ++t) {
        std::vector<std::uint8_t> s(1 + rng() % 40);
        for (auto& c : s)
            c = rng() % (t % 2 ? 2 : 4);
        auto rot = [&](std::size_t k) {
            std::vector<std::uint8_t> r(s.size());
            for (std::size_t i = 0; i < s.size(); ++i)
                r[i] = s[(i + k) % s.size()];
            return r;
        };
        std::size_t best = 0;
        for (std::size_t k = 1; k < s.size(); ++k)
            if (rot(k) < rot(best))
                best = k;
        ASSERT_EQ(rot(detail::least_rotation(s)), rot(best));
    }
}

TEST(LeastTranslate, IsLexicographicallyLeast)
{
    std::mt19937_64 rng(10);
    for (int t = 0; t < 300; ++t) {
        std::uint32_t v = 3 + rng() % 30;
        auto b = oracle::random_block(v, rng);
        auto [list, shift] = detail::least_translate(b);
        EXPECT_EQ(Block(v, list), b.affine(1, shift));
        for (std::uint32_t s = 0; s < v; ++s)
            ASSERT_LE(list, b.affine(1, s).members());
    }
}

TEST(CanonicalForm, MultiplierExample)
{
    DifferenceFamily a(7, {Block(7, {0, 1, 3})});
    DifferenceFamily b(7, {Block(7, {0, 2, 6})});
    EXPECT_EQ(canonical_form(a), canonical_form(b));
    EXPECT_TRUE(are_equivalent(a, b).equivalent);
}

TEST(CanonicalForm, InvariantUnderRandomGroupElements)
{
    std::mt19937_64 rng(12);
    for (const char* id : {"appx-11-4-4-3", "appx-43-21-18-16", "sec3-family2", "sec4-family1"}) {
        const auto& f = family(id);
        auto c = canonical_form(f);
        for (int t = 0; t < 100; ++t)
            ASSERT_EQ(canonical_form(random_image(f, rng)), c) << id;
    }
}

TEST(CanonicalForm, Idempotent)
{
    for (const char* id : {"appx-19-9-7-6", "sec3-family1", "sec4-family2"}) {
        auto c = canonical_form(family(id));
        EXPECT_EQ(canonical_form(c.to_family()), c);
    }
}

TEST(CanonicalForm, WitnessMapsOntoForm)
{
    std::mt19937_64 rng(13);
    for (const char* id : {"appx-31-15-15-10", "sec3-family3"}) {
        auto f = random_image(family(id), rng);
        auto c = canonical_form(f);
        EXPECT_EQ(c.witness.apply(f), c.to_family());
    }
}

TEST(CanonicalForm, AgreesWithBruteForceOnSmallFamilies)
{
    std::mt19937_64 rng(14);
    int equal = 0;
    for (int t = 0; t < 400; ++t) {
        const std::uint32_t v = 11;
        auto pick = [&] {
            DifferenceFamily f(v);
            for (int i = 0; i < 2; ++i) {
                Block b(v);
                while (b.size() < 3)
                    b.insert(rng() % v);
                f.push_back(b);
            }
            return f;
        };
        auto a = pick();
        auto b = t % 3 == 0 ? random_image(a, rng) : pick();
        const bool brute = brute_equivalent(a, b);
        equal += brute;
        ASSERT_EQ(are_equivalent(a, b).equivalent, brute);
    }
    EXPECT_GT(equal, 100);
}

TEST(AreEquivalent, SectionThreeFamiliesDistinct)
{
    const char* ids[] = {"sec3-family1", "sec3-family2", "sec3-family3"};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            EXPECT_FALSE(are_equivalent(family(ids[i]), family(ids[j])).equivalent) << ids[i] << " " << ids[j];
}

TEST(AreEquivalent, SectionFourOneVsTwo)
{
    EXPECT_FALSE(are_equivalent(family("sec4-family1"), family("sec4-family2")).equivalent);
}

TEST(AreEquivalent, SelfAndSwappedBlocks)
{
    const auto& f = family("appx-43-20-17-17");
    EXPECT_TRUE(are_equivalent(f, f).equivalent);
    DifferenceFamily swapped(43, {f[0], f[2], f[1]});
    auto r = are_equivalent(f, swapped);
    EXPECT_TRUE(r.equivalent);
    ASSERT_TRUE(r.first_to_canonical && r.second_to_canonical);
    EXPECT_EQ(r.first_to_canonical->apply(f), r.second_to_canonical->apply(swapped));
}

TEST(AreEquivalent, ComplementIsNotInTheGroup)
{
    const auto& f = family("appx-11-4-4-3");
    auto c = complement_block(f, 2).family;
    auto r = are_equivalent(f, c);
    EXPECT_FALSE(r.equivalent);
    EXPECT_EQ(r.reason, "block size multisets differ");
}

TEST(AreEquivalent, DifferentModuliThrow)
{
    EXPECT_THROW(are_equivalent(DifferenceFamily(7), DifferenceFamily(11)), std::invalid_argument);
}
