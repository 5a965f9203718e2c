#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "skewsds/search.hpp"

using namespace skewsds;

TEST(Feasibility, OrderNineFiftySix)
{
    auto f = feasibility(ParameterSet{239, {119, 112, 106}, 158}, 7);
    ASSERT_TRUE(f.feasible);
    EXPECT_EQ(f.blocks[0], (BlockShape{17, false}));
    EXPECT_EQ(f.blocks[1], (BlockShape{16, false}));
    EXPECT_EQ(f.blocks[2], (BlockShape{15, true}));
}

TEST(Feasibility, OrderThirteenTwentyFour)
{
    auto f = feasibility(ParameterSet{331, {165, 155, 155, 155}, 299}, 11);
    ASSERT_TRUE(f.feasible);
    EXPECT_EQ(f.blocks[0], (BlockShape{15, false}));
    for (int i = 1; i < 4; ++i)
        EXPECT_EQ(f.blocks[i], (BlockShape{14, true}));
}

TEST(Feasibility, OneOhSeven)
{
    ParameterSet p{107, {49, 48, 46}, 63};
    auto f = feasibility(p, 53);
    EXPECT_FALSE(f.feasible);
    EXPECT_FALSE(f.blocks[0]);
    EXPECT_NE(f.message.find("block 1"), std::string::npos);
    EXPECT_THROW(feasibility(p, 3), std::invalid_argument);
    EXPECT_THROW(feasibility(p, 4), std::invalid_argument);

    auto r = search_sds(p, 53);
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(r.found.empty());
}

TEST(Expand, SevenSingleOrbit)
{
    OrbitSelection sel{7, 2, {{1}}};
    auto f = expand(sel);
    EXPECT_EQ(f[0].members(), (std::vector<std::uint32_t>{1, 2, 4}));
}

TEST(Expand, RejectsRepeatedOrbit)
{
    OrbitSelection sel{7, 2, {{1, 2}}};
    EXPECT_THROW(expand(sel), std::invalid_argument);
}

TEST(Expand, ExtractRoundTrip)
{
    const Modulus v(43);
    OrbitSystem o(v, element_of_order(v, 7));
    OrbitSelection sel{43, o.generator(), {{0, 1, 3}, {2, 5}}};
    auto f = expand(o, sel);
    auto back = extract_selection(o, f);
    ASSERT_TRUE(back);
    EXPECT_EQ(expand(o, *back), f);
    DifferenceFamily g(43, {Block(43, {1, 2})});
    EXPECT_FALSE(extract_selection(o, g));
}

TEST(DifferenceTable, MatchesBruteForce)
{
    const Modulus v(7);
    OrbitSystem o(v, 2);
    auto t = difference_table(o);
    for (std::size_t i = 0; i < o.size(); ++i)
        for (std::size_t j = 0; j < o.size(); ++j) {
            std::vector<std::int32_t> want(7, 0);
            for (auto a : o.orbit(i))
                for (auto b : o.orbit(j))
                    if (a != b)
                        ++want[(a + 7 - b) % 7];
            auto got = t.full(i, j);
            EXPECT_EQ(std::vector<std::int32_t>(got.begin(), got.end()), want);
        }
}

TEST(DifferenceTable, TotalOver239)
{
    const Modulus v(239);
    OrbitSystem o(v, element_of_order(v, 7));
    auto t = difference_table(o);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < o.size(); ++i)
        for (std::size_t j = 0; j < o.size(); ++j)
            for (auto x : t.full(i, j))
                total += x;
    EXPECT_EQ(total, 239 * 239 - 239);
}

TEST(DifferenceTable, ClassViewConsistent)
{
    const Modulus v(43);
    OrbitSystem o(v, element_of_order(v, 3));
    auto t = difference_table(o);
    for (std::size_t i = 0; i < o.size(); ++i)
        for (std::size_t j = 0; j < o.size(); ++j)
            for (std::size_t r = 1; r < o.size(); ++r)
                for (auto c : o.orbit(r))
                    ASSERT_EQ(t.full(i, j)[c], t.by_class(i, j)[r]);
}

TEST(OrbitSearchState, IncrementalMatchesRecount)
{
    const Modulus v(67);
    OrbitSystem o(v, element_of_order(v, 3));
    auto table = difference_table(o);
    std::mt19937_64 rng(5);
    OrbitSearchState st(o, table, 3);
    for (int step = 0; step < 400; ++step) {
        std::size_t b = rng() % 3, x = rng() % o.size();
        if (st.contains(b, x)) {
            std::size_t y = rng() % o.size();
            if (!st.contains(b, y) && rng() % 2) {
                std::vector<std::int64_t> predicted(o.size());
                for (std::size_t r = 1; r < o.size(); ++r)
                    predicted[r] = st.class_counts()[r] + st.swap_delta(b, x, y, r);
                st.swap(b, x, y);
                for (std::size_t r = 1; r < o.size(); ++r)
                    ASSERT_EQ(st.class_counts()[r], predicted[r]);
            } else {
                st.remove(b, x);
            }
        } else {
            st.add(b, x);
        }
        auto f = expand(o, st.selection());
        ASSERT_EQ(st.counts(), oracle::difference_counts(f)) << "step " << step;
    }
}

TEST(SearchSds, NineteenBacktracking)
{
    ParameterSet p{19, {9, 7, 6}, 8};
    auto r = search_sds(p, 3);
    ASSERT_TRUE(r.feasible);
    ASSERT_FALSE(r.found.empty());
    EXPECT_TRUE(verify_sds(expand(r.found[0]), 8).ok);
}

TEST(SearchSds, NineteenLocalSearchAllVerify)
{
    ParameterSet p{19, {9, 7, 6}, 8};
    SearchOptions o;
    o.strategy = SearchStrategy::local;
    o.seed = 3;
    o.max_solutions = 3;
    o.budget = 200000;
    auto r = search_sds(p, 3, o);
    ASSERT_FALSE(r.found.empty());
    for (const auto& s : r.found) {
        auto f = expand(s);
        EXPECT_EQ(f.sizes(), p.sizes);
        EXPECT_TRUE(verify_sds(f, 8).ok);
    }
}

TEST(SearchSds, SeedReproducible)
{
    ParameterSet p{31, {15, 15, 10}, 17};
    SearchOptions o;
    o.strategy = SearchStrategy::local;
    o.seed = 42;
    o.budget = 500000;
    auto a = search_sds(p, 3, o);
    auto b = search_sds(p, 3, o);
    EXPECT_EQ(a.found, b.found);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SearchSds, ExhaustiveFindsEveryClassForSeven)
{
    // (7;3,3,1;2) with H = {1,2,4}: X1, X2 in {{1,2,4},{3,5,6}}, X3 = {0}.
    SearchOptions o;
    o.max_solutions = 100;
    auto r = search_sds(ParameterSet{7, {3, 3, 1}, 2}, 3, o);
    EXPECT_TRUE(r.complete);
    ASSERT_EQ(r.found.size(), 2u);
    for (const auto& s : r.found)
        EXPECT_TRUE(verify_sds(expand(s), 2).ok);
}

TEST(SearchSds, RejectsBadParameters)
{
    EXPECT_THROW(search_sds(ParameterSet{19, {9, 7, 6}, 9}, 3), std::invalid_argument);
}

TEST(SearchSkewGs, Preconditions)
{
    EXPECT_THROW(search_skew_gs(7, {3, 3, 1}, 3), std::invalid_argument);
    EXPECT_THROW(search_skew_gs(7, {2, 3, 3, 1}, 3), std::invalid_argument);
    EXPECT_THROW(search_skew_gs(7, {3, 3, 1, 1}, 2), std::invalid_argument);
}

TEST(SearchSkewGs, SevenGivesOrderTwentyEight)
{
    // (7;3,3,3,1) with lambda0 = 12 - 7 = 3: 3 * 6 = 6 + 6 + 6 + 0.
    SearchOptions o;
    o.max_solutions = 100;
    auto r = search_skew_gs(7, {3, 3, 3, 1}, 3, o);
    ASSERT_TRUE(r.feasible);
    EXPECT_TRUE(r.complete);
    ASSERT_FALSE(r.found.empty());
    for (const auto& s : r.found) {
        auto f = expand(s);
        EXPECT_TRUE(is_skew(f[0]));
        EXPECT_TRUE(verify_sds(f, 3).ok);
        auto m = build_skew_hadamard(7, f[0], f[1], f[2], f[3]);
        EXPECT_EQ(m.order(), 28u);
        EXPECT_TRUE(oracle::is_hadamard(m));
    }
}
