#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "skewsds/equivalence.hpp"
#include "skewsds/sds.hpp"
#include "skewsds/zmod.hpp"

namespace skewsds {

// ---------------------------------------------------------------------------
// Orbit selections
// ---------------------------------------------------------------------------

/// Blocks written as unions of <h>-orbits: block i is the union of the orbits
/// of reps[i]. Representatives are kept as given (any orbit element works).
struct OrbitSelection {
    std::uint32_t v = 0;
    residue h = 1;
    std::vector<std::vector<residue>> reps;

    bool includes_zero(std::size_t block) const
    {
        const auto& r = reps.at(block);
        return std::find(r.begin(), r.end(), residue{0}) != r.end();
    }

    friend bool operator==(const OrbitSelection&, const OrbitSelection&) = default;
};

inline Block expand_block(const OrbitSystem& orbits, std::span<const residue> reps)
{
    const auto v = orbits.modulus().value();
    Block out(v);
    std::vector<bool> used(orbits.size(), false);
    for (auto r : reps) {
        if (r >= v)
            throw std::out_of_range("representative " + std::to_string(r) + " outside Z_" + std::to_string(v));
        const auto idx = orbits.orbit_of(r);
        if (used[idx])
            throw std::invalid_argument("representative " + std::to_string(r) +
                                        " names an orbit already used in this block");
        used[idx] = true;
        for (auto x : orbits.orbit(idx))
            out.insert(x);
    }
    return out;
}

inline DifferenceFamily expand(const OrbitSystem& orbits, const OrbitSelection& sel)
{
    if (sel.v != orbits.modulus().value() || sel.h % sel.v != orbits.generator())
        throw std::invalid_argument("selection does not belong to this orbit system");
    DifferenceFamily f(sel.v);
    for (const auto& r : sel.reps)
        f.push_back(expand_block(orbits, r));
    return f;
}

inline DifferenceFamily expand(const OrbitSelection& sel)
{
    return expand(OrbitSystem(Modulus(sel.v), sel.h), sel);
}

/// Inverse of expand: minimum-element representatives per block, or nullopt
/// when some block is not a union of orbits.
inline std::optional<OrbitSelection> extract_selection(const OrbitSystem& orbits, const DifferenceFamily& f)
{
    if (f.modulus() != orbits.modulus().value())
        return std::nullopt;
    OrbitSelection sel{f.modulus(), orbits.generator(), {}};
    for (const auto& b : f) {
        std::vector<residue> reps;
        for (std::size_t i = 0; i < orbits.size(); ++i) {
            const auto& o = orbits.orbit(i);
            const bool first = b.contains(o.front());
            for (auto x : o) {
                if (b.contains(x) != first)
                    return std::nullopt;
            }
            if (first)
                reps.push_back(orbits.rep(i));
        }
        std::sort(reps.begin(), reps.end());
        sel.reps.push_back(std::move(reps));
    }
    return sel;
}

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

/// k = orbits * q + (zero ? 1 : 0)
struct BlockShape {
    std::uint32_t orbits = 0;
    bool zero = false;
    friend bool operator==(const BlockShape&, const BlockShape&) = default;
};

struct Feasibility {
    bool feasible = false;
    std::vector<std::optional<BlockShape>> blocks;
    std::string message;
};

/// Each k_i must be m q (zero orbit excluded) or m q + 1 (zero orbit
/// included); the latter is the same as q | v - k_i since q | v - 1.
inline Feasibility feasibility(const ParameterSet& p, std::uint32_t q)
{
    if (q < 2 || !is_prime(q))
        throw std::invalid_argument("q = " + std::to_string(q) + " is not prime");
    if (p.v < 2 || (p.v - 1) % q != 0)
        throw std::invalid_argument("q = " + std::to_string(q) + " does not divide v-1 = " + std::to_string(p.v - 1));
    Feasibility out;
    out.feasible = true;
    for (std::size_t i = 0; i < p.sizes.size(); ++i) {
        const auto k = p.sizes[i];
        if (k % q == 0) {
            out.blocks.push_back(BlockShape{k / q, false});
        } else if (k % q == 1) {
            out.blocks.push_back(BlockShape{k / q, true});
        } else {
            out.blocks.push_back(std::nullopt);
            out.feasible = false;
            out.message += "block " + std::to_string(i + 1) + ": k=" + std::to_string(k) + " is " +
                           std::to_string(k % q) + " mod " + std::to_string(q) + " (need q | k or q | v-k); ";
        }
    }
    if (!out.message.empty())
        out.message.erase(out.message.size() - 2);
    return out;
}

// ---------------------------------------------------------------------------
// Difference table
// ---------------------------------------------------------------------------

/// D(i,j)[c] = #{(a,b) in O_i x O_j : a - b = c, a != b}. Counts are
/// invariant under c -> h c, so each pair also keeps one value per orbit
/// class of c (the "by_class" view used by the search).
class DifferenceTable {
public:
    explicit DifferenceTable(const OrbitSystem& orbits)
        : v_(orbits.modulus().value()), n_(orbits.size()), full_(n_ * n_ * v_, 0), by_class_(n_ * n_ * n_, 0)
    {
        const Modulus& mod = orbits.modulus();
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                std::int32_t* row = &full_[(i * n_ + j) * v_];
                for (auto a : orbits.orbit(i)) {
                    for (auto b : orbits.orbit(j)) {
                        if (a != b)
                            ++row[mod.sub(a, b)];
                    }
                }
                std::int32_t* cls = &by_class_[(i * n_ + j) * n_];
                for (std::size_t r = 1; r < n_; ++r)
                    cls[r] = row[orbits.rep(r)];
            }
        }
    }

    std::uint32_t modulus() const noexcept { return v_; }
    std::size_t orbit_count() const noexcept { return n_; }

    /// Indexed by c in 0..v-1; entry 0 is always 0.
    std::span<const std::int32_t> full(std::size_t i, std::size_t j) const
    {
        return {&full_[(i * n_ + j) * v_], v_};
    }

    /// Indexed by class r in 0..orbit_count()-1; entry 0 unused.
    std::span<const std::int32_t> by_class(std::size_t i, std::size_t j) const
    {
        return {&by_class_[(i * n_ + j) * n_], n_};
    }

private:
    std::uint32_t v_;
    std::size_t n_;
    std::vector<std::int32_t> full_;
    std::vector<std::int32_t> by_class_;
};

inline DifferenceTable difference_table(const OrbitSystem& orbits) { return DifferenceTable(orbits); }

// ---------------------------------------------------------------------------
// Incremental search state
// ---------------------------------------------------------------------------

/// Per-block orbit memberships with difference counts per orbit class kept
/// up to date under single-orbit add/remove.
class OrbitSearchState {
public:
    OrbitSearchState(const OrbitSystem& orbits, const DifferenceTable& table, std::size_t blocks)
        : orbits_(&orbits), table_(&table), n_(orbits.size()), member_(blocks, std::vector<char>(n_, 0)),
          pull_(blocks, std::vector<std::int64_t>(n_ * n_, 0)), totals_(n_, 0)
    {
    }

    std::size_t blocks() const noexcept { return member_.size(); }
    std::size_t orbit_count() const noexcept { return n_; }
    bool contains(std::size_t block, std::size_t orbit) const { return member_[block][orbit] != 0; }

    /// Counts per orbit class (entry 0 unused).
    std::span<const std::int64_t> class_counts() const noexcept { return totals_; }

    /// Per-shift counts expanded back to c in 0..v-1.
    std::vector<std::int64_t> counts() const
    {
        const auto v = table_->modulus();
        std::vector<std::int64_t> out(v, 0);
        for (std::uint32_t c = 1; c < v; ++c)
            out[c] = totals_[orbits_->orbit_of(c)];
        return out;
    }

    /// Change in class counts if orbit x joined block b.
    std::int64_t add_delta(std::size_t b, std::size_t x, std::size_t r) const
    {
        return pull_[b][x * n_ + r] + table_->by_class(x, x)[r];
    }

    /// Change in class r if orbit a left block b and orbit x joined it.
    std::int64_t swap_delta(std::size_t b, std::size_t a, std::size_t x, std::size_t r) const
    {
        return pull_[b][x * n_ + r] - pull_[b][a * n_ + r] - table_->by_class(a, x)[r] - table_->by_class(x, a)[r] +
               table_->by_class(a, a)[r] + table_->by_class(x, x)[r];
    }

    void add(std::size_t b, std::size_t x)
    {
        if (member_[b][x])
            throw std::logic_error("orbit already in block");
        for (std::size_t r = 1; r < n_; ++r)
            totals_[r] += add_delta(b, x, r);
        member_[b][x] = 1;
        shift_pull(b, x, +1);
    }

    void remove(std::size_t b, std::size_t x)
    {
        if (!member_[b][x])
            throw std::logic_error("orbit not in block");
        member_[b][x] = 0;
        shift_pull(b, x, -1);
        for (std::size_t r = 1; r < n_; ++r)
            totals_[r] -= add_delta(b, x, r);
    }

    void swap(std::size_t b, std::size_t out, std::size_t in)
    {
        remove(b, out);
        add(b, in);
    }

    /// sum over classes of (count - lambda)^2; each class stands for q shifts.
    std::int64_t cost(std::int64_t lambda) const
    {
        std::int64_t s = 0;
        for (std::size_t r = 1; r < n_; ++r)
            s += (totals_[r] - lambda) * (totals_[r] - lambda);
        return s;
    }

    OrbitSelection selection() const
    {
        OrbitSelection sel{orbits_->modulus().value(), orbits_->generator(), {}};
        for (const auto& m : member_) {
            std::vector<residue> reps;
            for (std::size_t i = 0; i < n_; ++i) {
                if (m[i])
                    reps.push_back(orbits_->rep(i));
            }
            sel.reps.push_back(std::move(reps));
        }
        return sel;
    }

private:
    // pull_[b][x][r] = sum over j in block b of D(x,j)[r] + D(j,x)[r]
    void shift_pull(std::size_t b, std::size_t x, std::int64_t sign)
    {
        auto& p = pull_[b];
        for (std::size_t y = 0; y < n_; ++y) {
            auto d1 = table_->by_class(y, x);
            auto d2 = table_->by_class(x, y);
            for (std::size_t r = 1; r < n_; ++r)
                p[y * n_ + r] += sign * (d1[r] + d2[r]);
        }
    }

    const OrbitSystem* orbits_;
    const DifferenceTable* table_;
    std::size_t n_;
    std::vector<std::vector<char>> member_;
    std::vector<std::vector<std::int64_t>> pull_;
    std::vector<std::int64_t> totals_;
};

// ---------------------------------------------------------------------------
// Search driver
// ---------------------------------------------------------------------------

enum class SearchStrategy { automatic, exhaustive, local };

struct SearchOptions {
    /// Backtracking nodes or local-search moves (per worker).
    std::uint64_t budget = 10'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::size_t max_solutions = 1;
    /// 0 = no limit
    double time_limit_seconds = 0;
    SearchStrategy strategy = SearchStrategy::automatic;
    /// automatic picks backtracking at or below this many nontrivial orbits
    std::size_t exhaustive_orbit_limit = 24;
    /// local-search restart after this many moves without improvement
    std::uint64_t stall_limit = 2000;
};

struct SearchReport {
    bool feasible = false;
    std::string message;
    SearchStrategy strategy_used = SearchStrategy::automatic;
    /// Backtracking ran to completion: found is every class up to symmetry.
    bool complete = false;
    std::uint64_t iterations = 0;
    std::vector<OrbitSelection> found;
};

namespace detail {

struct BlockSpec {
    BlockShape shape;
    bool skew = false;
};

// Plain modulo draws keep the stream identical across standard libraries.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

class Engine {
public:
    Engine(const OrbitSystem& orbits, std::vector<BlockSpec> specs, std::int64_t lambda, const SearchOptions& opts)
        : orbits_(orbits), table_(orbits), specs_(std::move(specs)), lambda_(lambda), opts_(opts),
          start_(std::chrono::steady_clock::now())
    {
    }

    SearchReport run()
    {
        SearchReport report;
        report.feasible = true;
        const std::size_t nontrivial = orbits_.size() - 1;
        auto strategy = opts_.strategy;
        if (strategy == SearchStrategy::automatic)
            strategy = nontrivial <= opts_.exhaustive_orbit_limit ? SearchStrategy::exhaustive : SearchStrategy::local;
        report.strategy_used = strategy;

        if (strategy == SearchStrategy::exhaustive) {
            OrbitSearchState st(orbits_, table_, specs_.size());
            std::vector<std::vector<std::size_t>> chosen(specs_.size());
            for (std::size_t b = 0; b < specs_.size(); ++b) {
                if (specs_[b].shape.zero)
                    st.add(b, 0);
            }
            iterations_ = 0;
            bool finished = backtrack(st, chosen, 0, 1);
            report.complete = finished && !stop_.load();
            report.iterations = iterations_;
        } else {
            const unsigned workers = std::max(1u, opts_.workers);
            std::vector<std::thread> pool;
            std::vector<std::uint64_t> its(workers, 0);
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([this, w, &its] { its[w] = local_search(w); });
            for (auto& t : pool)
                t.join();
            for (auto n : its)
                report.iterations += n;
        }

        std::vector<std::pair<CanonicalForm, OrbitSelection>> sorted(results_.begin(), results_.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [form, sel] : sorted)
            report.found.push_back(std::move(sel));
        return report;
    }

private:
    bool out_of_time() const
    {
        if (opts_.time_limit_seconds <= 0)
            return false;
        std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
        return el.count() >= opts_.time_limit_seconds;
    }

    void record(const OrbitSearchState& st)
    {
        auto sel = st.selection();
        auto family = expand(orbits_, sel);
        if (!verify_sds(family, lambda_).ok)
            throw std::logic_error("search produced a selection that does not verify");
        auto form = canonical_form(family);
        std::lock_guard lock(sink_);
        if (results_.size() >= opts_.max_solutions)
            return;
        for (const auto& [f, s] : results_) {
            if (f == form)
                return;
        }
        results_.emplace_back(std::move(form), std::move(sel));
        if (results_.size() >= opts_.max_solutions)
            stop_ = true;
    }

    bool over_lambda(const OrbitSearchState& st) const
    {
        auto t = st.class_counts();
        for (std::size_t r = 1; r < t.size(); ++r) {
            if (t[r] > lambda_)
                return true;
        }
        return false;
    }

    // Returns false when stopped early (budget, time or solution limit).
    bool backtrack(OrbitSearchState& st, std::vector<std::vector<std::size_t>>& chosen, std::size_t block,
                   std::size_t next)
    {
        if (stop_.load())
            return false;
        if (++iterations_ > opts_.budget || ((iterations_ & 0xfff) == 0 && out_of_time())) {
            stop_ = true;
            return false;
        }
        if (block == specs_.size()) {
            if (st.cost(lambda_) == 0)
                record(st);
            return true;
        }
        const auto& spec = specs_[block];
        if (chosen[block].size() == spec.shape.orbits) {
            // equal consecutive block specs are kept in lexicographic order
            if (block > 0 && specs_[block - 1].shape == spec.shape && specs_[block - 1].skew == spec.skew &&
                chosen[block - 1] > chosen[block])
                return true;
            return backtrack(st, chosen, block + 1, 1);
        }
        const std::size_t n = orbits_.size();
        if (spec.skew) {
            // one orbit of each pair {O, -O}, pairs visited by smaller index
            std::size_t x = next;
            while (x < n && orbits_.negated(x) < x)
                ++x;
            if (x >= n)
                return true;
            for (std::size_t pick : {x, static_cast<std::size_t>(orbits_.negated(x))}) {
                st.add(block, pick);
                chosen[block].push_back(pick);
                bool ok = true;
                if (!over_lambda(st))
                    ok = backtrack(st, chosen, block, x + 1);
                chosen[block].pop_back();
                st.remove(block, pick);
                if (!ok)
                    return false;
            }
            return true;
        }
        const std::size_t need = spec.shape.orbits - chosen[block].size();
        for (std::size_t x = next; x + need <= n; ++x) {
            st.add(block, x);
            chosen[block].push_back(x);
            bool ok = true;
            if (!over_lambda(st))
                ok = backtrack(st, chosen, block, x + 1);
            chosen[block].pop_back();
            st.remove(block, x);
            if (!ok)
                return false;
        }
        return true;
    }

    void randomize(OrbitSearchState& st, std::mt19937_64& rng) const
    {
        const std::size_t n = orbits_.size();
        for (std::size_t b = 0; b < specs_.size(); ++b) {
            const auto& spec = specs_[b];
            if (spec.shape.zero)
                st.add(b, 0);
            if (spec.skew) {
                for (std::size_t x = 1; x < n; ++x) {
                    if (orbits_.negated(x) > x)
                        st.add(b, draw(rng, 2) ? x : orbits_.negated(x));
                }
                continue;
            }
            std::vector<std::size_t> pool(n - 1);
            std::iota(pool.begin(), pool.end(), std::size_t{1});
            for (std::size_t i = 0; i < spec.shape.orbits; ++i) {
                std::size_t j = i + draw(rng, pool.size() - i);
                std::swap(pool[i], pool[j]);
                st.add(b, pool[i]);
            }
        }
    }

    std::uint64_t local_search(unsigned worker)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(opts_.seed), static_cast<std::uint32_t>(opts_.seed >> 32),
                          static_cast<std::uint32_t>(worker)};
        std::mt19937_64 rng(seq);
        const std::size_t n = orbits_.size();
        const std::size_t nb = specs_.size();
        std::uint64_t it = 0;

        while (!stop_.load() && it < opts_.budget) {
            OrbitSearchState st(orbits_, table_, nb);
            randomize(st, rng);
            std::int64_t cost = st.cost(lambda_);
            std::int64_t run_best = cost;
            std::uint64_t last_improve = it;
            // tabu_[b][x]: iteration until which orbit x may not change membership in block b
            std::vector<std::vector<std::uint64_t>> tabu(nb, std::vector<std::uint64_t>(n, 0));

            while (!stop_.load() && it < opts_.budget) {
                if (cost == 0) {
                    record(st);
                    break;
                }
                if (it - last_improve > opts_.stall_limit)
                    break;
                if ((it & 0xff) == 0 && out_of_time()) {
                    stop_ = true;
                    break;
                }
                ++it;

                std::int64_t best = std::numeric_limits<std::int64_t>::max();
                std::size_t best_b = 0, best_out = 0, best_in = 0, ties = 0;
                auto consider = [&](std::size_t b, std::size_t a, std::size_t x) {
                    std::int64_t c = 0;
                    for (std::size_t r = 1; r < n; ++r) {
                        const std::int64_t t = st.class_counts()[r] + st.swap_delta(b, a, x, r) - lambda_;
                        c += t * t;
                    }
                    const bool is_tabu = tabu[b][a] > it || tabu[b][x] > it;
                    if (is_tabu && c >= run_best)
                        return;
                    if (c < best) {
                        best = c;
                        ties = 1;
                        best_b = b, best_out = a, best_in = x;
                    } else if (c == best && draw(rng, ++ties) == 0) {
                        best_b = b, best_out = a, best_in = x;
                    }
                };
                for (std::size_t b = 0; b < nb; ++b) {
                    for (std::size_t a = 1; a < n; ++a) {
                        if (!st.contains(b, a))
                            continue;
                        if (specs_[b].skew) {
                            consider(b, a, orbits_.negated(a));
                            continue;
                        }
                        for (std::size_t x = 1; x < n; ++x) {
                            if (!st.contains(b, x))
                                consider(b, a, x);
                        }
                    }
                }
                if (ties == 0)
                    break;
                st.swap(best_b, best_out, best_in);
                cost = best;
                const std::uint64_t tenure = 3 + draw(rng, 8);
                tabu[best_b][best_out] = it + tenure;
                tabu[best_b][best_in] = it + tenure;
                if (cost < run_best) {
                    run_best = cost;
                    last_improve = it;
                }
            }
        }
        return it;
    }

    const OrbitSystem& orbits_;
    DifferenceTable table_;
    std::vector<BlockSpec> specs_;
    std::int64_t lambda_;
    SearchOptions opts_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t iterations_ = 0;
    std::atomic<bool> stop_{false};
    std::mutex sink_;
    std::vector<std::pair<CanonicalForm, OrbitSelection>> results_;
};

} // namespace detail

/// Searches for SDSs with parameters p whose blocks are unions of orbits of
/// the subgroup of order q. An empty result does not prove nonexistence
/// unless report.complete is set.
inline SearchReport search_sds(const ParameterSet& p, std::uint32_t q, const SearchOptions& opts = {})
{
    if (!p.satisfies_counting())
        throw std::invalid_argument(p.to_string() + " violates lambda(v-1) = sum k(k-1)");
    const Modulus v(p.v);
    auto feas = feasibility(p, q);
    if (!feas.feasible) {
        SearchReport r;
        r.message = "infeasible for q=" + std::to_string(q) + ": " + feas.message;
        return r;
    }
    std::vector<detail::BlockSpec> specs;
    for (const auto& s : feas.blocks)
        specs.push_back({*s, false});
    OrbitSystem orbits(v, element_of_order(v, q));
    detail::Engine engine(orbits, std::move(specs), p.lambda, opts);
    return engine.run();
}

/// Four-block search for Goethals-Seidel input of order n0 = v whose first
/// block is of skew type: it takes exactly one orbit from each pair {O, -O}.
inline SearchReport search_skew_gs(std::uint32_t v_in, const std::vector<std::uint32_t>& sizes, std::uint32_t q,
                                   const SearchOptions& opts = {})
{
    const Modulus v(v_in);
    if (sizes.size() != 4)
        throw std::invalid_argument("skew Goethals-Seidel search needs exactly 4 block sizes");
    if (sizes[0] != (v - 1) / 2)
        throw std::invalid_argument("first block must have size (v-1)/2 = " + std::to_string((v - 1) / 2));
    if (q % 2 == 0)
        throw std::invalid_argument("q must be odd so that -1 is not in the subgroup");
    ParameterSet p{v, sizes, 0};
    p.lambda = std::int64_t{sizes[0]} + sizes[1] + sizes[2] + sizes[3] - std::int64_t{v};
    if (!p.satisfies_counting())
        throw std::invalid_argument(p.to_string() + " violates lambda(v-1) = sum k(k-1) with order n0 = v");
    auto feas = feasibility(p, q);
    if (!feas.feasible) {
        SearchReport r;
        r.message = "infeasible for q=" + std::to_string(q) + ": " + feas.message;
        return r;
    }
    std::vector<detail::BlockSpec> specs;
    for (std::size_t i = 0; i < 4; ++i)
        specs.push_back({*feas.blocks[i], i == 0});
    OrbitSystem orbits(v, element_of_order(v, q));
    detail::Engine engine(orbits, std::move(specs), p.lambda, opts);
    return engine.run();
}

} // namespace skewsds
