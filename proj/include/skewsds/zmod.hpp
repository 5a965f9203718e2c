#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewsds/block.hpp"

namespace skewsds {

using residue = std::uint32_t;

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1)
            result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Deterministic Miller-Rabin. The first twelve primes as witnesses are
/// sufficient for every 64-bit input.
inline bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    constexpr std::uint64_t witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto p : witnesses) {
        if (n % p == 0)
            return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (auto a : witnesses) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

/// A prime modulus v >= 3.
class Modulus {
public:
    explicit Modulus(std::uint64_t v)
    {
        if (v < 3 || v > 0xffffffffu || !is_prime(v))
            throw std::invalid_argument("modulus must be a prime >= 3, got " + std::to_string(v));
        v_ = static_cast<residue>(v);
    }

    residue value() const noexcept { return v_; }
    operator residue() const noexcept { return v_; }
    bool is_3_mod_4() const noexcept { return v_ % 4 == 3; }

    residue add(residue a, residue b) const noexcept { return static_cast<residue>((std::uint64_t{a} + b) % v_); }
    residue sub(residue a, residue b) const noexcept { return static_cast<residue>((std::uint64_t{a} + v_ - b) % v_); }
    residue mul(residue a, residue b) const noexcept { return static_cast<residue>(std::uint64_t{a} * b % v_); }
    residue neg(residue a) const noexcept { return a == 0 ? 0 : v_ - a; }
    residue pow(residue a, std::uint64_t e) const noexcept { return static_cast<residue>(pow_mod(a, e, v_)); }
    residue inv(residue a) const noexcept { return pow(a, v_ - 2); }

    friend bool operator==(const Modulus&, const Modulus&) = default;

private:
    residue v_ = 3;
};

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0)
            continue;
        out.push_back(p);
        while (n % p == 0)
            n /= p;
    }
    if (n > 1)
        out.push_back(n);
    return out;
}

/// Multiplicative order of a unit modulo a prime.
inline std::uint64_t multiplicative_order(const Modulus& v, residue a)
{
    if (a % v == 0)
        throw std::invalid_argument("0 is not a unit");
    std::uint64_t order = v - 1;
    for (auto p : prime_factors(v - 1)) {
        while (order % p == 0 && v.pow(a, order / p) == 1)
            order /= p;
    }
    return order;
}

/// Returns an element of multiplicative order exactly q. The choice is
/// deterministic: the smallest base g >= 2 with g^((v-1)/q) != 1, raised to
/// that power.
inline residue element_of_order(const Modulus& v, std::uint64_t q)
{
    if (q < 2 || !is_prime(q))
        throw std::invalid_argument("subgroup order " + std::to_string(q) + " is not prime");
    if ((v - 1) % q != 0)
        throw std::invalid_argument(std::to_string(q) + " does not divide v-1 = " + std::to_string(v - 1));
    const std::uint64_t e = (v - 1) / q;
    for (residue g = 2; g < v; ++g) {
        residue h = v.pow(g, e);
        if (h != 1)
            return h;
    }
    throw std::logic_error("no element of order q found");
}

/// Partition of Z_v into orbits of the cyclic subgroup <h> of prime order q
/// acting by multiplication. Orbit 0 is {0}; the remaining orbits are sorted
/// by their minimum element, which is also the orbit's representative.
class OrbitSystem {
public:
    OrbitSystem(const Modulus& v, residue h)
        : v_(v), h_(h % v)
    {
        if (h_ == 0)
            throw std::invalid_argument("generator must be a unit");
        const auto q = multiplicative_order(v_, h_);
        if (q < 2 || !is_prime(q))
            throw std::invalid_argument("order of h=" + std::to_string(h) + " is " + std::to_string(q) +
                                        ", not a prime");
        q_ = static_cast<std::uint32_t>(q);

        orbit_of_.assign(v_, 0);
        orbits_.push_back({0});
        std::vector<bool> seen(v_, false);
        seen[0] = true;
        for (residue j = 1; j < v_; ++j) {
            if (seen[j])
                continue;
            std::vector<residue> orbit;
            residue x = j;
            do {
                seen[x] = true;
                orbit.push_back(x);
                x = v_.mul(x, h_);
            } while (x != j);
            std::sort(orbit.begin(), orbit.end());
            for (auto y : orbit)
                orbit_of_[y] = static_cast<std::uint32_t>(orbits_.size());
            orbits_.push_back(std::move(orbit));
        }
        negated_.resize(orbits_.size());
        for (std::size_t i = 0; i < orbits_.size(); ++i)
            negated_[i] = orbit_of_[v_.neg(orbits_[i].front())];
    }

    const Modulus& modulus() const noexcept { return v_; }
    residue generator() const noexcept { return h_; }
    std::uint32_t order() const noexcept { return q_; }

    std::size_t size() const noexcept { return orbits_.size(); }
    const std::vector<residue>& orbit(std::size_t i) const { return orbits_.at(i); }
    const std::vector<std::vector<residue>>& orbits() const noexcept { return orbits_; }
    residue rep(std::size_t i) const { return orbits_.at(i).front(); }
    std::uint32_t orbit_of(residue x) const { return orbit_of_.at(x % v_); }
    /// Index of the orbit -O_i.
    std::uint32_t negated(std::size_t i) const { return negated_.at(i); }

    /// The subgroup H = <h> itself, sorted.
    std::vector<residue> subgroup() const { return orbits_.at(orbit_of_[1]); }

private:
    Modulus v_;
    residue h_;
    std::uint32_t q_ = 0;
    std::vector<std::vector<residue>> orbits_;
    std::vector<std::uint32_t> orbit_of_;
    std::vector<std::uint32_t> negated_;
};

inline OrbitSystem orbit_system(const Modulus& v, residue h) { return OrbitSystem(v, h); }

/// The nonzero squares of Z_v. For v = 3 (mod 4) this is the Paley-Todd
/// difference set, a skew-type (v, (v-1)/2, (v-3)/4) difference set.
inline Block quadratic_residues(const Modulus& v)
{
    if (!v.is_3_mod_4())
        throw std::invalid_argument("quadratic residues are skew only for v = 3 (mod 4), got v = " +
                                    std::to_string(v.value()));
    Block out(v);
    for (residue x = 1; x <= (v - 1) / 2; ++x)
        out.insert(v.mul(x, x));
    return out;
}

} // namespace skewsds
