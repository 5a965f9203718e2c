#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewsds {

/// A subset of Z_v stored as a packed bit-vector of length v.
class Block {
public:
    using word = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    Block() = default;

    explicit Block(std::uint32_t v)
        : v_(v), words_((v + word_bits - 1) / word_bits, 0)
    {
        if (v == 0)
            throw std::invalid_argument("block modulus must be positive");
    }

    Block(std::uint32_t v, std::span<const std::uint32_t> members)
        : Block(v)
    {
        for (auto x : members)
            insert(x);
    }

    Block(std::uint32_t v, std::initializer_list<std::uint32_t> members)
        : Block(v, std::span<const std::uint32_t>(members.begin(), members.size()))
    {
    }

    std::uint32_t modulus() const noexcept { return v_; }
    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    bool contains(std::uint32_t x) const noexcept
    {
        return x < v_ && (words_[x / word_bits] >> (x % word_bits)) & 1;
    }

    /// Inserts x; returns false if it was already present.
    bool insert(std::uint32_t x)
    {
        check(x);
        word& w = words_[x / word_bits];
        const word bit = word{1} << (x % word_bits);
        if (w & bit)
            return false;
        w |= bit;
        ++size_;
        return true;
    }

    void erase(std::uint32_t x)
    {
        check(x);
        word& w = words_[x / word_bits];
        const word bit = word{1} << (x % word_bits);
        if (w & bit) {
            w &= ~bit;
            --size_;
        }
    }

    std::vector<std::uint32_t> members() const
    {
        std::vector<std::uint32_t> out;
        out.reserve(size_);
        for (std::size_t i = 0; i < words_.size(); ++i) {
            word w = words_[i];
            while (w) {
                out.push_back(static_cast<std::uint32_t>(i * word_bits + std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    std::span<const word> words() const noexcept { return words_; }

    /// {x : x + shift in this}. Intersecting a block with its rotation by c
    /// yields the pairs (a, b) with a - b = c.
    Block rotated(std::uint32_t shift) const
    {
        shift %= v_;
        Block out(v_);
        if (shift == 0) {
            out = *this;
            return out;
        }
        // out[i] = this[i + shift] for i < v - shift, this[i + shift - v] otherwise.
        copy_bits(out, 0, shift, v_ - shift);
        copy_bits(out, v_ - shift, 0, shift);
        out.size_ = size_;
        return out;
    }

    Block complement() const
    {
        Block out(v_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            out.words_[i] = ~words_[i];
        out.mask_tail();
        out.size_ = v_ - size_;
        return out;
    }

    /// -X mod v
    Block negated() const
    {
        Block out(v_);
        for (auto x : members())
            out.insert(x == 0 ? 0 : v_ - x);
        return out;
    }

    /// m·X + b mod v
    Block affine(std::uint32_t m, std::uint32_t b) const
    {
        Block out(v_);
        for (auto x : members())
            out.insert(static_cast<std::uint32_t>((std::uint64_t{x} * m + b) % v_));
        return out;
    }

    std::size_t intersection_size(const Block& other) const
    {
        same_modulus(other);
        std::size_t n = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            n += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
        return n;
    }

    friend bool operator==(const Block& a, const Block& b) noexcept
    {
        return a.v_ == b.v_ && a.words_ == b.words_;
    }

    std::string to_string() const
    {
        std::string s = "{";
        bool first = true;
        for (auto x : members()) {
            if (!first)
                s += ",";
            s += std::to_string(x);
            first = false;
        }
        return s + "}";
    }

private:
    void check(std::uint32_t x) const
    {
        if (x >= v_)
            throw std::out_of_range("residue " + std::to_string(x) + " outside Z_" + std::to_string(v_));
    }

    void same_modulus(const Block& other) const
    {
        if (other.v_ != v_)
            throw std::invalid_argument("blocks over different moduli");
    }

    word extract(std::size_t pos) const noexcept
    {
        // 64 bits starting at pos; bits past v read as 0.
        const std::size_t wi = pos / word_bits;
        const std::size_t off = pos % word_bits;
        word lo = wi < words_.size() ? words_[wi] >> off : 0;
        if (off != 0 && wi + 1 < words_.size())
            lo |= words_[wi + 1] << (word_bits - off);
        return lo;
    }

    // Copies len bits from this[src..] to out[dst..].
    void copy_bits(Block& out, std::size_t dst, std::size_t src, std::size_t len) const
    {
        std::size_t done = 0;
        while (done < len) {
            const std::size_t d = dst + done;
            const std::size_t doff = d % word_bits;
            const std::size_t take = std::min(word_bits - doff, len - done);
            word chunk = extract(src + done);
            if (take < word_bits)
                chunk &= (word{1} << take) - 1;
            out.words_[d / word_bits] |= chunk << doff;
            done += take;
        }
    }

    void mask_tail() noexcept
    {
        const std::size_t rem = v_ % word_bits;
        if (rem != 0)
            words_.back() &= (word{1} << rem) - 1;
    }

    std::uint32_t v_ = 1;
    std::size_t size_ = 0;
    std::vector<word> words_ = std::vector<word>(1, 0);
};

} // namespace skewsds
