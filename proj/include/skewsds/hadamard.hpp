#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewsds/block.hpp"
#include "skewsds/sds.hpp"

namespace skewsds {

/// A +-1 sequence of length v; a set bit stands for -1.
class SignSequence {
public:
    explicit SignSequence(std::uint32_t v)
        : minus_(v)
    {
    }

    explicit SignSequence(Block minus)
        : minus_(std::move(minus))
    {
    }

    std::uint32_t size() const noexcept { return minus_.modulus(); }
    int operator[](std::uint32_t i) const noexcept { return minus_.contains(i) ? -1 : 1; }
    void set(std::uint32_t i, int sign)
    {
        if (sign < 0)
            minus_.insert(i);
        else
            minus_.erase(i);
    }
    std::int64_t sum() const noexcept { return std::int64_t{size()} - 2 * static_cast<std::int64_t>(minus_.size()); }

private:
    Block minus_;
};

/// xi_i = -1 iff i in b
inline SignSequence associated_sequence(const Block& b) { return SignSequence(b); }

/// Square +-1 matrix, rows packed into 64-bit words (set bit = -1).
class SignMatrix {
public:
    using word = std::uint64_t;

    explicit SignMatrix(std::size_t n)
        : n_(n), stride_((n + 63) / 64), bits_(n * stride_, 0)
    {
    }

    std::size_t order() const noexcept { return n_; }

    int operator()(std::size_t i, std::size_t j) const noexcept
    {
        return (bits_[i * stride_ + j / 64] >> (j % 64)) & 1 ? -1 : 1;
    }

    void set(std::size_t i, std::size_t j, int sign) noexcept
    {
        word& w = bits_[i * stride_ + j / 64];
        const word bit = word{1} << (j % 64);
        if (sign < 0)
            w |= bit;
        else
            w &= ~bit;
    }

    std::span<const word> row(std::size_t i) const noexcept { return {&bits_[i * stride_], stride_}; }

    /// <row i, row j> = n - 2 * (number of differing entries)
    std::int64_t row_dot(std::size_t i, std::size_t j) const noexcept
    {
        std::int64_t diff = 0;
        const word* a = &bits_[i * stride_];
        const word* b = &bits_[j * stride_];
        for (std::size_t k = 0; k < stride_; ++k)
            diff += std::popcount(a[k] ^ b[k]);
        return static_cast<std::int64_t>(n_) - 2 * diff;
    }

    SignMatrix transposed() const
    {
        SignMatrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                t.set(j, i, (*this)(i, j));
        return t;
    }

    /// M R, where R is the back-diagonal permutation.
    SignMatrix reversed_columns() const
    {
        SignMatrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                t.set(i, n_ - 1 - j, (*this)(i, j));
        return t;
    }

    friend bool operator==(const SignMatrix&, const SignMatrix&) = default;

private:
    std::size_t n_;
    std::size_t stride_;
    std::vector<word> bits_;
};

/// Circulant with first row a: Z(i, j) = a[j - i mod v].
inline SignMatrix circulant(const SignSequence& a)
{
    const auto v = a.size();
    SignMatrix z(v);
    for (std::uint32_t i = 0; i < v; ++i)
        for (std::uint32_t j = 0; j < v; ++j)
            z.set(i, j, a[(j + v - i) % v]);
    return z;
}

/// The 4v x 4v Goethals-Seidel array
///
///   [  Z0      Z1 R     Z2 R     Z3 R   ]
///   [ -Z1 R    Z0      -Z3' R    Z2' R  ]
///   [ -Z2 R    Z3' R    Z0      -Z1' R  ]
///   [ -Z3 R   -Z2' R    Z1' R    Z0     ]
///
/// with Z_k = circulant(a_k), ' the transpose and R the back-diagonal
/// permutation. R is applied by index arithmetic:
///   (Z R)(i, j)  = a[-(i + j + 1)],  (Z' R)(i, j) = a[i + j + 1]  (mod v).
inline SignMatrix goethals_seidel(const SignSequence& a0, const SignSequence& a1, const SignSequence& a2,
                                  const SignSequence& a3)
{
    const std::uint32_t v = a0.size();
    if (a1.size() != v || a2.size() != v || a3.size() != v)
        throw std::invalid_argument("Goethals-Seidel sequences must share one length");

    enum Kind { plain, times_r, transposed_times_r };
    struct Cell {
        int sign;
        int seq;
        Kind kind;
    };
    static constexpr std::array<std::array<Cell, 4>, 4> layout{{
        {{{+1, 0, plain}, {+1, 1, times_r}, {+1, 2, times_r}, {+1, 3, times_r}}},
        {{{-1, 1, times_r}, {+1, 0, plain}, {-1, 3, transposed_times_r}, {+1, 2, transposed_times_r}}},
        {{{-1, 2, times_r}, {+1, 3, transposed_times_r}, {+1, 0, plain}, {-1, 1, transposed_times_r}}},
        {{{-1, 3, times_r}, {-1, 2, transposed_times_r}, {+1, 1, transposed_times_r}, {+1, 0, plain}}},
    }};
    const std::array<const SignSequence*, 4> seqs{&a0, &a1, &a2, &a3};

    SignMatrix m(4 * std::size_t{v});
    for (std::size_t br = 0; br < 4; ++br) {
        for (std::size_t bc = 0; bc < 4; ++bc) {
            const Cell cell = layout[br][bc];
            const SignSequence& a = *seqs[cell.seq];
            for (std::uint32_t i = 0; i < v; ++i) {
                for (std::uint32_t j = 0; j < v; ++j) {
                    std::uint32_t idx;
                    switch (cell.kind) {
                    case plain:
                        idx = (j + v - i) % v;
                        break;
                    case times_r:
                        idx = (v - (i + j + 1) % v) % v;
                        break;
                    default:
                        idx = (i + j + 1) % v;
                        break;
                    }
                    m.set(br * v + i, bc * v + j, cell.sign * a[idx]);
                }
            }
        }
    }
    return m;
}

/// M M^T = N I, checked exactly on every row pair.
inline bool is_hadamard(const SignMatrix& m)
{
    const std::size_t n = m.order();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (m.row_dot(i, j) != 0)
                return false;
        }
    }
    return true;
}

/// Hadamard with M + M^T = 2I.
inline bool is_skew_hadamard(const SignMatrix& m)
{
    const std::size_t n = m.order();
    for (std::size_t i = 0; i < n; ++i) {
        if (m(i, i) != 1)
            return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (m(i, j) != -m(j, i))
                return false;
        }
    }
    return is_hadamard(m);
}

class HadamardError : public std::runtime_error {
public:
    enum class Reason { size_mismatch, not_skew, wrong_order, not_sds };

    HadamardError(Reason reason, const std::string& what)
        : std::runtime_error(what), reason_(reason)
    {
    }

    Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

/// Plugs the associated sequences of a 4-block SDS of order v, whose first
/// block is skew, into the Goethals-Seidel array.
inline SignMatrix build_skew_hadamard(std::uint32_t v, const Block& x0, const Block& x1, const Block& x2,
                                      const Block& x3)
{
    using R = HadamardError::Reason;
    for (const Block* b : {&x0, &x1, &x2, &x3}) {
        if (b->modulus() != v)
            throw HadamardError(R::size_mismatch, "block over Z_" + std::to_string(b->modulus()) +
                                                      ", expected Z_" + std::to_string(v));
    }
    if (!is_skew(x0))
        throw HadamardError(R::not_skew, "first block is not of skew type");
    DifferenceFamily f(v, {x0, x1, x2, x3});
    const auto sizes = f.sizes();
    const std::int64_t lambda0 = std::int64_t{sizes[0]} + sizes[1] + sizes[2] + sizes[3] - std::int64_t{v};
    if (ParameterSet{v, sizes, lambda0}.satisfies_counting() == false)
        throw HadamardError(R::wrong_order, "block sizes do not give an SDS of order n0 = v");
    auto report = verify_sds(f, lambda0);
    if (!report.ok)
        throw HadamardError(R::not_sds, "blocks are not an SDS with lambda = " + std::to_string(lambda0) +
                                            " (shift " + std::to_string(report.worst_shift) + " has count " +
                                            std::to_string(report.counts[report.worst_shift]) + ")");
    auto m = goethals_seidel(associated_sequence(x0), associated_sequence(x1), associated_sequence(x2),
                             associated_sequence(x3));
    if (!is_skew_hadamard(m))
        throw std::logic_error("Goethals-Seidel output failed the skew-Hadamard check");
    return m;
}

/// Text format: first line N, then N lines of N characters from {+,-}.
inline void write_matrix(std::ostream& os, const SignMatrix& m)
{
    const std::size_t n = m.order();
    os << n << '\n';
    std::string line(n, '+');
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            line[j] = m(i, j) < 0 ? '-' : '+';
        os << line << '\n';
    }
}

inline SignMatrix read_matrix(std::istream& is)
{
    std::size_t n = 0;
    if (!(is >> n))
        throw std::runtime_error("matrix: missing order line");
    SignMatrix m(n);
    std::string line;
    std::getline(is, line);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(is, line) || line.size() != n)
            throw std::runtime_error("matrix: row " + std::to_string(i + 1) + " missing or wrong length");
        for (std::size_t j = 0; j < n; ++j) {
            if (line[j] != '+' && line[j] != '-')
                throw std::runtime_error("matrix: bad character in row " + std::to_string(i + 1));
            m.set(i, j, line[j] == '-' ? -1 : 1);
        }
    }
    return m;
}

} // namespace skewsds
