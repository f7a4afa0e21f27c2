//
// Licensed by "The MIT License". See file LICENSE.
//

#ifndef DFA_GF256_HPP
#define DFA_GF256_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

namespace dfa::gf {

using byte = std::uint8_t;

// Field is GF(2)[x] / (x^8 + x^4 + x^3 + x + 1).
// Bit i of a byte is the coefficient of x^i.
inline constexpr unsigned kModulus = 0x11B;

constexpr byte add(byte a, byte b) { return static_cast<byte>(a ^ b); }

// Carry-less shift-and-reduce product.
constexpr byte mul(byte a, byte b)
{
    unsigned acc = 0;
    unsigned lhs = a;
    for (unsigned rhs = b; rhs != 0; rhs >>= 1) {
        if (rhs & 1) acc ^= lhs;
        lhs <<= 1;
        if (lhs & 0x100) lhs ^= kModulus;
    }
    return static_cast<byte>(acc);
}

namespace detail {

constexpr byte pow254(byte a)
{
    // a^254 = a^-1 in GF(2^8) for a != 0
    byte result = 1;
    byte base = a;
    for (unsigned e = 254; e != 0; e >>= 1) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
    }
    return result;
}

constexpr std::array<byte, 256> build_inverse_table()
{
    std::array<byte, 256> t{};
    for (unsigned a = 1; a < 256; ++a) t[a] = pow254(static_cast<byte>(a));
    return t;
}

inline constexpr auto kInverse = build_inverse_table();

} // namespace detail

constexpr byte inv(byte a)
{
    if (a == 0) throw std::domain_error("gf::inv: zero is not invertible");
    return detail::kInverse[a];
}

// An 8x8 matrix over GF(2) acting on a byte viewed as the column vector
// (b0, ..., b7).  rows[i] masks the input bits feeding output bit i.
struct BitMatrix8 {
    std::array<byte, 8> rows{};

    constexpr byte apply(byte x) const
    {
        byte out = 0;
        for (int i = 0; i < 8; ++i)
            out |= static_cast<byte>((std::popcount(static_cast<unsigned>(rows[i] & x)) & 1) << i);
        return out;
    }

    static constexpr BitMatrix8 identity()
    {
        BitMatrix8 m{};
        for (int i = 0; i < 8; ++i) m.rows[i] = static_cast<byte>(1u << i);
        return m;
    }

    // Gauss-Jordan over GF(2); the matrices used here are invertible by
    // construction, a singular input is a programming error.
    constexpr BitMatrix8 inverted() const
    {
        std::array<byte, 8> work = rows;
        std::array<byte, 8> aug = identity().rows;
        for (int col = 0; col < 8; ++col) {
            int pivot = -1;
            for (int r = col; r < 8; ++r) {
                if ((work[r] >> col) & 1) { pivot = r; break; }
            }
            if (pivot < 0) throw std::domain_error("BitMatrix8::inverted: singular matrix");
            std::swap(work[col], work[pivot]);
            std::swap(aug[col], aug[pivot]);
            for (int r = 0; r < 8; ++r) {
                if (r != col && ((work[r] >> col) & 1)) {
                    work[r] ^= work[col];
                    aug[r] ^= aug[col];
                }
            }
        }
        return BitMatrix8{aug};
    }

    constexpr bool operator==(const BitMatrix8&) const = default;
};

constexpr byte apply_linear(const BitMatrix8& m, byte x) { return m.apply(x); }

// The affine layer of the byte substitution: s(x) = A * x^-1 + 0x63.
inline constexpr BitMatrix8 kAffineMatrix{{0xF1, 0xE3, 0xC7, 0x8F, 0x1F, 0x3E, 0x7C, 0xF8}};
inline constexpr BitMatrix8 kAffineMatrixInv = kAffineMatrix.inverted();
inline constexpr byte kAffineConstant = 0x63;

namespace detail {

constexpr std::array<byte, 256> build_sbox()
{
    std::array<byte, 256> t{};
    t[0] = kAffineConstant;
    for (unsigned x = 1; x < 256; ++x)
        t[x] = static_cast<byte>(kAffineMatrix.apply(kInverse[x]) ^ kAffineConstant);
    return t;
}

inline constexpr auto kSbox = build_sbox();

constexpr std::array<byte, 256> build_inv_sbox()
{
    std::array<byte, 256> t{};
    for (unsigned x = 0; x < 256; ++x) t[kSbox[x]] = static_cast<byte>(x);
    return t;
}

inline constexpr auto kSboxInv = build_inv_sbox();

} // namespace detail

constexpr byte sbox(byte x) { return detail::kSbox[x]; }
constexpr byte inv_sbox(byte y) { return detail::kSboxInv[y]; }

// E_1 is the image of t -> t^2 + t, the 7-dimensional GF(2) subspace of
// bytes whose bit 7 equals bit 5 (zero included; E_1* excludes it).
constexpr bool in_e1(byte x) { return (((x >> 7) ^ (x >> 5)) & 1) == 0; }

namespace detail {

// theta -> smallest root of t^2 + t = theta, -1 when theta is outside E_1.
constexpr std::array<std::int16_t, 256> build_quad_roots()
{
    std::array<std::int16_t, 256> t{};
    for (auto& v : t) v = -1;
    for (unsigned r = 0; r < 256; ++r) {
        byte theta = static_cast<byte>(mul(static_cast<byte>(r), static_cast<byte>(r)) ^ r);
        if (t[theta] < 0) t[theta] = static_cast<std::int16_t>(r);
    }
    return t;
}

inline constexpr auto kQuadRoot = build_quad_roots();

} // namespace detail

// Roots of t^2 + t = theta.  The two roots differ by 1; smallest first.
constexpr std::optional<std::pair<byte, byte>> solve_quadratic(byte theta)
{
    std::int16_t r = detail::kQuadRoot[theta];
    if (r < 0) return std::nullopt;
    auto alpha = static_cast<byte>(r);
    return std::pair<byte, byte>{alpha, static_cast<byte>(alpha ^ 1)};
}

// GF(2)-dimension of the intersection of the scaled subspaces lambda_i * E_1.
// Equals 8 minus the GF(2)-rank of { lambda_i^-1 }, which reproduces the
// case analysis on one to four scalars.
inline int subspace_dim(std::span<const byte> lambdas)
{
    if (lambdas.empty() || lambdas.size() > 4)
        throw std::invalid_argument("subspace_dim: expected 1..4 scalars");
    std::array<byte, 8> basis{};
    int rank = 0;
    for (byte lambda : lambdas) {
        if (lambda == 0) throw std::domain_error("subspace_dim: zero scalar");
        byte v = inv(lambda);
        while (v != 0) {
            int h = std::bit_width(static_cast<unsigned>(v)) - 1;
            if (basis[h] == 0) {
                basis[h] = v;
                ++rank;
                break;
            }
            v ^= basis[h];
        }
    }
    return 8 - rank;
}

} // namespace dfa::gf

#endif // DFA_GF256_HPP
