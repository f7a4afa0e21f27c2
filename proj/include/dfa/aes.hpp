//
// Licensed by "The MIT License". See file LICENSE.
//

#ifndef DFA_AES_HPP
#define DFA_AES_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dfa/gf256.hpp"
#include "dfa/hex.hpp"

namespace dfa {

using gf::byte;
using Block = std::array<byte, 16>;
using Word = std::array<byte, 4>;

enum class Variant { aes128, aes192, aes256 };

constexpr int key_words(Variant v)
{
    switch (v) {
    case Variant::aes128: return 4;
    case Variant::aes192: return 6;
    case Variant::aes256: return 8;
    }
    throw std::invalid_argument("bad variant");
}

constexpr int rounds(Variant v)
{
    switch (v) {
    case Variant::aes128: return 10;
    case Variant::aes192: return 12;
    case Variant::aes256: return 14;
    }
    throw std::invalid_argument("bad variant");
}

constexpr int key_bytes(Variant v) { return 4 * key_words(v); }

inline Variant variant_from_key_size(std::size_t n)
{
    switch (n) {
    case 16: return Variant::aes128;
    case 24: return Variant::aes192;
    case 32: return Variant::aes256;
    default: throw std::invalid_argument("key must be 16, 24 or 32 bytes");
    }
}

inline const char* variant_name(Variant v)
{
    switch (v) {
    case Variant::aes128: return "128";
    case Variant::aes192: return "192";
    case Variant::aes256: return "256";
    }
    return "?";
}

// The 4x4 byte matrix the cipher transforms.  Storage is column-major:
// block byte i sits at (row i mod 4, column i div 4), so a block maps to
// a state without reordering.
struct State {
    Block bytes{};

    static constexpr State from_block(const Block& b) { return State{b}; }
    constexpr Block to_block() const { return bytes; }

    constexpr byte& at(int row, int col) { return bytes[4 * col + row]; }
    constexpr byte at(int row, int col) const { return bytes[4 * col + row]; }

    constexpr bool operator==(const State&) const = default;
};

enum class Step { add_round_key, sub_bytes, shift_rows, mix_columns };

inline const char* step_name(Step s)
{
    switch (s) {
    case Step::add_round_key: return "addroundkey";
    case Step::sub_bytes: return "subbytes";
    case Step::shift_rows: return "shiftrows";
    case Step::mix_columns: return "mixcolumns";
    }
    return "?";
}

inline Step step_from_name(std::string_view name)
{
    if (name == "addroundkey") return Step::add_round_key;
    if (name == "subbytes") return Step::sub_bytes;
    if (name == "shiftrows") return Step::shift_rows;
    if (name == "mixcolumns") return Step::mix_columns;
    throw std::invalid_argument("unknown step name: " + std::string(name));
}

inline constexpr std::array<std::array<byte, 4>, 4> kMixMatrix{{
    {0x02, 0x03, 0x01, 0x01},
    {0x01, 0x02, 0x03, 0x01},
    {0x01, 0x01, 0x02, 0x03},
    {0x03, 0x01, 0x01, 0x02},
}};

inline State sub_bytes(State s)
{
    for (auto& b : s.bytes) b = gf::sbox(b);
    return s;
}

// Row k rotates left by k.
inline State shift_rows(const State& s)
{
    State out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out.at(r, c) = s.at(r, (c + r) & 3);
    return out;
}

inline State mix_columns(const State& s)
{
    State out;
    for (int c = 0; c < 4; ++c) {
        for (int r = 0; r < 4; ++r) {
            byte acc = 0;
            for (int k = 0; k < 4; ++k) acc ^= gf::mul(kMixMatrix[r][k], s.at(k, c));
            out.at(r, c) = acc;
        }
    }
    return out;
}

inline State add_round_key(State s, const State& rk)
{
    for (int i = 0; i < 16; ++i) s.bytes[i] ^= rk.bytes[i];
    return s;
}

// Applies exactly one transformation; the round key is required for
// add_round_key and rejected elsewhere.
inline State round_step(Step step, const State& s, const State* round_key = nullptr)
{
    if (step == Step::add_round_key) {
        if (round_key == nullptr)
            throw std::invalid_argument("round_step: add_round_key needs a round key");
        return add_round_key(s, *round_key);
    }
    if (round_key != nullptr)
        throw std::invalid_argument("round_step: round key given to a keyless step");
    switch (step) {
    case Step::sub_bytes: return sub_bytes(s);
    case Step::shift_rows: return shift_rows(s);
    case Step::mix_columns: return mix_columns(s);
    default: throw std::invalid_argument("round_step: bad step");
    }
}

struct KeySchedule {
    Variant variant{};
    std::vector<Word> words; // 4 * (rounds + 1) words; word c of round key i is its column c

    State round_key(int round) const
    {
        State rk;
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) rk.at(r, c) = words[4 * round + c][r];
        return rk;
    }
};

namespace detail {

inline Word sub_word(Word w)
{
    for (auto& b : w) b = gf::sbox(b);
    return w;
}

inline Word rot_word(Word w) { return Word{w[1], w[2], w[3], w[0]}; }

inline byte rcon(int i)
{
    byte v = 1;
    for (int k = 1; k < i; ++k) v = gf::mul(v, 0x02);
    return v;
}

} // namespace detail

inline KeySchedule expand_key(std::span<const byte> key)
{
    Variant variant = variant_from_key_size(key.size());
    const int nk = key_words(variant);
    const int total = 4 * (rounds(variant) + 1);

    KeySchedule ks{variant, {}};
    ks.words.reserve(total);
    for (int i = 0; i < nk; ++i)
        ks.words.push_back(Word{key[4 * i], key[4 * i + 1], key[4 * i + 2], key[4 * i + 3]});
    for (int i = nk; i < total; ++i) {
        Word temp = ks.words[i - 1];
        if (i % nk == 0) {
            temp = detail::sub_word(detail::rot_word(temp));
            temp[0] ^= detail::rcon(i / nk);
        } else if (nk > 6 && i % nk == 4) {
            temp = detail::sub_word(temp);
        }
        const Word& prev = ks.words[i - nk];
        ks.words.push_back(Word{static_cast<byte>(prev[0] ^ temp[0]), static_cast<byte>(prev[1] ^ temp[1]),
                                static_cast<byte>(prev[2] ^ temp[2]), static_cast<byte>(prev[3] ^ temp[3])});
    }
    return ks;
}

struct TraceEntry {
    int round;
    Step step;
    State state;
};

// Snapshot of every intermediate state.  Round 0 is the initial
// add_round_key; rounds 1..Nr-1 contribute four entries each and the last
// round three (no mix_columns), 4*Nr entries in total.
struct EncryptionTrace {
    Variant variant{};
    std::vector<TraceEntry> entries;

    const State& after(int round, Step step) const
    {
        for (const auto& e : entries)
            if (e.round == round && e.step == step) return e.state;
        throw std::out_of_range("trace has no entry for round " + std::to_string(round) + " step " +
                                step_name(step));
    }
};

// Runs the cipher calling hook(round, step, state&) after every applied
// step; the hook may mutate the state in place (fault injection).
template <typename Hook>
Block encrypt_with_hook(const KeySchedule& ks, const Block& plaintext, Hook&& hook)
{
    const int nr = rounds(ks.variant);
    State s = State::from_block(plaintext);

    s = add_round_key(s, ks.round_key(0));
    hook(0, Step::add_round_key, s);

    for (int round = 1; round < nr; ++round) {
        s = sub_bytes(s);
        hook(round, Step::sub_bytes, s);
        s = shift_rows(s);
        hook(round, Step::shift_rows, s);
        s = mix_columns(s);
        hook(round, Step::mix_columns, s);
        s = add_round_key(s, ks.round_key(round));
        hook(round, Step::add_round_key, s);
    }

    s = sub_bytes(s);
    hook(nr, Step::sub_bytes, s);
    s = shift_rows(s);
    hook(nr, Step::shift_rows, s);
    s = add_round_key(s, ks.round_key(nr));
    hook(nr, Step::add_round_key, s);

    return s.to_block();
}

inline Block encrypt_block(const KeySchedule& ks, const Block& plaintext)
{
    return encrypt_with_hook(ks, plaintext, [](int, Step, State&) {});
}

inline Block encrypt_block(std::span<const byte> key, const Block& plaintext)
{
    return encrypt_block(expand_key(key), plaintext);
}

inline std::pair<Block, EncryptionTrace> encrypt_traced(const KeySchedule& ks, const Block& plaintext)
{
    EncryptionTrace trace{ks.variant, {}};
    trace.entries.reserve(static_cast<std::size_t>(4 * rounds(ks.variant)));
    Block ct = encrypt_with_hook(ks, plaintext,
                                 [&](int round, Step step, State& s) { trace.entries.push_back({round, step, s}); });
    return {ct, std::move(trace)};
}

inline std::pair<Block, EncryptionTrace> encrypt_traced(std::span<const byte> key, const Block& plaintext)
{
    return encrypt_traced(expand_key(key), plaintext);
}

inline Block block_from_hex(std::string_view hex)
{
    auto bytes = parse_hex(hex);
    if (bytes.size() != 16) throw std::invalid_argument("block must be exactly 32 hex digits");
    Block b;
    std::copy(bytes.begin(), bytes.end(), b.begin());
    return b;
}

inline std::string block_hex(const Block& b) { return to_hex(b); }

} // namespace dfa

#endif // DFA_AES_HPP
