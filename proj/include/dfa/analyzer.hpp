//
// Licensed by "The MIT License". See file LICENSE.
//

#ifndef DFA_ANALYZER_HPP
#define DFA_ANALYZER_HPP

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dfa/aes.hpp"
#include "dfa/key_recovery.hpp"

namespace dfa {

// A set of byte values; candidate bookkeeping is all unions and
// intersections, so a fixed bitset beats node-based sets here.
class ByteSet {
public:
    ByteSet() = default;

    static ByteSet full()
    {
        ByteSet s;
        s.bits_.set();
        return s;
    }

    void insert(byte v) { bits_.set(v); }
    bool contains(byte v) const { return bits_.test(v); }
    std::size_t size() const { return bits_.count(); }
    bool empty() const { return bits_.none(); }

    std::optional<byte> single() const
    {
        if (bits_.count() != 1) return std::nullopt;
        for (unsigned v = 0; v < 256; ++v)
            if (bits_.test(v)) return static_cast<byte>(v);
        return std::nullopt;
    }

    std::vector<byte> values() const
    {
        std::vector<byte> out;
        out.reserve(bits_.count());
        for (unsigned v = 0; v < 256; ++v)
            if (bits_.test(v)) out.push_back(static_cast<byte>(v));
        return out;
    }

    bool intersects(const ByteSet& other) const { return (bits_ & other.bits_).any(); }

    ByteSet& operator&=(const ByteSet& o) { bits_ &= o.bits_; return *this; }
    ByteSet& operator|=(const ByteSet& o) { bits_ |= o.bits_; return *this; }
    friend ByteSet operator&(ByteSet a, const ByteSet& b) { return a &= b; }
    friend ByteSet operator|(ByteSet a, const ByteSet& b) { return a |= b; }
    bool operator==(const ByteSet&) const = default;

private:
    std::bitset<256> bits_;
};

// A ciphertext pair that cannot contribute to the attack (no fault, or a
// differential shape outside the handled models).
struct pair_unusable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Candidate sets shrank to nothing; only corrupted input data can do this.
struct contradiction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DiffState {
    Block bytes{};
    std::vector<int> support; // ascending positions of nonzero bytes
};

inline DiffState differential(const Block& correct, const Block& faulty)
{
    DiffState d;
    for (int i = 0; i < 16; ++i) {
        d.bytes[i] = static_cast<byte>(correct[i] ^ faulty[i]);
        if (d.bytes[i] != 0) d.support.push_back(i);
    }
    if (d.support.empty()) throw pair_unusable("no fault: ciphertexts are identical");
    return d;
}

// Output position reached by the byte of (row, column of the last
// MixColumns input) after the final ShiftRows.
constexpr int fault_output_pos(int column, int row) { return 4 * ((column - row) & 3) + row; }

struct FaultSlot {
    int output_pos;  // position in the ciphertext block
    int mix_row;     // row at the output of the disturbed MixColumns column
    byte delta;      // observed differential byte
};

struct FaultPattern {
    int injected_column{};             // column at the last MixColumns input
    std::array<FaultSlot, 4> slots{};  // indexed by mix_row
    std::vector<int> row_hypotheses;   // singleton when the location is known
};

// Identifies which single-column fault a 4-byte differential is the image
// of.  A known injection byte index pins the row hypothesis (rows survive
// every step between the two MixColumns except the final ShiftRows, which
// the pattern already accounts for).
inline FaultPattern classify(const DiffState& diff, std::optional<int> known_byte_index = std::nullopt)
{
    if (diff.support.size() != 4)
        throw pair_unusable("unsupported fault shape: differential support is " +
                            std::to_string(diff.support.size()) + " bytes, expected 4");

    for (int column = 0; column < 4; ++column) {
        std::array<int, 4> expected{};
        for (int row = 0; row < 4; ++row) expected[row] = fault_output_pos(column, row);
        std::array<int, 4> sorted = expected;
        std::sort(sorted.begin(), sorted.end());
        if (!std::equal(sorted.begin(), sorted.end(), diff.support.begin())) continue;

        FaultPattern p;
        p.injected_column = column;
        for (int row = 0; row < 4; ++row) {
            int pos = expected[row];
            p.slots[row] = FaultSlot{pos, row, diff.bytes[pos]};
        }
        if (known_byte_index) {
            if (*known_byte_index < 0 || *known_byte_index > 15)
                throw std::invalid_argument("classify: byte index out of range");
            p.row_hypotheses = {*known_byte_index % 4};
        } else {
            p.row_hypotheses = {0, 1, 2, 3};
        }
        return p;
    }
    throw pair_unusable("unsupported fault shape: support does not match a single-column pattern");
}

// A fault ahead of the second-to-last MixColumns reaches every output
// byte; the 16 differentials split into four single-column patterns, one
// per injected column, analyzable independently with unknown rows.
inline std::array<DiffState, 4> split_deep_fault(const DiffState& diff)
{
    if (diff.support.size() != 16)
        throw pair_unusable("unsupported fault shape: deep split needs all 16 bytes disturbed");
    std::array<DiffState, 4> groups;
    for (int column = 0; column < 4; ++column) {
        DiffState& g = groups[column];
        for (int row = 0; row < 4; ++row) {
            int pos = fault_output_pos(column, row);
            g.bytes[pos] = diff.bytes[pos];
        }
        for (int i = 0; i < 16; ++i)
            if (g.bytes[i] != 0) g.support.push_back(i);
    }
    return groups;
}

// Injected faults consistent with observing the differential eps_prime
// under MixColumns coefficient c: { (c * (A^-1 * eps') * t)^-1, t in E_1* }.
// Always 127 elements.
inline ByteSet fault_candidates(byte c, byte eps_prime)
{
    if (c != 0x01 && c != 0x02 && c != 0x03)
        throw std::domain_error("fault_candidates: coefficient must be '01', '02' or '03'");
    if (eps_prime == 0) throw std::domain_error("fault_candidates: differential fault is zero");

    byte lambda = gf::mul(c, gf::apply_linear(gf::kAffineMatrixInv, eps_prime));
    ByteSet out;
    for (unsigned t = 1; t < 256; ++t) {
        if (!gf::in_e1(static_cast<byte>(t))) continue;
        out.insert(gf::inv(gf::mul(lambda, static_cast<byte>(t))));
    }
    return out;
}

// Direct enumeration of s(x + c.eps) + s(x) = eps' over all (x, eps);
// the independent oracle for fault_candidates.
inline ByteSet brute_force_fault_set(byte c, byte eps_prime)
{
    if (c != 0x01 && c != 0x02 && c != 0x03)
        throw std::domain_error("brute_force_fault_set: coefficient must be '01', '02' or '03'");
    if (eps_prime == 0) throw std::domain_error("brute_force_fault_set: differential fault is zero");

    ByteSet out;
    for (unsigned eps = 1; eps < 256; ++eps) {
        byte ce = gf::mul(c, static_cast<byte>(eps));
        for (unsigned x = 0; x < 256; ++x) {
            if (static_cast<byte>(gf::sbox(static_cast<byte>(x ^ ce)) ^ gf::sbox(static_cast<byte>(x))) == eps_prime) {
                out.insert(static_cast<byte>(eps));
                break;
            }
        }
    }
    return out;
}

// The committed fault satisfies all four slot equations at once.  An empty
// result signals an inconsistent row hypothesis.
inline ByteSet intersect_fault_sets(const std::array<ByteSet, 4>& sets)
{
    for (const ByteSet& s : sets)
        if (s.empty()) throw std::invalid_argument("intersect_fault_sets: empty input set");
    ByteSet out = sets[0];
    for (int i = 1; i < 4; ++i) out &= sets[i];
    return out;
}

// Key byte values consistent with one (c, eps', eps) triple against the
// faulty ciphertext byte: two solutions in general, four when theta = 1
// (the inversion's fixed point adds the trivial pair x = 0, x = c.eps).
inline ByteSet key_candidates(byte c, byte eps_prime, byte eps, byte faulty_byte)
{
    if (eps == 0) throw std::invalid_argument("key_candidates: fault value is zero");
    byte theta = gf::inv(gf::mul(gf::mul(gf::apply_linear(gf::kAffineMatrixInv, eps_prime), c), eps));
    auto roots = gf::solve_quadratic(theta);
    if (!roots)
        throw std::invalid_argument("key_candidates: fault value is not a candidate for this differential");

    byte ce = gf::mul(c, eps);
    ByteSet out;
    out.insert(static_cast<byte>(gf::sbox(gf::mul(ce, roots->first)) ^ faulty_byte));
    out.insert(static_cast<byte>(gf::sbox(gf::mul(ce, roots->second)) ^ faulty_byte));
    if (theta == 0x01) {
        out.insert(static_cast<byte>(gf::sbox(0x00) ^ faulty_byte));
        out.insert(static_cast<byte>(gf::sbox(ce) ^ faulty_byte));
    }
    return out;
}

// One surviving row hypothesis for one analyzed column group, keeping the
// per-fault candidate sets so later evidence can still prune them.
struct FaultHypothesis {
    int row{};
    std::vector<std::pair<byte, std::array<ByteSet, 4>>> per_fault; // (eps, key sets per mix_row)
};

struct AnalyzedGroup {
    int injected_column{};
    std::array<int, 4> positions{}; // key byte position per mix_row
    std::vector<FaultHypothesis> hypotheses;
};

struct PairAnalysis {
    std::vector<AnalyzedGroup> groups;
    std::array<std::optional<ByteSet>, 16> byte_sets; // union over hypotheses, per key byte
};

namespace detail {

inline AnalyzedGroup analyze_group(const FaultPattern& pattern, const Block& faulty)
{
    AnalyzedGroup group;
    group.injected_column = pattern.injected_column;
    for (int k = 0; k < 4; ++k) group.positions[k] = pattern.slots[k].output_pos;

    for (int row : pattern.row_hypotheses) {
        std::array<ByteSet, 4> sets;
        for (int k = 0; k < 4; ++k) sets[k] = fault_candidates(kMixMatrix[k][row], pattern.slots[k].delta);
        ByteSet committed = intersect_fault_sets(sets);
        if (committed.empty()) continue; // impossible hypothesis

        FaultHypothesis hyp;
        hyp.row = row;
        for (byte eps : committed.values()) {
            std::array<ByteSet, 4> key_sets;
            for (int k = 0; k < 4; ++k) {
                const FaultSlot& slot = pattern.slots[k];
                key_sets[k] = key_candidates(kMixMatrix[k][row], slot.delta, eps, faulty[slot.output_pos]);
            }
            hyp.per_fault.emplace_back(eps, std::move(key_sets));
        }
        group.hypotheses.push_back(std::move(hyp));
    }
    return group;
}

} // namespace detail

// Turns one correct/faulty pair into per-key-byte candidate sets: committed
// faults per row hypothesis, key candidates per fault, unioned across the
// hypotheses that survive.  Key bytes outside the disturbed pattern stay
// unconstrained.
inline PairAnalysis analyze_pair(const Block& correct, const Block& faulty,
                                 std::optional<int> known_byte_index = std::nullopt)
{
    DiffState diff = differential(correct, faulty);

    PairAnalysis analysis;
    if (diff.support.size() == 4) {
        analysis.groups.push_back(detail::analyze_group(classify(diff, known_byte_index), faulty));
    } else if (diff.support.size() == 16) {
        for (const DiffState& g : split_deep_fault(diff))
            analysis.groups.push_back(detail::analyze_group(classify(g), faulty));
    } else {
        throw pair_unusable("unsupported fault shape: differential support is " +
                            std::to_string(diff.support.size()) + " bytes");
    }

    for (const AnalyzedGroup& group : analysis.groups) {
        if (group.hypotheses.empty()) throw pair_unusable("inconsistent pair: every row hypothesis is impossible");
        for (int k = 0; k < 4; ++k) {
            ByteSet merged;
            for (const FaultHypothesis& hyp : group.hypotheses)
                for (const auto& [eps, key_sets] : hyp.per_fault) merged |= key_sets[k];
            analysis.byte_sets[group.positions[k]] = merged;
        }
    }
    return analysis;
}

// Per-key-byte sets of still possible values; sets only shrink as pairs
// are consumed.
struct CandidateTracker {
    std::array<std::optional<ByteSet>, 16> sets{};
    int pairs_consumed = 0;
};

inline CandidateTracker accumulate(CandidateTracker tracker, const PairAnalysis& report)
{
    for (int i = 0; i < 16; ++i) {
        const auto& incoming = report.byte_sets[i];
        if (!incoming) continue;
        auto& slot = tracker.sets[i];
        if (!slot) {
            slot = *incoming;
        } else {
            *slot &= *incoming;
        }
        if (slot->empty())
            throw contradiction_error("candidate set for key byte " + std::to_string(i) + " became empty");
    }
    ++tracker.pairs_consumed;
    return tracker;
}

enum class LocationMode { known, unknown };

struct AttackPair {
    Block plaintext{};
    Block correct{};
    Block faulty{};
    std::optional<int> known_byte_index; // injection byte index, when the truth is available
};

struct ByteAudit {
    int candidate_count = 256;
    std::optional<byte> value;
    std::optional<int> pairs_to_converge;
};

struct AttackResult {
    bool converged = false;
    std::optional<Block> last_round_key;
    std::optional<std::vector<byte>> cipher_key; // only derivable for AES-128
    bool cipher_key_verified = false;
    std::array<ByteAudit, 16> per_byte{};
    int pairs_used = 0;
    int pairs_skipped = 0;
    std::vector<std::string> skip_log;
    CandidateTracker tracker;
};

namespace detail {

inline bool tracker_converged(const CandidateTracker& t)
{
    for (const auto& s : t.sets)
        if (!s || s->size() != 1) return false;
    return true;
}

// Re-filters a cached analysis against the current tracker: a (hypothesis,
// fault) entry stays viable only while each of its four candidate sets
// still meets the tracker.  Returns true when a tracker set shrank.
inline bool refine_with_group(CandidateTracker& tracker, const AnalyzedGroup& group)
{
    std::array<ByteSet, 4> merged{};
    bool any_viable = false;
    for (const FaultHypothesis& hyp : group.hypotheses) {
        for (const auto& [eps, key_sets] : hyp.per_fault) {
            bool viable = true;
            for (int k = 0; k < 4 && viable; ++k) {
                const auto& current = tracker.sets[group.positions[k]];
                if (current && !key_sets[k].intersects(*current)) viable = false;
            }
            if (!viable) continue;
            any_viable = true;
            for (int k = 0; k < 4; ++k) {
                const auto& current = tracker.sets[group.positions[k]];
                merged[k] |= current ? (key_sets[k] & *current) : key_sets[k];
            }
        }
    }
    if (!any_viable) throw contradiction_error("pair is inconsistent with the accumulated candidates");

    bool changed = false;
    for (int k = 0; k < 4; ++k) {
        auto& slot = tracker.sets[group.positions[k]];
        if (!slot || *slot != merged[k]) {
            slot = merged[k];
            changed = true;
        }
    }
    return changed;
}

} // namespace detail

// Streams pairs through analyze_pair/accumulate until every key byte is a
// singleton.  If the stream runs out first, consumed pairs are re-filtered
// against the shrunken tracker to a fixpoint: hypotheses that were viable
// on first sight rarely survive the accumulated evidence, and dropping
// them recovers the cross-byte information a per-byte union discards.
inline AttackResult run_attack(std::span<const AttackPair> pairs, LocationMode mode, Variant variant)
{
    if (pairs.empty()) throw std::invalid_argument("run_attack: need at least one pair");

    AttackResult result;
    std::vector<PairAnalysis> consumed;
    std::set<std::pair<Block, Block>> seen;
    const AttackPair* first_used = nullptr;

    auto note_convergence = [&](int at_pairs) {
        for (int i = 0; i < 16; ++i) {
            auto& audit = result.per_byte[i];
            const auto& s = result.tracker.sets[i];
            if (s && s->size() == 1 && !audit.pairs_to_converge) audit.pairs_to_converge = at_pairs;
        }
    };

    std::size_t index = 0;
    for (const AttackPair& pair : pairs) {
        ++index;
        if (!seen.insert({pair.plaintext, pair.faulty}).second) {
            ++result.pairs_skipped;
            result.skip_log.push_back("pair " + std::to_string(index) + ": duplicate");
            continue;
        }
        std::optional<int> known;
        if (mode == LocationMode::known) {
            if (!pair.known_byte_index) {
                ++result.pairs_skipped;
                result.skip_log.push_back("pair " + std::to_string(index) + ": known-location mode but no location");
                continue;
            }
            known = pair.known_byte_index;
        }
        try {
            PairAnalysis analysis = analyze_pair(pair.correct, pair.faulty, known);
            result.tracker = accumulate(std::move(result.tracker), analysis);
            consumed.push_back(std::move(analysis));
            if (!first_used) first_used = &pair;
        } catch (const pair_unusable& e) {
            ++result.pairs_skipped;
            result.skip_log.push_back("pair " + std::to_string(index) + ": " + e.what());
            continue;
        }
        note_convergence(result.tracker.pairs_consumed);
        if (detail::tracker_converged(result.tracker)) break;
    }
    result.pairs_used = result.tracker.pairs_consumed;

    if (!detail::tracker_converged(result.tracker) && !consumed.empty()) {
        bool changed = true;
        while (changed && !detail::tracker_converged(result.tracker)) {
            changed = false;
            for (const PairAnalysis& analysis : consumed)
                for (const AnalyzedGroup& group : analysis.groups)
                    if (detail::refine_with_group(result.tracker, group)) changed = true;
        }
        note_convergence(result.pairs_used);
    }

    for (int i = 0; i < 16; ++i) {
        auto& audit = result.per_byte[i];
        const auto& s = result.tracker.sets[i];
        audit.candidate_count = s ? static_cast<int>(s->size()) : 256;
        if (s) audit.value = s->single();
    }

    result.converged = detail::tracker_converged(result.tracker);
    if (result.converged) {
        Block key_block{};
        for (int i = 0; i < 16; ++i) key_block[i] = *result.tracker.sets[i]->single();
        result.last_round_key = key_block;

        if (variant == Variant::aes128) {
            FinalKeyMaterial fk{Variant::aes128, {}};
            for (int c = 0; c < 4; ++c)
                fk.words.push_back(Word{key_block[4 * c], key_block[4 * c + 1],
                                        key_block[4 * c + 2], key_block[4 * c + 3]});
            std::vector<byte> cipher_key = recover_key(fk);
            if (first_used && encrypt_block(cipher_key, first_used->plaintext) != first_used->correct)
                throw std::runtime_error("run_attack: recovered key failed re-encryption check");
            result.cipher_key = std::move(cipher_key);
            result.cipher_key_verified = first_used != nullptr;
        }
    }
    return result;
}

} // namespace dfa

#endif // DFA_ANALYZER_HPP
