//
// Licensed by "The MIT License". See file LICENSE.
//

#ifndef DFA_FAULT_INJECTOR_HPP
#define DFA_FAULT_INJECTOR_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dfa/aes.hpp"

namespace dfa {

// splitmix64: tiny, seedable and bit-stable across platforms, so campaign
// files are byte-identical for a given seed everywhere.
struct Rng {
    std::uint64_t state;

    constexpr explicit Rng(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next()
    {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }

    constexpr byte next_byte() { return static_cast<byte>(next() & 0xFF); }

    Block block()
    {
        Block b;
        for (auto& v : b) v = next_byte();
        return b;
    }
};

// Sub-seed for the index-th run of a campaign: the index-th draw from the
// master stream.
inline std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t index)
{
    Rng master(seed);
    std::uint64_t sub = master.next();
    for (std::uint64_t i = 0; i < index; ++i) sub = master.next();
    return sub;
}

enum class FaultLocation {
    after_last_shift_rows, // after ShiftRows of round Nr-1, the canonical spot
    last_mix_window,       // any boundary between the last two MixColumns, drawn per run
    deep_before_mix,       // before MixColumns of round Nr-2 (two rounds before the end)
};

inline const char* fault_location_name(FaultLocation loc)
{
    switch (loc) {
    case FaultLocation::after_last_shift_rows: return "after-last-shiftrows";
    case FaultLocation::last_mix_window: return "last-mix-window";
    case FaultLocation::deep_before_mix: return "deep-before-mix";
    }
    return "?";
}

struct FaultModel {
    enum class Kind { xor_byte, replace_random, stuck_at };

    Kind kind{};
    byte value{}; // epsilon for xor_byte, the forced value for stuck_at

    static FaultModel xor_byte(byte epsilon)
    {
        if (epsilon == 0) throw std::invalid_argument("xor fault with epsilon 0 is no fault");
        return {Kind::xor_byte, epsilon};
    }
    static FaultModel replace_random() { return {Kind::replace_random, 0}; }
    static FaultModel stuck_at(byte v) { return {Kind::stuck_at, v}; }
};

struct FaultSpec {
    FaultLocation location{};
    std::optional<int> byte_index; // 0..15, or nullopt for a random draw per run
    FaultModel model{};

    void validate() const
    {
        if (model.kind == FaultModel::Kind::xor_byte && model.value == 0)
            throw std::invalid_argument("FaultSpec: xor fault needs a nonzero epsilon");
        if (byte_index && (*byte_index < 0 || *byte_index > 15))
            throw std::invalid_argument("FaultSpec: byte index out of range");
    }
};

// The fault as actually applied: which state byte of which pipeline
// boundary changed, and the realized model value (epsilon for xor faults,
// the new byte value otherwise).
struct ResolvedFault {
    int round{};
    Step step{};
    int byte_index{};
    FaultModel::Kind kind{};
    byte value{};
};

struct FaultyRun {
    Block plaintext{};
    Block correct_ciphertext{};
    Block faulty_ciphertext{};
    ResolvedFault truth{};
    std::uint64_t seed{};
};

// Raised when the requested mutation would leave the state unchanged
// (e.g. a stuck-at byte that already holds the stuck value).
struct fault_rejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline byte mutated_byte(const ResolvedFault& f, byte old_value)
{
    return f.kind == FaultModel::Kind::xor_byte ? static_cast<byte>(old_value ^ f.value) : f.value;
}

template <typename Hook>
Block encrypt_with_fault(const KeySchedule& ks, const Block& pt, const ResolvedFault& f, Hook&& hook)
{
    return encrypt_with_hook(ks, pt, [&](int round, Step step, State& s) {
        if (round == f.round && step == f.step)
            s.bytes[f.byte_index] = mutated_byte(f, s.bytes[f.byte_index]);
        hook(round, step, s);
    });
}

} // namespace detail

// Runs a traced encryption, flips exactly one state byte at the resolved
// location, and resumes the pipeline.  Deterministic for a given seed.
inline FaultyRun inject(const KeySchedule& ks, const Block& plaintext, const FaultSpec& spec, std::uint64_t seed)
{
    spec.validate();
    Rng rng(seed);
    const int nr = rounds(ks.variant);

    ResolvedFault fault{};
    switch (spec.location) {
    case FaultLocation::after_last_shift_rows:
        fault.round = nr - 1;
        fault.step = Step::shift_rows;
        break;
    case FaultLocation::last_mix_window: {
        // all three boundaries leave a single unknown byte at the input of
        // the last MixColumns, so they are equivalent for the analysis
        static constexpr std::pair<int, Step> offsets[3] = {
            {-2, Step::add_round_key}, {-1, Step::sub_bytes}, {-1, Step::shift_rows}};
        auto [d, step] = offsets[rng.below(3)];
        fault.round = nr + d;
        fault.step = step;
        break;
    }
    case FaultLocation::deep_before_mix:
        fault.round = nr - 2;
        fault.step = Step::shift_rows;
        break;
    }
    fault.byte_index = spec.byte_index ? *spec.byte_index : static_cast<int>(rng.below(16));
    fault.kind = spec.model.kind;

    auto [correct_ct, trace] = encrypt_traced(ks, plaintext);
    byte old_value = trace.after(fault.round, fault.step).bytes[fault.byte_index];

    switch (spec.model.kind) {
    case FaultModel::Kind::xor_byte:
        fault.value = spec.model.value;
        break;
    case FaultModel::Kind::replace_random: {
        // uniform over the 255 values different from the current byte
        byte v = static_cast<byte>(rng.below(255));
        if (v >= old_value) ++v;
        fault.value = v;
        break;
    }
    case FaultModel::Kind::stuck_at:
        if (old_value == spec.model.value)
            throw fault_rejected("stuck-at fault: byte already holds the stuck value");
        fault.value = spec.model.value;
        break;
    }

    Block faulty_ct = detail::encrypt_with_fault(ks, plaintext, fault, [](int, Step, State&) {});
    return FaultyRun{plaintext, correct_ct, faulty_ct, fault, seed};
}

inline FaultyRun inject(std::span<const byte> key, const Block& plaintext, const FaultSpec& spec,
                        std::uint64_t seed)
{
    return inject(expand_key(key), plaintext, spec, seed);
}

// Re-applies a recorded fault; must reproduce the faulty ciphertext.
inline Block replay(const KeySchedule& ks, const Block& plaintext, const ResolvedFault& fault)
{
    return detail::encrypt_with_fault(ks, plaintext, fault, [](int, Step, State&) {});
}

inline Block replay(std::span<const byte> key, const Block& plaintext, const ResolvedFault& fault)
{
    return replay(expand_key(key), plaintext, fault);
}

// The single-byte differential a run carries at the MixColumns input it
// disturbs: the last one for window faults, the one of round Nr-2 for deep
// faults.  Returns (byte index, xor difference).
inline std::pair<int, byte> mc_input_fault(const KeySchedule& ks, const FaultyRun& run)
{
    const int nr = rounds(ks.variant);
    const bool deep = run.truth.round == nr - 2 && run.truth.step == Step::shift_rows;
    const int ref_round = deep ? nr - 2 : nr - 1;

    auto [correct_ct, correct_trace] = encrypt_traced(ks, run.plaintext);
    State faulty_ref{};
    detail::encrypt_with_fault(ks, run.plaintext, run.truth, [&](int round, Step step, State& s) {
        if (round == ref_round && step == Step::shift_rows) faulty_ref = s;
    });

    const State& correct_ref = correct_trace.after(ref_round, Step::shift_rows);
    int index = -1;
    byte diff = 0;
    for (int i = 0; i < 16; ++i) {
        byte d = static_cast<byte>(correct_ref.bytes[i] ^ faulty_ref.bytes[i]);
        if (d != 0) {
            if (index >= 0) throw std::logic_error("mc_input_fault: more than one disturbed byte");
            index = i;
            diff = d;
        }
    }
    if (index < 0) throw std::logic_error("mc_input_fault: no disturbed byte");
    return {index, diff};
}

// n independent runs over random plaintexts (and random positions where
// the fault spec asks for them), reproducible from the seed.  Rejected
// mutations redraw the plaintext a bounded number of times.
inline std::vector<FaultyRun> make_campaign(const KeySchedule& ks, int n, const FaultSpec& spec,
                                            std::uint64_t seed)
{
    if (n < 1) throw std::invalid_argument("make_campaign: need at least one run");
    spec.validate();

    std::vector<FaultyRun> runs;
    runs.reserve(n);
    Rng master(seed);
    for (int i = 0; i < n; ++i) {
        std::uint64_t sub = master.next();
        Rng attempt_rng(sub);
        bool done = false;
        for (int attempt = 0; attempt < 16 && !done; ++attempt) {
            Block pt = attempt_rng.block();
            std::uint64_t inject_seed = attempt_rng.next();
            try {
                FaultyRun run = inject(ks, pt, spec, inject_seed);
                run.seed = sub;
                runs.push_back(std::move(run));
                done = true;
            } catch (const fault_rejected&) {
                // redraw the plaintext and retry
            }
        }
        if (!done) throw fault_rejected("make_campaign: run " + std::to_string(i) + " rejected 16 times");
    }
    return runs;
}

inline std::vector<FaultyRun> make_campaign(std::span<const byte> key, int n, const FaultSpec& spec,
                                            std::uint64_t seed)
{
    return make_campaign(expand_key(key), n, spec, seed);
}

} // namespace dfa

#endif // DFA_FAULT_INJECTOR_HPP
