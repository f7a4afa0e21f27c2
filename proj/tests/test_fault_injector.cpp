//
// Licensed by "The MIT License". See file LICENSE.
//

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "dfa/fault_injector.hpp"
#include "fixtures.hpp"

using namespace dfa;

namespace {

const KeySchedule& demo_schedule()
{
    static const KeySchedule ks = expand_key(parse_hex(fixtures::kFipsKey128));
    return ks;
}

std::vector<int> diff_support(const Block& a, const Block& b)
{
    std::vector<int> support;
    for (int i = 0; i < 16; ++i)
        if (a[i] != b[i]) support.push_back(i);
    return support;
}

// final positions disturbed by a single fault entering column j of the
// last MixColumns
std::vector<int> expected_support(int column)
{
    std::set<int> s;
    for (int row = 0; row < 4; ++row) s.insert(4 * ((column - row) & 3) + row);
    return {s.begin(), s.end()};
}

} // namespace

TEST_CASE("worked example fault")
{
    FaultSpec spec{FaultLocation::after_last_shift_rows, 0, FaultModel::xor_byte(fixtures::kDemoFaultValue)};
    FaultyRun run = inject(demo_schedule(), block_from_hex(fixtures::kFipsPlain), spec, 1);

    CHECK(block_hex(run.correct_ciphertext) == fixtures::kFipsCipher);
    CHECK(block_hex(run.faulty_ciphertext) == fixtures::kDemoFaultyCipher);
    CHECK(run.truth.round == 9);
    CHECK(run.truth.step == Step::shift_rows);
    CHECK(run.truth.byte_index == 0);
    CHECK(run.truth.value == fixtures::kDemoFaultValue);

    auto support = diff_support(run.correct_ciphertext, run.faulty_ciphertext);
    REQUIRE(support == std::vector<int>(fixtures::kDemoDiffSupport.begin(), fixtures::kDemoDiffSupport.end()));
    for (std::size_t i = 0; i < support.size(); ++i)
        CHECK((run.correct_ciphertext[support[i]] ^
               run.faulty_ciphertext[support[i]]) == fixtures::kDemoDiffValues[i]);

    auto [mc_index, mc_diff] = mc_input_fault(demo_schedule(), run);
    CHECK(mc_index == 0);
    CHECK(mc_diff == fixtures::kDemoFaultValue);
}

TEST_CASE("worked example intermediate states")
{
    // replay the demo fault through the public hook and compare every
    // published intermediate state of the faulted run
    auto ks = demo_schedule();
    std::map<std::pair<int, int>, Block> states;
    encrypt_with_hook(ks, block_from_hex(fixtures::kFipsPlain), [&](int round, Step step, State& s) {
        if (round == 9 && step == Step::shift_rows) s.bytes[0] ^= fixtures::kDemoFaultValue;
        states[{round, static_cast<int>(step)}] = s.to_block();
    });

    CHECK(block_hex(states[{9, static_cast<int>(Step::shift_rows)}]) == "996E46A6F24CE78C4D904AD897ECC395");
    CHECK(block_hex(states[{9, static_cast<int>(Step::mix_columns)}]) == "7B298ACF40D4E4A5A3703AA64C9F42BC");
    CHECK(block_hex(states[{9, static_cast<int>(Step::add_round_key)}]) == "D75EEC3C592E38848BA113E71BC342D2");
    CHECK(block_hex(states[{10, static_cast<int>(Step::sub_bytes)}]) == "0E58CEEBCB31075F3D327D94AF2E2CB5");
    CHECK(block_hex(states[{10, static_cast<int>(Step::shift_rows)}]) == "0E317DB5CB322CEB3D2ECE5FAF580794");
    CHECK(block_hex(states[{10, static_cast<int>(Step::add_round_key)}]) == fixtures::kDemoFaultyCipher);
}

TEST_CASE("last-round fault spreads to the shifted column image")
{
    std::mt19937 rng(31);
    Block pt = block_from_hex(fixtures::kFipsPlain);
    for (int b = 0; b < 16; ++b) {
        for (int trial = 0; trial < 200; ++trial) {
            byte eps = static_cast<byte>(1 + rng() % 255);
            FaultSpec spec{FaultLocation::after_last_shift_rows, b, FaultModel::xor_byte(eps)};
            FaultyRun run = inject(demo_schedule(), pt, spec, static_cast<std::uint64_t>(trial));
            CHECK(diff_support(run.correct_ciphertext, run.faulty_ciphertext) == expected_support(b / 4));
        }
    }
}

TEST_CASE("window faults stay equivalent to one byte at the mix input")
{
    std::mt19937 rng(32);
    auto ks = demo_schedule();
    for (int trial = 0; trial < 300; ++trial) {
        Block pt;
        for (auto& v : pt) v = static_cast<byte>(rng());
        FaultSpec spec{FaultLocation::last_mix_window, std::nullopt, FaultModel::replace_random()};
        FaultyRun run = inject(ks, pt, spec, static_cast<std::uint64_t>(1000 + trial));

        CHECK(run.faulty_ciphertext != run.correct_ciphertext);
        auto [mc_index, mc_diff] = mc_input_fault(ks, run);
        CHECK(mc_diff != 0);
        CHECK(diff_support(run.correct_ciphertext, run.faulty_ciphertext) == expected_support(mc_index / 4));
    }
}

TEST_CASE("deep faults disturb all sixteen output bytes")
{
    std::mt19937 rng(33);
    auto ks = demo_schedule();
    for (int trial = 0; trial < 1000; ++trial) {
        Block pt;
        for (auto& v : pt) v = static_cast<byte>(rng());
        FaultModel model = (trial % 2) ? FaultModel::stuck_at(0x00) : FaultModel::stuck_at(0xFF);
        FaultSpec spec{FaultLocation::deep_before_mix, std::nullopt, model};
        FaultyRun run;
        try {
            run = inject(ks, pt, spec, static_cast<std::uint64_t>(trial));
        } catch (const fault_rejected&) {
            continue; // byte already held the stuck value; campaigns redraw
        }
        CHECK(run.truth.round == 8);
        CHECK(diff_support(run.correct_ciphertext, run.faulty_ciphertext).size() == 16);
    }
}

TEST_CASE("mutations that change nothing are rejected")
{
    CHECK_THROWS_AS(FaultModel::xor_byte(0x00), std::invalid_argument);

    // hunt for a plaintext whose targeted byte already equals the stuck value
    auto ks = demo_schedule();
    std::mt19937 rng(34);
    bool exercised = false;
    for (int attempt = 0; attempt < 4096 && !exercised; ++attempt) {
        Block pt;
        for (auto& v : pt) v = static_cast<byte>(rng());
        auto [ct, trace] = encrypt_traced(ks, pt);
        if (trace.after(9, Step::shift_rows).bytes[0] != 0x00) continue;
        exercised = true;
        FaultSpec spec{FaultLocation::after_last_shift_rows, 0, FaultModel::stuck_at(0x00)};
        CHECK_THROWS_AS(inject(ks, pt, spec, 7), fault_rejected);
    }
    CHECK(exercised);
}

TEST_CASE("injection is deterministic in the seed")
{
    FaultSpec spec{FaultLocation::last_mix_window, std::nullopt, FaultModel::replace_random()};
    Block pt = block_from_hex(fixtures::kFipsPlain);
    FaultyRun a = inject(demo_schedule(), pt, spec, 99);
    FaultyRun b = inject(demo_schedule(), pt, spec, 99);
    CHECK(a.faulty_ciphertext == b.faulty_ciphertext);
    CHECK(a.truth.round == b.truth.round);
    CHECK(a.truth.byte_index == b.truth.byte_index);
    CHECK(a.truth.value == b.truth.value);

    FaultyRun c = inject(demo_schedule(), pt, spec, 100);
    CHECK((a.faulty_ciphertext != c.faulty_ciphertext || a.truth.byte_index != c.truth.byte_index));
}

TEST_CASE("campaigns")
{
    auto ks = demo_schedule();
    FaultSpec spec{FaultLocation::after_last_shift_rows, std::nullopt, FaultModel::replace_random()};

    SECTION("runs carry four-byte differentials and replay their truth")
    {
        auto runs = make_campaign(ks, 50, spec, 4242);
        REQUIRE(runs.size() == 50);
        for (const FaultyRun& run : runs) {
            CHECK(run.faulty_ciphertext != run.correct_ciphertext);
            CHECK(diff_support(run.correct_ciphertext, run.faulty_ciphertext).size() == 4);
            CHECK(encrypt_block(ks, run.plaintext) == run.correct_ciphertext);
            CHECK(replay(ks, run.plaintext, run.truth) == run.faulty_ciphertext);
        }
    }

    SECTION("a singleton campaign matches one inject call at the derived sub-seed")
    {
        auto runs = make_campaign(ks, 1, spec, 777);
        REQUIRE(runs.size() == 1);

        std::uint64_t sub = derive_subseed(777, 0);
        Rng rng(sub);
        Block pt = rng.block();
        FaultyRun direct = inject(ks, pt, spec, rng.next());
        CHECK(runs[0].plaintext == direct.plaintext);
        CHECK(runs[0].faulty_ciphertext == direct.faulty_ciphertext);
        CHECK(runs[0].seed == sub);
    }

    SECTION("equal seeds reproduce byte-identical campaigns")
    {
        auto a = make_campaign(ks, 20, spec, 31337);
        auto b = make_campaign(ks, 20, spec, 31337);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].plaintext == b[i].plaintext);
            CHECK(a[i].faulty_ciphertext == b[i].faulty_ciphertext);
            CHECK(a[i].seed == b[i].seed);
        }
    }

    SECTION("stuck-at campaigns redraw rejected plaintexts")
    {
        FaultSpec stuck{FaultLocation::deep_before_mix, std::nullopt, FaultModel::stuck_at(0x00)};
        auto runs = make_campaign(ks, 200, stuck, 2025);
        REQUIRE(runs.size() == 200);
        for (const FaultyRun& run : runs) {
            CHECK(run.faulty_ciphertext != run.correct_ciphertext);
            CHECK(replay(ks, run.plaintext, run.truth) == run.faulty_ciphertext);
        }
    }

    SECTION("run count must be positive")
    {
        CHECK_THROWS_AS(make_campaign(ks, 0, spec, 1), std::invalid_argument);
    }
}
