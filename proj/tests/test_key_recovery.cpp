//
// Licensed by "The MIT License". See file LICENSE.
//

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dfa/key_recovery.hpp"
#include "fixtures.hpp"

using namespace dfa;

namespace {

FinalKeyMaterial final_words_of(const KeySchedule& ks)
{
    const int nk = key_words(ks.variant);
    FinalKeyMaterial fk{ks.variant, {}};
    fk.words.assign(ks.words.end() - nk, ks.words.end());
    return fk;
}

std::vector<byte> random_key(std::mt19937& rng, std::size_t len)
{
    std::vector<byte> key(len);
    for (auto& v : key) v = static_cast<byte>(rng());
    return key;
}

} // namespace

TEST_CASE("last round key inverts to the cipher key")
{
    FinalKeyMaterial fk{Variant::aes128, {}};
    auto k10 = parse_hex(fixtures::kFipsRoundKey10);
    for (int c = 0; c < 4; ++c) fk.words.push_back(Word{k10[4 * c], k10[4 * c + 1], k10[4 * c + 2], k10[4 * c + 3]});
    CHECK(to_hex(recover_key(fk)) == fixtures::kFipsKey128);
}

TEST_CASE("recovery round-trips the expansion for every variant")
{
    std::mt19937 rng(21);
    for (std::size_t len : {16u, 24u, 32u}) {
        for (int trial = 0; trial < 1000; ++trial) {
            auto key = random_key(rng, len);
            auto ks = expand_key(key);
            auto recovered = recover_key(final_words_of(ks));
            REQUIRE(recovered == key);
        }
    }
}

TEST_CASE("recovered keys re-expand to the supplied final words")
{
    std::mt19937 rng(22);
    for (std::size_t len : {16u, 24u, 32u}) {
        auto key = random_key(rng, len);
        auto fk = final_words_of(expand_key(key));
        auto ks2 = expand_key(recover_key(fk));
        const int nk = key_words(fk.variant);
        for (int i = 0; i < nk; ++i)
            CHECK(ks2.words[ks2.words.size() - nk + i] == fk.words[i]);
    }
}

TEST_CASE("the 256-bit variant needs the last two round keys")
{
    std::mt19937 rng(23);
    auto key = random_key(rng, 32);
    auto ks = expand_key(key);

    // the final 8 words are exactly round keys 13 and 14
    FinalKeyMaterial fk{Variant::aes256, {}};
    Block k13 = ks.round_key(13).to_block();
    Block k14 = ks.round_key(14).to_block();
    for (int c = 0; c < 4; ++c) fk.words.push_back(Word{k13[4 * c], k13[4 * c + 1], k13[4 * c + 2], k13[4 * c + 3]});
    for (int c = 0; c < 4; ++c) fk.words.push_back(Word{k14[4 * c], k14[4 * c + 1], k14[4 * c + 2], k14[4 * c + 3]});
    CHECK(fk.words == final_words_of(ks).words);
    CHECK(recover_key(fk) == key);
}

TEST_CASE("word count must match the variant")
{
    FinalKeyMaterial fk{Variant::aes192, {}};
    fk.words.resize(4); // needs 6
    CHECK_THROWS_AS(recover_key(fk), std::invalid_argument);

    FinalKeyMaterial fk256{Variant::aes256, {}};
    fk256.words.resize(8);
    CHECK_NOTHROW(recover_key(fk256));
    fk256.words.resize(9);
    CHECK_THROWS_AS(recover_key(fk256), std::invalid_argument);
}
