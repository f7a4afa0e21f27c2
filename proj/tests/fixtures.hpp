//
// Licensed by "The MIT License". See file LICENSE.
//

#ifndef DFA_TESTS_FIXTURES_HPP
#define DFA_TESTS_FIXTURES_HPP

#include <array>
#include <cstdint>

namespace fixtures {

// FIPS-197 Appendix B example cipher, also the base of the worked
// single-fault example used across these suites.
inline constexpr const char* kFipsKey128 = "2B7E151628AED2A6ABF7158809CF4F3C";
inline constexpr const char* kFipsPlain = "3243F6A8885A308D313198A2E0370734";
inline constexpr const char* kFipsCipher = "3925841D02DC09FBDC118597196A0B32";
inline constexpr const char* kFipsRoundKey9 = "AC7766F319FADC2128D12941575C006E";
inline constexpr const char* kFipsRoundKey10 = "D014F9A8C9EE2589E13F0CC8B6630CA6";

// XOR fault of '1E' into state byte 0 after the round-9 ShiftRows of the
// example cipher.
inline constexpr std::uint8_t kDemoFaultValue = 0x1E;
inline constexpr const char* kDemoFaultyCipher = "DE25841D02DC0962DC11C297193B0B32";
inline constexpr std::array<int, 4> kDemoDiffSupport = {0, 7, 10, 13};
inline constexpr std::array<std::uint8_t, 4> kDemoDiffValues = {0xE7, 0x99, 0x47, 0x51}; // at positions above

// Intersection of the four per-slot fault sets of the demo differential.
inline constexpr std::array<std::uint8_t, 31> kDemoCommittedFaultSet = {
    0x01, 0x04, 0x13, 0x1E, 0x21, 0x27, 0x33, 0x3B, 0x48, 0x4D, 0x50, 0x53, 0x55, 0x5D, 0x64, 0x65,
    0x7E, 0x7F, 0x80, 0x83, 0x8D, 0x8F, 0x93, 0xA7, 0xA8, 0xA9, 0xAB, 0xB3, 0xB8, 0xC9, 0xF6};

// Candidates for the first byte of the last round key after the demo pair.
inline constexpr std::array<std::uint8_t, 62> kDemoKeyByte0Candidates = {
    0x03, 0x06, 0x09, 0x0C, 0x10, 0x15, 0x1A, 0x1F, 0x21, 0x24, 0x2B, 0x2E, 0x32, 0x37, 0x38, 0x3D,
    0x43, 0x46, 0x49, 0x4C, 0x50, 0x55, 0x5F, 0x61, 0x64, 0x6B, 0x6E, 0x72, 0x77, 0x78, 0x7D, 0x83,
    0x86, 0x89, 0x8C, 0x90, 0x95, 0x9A, 0x9F, 0xA1, 0xA4, 0xAB, 0xAE, 0xB2, 0xB7, 0xB8, 0xC3, 0xC6,
    0xC9, 0xCC, 0xD0, 0xD5, 0xDA, 0xDF, 0xE1, 0xE4, 0xEB, 0xEE, 0xF2, 0xF7, 0xF8, 0xFD};

// Five faults at the demo position that drive the touched candidate sets
// down to singletons.
inline constexpr std::array<std::uint8_t, 5> kDemoFiveFaults = {0x1E, 0xE1, 0xB3, 0x16, 0x9E};
inline constexpr std::array<std::pair<int, std::uint8_t>, 4> kDemoFiveFaultSingletons = {{
    {0, 0xD0}, {7, 0x89}, {10, 0x0C}, {13, 0x63}}};

// FIPS-197 Appendix C known-answer vectors.
inline constexpr const char* kKatPlain = "00112233445566778899AABBCCDDEEFF";
inline constexpr const char* kKatKey128 = "000102030405060708090A0B0C0D0E0F";
inline constexpr const char* kKatCipher128 = "69C4E0D86A7B0430D8CDB78070B4C55A";
inline constexpr const char* kKatKey192 = "000102030405060708090A0B0C0D0E0F1011121314151617";
inline constexpr const char* kKatCipher192 = "DDA97CA4864CDFE06EAF70A0EC0D7191";
inline constexpr const char* kKatKey256 = "000102030405060708090A0B0C0D0E0F101112131415161718191A1B1C1D1E1F";
inline constexpr const char* kKatCipher256 = "8EA2B7CA516745BFEAFC49904B496089";

} // namespace fixtures

#endif // DFA_TESTS_FIXTURES_HPP
