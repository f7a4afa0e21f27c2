//
// Licensed by "The MIT License". See file LICENSE.
//

#ifndef DFA_KEY_RECOVERY_HPP
#define DFA_KEY_RECOVERY_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dfa/aes.hpp"

namespace dfa {

// The last Nk words of an expanded schedule: the whole of K_Nr for
// AES-128, parts of the last two round keys for the longer variants.
struct FinalKeyMaterial {
    Variant variant{};
    std::vector<Word> words;
};

// Walks the expansion recurrence backwards from the final words to the
// cipher key.  This is the exact inverse of expand_key's loop, so
// expand_key(result) reproduces the supplied words.
inline std::vector<byte> recover_key(const FinalKeyMaterial& fk)
{
    const int nk = key_words(fk.variant);
    const int total = 4 * (rounds(fk.variant) + 1);
    if (static_cast<int>(fk.words.size()) != nk)
        throw std::invalid_argument("recover_key: variant needs exactly " + std::to_string(nk) + " words");

    std::vector<Word> w(total);
    for (int i = 0; i < nk; ++i) w[total - nk + i] = fk.words[i];

    for (int i = total - 1; i >= nk; --i) {
        Word temp = w[i - 1];
        if (i % nk == 0) {
            temp = detail::sub_word(detail::rot_word(temp));
            temp[0] ^= detail::rcon(i / nk);
        } else if (nk > 6 && i % nk == 4) {
            temp = detail::sub_word(temp);
        }
        Word& out = w[i - nk];
        const Word& cur = w[i];
        for (int j = 0; j < 4; ++j) out[j] = static_cast<byte>(cur[j] ^ temp[j]);
    }

    std::vector<byte> key;
    key.reserve(4 * nk);
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j < 4; ++j) key.push_back(w[i][j]);
    return key;
}

} // namespace dfa

#endif // DFA_KEY_RECOVERY_HPP
