//
// Licensed by "The MIT License". See file LICENSE.
//

#ifndef DFA_CAMPAIGN_IO_HPP
#define DFA_CAMPAIGN_IO_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dfa/aes.hpp"
#include "dfa/analyzer.hpp"
#include "dfa/fault_injector.hpp"

namespace dfa {

// One campaign line: "PLAINTEXT CORRECT FAULTY [truth=...]", uppercase hex,
// single spaces, streamable and diffable.
struct PairRecord {
    Block plaintext{};
    Block correct_ct{};
    Block faulty_ct{};
    std::optional<ResolvedFault> truth;
};

inline PairRecord record_from_run(const FaultyRun& run, bool with_truth)
{
    PairRecord rec{run.plaintext, run.correct_ciphertext, run.faulty_ciphertext, std::nullopt};
    if (with_truth) rec.truth = run.truth;
    return rec;
}

namespace detail {

inline std::string model_kind_name(FaultModel::Kind kind)
{
    switch (kind) {
    case FaultModel::Kind::xor_byte: return "xor";
    case FaultModel::Kind::replace_random: return "replace";
    case FaultModel::Kind::stuck_at: return "stuck";
    }
    return "?";
}

inline FaultModel::Kind model_kind_from_name(std::string_view name)
{
    if (name == "xor") return FaultModel::Kind::xor_byte;
    if (name == "replace") return FaultModel::Kind::replace_random;
    if (name == "stuck") return FaultModel::Kind::stuck_at;
    throw std::invalid_argument("unknown fault model name: " + std::string(name));
}

} // namespace detail

inline std::string to_line(const PairRecord& rec)
{
    std::string line = block_hex(rec.plaintext) + " " + block_hex(rec.correct_ct) + " " + block_hex(rec.faulty_ct);
    if (rec.truth) {
        const ResolvedFault& t = *rec.truth;
        line += " truth=round:" + std::to_string(t.round) + ",step:" + step_name(t.step) +
                ",byte:" + std::to_string(t.byte_index) + ",model:" + detail::model_kind_name(t.kind) +
                ",value:" + to_hex({&t.value, 1});
    }
    return line;
}

inline PairRecord parse_pair_line(std::string_view line)
{
    std::istringstream in{std::string(line)};
    std::string pt, ct, ft, extra;
    if (!(in >> pt >> ct >> ft)) throw std::invalid_argument("pair line needs three hex blocks");

    PairRecord rec;
    rec.plaintext = block_from_hex(pt);
    rec.correct_ct = block_from_hex(ct);
    rec.faulty_ct = block_from_hex(ft);
    if (rec.correct_ct == rec.faulty_ct) throw std::invalid_argument("pair line: ciphertexts are identical");

    if (in >> extra) {
        constexpr std::string_view prefix = "truth=";
        if (extra.rfind(prefix, 0) != 0) throw std::invalid_argument("unexpected trailing field: " + extra);
        ResolvedFault t{};
        bool have_round = false, have_step = false, have_byte = false, have_model = false, have_value = false;
        std::istringstream fields{extra.substr(prefix.size())};
        std::string item;
        while (std::getline(fields, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("malformed truth item: " + item);
            std::string key = item.substr(0, colon);
            std::string value = item.substr(colon + 1);
            if (key == "round") { t.round = std::stoi(value); have_round = true; }
            else if (key == "step") { t.step = step_from_name(value); have_step = true; }
            else if (key == "byte") { t.byte_index = std::stoi(value); have_byte = true; }
            else if (key == "model") { t.kind = detail::model_kind_from_name(value); have_model = true; }
            else if (key == "value") { t.value = parse_hex_byte(value); have_value = true; }
            else throw std::invalid_argument("unknown truth key: " + key);
        }
        if (!(have_round && have_step && have_byte && have_model && have_value))
            throw std::invalid_argument("incomplete truth field: " + extra);
        rec.truth = t;
    }
    return rec;
}

struct PairFile {
    std::vector<PairRecord> records;
    std::optional<std::uint64_t> seed; // from a "# seed=N" header comment, when present
};

inline PairFile read_pair_stream(std::istream& in)
{
    PairFile file;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("seed=");
            if (pos != std::string::npos && !file.seed)
                file.seed = std::stoull(line.substr(pos + 5));
            continue;
        }
        try {
            file.records.push_back(parse_pair_line(line));
        } catch (const std::exception& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return file;
}

inline void write_pair_file(std::ostream& out, const std::vector<PairRecord>& records,
                            std::optional<std::uint64_t> seed)
{
    if (seed) out << "# seed=" << *seed << "\n";
    for (const PairRecord& rec : records) out << to_line(rec) << "\n";
}

// The attack report: one JSON document on standard output.
inline nlohmann::json attack_report_json(const AttackResult& result, std::optional<std::uint64_t> seed)
{
    nlohmann::json per_byte = nlohmann::json::array();
    for (const ByteAudit& audit : result.per_byte) {
        nlohmann::json entry{{"candidate_count", audit.candidate_count}};
        if (audit.value) entry["value"] = to_hex({&*audit.value, 1});
        if (audit.pairs_to_converge) entry["pairs_to_converge"] = *audit.pairs_to_converge;
        per_byte.push_back(std::move(entry));
    }

    nlohmann::json report{
        {"status", result.converged ? "converged" : "partial"},
        {"per_byte", std::move(per_byte)},
        {"pairs_used", result.pairs_used},
        {"pairs_skipped", result.pairs_skipped},
    };
    if (result.last_round_key) report["k_last_round_hex"] = block_hex(*result.last_round_key);
    if (result.cipher_key) {
        report["cipher_key_hex"] = to_hex(*result.cipher_key);
        report["cipher_key_verified"] = result.cipher_key_verified;
    }
    if (seed) report["seed"] = *seed;
    if (!result.skip_log.empty()) report["skipped"] = result.skip_log;
    return report;
}

} // namespace dfa

#endif // DFA_CAMPAIGN_IO_HPP
