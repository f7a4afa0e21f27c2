//
// Licensed by "The MIT License". See file LICENSE.
//

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfa/analyzer.hpp"
#include "dfa/campaign_io.hpp"
#include "dfa/fault_injector.hpp"
#include "dfa/key_recovery.hpp"

namespace {

using namespace dfa;

Variant variant_from_flag(const std::string& flag)
{
    if (flag == "128") return Variant::aes128;
    if (flag == "192") return Variant::aes192;
    if (flag == "256") return Variant::aes256;
    throw std::invalid_argument("--variant must be 128, 192 or 256");
}

std::vector<byte> parse_key(const std::string& hex, const std::string& variant_flag)
{
    auto key = parse_hex(hex);
    Variant v = variant_from_key_size(key.size());
    if (!variant_flag.empty() && variant_from_flag(variant_flag) != v)
        throw std::invalid_argument("--variant disagrees with the key length");
    return key;
}

FaultModel parse_model(const std::string& text)
{
    if (text == "random") return FaultModel::replace_random();
    if (text == "stuck00") return FaultModel::stuck_at(0x00);
    if (text == "stuckFF") return FaultModel::stuck_at(0xFF);
    if (text.rfind("xor:", 0) == 0) return FaultModel::xor_byte(parse_hex_byte(text.substr(4)));
    throw std::invalid_argument("--model must be xor:HH, random, stuck00 or stuckFF");
}

FaultLocation location_from_offset(int round_offset)
{
    // offset 1: the window between the last two MixColumns; offset 2: the
    // deep fault ahead of the second-to-last MixColumns
    if (round_offset == 1) return FaultLocation::last_mix_window;
    if (round_offset == 2) return FaultLocation::deep_before_mix;
    throw std::invalid_argument("--round-offset must be 1 or 2");
}

std::optional<int> parse_byte_flag(const std::string& text)
{
    if (text == "random") return std::nullopt;
    int value = std::stoi(text);
    if (value < 0 || value > 15) throw std::invalid_argument("--byte must be 0..15 or random");
    return value;
}

struct InjectArgs {
    std::string key_hex, pt_hex, byte_flag = "random", model_text = "random", variant_flag;
    int round_offset = 1;
    std::uint64_t seed = 0;
    bool with_truth = false;
};

int cmd_encrypt(const std::string& key_hex, const std::string& pt_hex, const std::string& variant_flag)
{
    auto key = parse_key(key_hex, variant_flag);
    std::cout << block_hex(encrypt_block(key, block_from_hex(pt_hex))) << "\n";
    return 0;
}

int cmd_inject(const InjectArgs& args)
{
    auto key = parse_key(args.key_hex, args.variant_flag);
    FaultSpec spec{location_from_offset(args.round_offset), parse_byte_flag(args.byte_flag),
                   parse_model(args.model_text)};
    FaultyRun run = inject(key, block_from_hex(args.pt_hex), spec, args.seed);
    std::cout << to_line(record_from_run(run, args.with_truth)) << "\n";
    return 0;
}

int cmd_campaign(const InjectArgs& args, int count, const std::string& out_path)
{
    auto key = parse_key(args.key_hex, args.variant_flag);
    FaultSpec spec{location_from_offset(args.round_offset), parse_byte_flag(args.byte_flag),
                   parse_model(args.model_text)};
    auto runs = make_campaign(key, count, spec, args.seed);

    std::vector<PairRecord> records;
    records.reserve(runs.size());
    for (const auto& run : runs) records.push_back(record_from_run(run, args.with_truth));

    if (out_path == "-") {
        write_pair_file(std::cout, records, args.seed);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
        write_pair_file(out, records, args.seed);
    }
    return 0;
}

int cmd_attack(const std::string& pairs_path, const std::string& location, const std::string& variant_flag,
               const std::string& report_path)
{
    PairFile file;
    if (pairs_path == "-") {
        file = read_pair_stream(std::cin);
    } else {
        std::ifstream in(pairs_path);
        if (!in) throw std::runtime_error("cannot open " + pairs_path);
        file = read_pair_stream(in);
    }
    if (location != "known" && location != "unknown")
        throw std::invalid_argument("--location must be known or unknown");

    std::vector<AttackPair> pairs;
    pairs.reserve(file.records.size());
    for (const PairRecord& rec : file.records) {
        std::optional<int> known;
        if (rec.truth) known = rec.truth->byte_index;
        pairs.push_back({rec.plaintext, rec.correct_ct, rec.faulty_ct, known});
    }

    Variant variant = variant_flag.empty() ? Variant::aes128 : variant_from_flag(variant_flag);
    AttackResult result =
        run_attack(pairs, location == "known" ? LocationMode::known : LocationMode::unknown, variant);

    std::string text = attack_report_json(result, file.seed).dump(2);
    std::cout << text << "\n";
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw std::runtime_error("cannot open " + report_path + " for writing");
        out << text << "\n";
    }
    return result.converged ? 0 : 2;
}

int cmd_recover_key(const std::string& variant_flag, const std::string& words_hex)
{
    Variant variant = variant_from_flag(variant_flag);
    auto bytes = parse_hex(words_hex);
    if (static_cast<int>(bytes.size()) != key_bytes(variant))
        throw std::invalid_argument("--final-words needs exactly " + std::to_string(key_bytes(variant)) +
                                    " bytes for this variant");
    FinalKeyMaterial fk{variant, {}};
    for (std::size_t i = 0; i < bytes.size(); i += 4)
        fk.words.push_back(Word{bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]});
    std::cout << to_hex(recover_key(fk)) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"AES differential fault analysis toolkit"};
    app.require_subcommand(1);

    std::string key_hex, pt_hex, variant_flag;
    InjectArgs inject_args;
    int count = 10;
    std::string out_path = "-";
    std::string pairs_path, location = "unknown", report_path, final_words;

    auto* encrypt = app.add_subcommand("encrypt", "Encrypt one block");
    encrypt->add_option("--key", key_hex, "key, hex")->required();
    encrypt->add_option("--pt", pt_hex, "plaintext block, hex")->required();
    encrypt->add_option("--variant", variant_flag, "128/192/256, checked against the key length");

    auto* inj = app.add_subcommand("inject", "Encrypt once with a single injected fault");
    inj->add_option("--key", inject_args.key_hex, "key, hex")->required();
    inj->add_option("--pt", inject_args.pt_hex, "plaintext block, hex")->required();
    inj->add_option("--round-offset", inject_args.round_offset,
                    "1: window between the last two MixColumns; 2: deep fault");
    inj->add_option("--byte", inject_args.byte_flag, "state byte index 0..15, or random");
    inj->add_option("--model", inject_args.model_text, "xor:HH | random | stuck00 | stuckFF");
    inj->add_option("--seed", inject_args.seed, "rng seed");
    inj->add_flag("--with-truth", inject_args.with_truth, "append the resolved fault to the record");
    inj->add_option("--variant", inject_args.variant_flag, "128/192/256");

    auto* campaign = app.add_subcommand("campaign", "Generate a pair file of faulted encryptions");
    campaign->add_option("--key", inject_args.key_hex, "key, hex")->required();
    campaign->add_option("--count", count, "number of pairs")->required();
    campaign->add_option("--round-offset", inject_args.round_offset,
                         "1: window between the last two MixColumns; 2: deep fault");
    campaign->add_option("--byte", inject_args.byte_flag, "state byte index 0..15, or random");
    campaign->add_option("--model", inject_args.model_text, "xor:HH | random | stuck00 | stuckFF");
    campaign->add_option("--seed", inject_args.seed, "rng seed");
    campaign->add_flag("--with-truth", inject_args.with_truth, "append resolved faults to the records");
    campaign->add_option("--out", out_path, "output file, - for stdout");
    campaign->add_option("--variant", inject_args.variant_flag, "128/192/256");

    auto* attack = app.add_subcommand("attack", "Recover the last round key from a pair file");
    attack->add_option("--pairs", pairs_path, "pair file, - for stdin")->required();
    attack->add_option("--location", location, "known | unknown");
    attack->add_option("--variant", variant_flag, "128/192/256 (default 128)");
    attack->add_option("--report", report_path, "also write the report to this file");

    auto* recover = app.add_subcommand("recover-key", "Invert the key schedule from its final words");
    recover->add_option("--variant", variant_flag, "128/192/256")->required();
    recover->add_option("--final-words", final_words, "last Nk schedule words, hex")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (encrypt->parsed()) return cmd_encrypt(key_hex, pt_hex, variant_flag);
        if (inj->parsed()) return cmd_inject(inject_args);
        if (campaign->parsed()) return cmd_campaign(inject_args, count, out_path);
        if (attack->parsed()) return cmd_attack(pairs_path, location, variant_flag, report_path);
        if (recover->parsed()) return cmd_recover_key(variant_flag, final_words);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
