#include "lalarpl/batch.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lalarpl/simcore.hpp"

namespace lalarpl {

namespace {

std::string trim(std::string_view s) {
    const auto from = s.find_first_not_of(" \t\r");
    if (from == std::string_view::npos)
        return "";
    const auto to = s.find_last_not_of(" \t\r");
    return std::string(s.substr(from, to - from + 1));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::uint64_t parse_u64(const std::string& token, const std::string& what) {
    if (token.empty() ||
        token.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(what + ": expected a non-negative integer, got '" +
                          token + "'");
    return std::stoull(token);
}

} // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text,
                                           const std::string& what) {
    std::vector<std::uint64_t> seeds;
    const auto range_at = text.find("..");
    if (range_at != std::string::npos) {
        const std::uint64_t lo =
            parse_u64(trim(text.substr(0, range_at)), what);
        const std::uint64_t hi =
            parse_u64(trim(text.substr(range_at + 2)), what);
        if (hi < lo)
            throw ConfigError(what + ": descending seed range " + text);
        for (std::uint64_t s = lo; s <= hi; ++s)
            seeds.push_back(s);
        return seeds;
    }
    for (const auto& token : split_list(text))
        seeds.push_back(parse_u64(token, what));
    return seeds;
}

RunManifest parse_manifest_text(std::string_view text,
                                const std::string& origin,
                                const std::string& base_dir) {
    RunManifest manifest;
    std::vector<std::string> order; // entry names, first appearance
    struct Raw {
        std::string file;
        std::string variants;
        std::string seeds;
    };
    std::map<std::string, Raw> raw;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string_view line_view = text.substr(
            start, nl == std::string_view::npos ? text.size() - start
                                                : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string line = trim(line_view);
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = trim(line.substr(0, hash));
        if (line.empty())
            continue;
        const auto where = origin + ":" + std::to_string(line_no);
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ConfigError(where + ": expected 'key: value'");
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        if (key.empty())
            throw ConfigError(where + ": empty key");
        if (value.empty())
            throw ConfigError(where + ": empty value for '" + key + "'");
        if (key == "output_dir") {
            manifest.output_dir = value;
            continue;
        }
        const auto dot = key.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 >= key.size())
            throw ConfigError(where + ": unknown key '" + key +
                              "' (expected output_dir or <name>.<field>)");
        const std::string name = key.substr(0, dot);
        const std::string field = key.substr(dot + 1);
        if (raw.find(name) == raw.end())
            order.push_back(name);
        Raw& entry = raw[name];
        std::string* slot = nullptr;
        if (field == "file")
            slot = &entry.file;
        else if (field == "variants")
            slot = &entry.variants;
        else if (field == "seeds")
            slot = &entry.seeds;
        else
            throw ConfigError(where + ": unknown field '" + field +
                              "' for scenario '" + name +
                              "' (valid: file, variants, seeds)");
        if (!slot->empty())
            throw ConfigError(where + ": duplicate key '" + key + "'");
        *slot = value;
    }

    if (order.empty())
        throw ConfigError(origin + ": manifest declares no scenarios");

    const std::filesystem::path base(base_dir);
    for (const auto& name : order) {
        const Raw& r = raw[name];
        if (r.file.empty())
            throw ConfigError(origin + ": scenario '" + name +
                              "' is missing '" + name + ".file'");
        if (r.seeds.empty())
            throw ConfigError(origin + ": scenario '" + name +
                              "' is missing '" + name + ".seeds'");
        ManifestEntry entry;
        entry.name = name;
        std::filesystem::path file(r.file);
        entry.file =
            file.is_absolute() ? file.string() : (base / file).string();
        entry.base = parse_scenario(entry.file);
        if (r.variants.empty()) {
            entry.variants = {ProtocolVariant::Lalarpl, ProtocolVariant::Minhop,
                              ProtocolVariant::Random};
        } else {
            for (const auto& token : split_list(r.variants))
                entry.variants.push_back(variant_from_name(token));
        }
        entry.seeds = parse_seed_list(r.seeds, origin + ": " + name + ".seeds");
        if (entry.seeds.empty())
            throw ConfigError(origin + ": scenario '" + name +
                              "' has an empty seed list");
        manifest.entries.push_back(std::move(entry));
    }

    std::filesystem::path out(manifest.output_dir);
    if (!out.is_absolute())
        manifest.output_dir = (base / out).string();
    return manifest;
}

RunManifest parse_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open manifest: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_manifest_text(buffer.str(), path, dir.empty() ? "." : dir);
}

BatchOutcome run_batch(const RunManifest& manifest) {
    BatchOutcome outcome;
    for (const auto& entry : manifest.entries) {
        for (const auto variant : entry.variants) {
            for (const auto seed : entry.seeds) {
                ResultRow row;
                row.scenario = entry.name;
                row.variant = variant_name(variant);
                row.n_nodes = entry.base.n_nodes;
                row.lambda = entry.base.lambda;
                row.seed = seed;
                try {
                    ScenarioConfig cfg = entry.base;
                    cfg.protocol.variant = variant;
                    cfg.seed = seed;
                    row.report = run_scenario(cfg).report;
                    row.ok = true;
                } catch (const std::exception& err) {
                    row.ok = false;
                    row.error = err.what();
                    ++outcome.failures;
                    outcome.failure_messages.push_back(
                        row.scenario + "/" + row.variant + "/seed=" +
                        std::to_string(seed) + ": " + err.what());
                }
                outcome.rows.push_back(std::move(row));
            }
        }
    }
    outcome.results_text = results_csv(outcome.rows);
    outcome.aggregate_text =
        aggregate_csv(parse_results_csv(outcome.results_text));
    return outcome;
}

} // namespace lalarpl
