#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lalarpl/scenario.hpp"
#include "lalarpl/serialize.hpp"

namespace lalarpl {

// One manifest entry: a named scenario swept over variants and seeds.
struct ManifestEntry {
    std::string name;
    std::string file; // resolved relative to the manifest location
    ScenarioConfig base;
    std::vector<ProtocolVariant> variants;
    std::vector<std::uint64_t> seeds;
};

struct RunManifest {
    std::string output_dir = "out"; // resolved relative to the manifest
    std::vector<ManifestEntry> entries;
};

// Flat "key: value" manifest, '#' comments:
//   output_dir: results
//   dense.file: scenarios/dense.cfg
//   dense.variants: lalarpl,minhop,random   (default: all three)
//   dense.seeds: 1..10                      (or comma list; required)
// Scenario names must be unique; every entry needs a file and seeds.
RunManifest parse_manifest(const std::string& path);
RunManifest parse_manifest_text(std::string_view text,
                                const std::string& origin,
                                const std::string& base_dir);

// Seed list grammar: "1,2,3" or an inclusive range "1..10".
std::vector<std::uint64_t> parse_seed_list(const std::string& text,
                                           const std::string& what);

struct BatchOutcome {
    std::vector<ResultRow> rows; // entry-major, then variant, then seed
    std::string results_text;    // results.csv contents
    std::string aggregate_text;  // aggregate.csv contents
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;
};

// Runs the full grid. A failing run (e.g. unreachable topology under uniform
// placement) is recorded as a failed row and the sweep continues. The
// aggregate is recomputed from the serialized results text so the two files
// are consistent to the byte.
BatchOutcome run_batch(const RunManifest& manifest);

} // namespace lalarpl
