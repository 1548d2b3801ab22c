#pragma once

// Corpus loaders and result writers.
//
// csv_long: header row required; columns `tid`, `order`, the element column
// (default `element`) and optionally `user`. One row per element; rows of a
// trajectory may appear in any order, the integer `order` column sorts them.
//
// jsonl: one object per line, {"id": str, "user": str|null, "elements": [str]}.
// The element array field can be renamed through the dimension argument.
//
// Every output file is written to a temporary sibling and renamed into place.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ococlus/core.hpp"
#include "ococlus/metrics.hpp"
#include "ococlus/miner.hpp"

namespace ococlus {

enum class CorpusFormat { csv_long, jsonl };

/// Accepts "csv", "csv_long" and "jsonl".
CorpusFormat parse_corpus_format(std::string_view s);
/// `.csv` maps to csv_long, anything else to jsonl.
CorpusFormat format_for_path(const std::filesystem::path& path);

/// Empty dimension selects the format default (`element` / `elements`).
/// Errors are InputError and carry `source:line`.
Dataset load_corpus(const std::filesystem::path& path, CorpusFormat format,
                    std::string_view dimension = {});
Dataset parse_csv_corpus(std::istream& in, std::string_view dimension = {},
                         std::string_view source = "<csv>");
Dataset parse_jsonl_corpus(std::istream& in, std::string_view dimension = {},
                           std::string_view source = "<jsonl>");

/// RFC 4180 field splitting for one physical line (no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

std::string jsonl_corpus(std::span<const RawTrajectory> raw);

std::string coclusters_document(std::span<const CoCluster> results, const Dataset& dataset);
/// Inverse of coclusters_document. Throws InputError when the document names
/// trajectories or elements the dataset does not contain.
std::vector<CoCluster> parse_coclusters_document(std::string_view text, const Dataset& dataset);

std::string alluvial_csv(std::span<const CoCluster> results, const Dataset& dataset);
std::string metrics_document(const ResultReport& report);

void write_coclusters(std::span<const CoCluster> results, const Dataset& dataset,
                      const std::filesystem::path& path);
std::vector<CoCluster> read_coclusters(const std::filesystem::path& path, const Dataset& dataset);
void write_alluvial_flows(std::span<const CoCluster> results, const Dataset& dataset,
                          const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
/// Writes to `<path>.tmp` and renames. Throws std::runtime_error on failure.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ococlus
