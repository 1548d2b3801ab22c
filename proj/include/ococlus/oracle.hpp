#pragma once

// Reference implementations that share no code path with the miner's
// indexes: an exhaustive contiguous-subsequence enumerator and a seeded
// corpus generator with planted ground truth.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ococlus/core.hpp"

namespace ococlus::oracle {

/// Every contiguous run of length <= max_len in the corpus, with the set of
/// trajectories containing it. Plain sliding-window scan.
std::map<Sequence, TidSet> enumerate_contiguous(const Dataset& dataset, std::size_t max_len);

enum class PlantPosition { start, random, end };

PlantPosition parse_plant_position(std::string_view s);
std::string to_string(PlantPosition p);

struct PlantSpec {
  std::vector<std::string> pattern;
  std::size_t n_carriers = 1;
  PlantPosition position = PlantPosition::random;
};

struct GeneratorSpec {
  std::uint64_t seed = 0;
  std::size_t n_trajectories = 0;
  /// Total distinct elements, plant elements included. Noise is drawn from
  /// the remaining alphabet only.
  std::size_t alphabet_size = 0;
  std::size_t len_min = 1;
  std::size_t len_max = 1;
  std::vector<PlantSpec> plants;
  /// 0 draws noise uniformly; s > 0 draws rank r with weight 1 / (r + 1)^s.
  double zipf_exponent = 0.0;
  /// When set, trajectory i belongs to user "u<i mod n_users>".
  std::optional<std::size_t> n_users;
};

struct PlantTruth {
  std::vector<std::string> pattern;
  TidSet carriers;
};

struct GeneratedCorpus {
  std::vector<RawTrajectory> raw;
  Dataset dataset;
  std::vector<PlantTruth> truth;
};

/// Deterministic in `spec`. Throws InputError for infeasible specs.
///
/// Each trajectory draws a target length in [len_min, len_max] and is filled
/// with noise around the plants it carries. A trajectory carrying several
/// plants is stretched to fit them, so it can exceed len_max.
GeneratedCorpus generate_corpus(const GeneratorSpec& spec);

}  // namespace ococlus::oracle
