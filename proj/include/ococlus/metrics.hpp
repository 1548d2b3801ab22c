#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "ococlus/core.hpp"
#include "ococlus/miner.hpp"

namespace ococlus {

/// Summary statistics of a finished co-clustering. Means are absent for an
/// empty result; user statistics are absent when the corpus has no users.
struct ResultReport {
  std::size_t n_coclusters = 0;
  std::optional<double> avg_trajectories;
  std::optional<double> avg_cost;
  std::size_t n_unique_elements = 0;
  std::optional<double> avg_seq_length;
  std::optional<double> avg_users;
  double overall_entropy = 0.0;  // bits
  /// |stddev / mean| * 100 keyed by trajectories, cost, seq_length, users.
  std::map<std::string, double> cv;

  friend bool operator==(const ResultReport&, const ResultReport&) = default;
};

/// Shannon entropy (base 2) of the trajectory mass |tids_c| / sum |tids|.
double overall_entropy(std::span<const CoCluster> results);

ResultReport report(std::span<const CoCluster> results, const Dataset& dataset);

}  // namespace ococlus
