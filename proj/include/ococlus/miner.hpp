#pragma once

// Greedy order-aware co-cluster mining.
//
// A co-cluster pairs a contiguous element sequence with the exact set of
// trajectories containing it. Candidates are grown one element at a time
// (appended or prepended) starting from the currently most frequent
// elements, accepted while the cost
//
//     F(CC, phi) = (|tids| + |seq|) - |tids| * |seq| + Cov(CC, phi)
//
// does not increase and the maximum overlap coefficient against previously
// accepted co-clusters stays within epsilon. Mining stops after K
// candidates or as soon as the best candidate has F >= 0; the candidate set
// is then pruned against a mean / z-score threshold.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ococlus/core.hpp"

namespace ococlus {

enum class StatMetric { average, zscore };
enum class Relevance { trajectory, cost, both };

std::string to_string(StatMetric m);
std::string to_string(Relevance r);
StatMetric parse_stat_metric(std::string_view s);
Relevance parse_relevance(std::string_view s);

struct MinerConfig {
  std::size_t k = 1;
  double epsilon = 0.2;
  StatMetric stat_metric = StatMetric::zscore;
  double z = 1.0;
  Relevance relevance = Relevance::both;
  bool frequent_only = true;

  /// Throws InputError when k == 0 or epsilon is outside [0, 1].
  void validate() const;
};

struct CoCluster {
  TidSet tids;
  Sequence seq;
  std::int64_t cost_at_insertion = 0;
  double max_overlap_at_acceptance = 0.0;

  bool empty() const { return tids.empty() && seq.empty(); }
  friend bool operator==(const CoCluster&, const CoCluster&) = default;
};

struct Cell {
  TrajectoryId tid;
  ElementId element;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Explicit (trajectory, element) cell set of one or more co-clusters.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::vector<Cell> cells);

  static CellSet of(const CoCluster& cc);
  static CellSet union_of(std::span<const CoCluster> phi);

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t intersection_size(const CellSet& other) const;

 private:
  std::vector<Cell> cells_;  // sorted, unique
};

/// |a ∩ b| / min(|a|, |b|); 0 when either set is empty.
double overlap_coefficient(const CellSet& a, const CellSet& b);

std::size_t cov(const CoCluster& cc, std::span<const CoCluster> phi);
std::int64_t cost(const CoCluster& cc, std::span<const CoCluster> phi);
double max_overlap(const CoCluster& cc, std::span<const CoCluster> phi);

/// The accepted set phi plus the per-element covered-trajectory unions
/// needed to evaluate Cov without materializing cell sets. Results agree
/// exactly with the free functions above.
class Coverage {
 public:
  explicit Coverage(std::size_t n_elements = 0) : covered_(n_elements) {}

  void add(const CoCluster& cc);
  const std::vector<CoCluster>& members() const { return members_; }

  std::size_t cov(const CoCluster& cc) const;
  std::int64_t cost(const CoCluster& cc) const;
  double max_overlap(const CoCluster& cc) const;

 private:
  std::vector<CoCluster> members_;
  std::vector<Sequence> distinct_;  // distinct elements per member
  std::vector<TidSet> covered_;     // element -> union of member tids
};

/// Best of `sequence_cc + [el_q]` and `[el_q] + sequence_cc` by cost against
/// phi; forward wins ties. Extensions with empty support are discarded.
std::optional<CoCluster> candidate_cc(std::span<const ElementId> sequence_cc, ElementId el_q,
                                      const IndexBundle& bundle, const Coverage& phi);

/// Elements of `eligible` ordered by remaining frequency, descending; ties
/// keep interning order.
std::vector<ElementId> element_queue(const IndexBundle& bundle,
                                     std::span<const ElementId> eligible);

/// Elements whose occurrence count is at least the mean over all elements.
std::vector<ElementId> frequent_elements(const IndexBundle& bundle);

/// One pass of the candidate search over a rotating queue (`queue` must be
/// ordered, see element_queue). Returns the first non-empty candidate.
std::optional<CoCluster> find_candidate(const IndexBundle& bundle, const Coverage& phi,
                                        double epsilon, std::vector<ElementId> queue);

/// Subtracts occurrences(e, seq) * |tids| from every element of cc.seq.
void update_frequencies(IndexBundle& bundle, const CoCluster& cc);

/// Keeps the co-clusters whose relevance passes the configured threshold.
/// Order is preserved.
std::vector<CoCluster> prune(std::span<const CoCluster> phi, const MinerConfig& config);

enum class StopReason { non_negative_cost, no_candidate, budget_exhausted };
std::string to_string(StopReason r);

struct IterationTrace {
  std::size_t iteration = 0;
  std::optional<CoCluster> candidate;
  std::int64_t cost = 0;
  double max_overlap = 0.0;
  bool accepted = false;
};

struct RunTrace {
  std::vector<IterationTrace> iterations;
  std::size_t queue_size = 0;
  std::size_t n_candidates = 0;  // |phi| before pruning
  StopReason stop = StopReason::budget_exhausted;
};

struct MineResult {
  std::vector<CoCluster> coclusters;
  RunTrace trace;
};

MineResult mine(const Dataset& dataset, const MinerConfig& config);

}  // namespace ococlus
