#pragma once

// Domain types for semantic trajectory corpora and the inverted indexes the
// miner runs on.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ococlus {

using ElementId = std::uint32_t;
using TrajectoryId = std::uint32_t;

/// Sorted, duplicate-free set of trajectory ids.
using TidSet = std::vector<TrajectoryId>;
using Sequence = std::vector<ElementId>;

/// Raised for malformed user input: bad corpora, bad configs, bad documents.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Trajectory {
  TrajectoryId tid = 0;
  std::string key;
  std::optional<std::string> user;
  Sequence elements;
};

/// One trajectory before interning. `key` defaults to the decimal tid.
struct RawTrajectory {
  std::optional<std::string> key;
  std::optional<std::string> user;
  std::vector<std::string> elements;
};

/// Immutable interned corpus. Trajectory ids are dense in input order,
/// element ids dense in order of first appearance.
class Dataset {
 public:
  Dataset() = default;

  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  const Trajectory& trajectory(TrajectoryId tid) const { return trajectories_.at(tid); }
  std::size_t size() const { return trajectories_.size(); }
  std::size_t n_elements() const { return names_.size(); }

  const std::string& element_name(ElementId id) const { return names_.at(id); }
  const std::vector<std::string>& element_names() const { return names_; }
  std::optional<ElementId> find_element(std::string_view name) const;
  std::optional<TrajectoryId> find_trajectory(std::string_view key) const;

  /// True when at least one trajectory carries a user label.
  bool has_users() const { return n_users_ > 0; }
  std::size_t n_users() const { return n_users_; }

 private:
  friend Dataset intern_corpus(std::span<const RawTrajectory> raw);

  std::vector<Trajectory> trajectories_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, ElementId> ids_;
  std::unordered_map<std::string, TrajectoryId> keys_;
  std::size_t n_users_ = 0;
};

/// Interns raw element strings. Throws InputError on an empty corpus, an
/// empty trajectory or a duplicate trajectory key.
Dataset intern_corpus(std::span<const RawTrajectory> raw);

/// EM (element -> posting list), TM (trajectory -> sequence) and the
/// remaining-frequency table. TM aliases the Dataset, which must outlive the
/// bundle.
class IndexBundle {
 public:
  explicit IndexBundle(const Dataset& dataset);

  const Dataset& dataset() const { return *dataset_; }
  std::size_t n_elements() const { return postings_.size(); }
  std::size_t n_trajectories() const { return dataset_->size(); }

  /// Empty for unknown ids.
  const TidSet& postings(ElementId e) const;
  std::span<const ElementId> sequence(TrajectoryId tid) const {
    return dataset_->trajectory(tid).elements;
  }

  std::uint64_t frequency(ElementId e) const { return freq_.at(e); }
  const std::vector<std::uint64_t>& frequencies() const { return freq_; }

  /// Saturating decrement of the remaining frequency of `e`.
  void decrement(ElementId e, std::uint64_t amount);

 private:
  const Dataset* dataset_;
  std::vector<TidSet> postings_;
  std::vector<std::uint64_t> freq_;
};

IndexBundle initialize_data(const Dataset& dataset);

/// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_contiguous(std::span<const ElementId> haystack, std::span<const ElementId> needle);

/// Trajectories containing `seq` as a contiguous, order-preserving run.
/// Posting lists of the distinct elements are intersected first and the
/// survivors are verified against their sequences.
TidSet support_of_contiguous(std::span<const ElementId> seq, const IndexBundle& bundle);

/// |a ∩ b| for two sorted sets.
std::size_t intersection_size(std::span<const TrajectoryId> a, std::span<const TrajectoryId> b);

/// Distinct elements of `seq`, sorted ascending.
Sequence distinct_elements(std::span<const ElementId> seq);

}  // namespace ococlus
