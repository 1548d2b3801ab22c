#include "ococlus/core.hpp"

#include <algorithm>

namespace ococlus {

std::optional<ElementId> Dataset::find_element(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<TrajectoryId> Dataset::find_trajectory(std::string_view key) const {
  auto it = keys_.find(std::string(key));
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

Dataset intern_corpus(std::span<const RawTrajectory> raw) {
  if (raw.empty()) throw InputError("empty corpus");

  Dataset ds;
  ds.trajectories_.reserve(raw.size());
  std::unordered_map<std::string, bool> users;

  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawTrajectory& r = raw[i];
    const auto tid = static_cast<TrajectoryId>(i);
    std::string key = r.key.value_or(std::to_string(i));
    if (r.elements.empty()) {
      throw InputError("trajectory '" + key + "' (record " + std::to_string(i) +
                       ") has zero elements");
    }
    if (!ds.keys_.emplace(key, tid).second) {
      throw InputError("duplicate trajectory key '" + key + "' (record " + std::to_string(i) +
                       ")");
    }

    Trajectory t;
    t.tid = tid;
    t.key = std::move(key);
    t.user = r.user;
    if (t.user) users.emplace(*t.user, true);
    t.elements.reserve(r.elements.size());
    for (const std::string& name : r.elements) {
      auto [it, inserted] = ds.ids_.emplace(name, static_cast<ElementId>(ds.names_.size()));
      if (inserted) ds.names_.push_back(name);
      t.elements.push_back(it->second);
    }
    ds.trajectories_.push_back(std::move(t));
  }
  ds.n_users_ = users.size();
  return ds;
}

IndexBundle::IndexBundle(const Dataset& dataset)
    : dataset_(&dataset), postings_(dataset.n_elements()), freq_(dataset.n_elements(), 0) {
  for (const Trajectory& t : dataset.trajectories()) {
    for (ElementId e : t.elements) {
      ++freq_[e];
      // tids are visited in ascending order, so a back() check dedups.
      TidSet& p = postings_[e];
      if (p.empty() || p.back() != t.tid) p.push_back(t.tid);
    }
  }
}

const TidSet& IndexBundle::postings(ElementId e) const {
  static const TidSet kEmpty;
  return e < postings_.size() ? postings_[e] : kEmpty;
}

void IndexBundle::decrement(ElementId e, std::uint64_t amount) {
  std::uint64_t& f = freq_.at(e);
  f = amount >= f ? 0 : f - amount;
}

IndexBundle initialize_data(const Dataset& dataset) { return IndexBundle(dataset); }

bool contains_contiguous(std::span<const ElementId> haystack, std::span<const ElementId> needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

std::size_t intersection_size(std::span<const TrajectoryId> a, std::span<const TrajectoryId> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

Sequence distinct_elements(std::span<const ElementId> seq) {
  Sequence out(seq.begin(), seq.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TidSet support_of_contiguous(std::span<const ElementId> seq, const IndexBundle& bundle) {
  if (seq.empty()) return {};
  Sequence elems = distinct_elements(seq);
  if (elems.back() >= bundle.n_elements()) return {};

  // Intersect smallest posting list first.
  std::sort(elems.begin(), elems.end(), [&](ElementId a, ElementId b) {
    return bundle.postings(a).size() < bundle.postings(b).size();
  });
  TidSet candidates = bundle.postings(elems.front());
  TidSet scratch;
  for (std::size_t i = 1; i < elems.size() && !candidates.empty(); ++i) {
    const TidSet& p = bundle.postings(elems[i]);
    scratch.clear();
    std::set_intersection(candidates.begin(), candidates.end(), p.begin(), p.end(),
                          std::back_inserter(scratch));
    candidates.swap(scratch);
  }

  std::erase_if(candidates,
                [&](TrajectoryId tid) { return !contains_contiguous(bundle.sequence(tid), seq); });
  return candidates;
}

}  // namespace ococlus
