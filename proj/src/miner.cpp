#include "ococlus/miner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace ococlus {

std::string to_string(StatMetric m) { return m == StatMetric::average ? "average" : "zscore"; }

std::string to_string(Relevance r) {
  switch (r) {
    case Relevance::trajectory:
      return "trajectory";
    case Relevance::cost:
      return "cost";
    case Relevance::both:
      return "both";
  }
  return "both";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::non_negative_cost:
      return "non_negative_cost";
    case StopReason::no_candidate:
      return "no_candidate";
    case StopReason::budget_exhausted:
      return "budget_exhausted";
  }
  return "budget_exhausted";
}

StatMetric parse_stat_metric(std::string_view s) {
  if (s == "average") return StatMetric::average;
  if (s == "zscore") return StatMetric::zscore;
  throw InputError("unknown statistical metric '" + std::string(s) + "' (average|zscore)");
}

Relevance parse_relevance(std::string_view s) {
  if (s == "trajectory") return Relevance::trajectory;
  if (s == "cost") return Relevance::cost;
  if (s == "both") return Relevance::both;
  throw InputError("unknown relevance reference '" + std::string(s) + "' (trajectory|cost|both)");
}

void MinerConfig::validate() const {
  if (k == 0) throw InputError("k must be at least 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InputError("epsilon must be in [0, 1], got " + std::to_string(epsilon));
  }
  if (!std::isfinite(z)) throw InputError("z must be finite");
}

// ---------------------------------------------------------------------------
// Cell sets and the cost function

CellSet::CellSet(std::vector<Cell> cells) : cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

CellSet CellSet::of(const CoCluster& cc) {
  std::vector<Cell> cells;
  const Sequence elems = distinct_elements(cc.seq);
  cells.reserve(cc.tids.size() * elems.size());
  for (TrajectoryId t : cc.tids) {
    for (ElementId e : elems) cells.push_back({t, e});
  }
  return CellSet(std::move(cells));
}

CellSet CellSet::union_of(std::span<const CoCluster> phi) {
  std::vector<Cell> cells;
  for (const CoCluster& c : phi) {
    const CellSet s = of(c);
    cells.insert(cells.end(), s.cells_.begin(), s.cells_.end());
  }
  return CellSet(std::move(cells));
}

std::size_t CellSet::intersection_size(const CellSet& other) const {
  std::size_t n = 0;
  auto i = cells_.begin();
  auto j = other.cells_.begin();
  while (i != cells_.end() && j != other.cells_.end()) {
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

double overlap_coefficient(const CellSet& a, const CellSet& b) {
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t smaller = std::min(a.size(), b.size());
  return static_cast<double>(a.intersection_size(b)) / static_cast<double>(smaller);
}

namespace {

std::int64_t perimeter_minus_area(std::size_t n_tids, std::size_t seq_len) {
  const auto t = static_cast<std::int64_t>(n_tids);
  const auto s = static_cast<std::int64_t>(seq_len);
  return (t + s) - t * s;
}

}  // namespace

std::size_t cov(const CoCluster& cc, std::span<const CoCluster> phi) {
  if (phi.empty()) return 0;
  return CellSet::of(cc).intersection_size(CellSet::union_of(phi));
}

std::int64_t cost(const CoCluster& cc, std::span<const CoCluster> phi) {
  return perimeter_minus_area(cc.tids.size(), cc.seq.size()) +
         static_cast<std::int64_t>(cov(cc, phi));
}

double max_overlap(const CoCluster& cc, std::span<const CoCluster> phi) {
  const CellSet mine = CellSet::of(cc);
  double best = 0.0;
  for (const CoCluster& c : phi) best = std::max(best, overlap_coefficient(mine, CellSet::of(c)));
  return best;
}

// ---------------------------------------------------------------------------
// Coverage

void Coverage::add(const CoCluster& cc) {
  Sequence elems = distinct_elements(cc.seq);
  for (ElementId e : elems) {
    if (e >= covered_.size()) covered_.resize(e + 1);
    TidSet merged;
    merged.reserve(covered_[e].size() + cc.tids.size());
    std::set_union(covered_[e].begin(), covered_[e].end(), cc.tids.begin(), cc.tids.end(),
                   std::back_inserter(merged));
    covered_[e].swap(merged);
  }
  members_.push_back(cc);
  distinct_.push_back(std::move(elems));
}

std::size_t Coverage::cov(const CoCluster& cc) const {
  if (members_.empty()) return 0;
  std::size_t n = 0;
  for (ElementId e : distinct_elements(cc.seq)) {
    if (e < covered_.size()) n += intersection_size(cc.tids, covered_[e]);
  }
  return n;
}

std::int64_t Coverage::cost(const CoCluster& cc) const {
  return perimeter_minus_area(cc.tids.size(), cc.seq.size()) +
         static_cast<std::int64_t>(cov(cc));
}

double Coverage::max_overlap(const CoCluster& cc) const {
  // cells(A) ∩ cells(B) = (tids_A ∩ tids_B) x (elems_A ∩ elems_B)
  const Sequence elems = distinct_elements(cc.seq);
  const std::size_t own = cc.tids.size() * elems.size();
  if (own == 0) return 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const std::size_t other = members_[i].tids.size() * distinct_[i].size();
    if (other == 0) continue;
    const std::size_t shared_tids = intersection_size(cc.tids, members_[i].tids);
    if (shared_tids == 0) continue;
    std::size_t shared_elems = 0;
    auto a = elems.begin();
    auto b = distinct_[i].begin();
    while (a != elems.end() && b != distinct_[i].end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++shared_elems;
        ++a;
        ++b;
      }
    }
    const double oc = static_cast<double>(shared_tids * shared_elems) /
                      static_cast<double>(std::min(own, other));
    best = std::max(best, oc);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Candidate search

std::optional<CoCluster> candidate_cc(std::span<const ElementId> sequence_cc, ElementId el_q,
                                      const IndexBundle& bundle, const Coverage& phi) {
  Sequence fwd(sequence_cc.begin(), sequence_cc.end());
  fwd.push_back(el_q);
  Sequence bwd;
  bwd.reserve(fwd.size());
  bwd.push_back(el_q);
  bwd.insert(bwd.end(), sequence_cc.begin(), sequence_cc.end());

  std::optional<CoCluster> best;
  std::int64_t best_cost = 0;
  for (Sequence* seq : {&fwd, &bwd}) {
    TidSet support = support_of_contiguous(*seq, bundle);
    if (support.empty()) continue;
    CoCluster cc{std::move(support), std::move(*seq), 0, 0.0};
    const std::int64_t c = phi.cost(cc);
    if (!best || c < best_cost) {
      cc.cost_at_insertion = c;
      best = std::move(cc);
      best_cost = c;
    }
  }
  return best;
}

std::vector<ElementId> element_queue(const IndexBundle& bundle,
                                     std::span<const ElementId> eligible) {
  std::vector<ElementId> q(eligible.begin(), eligible.end());
  std::stable_sort(q.begin(), q.end(), [&](ElementId a, ElementId b) {
    const auto fa = bundle.frequency(a);
    const auto fb = bundle.frequency(b);
    return fa != fb ? fa > fb : a < b;
  });
  return q;
}

std::vector<ElementId> frequent_elements(const IndexBundle& bundle) {
  const auto& f = bundle.frequencies();
  const std::uint64_t total = std::accumulate(f.begin(), f.end(), std::uint64_t{0});
  const std::uint64_t n = f.size();
  std::vector<ElementId> out;
  for (ElementId e = 0; e < f.size(); ++e) {
    if (f[e] * n >= total) out.push_back(e);  // f[e] >= total / n
  }
  return out;
}

std::optional<CoCluster> find_candidate(const IndexBundle& bundle, const Coverage& phi,
                                        double epsilon, std::vector<ElementId> queue) {
  std::deque<ElementId> q(queue.begin(), queue.end());
  const std::size_t n_seeds = q.size();

  for (std::size_t i = 0; i < n_seeds; ++i) {
    const ElementId el_p = q.front();
    q.pop_front();
    q.push_back(el_p);

    Sequence sequence_cc{el_p};
    std::optional<CoCluster> cc;
    std::int64_t cc_cost = 0;  // cost of the empty co-cluster
    std::size_t to_test = q.size();

    while (to_test > 0) {
      const ElementId el_q = q.front();
      q.pop_front();
      q.push_back(el_q);

      std::optional<CoCluster> star = candidate_cc(sequence_cc, el_q, bundle, phi);
      if (star && star->cost_at_insertion <= cc_cost) {
        const double oc = phi.max_overlap(*star);
        if (oc <= epsilon) {
          star->max_overlap_at_acceptance = oc;
          cc_cost = star->cost_at_insertion;
          sequence_cc = star->seq;
          cc = std::move(star);
          to_test = q.size();
          continue;
        }
      }
      --to_test;
    }

    // Without an accepted extension q has rotated exactly once, so the next
    // seed is the next element in frequency order.
    if (cc) return cc;
  }
  return std::nullopt;
}

void update_frequencies(IndexBundle& bundle, const CoCluster& cc) {
  const std::uint64_t n_tids = cc.tids.size();
  for (ElementId e : distinct_elements(cc.seq)) {
    const auto occurrences =
        static_cast<std::uint64_t>(std::count(cc.seq.begin(), cc.seq.end(), e));
    bundle.decrement(e, occurrences * n_tids);
  }
}

// ---------------------------------------------------------------------------
// Pruning

namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

template <class F>
Moments moments(std::span<const CoCluster> phi, F value) {
  Moments m;
  for (const CoCluster& c : phi) m.mean += value(c);
  m.mean /= static_cast<double>(phi.size());
  double ss = 0.0;
  for (const CoCluster& c : phi) {
    const double d = value(c) - m.mean;
    ss += d * d;
  }
  m.stddev = std::sqrt(ss / static_cast<double>(phi.size()));
  return m;
}

}  // namespace

std::vector<CoCluster> prune(std::span<const CoCluster> phi, const MinerConfig& config) {
  if (phi.empty()) return {};

  const auto n_tids = [](const CoCluster& c) { return static_cast<double>(c.tids.size()); };
  const auto cost_of = [](const CoCluster& c) { return static_cast<double>(c.cost_at_insertion); };
  const Moments traj = moments(phi, n_tids);
  const Moments cst = moments(phi, cost_of);

  double traj_threshold = traj.mean;
  double cost_threshold = cst.mean;
  if (config.stat_metric == StatMetric::zscore) {
    // More trajectories is better, lower cost is better: the cost side uses -z.
    traj_threshold = traj.mean + config.z * traj.stddev;
    cost_threshold = cst.mean + (-config.z) * cst.stddev;
  }

  const bool check_traj = config.relevance != Relevance::cost;
  const bool check_cost = config.relevance != Relevance::trajectory;

  std::vector<CoCluster> kept;
  for (const CoCluster& c : phi) {
    if (check_traj && !(n_tids(c) >= traj_threshold)) continue;
    if (check_cost && !(cost_of(c) <= cost_threshold)) continue;
    kept.push_back(c);
  }
  return kept;
}

// ---------------------------------------------------------------------------

MineResult mine(const Dataset& dataset, const MinerConfig& config) {
  config.validate();
  IndexBundle bundle = initialize_data(dataset);

  std::vector<ElementId> eligible;
  if (config.frequent_only) {
    eligible = frequent_elements(bundle);
  } else {
    eligible.resize(bundle.n_elements());
    std::iota(eligible.begin(), eligible.end(), ElementId{0});
  }

  MineResult result;
  RunTrace& trace = result.trace;
  trace.queue_size = eligible.size();
  trace.stop = StopReason::budget_exhausted;

  Coverage phi(bundle.n_elements());
  for (std::size_t iter = 0; iter < config.k; ++iter) {
    std::optional<CoCluster> cc =
        find_candidate(bundle, phi, config.epsilon, element_queue(bundle, eligible));

    IterationTrace it;
    it.iteration = iter;
    if (!cc) {
      trace.iterations.push_back(std::move(it));
      trace.stop = StopReason::no_candidate;
      break;
    }
    it.cost = cc->cost_at_insertion;
    it.max_overlap = cc->max_overlap_at_acceptance;
    it.candidate = *cc;
    if (cc->cost_at_insertion >= 0) {
      trace.iterations.push_back(std::move(it));
      trace.stop = StopReason::non_negative_cost;
      break;
    }
    it.accepted = true;
    trace.iterations.push_back(std::move(it));
    update_frequencies(bundle, *cc);
    phi.add(*cc);
  }

  trace.n_candidates = phi.members().size();
  result.coclusters = prune(phi.members(), config);
  return result;
}

}  // namespace ococlus
