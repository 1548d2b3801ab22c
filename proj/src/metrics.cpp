#include "ococlus/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace ococlus {

namespace {

struct Summary {
  double mean = 0.0;
  std::optional<double> cv;
};

// Population statistics. Values are sorted first so the result does not
// depend on the order of the co-clusters.
Summary summarize(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  Summary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));
  if (s.mean != 0.0) s.cv = std::abs(sd / s.mean) * 100.0;
  return s;
}

}  // namespace

double overall_entropy(std::span<const CoCluster> results) {
  std::vector<double> mass;
  double total = 0.0;
  for (const CoCluster& c : results) {
    mass.push_back(static_cast<double>(c.tids.size()));
    total += mass.back();
  }
  if (total <= 0.0) return 0.0;
  std::sort(mass.begin(), mass.end());
  double h = 0.0;
  for (double m : mass) {
    if (m <= 0.0) continue;
    const double p = m / total;
    h -= p * std::log2(p);
  }
  return h;
}

ResultReport report(std::span<const CoCluster> results, const Dataset& dataset) {
  ResultReport r;
  r.n_coclusters = results.size();
  r.overall_entropy = overall_entropy(results);

  std::set<ElementId> unique;
  for (const CoCluster& c : results) unique.insert(c.seq.begin(), c.seq.end());
  r.n_unique_elements = unique.size();

  if (results.empty()) return r;

  std::vector<double> traj;
  std::vector<double> cost;
  std::vector<double> len;
  std::vector<double> users;
  for (const CoCluster& c : results) {
    traj.push_back(static_cast<double>(c.tids.size()));
    cost.push_back(static_cast<double>(c.cost_at_insertion));
    len.push_back(static_cast<double>(c.seq.size()));
    if (dataset.has_users()) {
      std::set<std::string> distinct;
      for (TrajectoryId t : c.tids) {
        if (const auto& u = dataset.trajectory(t).user) distinct.insert(*u);
      }
      users.push_back(static_cast<double>(distinct.size()));
    }
  }

  const auto record = [&](const std::string& name, std::vector<double> values,
                          std::optional<double>& mean) {
    const Summary s = summarize(std::move(values));
    mean = s.mean;
    if (s.cv) r.cv[name] = *s.cv;
  };
  record("trajectories", std::move(traj), r.avg_trajectories);
  record("cost", std::move(cost), r.avg_cost);
  record("seq_length", std::move(len), r.avg_seq_length);
  if (dataset.has_users()) record("users", std::move(users), r.avg_users);
  return r;
}

}  // namespace ococlus
