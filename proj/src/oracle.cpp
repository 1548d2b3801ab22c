#include "ococlus/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace ococlus::oracle {

std::map<Sequence, TidSet> enumerate_contiguous(const Dataset& dataset, std::size_t max_len) {
  std::map<Sequence, TidSet> out;
  for (const Trajectory& t : dataset.trajectories()) {
    const Sequence& s = t.elements;
    for (std::size_t begin = 0; begin < s.size(); ++begin) {
      for (std::size_t len = 1; len <= max_len && begin + len <= s.size(); ++len) {
        TidSet& support = out[Sequence(s.begin() + begin, s.begin() + begin + len)];
        if (support.empty() || support.back() != t.tid) support.push_back(t.tid);
      }
    }
  }
  return out;
}

PlantPosition parse_plant_position(std::string_view s) {
  if (s == "start") return PlantPosition::start;
  if (s == "random") return PlantPosition::random;
  if (s == "end") return PlantPosition::end;
  throw InputError("unknown plant position '" + std::string(s) + "' (start|random|end)");
}

std::string to_string(PlantPosition p) {
  switch (p) {
    case PlantPosition::start:
      return "start";
    case PlantPosition::random:
      return "random";
    case PlantPosition::end:
      return "end";
  }
  return "random";
}

namespace {

// std distributions are implementation-defined; these are not.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

void check_feasible(const GeneratorSpec& spec, std::size_t n_plant_elements) {
  if (spec.n_trajectories == 0) throw InputError("generator: n_trajectories must be >= 1");
  if (spec.len_min == 0 || spec.len_min > spec.len_max) {
    throw InputError("generator: need 1 <= len_min <= len_max");
  }
  if (spec.alphabet_size <= n_plant_elements) {
    throw InputError("generator: alphabet of " + std::to_string(spec.alphabet_size) +
                     " leaves no noise elements beside " + std::to_string(n_plant_elements) +
                     " plant elements");
  }
  if (!(spec.zipf_exponent >= 0.0) || !std::isfinite(spec.zipf_exponent)) {
    throw InputError("generator: zipf exponent must be finite and >= 0");
  }
  if (spec.n_users && *spec.n_users == 0) throw InputError("generator: n_users must be >= 1");
  for (const PlantSpec& p : spec.plants) {
    if (p.pattern.size() < 2) throw InputError("generator: plant pattern needs >= 2 elements");
    if (p.pattern.size() > spec.len_max) {
      throw InputError("generator: plant of length " + std::to_string(p.pattern.size()) +
                       " exceeds len_max " + std::to_string(spec.len_max));
    }
    if (p.n_carriers == 0 || p.n_carriers > spec.n_trajectories) {
      throw InputError("generator: plant carriers must be in [1, n_trajectories]");
    }
  }
}

}  // namespace

GeneratedCorpus generate_corpus(const GeneratorSpec& spec) {
  std::set<std::string> plant_elements;
  for (const PlantSpec& p : spec.plants) plant_elements.insert(p.pattern.begin(), p.pattern.end());
  check_feasible(spec, plant_elements.size());

  std::vector<std::string> noise;
  for (std::size_t i = 0; noise.size() < spec.alphabet_size - plant_elements.size(); ++i) {
    std::string name = "n" + std::to_string(i);
    if (!plant_elements.contains(name)) noise.push_back(std::move(name));
  }

  std::vector<double> cumulative;
  if (spec.zipf_exponent > 0.0) {
    double acc = 0.0;
    for (std::size_t r = 0; r < noise.size(); ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);
      cumulative.push_back(acc);
    }
  }

  std::mt19937_64 rng(spec.seed);
  const auto draw_noise = [&]() -> const std::string& {
    if (cumulative.empty()) return noise[uniform_below(rng, noise.size())];
    const double u = unit_real(rng) * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return noise[static_cast<std::size_t>(it - cumulative.begin())];
  };

  // carried[t] lists the plants trajectory t carries.
  std::vector<std::vector<std::size_t>> carried(spec.n_trajectories);
  GeneratedCorpus out;
  for (std::size_t pi = 0; pi < spec.plants.size(); ++pi) {
    std::vector<TrajectoryId> ids(spec.n_trajectories);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<TrajectoryId>(i);
    const std::size_t need = spec.plants[pi].n_carriers;
    for (std::size_t i = 0; i < need; ++i) {
      std::swap(ids[i], ids[i + uniform_below(rng, ids.size() - i)]);
    }
    TidSet chosen(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(need));
    std::sort(chosen.begin(), chosen.end());
    for (TrajectoryId t : chosen) carried[t].push_back(pi);
    out.truth.push_back({spec.plants[pi].pattern, std::move(chosen)});
  }

  out.raw.reserve(spec.n_trajectories);
  for (std::size_t t = 0; t < spec.n_trajectories; ++t) {
    const std::size_t target = spec.len_min + uniform_below(rng, spec.len_max - spec.len_min + 1);
    std::size_t planted = 0;
    for (std::size_t pi : carried[t]) planted += spec.plants[pi].pattern.size();
    const std::size_t n_noise = target > planted ? target - planted : 0;

    using Block = std::vector<std::string>;
    std::vector<Block> middle;
    for (std::size_t i = 0; i < n_noise; ++i) middle.push_back({draw_noise()});
    std::vector<Block> head;
    std::vector<Block> tail;
    for (std::size_t pi : carried[t]) {
      const PlantSpec& p = spec.plants[pi];
      switch (p.position) {
        case PlantPosition::start:
          head.push_back(p.pattern);
          break;
        case PlantPosition::end:
          tail.push_back(p.pattern);
          break;
        case PlantPosition::random: {
          const auto at = uniform_below(rng, middle.size() + 1);
          middle.insert(middle.begin() + static_cast<std::ptrdiff_t>(at), p.pattern);
          break;
        }
      }
    }

    RawTrajectory raw;
    raw.key = "t" + std::to_string(t);
    if (spec.n_users) raw.user = "u" + std::to_string(t % *spec.n_users);
    for (const auto* part : {&head, &middle, &tail}) {
      for (const Block& b : *part) raw.elements.insert(raw.elements.end(), b.begin(), b.end());
    }
    out.raw.push_back(std::move(raw));
  }

  out.dataset = intern_corpus(out.raw);
  return out;
}

}  // namespace ococlus::oracle
