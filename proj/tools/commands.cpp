#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "ococlus/core.hpp"
#include "ococlus/ingest.hpp"
#include "ococlus/metrics.hpp"
#include "ococlus/miner.hpp"
#include "ococlus/oracle.hpp"

namespace ococlus::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CorpusArgs {
  std::string input;
  std::string format;
  std::string dimension;

  CorpusFormat resolved_format() const {
    return format.empty() ? format_for_path(input) : parse_corpus_format(format);
  }
  Dataset load() const { return load_corpus(input, resolved_format(), dimension); }
};

void add_corpus_options(CLI::App& cmd, CorpusArgs& a) {
  cmd.add_option("--input", a.input, "Corpus file (csv_long or jsonl)")->required();
  cmd.add_option("--format", a.format, "csv | jsonl (default: from file extension)")
      ->check(CLI::IsMember({"csv", "csv_long", "jsonl"}));
  cmd.add_option("--dimension", a.dimension,
                 "Element column (csv, default 'element') or array field (jsonl, default "
                 "'elements')");
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

json trace_json(const RunTrace& trace, const Dataset& ds) {
  json iters = json::array();
  for (const IterationTrace& it : trace.iterations) {
    json rec = {{"iteration", it.iteration}, {"accepted", it.accepted}};
    if (it.candidate) {
      json seq = json::array();
      for (ElementId e : it.candidate->seq) seq.push_back(ds.element_name(e));
      rec["sequence"] = std::move(seq);
      rec["n_trajectories"] = it.candidate->tids.size();
      rec["cost"] = it.cost;
      rec["max_overlap"] = it.max_overlap;
    } else {
      rec["sequence"] = nullptr;
    }
    iters.push_back(std::move(rec));
  }
  return {
      {"queue_size", trace.queue_size},
      {"n_candidates", trace.n_candidates},
      {"stop_reason", to_string(trace.stop)},
      {"iterations", std::move(iters)},
  };
}

// ---------------------------------------------------------------------------

struct MineArgs {
  CorpusArgs corpus;
  std::size_t k = 0;
  double epsilon = 0.2;
  std::string stat_metric = "zscore";
  double z = 1.0;
  std::string relevance = "both";
  bool frequent_only = true;
  std::string out;
  CLI::Option* z_opt = nullptr;
};

int cmd_mine(const MineArgs& a, std::ostream& out) {
  MinerConfig config;
  config.k = a.k;
  config.epsilon = a.epsilon;
  config.stat_metric = parse_stat_metric(a.stat_metric);
  config.z = a.z;
  config.relevance = parse_relevance(a.relevance);
  config.frequent_only = a.frequent_only;
  if (config.stat_metric == StatMetric::average && a.z_opt->count() > 0) {
    throw CLI::ValidationError("--z", "only applies with --stat-metric zscore");
  }
  config.validate();

  const Dataset ds = a.corpus.load();
  const fs::path dir = prepare_out_dir(a.out);

  const auto t0 = std::chrono::steady_clock::now();
  const MineResult result = mine(ds, config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const ResultReport rep = report(result.coclusters, ds);
  write_coclusters(result.coclusters, ds, dir / "coclusters.json");
  write_text_atomic(dir / "metrics.json", metrics_document(rep));
  write_alluvial_flows(result.coclusters, ds, dir / "alluvial.csv");

  json manifest;
  manifest["config"] = {
      {"k", config.k},
      {"epsilon", config.epsilon},
      {"stat_metric", to_string(config.stat_metric)},
      {"z", config.stat_metric == StatMetric::zscore ? json(config.z) : json(nullptr)},
      {"relevance", to_string(config.relevance)},
      {"frequent_only", config.frequent_only},
  };
  manifest["input"] = {
      {"path", a.corpus.input},
      {"format", a.corpus.resolved_format() == CorpusFormat::csv_long ? "csv" : "jsonl"},
      {"dimension", a.corpus.dimension.empty() ? json(nullptr) : json(a.corpus.dimension)},
  };
  manifest["corpus"] = {
      {"n_trajectories", ds.size()},
      {"n_elements", ds.n_elements()},
      {"n_users", ds.has_users() ? json(ds.n_users()) : json(nullptr)},
  };
  manifest["wall_time_seconds"] = seconds;
  manifest["n_coclusters"] = result.coclusters.size();
  manifest["trace"] = trace_json(result.trace, ds);
  write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");

  out << result.coclusters.size() << " co-clusters (" << result.trace.n_candidates
      << " candidates, stop: " << to_string(result.trace.stop) << ") -> " << dir.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  CorpusArgs corpus;
  std::string coclusters;
  std::string out;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  const Dataset ds = a.corpus.load();
  const std::vector<CoCluster> results = read_coclusters(a.coclusters, ds);
  const std::string doc = metrics_document(report(results, ds));
  if (a.out.empty()) {
    out << doc;
  } else {
    write_text_atomic(a.out, doc);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t alphabet = 0;
  std::size_t len_min = 2;
  std::size_t len_max = 10;
  double zipf = 0.0;
  std::optional<std::size_t> users;
  std::vector<std::string> plants;
  std::string out;
};

// "x,y,z:7" or "x,y,z:7:start"
oracle::PlantSpec parse_plant(const std::string& text) {
  const auto bad = [&]() {
    return InputError("bad --plant '" + text + "' (expected a,b[,...]:COUNT[:start|random|end])");
  };
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) throw bad();
  const auto c2 = text.find(':', c1 + 1);
  oracle::PlantSpec p;
  p.pattern = split_csv_line(std::string_view(text).substr(0, c1));
  for (const std::string& e : p.pattern) {
    if (e.empty()) throw bad();
  }
  const std::string count = text.substr(c1 + 1, c2 == std::string::npos ? std::string::npos
                                                                         : c2 - c1 - 1);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(count, &used);
    if (used != count.size() || v < 1) throw bad();
    p.n_carriers = static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (c2 != std::string::npos) p.position = oracle::parse_plant_position(text.substr(c2 + 1));
  return p;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  oracle::GeneratorSpec spec;
  spec.seed = a.seed;
  spec.n_trajectories = a.n;
  spec.alphabet_size = a.alphabet;
  spec.len_min = a.len_min;
  spec.len_max = a.len_max;
  spec.zipf_exponent = a.zipf;
  spec.n_users = a.users;
  for (const std::string& p : a.plants) spec.plants.push_back(parse_plant(p));

  const oracle::GeneratedCorpus g = oracle::generate_corpus(spec);
  const fs::path dir = prepare_out_dir(a.out);
  write_text_atomic(dir / "corpus.jsonl", jsonl_corpus(g.raw));

  json truth;
  truth["seed"] = a.seed;
  truth["n_trajectories"] = a.n;
  truth["alphabet_size"] = a.alphabet;
  truth["plants"] = json::array();
  for (std::size_t i = 0; i < g.truth.size(); ++i) {
    json keys = json::array();
    for (TrajectoryId t : g.truth[i].carriers) keys.push_back(g.dataset.trajectory(t).key);
    truth["plants"].push_back({
        {"pattern", g.truth[i].pattern},
        {"position", oracle::to_string(spec.plants[i].position)},
        {"carriers", std::move(keys)},
    });
  }
  write_text_atomic(dir / "truth.json", truth.dump(2) + "\n");
  out << "wrote " << g.raw.size() << " trajectories to " << (dir / "corpus.jsonl").string()
      << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Order-aware co-clustering of semantic trajectories", "ococlus"};
  app.require_subcommand(1);

  MineArgs mine_args;
  CLI::App* mine_cmd = app.add_subcommand("mine", "Mine co-clusters from a corpus");
  add_corpus_options(*mine_cmd, mine_args.corpus);
  mine_cmd->add_option("--k", mine_args.k, "Maximum number of candidate co-clusters")
      ->required()
      ->check(CLI::PositiveNumber);
  mine_cmd->add_option("--epsilon", mine_args.epsilon, "Overlap threshold in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  mine_cmd->add_option("--stat-metric", mine_args.stat_metric, "average | zscore")
      ->check(CLI::IsMember({"average", "zscore"}));
  mine_args.z_opt =
      mine_cmd->add_option("--z", mine_args.z, "z value for --stat-metric zscore");
  mine_cmd->add_option("--relevance", mine_args.relevance, "trajectory | cost | both")
      ->check(CLI::IsMember({"trajectory", "cost", "both"}));
  mine_cmd->add_flag("--frequent-only,!--no-frequent-only", mine_args.frequent_only,
                     "Restrict the element queue to elements at or above mean frequency");
  mine_cmd->add_option("--out", mine_args.out, "Output directory")->required();

  StatsArgs stats_args;
  CLI::App* stats_cmd =
      app.add_subcommand("stats", "Recompute result statistics from a co-cluster document");
  add_corpus_options(*stats_cmd, stats_args.corpus);
  stats_cmd->add_option("--coclusters", stats_args.coclusters, "coclusters.json")->required();
  stats_cmd->add_option("--out", stats_args.out, "Write metrics JSON here instead of stdout");

  GenArgs gen_args;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus with planted patterns");
  gen_cmd->add_option("--seed", gen_args.seed, "RNG seed");
  gen_cmd->add_option("--n", gen_args.n, "Number of trajectories")->required();
  gen_cmd->add_option("--alphabet", gen_args.alphabet, "Distinct elements, plants included")
      ->required();
  gen_cmd->add_option("--len-min", gen_args.len_min, "Minimum trajectory length");
  gen_cmd->add_option("--len-max", gen_args.len_max, "Maximum trajectory length");
  gen_cmd->add_option("--zipf", gen_args.zipf, "Zipf exponent of the noise (0 = uniform)");
  gen_cmd->add_option("--users", gen_args.users, "Assign trajectories round-robin to N users");
  gen_cmd->add_option("--plant", gen_args.plants, "a,b[,...]:COUNT[:start|random|end]");
  gen_cmd->add_option("--out", gen_args.out, "Output directory")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  if (!argv.empty()) argv.pop_back();  // program name

  try {
    app.parse(argv);
    if (*mine_cmd) return cmd_mine(mine_args, out);
    if (*stats_cmd) return cmd_stats(stats_args, out);
    if (*gen_cmd) return cmd_gen(gen_args, out);
    return kInputError;
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ococlus: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "ococlus: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "ococlus: internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace ococlus::cli
