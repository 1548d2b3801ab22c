#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ococlus/ingest.hpp"
#include "test_util.hpp"

using namespace ococlus;
using ococlus::testing::make_cc;
using ococlus::testing::make_dataset;

namespace fs = std::filesystem;

namespace {

Dataset csv(const std::string& text, std::string_view dim = {}) {
  std::istringstream in(text);
  return parse_csv_corpus(in, dim, "corpus.csv");
}

Dataset jsonl(const std::string& text, std::string_view dim = {}) {
  std::istringstream in(text);
  return parse_jsonl_corpus(in, dim, "corpus.jsonl");
}

std::vector<std::string> names(const Dataset& ds, TrajectoryId t) {
  std::vector<std::string> out;
  for (ElementId e : ds.trajectory(t).elements) out.push_back(ds.element_name(e));
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ococlus_ingest_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("csv_long loading") {
  const Dataset ds = csv("tid,user,order,element\nt1,u1,1,Bar\nt1,u1,2,Gym\n");
  REQUIRE(ds.size() == 1);
  CHECK(names(ds, 0) == std::vector<std::string>{"Bar", "Gym"});
  CHECK(ds.trajectory(0).key == "t1");
  CHECK(ds.trajectory(0).user == "u1");

  const Dataset swapped = csv("tid,user,order,element\nt1,u1,2,Gym\nt1,u1,1,Bar\n");
  CHECK(names(swapped, 0) == std::vector<std::string>{"Bar", "Gym"});
}

TEST_CASE("csv_long errors carry line numbers") {
  CHECK_THROWS_WITH_AS(csv("tid,user,order,element\nt1,u1,1,Bar\nt1,u1,1,Gym\n"),
                       doctest::Contains("corpus.csv:3: duplicate order 1"), InputError);
  CHECK_THROWS_WITH_AS(csv("tid,user,order,element\nt1,u1,x,Bar\n"),
                       doctest::Contains("corpus.csv:2: non-numeric order value 'x'"), InputError);
  CHECK_THROWS_WITH_AS(csv("tid,user,element\nt1,u1,Bar\n"),
                       doctest::Contains("missing required column 'order'"), InputError);
  CHECK_THROWS_WITH_AS(csv("tid,user,order,element\nt1,u1,1\n"),
                       doctest::Contains("corpus.csv:2: expected 4 fields"), InputError);
  CHECK_THROWS_WITH_AS(csv("tid,user,order,element\n"), doctest::Contains("empty corpus"),
                       InputError);
  CHECK_THROWS_AS(csv(""), InputError);
  CHECK_THROWS_WITH_AS(csv("tid,user,order,element\nt1,u1,1,a\nt1,u2,2,b\n"),
                       doctest::Contains("conflicting user"), InputError);
}

TEST_CASE("csv_long dimension selection, optional user, quoting") {
  const Dataset ds = csv(
      "tid,order,category,type\r\n"
      "w1,10,Food,\"Bar, Pub\"\r\n"
      "w2,1,Shop,Mall\r\n"
      "w1,3,Gym,Gym\r\n",
      "type");
  REQUIRE(ds.size() == 2);
  CHECK(names(ds, 0) == std::vector<std::string>{"Gym", "Bar, Pub"});
  CHECK(names(ds, 1) == std::vector<std::string>{"Mall"});
  CHECK_FALSE(ds.has_users());

  CHECK_THROWS_WITH_AS(csv("tid,order,category\nw1,1,Food\n", "type"),
                       doctest::Contains("missing required column 'type'"), InputError);
}

TEST_CASE("csv_long is invariant to row order within a trajectory") {
  std::mt19937 rng(8);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::string> rows;
    for (int t = 0; t < 4; ++t)
      for (int o = 0; o < 6; ++o)
        rows.push_back("t" + std::to_string(t) + ",," + std::to_string(o * 3 - 5) + ",e" +
                       std::to_string(rng() % 5));
    std::string sorted = "tid,user,order,element\n";
    for (const auto& r : rows) sorted += r + "\n";
    // Shuffle within each trajectory block only, so key first-appearance is unchanged.
    for (int t = 0; t < 4; ++t) std::shuffle(rows.begin() + t * 6, rows.begin() + t * 6 + 6, rng);
    std::string shuffled = "tid,user,order,element\n";
    for (const auto& r : rows) shuffled += r + "\n";

    const Dataset a = csv(sorted);
    const Dataset b = csv(shuffled);
    REQUIRE(a.size() == b.size());
    for (TrajectoryId t = 0; t < a.size(); ++t) CHECK(names(a, t) == names(b, t));
  }
}

TEST_CASE("jsonl loading") {
  const Dataset ds = jsonl(
      "{\"id\": \"w1\", \"user\": \"u1\", \"elements\": [\"Bar\", \"Gym\"]}\n"
      "\n"
      "{\"id\": \"w2\", \"user\": null, \"elements\": [\"Gym\"]}\n"
      "{\"id\": 7, \"elements\": [\"Park\"]}\n");
  REQUIRE(ds.size() == 3);
  CHECK(names(ds, 0) == std::vector<std::string>{"Bar", "Gym"});
  CHECK(ds.trajectory(1).user == std::nullopt);
  CHECK(ds.trajectory(2).key == "7");
  CHECK(ds.n_elements() == 3);

  const Dataset dim = jsonl("{\"id\": \"a\", \"types\": [\"x\", \"y\"]}\n", "types");
  CHECK(names(dim, 0) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("jsonl errors carry line numbers") {
  CHECK_THROWS_WITH_AS(jsonl("{\"id\": \"a\", \"elements\": [\"x\"]}\n{\"id\": \"b\", \"elements\": []}\n"),
                       doctest::Contains("corpus.jsonl:2: trajectory 'b' has zero elements"),
                       InputError);
  CHECK_THROWS_WITH_AS(jsonl("{\"id\": \"a\"}\n"),
                       doctest::Contains("missing required field 'elements'"), InputError);
  CHECK_THROWS_WITH_AS(jsonl("not json\n"), doctest::Contains("corpus.jsonl:1: invalid JSON"),
                       InputError);
  CHECK_THROWS_WITH_AS(
      jsonl("{\"id\": \"a\", \"elements\": [\"x\"]}\n{\"id\": \"a\", \"elements\": [\"y\"]}\n"),
      doctest::Contains("corpus.jsonl:2: duplicate id"), InputError);
  CHECK_THROWS_AS(jsonl(""), InputError);
}

TEST_CASE("jsonl writer round-trips through the loader") {
  std::vector<RawTrajectory> raw = {{"w1", "u1", {"a", "b,c"}}, {"w2", std::nullopt, {"\"q\""}}};
  const Dataset ds = jsonl(jsonl_corpus(raw));
  REQUIRE(ds.size() == 2);
  CHECK(names(ds, 0) == raw[0].elements);
  CHECK(names(ds, 1) == raw[1].elements);
  CHECK(ds.trajectory(0).user == "u1");
}

TEST_CASE("co-cluster document") {
  std::vector<RawTrajectory> raw = {
      {"w1", "u1", {"a", "b"}}, {"w2", "u2", {"a", "b"}}, {"w3", "u1", {"c"}}};
  const Dataset ds = intern_corpus(raw);

  SUBCASE("empty results still carry the corpus header") {
    const auto doc = nlohmann::json::parse(coclusters_document({}, ds));
    CHECK(doc["coclusters"].empty());
    CHECK(doc["corpus"]["n_trajectories"] == 3);
    CHECK(doc["corpus"]["n_elements"] == 3);
    CHECK(doc["corpus"]["n_users"] == 2);
  }

  SUBCASE("fields are written verbatim") {
    CoCluster cc = make_cc({0, 1}, {0, 1}, -2);
    cc.max_overlap_at_acceptance = 0.125;
    const auto doc = nlohmann::json::parse(coclusters_document(std::vector{cc}, ds));
    REQUIRE(doc["coclusters"].size() == 1);
    const auto& rec = doc["coclusters"][0];
    CHECK(rec["rank"] == 1);
    CHECK(rec["sequence"] == nlohmann::json({"a", "b"}));
    CHECK(rec["n_trajectories"] == 2);
    CHECK(rec["trajectories"] == nlohmann::json({"w1", "w2"}));
    CHECK(rec["users"] == nlohmann::json({"u1", "u2"}));
    CHECK(rec["cost_at_insertion"] == -2);
    CHECK(rec["max_overlap_at_acceptance"] == 0.125);
  }

  SUBCASE("unknown trajectories are rejected") {
    const Dataset other = make_dataset({{"a", "b"}});
    CoCluster cc = make_cc({0, 1}, {0, 1}, -2);
    CHECK_THROWS_WITH_AS(parse_coclusters_document(coclusters_document(std::vector{cc}, ds), other),
                         doctest::Contains("unknown"), InputError);
  }
}

TEST_CASE("co-cluster document write/read round trip") {
  std::mt19937 rng(12);
  TempDir dir;
  for (int round = 0; round < 25; ++round) {
    const Dataset ds = ococlus::testing::random_dataset(rng, 12, 6, 2, 8);
    std::vector<CoCluster> res;
    for (std::size_t i = 0, n = rng() % 5; i < n; ++i) {
      TidSet tids;
      for (TrajectoryId t = 0; t < 12; ++t)
        if (rng() % 2) tids.push_back(t);
      Sequence seq;
      for (std::size_t j = 0, m = 2 + rng() % 3; j < m; ++j)
        seq.push_back(static_cast<ElementId>(rng() % ds.n_elements()));
      CoCluster cc = make_cc(tids, seq, -static_cast<std::int64_t>(rng() % 100));
      cc.max_overlap_at_acceptance = static_cast<double>(rng() % 7) / 7.0;
      res.push_back(cc);
    }
    const fs::path p = dir.path / "coclusters.json";
    write_coclusters(res, ds, p);
    CHECK(read_coclusters(p, ds) == res);
    CHECK_FALSE(fs::exists(dir.path / "coclusters.json.tmp"));
  }
}

TEST_CASE("alluvial flows") {
  const Dataset ds = make_dataset({{"a", "b", "c"}});
  CHECK(alluvial_csv({}, ds) == "cluster_id,element,position,weight\n");

  const std::vector<CoCluster> res = {make_cc({0, 1, 2, 3, 4}, {0, 1}),
                                      make_cc({0, 1}, {2, 0})};
  CHECK(alluvial_csv(res, ds) ==
        "cluster_id,element,position,weight\n"
        "1,a,0,5\n"
        "1,b,1,5\n"
        "2,c,0,2\n"
        "2,a,1,2\n");
}

TEST_CASE("writes fail cleanly on unwritable paths") {
  const Dataset ds = make_dataset({{"a"}});
  CHECK_THROWS_AS(write_coclusters({}, ds, "/nonexistent-dir/x/coclusters.json"), InputError);
  CHECK_THROWS_AS(write_alluvial_flows({}, ds, "/nonexistent-dir/x/alluvial.csv"), InputError);
}

TEST_CASE("csv helpers") {
  CHECK(split_csv_line("a,\"b,c\",\"d\"\"e\",") ==
        std::vector<std::string>{"a", "b,c", "d\"e", ""});
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(parse_corpus_format("csv") == CorpusFormat::csv_long);
  CHECK(format_for_path("x/y.csv") == CorpusFormat::csv_long);
  CHECK(format_for_path("x/y.jsonl") == CorpusFormat::jsonl);
  CHECK_THROWS_AS(parse_corpus_format("xml"), InputError);
}
