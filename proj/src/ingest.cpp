#include "ococlus/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace ococlus {

using nlohmann::json;

namespace {

[[noreturn]] void fail_at(std::string_view source, std::size_t line, const std::string& what) {
  throw InputError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "csv" || s == "csv_long") return CorpusFormat::csv_long;
  if (s == "jsonl") return CorpusFormat::jsonl;
  throw InputError("unknown corpus format '" + std::string(s) + "' (csv|jsonl)");
}

CorpusFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? CorpusFormat::csv_long : CorpusFormat::jsonl;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// ---------------------------------------------------------------------------
// Loaders

Dataset parse_csv_corpus(std::istream& in, std::string_view dimension, std::string_view source) {
  const std::string element_col = dimension.empty() ? "element" : std::string(dimension);

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail_at(source, 1, "missing header row");
  ++lineno;
  chomp(line);
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  const std::vector<std::string> header = split_csv_line(line);
  const auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto required = [&](const std::string& name) {
    auto c = column(name);
    if (!c) fail_at(source, 1, "missing required column '" + name + "'");
    return *c;
  };
  const std::size_t tid_col = required("tid");
  const std::size_t order_col = required("order");
  const std::size_t elem_col = required(element_col);
  const std::optional<std::size_t> user_col = column("user");

  struct Pending {
    std::string key;
    std::optional<std::string> user;
    std::map<std::int64_t, std::string> rows;  // order -> element
  };
  std::vector<Pending> pending;
  std::unordered_map<std::string, std::size_t> index;

  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (blank(line)) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) {
      fail_at(source, lineno,
              "expected " + std::to_string(header.size()) + " fields, got " +
                  std::to_string(f.size()));
    }

    const std::string& order_text = f[order_col];
    std::int64_t order = 0;
    const auto [ptr, ec] =
        std::from_chars(order_text.data(), order_text.data() + order_text.size(), order);
    if (ec != std::errc() || ptr != order_text.data() + order_text.size() || order_text.empty()) {
      fail_at(source, lineno, "non-numeric order value '" + order_text + "'");
    }
    if (f[tid_col].empty()) fail_at(source, lineno, "empty tid");
    if (f[elem_col].empty()) fail_at(source, lineno, "empty " + element_col + " value");

    std::optional<std::string> user;
    if (user_col && !f[*user_col].empty()) user = f[*user_col];

    auto [it, inserted] = index.emplace(f[tid_col], pending.size());
    if (inserted) pending.push_back({f[tid_col], user, {}});
    Pending& p = pending[it->second];
    if (p.user != user) {
      fail_at(source, lineno, "trajectory '" + p.key + "' has conflicting user labels");
    }
    if (!p.rows.emplace(order, f[elem_col]).second) {
      fail_at(source, lineno,
              "duplicate order " + order_text + " for trajectory '" + p.key + "'");
    }
  }

  std::vector<RawTrajectory> raw;
  raw.reserve(pending.size());
  for (Pending& p : pending) {
    RawTrajectory r;
    r.key = std::move(p.key);
    r.user = std::move(p.user);
    for (auto& [order, element] : p.rows) r.elements.push_back(std::move(element));
    raw.push_back(std::move(r));
  }
  if (raw.empty()) throw InputError(std::string(source) + ": empty corpus");
  return intern_corpus(raw);
}

Dataset parse_jsonl_corpus(std::istream& in, std::string_view dimension, std::string_view source) {
  const std::string field = dimension.empty() ? "elements" : std::string(dimension);
  std::vector<RawTrajectory> raw;
  std::set<std::string> seen;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (blank(line)) continue;

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_at(source, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) fail_at(source, lineno, "record is not an object");

    RawTrajectory r;
    const auto id = rec.find("id");
    if (id == rec.end()) fail_at(source, lineno, "missing required field 'id'");
    if (id->is_string()) {
      r.key = id->get<std::string>();
    } else if (id->is_number_integer()) {
      r.key = std::to_string(id->get<std::int64_t>());
    } else {
      fail_at(source, lineno, "field 'id' must be a string");
    }
    if (!seen.insert(*r.key).second) fail_at(source, lineno, "duplicate id '" + *r.key + "'");

    if (const auto u = rec.find("user"); u != rec.end() && !u->is_null()) {
      if (!u->is_string()) fail_at(source, lineno, "field 'user' must be a string or null");
      r.user = u->get<std::string>();
    }

    const auto elems = rec.find(field);
    if (elems == rec.end()) fail_at(source, lineno, "missing required field '" + field + "'");
    if (!elems->is_array()) fail_at(source, lineno, "field '" + field + "' must be an array");
    for (const json& e : *elems) {
      if (!e.is_string()) fail_at(source, lineno, "elements must be strings");
      r.elements.push_back(e.get<std::string>());
    }
    if (r.elements.empty()) {
      fail_at(source, lineno, "trajectory '" + *r.key + "' has zero elements");
    }
    raw.push_back(std::move(r));
  }
  if (raw.empty()) throw InputError(std::string(source) + ": empty corpus");
  return intern_corpus(raw);
}

Dataset load_corpus(const std::filesystem::path& path, CorpusFormat format,
                    std::string_view dimension) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus '" + path.string() + "'");
  const std::string source = path.string();
  return format == CorpusFormat::csv_long ? parse_csv_corpus(in, dimension, source)
                                          : parse_jsonl_corpus(in, dimension, source);
}

std::string jsonl_corpus(std::span<const RawTrajectory> raw) {
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawTrajectory& r = raw[i];
    json rec;
    rec["id"] = r.key.value_or(std::to_string(i));
    rec["user"] = r.user ? json(*r.user) : json(nullptr);
    rec["elements"] = r.elements;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Result documents

namespace {

std::vector<std::string> users_of(const CoCluster& cc, const Dataset& dataset) {
  std::set<std::string> users;
  for (TrajectoryId t : cc.tids) {
    if (const auto& u = dataset.trajectory(t).user) users.insert(*u);
  }
  return {users.begin(), users.end()};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string coclusters_document(std::span<const CoCluster> results, const Dataset& dataset) {
  json doc;
  doc["corpus"] = {
      {"n_trajectories", dataset.size()},
      {"n_elements", dataset.n_elements()},
      {"n_users", dataset.has_users() ? json(dataset.n_users()) : json(nullptr)},
  };
  json list = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CoCluster& cc = results[i];
    json seq = json::array();
    for (ElementId e : cc.seq) seq.push_back(dataset.element_name(e));
    json keys = json::array();
    for (TrajectoryId t : cc.tids) keys.push_back(dataset.trajectory(t).key);
    list.push_back({
        {"rank", i + 1},
        {"sequence", std::move(seq)},
        {"n_trajectories", cc.tids.size()},
        {"trajectories", std::move(keys)},
        {"users", users_of(cc, dataset)},
        {"cost_at_insertion", cc.cost_at_insertion},
        {"max_overlap_at_acceptance", cc.max_overlap_at_acceptance},
    });
  }
  doc["coclusters"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<CoCluster> parse_coclusters_document(std::string_view text, const Dataset& dataset) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid co-cluster document: ") + e.what());
  }
  std::vector<CoCluster> out;
  try {
    for (const json& rec : doc.at("coclusters")) {
      CoCluster cc;
      for (const json& name : rec.at("sequence")) {
        const auto id = dataset.find_element(name.get<std::string>());
        if (!id) {
          throw InputError("co-cluster document names unknown element '" +
                           name.get<std::string>() + "'");
        }
        cc.seq.push_back(*id);
      }
      for (const json& key : rec.at("trajectories")) {
        const auto tid = dataset.find_trajectory(key.get<std::string>());
        if (!tid) {
          throw InputError("co-cluster document names unknown trajectory '" +
                           key.get<std::string>() + "'");
        }
        cc.tids.push_back(*tid);
      }
      std::sort(cc.tids.begin(), cc.tids.end());
      cc.tids.erase(std::unique(cc.tids.begin(), cc.tids.end()), cc.tids.end());
      cc.cost_at_insertion = rec.at("cost_at_insertion").get<std::int64_t>();
      cc.max_overlap_at_acceptance = rec.at("max_overlap_at_acceptance").get<double>();
      out.push_back(std::move(cc));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed co-cluster document: ") + e.what());
  }
  return out;
}

std::string alluvial_csv(std::span<const CoCluster> results, const Dataset& dataset) {
  std::ostringstream out;
  out << "cluster_id,element,position,weight\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CoCluster& cc = results[i];
    for (std::size_t p = 0; p < cc.seq.size(); ++p) {
      out << (i + 1) << ',' << csv_escape(dataset.element_name(cc.seq[p])) << ',' << p << ','
          << cc.tids.size() << '\n';
    }
  }
  return out.str();
}

std::string metrics_document(const ResultReport& r) {
  json doc;
  doc["n_coclusters"] = r.n_coclusters;
  doc["avg_trajectories"] = optional_number(r.avg_trajectories);
  doc["avg_cost"] = optional_number(r.avg_cost);
  doc["n_unique_elements"] = r.n_unique_elements;
  doc["avg_seq_length"] = optional_number(r.avg_seq_length);
  doc["avg_users"] = optional_number(r.avg_users);
  doc["overall_entropy"] = r.overall_entropy;
  doc["cv_percent"] = json::object();
  for (const auto& [name, value] : r.cv) doc["cv_percent"][name] = value;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Files

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw InputError("failed writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move output into place at '" + path.string() + "'");
  }
}

void write_coclusters(std::span<const CoCluster> results, const Dataset& dataset,
                      const std::filesystem::path& path) {
  write_text_atomic(path, coclusters_document(results, dataset));
}

std::vector<CoCluster> read_coclusters(const std::filesystem::path& path, const Dataset& dataset) {
  return parse_coclusters_document(read_text(path), dataset);
}

void write_alluvial_flows(std::span<const CoCluster> results, const Dataset& dataset,
                          const std::filesystem::path& path) {
  write_text_atomic(path, alluvial_csv(results, dataset));
}

}  // namespace ococlus
