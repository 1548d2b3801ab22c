#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ococlus/core.hpp"
#include "ococlus/ingest.hpp"
#include "ococlus/metrics.hpp"
#include "ococlus/miner.hpp"
#include "ococlus/oracle.hpp"

namespace py = pybind11;
using namespace ococlus;

namespace {

Sequence lookup(const Dataset& ds, const std::vector<std::string>& names) {
  Sequence seq;
  for (const std::string& n : names) {
    const auto id = ds.find_element(n);
    if (!id) return {};  // unknown element: empty support downstream
    seq.push_back(*id);
  }
  return seq;
}

std::vector<std::string> names_of(const Dataset& ds, const Sequence& seq) {
  std::vector<std::string> out;
  for (ElementId e : seq) out.push_back(ds.element_name(e));
  return out;
}

Dataset intern_py(const std::vector<std::vector<std::string>>& trajectories,
                  const std::optional<std::vector<std::string>>& keys,
                  const std::optional<std::vector<std::optional<std::string>>>& users) {
  if (keys && keys->size() != trajectories.size()) throw InputError("keys length mismatch");
  if (users && users->size() != trajectories.size()) throw InputError("users length mismatch");
  std::vector<RawTrajectory> raw;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    RawTrajectory r;
    if (keys) r.key = (*keys)[i];
    if (users) r.user = (*users)[i];
    r.elements = trajectories[i];
    raw.push_back(std::move(r));
  }
  return intern_corpus(raw);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Order-aware frequency-based co-clustering of semantic trajectories";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::enum_<StatMetric>(m, "StatMetric")
      .value("average", StatMetric::average)
      .value("zscore", StatMetric::zscore);
  py::enum_<Relevance>(m, "Relevance")
      .value("trajectory", Relevance::trajectory)
      .value("cost", Relevance::cost)
      .value("both", Relevance::both);

  py::class_<Dataset>(m, "Dataset")
      .def("__len__", &Dataset::size)
      .def_property_readonly("n_elements", &Dataset::n_elements)
      .def_property_readonly("n_users", &Dataset::n_users)
      .def_property_readonly("element_names", &Dataset::element_names)
      .def_property_readonly("keys",
                             [](const Dataset& ds) {
                               std::vector<std::string> keys;
                               for (const auto& t : ds.trajectories()) keys.push_back(t.key);
                               return keys;
                             })
      .def("trajectory",
           [](const Dataset& ds, TrajectoryId tid) {
             return names_of(ds, ds.trajectory(tid).elements);
           })
      .def("user", [](const Dataset& ds, TrajectoryId tid) { return ds.trajectory(tid).user; });

  m.def("intern_corpus", &intern_py, py::arg("trajectories"), py::arg("keys") = py::none(),
        py::arg("users") = py::none());
  m.def(
      "load_corpus",
      [](const std::filesystem::path& path, const std::string& format,
         const std::string& dimension) {
        const CorpusFormat f = format.empty() ? format_for_path(path) : parse_corpus_format(format);
        return load_corpus(path, f, dimension);
      },
      py::arg("path"), py::arg("format") = "", py::arg("dimension") = "");

  py::class_<MinerConfig>(m, "MinerConfig")
      .def(py::init([](std::size_t k, double epsilon, StatMetric stat_metric, double z,
                       Relevance relevance, bool frequent_only) {
             MinerConfig c{k, epsilon, stat_metric, z, relevance, frequent_only};
             c.validate();
             return c;
           }),
           py::arg("k"), py::arg("epsilon") = 0.2, py::arg("stat_metric") = StatMetric::zscore,
           py::arg("z") = 1.0, py::arg("relevance") = Relevance::both,
           py::arg("frequent_only") = true)
      .def_readwrite("k", &MinerConfig::k)
      .def_readwrite("epsilon", &MinerConfig::epsilon)
      .def_readwrite("stat_metric", &MinerConfig::stat_metric)
      .def_readwrite("z", &MinerConfig::z)
      .def_readwrite("relevance", &MinerConfig::relevance)
      .def_readwrite("frequent_only", &MinerConfig::frequent_only);

  py::class_<CoCluster>(m, "CoCluster")
      .def(py::init([](TidSet tids, Sequence seq) {
             std::sort(tids.begin(), tids.end());
             tids.erase(std::unique(tids.begin(), tids.end()), tids.end());
             return CoCluster{std::move(tids), std::move(seq), 0, 0.0};
           }),
           py::arg("tids"), py::arg("seq"))
      .def_readonly("tids", &CoCluster::tids)
      .def_readonly("seq", &CoCluster::seq)
      .def_readonly("cost_at_insertion", &CoCluster::cost_at_insertion)
      .def_readonly("max_overlap_at_acceptance", &CoCluster::max_overlap_at_acceptance)
      .def("sequence", [](const CoCluster& c, const Dataset& ds) { return names_of(ds, c.seq); })
      .def("__eq__", [](const CoCluster& a, const CoCluster& b) { return a == b; })
      .def("__repr__", [](const CoCluster& c) {
        return "<CoCluster |tids|=" + std::to_string(c.tids.size()) +
               " |seq|=" + std::to_string(c.seq.size()) +
               " cost=" + std::to_string(c.cost_at_insertion) + ">";
      });

  py::class_<MineResult>(m, "MineResult")
      .def_readonly("coclusters", &MineResult::coclusters)
      .def_property_readonly("n_candidates", [](const MineResult& r) { return r.trace.n_candidates; })
      .def_property_readonly("stop_reason",
                             [](const MineResult& r) { return to_string(r.trace.stop); })
      .def_property_readonly("iterations",
                             [](const MineResult& r) { return r.trace.iterations.size(); });

  m.def("mine", &mine, py::arg("dataset"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("prune", [](const std::vector<CoCluster>& phi, const MinerConfig& c) { return prune(phi, c); });
  m.def("cost", [](const CoCluster& cc, const std::vector<CoCluster>& phi) { return cost(cc, phi); },
        py::arg("cc"), py::arg("phi") = std::vector<CoCluster>{});
  m.def("max_overlap",
        [](const CoCluster& cc, const std::vector<CoCluster>& phi) { return max_overlap(cc, phi); });
  m.def(
      "support",
      [](const Dataset& ds, const std::vector<std::string>& names) {
        const Sequence seq = lookup(ds, names);
        if (seq.size() != names.size() || seq.empty()) return TidSet{};
        return support_of_contiguous(seq, IndexBundle(ds));
      },
      py::arg("dataset"), py::arg("sequence"));

  py::class_<ResultReport>(m, "ResultReport")
      .def_readonly("n_coclusters", &ResultReport::n_coclusters)
      .def_readonly("avg_trajectories", &ResultReport::avg_trajectories)
      .def_readonly("avg_cost", &ResultReport::avg_cost)
      .def_readonly("n_unique_elements", &ResultReport::n_unique_elements)
      .def_readonly("avg_seq_length", &ResultReport::avg_seq_length)
      .def_readonly("avg_users", &ResultReport::avg_users)
      .def_readonly("overall_entropy", &ResultReport::overall_entropy)
      .def_readonly("cv", &ResultReport::cv);
  m.def("report", [](const std::vector<CoCluster>& r, const Dataset& ds) { return report(r, ds); });

  m.def("coclusters_document",
        [](const std::vector<CoCluster>& r, const Dataset& ds) { return coclusters_document(r, ds); });
  m.def("alluvial_csv",
        [](const std::vector<CoCluster>& r, const Dataset& ds) { return alluvial_csv(r, ds); });

  m.def(
      "generate_corpus",
      [](std::uint64_t seed, std::size_t n, std::size_t alphabet, std::size_t len_min,
         std::size_t len_max,
         const std::vector<std::tuple<std::vector<std::string>, std::size_t, std::string>>& plants,
         double zipf, std::optional<std::size_t> n_users) {
        oracle::GeneratorSpec spec{seed, n, alphabet, len_min, len_max, {}, zipf, n_users};
        for (const auto& [pattern, carriers, position] : plants) {
          spec.plants.push_back({pattern, carriers, oracle::parse_plant_position(position)});
        }
        oracle::GeneratedCorpus g = oracle::generate_corpus(spec);
        std::vector<std::pair<std::vector<std::string>, TidSet>> truth;
        for (auto& t : g.truth) truth.emplace_back(std::move(t.pattern), std::move(t.carriers));
        return py::make_tuple(std::move(g.dataset), std::move(truth));
      },
      py::arg("seed"), py::arg("n_trajectories"), py::arg("alphabet_size"), py::arg("len_min") = 2,
      py::arg("len_max") = 10,
      py::arg("plants") =
          std::vector<std::tuple<std::vector<std::string>, std::size_t, std::string>>{},
      py::arg("zipf") = 0.0, py::arg("n_users") = py::none());
}
