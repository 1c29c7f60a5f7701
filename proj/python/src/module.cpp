#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>

#include "affmem/clustering.hpp"
#include "affmem/embeddings.hpp"
#include "affmem/salience.hpp"
#include "affmem/search.hpp"
#include "affmem/session.hpp"
#include "affmem/store.hpp"
#include "affmem/summarizer.hpp"

namespace py = pybind11;
using namespace affmem;

namespace {

std::map<ErrorKind, py::object>& error_classes() {
  static auto* classes = new std::map<ErrorKind, py::object>();
  return *classes;
}

py::object& warning_class() {
  static auto* cls = new py::object();
  return *cls;
}

// Replays collected warnings through Python's warnings module.
void emit(const Diagnostics& diag) {
  for (const auto& w : diag.warnings) {
    if (PyErr_WarnEx(warning_class().ptr(), w.c_str(), 2) != 0) throw py::error_already_set();
  }
}

Channel channel_arg(const std::string& name) { return parse_channel(name); }

ChannelWeights weights_arg(const std::optional<std::map<std::string, double>>& weights) {
  if (!weights) return default_salience_weights();
  ChannelWeights out;
  for (const auto& [name, w] : *weights) out[parse_channel(name)] = w;
  return out;
}

py::dict entry_dict(const CatalogEntry& e) {
  py::dict d;
  d["session_id"] = e.session_id;
  d["path"] = e.path.string();
  d["ingested_at"] = e.ingested_at;
  d["seq"] = e.seq;
  d["duration"] = e.duration;
  d["sentence_count"] = e.sentence_count;
  d["has_physio"] = e.has_physio;
  d["has_external_embeddings"] = e.has_external_embeddings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Affective memory augmentation engine";

  py::object base = py::reinterpret_steal<py::object>(
      PyErr_NewException("affmem.AffmemError", PyExc_Exception, nullptr));
  m.attr("AffmemError") = base;
  auto subclass = [&](const char* name, std::initializer_list<ErrorKind> kinds, py::handle parent) {
    py::object cls = py::reinterpret_steal<py::object>(
        PyErr_NewException((std::string("affmem.") + name).c_str(), parent.ptr(), nullptr));
    m.attr(name) = cls;
    for (ErrorKind k : kinds) error_classes()[k] = cls;
    return cls;
  };
  subclass("DataError", {ErrorKind::Data}, base);
  subclass("StoreError", {ErrorKind::Io}, base);
  subclass("NotFoundError", {ErrorKind::NotFound}, base);
  subclass("UnknownChannelError", {ErrorKind::UnknownChannel}, base);
  subclass("QuerySyntaxError", {ErrorKind::Syntax}, base);
  py::object analysis = subclass("AnalysisError",
                                 {ErrorKind::EmptyTranscript, ErrorKind::InvalidDimension,
                                  ErrorKind::NotAvailable, ErrorKind::InvalidK, ErrorKind::DimensionMismatch,
                                  ErrorKind::NoLexicalSentences, ErrorKind::InvalidN, ErrorKind::NoChannels,
                                  ErrorKind::EmptyRange},
                                 base);
  py::object invalid = py::reinterpret_steal<py::object>(
      PyErr_NewException("affmem.InvalidArgumentError",
                         py::make_tuple(base, py::handle(PyExc_ValueError)).ptr(), nullptr));
  m.attr("InvalidArgumentError") = invalid;
  error_classes()[ErrorKind::InvalidArgument] = invalid;
  (void)analysis;

  warning_class() = py::reinterpret_steal<py::object>(
      PyErr_NewException("affmem.AffmemWarning", PyExc_UserWarning, nullptr));
  m.attr("AffmemWarning") = warning_class();

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object cls = error_classes().at(e.kind());
      py::object exc = cls(e.what());
      exc.attr("kind") = to_string(e.kind());
      if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) {
        exc.attr("offset") = s->offset();
        exc.attr("expected") = s->expected();
      }
      if (const auto* u = dynamic_cast<const UnknownChannel*>(&e)) exc.attr("channel") = u->name();
      PyErr_SetObject(cls.ptr(), exc.ptr());
    }
  });

  py::class_<TranscriptSentence>(m, "Sentence")
      .def_readonly("index", &TranscriptSentence::index)
      .def_readonly("t_start", &TranscriptSentence::t_start)
      .def_readonly("t_end", &TranscriptSentence::t_end)
      .def_readonly("text", &TranscriptSentence::text)
      .def_readonly("non_lexical", &TranscriptSentence::non_lexical)
      .def("__repr__", [](const TranscriptSentence& s) {
        return "<Sentence " + std::to_string(s.index) + " " + py::repr(py::str(s.text)).cast<std::string>() + ">";
      });

  py::class_<Session>(m, "Session")
      .def_property_readonly("id", &Session::id)
      .def_property_readonly("label", &Session::label)
      .def_property_readonly("duration", &Session::duration)
      .def_property_readonly("sentences", &Session::sentences)
      .def_property_readonly("has_physio", [](const Session& s) { return s.physio().has_value(); })
      .def_property_readonly("has_external_embeddings",
                             [](const Session& s) { return s.external_embeddings().has_value(); })
      .def("conversation_segments",
           [](const Session& s) {
             Diagnostics diag;
             std::vector<std::pair<double, double>> out;
             for (const auto& seg : conversation_segments(s, &diag)) out.emplace_back(seg.t0, seg.t1);
             emit(diag);
             return out;
           })
      .def("__repr__", [](const Session& s) { return "<Session " + s.id() + ">"; });

  m.def(
      "load_bundle",
      [](const fs::path& dir) {
        Diagnostics diag;
        Session s = validate_session(read_bundle(dir), &diag);
        emit(diag);
        return s;
      },
      py::arg("path"), "Read and validate a session bundle directory.");

  py::class_<Store>(m, "Store")
      .def(py::init<fs::path>(), py::arg("root"))
      .def_property_readonly("root", &Store::root)
      .def(
          "ingest",
          [](const Store& store, const fs::path& dir) {
            Diagnostics diag;
            std::string id = store.ingest(dir, &diag);
            emit(diag);
            return id;
          },
          py::arg("path"))
      .def("list_sessions",
           [](const Store& store) {
             py::list out;
             for (const auto& e : store.list_sessions()) out.append(entry_dict(e));
             return out;
           })
      .def("load_session", &Store::load_session, py::arg("selector") = "latest");

  py::class_<ScoredSentence>(m, "ScoredSentence")
      .def_readonly("index", &ScoredSentence::index)
      .def_readonly("cluster", &ScoredSentence::cluster)
      .def_readonly("engagement", &ScoredSentence::engagement)
      .def_readonly("centroid_distance", &ScoredSentence::centroid_distance)
      .def_readonly("updated_distance", &ScoredSentence::updated_distance)
      .def_readonly("selected", &ScoredSentence::selected);

  py::class_<SummaryResult>(m, "SummaryResult")
      .def_readonly("n_requested", &SummaryResult::n_requested)
      .def_readonly("n_effective", &SummaryResult::n_effective)
      .def_readonly("scored", &SummaryResult::scored)
      .def_readonly("summary_text", &SummaryResult::summary_text)
      .def_readonly("summary_indices", &SummaryResult::summary_indices);

  m.def(
      "summarize",
      [](const Session& s, int n, std::uint64_t seed, bool use_affect, const std::string& embedder,
         std::optional<std::pair<double, double>> segment, std::size_t dim) {
        SummaryOptions options;
        options.seed = seed;
        options.use_affect = use_affect;
        if (embedder == "external") options.embedder = Embedder::External;
        else if (embedder != "builtin") throw Error(ErrorKind::InvalidArgument, "embedder must be builtin or external");
        if (segment) options.segment = Interval{segment->first, segment->second};
        options.embedding_dim = dim;
        Diagnostics diag;
        SummaryResult r = summarize(s, n, options, &diag);
        emit(diag);
        return r;
      },
      py::arg("session"), py::arg("n"), py::kw_only(), py::arg("seed") = 42, py::arg("use_affect") = true,
      py::arg("embedder") = "builtin", py::arg("segment") = py::none(),
      py::arg("embedding_dim") = kDefaultEmbeddingDim);

  m.def("sentence_engagement", &sentence_engagement, py::arg("session"), py::arg("sentence"));

  py::class_<Snippet>(m, "Snippet")
      .def_readonly("sentences", &Snippet::sentences)
      .def_readonly("center_t", &Snippet::center_t)
      .def_readonly("radius", &Snippet::radius)
      .def_property_readonly("text", [](const Snippet& s) {
        std::string out;
        for (const auto& x : s.sentences) out += (out.empty() ? "" : " ") + x.text;
        return out;
      });

  py::class_<SaliencePeak>(m, "SaliencePeak")
      .def_readonly("t", &SaliencePeak::t)
      .def_readonly("score", &SaliencePeak::score)
      .def_readonly("snippet", &SaliencePeak::snippet);

  m.def(
      "salience_series",
      [](const Session& s, std::optional<std::map<std::string, double>> weights, double hop, double window) {
        const SalienceSeries series = salience_series(s, weights_arg(weights), hop, window);
        py::dict used;
        for (const auto& [c, w] : series.channel_weights_used) used[py::str(std::string(to_string(c)))] = w;
        std::vector<double> times;
        for (std::size_t i = 0; i < series.values.size(); ++i) times.push_back(series.time_at(i));
        return py::make_tuple(times, series.values, used);
      },
      py::arg("session"), py::kw_only(), py::arg("weights") = py::none(), py::arg("hop") = kDefaultHop,
      py::arg("window") = kDefaultWindow, "Returns (times, values, channel_weights_used).");

  m.def(
      "resample_channel",
      [](const Session& s, const std::string& channel, double hop, double window) {
        const TimeSeries ts = resample_channel(s, channel_arg(channel), hop, window);
        std::vector<double> times;
        for (std::size_t i = 0; i < ts.size(); ++i) times.push_back(ts.time_at(i));
        return py::make_tuple(times, ts.values);
      },
      py::arg("session"), py::arg("channel"), py::kw_only(), py::arg("hop") = kDefaultHop,
      py::arg("window") = kDefaultWindow);

  m.def(
      "highlights",
      [](const Session& s, std::size_t n, std::optional<std::map<std::string, double>> weights, double hop,
         double window, std::optional<double> min_sep, double snippet_radius) {
        HighlightOptions options;
        options.weights = weights_arg(weights);
        options.hop = hop;
        options.window = window;
        options.min_sep = min_sep;
        options.snippet_radius = snippet_radius;
        return highlights(s, n, options);
      },
      py::arg("session"), py::arg("n") = 5, py::kw_only(), py::arg("weights") = py::none(),
      py::arg("hop") = kDefaultHop, py::arg("window") = kDefaultWindow, py::arg("min_sep") = py::none(),
      py::arg("snippet_radius") = 10.0);

  py::class_<SearchHit>(m, "SearchHit")
      .def_readonly("t", &SearchHit::t)
      .def_readonly("score", &SearchHit::score)
      .def_readonly("snippet", &SearchHit::snippet)
      .def_readonly("channel", &SearchHit::channel);

  m.def("format_query", [](const std::string& text) { return format_query(parse_query(text)); },
        py::arg("query"), "Parse a query and return its canonical spelling.");
  m.def(
      "search",
      [](const std::string& query, const Session& s) { return eval_query(parse_query(query), s); },
      py::arg("query"), py::arg("session"));
  m.def(
      "search",
      [](const std::string& query, const Store& store) { return eval_query(parse_query(query), store); },
      py::arg("query"), py::arg("store"));

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def(
      "embed_corpus", [](const std::vector<std::string>& texts, std::size_t dim) { return embed_corpus(texts, dim).vectors; },
      py::arg("sentences"), py::arg("dim") = kDefaultEmbeddingDim);

  py::class_<Clustering>(m, "Clustering")
      .def_readonly("k", &Clustering::k)
      .def_readonly("assignment", &Clustering::assignment)
      .def_readonly("centroids", &Clustering::centroids)
      .def_readonly("distances", &Clustering::distances)
      .def_readonly("iterations", &Clustering::iterations)
      .def_readonly("sse", &Clustering::sse)
      .def_readonly("sse_history", &Clustering::sse_history);
  m.def("kmeans", &kmeans, py::arg("points"), py::arg("k"), py::arg("seed") = 42);
}
