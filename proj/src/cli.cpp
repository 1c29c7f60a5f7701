#include "affmem/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "affmem/salience.hpp"
#include "affmem/search.hpp"
#include "affmem/store.hpp"
#include "affmem/summarizer.hpp"

namespace affmem::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

ordered_json sentence_json(const TranscriptSentence& s) {
  return {{"i", s.index}, {"t0", s.t_start}, {"t1", s.t_end}, {"text", s.text}};
}

ordered_json snippet_json(const Snippet& snippet) {
  ordered_json sentences = ordered_json::array();
  for (const auto& s : snippet.sentences) sentences.push_back(sentence_json(s));
  return {{"center_t", snippet.center_t}, {"radius", snippet.radius}, {"sentences", sentences}};
}

void print_snippet(std::ostream& out, const Snippet& snippet) {
  for (const auto& s : snippet.sentences) {
    out << "  [" << s.index << " " << fmt9(s.t_start) << "-" << fmt9(s.t_end) << "] " << s.text << "\n";
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Data:
    case ErrorKind::Io:
      return kExitData;
    case ErrorKind::InvalidArgument:
      return kExitUsage;
    default:
      return kExitAnalysis;
  }
}

struct Context {
  std::string store_root;
  bool json = false;
  std::ostream& out;
  std::ostream& err;

  Store store() const { return Store(store_root); }

  void flush_warnings(const Diagnostics& diag) const {
    for (const auto& w : diag.warnings) err << "warning: " << w << "\n";
  }

  void emit(const ordered_json& doc) const { out << doc.dump(2) << "\n"; }
};

int cmd_ingest(const Context& ctx, const std::string& dir) {
  Diagnostics diag;
  const std::string id = ctx.store().ingest(dir, &diag);
  ctx.flush_warnings(diag);
  if (ctx.json) {
    ctx.emit({{"session_id", id}});
  } else {
    ctx.out << "ingested " << id << "\n";
  }
  return kExitOk;
}

int cmd_sessions(const Context& ctx) {
  const auto entries = ctx.store().list_sessions();
  if (ctx.json) {
    ordered_json list = ordered_json::array();
    for (const auto& e : entries) {
      list.push_back({{"session_id", e.session_id},
                      {"path", e.path.string()},
                      {"ingested_at", e.ingested_at},
                      {"duration", e.duration},
                      {"sentence_count", e.sentence_count},
                      {"has_physio", e.has_physio},
                      {"has_external_embeddings", e.has_external_embeddings}});
    }
    ctx.emit({{"sessions", list}});
    return kExitOk;
  }
  for (const auto& e : entries) {
    ctx.out << e.session_id << "\t" << e.ingested_at << "\t" << fmt9(e.duration) << "s\t"
            << e.sentence_count << " sentences\tphysio=" << (e.has_physio ? "yes" : "no")
            << "\tembeddings=" << (e.has_external_embeddings ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

struct SummarizeArgs {
  std::string session;
  int n = 3;
  std::uint64_t seed = 42;
  bool no_affect = false;
  std::string embedder = "builtin";
  std::optional<std::size_t> segment;
};

int cmd_summarize(const Context& ctx, const SummarizeArgs& args) {
  const Session session = ctx.store().load_session(args.session);
  Diagnostics diag;
  SummaryOptions options;
  options.seed = args.seed;
  options.use_affect = !args.no_affect;
  options.embedder = args.embedder == "external" ? Embedder::External : Embedder::Builtin;
  if (args.segment) {
    const auto segments = conversation_segments(session, &diag);
    if (*args.segment >= segments.size()) {
      ctx.flush_warnings(diag);
      throw Error(ErrorKind::InvalidArgument, "segment " + std::to_string(*args.segment) +
                                                  " out of range (session has " +
                                                  std::to_string(segments.size()) + ")");
    }
    options.segment = segments[*args.segment];
  }
  const SummaryResult result = summarize(session, args.n, options, &diag);
  ctx.flush_warnings(diag);

  if (ctx.json) {
    ordered_json scored = ordered_json::array();
    for (const auto& s : result.scored) {
      scored.push_back({{"index", s.index},
                        {"cluster", s.cluster},
                        {"engagement", s.engagement},
                        {"centroid_distance", s.centroid_distance},
                        {"updated_distance", s.updated_distance},
                        {"selected", s.selected}});
    }
    ctx.emit({{"session", session.id()},
              {"n_requested", result.n_requested},
              {"n_effective", result.n_effective},
              {"summary_indices", result.summary_indices},
              {"summary_text", result.summary_text},
              {"scored", scored}});
  } else {
    ctx.out << result.summary_text << "\n";
  }
  return kExitOk;
}

struct HighlightArgs {
  std::string session;
  std::size_t top = 3;
  double window = kDefaultWindow;
  std::optional<double> min_sep;
};

int cmd_highlights(const Context& ctx, const HighlightArgs& args) {
  const Session session = ctx.store().load_session(args.session);
  HighlightOptions options;
  options.window = args.window;
  options.min_sep = args.min_sep;
  const auto peaks = highlights(session, args.top, options);

  if (ctx.json) {
    ordered_json list = ordered_json::array();
    for (const auto& p : peaks) {
      list.push_back({{"t", p.t}, {"score", p.score}, {"snippet", snippet_json(p.snippet)}});
    }
    ctx.emit({{"session", session.id()}, {"peaks", list}});
    return kExitOk;
  }
  std::size_t rank = 1;
  for (const auto& p : peaks) {
    ctx.out << "#" << rank++ << " t=" << fmt9(p.t) << " salience=" << fmt9(p.score) << "\n";
    print_snippet(ctx.out, p.snippet);
  }
  return kExitOk;
}

int cmd_search(const Context& ctx, const std::string& text) {
  const QueryAst ast = parse_query(text);
  const Session session = ctx.store().load_session(ast.session);
  const auto hits = eval_query(ast, session);

  if (ctx.json) {
    ordered_json list = ordered_json::array();
    for (const auto& h : hits) {
      list.push_back({{"t", h.t}, {"score", h.score}, {"channel", h.channel},
                      {"snippet", snippet_json(h.snippet)}});
    }
    ctx.emit({{"query", format_query(ast)}, {"session", session.id()}, {"hits", list}});
    return kExitOk;
  }
  std::size_t rank = 1;
  for (const auto& h : hits) {
    ctx.out << "#" << rank++ << " " << h.channel << " t=" << fmt9(h.t) << " score=" << fmt9(h.score) << "\n";
    print_snippet(ctx.out, h.snippet);
  }
  return kExitOk;
}

int cmd_export_salience(const Context& ctx, const std::string& selector, const std::string& path) {
  const Session session = ctx.store().load_session(selector);
  const SalienceSeries series = salience_series(session);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  file << "t,salience\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    file << fmt9(series.time_at(i)) << "," << fmt9(series.values[i]) << "\n";
  }
  file.flush();
  if (!file) throw IoError("error writing " + path);

  if (ctx.json) {
    ordered_json weights = ordered_json::object();
    for (const auto& [c, w] : series.channel_weights_used) weights[std::string(to_string(c))] = w;
    ctx.emit({{"session", session.id()},
              {"out", path},
              {"rows", series.values.size()},
              {"channel_weights_used", weights}});
  } else {
    ctx.out << "wrote " << series.values.size() << " rows to " << path << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affective memory augmentation: affect-weighted summaries and emotion search over recorded sessions",
               "affmem"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string store_root;
  bool json = false;
  app.add_option("--store", store_root, "Store directory (env AFFMEM_STORE, default ./affmem-store)");
  app.add_flag("--json", json, "Write one JSON document instead of text");

  std::string ingest_dir;
  auto* ingest = app.add_subcommand("ingest", "Validate a session bundle and add it to the store");
  ingest->add_option("dir", ingest_dir, "Bundle directory")->required();

  auto* sessions = app.add_subcommand("sessions", "List stored sessions, newest first");

  SummarizeArgs sum_args;
  std::size_t segment_index = 0;
  auto* summarize_cmd = app.add_subcommand("summarize", "Affect-weighted extractive summary");
  summarize_cmd->add_option("session", sum_args.session, "Session id or latest")->required();
  summarize_cmd->add_option("--n", sum_args.n, "Number of summary sentences")->required();
  summarize_cmd->add_option("--seed", sum_args.seed, "k-means seed")->capture_default_str();
  summarize_cmd->add_flag("--no-affect", sum_args.no_affect, "Ignore engagement (plain extractive baseline)");
  summarize_cmd->add_option("--embedder", sum_args.embedder, "builtin or external")
      ->check(CLI::IsMember({"builtin", "external"}))
      ->capture_default_str();
  auto* segment_opt =
      summarize_cmd->add_option("--segment", segment_index, "Conversation segment index (0-based)");

  HighlightArgs hl_args;
  double min_sep = 0.0;
  auto* highlights_cmd = app.add_subcommand("highlights", "Most salient moments with transcript snippets");
  highlights_cmd->add_option("session", hl_args.session, "Session id or latest")->required();
  highlights_cmd->add_option("--top", hl_args.top, "Number of highlights")->required()->check(CLI::PositiveNumber);
  highlights_cmd->add_option("--window", hl_args.window, "Sliding window in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* min_sep_opt = highlights_cmd->add_option("--min-sep", min_sep, "Minimum peak separation (default: window)")
                          ->check(CLI::NonNegativeNumber);

  std::string query;
  auto* search = app.add_subcommand("search", "Affective memory search, e.g. \"peak(happiness) top 3\"");
  search->add_option("query", query, "Query text")->required();

  std::string export_session;
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export-salience", "Write the fused salience series as CSV");
  export_cmd->add_option("session", export_session, "Session id or latest")->required();
  export_cmd->add_option("--out", export_out, "Output CSV file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (store_root.empty()) {
    const char* env = std::getenv(kStoreEnvVar);
    store_root = env && *env ? env : kDefaultStore;
  }
  Context ctx{store_root, json, out, err};

  try {
    if (*ingest) return cmd_ingest(ctx, ingest_dir);
    if (*sessions) return cmd_sessions(ctx);
    if (*summarize_cmd) {
      if (*segment_opt) sum_args.segment = segment_index;
      return cmd_summarize(ctx, sum_args);
    }
    if (*highlights_cmd) {
      if (*min_sep_opt) hl_args.min_sep = min_sep;
      return cmd_highlights(ctx, hl_args);
    }
    if (*search) return cmd_search(ctx, query);
    if (*export_cmd) return cmd_export_salience(ctx, export_session, export_out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (json) {
      ctx.emit({{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}});
    }
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    if (json) ctx.emit({{"error", {{"kind", "Internal"}, {"message", e.what()}}}});
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace affmem::cli
