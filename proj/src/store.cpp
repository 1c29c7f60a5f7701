#include "affmem/store.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

namespace affmem {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kCatalogVersion = 1;

std::string where(std::string_view file, std::size_t line) {
  return std::string(file) + " line " + std::to_string(line);
}

double number_field(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(ctx + ": missing field \"" + key + "\"");
  if (!it->is_number()) throw DataError(ctx + ": field \"" + key + "\" must be a number");
  return it->get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw DataError(ctx + ": field \"" + key + "\" must be a number");
  return it->get<double>();
}

int int_field(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(ctx + ": missing field \"" + key + "\"");
  if (!it->is_number_integer()) throw DataError(ctx + ": field \"" + key + "\" must be an integer");
  return it->get<int>();
}

std::string string_field(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(ctx + ": missing field \"" + key + "\"");
  if (!it->is_string()) throw DataError(ctx + ": field \"" + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(ctx + ": field \"" + key + "\" must be a string");
  return it->get<std::string>();
}

// Calls fn(object, line_number) for every non-blank line.
void for_each_jsonl(const fs::path& file, std::string_view name,
                    const std::function<void(const json&, const std::string&)>& fn) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = where(name, lineno);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(ctx + ": invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw DataError(ctx + ": expected a JSON object");
    fn(obj, ctx);
  }
  if (in.bad()) throw IoError("error reading " + file.string());
}

fs::path require_file(const fs::path& dir, std::string_view name) {
  fs::path p = dir / name;
  if (!fs::is_regular_file(p)) {
    throw DataError("bundle " + dir.string() + " is missing required file " + std::string(name));
  }
  return p;
}

json read_json_file(const fs::path& file, std::string_view name) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(name) + ": invalid JSON (" + e.what() + ")");
  }
}

void write_text_atomic(const fs::path& file, const std::string& text) {
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("error writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) throw IoError("cannot replace " + file.string() + ": " + ec.message());
}

std::string now_iso8601() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto micros = duration_cast<microseconds>(now.time_since_epoch()).count() % 1000000;
  const std::time_t secs = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(micros));
  return buf;
}

class CatalogLock {
 public:
  explicit CatalogLock(const fs::path& file) {
    fd_ = ::open(file.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot open lock file " + file.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw IoError("cannot lock " + file.string());
    }
  }
  ~CatalogLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  CatalogLock(const CatalogLock&) = delete;
  CatalogLock& operator=(const CatalogLock&) = delete;

 private:
  int fd_ = -1;
};

struct Catalog {
  std::uint64_t next_seq = 1;
  std::vector<CatalogEntry> entries;
};

Catalog read_catalog(const fs::path& root) {
  Catalog catalog;
  const fs::path file = root / "catalog.json";
  if (!fs::exists(file)) return catalog;
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  try {
    const json doc = json::parse(in);
    if (doc.at("version").get<int>() != kCatalogVersion) {
      throw IoError("unsupported catalog version in " + file.string());
    }
    catalog.next_seq = doc.at("next_seq").get<std::uint64_t>();
    for (const auto& e : doc.at("sessions")) {
      CatalogEntry entry;
      entry.session_id = e.at("session_id").get<std::string>();
      entry.path = root / e.at("path").get<std::string>();
      entry.ingested_at = e.at("ingested_at").get<std::string>();
      entry.seq = e.at("seq").get<std::uint64_t>();
      entry.duration = e.at("duration").get<double>();
      entry.sentence_count = e.at("sentence_count").get<std::size_t>();
      entry.has_physio = e.at("has_physio").get<bool>();
      entry.has_external_embeddings = e.at("has_external_embeddings").get<bool>();
      catalog.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw IoError("corrupted catalog " + file.string() + ": " + e.what());
  }
  return catalog;
}

void write_catalog(const fs::path& root, const Catalog& catalog) {
  ordered_json doc;
  doc["version"] = kCatalogVersion;
  doc["next_seq"] = catalog.next_seq;
  doc["sessions"] = ordered_json::array();
  for (const auto& e : catalog.entries) {
    ordered_json j;
    j["session_id"] = e.session_id;
    j["path"] = fs::relative(e.path, root).generic_string();
    j["ingested_at"] = e.ingested_at;
    j["seq"] = e.seq;
    j["duration"] = e.duration;
    j["sentence_count"] = e.sentence_count;
    j["has_physio"] = e.has_physio;
    j["has_external_embeddings"] = e.has_external_embeddings;
    doc["sessions"].push_back(std::move(j));
  }
  write_text_atomic(root / "catalog.json", doc.dump(2) + "\n");
}

void sort_recent_first(std::vector<CatalogEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    return std::tie(a.ingested_at, a.seq) > std::tie(b.ingested_at, b.seq);
  });
}

}  // namespace

SessionData read_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("bundle directory " + dir.string() + " does not exist");
  const fs::path session_file = require_file(dir, kSessionFile);
  const fs::path transcript_file = require_file(dir, kTranscriptFile);
  const fs::path affect_file = require_file(dir, kAffectFile);

  SessionData raw;
  const json meta = read_json_file(session_file, kSessionFile);
  const std::string ctx(kSessionFile);
  if (!meta.is_object()) throw DataError(ctx + ": expected a JSON object");
  raw.id = string_field(meta, "id", ctx);
  raw.label = optional_string(meta, "label", ctx);
  raw.duration = number_field(meta, "duration", ctx);
  if (auto it = meta.find("annotations"); it != meta.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError(ctx + ": \"annotations\" must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& a = (*it)[i];
      const std::string actx = ctx + " annotation " + std::to_string(i);
      if (!a.is_object()) throw DataError(actx + ": expected an object");
      Annotation ann;
      ann.t = number_field(a, "t", actx);
      const std::string kind = string_field(a, "kind", actx);
      auto parsed = parse_annotation_kind(kind);
      if (!parsed) throw DataError(actx + ": unknown kind \"" + kind + "\"");
      ann.kind = *parsed;
      ann.text = optional_string(a, "text", actx);
      raw.annotations.push_back(std::move(ann));
    }
  }

  for_each_jsonl(transcript_file, kTranscriptFile, [&](const json& obj, const std::string& lctx) {
    TranscriptSentence s;
    s.index = int_field(obj, "i", lctx);
    s.t_start = number_field(obj, "t0", lctx);
    s.t_end = number_field(obj, "t1", lctx);
    s.text = string_field(obj, "text", lctx);
    raw.sentences.push_back(std::move(s));
  });

  for_each_jsonl(affect_file, kAffectFile, [&](const json& obj, const std::string& lctx) {
    AffectFrame f;
    f.t = number_field(obj, "t", lctx);
    auto it = obj.find("emotions");
    if (it == obj.end() || !it->is_object()) {
      throw DataError(lctx + ": missing object field \"emotions\"");
    }
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      const std::string key(kEmotionNames[e]);
      f.emotions[e] = number_field(*it, key.c_str(), lctx + " emotions");
    }
    f.engagement = optional_number(obj, "engagement", lctx);
    f.eye_contact = optional_number(obj, "eye_contact", lctx);
    f.openness = optional_number(obj, "openness", lctx);
    raw.affect.push_back(f);
  });

  if (fs::path p = dir / kPhysioFile; fs::is_regular_file(p)) {
    raw.physio.emplace();
    for_each_jsonl(p, kPhysioFile, [&](const json& obj, const std::string& lctx) {
      PhysioFrame f;
      f.t = number_field(obj, "t", lctx);
      f.hr = optional_number(obj, "hr", lctx);
      f.rr = optional_number(obj, "rr", lctx);
      raw.physio->push_back(f);
    });
  }

  if (fs::path p = dir / kEmbeddingsFile; fs::is_regular_file(p)) {
    raw.external_embeddings.emplace();
    for_each_jsonl(p, kEmbeddingsFile, [&](const json& obj, const std::string& lctx) {
      const int i = int_field(obj, "i", lctx);
      if (i != static_cast<int>(raw.external_embeddings->size())) {
        throw DataError(lctx + ": expected \"i\" = " +
                        std::to_string(raw.external_embeddings->size()) + ", found " + std::to_string(i));
      }
      auto it = obj.find("v");
      if (it == obj.end() || !it->is_array()) throw DataError(lctx + ": missing array field \"v\"");
      std::vector<double> v;
      v.reserve(it->size());
      for (const auto& x : *it) {
        if (!x.is_number()) throw DataError(lctx + ": \"v\" must contain only numbers");
        v.push_back(x.get<double>());
      }
      raw.external_embeddings->push_back(std::move(v));
    });
  }
  return raw;
}

void write_bundle(const Session& session, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  auto write_lines = [&](std::string_view name, const std::vector<ordered_json>& lines) {
    std::string text;
    for (const auto& l : lines) text += l.dump() + "\n";
    write_text_atomic(dir / name, text);
  };

  ordered_json meta;
  meta["id"] = session.id();
  if (session.label()) meta["label"] = *session.label();
  meta["duration"] = session.duration();
  meta["annotations"] = ordered_json::array();
  for (const auto& a : session.annotations()) {
    ordered_json j;
    j["t"] = a.t;
    j["kind"] = std::string(to_string(a.kind));
    if (a.text) j["text"] = *a.text;
    meta["annotations"].push_back(std::move(j));
  }
  write_text_atomic(dir / kSessionFile, meta.dump(2) + "\n");

  std::vector<ordered_json> lines;
  for (const auto& s : session.sentences()) {
    lines.push_back({{"i", s.index}, {"t0", s.t_start}, {"t1", s.t_end}, {"text", s.text}});
  }
  write_lines(kTranscriptFile, lines);

  lines.clear();
  for (const auto& f : session.affect()) {
    ordered_json j;
    j["t"] = f.t;
    ordered_json emotions;
    for (std::size_t e = 0; e < kEmotionCount; ++e) emotions[std::string(kEmotionNames[e])] = f.emotions[e];
    j["emotions"] = std::move(emotions);
    if (f.engagement) j["engagement"] = *f.engagement;
    if (f.eye_contact) j["eye_contact"] = *f.eye_contact;
    if (f.openness) j["openness"] = *f.openness;
    lines.push_back(std::move(j));
  }
  write_lines(kAffectFile, lines);

  fs::remove(dir / kPhysioFile, ec);
  if (session.physio()) {
    lines.clear();
    for (const auto& f : *session.physio()) {
      ordered_json j;
      j["t"] = f.t;
      if (f.hr) j["hr"] = *f.hr;
      if (f.rr) j["rr"] = *f.rr;
      lines.push_back(std::move(j));
    }
    write_lines(kPhysioFile, lines);
  }

  fs::remove(dir / kEmbeddingsFile, ec);
  if (session.external_embeddings()) {
    lines.clear();
    const auto& vecs = *session.external_embeddings();
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      lines.push_back({{"i", i}, {"v", vecs[i]}});
    }
    write_lines(kEmbeddingsFile, lines);
  }
}

std::string Store::ingest(const fs::path& dir, Diagnostics* diag) const {
  const Session session = validate_session(read_bundle(dir), diag);

  std::error_code ec;
  fs::create_directories(root_ / "sessions", ec);
  if (ec) throw IoError("cannot create store " + root_.string() + ": " + ec.message());

  CatalogLock lock(root_ / "catalog.lock");
  Catalog catalog = read_catalog(root_);

  const fs::path final_dir = root_ / "sessions" / session.id();
  const fs::path staging = root_ / "sessions" / ("." + session.id() + ".staging");
  fs::remove_all(staging, ec);
  write_bundle(session, staging);
  fs::remove_all(final_dir, ec);
  fs::rename(staging, final_dir, ec);
  if (ec) throw IoError("cannot move session into " + final_dir.string() + ": " + ec.message());

  auto existing = std::find_if(catalog.entries.begin(), catalog.entries.end(),
                               [&](const CatalogEntry& e) { return e.session_id == session.id(); });
  if (existing != catalog.entries.end()) {
    warn(diag, "session " + session.id() + " already ingested; replacing it");
    catalog.entries.erase(existing);
  }

  CatalogEntry entry;
  entry.session_id = session.id();
  entry.path = final_dir;
  entry.ingested_at = now_iso8601();
  entry.seq = catalog.next_seq++;
  entry.duration = session.duration();
  entry.sentence_count = session.sentences().size();
  entry.has_physio = session.physio().has_value();
  entry.has_external_embeddings = session.external_embeddings().has_value();
  catalog.entries.push_back(std::move(entry));
  sort_recent_first(catalog.entries);
  write_catalog(root_, catalog);
  return session.id();
}

std::vector<CatalogEntry> Store::list_sessions() const {
  auto entries = read_catalog(root_).entries;
  sort_recent_first(entries);
  return entries;
}

Session Store::load_session(std::string_view selector) const {
  const auto entries = list_sessions();
  const CatalogEntry* hit = nullptr;
  if (selector == "latest") {
    if (entries.empty()) throw NotFound("store " + root_.string() + " has no sessions");
    hit = &entries.front();
  } else {
    for (const auto& e : entries) {
      if (e.session_id == selector) {
        hit = &e;
        break;
      }
    }
    if (!hit) throw NotFound("no session \"" + std::string(selector) + "\" in store " + root_.string());
  }
  try {
    return validate_session(read_bundle(hit->path));
  } catch (const DataError& e) {
    throw IoError("stored session " + hit->session_id + " is unreadable: " + e.what());
  }
}

}  // namespace affmem
