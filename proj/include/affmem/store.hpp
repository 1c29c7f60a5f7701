#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "affmem/session.hpp"

namespace affmem {

namespace fs = std::filesystem;

// Bundle file names. session.json, transcript.jsonl and affect.jsonl are
// required; physio.jsonl and embeddings.jsonl are optional.
inline constexpr std::string_view kSessionFile = "session.json";
inline constexpr std::string_view kTranscriptFile = "transcript.jsonl";
inline constexpr std::string_view kAffectFile = "affect.jsonl";
inline constexpr std::string_view kPhysioFile = "physio.jsonl";
inline constexpr std::string_view kEmbeddingsFile = "embeddings.jsonl";

// Parses a bundle directory without validating it. Malformed input raises
// DataError naming the file and line.
SessionData read_bundle(const fs::path& dir);

// Writes the canonical form of a session as a bundle.
void write_bundle(const Session& session, const fs::path& dir);

struct CatalogEntry {
  std::string session_id;
  fs::path path;
  std::string ingested_at;  // ISO 8601 UTC, microsecond resolution
  std::uint64_t seq = 0;    // ingest sequence number, breaks timestamp ties
  double duration = 0.0;
  std::size_t sentence_count = 0;
  bool has_physio = false;
  bool has_external_embeddings = false;

  bool operator==(const CatalogEntry&) const = default;
};

// A directory holding catalog.json plus sessions/<id>/ canonical bundles.
// Writers serialize through an advisory lock on catalog.lock.
class Store {
 public:
  explicit Store(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const noexcept { return root_; }

  // Validates and copies a bundle into the store; returns the session id.
  // Re-ingesting an existing id replaces it (with a warning).
  std::string ingest(const fs::path& dir, Diagnostics* diag = nullptr) const;

  // Most recently ingested first. A store that does not exist yet is empty.
  std::vector<CatalogEntry> list_sessions() const;

  // Session id or "latest". Throws NotFound.
  Session load_session(std::string_view selector) const;

  fs::path catalog_path() const { return root_ / "catalog.json"; }

 private:
  fs::path root_;
};

}  // namespace affmem
