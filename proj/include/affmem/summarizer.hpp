#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affmem/embeddings.hpp"
#include "affmem/session.hpp"

namespace affmem {

// One lexical sentence in the summary ledger. engagement is the affective
// score; updated_distance = centroid_distance * (1 - engagement).
struct ScoredSentence {
  int index = 0;
  std::size_t cluster = 0;
  double engagement = 0.0;
  double centroid_distance = 0.0;
  double updated_distance = 0.0;
  bool selected = false;

  bool operator==(const ScoredSentence&) const = default;
};

struct SummaryResult {
  int n_requested = 0;
  int n_effective = 0;
  std::vector<ScoredSentence> scored;
  std::string summary_text;
  std::vector<int> summary_indices;

  bool operator==(const SummaryResult&) const = default;
};

enum class Embedder { Builtin, External };

struct SummaryOptions {
  std::uint64_t seed = 42;
  Embedder embedder = Embedder::Builtin;
  bool use_affect = true;
  std::optional<Interval> segment;
  std::size_t embedding_dim = kDefaultEmbeddingDim;
};

// Frames further than this from a sentence midpoint are not used as the
// nearest-frame fallback.
inline constexpr double kEngagementNearestWindow = 5.0;
inline constexpr double kDefaultEngagement = 0.5;

// Mean engagement over frames inside [t_start, t_end], falling back to the
// nearest frame within 5 s of the midpoint, then to the session mean, then 0.5.
double sentence_engagement(const Session& session, const TranscriptSentence& sentence);

// Affect-weighted extractive summary: cluster lexical sentences into
// min(n, #lexical) groups and keep the member of each group with the lowest
// engagement-discounted centroid distance, in original order.
SummaryResult summarize(const Session& session, int n, const SummaryOptions& options = {},
                        Diagnostics* diag = nullptr);

// The selection core, on explicit embeddings and engagements (one per
// sentence). Exposed for testing the algorithm independently of a session.
SummaryResult summarize_vectors(const std::vector<TranscriptSentence>& sentences,
                                const std::vector<std::vector<double>>& embeddings,
                                const std::vector<double>& engagement, int n,
                                std::uint64_t seed);

}  // namespace affmem
