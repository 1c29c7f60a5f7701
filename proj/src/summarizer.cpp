#include "affmem/summarizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "affmem/clustering.hpp"

namespace affmem {

double sentence_engagement(const Session& session, const TranscriptSentence& sentence) {
  double in_span_sum = 0.0;
  std::size_t in_span = 0;
  double all_sum = 0.0;
  std::size_t all = 0;
  const AffectFrame* nearest = nullptr;
  double nearest_gap = std::numeric_limits<double>::infinity();
  const double mid = sentence.midpoint();

  for (const auto& f : session.affect()) {
    if (!f.engagement) continue;
    const double e = *f.engagement;
    all_sum += e;
    ++all;
    if (f.t >= sentence.t_start && f.t <= sentence.t_end) {
      in_span_sum += e;
      ++in_span;
    }
    const double gap = std::fabs(f.t - mid);
    if (gap < nearest_gap) {
      nearest_gap = gap;
      nearest = &f;
    }
  }

  double value = kDefaultEngagement;
  if (in_span > 0) {
    value = in_span_sum / static_cast<double>(in_span);
  } else if (nearest && nearest_gap <= kEngagementNearestWindow) {
    value = *nearest->engagement;
  } else if (all > 0) {
    value = all_sum / static_cast<double>(all);
  }
  return std::clamp(value, 0.0, 1.0);
}

SummaryResult summarize_vectors(const std::vector<TranscriptSentence>& sentences,
                                const std::vector<std::vector<double>>& embeddings,
                                const std::vector<double>& engagement, int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidN, "summary length n must be at least 1");
  if (sentences.empty()) throw Error(ErrorKind::NoLexicalSentences, "no lexical sentences to summarize");
  if (embeddings.size() != sentences.size() || engagement.size() != sentences.size()) {
    throw Error(ErrorKind::InvalidArgument, "embeddings and engagement must match the sentence count");
  }

  SummaryResult result;
  result.n_requested = n;
  result.n_effective = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), sentences.size()));

  const Clustering clusters = kmeans(embeddings, static_cast<std::size_t>(result.n_effective), seed);

  result.scored.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ScoredSentence s;
    s.index = sentences[i].index;
    s.cluster = clusters.assignment[i];
    s.engagement = engagement[i];
    s.centroid_distance = clusters.distances[i];
    s.updated_distance = s.centroid_distance * (1.0 - s.engagement);
    result.scored.push_back(s);
  }

  // Lowest updated distance per cluster; ties by centroid distance, then index.
  std::vector<std::size_t> best(clusters.k, sentences.size());
  for (std::size_t i = 0; i < result.scored.size(); ++i) {
    const auto& cand = result.scored[i];
    std::size_t& slot = best[cand.cluster];
    if (slot == sentences.size()) {
      slot = i;
      continue;
    }
    const auto& cur = result.scored[slot];
    if (std::tie(cand.updated_distance, cand.centroid_distance, cand.index) <
        std::tie(cur.updated_distance, cur.centroid_distance, cur.index)) {
      slot = i;
    }
  }
  for (std::size_t slot : best) result.scored[slot].selected = true;

  for (std::size_t i = 0; i < result.scored.size(); ++i) {
    if (!result.scored[i].selected) continue;
    result.summary_indices.push_back(result.scored[i].index);
    if (!result.summary_text.empty()) result.summary_text += ' ';
    result.summary_text += sentences[i].text;
  }
  return result;
}

SummaryResult summarize(const Session& session, int n, const SummaryOptions& options,
                        Diagnostics* diag) {
  if (n < 1) throw Error(ErrorKind::InvalidN, "summary length n must be at least 1");

  std::vector<TranscriptSentence> lexical;
  for (const auto& s : session.sentences()) {
    if (s.non_lexical) continue;
    if (options.segment && !options.segment->contains(s.midpoint())) continue;
    lexical.push_back(s);
  }
  if (lexical.empty()) {
    throw Error(ErrorKind::NoLexicalSentences,
                "session " + session.id() + " has no lexical sentences" +
                    (options.segment ? " in the selected segment" : ""));
  }

  std::vector<std::vector<double>> vectors;
  vectors.reserve(lexical.size());
  if (options.embedder == Embedder::External) {
    const EmbeddingMatrix ext = external_embeddings(session);
    for (const auto& s : lexical) vectors.push_back(ext.vectors[static_cast<std::size_t>(s.index)]);
  } else {
    std::vector<std::string> texts;
    texts.reserve(lexical.size());
    for (const auto& s : lexical) texts.push_back(s.text);
    vectors = embed_corpus(texts, options.embedding_dim).vectors;
  }

  std::vector<double> engagement;
  engagement.reserve(lexical.size());
  for (const auto& s : lexical) {
    engagement.push_back(options.use_affect ? sentence_engagement(session, s) : 0.0);
  }

  if (static_cast<std::size_t>(n) > lexical.size()) {
    warn(diag, "requested " + std::to_string(n) + " summary sentences but only " +
                   std::to_string(lexical.size()) + " lexical sentences exist; using " +
                   std::to_string(lexical.size()));
  }
  return summarize_vectors(lexical, vectors, engagement, n, options.seed);
}

}  // namespace affmem
