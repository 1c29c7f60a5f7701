#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "affmem/session.hpp"

namespace affmem {

// Maximal runs of Unicode alphanumerics (Alphabetic, Nd, Nl, No), each
// lowercased with the simple case mapping. Invalid UTF-8 bytes separate tokens.
std::vector<std::string> tokenize(std::string_view text);

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = kFnvOffsetBasis;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

enum class EmbeddingSource { BuiltinHashedTfidf, External };

struct EmbeddingMatrix {
  std::vector<std::vector<double>> vectors;
  std::size_t dimension = 0;
  EmbeddingSource source = EmbeddingSource::BuiltinHashedTfidf;
  // Built-in only: false for sentences with no tokens (zero vector).
  std::vector<bool> lexical;
};

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

// Hashed TF-IDF embedding with document frequencies taken over this corpus.
// Token weight is (1 + ln count) * (ln((1 + S) / (1 + df)) + 1), hashed with
// FNV-1a 64 into index h mod D and signed by bit 63. Rows are L2-normalized.
EmbeddingMatrix embed_corpus(const std::vector<std::string>& sentences,
                             std::size_t dim = kDefaultEmbeddingDim);

// The session's precomputed vectors, unchanged. Throws NotAvailable if absent.
EmbeddingMatrix external_embeddings(const Session& session);

}  // namespace affmem
