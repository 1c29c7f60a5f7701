#include "affmem/embeddings.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace affmem {

namespace {

bool is_alphanumeric(UChar32 c) {
  if (u_hasBinaryProperty(c, UCHAR_ALPHABETIC)) return true;
  switch (u_charType(c)) {
    case U_DECIMAL_DIGIT_NUMBER:
    case U_LETTER_NUMBER:
    case U_OTHER_NUMBER:
      return true;
    default:
      return false;
  }
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0 && is_alphanumeric(c)) {
      append_utf8(current, u_tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

EmbeddingMatrix embed_corpus(const std::vector<std::string>& sentences, std::size_t dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidDimension, "embedding dimension must be at least 2");
  if (sentences.empty()) throw Error(ErrorKind::InvalidArgument, "embed_corpus needs at least one sentence");

  // Per sentence: distinct tokens in first-appearance order with counts.
  struct TermCounts {
    std::vector<std::string> order;
    std::unordered_map<std::string, int> counts;
  };
  std::vector<TermCounts> docs(sentences.size());
  std::unordered_map<std::string, int> df;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (auto& tok : tokenize(sentences[s])) {
      auto [it, inserted] = docs[s].counts.try_emplace(tok, 0);
      if (inserted) {
        docs[s].order.push_back(tok);
        ++df[tok];
      }
      ++it->second;
    }
  }

  const double corpus_size = static_cast<double>(sentences.size());
  EmbeddingMatrix out;
  out.dimension = dim;
  out.source = EmbeddingSource::BuiltinHashedTfidf;
  out.vectors.assign(sentences.size(), std::vector<double>(dim, 0.0));
  out.lexical.assign(sentences.size(), false);

  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto& v = out.vectors[s];
    for (const auto& tok : docs[s].order) {
      const std::uint64_t h = fnv1a64(tok);
      const double sign = (h >> 63) ? -1.0 : 1.0;
      const double tf = 1.0 + std::log(static_cast<double>(docs[s].counts.at(tok)));
      const double idf = std::log((1.0 + corpus_size) / (1.0 + static_cast<double>(df.at(tok)))) + 1.0;
      v[h % dim] += sign * tf * idf;
    }
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 > 0.0) {
      const double norm = std::sqrt(norm2);
      for (double& x : v) x /= norm;
    }
    out.lexical[s] = !docs[s].order.empty();
  }
  return out;
}

EmbeddingMatrix external_embeddings(const Session& session) {
  const auto& ext = session.external_embeddings();
  if (!ext) {
    throw Error(ErrorKind::NotAvailable, "session " + session.id() + " has no external embeddings");
  }
  EmbeddingMatrix out;
  out.vectors = *ext;
  out.dimension = ext->empty() ? 0 : ext->front().size();
  out.source = EmbeddingSource::External;
  out.lexical.reserve(ext->size());
  for (const auto& s : session.sentences()) out.lexical.push_back(!s.non_lexical);
  return out;
}

}  // namespace affmem
