#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "affmem/salience.hpp"
#include "affmem/session.hpp"

namespace affmem {

class Store;

// A search target: one of the resamplable channels or the fused salience.
struct SalienceChannel {
  bool operator==(const SalienceChannel&) const = default;
};
using SearchChannel = std::variant<Channel, SalienceChannel>;

std::string_view to_string(const SearchChannel& channel);

inline constexpr std::string_view kLatestSession = "latest";

struct QueryAst {
  SearchChannel channel = Channel::Happiness;
  int top_k = 1;
  std::string session{kLatestSession};
  std::optional<std::pair<double, double>> range;

  bool operator==(const QueryAst&) const = default;
};

// Grammar (keywords case-insensitive):
//   query   = "peak" "(" channel ")" [ "top" INT ] [ "in" SESSION ]
//             [ "between" NUM "and" NUM ] ;
// Throws SyntaxError (byte offset + expected tokens) or UnknownChannel.
QueryAst parse_query(std::string_view text);

// Canonical lower-case form with every clause spelled out.
std::string format_query(const QueryAst& ast);

struct SearchHit {
  Seconds t = 0.0;
  double score = 0.0;
  Snippet snippet;
  std::string channel;
};

inline constexpr double kSearchWindow = 3.0;
inline constexpr double kSearchHop = 1.0;
inline constexpr double kSearchMinSep = 3.0;
inline constexpr double kSearchSnippetRadius = 10.0;

// Evaluates a query against an already-loaded session.
std::vector<SearchHit> eval_query(const QueryAst& ast, const Session& session);

// Resolves ast.session in the store, then evaluates.
std::vector<SearchHit> eval_query(const QueryAst& ast, const Store& store);

}  // namespace affmem
