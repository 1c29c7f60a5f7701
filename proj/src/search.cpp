#include "affmem/search.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "affmem/store.hpp"

namespace affmem {

std::string_view to_string(const SearchChannel& channel) {
  if (std::holds_alternative<SalienceChannel>(channel)) return "salience";
  return to_string(std::get<Channel>(channel));
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  QueryAst parse() {
    QueryAst ast;
    keyword("peak", {"\"peak\""});
    punct('(');
    ast.channel = channel();
    punct(')');

    std::vector<std::string> expected = {"\"top\"", "\"in\"", "\"between\"", "end of input"};
    if (peek_keyword("top")) {
      next_word();
      ast.top_k = integer();
      expected.erase(expected.begin());
    }
    if (peek_keyword("in")) {
      next_word();
      ast.session = session();
      expected = {"\"between\"", "end of input"};
    }
    if (peek_keyword("between")) {
      next_word();
      const double a = number();
      keyword("and", {"\"and\""});
      skip_ws();
      const std::size_t b_offset = pos_;
      const double b = number();
      if (!(a < b)) {
        throw SyntaxError(b_offset, {"number greater than " + format_number(a)}, describe(b_offset));
      }
      ast.range = std::make_pair(a, b);
      expected = {"end of input"};
    }
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError(pos_, expected, describe(pos_));
    return ast;
  }

  static std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
    return std::string(buf, res.ptr);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string describe(std::size_t at) const {
    if (at >= text_.size()) return "end of input";
    std::size_t end = at;
    while (end < text_.size() && is_word_char(text_[end])) ++end;
    if (end == at) end = at + 1;
    return "\"" + std::string(text_.substr(at, end - at)) + "\"";
  }

  std::string_view peek_word() {
    skip_ws();
    std::size_t end = pos_;
    while (end < text_.size() && is_word_char(text_[end])) ++end;
    return text_.substr(pos_, end - pos_);
  }

  std::string_view next_word() {
    auto w = peek_word();
    pos_ += w.size();
    return w;
  }

  bool peek_keyword(std::string_view kw) { return lower(peek_word()) == kw; }

  void keyword(std::string_view kw, std::vector<std::string> expected) {
    if (!peek_keyword(kw)) throw SyntaxError(pos_, std::move(expected), describe(pos_));
    next_word();
  }

  void punct(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      throw SyntaxError(pos_, {std::string("\"") + c + "\""}, describe(pos_));
    }
    ++pos_;
  }

  SearchChannel channel() {
    auto w = peek_word();
    if (w.empty()) throw SyntaxError(pos_, {"channel name"}, describe(pos_));
    next_word();
    const std::string name = lower(w);
    if (name == "salience") return SalienceChannel{};
    try {
      return parse_channel(name);
    } catch (const UnknownChannel&) {
      throw UnknownChannel(std::string(w));
    }
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    int value = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + end, value);
    if (end == start || res.ec != std::errc() || value < 1 ||
        (end < text_.size() && is_word_char(text_[end]))) {
      throw SyntaxError(start, {"integer >= 1"}, describe(start));
    }
    pos_ = end;
    return value;
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      const std::size_t from = end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      return end > from;
    };
    bool ok = digits();
    if (ok && end < text_.size() && text_[end] == '.') {
      ++end;
      ok = digits();
    }
    double value = 0.0;
    if (ok) {
      auto res = std::from_chars(text_.data() + start, text_.data() + end, value,
                                 std::chars_format::fixed);
      ok = res.ec == std::errc() && std::isfinite(value) &&
           !(end < text_.size() && is_word_char(text_[end]));
    }
    if (!ok) throw SyntaxError(start, {"number >= 0"}, describe(start));
    pos_ = end;
    return value;
  }

  std::string session() {
    auto w = peek_word();
    if (w.empty()) throw SyntaxError(pos_, {"session id", "\"latest\""}, describe(pos_));
    next_word();
    if (lower(w) == kLatestSession) return std::string(kLatestSession);
    return std::string(w);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

QueryAst parse_query(std::string_view text) { return QueryParser(text).parse(); }

std::string format_query(const QueryAst& ast) {
  std::string out = "peak(";
  out += to_string(ast.channel);
  out += ") top " + std::to_string(ast.top_k) + " in ";
  out += ast.session == kLatestSession ? std::string(kLatestSession) : ast.session;
  if (ast.range) {
    out += " between " + QueryParser::format_number(ast.range->first) + " and " +
           QueryParser::format_number(ast.range->second);
  }
  return out;
}

std::vector<SearchHit> eval_query(const QueryAst& ast, const Session& session) {
  if (session.sentences().empty()) {
    throw Error(ErrorKind::EmptyTranscript, "session " + session.id() + " has no transcript sentences");
  }
  TimeSeries series;
  if (std::holds_alternative<SalienceChannel>(ast.channel)) {
    const SalienceSeries s = salience_series(session);
    series.t0 = s.t0;
    series.hop = s.hop;
    series.values.assign(s.values.begin(), s.values.end());
  } else {
    const Channel ch = std::get<Channel>(ast.channel);
    const auto samples = channel_samples(session, ch);
    if (samples.empty()) {
      throw Error(ErrorKind::NoChannels, "session " + session.id() + " has no " +
                                             std::string(to_string(ch)) + " data");
    }
    series = resample_samples(samples, session.duration(), kSearchHop, kSearchWindow);
  }

  if (ast.range) {
    const auto [a, b] = *ast.range;
    bool any = false;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double t = series.time_at(i);
      if (t < a || t > b) {
        series.values[i].reset();
      } else {
        any = true;
      }
    }
    if (!any) {
      throw Error(ErrorKind::EmptyRange, "no grid points between " + QueryParser::format_number(a) +
                                             " and " + QueryParser::format_number(b));
    }
  }

  std::vector<SearchHit> hits;
  for (const Peak& p : top_peaks(series, static_cast<std::size_t>(ast.top_k), kSearchMinSep)) {
    hits.push_back({p.t, p.score, snippet_at(session, p.t, kSearchSnippetRadius),
                    std::string(to_string(ast.channel))});
  }
  return hits;
}

std::vector<SearchHit> eval_query(const QueryAst& ast, const Store& store) {
  return eval_query(ast, store.load_session(ast.session));
}

}  // namespace affmem
