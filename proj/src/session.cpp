#include "affmem/session.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "affmem/embeddings.hpp"

namespace affmem {

std::string_view to_string(AnnotationKind kind) {
  switch (kind) {
    case AnnotationKind::ConversationStart: return "conversation_start";
    case AnnotationKind::ConversationEnd: return "conversation_end";
    case AnnotationKind::Note: return "note";
  }
  return "note";
}

std::optional<AnnotationKind> parse_annotation_kind(std::string_view text) {
  if (text == "conversation_start") return AnnotationKind::ConversationStart;
  if (text == "conversation_end") return AnnotationKind::ConversationEnd;
  if (text == "note") return AnnotationKind::Note;
  return std::nullopt;
}

namespace {

std::string fmt_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", t);
  return buf;
}

bool valid_session_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id == "latest") return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

bool in_unit(const std::optional<double>& v) {
  return !v || (std::isfinite(*v) && *v >= 0.0 && *v <= 1.0);
}

double emotion_sum(const EmotionVector& e) {
  double s = 0.0;
  for (double x : e) s += x;
  return s;
}

}  // namespace

bool normalize_emotions(EmotionVector& emotions) {
  double sum = emotion_sum(emotions);
  if (sum == 1.0) return true;
  if (!(sum > 0.0) || !std::isfinite(sum)) return false;
  for (double& x : emotions) x /= sum;
  // Division leaves a few ulps of residual; fold it into the largest
  // component until the left-to-right sum is exactly one.
  const auto largest = static_cast<std::size_t>(
      std::max_element(emotions.begin(), emotions.end()) - emotions.begin());
  for (int attempt = 0; attempt < 8; ++attempt) {
    sum = emotion_sum(emotions);
    if (sum == 1.0) return true;
    emotions[largest] += 1.0 - sum;
  }
  return emotion_sum(emotions) == 1.0;
}

Session validate_session(SessionData raw, Diagnostics* diag) {
  if (!valid_session_id(raw.id)) {
    throw DataError("invalid session id \"" + raw.id +
                    "\" (use letters, digits, '_', '-', '.'; \"latest\" is reserved)");
  }
  if (!std::isfinite(raw.duration) || raw.duration < 0.0) {
    throw DataError("session duration must be a finite non-negative number");
  }
  const double duration = raw.duration;
  auto in_session = [duration](double t) { return std::isfinite(t) && t >= 0.0 && t <= duration; };

  for (std::size_t i = 0; i < raw.sentences.size(); ++i) {
    auto& s = raw.sentences[i];
    if (s.index != static_cast<int>(i)) {
      throw DataError("sentence indices must run 0..S-1 in order; found " + std::to_string(s.index) +
                      " at position " + std::to_string(i));
    }
    if (!in_session(s.t_start) || !in_session(s.t_end)) {
      throw DataError("sentence " + std::to_string(i) + " timestamps outside [0, duration]");
    }
    if (s.t_start > s.t_end) {
      throw DataError("sentence " + std::to_string(i) + " has t_start " + fmt_time(s.t_start) +
                      " > t_end " + fmt_time(s.t_end));
    }
    if (i > 0 && s.t_start < raw.sentences[i - 1].t_start) {
      throw DataError("sentence start times must be non-decreasing (sentence " +
                      std::to_string(i) + ")");
    }
    if (s.text.empty()) throw DataError("sentence " + std::to_string(i) + " has empty text");
    s.non_lexical = tokenize(s.text).empty();
  }

  std::vector<AffectFrame> kept;
  kept.reserve(raw.affect.size());
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < raw.affect.size(); ++i) {
    AffectFrame f = raw.affect[i];
    if (!in_session(f.t)) {
      throw DataError("affect frame " + std::to_string(i) + " timestamp " + fmt_time(f.t) +
                      " outside [0, duration]");
    }
    if (i > 0 && !(f.t > raw.affect[i - 1].t)) {
      throw DataError("affect frame timestamps must be strictly increasing (frame " +
                      std::to_string(i) + ")");
    }
    const bool components_ok = std::all_of(f.emotions.begin(), f.emotions.end(), [](double x) {
      return std::isfinite(x) && x >= 0.0 && x <= 1.0;
    });
    const double sum = emotion_sum(f.emotions);
    if (!components_ok || std::fabs(sum - 1.0) > kEmotionSumTolerance) {
      warn(diag, "dropping affect frame at t=" + fmt_time(f.t) + ": emotion sum " + fmt_time(sum) +
                     " outside [0.98, 1.02]");
      ++rejected;
      continue;
    }
    if (!in_unit(f.engagement) || !in_unit(f.eye_contact) || !in_unit(f.openness)) {
      warn(diag, "dropping affect frame at t=" + fmt_time(f.t) + ": channel value outside [0, 1]");
      ++rejected;
      continue;
    }
    if (!normalize_emotions(f.emotions)) {
      warn(diag, "dropping affect frame at t=" + fmt_time(f.t) + ": emotions not normalizable");
      ++rejected;
      continue;
    }
    kept.push_back(f);
  }
  if (!raw.affect.empty() &&
      static_cast<double>(rejected) > kMaxRejectedFraction * static_cast<double>(raw.affect.size())) {
    throw DataError(std::to_string(rejected) + " of " + std::to_string(raw.affect.size()) +
                    " affect frames rejected (more than 50%)");
  }
  raw.affect = std::move(kept);

  if (raw.physio) {
    std::vector<PhysioFrame> physio;
    const auto& frames = *raw.physio;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const PhysioFrame& f = frames[i];
      if (!in_session(f.t)) {
        throw DataError("physio frame " + std::to_string(i) + " timestamp " + fmt_time(f.t) +
                        " outside [0, duration]");
      }
      if (i > 0 && !(f.t > frames[i - 1].t)) {
        throw DataError("physio frame timestamps must be strictly increasing (frame " +
                        std::to_string(i) + ")");
      }
      const bool hr_ok = !f.hr || (std::isfinite(*f.hr) && *f.hr >= kMinHeartRate && *f.hr <= kMaxHeartRate);
      const bool rr_ok = !f.rr || (std::isfinite(*f.rr) && *f.rr >= kMinRespiratoryRate &&
                                   *f.rr <= kMaxRespiratoryRate);
      if (!hr_ok || !rr_ok) {
        warn(diag, "dropping physio frame at t=" + fmt_time(f.t) + ": " +
                       (!hr_ok ? "hr outside [20, 250]" : "rr outside [2, 60]"));
        continue;
      }
      physio.push_back(f);
    }
    raw.physio = std::move(physio);
  }

  for (const auto& a : raw.annotations) {
    if (!in_session(a.t)) {
      throw DataError("annotation at t=" + fmt_time(a.t) + " outside [0, duration]");
    }
  }
  std::stable_sort(raw.annotations.begin(), raw.annotations.end(),
                   [](const Annotation& a, const Annotation& b) { return a.t < b.t; });

  if (raw.external_embeddings) {
    const auto& vecs = *raw.external_embeddings;
    if (vecs.size() != raw.sentences.size()) {
      throw DataError("embeddings count " + std::to_string(vecs.size()) +
                      " does not match sentence count " + std::to_string(raw.sentences.size()));
    }
    if (!vecs.empty()) {
      const std::size_t dim = vecs.front().size();
      if (dim < 1) throw DataError("embedding dimension must be at least 1");
      for (std::size_t i = 0; i < vecs.size(); ++i) {
        if (vecs[i].size() != dim) {
          throw DataError("embedding " + std::to_string(i) + " has dimension " +
                          std::to_string(vecs[i].size()) + ", expected " + std::to_string(dim));
        }
        for (double x : vecs[i]) {
          if (!std::isfinite(x)) throw DataError("embedding " + std::to_string(i) + " is not finite");
        }
      }
    }
  }

  return Session(std::move(raw));
}

Session validate_session(const Session& session, Diagnostics* diag) {
  return validate_session(session.data(), diag);
}

std::vector<Interval> conversation_segments(const Session& session, Diagnostics* diag) {
  std::vector<Interval> segments;
  bool is_open = false;
  Seconds open_t = 0.0;
  bool saw_marker = false;
  for (const auto& a : session.annotations()) {
    if (a.kind == AnnotationKind::ConversationStart) {
      saw_marker = true;
      if (is_open) {
        warn(diag, "conversation_start at t=" + fmt_time(a.t) +
                       " inside an open conversation; merged into it");
        continue;
      }
      is_open = true;
      open_t = a.t;
    } else if (a.kind == AnnotationKind::ConversationEnd) {
      saw_marker = true;
      if (is_open) {
        segments.push_back({open_t, a.t});
        is_open = false;
      } else if (segments.empty()) {
        warn(diag, "conversation_end at t=" + fmt_time(a.t) +
                       " without a start; opening at session start");
        segments.push_back({0.0, a.t});
      } else {
        warn(diag, "conversation_end at t=" + fmt_time(a.t) + " without a start; ignored");
      }
    }
  }
  if (is_open) {
    warn(diag, "conversation_start at t=" + fmt_time(open_t) +
                   " never closed; closing at session end");
    segments.push_back({open_t, session.duration()});
  }
  if (!saw_marker) segments.push_back({0.0, session.duration()});
  return segments;
}

Snippet snippet_at(const Session& session, Seconds t, Seconds radius) {
  const auto& sentences = session.sentences();
  if (sentences.empty()) {
    throw Error(ErrorKind::EmptyTranscript, "session " + session.id() + " has no transcript sentences");
  }
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "snippet radius must be positive");

  Snippet snippet{{}, t, radius};
  for (const auto& s : sentences) {
    const double mid = s.midpoint();
    if (mid >= t - radius && mid <= t + radius) snippet.sentences.push_back(s);
  }
  if (snippet.sentences.empty()) {
    std::size_t best = 0;
    double best_gap = std::fabs(sentences[0].midpoint() - t);
    for (std::size_t i = 1; i < sentences.size(); ++i) {
      const double gap = std::fabs(sentences[i].midpoint() - t);
      if (gap < best_gap) {
        best = i;
        best_gap = gap;
      }
    }
    snippet.sentences.push_back(sentences[best]);
  }
  return snippet;
}

}  // namespace affmem
