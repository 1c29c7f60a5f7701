#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affmem/error.hpp"

namespace affmem {

// Seconds from session start.
using Seconds = double;

enum class Emotion : std::size_t {
  Happiness = 0,
  Sadness,
  Fear,
  Disgust,
  Anger,
  Surprise,
  Neutral,
};

inline constexpr std::size_t kEmotionCount = 7;

// Canonical on-disk key order.
inline constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "happiness", "sadness", "fear", "disgust", "anger", "surprise", "neutral"};

using EmotionVector = std::array<double, kEmotionCount>;

struct TranscriptSentence {
  int index = 0;
  Seconds t_start = 0.0;
  Seconds t_end = 0.0;
  std::string text;
  // Set during validation when the text has no tokens.
  bool non_lexical = false;

  Seconds midpoint() const { return 0.5 * (t_start + t_end); }

  bool operator==(const TranscriptSentence&) const = default;
};

struct AffectFrame {
  Seconds t = 0.0;
  EmotionVector emotions{};
  std::optional<double> engagement;
  std::optional<double> eye_contact;
  std::optional<double> openness;

  double emotion(Emotion e) const { return emotions[static_cast<std::size_t>(e)]; }

  bool operator==(const AffectFrame&) const = default;
};

struct PhysioFrame {
  Seconds t = 0.0;
  std::optional<double> hr;
  std::optional<double> rr;

  bool operator==(const PhysioFrame&) const = default;
};

enum class AnnotationKind { ConversationStart, ConversationEnd, Note };

std::string_view to_string(AnnotationKind kind);
std::optional<AnnotationKind> parse_annotation_kind(std::string_view text);

struct Annotation {
  Seconds t = 0.0;
  AnnotationKind kind = AnnotationKind::Note;
  std::optional<std::string> text;

  bool operator==(const Annotation&) const = default;
};

// Unvalidated session contents as parsed from a bundle.
struct SessionData {
  std::string id;
  std::optional<std::string> label;
  Seconds duration = 0.0;
  std::vector<TranscriptSentence> sentences;
  std::vector<AffectFrame> affect;
  std::optional<std::vector<PhysioFrame>> physio;
  std::vector<Annotation> annotations;
  std::optional<std::vector<std::vector<double>>> external_embeddings;

  bool operator==(const SessionData&) const = default;
};

// A validated, immutable recording. Only validate_session constructs one.
class Session {
 public:
  const SessionData& data() const noexcept { return data_; }

  const std::string& id() const noexcept { return data_.id; }
  const std::optional<std::string>& label() const noexcept { return data_.label; }
  Seconds duration() const noexcept { return data_.duration; }
  const std::vector<TranscriptSentence>& sentences() const noexcept { return data_.sentences; }
  const std::vector<AffectFrame>& affect() const noexcept { return data_.affect; }
  const std::optional<std::vector<PhysioFrame>>& physio() const noexcept { return data_.physio; }
  const std::vector<Annotation>& annotations() const noexcept { return data_.annotations; }
  const std::optional<std::vector<std::vector<double>>>& external_embeddings() const noexcept {
    return data_.external_embeddings;
  }

  bool operator==(const Session&) const = default;

 private:
  explicit Session(SessionData data) : data_(std::move(data)) {}
  friend Session validate_session(SessionData raw, Diagnostics* diag);

  SessionData data_;
};

// Emotion vectors whose raw sum lies in this band are renormalized; others
// are dropped. More than kMaxRejectedFraction dropped frames fails the session.
inline constexpr double kEmotionSumTolerance = 0.02;
inline constexpr double kMaxRejectedFraction = 0.5;

inline constexpr double kMinHeartRate = 20.0;
inline constexpr double kMaxHeartRate = 250.0;
inline constexpr double kMinRespiratoryRate = 2.0;
inline constexpr double kMaxRespiratoryRate = 60.0;

// Checks every invariant of the session model. Recoverable defects (emotion
// drift, out-of-range frames) are repaired or dropped with a warning.
// Throws DataError otherwise.
Session validate_session(SessionData raw, Diagnostics* diag = nullptr);
Session validate_session(const Session& session, Diagnostics* diag = nullptr);

// Rescales an emotion vector so its components sum to exactly 1.0.
// Returns false if the vector cannot be normalized (zero sum).
bool normalize_emotions(EmotionVector& emotions);

struct Interval {
  Seconds t0 = 0.0;
  Seconds t1 = 0.0;

  bool contains(Seconds t) const { return t >= t0 && t <= t1; }
  bool operator==(const Interval&) const = default;
};

// Pairs conversation_start/conversation_end markers into time-ordered,
// non-overlapping intervals. Without markers the whole session is one segment.
std::vector<Interval> conversation_segments(const Session& session, Diagnostics* diag = nullptr);

struct Snippet {
  std::vector<TranscriptSentence> sentences;
  Seconds center_t = 0.0;
  Seconds radius = 0.0;

  bool operator==(const Snippet&) const = default;
};

// Sentences whose midpoint lies within t +/- radius, or the single nearest
// sentence (ties to the lower index) when none does.
Snippet snippet_at(const Session& session, Seconds t, Seconds radius);

}  // namespace affmem
