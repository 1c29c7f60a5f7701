#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "affmem/session.hpp"

namespace affmem::testing {

inline EmotionVector neutral_emotions() { return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}; }

inline EmotionVector emotions_with(Emotion e, double p) {
  EmotionVector v{};
  v[static_cast<std::size_t>(e)] = p;
  v[static_cast<std::size_t>(Emotion::Neutral)] += 1.0 - p;
  return v;
}

inline AffectFrame frame(double t, std::optional<double> engagement = std::nullopt) {
  AffectFrame f;
  f.t = t;
  f.emotions = neutral_emotions();
  f.engagement = engagement;
  return f;
}

inline TranscriptSentence sentence(int i, double t0, double t1, std::string text) {
  TranscriptSentence s;
  s.index = i;
  s.t_start = t0;
  s.t_end = t1;
  s.text = std::move(text);
  return s;
}

inline SessionData basic_data(std::string id = "s1", double duration = 60.0) {
  SessionData d;
  d.id = std::move(id);
  d.duration = duration;
  return d;
}

// Random but valid session: sentences tiled over the duration, affect at
// 1 Hz with engagement, random words from a small vocabulary.
inline SessionData random_session_data(std::mt19937_64& rng, int n_sentences) {
  static const std::vector<std::string> vocab = {
      "we",     "talked", "about", "the",    "garden", "trip",   "coffee", "tomorrow", "project",
      "deadline", "music", "dinner", "really", "great", "idea",   "maybe",  "weekend",  "budget",
      "sister", "movie",  "remember", "plan", "travel", "school", "friend", "happy",   "worried"};
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(2, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SessionData d;
  d.id = "rand";
  const double per = 3.0;
  d.duration = per * n_sentences + 1.0;
  for (int i = 0; i < n_sentences; ++i) {
    std::string text;
    const int words = len(rng);
    for (int w = 0; w < words; ++w) {
      if (w) text += ' ';
      text += vocab[word(rng)];
    }
    text += '.';
    d.sentences.push_back(sentence(i, per * i, per * i + 2.5, text));
  }
  for (int t = 0; t <= static_cast<int>(d.duration); ++t) {
    AffectFrame f = frame(t, unit(rng));
    const double h = unit(rng) * 0.6;
    f.emotions = emotions_with(Emotion::Happiness, h);
    d.affect.push_back(f);
  }
  return d;
}

inline std::filesystem::path fixture_dir(const std::string& name) {
  return std::filesystem::path(AFFMEM_FIXTURE_DIR) / name;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  auto p = std::filesystem::temp_directory_path() /
           ("affmem-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace affmem::testing
