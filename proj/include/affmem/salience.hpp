#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affmem/session.hpp"

namespace affmem {

// Resamplable channels. Declaration order is alphabetical by name, which is
// also the fusion order.
enum class Channel {
  Anger,
  Disgust,
  Engagement,
  Excitement,
  EyeContact,
  Fear,
  Happiness,
  Hr,
  Neutral,
  Openness,
  Rr,
  Sadness,
  Surprise,
};

inline constexpr std::size_t kChannelCount = 13;

inline constexpr std::array<Channel, kChannelCount> kAllChannels = {
    Channel::Anger,   Channel::Disgust, Channel::Engagement, Channel::Excitement, Channel::EyeContact,
    Channel::Fear,    Channel::Happiness, Channel::Hr,       Channel::Neutral,    Channel::Openness,
    Channel::Rr,      Channel::Sadness, Channel::Surprise};

std::string_view to_string(Channel channel);
// Accepts the canonical names plus "neutrality". Throws UnknownChannel.
Channel parse_channel(std::string_view name);

struct RawSample {
  Seconds t = 0.0;
  double value = 0.0;
};

// Raw (t, value) samples of a channel in time order; empty if the session
// does not carry it. excitement = min(1, happiness + surprise).
std::vector<RawSample> channel_samples(const Session& session, Channel channel);

struct TimeSeries {
  Seconds t0 = 0.0;
  Seconds hop = 1.0;
  std::vector<std::optional<double>> values;

  Seconds time_at(std::size_t i) const { return t0 + static_cast<double>(i) * hop; }
  std::size_t size() const { return values.size(); }
};

inline constexpr double kDefaultHop = 1.0;
inline constexpr double kDefaultWindow = 10.0;
inline constexpr double kNearestSampleWindow = 5.0;

// Number of grid points covering [0, duration] at the given hop.
std::size_t grid_size(Seconds duration, Seconds hop);

// Sliding-window mean on the grid 0, hop, 2*hop, ... <= duration. Empty
// windows take the nearest raw sample within 5 s, else stay missing.
TimeSeries resample_channel(const Session& session, Channel channel, Seconds hop = kDefaultHop,
                            Seconds window = kDefaultWindow);
TimeSeries resample_samples(const std::vector<RawSample>& samples, Seconds duration, Seconds hop,
                            Seconds window);

using ChannelWeights = std::map<Channel, double>;

ChannelWeights default_salience_weights();

struct SalienceSeries {
  Seconds t0 = 0.0;
  Seconds hop = 1.0;
  std::vector<double> values;
  ChannelWeights channel_weights_used;

  Seconds time_at(std::size_t i) const { return t0 + static_cast<double>(i) * hop; }
};

inline constexpr double kMadToSigma = 1.4826;

// Robust z-scores of the non-missing values: (x - median) / (1.4826 * MAD),
// falling back to the sample standard deviation when MAD is zero and to all
// zeros when that is zero too. Missing entries stay missing.
std::vector<std::optional<double>> robust_zscores(const std::vector<std::optional<double>>& values);

// Weighted mean of per-channel robust z-scores over the channels present at
// each grid point; 0 where every channel is missing. Throws NoChannels.
SalienceSeries salience_series(const Session& session,
                               const ChannelWeights& weights = default_salience_weights(),
                               Seconds hop = kDefaultHop, Seconds window = kDefaultWindow);

struct Peak {
  Seconds t = 0.0;
  double score = 0.0;

  bool operator==(const Peak&) const = default;
};

// Greedy non-maximum suppression: take the highest remaining value (earliest
// on ties), discard grid points closer than min_sep, repeat. Missing values
// are never picked.
std::vector<Peak> top_peaks(const TimeSeries& series, std::size_t n, Seconds min_sep);
std::vector<Peak> top_peaks(const SalienceSeries& series, std::size_t n, Seconds min_sep);

struct SaliencePeak {
  Seconds t = 0.0;
  double score = 0.0;
  Snippet snippet;
};

struct HighlightOptions {
  ChannelWeights weights = default_salience_weights();
  Seconds hop = kDefaultHop;
  Seconds window = kDefaultWindow;
  std::optional<Seconds> min_sep;  // defaults to window
  Seconds snippet_radius = 10.0;
};

std::vector<SaliencePeak> highlights(const Session& session, std::size_t n,
                                     const HighlightOptions& options = {});

}  // namespace affmem
