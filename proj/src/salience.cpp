#include "affmem/salience.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace affmem {

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::Anger: return "anger";
    case Channel::Disgust: return "disgust";
    case Channel::Engagement: return "engagement";
    case Channel::Excitement: return "excitement";
    case Channel::EyeContact: return "eye_contact";
    case Channel::Fear: return "fear";
    case Channel::Happiness: return "happiness";
    case Channel::Hr: return "hr";
    case Channel::Neutral: return "neutral";
    case Channel::Openness: return "openness";
    case Channel::Rr: return "rr";
    case Channel::Sadness: return "sadness";
    case Channel::Surprise: return "surprise";
  }
  return "?";
}

Channel parse_channel(std::string_view name) {
  for (Channel c : kAllChannels) {
    if (to_string(c) == name) return c;
  }
  if (name == "neutrality") return Channel::Neutral;
  throw UnknownChannel(std::string(name));
}

namespace {

std::optional<double> affect_value(const AffectFrame& f, Channel channel) {
  switch (channel) {
    case Channel::Anger: return f.emotion(Emotion::Anger);
    case Channel::Disgust: return f.emotion(Emotion::Disgust);
    case Channel::Fear: return f.emotion(Emotion::Fear);
    case Channel::Happiness: return f.emotion(Emotion::Happiness);
    case Channel::Neutral: return f.emotion(Emotion::Neutral);
    case Channel::Sadness: return f.emotion(Emotion::Sadness);
    case Channel::Surprise: return f.emotion(Emotion::Surprise);
    case Channel::Excitement:
      return std::min(1.0, f.emotion(Emotion::Happiness) + f.emotion(Emotion::Surprise));
    case Channel::Engagement: return f.engagement;
    case Channel::EyeContact: return f.eye_contact;
    case Channel::Openness: return f.openness;
    case Channel::Hr:
    case Channel::Rr:
      break;
  }
  return std::nullopt;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<RawSample> channel_samples(const Session& session, Channel channel) {
  std::vector<RawSample> out;
  if (channel == Channel::Hr || channel == Channel::Rr) {
    if (!session.physio()) return out;
    for (const auto& f : *session.physio()) {
      const auto& v = channel == Channel::Hr ? f.hr : f.rr;
      if (v) out.push_back({f.t, *v});
    }
    return out;
  }
  for (const auto& f : session.affect()) {
    if (auto v = affect_value(f, channel)) out.push_back({f.t, *v});
  }
  return out;
}

std::size_t grid_size(Seconds duration, Seconds hop) {
  return static_cast<std::size_t>(std::floor(duration / hop + 1e-9)) + 1;
}

TimeSeries resample_samples(const std::vector<RawSample>& samples, Seconds duration, Seconds hop,
                            Seconds window) {
  if (!(hop > 0.0) || !(window > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "hop and window must be positive");
  }
  TimeSeries series;
  series.t0 = 0.0;
  series.hop = hop;
  const std::size_t n = grid_size(duration, hop);
  series.values.assign(n, std::nullopt);
  if (samples.empty()) return series;

  auto by_time = [](const RawSample& s, double t) { return s.t < t; };
  for (std::size_t i = 0; i < n; ++i) {
    const double g = series.time_at(i);
    const double lo = g - window / 2.0;
    const double hi = g + window / 2.0;
    auto first = std::lower_bound(samples.begin(), samples.end(), lo, by_time);
    double sum = 0.0;
    std::size_t count = 0;
    for (auto it = first; it != samples.end() && it->t <= hi; ++it) {
      sum += it->value;
      ++count;
    }
    if (count > 0) {
      series.values[i] = sum / static_cast<double>(count);
      continue;
    }
    // Nearest raw sample; the earlier one wins a tie.
    auto after = std::lower_bound(samples.begin(), samples.end(), g, by_time);
    const RawSample* best = nullptr;
    double best_gap = 0.0;
    if (after != samples.begin()) {
      best = &*std::prev(after);
      best_gap = g - best->t;
    }
    if (after != samples.end() && (!best || after->t - g < best_gap)) {
      best = &*after;
      best_gap = after->t - g;
    }
    if (best && best_gap <= kNearestSampleWindow) series.values[i] = best->value;
  }
  return series;
}

TimeSeries resample_channel(const Session& session, Channel channel, Seconds hop, Seconds window) {
  return resample_samples(channel_samples(session, channel), session.duration(), hop, window);
}

ChannelWeights default_salience_weights() {
  return {{Channel::Hr, 1.0},         {Channel::Rr, 1.0},         {Channel::Engagement, 1.0},
          {Channel::Excitement, 1.0}, {Channel::EyeContact, 0.5}, {Channel::Openness, 0.5}};
}

std::vector<std::optional<double>> robust_zscores(const std::vector<std::optional<double>>& values) {
  std::vector<double> present;
  for (const auto& v : values) {
    if (v) present.push_back(*v);
  }
  std::vector<std::optional<double>> z(values.size());
  if (present.empty()) return z;

  const double med = median_of(present);
  std::vector<double> dev;
  dev.reserve(present.size());
  for (double x : present) dev.push_back(std::fabs(x - med));
  double scale = kMadToSigma * median_of(std::move(dev));
  if (scale == 0.0 && present.size() >= 2) {
    double mean = 0.0;
    for (double x : present) mean += x;
    mean /= static_cast<double>(present.size());
    double acc = 0.0;
    for (double x : present) acc += (x - mean) * (x - mean);
    scale = std::sqrt(acc / static_cast<double>(present.size() - 1));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    z[i] = scale > 0.0 ? (*values[i] - med) / scale : 0.0;
  }
  return z;
}

SalienceSeries salience_series(const Session& session, const ChannelWeights& weights, Seconds hop,
                               Seconds window) {
  SalienceSeries out;
  out.t0 = 0.0;
  out.hop = hop;
  const std::size_t n = grid_size(session.duration(), hop);

  std::vector<std::pair<double, std::vector<std::optional<double>>>> channels;
  double total_weight = 0.0;
  // std::map iterates channels in enum order, which is alphabetical.
  for (const auto& [channel, weight] : weights) {
    if (!std::isfinite(weight) || weight < 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "weight for " + std::string(to_string(channel)) + " must be non-negative");
    }
    if (weight == 0.0) continue;
    const auto samples = channel_samples(session, channel);
    if (samples.empty()) continue;
    TimeSeries resampled = resample_samples(samples, session.duration(), hop, window);
    channels.emplace_back(weight, robust_zscores(resampled.values));
    out.channel_weights_used[channel] = weight;
    total_weight += weight;
  }
  if (channels.empty()) {
    throw Error(ErrorKind::NoChannels, "session " + session.id() + " has no data for any weighted channel");
  }
  for (auto& [channel, w] : out.channel_weights_used) w /= total_weight;

  out.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& [w, z] : channels) {
      if (!z[i]) continue;
      num += w * *z[i];
      den += w;
    }
    out.values[i] = den > 0.0 ? num / den : 0.0;
  }
  return out;
}

std::vector<Peak> top_peaks(const TimeSeries& series, std::size_t n, Seconds min_sep) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "peak count must be at least 1");
  std::vector<bool> available(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) available[i] = series.values[i].has_value();

  std::vector<Peak> peaks;
  while (peaks.size() < n) {
    std::size_t best = series.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (available[i] && (best == series.size() || *series.values[i] > *series.values[best])) best = i;
    }
    if (best == series.size()) break;
    const double t = series.time_at(best);
    peaks.push_back({t, *series.values[best]});
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (available[i] && std::fabs(series.time_at(i) - t) < min_sep) available[i] = false;
    }
    available[best] = false;
  }
  // Picks come out by descending score with earliest-first ties already.
  return peaks;
}

std::vector<Peak> top_peaks(const SalienceSeries& series, std::size_t n, Seconds min_sep) {
  TimeSeries ts{series.t0, series.hop, {}};
  ts.values.assign(series.values.begin(), series.values.end());
  return top_peaks(ts, n, min_sep);
}

std::vector<SaliencePeak> highlights(const Session& session, std::size_t n,
                                     const HighlightOptions& options) {
  if (session.sentences().empty()) {
    throw Error(ErrorKind::EmptyTranscript, "session " + session.id() + " has no transcript sentences");
  }
  const SalienceSeries series = salience_series(session, options.weights, options.hop, options.window);
  const auto peaks = top_peaks(series, n, options.min_sep.value_or(options.window));
  std::vector<SaliencePeak> out;
  out.reserve(peaks.size());
  for (const auto& p : peaks) {
    out.push_back({p.t, p.score, snippet_at(session, p.t, options.snippet_radius)});
  }
  return out;
}

}  // namespace affmem
