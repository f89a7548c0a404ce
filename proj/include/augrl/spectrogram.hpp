#pragma once

#include <vector>

namespace augrl {

// Dense time-frequency feature matrix, time-major: frame t occupies
// values[t*n_freq .. (t+1)*n_freq). All cells must be finite.
struct Spectrogram {
  int n_time = 0;
  int n_freq = 0;
  std::vector<float> values;

  Spectrogram() = default;
  Spectrogram(int t, int f, float fill = 0.0f)
      : n_time(t), n_freq(f),
        values(static_cast<std::size_t>(t) * static_cast<std::size_t>(f),
               fill) {}

  float& at(int t, int f) {
    return values[static_cast<std::size_t>(t) * n_freq + f];
  }
  float at(int t, int f) const {
    return values[static_cast<std::size_t>(t) * n_freq + f];
  }

  bool operator==(const Spectrogram&) const = default;
};

// Throws std::invalid_argument on bad shape or non-finite cells.
void validate(const Spectrogram& s);

}  // namespace augrl
