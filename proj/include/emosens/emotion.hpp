#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace emosens {

// Discrete emotion targets. The order fixes the class index used by every
// classifier, the confusion matrix and all serialized outputs.
enum class Emotion : std::uint8_t {
  Calmness = 0,
  Surprise,
  Amusement,
  Fear,
  Excitement,
  Disgust,
  Happiness,
  Anger,
  Sadness,
};

inline constexpr std::size_t kNumEmotions = 9;

inline constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "calmness", "surprise", "amusement", "fear",   "excitement",
    "disgust",  "happiness", "anger",    "sadness"};

constexpr std::size_t index_of(Emotion e) noexcept { return static_cast<std::size_t>(e); }

constexpr Emotion emotion_from_index(std::size_t i) noexcept { return static_cast<Emotion>(i); }

constexpr std::string_view to_string(Emotion e) noexcept { return kEmotionNames[index_of(e)]; }

// Throws Error(LabelError) for anything outside the closed set.
Emotion parse_emotion(std::string_view text);

}  // namespace emosens
