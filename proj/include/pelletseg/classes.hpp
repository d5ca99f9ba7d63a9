#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace pelletseg {

// Pellet taxonomy. Annotation colors: Nice green, Ugly red, Big purple, Joint blue.
enum class PelletClass : std::uint8_t { Background = 0, Nice = 1, Ugly = 2, Big = 3, Joint = 4 };

inline constexpr int kNumClasses = 5;

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {"background", "nice", "ugly",
                                                                          "big", "joint"};
inline constexpr std::array<std::string_view, kNumClasses> kClassColors = {"black", "green", "red",
                                                                           "purple", "blue"};

constexpr std::string_view class_name(PelletClass c) { return kClassNames[static_cast<int>(c)]; }
constexpr std::string_view class_color(PelletClass c) { return kClassColors[static_cast<int>(c)]; }

inline std::optional<PelletClass> parse_class(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kClassNames[i] == name) return static_cast<PelletClass>(i);
  }
  return std::nullopt;
}

}  // namespace pelletseg
