#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

namespace coexist {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance_2d(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance_3d(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

enum class Direction { Ul = 0, Dl = 1 };
inline constexpr std::array<Direction, 2> kDirections{Direction::Ul, Direction::Dl};

inline constexpr std::string_view to_string(Direction d) {
  return d == Direction::Ul ? "UL" : "DL";
}

enum class Flow { Urllc = 0, Ai = 1 };

inline constexpr std::string_view to_string(Flow f) {
  return f == Flow::Urllc ? "URLLC" : "AI";
}

// A value held separately for uplink and downlink.
template <typename T>
struct PerDirection {
  T ul{};
  T dl{};

  T& operator[](Direction d) { return d == Direction::Ul ? ul : dl; }
  const T& operator[](Direction d) const { return d == Direction::Ul ? ul : dl; }

  friend bool operator==(const PerDirection&, const PerDirection&) = default;
};

}  // namespace coexist
