#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pwl {

inline constexpr double kPi = std::numbers::pi;

/// A point or velocity in the (x, y) plane.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double norm_inf(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }

/// Half-plane on which a piece is defined: LEFT is x <= 0, RIGHT is x >= 0.
enum class Side { Left, Right };

constexpr double side_sign(Side s) { return s == Side::Left ? -1.0 : 1.0; }
constexpr Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
constexpr std::string_view to_string(Side s) { return s == Side::Left ? "L" : "R"; }

enum class ErrorCode {
  InvalidParams,
  SingularPiece,
  Domain,
  TangentStart,
  UnsupportedBranch,
  Config,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidParams: return "INVALID_PARAMS";
    case ErrorCode::SingularPiece: return "SINGULAR_PIECE";
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::TangentStart: return "TANGENT_START";
    case ErrorCode::UnsupportedBranch: return "UNSUPPORTED_BRANCH";
    case ErrorCode::Config: return "CONFIG";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pwl
