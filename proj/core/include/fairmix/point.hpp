#pragma once

#include <array>
#include <cstddef>

namespace fairmix {

// A location in a 1-D or 2-D instance space.
class Point {
 public:
  constexpr Point() = default;
  constexpr explicit Point(double x) : coords_{x, 0.0}, dim_{1} {}
  constexpr Point(double x, double y) : coords_{x, y}, dim_{2} {}

  constexpr std::size_t dim() const noexcept { return dim_; }
  constexpr double operator[](std::size_t axis) const noexcept { return coords_[axis]; }
  constexpr double x() const noexcept { return coords_[0]; }
  constexpr double y() const noexcept { return coords_[1]; }

  friend constexpr bool operator==(const Point&, const Point&) = default;
  friend constexpr auto operator<=>(const Point&, const Point&) = default;

 private:
  std::array<double, 2> coords_{0.0, 0.0};
  std::size_t dim_ = 1;
};

// Throws StructuralError unless both points share a dimension.
void require_same_dim(const Point& a, const Point& b);

}  // namespace fairmix
