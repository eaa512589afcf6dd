#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace irsense {

/// Planar position in meters.
struct Point2D {
  double x{0.0};
  double y{0.0};

  friend constexpr bool operator==(const Point2D&, const Point2D&) = default;
};

constexpr Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2D operator*(double s, Point2D a) { return {s * a.x, s * a.y}; }

bool is_finite(Point2D p);

/// Euclidean distance between two points.
double distance(Point2D a, Point2D b);

/// Intersection points of the circles |p - c1| = r1 and |p - c2| = r2.
///
/// Returns either nothing or two points; a tangency yields the same point
/// twice. Concentric circles return nothing.
std::vector<Point2D> circle_intersect(Point2D c1, Point2D c2, double r1, double r2);

/// Same as circle_intersect, but a pair of circles that misses intersecting
/// by at most `slack` meters (separated or nested) is treated as tangent and
/// returns the closest-approach point twice.
std::vector<Point2D> circle_intersect_relaxed(Point2D c1, Point2D c2, double r1, double r2,
                                              double slack);

/// Delay-grid index of a propagation path: floor(length * B / c0).
std::size_t delay_index(double path_length_m, double bandwidth_hz, double c0);

}  // namespace irsense
