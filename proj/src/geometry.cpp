#include "irsense/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace irsense {

bool is_finite(Point2D p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double distance(Point2D a, Point2D b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

// Radical-line construction: the chord of intersection is perpendicular to
// c1->c2 at distance `a` from c1, with half-length `h`.
std::vector<Point2D> chord_points(Point2D c1, Point2D c2, double r1, double r2, double d) {
  const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
  const Point2D u{(c2.x - c1.x) / d, (c2.y - c1.y) / d};
  const Point2D mid = c1 + a * u;
  const Point2D n{-u.y, u.x};
  return {mid + h * n, mid - h * n};
}

}  // namespace

std::vector<Point2D> circle_intersect(Point2D c1, Point2D c2, double r1, double r2) {
  return circle_intersect_relaxed(c1, c2, r1, r2, 0.0);
}

std::vector<Point2D> circle_intersect_relaxed(Point2D c1, Point2D c2, double r1, double r2,
                                              double slack) {
  if (!(r1 >= 0.0) || !(r2 >= 0.0) || !(slack >= 0.0)) {
    throw std::invalid_argument("circle_intersect: radii and slack must be non-negative");
  }
  const double d = distance(c1, c2);
  if (d == 0.0) return {};

  const double outer_gap = d - (r1 + r2);       // > 0: separated
  const double inner_gap = std::abs(r1 - r2) - d;  // > 0: nested
  if (outer_gap > slack || inner_gap > slack) return {};

  const Point2D u{(c2.x - c1.x) / d, (c2.y - c1.y) / d};
  if (outer_gap > 0.0) {
    // Midpoint of the gap between the two circles along the center line.
    const Point2D p = c1 + (r1 + 0.5 * outer_gap) * u;
    return {p, p};
  }
  if (inner_gap > 0.0) {
    // Nested circles: midpoint of the gap on the side of the larger circle.
    const double sign = r1 >= r2 ? 1.0 : -1.0;
    const Point2D big = r1 >= r2 ? c1 : c2;
    const double rb = std::max(r1, r2);
    const double rs = std::min(r1, r2);
    const Point2D small = r1 >= r2 ? c2 : c1;
    const Point2D on_big = big + (sign * rb) * u;
    const Point2D on_small = small + (sign * rs) * u;
    const Point2D p = 0.5 * (on_big + on_small);
    return {p, p};
  }
  return chord_points(c1, c2, r1, r2, d);
}

std::size_t delay_index(double path_length_m, double bandwidth_hz, double c0) {
  if (!(path_length_m >= 0.0)) throw std::invalid_argument("delay_index: negative path length");
  return static_cast<std::size_t>(std::floor(path_length_m * bandwidth_hz / c0));
}

}  // namespace irsense
