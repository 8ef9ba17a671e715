#pragma once

#include <array>
#include <span>
#include <vector>

namespace gaborstab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Convex polygon, vertices counter-clockwise.
using Polygon = std::vector<Point>;

struct Square {
    double cx = 0.0;
    double cy = 0.0;
    double side = 1.0;
    double rotation = 0.0;  // radians, about the center

    std::array<Point, 4> corners() const;
    Polygon polygon() const;
    bool contains(double x, double y, double tol = 1e-12) const;
    // Local frame (u, v) in [-side/2, side/2]^2 mapped to the plane.
    Point to_world(double u, double v) const;
    void validate() const;
};

struct Box {
    double xmin, xmax, ymin, ymax;
};

double polygon_area(const Polygon& p);
// Area-weighted centroid; undefined for zero-area input.
Point polygon_centroid(const Polygon& p);
Box bounding_box(const Polygon& p);
Box bounding_box(std::span<const Polygon> ps);
bool contains(const Polygon& convex, double x, double y, double tol = 1e-12);

// Sutherland-Hodgman clip of a polygon against a convex polygon.
Polygon clip(const Polygon& subject, const Polygon& convex);

// Moments of the union of convex polygons by inclusion-exclusion over
// subsets with positive-area common intersection.
struct AreaMoments {
    double area = 0.0;
    double mx = 0.0;  // first moments, centroid = (mx, my) / area
    double my = 0.0;
};
AreaMoments union_moments(std::span<const Polygon> ps, const Polygon* window = nullptr);

double union_area(std::span<const Polygon> ps);
// Largest number of polygons sharing a set of positive area.
int max_multiplicity(std::span<const Polygon> ps);

inline constexpr double kAreaEps = 1e-14;

}  // namespace gaborstab
