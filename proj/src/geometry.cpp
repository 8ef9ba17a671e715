#include "gaborstab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaborstab/errors.hpp"

namespace gaborstab {

std::array<Point, 4> Square::corners() const {
    const double h = side / 2.0;
    return {to_world(-h, -h), to_world(h, -h), to_world(h, h), to_world(-h, h)};
}

Polygon Square::polygon() const {
    auto c = corners();
    return Polygon(c.begin(), c.end());
}

Point Square::to_world(double u, double v) const {
    const double c = std::cos(rotation), s = std::sin(rotation);
    return {cx + c * u - s * v, cy + s * u + c * v};
}

bool Square::contains(double x, double y, double tol) const {
    const double c = std::cos(rotation), s = std::sin(rotation);
    const double dx = x - cx, dy = y - cy;
    const double u = c * dx + s * dy, v = -s * dx + c * dy;
    const double h = side / 2.0 + tol;
    return std::abs(u) <= h && std::abs(v) <= h;
}

void Square::validate() const {
    if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(rotation))
        throw DomainError("square has non-finite center or rotation");
    if (!(side > 0.0) || !std::isfinite(side)) throw DomainError("square side must be positive");
}

double polygon_area(const Polygon& p) {
    const std::size_t n = p.size();
    if (n < 3) return 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& u = p[i];
        const Point& v = p[(i + 1) % n];
        a += u.x * v.y - v.x * u.y;
    }
    return a / 2.0;
}

namespace {

AreaMoments moments(const Polygon& p) {
    const std::size_t n = p.size();
    AreaMoments m;
    if (n < 3) return m;
    // shift to the first vertex to limit cancellation
    const double ox = p[0].x, oy = p[0].y;
    double a = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = p[i].x - ox, y0 = p[i].y - oy;
        const double x1 = p[(i + 1) % n].x - ox, y1 = p[(i + 1) % n].y - oy;
        const double cr = x0 * y1 - x1 * y0;
        a += cr;
        mx += (x0 + x1) * cr;
        my += (y0 + y1) * cr;
    }
    m.area = a / 2.0;
    m.mx = mx / 6.0 + ox * m.area;
    m.my = my / 6.0 + oy * m.area;
    return m;
}

}  // namespace

Point polygon_centroid(const Polygon& p) {
    auto m = moments(p);
    return {m.mx / m.area, m.my / m.area};
}

Box bounding_box(const Polygon& p) {
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& q : p) {
        b.xmin = std::min(b.xmin, q.x);
        b.xmax = std::max(b.xmax, q.x);
        b.ymin = std::min(b.ymin, q.y);
        b.ymax = std::max(b.ymax, q.y);
    }
    return b;
}

Box bounding_box(std::span<const Polygon> ps) {
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : ps) {
        Box c = bounding_box(p);
        b.xmin = std::min(b.xmin, c.xmin);
        b.xmax = std::max(b.xmax, c.xmax);
        b.ymin = std::min(b.ymin, c.ymin);
        b.ymax = std::max(b.ymax, c.ymax);
    }
    return b;
}

bool contains(const Polygon& convex, double x, double y, double tol) {
    const std::size_t n = convex.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = convex[i];
        const Point& b = convex[(i + 1) % n];
        const double ex = b.x - a.x, ey = b.y - a.y;
        const double len = std::hypot(ex, ey);
        if ((ex * (y - a.y) - ey * (x - a.x)) < -tol * len) return false;
    }
    return true;
}

Polygon clip(const Polygon& subject, const Polygon& convex) {
    Polygon out = subject;
    const std::size_t n = convex.size();
    for (std::size_t e = 0; e < n && !out.empty(); ++e) {
        const Point a = convex[e];
        const Point b = convex[(e + 1) % n];
        auto side = [&](const Point& p) { return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x); };
        Polygon in = std::move(out);
        out.clear();
        const std::size_t m = in.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Point& p = in[i];
            const Point& q = in[(i + 1) % m];
            const double sp = side(p), sq = side(q);
            if (sp >= 0.0) out.push_back(p);
            if ((sp >= 0.0) != (sq >= 0.0)) {
                const double t = sp / (sp - sq);
                out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
            }
        }
    }
    if (out.size() < 3) out.clear();
    return out;
}

namespace {

bool boxes_overlap(const Box& a, const Box& b) {
    return a.xmin < b.xmax && b.xmin < a.xmax && a.ymin < b.ymax && b.ymin < a.ymax;
}

template <class Visit>
void for_each_intersection(std::span<const Polygon> ps, const Polygon& start, std::size_t first, int depth,
                           Visit&& visit) {
    const Box sb = bounding_box(start);
    for (std::size_t i = first; i < ps.size(); ++i) {
        if (!boxes_overlap(sb, bounding_box(ps[i]))) continue;
        Polygon c = clip(start, ps[i]);
        if (polygon_area(c) <= kAreaEps) continue;
        visit(c, depth + 1);
        for_each_intersection(ps, c, i + 1, depth + 1, visit);
    }
}

}  // namespace

AreaMoments union_moments(std::span<const Polygon> ps, const Polygon* window) {
    AreaMoments total;
    auto visit = [&](const Polygon& c, int depth) {
        AreaMoments m = moments(c);
        const double sgn = (depth % 2 == 1) ? 1.0 : -1.0;
        total.area += sgn * m.area;
        total.mx += sgn * m.mx;
        total.my += sgn * m.my;
    };
    if (window) {
        for_each_intersection(ps, *window, 0, 0, visit);
    } else {
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (polygon_area(ps[i]) <= kAreaEps) continue;
            visit(ps[i], 1);
            for_each_intersection(ps, ps[i], i + 1, 1, visit);
        }
    }
    return total;
}

double union_area(std::span<const Polygon> ps) { return union_moments(ps).area; }

int max_multiplicity(std::span<const Polygon> ps) {
    int best = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (polygon_area(ps[i]) <= kAreaEps) continue;
        best = std::max(best, 1);
        for_each_intersection(ps, ps[i], i + 1, 1, [&](const Polygon&, int depth) { best = std::max(best, depth); });
    }
    return best;
}

}  // namespace gaborstab
