#include "gaborstab/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "gaborstab/csv.hpp"
#include "gaborstab/errors.hpp"

namespace gaborstab {

void Grid2D::validate() const {
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw DomainError("grid origin must be finite");
    if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
        throw DomainError("grid steps must be positive");
    if (nx < 1 || ny < 1) throw DomainError("grid needs at least one node per axis");
}

Box Grid2D::domain() const {
    return {x0 - dx / 2.0, x_last() + dx / 2.0, y0 - dy / 2.0, y_last() + dy / 2.0};
}

Grid2D Grid2D::from_bounds(double xmin, double xmax, double ymin, double ymax, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("grid step must be positive");
    if (!(xmax >= xmin) || !(ymax >= ymin)) throw DomainError("grid bounds are inverted");
    auto axis = [step](double lo, double hi, double& d, std::size_t& n) {
        const double span = hi - lo;
        n = static_cast<std::size_t>(std::llround(span / step)) + 1;
        d = n > 1 ? span / static_cast<double>(n - 1) : step;
    };
    Grid2D g;
    g.x0 = xmin;
    g.y0 = ymin;
    axis(xmin, xmax, g.dx, g.nx);
    axis(ymin, ymax, g.dy, g.ny);
    g.validate();
    return g;
}

SpectrogramField::SpectrogramField(Grid2D grid, FieldKind kind, std::vector<cplx> values)
    : grid_(grid), kind_(kind), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size()) throw UsageError("field value count does not match grid");
    for (const auto& v : values_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("field has non-finite values");
        if (kind_ == FieldKind::spectrogram && (v.imag() != 0.0 || v.real() < 0.0))
            throw DomainError("spectrogram values must be real and nonnegative");
    }
}

SpectrogramField SpectrogramField::from_real(Grid2D grid, const std::vector<double>& values) {
    return SpectrogramField(grid, FieldKind::spectrogram, std::vector<cplx>(values.begin(), values.end()));
}

std::vector<double> SpectrogramField::real_values() const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i].real();
    return out;
}

double SpectrogramField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

template <class T>
T bilinear_impl(const Grid2D& g, std::span<const T> v, double x, double y) {
    std::size_t i = 0, j = 0;
    double tx = 0.0, ty = 0.0;
    if (g.nx > 1) {
        const double fx = (x - g.x0) / g.dx;
        i = static_cast<std::size_t>(std::clamp(std::floor(fx), 0.0, static_cast<double>(g.nx - 2)));
        tx = fx - static_cast<double>(i);
    }
    if (g.ny > 1) {
        const double fy = (y - g.y0) / g.dy;
        j = static_cast<std::size_t>(std::clamp(std::floor(fy), 0.0, static_cast<double>(g.ny - 2)));
        ty = fy - static_cast<double>(j);
    }
    const std::size_t i1 = g.nx > 1 ? i + 1 : i;
    const std::size_t j1 = g.ny > 1 ? j + 1 : j;
    const T a = v[g.index(i, j)], b = v[g.index(i1, j)];
    const T c = v[g.index(i, j1)], d = v[g.index(i1, j1)];
    return (1.0 - ty) * ((1.0 - tx) * a + tx * b) + ty * ((1.0 - tx) * c + tx * d);
}

}  // namespace

double bilinear(const Grid2D& g, std::span<const double> v, double x, double y) {
    return bilinear_impl<double>(g, v, x, y);
}

cplx bilinear(const Grid2D& g, std::span<const cplx> v, double x, double y) { return bilinear_impl<cplx>(g, v, x, y); }

cplx SpectrogramField::interpolate(double x, double y) const { return bilinear(grid_, std::span<const cplx>(values_), x, y); }

void write_field_csv(std::ostream& os, const SpectrogramField& f) {
    const Grid2D& g = f.grid();
    if (f.kind() == FieldKind::gabor)
        write_csv_header(os, {"x", "y", "re", "im"});
    else
        write_csv_header(os, {"x", "y", "s"});
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const cplx v = f.at(i, j);
            if (f.kind() == FieldKind::gabor)
                write_csv_row(os, {g.x(i), g.y(j), v.real(), v.imag()});
            else
                write_csv_row(os, {g.x(i), g.y(j), v.real()});
        }
    }
}

namespace {

// Sorted distinct coordinates, merging values closer than tol.
std::vector<double> distinct(std::vector<double> v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}

void axis_from(const std::vector<double>& u, double& origin, double& step, std::size_t& n, const char* name) {
    origin = u.front();
    n = u.size();
    step = n > 1 ? (u.back() - u.front()) / static_cast<double>(n - 1) : 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(u[k] - (origin + static_cast<double>(k) * step)) > 1e-6 * step)
            throw ValidationError(std::string("field CSV: ") + name + " coordinates are not uniformly spaced");
    }
}

}  // namespace

SpectrogramField read_field_csv(std::istream& is) {
    CsvTable t = read_csv(is);
    const bool gabor = std::find(t.header.begin(), t.header.end(), "re") != t.header.end();
    const std::size_t cx = t.column("x"), cy = t.column("y");
    const std::size_t c0 = gabor ? t.column("re") : t.column("s");
    const std::size_t c1 = gabor ? t.column("im") : c0;
    if (t.rows.empty()) throw ValidationError("field CSV has no rows");
    std::vector<double> xs, ys;
    for (const auto& r : t.rows) {
        xs.push_back(r[cx]);
        ys.push_back(r[cy]);
    }
    double span = 0.0;
    for (double v : xs) span = std::max(span, std::abs(v));
    for (double v : ys) span = std::max(span, std::abs(v));
    const double tol = 1e-9 * (1.0 + span);
    Grid2D g;
    axis_from(distinct(xs, tol), g.x0, g.dx, g.nx, "x");
    axis_from(distinct(ys, tol), g.y0, g.dy, g.ny, "y");
    if (t.rows.size() != g.size()) throw ValidationError("field CSV does not fill a rectangular grid");
    std::vector<cplx> values(g.size());
    std::vector<char> seen(g.size(), 0);
    for (const auto& r : t.rows) {
        const auto i = static_cast<std::size_t>(std::llround((r[cx] - g.x0) / g.dx));
        const auto j = static_cast<std::size_t>(std::llround((r[cy] - g.y0) / g.dy));
        const std::size_t k = g.index(i, j);
        if (seen[k]) throw ValidationError("field CSV repeats a grid point");
        seen[k] = 1;
        values[k] = gabor ? cplx(r[c0], r[c1]) : cplx(r[c0], 0.0);
    }
    try {
        return SpectrogramField(g, gabor ? FieldKind::gabor : FieldKind::spectrogram, std::move(values));
    } catch (const DomainError& e) {
        throw ValidationError(std::string("field CSV: ") + e.what());
    }
}

}  // namespace gaborstab
