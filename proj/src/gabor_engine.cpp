#include "gaborstab/gabor_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaborstab/errors.hpp"

namespace gaborstab {

namespace {
constexpr double pi = std::numbers::pi;
}

void SampledSignal::validate() const {
    if (samples.empty()) throw DomainError("sampled signal is empty");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("sample step must be positive");
    if (!std::isfinite(t0)) throw DomainError("sample origin must be finite");
    for (const auto& v : samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("non-finite sample");
}

SampledSignal sample(const GaussianMixtureSignal& sig, double t0, double t1, double dt) {
    if (!(t1 > t0) || !(dt > 0.0)) throw DomainError("invalid sampling interval");
    SampledSignal s;
    s.t0 = t0;
    s.dt = dt;
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
    s.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) s.samples[k] = sig(s.t(k));
    return s;
}

double window_cutoff() { return std::sqrt(16.0 * std::log(10.0) / pi); }

SpectrogramField quadrature_gabor(const GaussianMixtureSignal& sig, const Grid2D& grid, const QuadratureOptions& opt) {
    if (sig.empty()) throw DomainError("empty signal");
    grid.validate();
    if (!(opt.dt > 0.0)) throw DomainError("quadrature step must be positive");
    const double dt = opt.dt;
    const auto M = static_cast<long>(std::ceil(window_cutoff() / dt));
    const std::size_t len = static_cast<std::size_t>(2 * M + 1);
    std::vector<cplx> fw(len);
    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < grid.nx; ++i) {
        const double x = grid.x(i);
        for (long k = -M; k <= M; ++k) {
            const double u = static_cast<double>(k) * dt;
            fw[static_cast<std::size_t>(k + M)] = sig(x + u) * std::exp(-pi * u * u);
        }
        const double tstart = x - static_cast<double>(M) * dt;
        for (std::size_t j = 0; j < grid.ny; ++j) {
            const double y = grid.y(j);
            const cplx step = std::polar(1.0, -2.0 * pi * dt * y);
            cplx ph = std::polar(1.0, -2.0 * pi * tstart * y);
            cplx s = 0.0;
            for (std::size_t k = 0; k < len; ++k) {
                s += fw[k] * ph;
                ph *= step;
            }
            out[grid.index(i, j)] = s * dt;
        }
    }
    return SpectrogramField(grid, FieldKind::gabor, std::move(out));
}

SpectrogramField quadrature_gabor(const SampledSignal& sig, const Grid2D& grid) {
    sig.validate();
    grid.validate();
    const double T = window_cutoff();
    const long N = static_cast<long>(sig.samples.size());
    std::vector<cplx> out(grid.size());
    std::vector<cplx> fw;
    for (std::size_t i = 0; i < grid.nx; ++i) {
        const double x = grid.x(i);
        const long lo = std::max(0L, static_cast<long>(std::ceil((x - T - sig.t0) / sig.dt)));
        const long hi = std::min(N - 1, static_cast<long>(std::floor((x + T - sig.t0) / sig.dt)));
        if (hi < lo) continue;
        fw.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
        for (long n = lo; n <= hi; ++n) {
            const double u = sig.t(static_cast<std::size_t>(n)) - x;
            double wgt = sig.dt;
            if (n == 0 || n == N - 1) wgt /= 2.0;
            fw[static_cast<std::size_t>(n - lo)] = wgt * sig.samples[static_cast<std::size_t>(n)] * std::exp(-pi * u * u);
        }
        const double tstart = sig.t(static_cast<std::size_t>(lo));
        for (std::size_t j = 0; j < grid.ny; ++j) {
            const double y = grid.y(j);
            const cplx step = std::polar(1.0, -2.0 * pi * sig.dt * y);
            cplx ph = std::polar(1.0, -2.0 * pi * tstart * y);
            cplx s = 0.0;
            for (const auto& v : fw) {
                s += v * ph;
                ph *= step;
            }
            out[grid.index(i, j)] = s;
        }
    }
    return SpectrogramField(grid, FieldKind::gabor, std::move(out));
}

SpectrogramField closed_form_gabor(const GaussianMixtureSignal& sig, const Grid2D& grid) {
    grid.validate();
    std::vector<cplx> out(grid.size());
    for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t i = 0; i < grid.nx; ++i) out[grid.index(i, j)] = gabor_closed_form(sig, grid.x(i), grid.y(j));
    return SpectrogramField(grid, FieldKind::gabor, std::move(out));
}

SpectrogramField spectrogram(const SpectrogramField& gabor_field) {
    if (gabor_field.kind() != FieldKind::gabor) throw UsageError("spectrogram() expects a Gabor field");
    std::vector<cplx> out(gabor_field.values().size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(gabor_field.values()[k]);
    return SpectrogramField(gabor_field.grid(), FieldKind::spectrogram, std::move(out));
}

Region::Region(std::vector<Square> squares) {
    if (squares.empty()) throw DomainError("region needs at least one square");
    for (const auto& s : squares) {
        s.validate();
        polys_.push_back(s.polygon());
    }
}

Region Region::from_polygons(std::vector<Polygon> polys) {
    Region r;
    r.polys_ = std::move(polys);
    return r;
}

bool Region::contains(double x, double y, double tol) const {
    for (const auto& p : polys_)
        if (gaborstab::contains(p, x, y, tol)) return true;
    return false;
}

RegionQuadrature::RegionQuadrature(const Grid2D& grid, const Region& region) : grid_(grid) {
    grid.validate();
    const auto& polys = region.polygons();
    if (polys.empty()) return;
    const Box dom = grid.domain();
    const Box rb = bounding_box(std::span<const Polygon>(polys));
    const double tol = 1e-9 * (1.0 + std::max({std::abs(dom.xmin), std::abs(dom.xmax), std::abs(dom.ymin),
                                               std::abs(dom.ymax)}));
    if (rb.xmin < dom.xmin - tol || rb.xmax > dom.xmax + tol || rb.ymin < dom.ymin - tol || rb.ymax > dom.ymax + tol)
        throw DomainError("region extends beyond the field grid");

    auto cell_range = [](double lo, double hi, double origin, double d, std::size_t n) {
        const double a = std::floor((lo - origin) / d + 0.5) - 1.0;
        const double b = std::ceil((hi - origin) / d - 0.5) + 1.0;
        const auto first = static_cast<std::size_t>(std::clamp(a, 0.0, static_cast<double>(n - 1)));
        const auto last = static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(n - 1)));
        return std::pair{first, last};
    };
    const auto [i0, i1] = cell_range(rb.xmin, rb.xmax, grid.x0, grid.dx, grid.nx);
    const auto [j0, j1] = cell_range(rb.ymin, rb.ymax, grid.y0, grid.dy, grid.ny);
    const double full = grid.dx * grid.dy;
    const double hx = grid.dx / 2.0, hy = grid.dy / 2.0;

    for (std::size_t j = j0; j <= j1; ++j) {
        for (std::size_t i = i0; i <= i1; ++i) {
            const double x = grid.x(i), y = grid.y(j);
            const std::size_t idx = grid.index(i, j);
            if (region.contains(x, y)) inside_.push_back(idx);
            const Polygon cell{{x - hx, y - hy}, {x + hx, y - hy}, {x + hx, y + hy}, {x - hx, y + hy}};
            bool covered = false;
            for (const auto& p : polys) {
                if (contains(p, cell[0].x, cell[0].y, 0.0) && contains(p, cell[1].x, cell[1].y, 0.0) &&
                    contains(p, cell[2].x, cell[2].y, 0.0) && contains(p, cell[3].x, cell[3].y, 0.0)) {
                    covered = true;
                    break;
                }
            }
            if (covered) {
                cells_.push_back({idx, full, x, y, true});
                continue;
            }
            const AreaMoments m = union_moments(std::span<const Polygon>(polys), &cell);
            if (m.area <= kAreaEps * full) continue;
            if (m.area >= full * (1.0 - 1e-12))
                cells_.push_back({idx, full, x, y, true});
            else
                cells_.push_back({idx, m.area, m.mx / m.area, m.my / m.area, false});
        }
    }
}

double RegionQuadrature::integrate(std::span<const double> nodes) const {
    if (nodes.size() != grid_.size()) throw UsageError("node data does not match quadrature grid");
    double s = 0.0;
    for (const auto& c : cells_) s += c.area * (c.full ? nodes[c.index] : bilinear(grid_, nodes, c.x, c.y));
    return s;
}

cplx RegionQuadrature::integrate(std::span<const cplx> nodes) const {
    if (nodes.size() != grid_.size()) throw UsageError("node data does not match quadrature grid");
    cplx s = 0.0;
    for (const auto& c : cells_) s += c.area * (c.full ? nodes[c.index] : bilinear(grid_, nodes, c.x, c.y));
    return s;
}

double RegionQuadrature::area() const {
    double a = 0.0;
    for (const auto& c : cells_) a += c.area;
    return a;
}

double region_norm(const SpectrogramField& field, const RegionQuadrature& q, Norm p) {
    const auto& v = field.values();
    if (p == Norm::Linf) {
        double m = 0.0;
        for (std::size_t idx : q.inside_nodes()) m = std::max(m, std::abs(v[idx]));
        return m;
    }
    std::vector<double> a(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) a[k] = p == Norm::L1 ? std::abs(v[k]) : std::norm(v[k]);
    const double s = std::max(0.0, q.integrate(a));
    return p == Norm::L1 ? s : std::sqrt(s);
}

double region_norm(const SpectrogramField& field, const Region& region, Norm p) {
    return region_norm(field, RegionQuadrature(field.grid(), region), p);
}

SpectrogramField resample_to_square(const SpectrogramField& field, const Square& square) {
    square.validate();
    const Grid2D& g = field.grid();
    if (g.nx < 2 || g.ny < 2) throw DomainError("resampling needs at least 2x2 grid nodes");
    const double tol = 1e-9 * (1.0 + std::abs(g.x0) + std::abs(g.y0) + std::abs(g.x_last()) + std::abs(g.y_last()));
    for (const auto& c : square.corners()) {
        if (c.x < g.x0 - tol || c.x > g.x_last() + tol || c.y < g.y0 - tol || c.y > g.y_last() + tol)
            throw DomainError("square lies outside the field domain");
    }
    const double step = std::min(g.dx, g.dy);
    const std::size_t n = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(square.side / step)) + 1);
    const double h = square.side / static_cast<double>(n - 1);
    Grid2D out{square.cx - square.side / 2.0, square.cy - square.side / 2.0, h, h, n, n};
    std::vector<cplx> vals(out.size());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const Point w = square.to_world(-square.side / 2.0 + static_cast<double>(i) * h,
                                            -square.side / 2.0 + static_cast<double>(j) * h);
            cplx v = field.interpolate(w.x, w.y);
            if (field.kind() == FieldKind::spectrogram) v = std::max(0.0, v.real());
            vals[out.index(i, j)] = v;
        }
    }
    return SpectrogramField(out, field.kind(), std::move(vals));
}

}  // namespace gaborstab
