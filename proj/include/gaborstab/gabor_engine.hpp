#pragma once

#include <span>
#include <vector>

#include "gaborstab/field.hpp"
#include "gaborstab/geometry.hpp"
#include "gaborstab/signal_model.hpp"

namespace gaborstab {

struct SampledSignal {
    std::vector<cplx> samples;
    double t0 = 0.0;
    double dt = 0.01;

    void validate() const;
    double t(std::size_t n) const { return t0 + static_cast<double>(n) * dt; }
};

SampledSignal sample(const GaussianMixtureSignal& sig, double t0, double t1, double dt);

// Window half-width beyond which exp(-pi u^2) < 1e-16.
double window_cutoff();

struct QuadratureOptions {
    double dt = 1.0 / 64.0;  // step for sampling mixtures
};

SpectrogramField quadrature_gabor(const GaussianMixtureSignal& sig, const Grid2D& grid,
                                  const QuadratureOptions& opt = {});
SpectrogramField quadrature_gabor(const SampledSignal& sig, const Grid2D& grid);
SpectrogramField closed_form_gabor(const GaussianMixtureSignal& sig, const Grid2D& grid);

SpectrogramField spectrogram(const SpectrogramField& gabor_field);

class Region {
public:
    Region() = default;
    explicit Region(std::vector<Square> squares);
    static Region from_polygons(std::vector<Polygon> polys);

    const std::vector<Polygon>& polygons() const noexcept { return polys_; }
    bool contains(double x, double y, double tol = 1e-12) const;
    double area() const { return union_area(polys_); }

private:
    std::vector<Polygon> polys_;
};

// Per-cell area and centroid of (cell intersected with the region) on a grid.
// Fully covered cells integrate with the node value, cut cells with the
// bilinear value at the centroid of the covered part.
class RegionQuadrature {
public:
    RegionQuadrature(const Grid2D& grid, const Region& region);

    double integrate(std::span<const double> nodes) const;
    cplx integrate(std::span<const cplx> nodes) const;
    double area() const;
    // Nodes inside the closed region.
    const std::vector<std::size_t>& inside_nodes() const noexcept { return inside_; }

private:
    struct Cell {
        std::size_t index;
        double area;
        double x, y;
        bool full;
    };
    Grid2D grid_;
    std::vector<Cell> cells_;
    std::vector<std::size_t> inside_;
};

enum class Norm { L1, L2, Linf };

double region_norm(const SpectrogramField& field, const Region& region, Norm p);
double region_norm(const SpectrogramField& field, const RegionQuadrature& q, Norm p);

SpectrogramField resample_to_square(const SpectrogramField& field, const Square& square);

}  // namespace gaborstab
