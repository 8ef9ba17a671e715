#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "gaborstab/geometry.hpp"

namespace gaborstab {

using cplx = std::complex<double>;

// Node (i, j) sits at (x0 + i dx, y0 + j dy); storage index j * nx + i.
struct Grid2D {
    double x0 = 0.0;
    double y0 = 0.0;
    double dx = 1.0;
    double dy = 1.0;
    std::size_t nx = 1;
    std::size_t ny = 1;

    void validate() const;
    double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
    double y(std::size_t j) const { return y0 + static_cast<double>(j) * dy; }
    double x_last() const { return x(nx - 1); }
    double y_last() const { return y(ny - 1); }
    std::size_t size() const { return nx * ny; }
    std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
    // Union of the cells [x - dx/2, x + dx/2] x [y - dy/2, y + dy/2].
    Box domain() const;

    // Nodes from lo to hi inclusive; the step is adjusted so the end points are nodes.
    static Grid2D from_bounds(double xmin, double xmax, double ymin, double ymax, double step);
    bool operator==(const Grid2D&) const = default;
};

enum class FieldKind { gabor, spectrogram };

class SpectrogramField {
public:
    SpectrogramField() = default;
    // Validates sizes, finiteness, and for spectrograms real nonnegative values.
    SpectrogramField(Grid2D grid, FieldKind kind, std::vector<cplx> values);
    static SpectrogramField from_real(Grid2D grid, const std::vector<double>& values);

    const Grid2D& grid() const noexcept { return grid_; }
    FieldKind kind() const noexcept { return kind_; }
    const std::vector<cplx>& values() const noexcept { return values_; }
    cplx at(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
    std::vector<double> real_values() const;
    double max_abs() const;

    // Bilinear interpolation; linear extrapolation within half a cell outside.
    cplx interpolate(double x, double y) const;

private:
    Grid2D grid_;
    FieldKind kind_ = FieldKind::gabor;
    std::vector<cplx> values_;
};

// Bilinear interpolation of node data laid out on grid.
double bilinear(const Grid2D& g, std::span<const double> v, double x, double y);
cplx bilinear(const Grid2D& g, std::span<const cplx> v, double x, double y);

// CSV with header x,y,re,im (gabor) or x,y,s (spectrogram), rows in storage order.
void write_field_csv(std::ostream& os, const SpectrogramField& f);
SpectrogramField read_field_csv(std::istream& is);

}  // namespace gaborstab
