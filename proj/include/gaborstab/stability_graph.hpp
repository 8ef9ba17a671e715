#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "gaborstab/field.hpp"
#include "gaborstab/gabor_engine.hpp"
#include "gaborstab/geometry.hpp"

namespace gaborstab {

// Finite family of unit squares; duplicates are rejected.
class SquareCover {
public:
    SquareCover() = default;
    explicit SquareCover(std::vector<Square> squares);

    const std::vector<Square>& squares() const noexcept { return squares_; }
    std::size_t size() const noexcept { return squares_.size(); }
    const Square& operator[](std::size_t i) const { return squares_[i]; }
    Region region() const { return Region(squares_); }
    std::vector<Polygon> polygons() const;

private:
    std::vector<Square> squares_;
};

class WeightedGraph {
public:
    WeightedGraph() = default;
    // sigma is row-major n x n; validated symmetric, nonnegative, zero diagonal, w > 0.
    WeightedGraph(std::vector<double> w, std::vector<double> sigma);

    std::size_t n() const noexcept { return w_.size(); }
    const std::vector<double>& w() const noexcept { return w_; }
    double w(std::size_t i) const { return w_[i]; }
    double sigma(std::size_t i, std::size_t j) const { return sigma_[i * n() + j]; }
    const std::vector<double>& sigma() const noexcept { return sigma_; }
    double degree(std::size_t i) const;
    std::vector<double> laplacian() const;  // D - A, row-major
    WeightedGraph scaled_edges(double c) const;

private:
    std::vector<double> w_;
    std::vector<double> sigma_;
};

struct SymmetricEigen {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // column k is vectors[i * n + k]
};
// Cyclic Jacobi rotations on a dense symmetric matrix (row-major).
SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t n);

WeightedGraph build_graph(const SpectrogramField& specF, const SquareCover& cover);

double algebraic_connectivity(const WeightedGraph& g);

enum class CheegerMethod { exact, spectral_sweep };

struct CheegerResult {
    double value = 0.0;
    std::vector<std::size_t> witness;
    CheegerMethod method = CheegerMethod::exact;
};

inline constexpr std::size_t kMaxExactCheeger = 20;

CheegerResult cheeger_constant(const WeightedGraph& g, CheegerMethod method);
// sigma(boundary S) / min(w(S), w(V \ S))
double cut_ratio(const WeightedGraph& g, const std::vector<std::size_t>& S);

struct ConnectivityReport {
    double lambda = 0.0;
    double cheeger = 0.0;
    CheegerMethod cheeger_method = CheegerMethod::exact;
    std::vector<std::size_t> witness;
    double delta0 = 0.0;
    // bracket on h; equal to cheeger for exact enumeration
    double cheeger_lower = 0.0;
    double cheeger_upper = 0.0;
    bool inequality_holds = true;
};

// Exact enumeration when n <= 20, spectral sweep otherwise.
ConnectivityReport cheeger_inequality_check(const WeightedGraph& g);

struct StabilityCertificate {
    double K = 0.0;
    double M = 0.0;
    double L = 0.0;
    double nu = 0.0;
    double volOmega = 0.0;
    double lambda = 0.0;
    double cheeger = 0.0;
    double delta0 = 0.0;
    double bound_lambda = 0.0;
    double bound_cheeger = 0.0;
    double C = 1.0;
    CheegerMethod cheeger_method = CheegerMethod::exact;
    bool single_square = false;
    bool connected = true;
    WeightedGraph graph;
};

StabilityCertificate certificate(const SpectrogramField& specF, const SpectrogramField& specG, const SquareCover& cover);

void write_certificate(std::ostream& os, const StabilityCertificate& c);
void write_graph_edges_csv(std::ostream& os, const WeightedGraph& g);
void write_graph_vertices_csv(std::ostream& os, const WeightedGraph& g);

}  // namespace gaborstab
