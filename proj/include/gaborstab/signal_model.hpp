#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace gaborstab {

using cplx = std::complex<double>;

// amplitude * exp(-pi (t - shift)^2) * exp(2 pi i modulation t)
struct GaussianAtom {
    cplx amplitude{1.0, 0.0};
    double shift = 0.0;
    double modulation = 0.0;
};

class GaussianMixtureSignal {
public:
    GaussianMixtureSignal() = default;
    // Throws DomainError on an empty list or non-finite parameters.
    explicit GaussianMixtureSignal(std::vector<GaussianAtom> atoms);

    std::span<const GaussianAtom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }

    cplx operator()(double t) const;
    GaussianMixtureSignal scaled(cplx c) const;

private:
    std::vector<GaussianAtom> atoms_;
};

struct EntireExtensionParams {
    cplx z;
    cplx zeta;
};

// G f(x,y) = int f(t) exp(-pi (t-x)^2) exp(-2 pi i t y) dt, evaluated exactly.
cplx gabor_closed_form(const GaussianMixtureSignal& sig, double x, double y);

// T f(z, zeta) = int f(t) exp(-pi (t-z)^2 - 2 pi i zeta t) dt for complex z, zeta.
cplx entire_extension(const GaussianMixtureSignal& sig, EntireExtensionParams p);

// 2^{-1/4} ||f|| exp(pi (y^2 + 2 x eta + eta^2)) at z = x + iy, zeta = xi + i eta.
double entire_extension_growth_bound(double l2norm, EntireExtensionParams p);

// <f, g> in L^2(R), from the exact Gram matrix of the atoms.
cplx inner_product(const GaussianMixtureSignal& f, const GaussianMixtureSignal& g);
double l2_norm(const GaussianMixtureSignal& sig);

// ||exp(-pi t^2)||_{L^2}.
inline double window_l2_norm() { return 0.8408964152537145; }

// f_a = phi(.+a) + phi(.-a), g_a = phi(.+a) - phi(.-a), phi = 2^{-1/2} exp(-pi t^2).
std::pair<GaussianMixtureSignal, GaussianMixtureSignal> make_sharpness_pair(double a);

// Fock-side representative: G f(x,y) = F(x - iy) exp(-pi (x^2+y^2)/2 - pi i x y),
// so S f(x,y) = |F(w)|^2 exp(-pi |w|^2) with w = x - iy.
inline cplx fock_point(double x, double y) { return {x, -y}; }
cplx fock_value(const GaussianMixtureSignal& sig, cplx w);
// k-th complex derivative of F at w.
cplx fock_derivative(const GaussianMixtureSignal& sig, cplx w, int k);
// F^{(0)}(w), ..., F^{(K)}(w).
std::vector<cplx> fock_derivatives(const GaussianMixtureSignal& sig, cplx w, int K);

}  // namespace gaborstab
