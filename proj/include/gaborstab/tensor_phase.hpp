#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "gaborstab/field.hpp"
#include "gaborstab/signal_model.hpp"

namespace gaborstab {

// derivs(k, l) = dbar^l d^k |F|^2 at center, Wirtinger derivatives in the
// Fock variable w.  For holomorphic F this is F^{(k)}(c) conj(F^{(l)}(c)).
class LocalJet {
public:
    LocalJet(cplx center, int order);
    // From F(c), F'(c), ..., F^{(K)}(c).
    static LocalJet from_derivatives(cplx center, std::span<const cplx> fk);

    cplx center() const noexcept { return center_; }
    int order() const noexcept { return order_; }
    cplx& at(int k, int l) { return d_[idx(k, l)]; }
    cplx at(int k, int l) const { return d_[idx(k, l)]; }

private:
    std::size_t idx(int k, int l) const { return static_cast<std::size_t>(k) * (order_ + 1) + l; }
    cplx center_;
    int order_;
    std::vector<cplx> d_;
};

LocalJet jet_from_mixture(const GaussianMixtureSignal& sig, cplx center, int K);

// Jet of |F|^2 = S e^{pi(x^2+y^2)} at grid node (i, j) of a spectrogram by
// central finite differences (fourth order in the step).  Only entries with
// k + l <= 4 are filled, so K <= 4; the rest stay zero.  The node is moved
// inward if the stencil would leave the grid.
struct FdJet {
    LocalJet jet;
    std::size_t i, j;
};
FdJet jet_from_spectrogram(const SpectrogramField& spec, std::size_t i, std::size_t j, int K);

inline constexpr int kMaxFdOrder = 4;

// Fornberg weights for the m-th derivative at x0 from nodes xs.
std::vector<double> fd_weights(double x0, std::span<const double> xs, int m);

struct TensorWeights {
    double r;
    std::vector<double> omega;  // omega_k = pi r^{2k+2} / (k! (k+1)!)
};
TensorWeights tensor_weights(double r, int K);

struct DeltaSeries {
    double delta_squared = 0.0;
    // contribution of the outermost shell max(k, l) = K
    double tail = 0.0;
    double delta() const;
};
DeltaSeries delta_r(const LocalJet& jetF, const LocalJet& jetG, double r);

// ||F||_{L^2(B_r(center))} from the jet diagonal (truncated at the jet order).
double disk_norm(const LocalJet& jet, double r);

// sqrt(5) delta / ||F||
double distance_from_delta(double normF, double delta);

// r^4 e^{8 pi^2 r^2} (A^2 + B^2) l2diff with implicit constant 1.
double delta_structural_bound(double r, double fockInfF, double fockInfG, double l2diffQ);

// F(z) e^{-i arg F(center)} from the zeta = center slice of the tensor.
std::vector<cplx> local_phase_from_modulus(const LocalJet& jet, std::span<const cplx> pts, double threshold = 1e-10);

// 2^{p+3} pi^{p+1} Gamma(p/2 + 1): bounds ||F^{(p)}||_{L^inf([-1/2,1/2]^2)} / ||F||_{F^inf}.
double smoothness_growth_constant(int p);
// 2^{p+2} Gamma(p/2 + 1): bounds int_0^inf r^{p+1} exp(-pi r^2/2 + pi r/sqrt 2) dr.
double gamma_like_integral_bound(int p);

void write_jet_csv(std::ostream& os, const LocalJet& jet);

}  // namespace gaborstab
