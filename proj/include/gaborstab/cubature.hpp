#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "gaborstab/signal_model.hpp"

namespace gaborstab {

struct GaussRule1D {
    int N = 0;
    double s = 1.0;  // half-width
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Legendre nodes by Newton iteration on P_N, scaled to [-s, s].
GaussRule1D gauss_rule(int N, double s = 1.0);

// P_N at complex z by the three-term recurrence.
std::complex<double> legendre_p(int N, std::complex<double> z);

// Rigid map from the local frame [-s, s]^2 onto a target square.
struct SquareFrame {
    double cx = 0.0;
    double cy = 0.0;
    double rotation = 0.0;
    std::array<double, 2> map(double u, double v) const;
};

struct ProductRule2D {
    GaussRule1D base;
    std::vector<std::array<double, 2>> points;  // in the target frame
    std::vector<double> weights;
    SquareFrame frame;
};

ProductRule2D product_rule(int N, double half_width, SquareFrame frame = {});

// exact - sum phi(lambda) w_lambda
double cubature_error(const std::function<double(double, double)>& phi, double exact, const ProductRule2D& rule);

double chawla_bound(int N, double s, double a, double b, double supPhi);

// log of 3 (sqrt(8 pi) s + 2)^{N+3} N^{-(N-1)/2} e^{N/2} kappa; -inf for kappa = 0.
double log_spectro_error_bound(int N, double s, double kappa);
// Exponentiated; +inf once the bound exceeds 1e300.
double spectro_error_bound(int N, double s, double kappa);

struct SamplingPlan {
    int N = 0;
    ProductRule2D rule;
    double epsilon = 0.0;
    double predicted_error = 0.0;
    double kappa = 0.0;
};

// Smallest N with spectro_error_bound(N, s, kappa) <= epsilon^4.
SamplingPlan plan_sampling(double epsilon, double s, double kappa, SquareFrame frame = {});

// (sum values^2 w)^{1/2}
double discrete_weighted_norm(std::span<const double> values, const ProductRule2D& rule);

// Samples |P_N| on the boundary of [-a, a] x [-b, b] and on [a, a + 10] and
// compares with min{a - 1, b}^N.
bool legendre_lower_bound_check(int N, double a, double b);

// Phi(z, zeta) = (T f(z,zeta) conj(T f(conj z, conj zeta)) - same for g)^2.
std::complex<double> phi_extension(const GaussianMixtureSignal& f, const GaussianMixtureSignal& g,
                                   std::complex<double> z, std::complex<double> zeta);

// sqrt(2) e^{4 pi b^2} kappa with kappa = ||f||^2 + ||g||^2; valid when ||f||, ||g|| <= 1.
double phi_sup_bound(double b, double kappa);
// e^{4 pi b^2} (||f||^4 + ||g||^4), valid for all f, g.
double phi_sup_bound_general(double b, double normF, double normG);

}  // namespace gaborstab
