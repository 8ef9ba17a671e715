#include "gaborstab/signal_model.hpp"

#include <cmath>
#include <numbers>

#include "gaborstab/errors.hpp"

namespace gaborstab {

namespace {

constexpr double pi = std::numbers::pi;
const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
constexpr cplx I{0.0, 1.0};

bool finite(cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

// int exp(-pi (t-tau)^2) exp(2 pi i nu t) exp(-pi (t-z)^2) exp(-2 pi i zeta t) dt
cplx atom_kernel(double tau, double nu, cplx z, cplx zeta) {
    const cplx beta = nu - zeta;
    const cplx e = -pi * (tau - z) * (tau - z) / 2.0 - pi * beta * beta / 2.0 + pi * I * beta * (tau + z);
    return inv_sqrt2 * std::exp(e);
}

}  // namespace

GaussianMixtureSignal::GaussianMixtureSignal(std::vector<GaussianAtom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw DomainError("mixture signal needs at least one atom");
    for (const auto& a : atoms_) {
        if (!finite(a.amplitude) || !std::isfinite(a.shift) || !std::isfinite(a.modulation))
            throw DomainError("mixture atom has non-finite parameters");
    }
}

cplx GaussianMixtureSignal::operator()(double t) const {
    cplx s = 0.0;
    for (const auto& a : atoms_) {
        const double d = t - a.shift;
        s += a.amplitude * std::exp(-pi * d * d) * std::polar(1.0, 2.0 * pi * a.modulation * t);
    }
    return s;
}

GaussianMixtureSignal GaussianMixtureSignal::scaled(cplx c) const {
    auto atoms = atoms_;
    for (auto& a : atoms) a.amplitude *= c;
    return GaussianMixtureSignal(std::move(atoms));
}

cplx gabor_closed_form(const GaussianMixtureSignal& sig, double x, double y) {
    cplx s = 0.0;
    for (const auto& a : sig.atoms()) {
        const double dx = x - a.shift, dy = y - a.modulation;
        const double mag = std::exp(-pi * (dx * dx + dy * dy) / 2.0);
        s += a.amplitude * inv_sqrt2 * mag * std::polar(1.0, -pi * (x + a.shift) * dy);
    }
    return s;
}

cplx entire_extension(const GaussianMixtureSignal& sig, EntireExtensionParams p) {
    cplx s = 0.0;
    for (const auto& a : sig.atoms()) s += a.amplitude * atom_kernel(a.shift, a.modulation, p.z, p.zeta);
    return s;
}

double entire_extension_growth_bound(double l2norm, EntireExtensionParams p) {
    const double x = p.z.real(), y = p.z.imag(), eta = p.zeta.imag();
    return std::pow(2.0, -0.25) * l2norm * std::exp(pi * (y * y + 2.0 * x * eta + eta * eta));
}

cplx inner_product(const GaussianMixtureSignal& f, const GaussianMixtureSignal& g) {
    cplx s = 0.0;
    for (const auto& a : f.atoms())
        for (const auto& b : g.atoms())
            s += a.amplitude * std::conj(b.amplitude) * atom_kernel(a.shift, a.modulation, b.shift, b.modulation);
    return s;
}

double l2_norm(const GaussianMixtureSignal& sig) {
    return std::sqrt(std::max(0.0, inner_product(sig, sig).real()));
}

std::pair<GaussianMixtureSignal, GaussianMixtureSignal> make_sharpness_pair(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("sharpness parameter a must be positive");
    const double c = inv_sqrt2;
    GaussianMixtureSignal f({{c, -a, 0.0}, {c, a, 0.0}});
    GaussianMixtureSignal g({{c, -a, 0.0}, {-c, a, 0.0}});
    return {std::move(f), std::move(g)};
}

cplx fock_derivative(const GaussianMixtureSignal& sig, cplx w, int k) {
    return fock_derivatives(sig, w, k).back();
}

cplx fock_value(const GaussianMixtureSignal& sig, cplx w) { return fock_derivative(sig, w, 0); }

std::vector<cplx> fock_derivatives(const GaussianMixtureSignal& sig, cplx w, int K) {
    if (K < 0) throw DomainError("derivative order must be nonnegative");
    std::vector<cplx> out(static_cast<std::size_t>(K) + 1, 0.0);
    for (const auto& a : sig.atoms()) {
        const cplx rate = pi * cplx(a.shift, a.modulation);
        const cplx e = rate * w - pi * (a.shift * a.shift + a.modulation * a.modulation) / 2.0 +
                       I * pi * a.shift * a.modulation;
        cplx term = a.amplitude * inv_sqrt2 * std::exp(e);
        for (int k = 0; k <= K; ++k) {
            out[k] += term;
            term *= rate;
        }
    }
    return out;
}

}  // namespace gaborstab
