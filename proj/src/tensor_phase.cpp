#include "gaborstab/tensor_phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "gaborstab/csv.hpp"
#include "gaborstab/errors.hpp"

namespace gaborstab {

namespace {
constexpr double pi = std::numbers::pi;
}

LocalJet::LocalJet(cplx center, int order) : center_(center), order_(order) {
    if (order < 0) throw DomainError("jet order must be nonnegative");
    d_.assign(static_cast<std::size_t>(order + 1) * static_cast<std::size_t>(order + 1), 0.0);
}

LocalJet LocalJet::from_derivatives(cplx center, std::span<const cplx> fk) {
    if (fk.empty()) throw DomainError("need at least F(center)");
    const int K = static_cast<int>(fk.size()) - 1;
    LocalJet jet(center, K);
    for (int k = 0; k <= K; ++k)
        for (int l = 0; l <= K; ++l) jet.at(k, l) = fk[k] * std::conj(fk[l]);
    return jet;
}

LocalJet jet_from_mixture(const GaussianMixtureSignal& sig, cplx center, int K) {
    if (K < 0) throw DomainError("jet order must be nonnegative");
    auto fk = fock_derivatives(sig, center, K);
    return LocalJet::from_derivatives(center, fk);
}

std::vector<double> fd_weights(double x0, std::span<const double> xs, int m) {
    const int n = static_cast<int>(xs.size()) - 1;
    if (n < m) throw DomainError("not enough stencil nodes for derivative order");
    // c[j][k]: weight of node j for derivative k
    std::vector<std::vector<double>> c(xs.size(), std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) w[j] = c[j][m];
    return w;
}

FdJet jet_from_spectrogram(const SpectrogramField& spec, std::size_t i, std::size_t j, int K) {
    if (spec.kind() != FieldKind::spectrogram) throw UsageError("finite-difference jets need a spectrogram");
    if (K < 0 || K > kMaxFdOrder) throw DomainError("finite-difference jets support orders 0..4 only");
    const Grid2D& g = spec.grid();
    // half-width for a fourth-order central stencil of the highest derivative
    const int half = K == 0 ? 0 : (K + 1) / 2 + 1;
    const auto need = static_cast<std::size_t>(2 * half + 1);
    if (g.nx < need || g.ny < need) throw DomainError("grid too small for the finite-difference stencil");
    const auto h = static_cast<std::size_t>(half);
    i = std::clamp(i, h, g.nx - 1 - h);
    j = std::clamp(j, h, g.ny - 1 - h);
    const double xc = g.x(i), yc = g.y(j);

    // U = S e^{pi (x^2 + y^2)} = |F(x - iy)|^2
    auto U = [&](long a, long b) {
        const std::size_t ii = static_cast<std::size_t>(static_cast<long>(i) + a);
        const std::size_t jj = static_cast<std::size_t>(static_cast<long>(j) + b);
        const double x = g.x(ii), y = g.y(jj);
        return spec.at(ii, jj).real() * std::exp(pi * (x * x + y * y));
    };

    // 1D central stencils for derivative orders 0..K
    std::vector<std::vector<double>> wx(K + 1), wy(K + 1);
    std::vector<int> hw(K + 1);
    for (int p = 0; p <= K; ++p) {
        hw[p] = p == 0 ? 0 : (p + 1) / 2 + 1;
        std::vector<double> ux, uy;
        for (int s = -hw[p]; s <= hw[p]; ++s) {
            ux.push_back(s * g.dx);
            uy.push_back(s * g.dy);
        }
        wx[p] = fd_weights(0.0, ux, p);
        wy[p] = fd_weights(0.0, uy, p);
    }
    // D(p, q) = d_x^p d_y^q U at the node
    std::vector<std::vector<double>> D(K + 1, std::vector<double>(K + 1, 0.0));
    for (int p = 0; p <= K; ++p) {
        for (int q = 0; p + q <= K; ++q) {
            double s = 0.0;
            for (int a = -hw[p]; a <= hw[p]; ++a) {
                const double ca = wx[p][a + hw[p]];
                if (ca == 0.0) continue;
                for (int b = -hw[q]; b <= hw[q]; ++b) s += ca * wy[q][b + hw[q]] * U(a, b);
            }
            D[p][q] = s;
        }
    }
    // w = x - iy: d = (d_x + i d_y)/2, dbar = (d_x - i d_y)/2
    auto binom = [](int n, int k) {
        double c = 1.0;
        for (int t = 1; t <= k; ++t) c = c * (n - k + t) / t;
        return c;
    };
    const cplx I{0.0, 1.0};
    LocalJet jet(cplx(xc, -yc), K);
    for (int k = 0; k <= K; ++k) {
        for (int l = 0; k + l <= K; ++l) {
            cplx s = 0.0;
            for (int a = 0; a <= k; ++a) {
                for (int b = 0; b <= l; ++b) {
                    const cplx coef = binom(k, a) * binom(l, b) * std::pow(I, k - a) * std::pow(-I, l - b);
                    s += coef * D[a + b][k - a + l - b];
                }
            }
            jet.at(k, l) = s / std::pow(2.0, k + l);
        }
    }
    return {jet, i, j};
}

TensorWeights tensor_weights(double r, int K) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive");
    if (K < 0) throw DomainError("order must be nonnegative");
    TensorWeights w{r, std::vector<double>(static_cast<std::size_t>(K) + 1)};
    w.omega[0] = pi * r * r;
    for (int k = 0; k < K; ++k) w.omega[k + 1] = w.omega[k] * r * r / ((k + 1.0) * (k + 2.0));
    return w;
}

double DeltaSeries::delta() const { return std::sqrt(std::max(0.0, delta_squared)); }

DeltaSeries delta_r(const LocalJet& jetF, const LocalJet& jetG, double r) {
    if (jetF.order() != jetG.order()) throw UsageError("jets have different orders");
    if (std::abs(jetF.center() - jetG.center()) > 1e-12 * (1.0 + std::abs(jetF.center())))
        throw UsageError("jets have different centers");
    const int K = jetF.order();
    const auto w = tensor_weights(r, K);
    DeltaSeries out;
    for (int k = 0; k <= K; ++k) {
        for (int l = 0; l <= K; ++l) {
            const double t = w.omega[k] * w.omega[l] * std::norm(jetF.at(k, l) - jetG.at(k, l));
            out.delta_squared += t;
            if (std::max(k, l) == K) out.tail += t;
        }
    }
    return out;
}

double disk_norm(const LocalJet& jet, double r) {
    const auto w = tensor_weights(r, jet.order());
    double s = 0.0;
    for (int k = 0; k <= jet.order(); ++k) s += w.omega[k] * jet.at(k, k).real();
    return std::sqrt(std::max(0.0, s));
}

double distance_from_delta(double normF, double delta) {
    if (!(normF > 0.0)) throw DomainError("||F|| must be positive for the distance bound");
    if (delta < 0.0) throw DomainError("delta must be nonnegative");
    return std::sqrt(5.0) * delta / normF;
}

double delta_structural_bound(double r, double fockInfF, double fockInfG, double l2diffQ) {
    if (!(r > 0.0)) throw DomainError("radius must be positive");
    if (fockInfF < 0.0 || fockInfG < 0.0 || l2diffQ < 0.0) throw DomainError("norms must be nonnegative");
    if (l2diffQ == 0.0) return 0.0;
    return std::pow(r, 4) * std::exp(8.0 * pi * pi * r * r) * (fockInfF * fockInfF + fockInfG * fockInfG) * l2diffQ;
}

std::vector<cplx> local_phase_from_modulus(const LocalJet& jet, std::span<const cplx> pts, double threshold) {
    const double d00 = jet.at(0, 0).real();
    if (!(d00 > threshold)) throw SingularCenterError("|F(center)|^2 below threshold; re-center the jet");
    const int K = jet.order();
    std::vector<cplx> coef(static_cast<std::size_t>(K) + 1);
    double fact = 1.0;
    const double norm0 = std::sqrt(d00);
    for (int k = 0; k <= K; ++k) {
        if (k > 0) fact *= k;
        coef[k] = jet.at(k, 0) / (fact * norm0);
    }
    std::vector<cplx> out(pts.size());
    for (std::size_t n = 0; n < pts.size(); ++n) {
        const cplx u = pts[n] - jet.center();
        cplx s = coef[K];
        for (int k = K - 1; k >= 0; --k) s = s * u + coef[k];
        out[n] = s;
    }
    return out;
}

double smoothness_growth_constant(int p) {
    if (p < 0) throw DomainError("p must be nonnegative");
    return std::pow(2.0, p + 3) * std::pow(pi, p + 1) * std::tgamma(p / 2.0 + 1.0);
}

double gamma_like_integral_bound(int p) {
    if (p < 0) throw DomainError("p must be nonnegative");
    return std::pow(2.0, p + 2) * std::tgamma(p / 2.0 + 1.0);
}

void write_jet_csv(std::ostream& os, const LocalJet& jet) {
    write_csv_header(os, {"k", "l", "re", "im"});
    for (int k = 0; k <= jet.order(); ++k)
        for (int l = 0; l <= jet.order(); ++l)
            write_csv_row(os, {static_cast<double>(k), static_cast<double>(l), jet.at(k, l).real(), jet.at(k, l).imag()});
}

}  // namespace gaborstab
