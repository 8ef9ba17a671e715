#include "gaborstab/cubature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gaborstab/errors.hpp"

namespace gaborstab {

namespace {

constexpr double pi = std::numbers::pi;

// P_N(x) and P_{N-1}(x)
std::pair<double, double> legendre_pair(int N, double x) {
    double p0 = 1.0, p1 = x;
    if (N == 0) return {1.0, 0.0};
    for (int k = 1; k < N; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

}  // namespace

GaussRule1D gauss_rule(int N, double s) {
    if (N < 1) throw DomainError("Gauss rule needs N >= 1");
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("half-width must be positive");
    GaussRule1D r;
    r.N = N;
    r.s = s;
    r.nodes.assign(N, 0.0);
    r.weights.assign(N, 0.0);
    const int half = (N + 1) / 2;
    for (int i = 1; i <= half; ++i) {
        double x = std::cos(pi * (i - 0.25) / (N + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const auto [p, pm1] = legendre_pair(N, x);
            dp = N * (x * p - pm1) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        const auto [p, pm1] = legendre_pair(N, x);
        dp = N * (x * p - pm1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // i-th root from the right end; mirror it to the left
        r.nodes[N - i] = x;
        r.nodes[i - 1] = -x;
        r.weights[N - i] = r.weights[i - 1] = w;
    }
    if (N % 2 == 1) r.nodes[N / 2] = 0.0;
    for (int i = 0; i < N; ++i) {
        r.nodes[i] *= s;
        r.weights[i] *= s;
    }
    return r;
}

std::complex<double> legendre_p(int N, std::complex<double> z) {
    if (N < 0) throw DomainError("Legendre degree must be nonnegative");
    std::complex<double> p0 = 1.0, p1 = z;
    if (N == 0) return p0;
    for (int k = 1; k < N; ++k) {
        const auto p2 = ((2.0 * k + 1.0) * z * p1 - static_cast<double>(k) * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

std::array<double, 2> SquareFrame::map(double u, double v) const {
    const double c = std::cos(rotation), s = std::sin(rotation);
    return {cx + c * u - s * v, cy + s * u + c * v};
}

ProductRule2D product_rule(int N, double half_width, SquareFrame frame) {
    ProductRule2D r;
    r.base = gauss_rule(N, half_width);
    r.frame = frame;
    r.points.reserve(static_cast<std::size_t>(N) * N);
    r.weights.reserve(static_cast<std::size_t>(N) * N);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            r.points.push_back(frame.map(r.base.nodes[i], r.base.nodes[j]));
            r.weights.push_back(r.base.weights[i] * r.base.weights[j]);
        }
    }
    return r;
}

double cubature_error(const std::function<double(double, double)>& phi, double exact, const ProductRule2D& rule) {
    double s = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) s += phi(rule.points[k][0], rule.points[k][1]) * rule.weights[k];
    return exact - s;
}

double chawla_bound(int N, double s, double a, double b, double supPhi) {
    if (N < 1) throw DomainError("N must be positive");
    if (!(s > 0.0) || !(b > 0.0)) throw DomainError("s and b must be positive");
    if (!(s < a)) throw DomainError("chawla_bound requires s < a");
    if (supPhi < 0.0) throw DomainError("supPhi must be nonnegative");
    if (supPhi == 0.0) return 0.0;
    const double m = std::min(a - s, b);
    const double lg = std::log(8.0 * s * (a + b) / pi) - N * std::log(m / s) +
                      std::log(2.0 * (a + b) / m + 0.5 * std::log((a + s) / (a - s))) + std::log(supPhi);
    return lg > std::log(1e300) ? std::numeric_limits<double>::infinity() : std::exp(lg);
}

double log_spectro_error_bound(int N, double s, double kappa) {
    if (N < 1) throw DomainError("N must be positive");
    if (!(s > 0.0)) throw DomainError("s must be positive");
    if (kappa < 0.0) throw DomainError("kappa must be nonnegative");
    if (kappa == 0.0) return -std::numeric_limits<double>::infinity();
    const double A = std::log(std::sqrt(8.0 * pi) * s + 2.0);
    return std::log(3.0) + (N + 3.0) * A - (N - 1.0) / 2.0 * std::log(static_cast<double>(N)) + N / 2.0 +
           std::log(kappa);
}

double spectro_error_bound(int N, double s, double kappa) {
    const double lg = log_spectro_error_bound(N, s, kappa);
    return lg > std::log(1e300) ? std::numeric_limits<double>::infinity() : std::exp(lg);
}

SamplingPlan plan_sampling(double epsilon, double s, double kappa, SquareFrame frame) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("epsilon must lie in (0, 1/2)");
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("half-width must be positive");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
    const double target = 4.0 * std::log(epsilon);
    auto lb = [&](int N) { return log_spectro_error_bound(N, s, kappa); };
    int N = 1;
    if (lb(1) > target) {
        // the log bound is concave in N: walk to its peak, then search the decreasing branch
        constexpr int cap = 1 << 26;
        int peak = 1;
        while (lb(peak + 1) >= lb(peak)) {
            if (++peak >= cap) throw ResourceError("sampling planner: bound peak out of range");
        }
        int lo = peak, hi = peak;
        while (lb(hi) > target) {
            lo = hi;
            if (hi >= cap) throw ResourceError("sampling planner: required N out of range");
            hi = std::min(2 * hi, cap);
        }
        while (hi - lo > 1) {
            const int mid = lo + (hi - lo) / 2;
            (lb(mid) > target ? lo : hi) = mid;
        }
        N = hi;
    }
    SamplingPlan plan;
    plan.N = N;
    plan.rule = product_rule(N, s, frame);
    plan.epsilon = epsilon;
    plan.predicted_error = spectro_error_bound(N, s, kappa);
    plan.kappa = kappa;
    return plan;
}

double discrete_weighted_norm(std::span<const double> values, const ProductRule2D& rule) {
    if (values.size() != rule.weights.size()) throw UsageError("value count does not match the rule");
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) s += values[k] * values[k] * rule.weights[k];
    return std::sqrt(s);
}

bool legendre_lower_bound_check(int N, double a, double b) {
    if (N < 0) throw DomainError("N must be nonnegative");
    if (!(a > 1.0) || !(b > 0.0)) throw DomainError("need a > 1 and b > 0");
    const double lower = std::pow(std::min(a - 1.0, b), N);
    const double slack = 1.0 - 1e-12;
    bool ok = true;
    auto test = [&](std::complex<double> z) { ok = ok && std::abs(legendre_p(N, z)) >= lower * slack; };
    constexpr int per_side = 400, on_ray = 400;
    for (int k = 0; k < per_side; ++k) {
        const double t = static_cast<double>(k) / per_side;
        test({-a + 2.0 * a * t, -b});
        test({a, -b + 2.0 * b * t});
        test({a - 2.0 * a * t, b});
        test({-a, b - 2.0 * b * t});
    }
    for (int k = 0; k < on_ray; ++k) test({a + 10.0 * k / (on_ray - 1.0), 0.0});
    return ok;
}

std::complex<double> phi_extension(const GaussianMixtureSignal& f, const GaussianMixtureSignal& g,
                                   std::complex<double> z, std::complex<double> zeta) {
    const EntireExtensionParams p{z, zeta}, q{std::conj(z), std::conj(zeta)};
    const auto d = entire_extension(f, p) * std::conj(entire_extension(f, q)) -
                   entire_extension(g, p) * std::conj(entire_extension(g, q));
    return d * d;
}

double phi_sup_bound(double b, double kappa) { return std::sqrt(2.0) * std::exp(4.0 * pi * b * b) * kappa; }

double phi_sup_bound_general(double b, double normF, double normG) {
    return std::exp(4.0 * pi * b * b) * (std::pow(normF, 4) + std::pow(normG, 4));
}

}  // namespace gaborstab
