// One PASS/FAIL line per acceptance criterion.  With --criterion N only that
// criterion runs and the exit status reflects it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gaborstab/cubature.hpp"
#include "gaborstab/gabor_engine.hpp"
#include "gaborstab/stability_graph.hpp"
#include "gaborstab/stitching.hpp"
#include "gaborstab/tensor_phase.hpp"
#include "oracles.hpp"

using namespace gaborstab;
using oracle::pi;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Fit {
    double slope, intercept, r2;
};
Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx, syy > 0 ? sxy * sxy / (sxx * syy) : 1.0};
}

long double spectro_diff_sq(const GaussianMixtureSignal& f, const GaussianMixtureSignal& g, long double x, long double y) {
    constexpr long double kPi = 3.141592653589793238462643383279502884L;
    auto S = [&](const GaussianMixtureSignal& s) {
        std::complex<long double> acc = 0;
        for (const auto& at : s.atoms()) {
            const long double tau = at.shift, nu = at.modulation;
            const long double env = std::exp(-kPi * ((x - tau) * (x - tau) + (y - nu) * (y - nu)) / 2);
            const long double ph = -kPi * (x + tau) * (y - nu);
            acc += std::complex<long double>(at.amplitude.real(), at.amplitude.imag()) * env *
                   std::complex<long double>(std::cos(ph), std::sin(ph));
        }
        return std::norm(acc) / 2;
    };
    const long double d = S(f) - S(g);
    return d * d;
}

// 1. quadrature vs closed form for 5 atoms on [-2, 2]^2
Outcome c1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    auto f = oracle::random_mixture(rng, 5, 1.5, 1.5);
    const Grid2D g = Grid2D::from_bounds(-2, 2, -2, 2, 0.05);
    auto num = quadrature_gabor(f, g);
    auto ref = closed_form_gabor(f, g);
    double err = 0;
    for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, std::abs(num.values()[k] - ref.values()[k]));
    const double t = seconds_since(t0);
    return {err <= 1e-8 && t < 5.0, fmt("max abs error %.3g (tol 1e-8) on %zux%zu grid, %.2f s (limit 5 s)", err, g.nx, g.ny, t)};
}

// 2. truncated delta_r^2 vs Monte-Carlo tensor norm and exact monomial values
Outcome c2() {
    const int K = 8;
    auto poly_jet = [&](const std::vector<cplx>& c) {
        std::vector<cplx> fk(K + 1, 0.0);
        double fact = 1;
        for (int k = 0; k <= K; ++k) {
            if (k > 0) fact *= k;
            if (k < static_cast<int>(c.size())) fk[k] = fact * c[k];
        }
        return LocalJet::from_derivatives(0.0, fk);
    };
    auto horner = [](const std::vector<cplx>& c, cplx z) {
        cplx s = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
        return s;
    };
    const double e1 = std::abs(delta_r(poly_jet({1.0}), poly_jet({0.0}), 1.0).delta_squared - pi * pi);
    const double e2 = std::abs(delta_r(poly_jet({0.0, 1.0}), poly_jet({0.0}), 1.0).delta_squared - pi * pi / 4);
    bool ok = e1 <= 1e-10 && e2 <= 1e-10;
    std::mt19937_64 rng(202);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(-1, 1);
    auto disk = [&] {
        for (;;) {
            const cplx z(u(rng), u(rng));
            if (std::norm(z) <= 1) return z;
        }
    };
    double worst = 0;
    for (int pair = 0; pair < 3; ++pair) {
        std::vector<cplx> cf(4), cg(4);
        for (auto& c : cf) c = {nd(rng), nd(rng)};
        for (auto& c : cg) c = {nd(rng), nd(rng)};
        const double series = delta_r(poly_jet(cf), poly_jet(cg), 1.0).delta_squared;
        const int n = 1000000;
        double s = 0, s2 = 0;
        for (int k = 0; k < n; ++k) {
            const cplx z = disk(), zeta = disk();
            const double v = std::norm(horner(cf, z) * std::conj(horner(cf, zeta)) - horner(cg, z) * std::conj(horner(cg, zeta)));
            s += v;
            s2 += v * v;
        }
        const double mean = s / n, var = s2 / n - mean * mean;
        const double mc = mean * pi * pi, se = std::sqrt(var / n) * pi * pi;
        worst = std::max(worst, std::abs(series - mc) / se);
    }
    ok = ok && worst <= 3.0;
    return {ok, fmt("monomials |err| %.2g, %.2g (tol 1e-10); cubic pairs worst |series - MC| = %.2f SE (tol 3)", e1, e2, worst)};
}

// 3. sqrt(5) delta / ||F|| bounds the phase distance on B_r
Outcome c3() {
    std::mt19937_64 rng(303);
    int violations = 0, checks = 0;
    double tightest = INFINITY;
    for (int trial = 0; trial < 50; ++trial) {
        auto f = oracle::random_mixture(rng, 3), g = oracle::random_mixture(rng, 3);
        auto jf = jet_from_mixture(f, 0.0, 30), jg = jet_from_mixture(g, 0.0, 30);
        for (double r : {0.5, 1.0}) {
            auto F = [&](cplx w) { return fock_value(f, w); };
            auto G = [&](cplx w) { return fock_value(g, w); };
            const double nF2 = oracle::disk_integral([&](cplx w) { return std::norm(F(w)); }, 0.0, r);
            const double nG2 = oracle::disk_integral([&](cplx w) { return std::norm(G(w)); }, 0.0, r);
            const cplx ip = oracle::disk_integral([&](cplx w) { return G(w) * std::conj(F(w)); }, 0.0, r);
            const double truth = oracle::min_over_tau(nF2, nG2, ip);
            const double bound = distance_from_delta(std::sqrt(nF2), delta_r(jf, jg, r).delta());
            ++checks;
            if (bound < truth) ++violations;
            if (truth > 0) tightest = std::min(tightest, bound / truth);
        }
    }
    return {violations == 0, fmt("%d violations over %d (pair, r) checks; smallest bound/distance %.3f", violations, checks, tightest)};
}

// 4. Cheeger inequality on random graphs, exact h
Outcome c4() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uw(0.2, 3.0), us(0.0, 2.0), coin(0.0, 1.0);
    std::uniform_int_distribution<int> un(2, 12);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = static_cast<std::size_t>(un(rng));
        const double density = 0.3 + 0.6 * coin(rng);
        std::vector<double> w(n), s(n * n, 0.0);
        for (auto& x : w) x = uw(rng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (coin(rng) < density) s[i * n + j] = s[j * n + i] = us(rng);
        WeightedGraph g(w, s);
        const double lambda = algebraic_connectivity(g);
        const double h = cheeger_constant(g, CheegerMethod::exact).value;
        double d0 = 0;
        for (std::size_t i = 0; i < n; ++i) d0 = std::max(d0, g.degree(i) / g.w(i));
        const double lo = h > 0 ? h * h / (2 * d0) : 0.0;
        if (!(2 * h + 1e-9 >= lambda && lambda + 1e-9 >= lo)) ++violations;
    }
    return {violations == 0, fmt("%d violations over 50 graphs (n <= 12, slack 1e-9)", violations)};
}

// 5. sharpness growth of the stability ratio
Outcome c5() {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid2D grid = Grid2D::from_bounds(-1, 1, -1, 1, 0.02);
    const Region Q({Square{0, 0, 1, 0}});
    const RegionQuadrature quad(grid, Q);
    std::vector<double> as{0.5, 1.0, 1.5, 2.0}, logs;
    for (double a : as) {
        auto [f, g] = make_sharpness_pair(a);
        auto F = closed_form_gabor(f, grid), G = closed_form_gabor(g, grid);
        const double dist = min_phase_distance(F, G, Q).dist;
        std::vector<double> d2(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double d = std::norm(F.values()[k]) - std::norm(G.values()[k]);
            d2[k] = d * d;
        }
        const double l2 = std::sqrt(quad.integrate(d2));
        logs.push_back(std::log(dist / std::sqrt(l2)));
    }
    const Fit fit = linear_fit(as, logs);
    const double t = seconds_since(t0);
    const bool ok = fit.slope >= 0.95 * pi && fit.slope <= 1.3 * pi && t < 60;
    return {ok, fmt("log-ratio slope %.4f pi (required [0.95 pi, 1.3 pi]), %.2f s", fit.slope / pi, t)};
}

// 6. cubature error vs the spectrogram-difference bound, sharpness pair a = 1
Outcome c6() {
    auto [f, g] = make_sharpness_pair(1.0);
    const double kappa = l2_norm(f) * l2_norm(f) + l2_norm(g) * l2_norm(g);
    // 40 panels of 10-point Gauss per axis: 400 x 400 nodes, long double
    const long double exact = oracle::integrate2d_ld(
        [&](long double x, long double y) { return spectro_diff_sq(f, g, x, y); }, -0.5L, 0.5L, -0.5L, 0.5L, 40);
    std::vector<double> errs;
    int violations = 0;
    std::string detail;
    for (int N : {8, 12, 16}) {
        auto rule = product_rule(N, 0.5);
        long double sum = 0;
        for (std::size_t k = 0; k < rule.points.size(); ++k)
            sum += rule.weights[k] * spectro_diff_sq(f, g, rule.points[k][0], rule.points[k][1]);
        const double err = static_cast<double>(std::abs(exact - sum));
        const double bound = spectro_error_bound(N, 0.5, kappa);
        if (err > bound) ++violations;
        errs.push_back(err);
        detail += fmt("N=%d |E|=%.3g bound=%.3g; ", N, err, bound);
    }
    const bool mono = errs[1] < errs[0] && errs[2] < errs[1];
    return {violations == 0 && mono, detail + (mono ? "monotone" : "NOT monotone")};
}

// 7. planner minimality, achieved error, and logarithmic growth
Outcome c7() {
    auto [f, g] = make_sharpness_pair(1.0);
    const double kappa = l2_norm(f) * l2_norm(f) + l2_norm(g) * l2_norm(g);
    const long double exact = oracle::integrate2d_ld(
        [&](long double x, long double y) { return spectro_diff_sq(f, g, x, y); }, -0.5L, 0.5L, -0.5L, 0.5L, 40);
    std::vector<double> xs, ns;
    bool ok = true;
    std::string detail;
    for (double eps : {0.25, 0.125, 0.0625}) {
        auto plan = plan_sampling(eps, 0.5, kappa);
        const double e4 = std::pow(eps, 4);
        const double achieved = std::abs(cubature_error(
            [&](double x, double y) { return static_cast<double>(spectro_diff_sq(f, g, x, y)); }, static_cast<double>(exact),
            plan.rule));
        const bool minimal = plan.N == 1 || spectro_error_bound(plan.N - 1, 0.5, kappa) > e4;
        ok = ok && achieved <= e4 && minimal && spectro_error_bound(plan.N, 0.5, kappa) <= e4;
        xs.push_back(std::log(1 / eps));
        ns.push_back(plan.N);
        detail += fmt("eps=%g N=%d |E|=%.2g%s; ", eps, plan.N, achieved, minimal ? "" : " (not minimal)");
    }
    const Fit fit = linear_fit(xs, ns);
    ok = ok && fit.r2 >= 0.9;
    return {ok, detail + fmt("R^2=%.4f (tol 0.9)", fit.r2)};
}

// 8. end-to-end retrieval from the spectrogram of the Gaussian
Outcome c8() {
    const GaussianMixtureSignal phi({{1.0, 0.0, 0.0}});
    const Grid2D grid = Grid2D::from_bounds(-1.5, 1.5, -1.5, 1.5, 0.02);
    auto G = closed_form_gabor(phi, grid);
    SquareCover cover({Square{-0.25, -0.25, 1, 0}, Square{0.25, -0.25, 1, 0}, Square{-0.25, 0.25, 1, 0},
                       Square{0.25, 0.25, 1, 0}});
    RetrievalOptions opt;
    opt.source = JetSource::analytic;
    opt.order = 14;
    opt.signal = phi;
    auto res = retrieve_phase(spectrogram(G), cover, opt);
    if (!res.connected()) return {false, "cover split into several components"};
    const Region omega = cover.region();
    const double rel = min_phase_distance(G, res.field(), omega).dist / std::sqrt(region_norm(spectrogram(G), omega, Norm::L1));
    return {rel <= 1e-3, fmt("relative distance %.3g (tol 1e-3)", rel)};
}

// 9. fitted certificate constant stable under grid refinement
Outcome c9() {
    std::vector<std::vector<Square>> covers{
        {{-0.25, -0.25, 1, 0}, {0.25, -0.25, 1, 0}, {-0.25, 0.25, 1, 0}, {0.25, 0.25, 1, 0}},
        {{-0.6, 0, 1, 0}, {0, 0, 1, 0}, {0.6, 0, 1, 0}},
        {{0, 0, 1, 0.3}, {0.4, 0.3, 1, -0.2}, {-0.3, 0.35, 1, 0.6}},
    };
    auto fitted = [&](double h) {
        std::mt19937_64 rng(909);
        const Grid2D grid = Grid2D::from_bounds(-2, 2, -2, 2, h);
        double C = 0;
        for (int pair = 0; pair < 10; ++pair) {
            auto f = oracle::random_mixture(rng, 3, 0.6, 0.6), g = oracle::random_mixture(rng, 3, 0.6, 0.6);
            auto F = closed_form_gabor(f, grid), G = closed_form_gabor(g, grid);
            auto SF = spectrogram(F), SG = spectrogram(G);
            for (const auto& sq : covers) {
                SquareCover cover(sq);
                auto cert = certificate(SF, SG, cover);
                const RegionQuadrature quad(grid, cover.region());
                std::vector<double> d2(grid.size());
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    const double d = SF.values()[k].real() - SG.values()[k].real();
                    d2[k] = d * d;
                }
                const double l2 = std::sqrt(quad.integrate(d2));
                const double dist = min_phase_distance(F.values(), G.values(), quad).dist;
                C = std::max(C, dist / (cert.bound_cheeger * std::sqrt(l2)));
            }
        }
        return C;
    };
    const double c1 = fitted(0.05), c2 = fitted(0.025);
    const double change = std::abs(c2 / c1 - 1);
    return {std::isfinite(c1) && c1 > 0 && change <= 0.10, fmt("C_hat %.6g at h=0.05, %.6g at h=0.025, change %.2f%% (tol 10%%)", c1, c2, 100 * change)};
}

// 10. Gauss exactness and the Legendre lower bound
Outcome c10() {
    double worst = 0;
    for (int N = 1; N <= 30; ++N) {
        auto r = gauss_rule(N, 1.0);
        for (int m = 0; m <= 2 * N - 1; ++m) {
            long double q = 0;
            for (int k = 0; k < N; ++k) q += r.weights[k] * std::pow(static_cast<long double>(r.nodes[k]), m);
            const double exact = (m % 2) ? 0.0 : 2.0 / (m + 1);
            worst = std::max(worst, static_cast<double>(std::abs(q - exact)) / (2.0 / (m + 1)));
        }
    }
    int failed = 0;
    for (int N = 1; N <= 10; ++N)
        for (auto [a, b] : {std::pair{1.5, 0.25}, std::pair{2.0, 1.0}, std::pair{3.0, 2.0}})
            if (!legendre_lower_bound_check(N, a, b)) ++failed;
    return {worst <= 1e-11 && failed == 0, fmt("worst monomial relative error %.3g (tol 1e-11); Legendre check failures %d of 30", worst, failed)};
}

const char* const kNames[] = {"closed-form agreement", "tensor identity", "distance constant", "Cheeger inequality",
                              "sharpness growth", "cubature bound", "planner contract", "end-to-end retrieval",
                              "certificate sanity", "Gauss rules"};

}  // namespace

int main(int argc, char** argv) {
    const std::function<Outcome()> runs[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
    int only = 0;
    for (int k = 1; k < argc; ++k) {
        if (std::strcmp(argv[k], "--criterion") == 0 && k + 1 < argc) {
            only = std::atoi(argv[++k]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (only < 0 || only > 10) {
        std::fprintf(stderr, "criterion must be 1..10\n");
        return 2;
    }
    bool all = true;
    for (int c = 1; c <= 10; ++c) {
        if (only && c != only) continue;
        Outcome o;
        try {
            o = runs[c - 1]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d (%s): %s: %s\n", c, kNames[c - 1], o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
