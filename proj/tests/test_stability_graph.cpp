#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gaborstab/errors.hpp"
#include "gaborstab/gabor_engine.hpp"
#include "gaborstab/stability_graph.hpp"
#include "oracles.hpp"

using namespace gaborstab;

namespace {

WeightedGraph random_graph(std::mt19937_64& rng, std::size_t n, double density) {
    std::uniform_real_distribution<double> uw(0.2, 3.0), us(0.0, 2.0), coin(0.0, 1.0);
    std::vector<double> w(n), s(n * n, 0.0);
    for (auto& x : w) x = uw(rng);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng) < density) s[i * n + j] = s[j * n + i] = us(rng);
    return WeightedGraph(w, s);
}

// min z*Lz / ||z||_w^2 over z with sum w_i z_i = 0, by projected gradient
// descent on the unit sphere in y = W^{1/2} z.
double lambda_pgd(const WeightedGraph& g) {
    const std::size_t n = g.n();
    std::vector<double> A(n * n);
    double gersh = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double lij = (i == j ? g.degree(i) : 0.0) - g.sigma(i, j);
            A[i * n + j] = lij / std::sqrt(g.w(i) * g.w(j));
            row += std::abs(A[i * n + j]);
        }
        gersh = std::max(gersh, row);
    }
    std::vector<double> q(n), y(n), grad(n);
    double qn = 0;
    for (std::size_t i = 0; i < n; ++i) qn += g.w(i);
    for (std::size_t i = 0; i < n; ++i) q[i] = std::sqrt(g.w(i) / qn);
    auto project = [&](std::vector<double>& v) {
        double d = 0, nn = 0;
        for (std::size_t i = 0; i < n; ++i) d += v[i] * q[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * q[i], nn += v[i] * v[i];
        for (auto& x : v) x /= std::sqrt(nn);
    };
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (auto& x : y) x = nd(rng);
    project(y);
    const double eta = 1.0 / (2.0 * gersh + 1e-300);
    double rq = 0;
    for (int it = 0; it < 400000; ++it) {
        rq = 0;
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = 0;
            for (std::size_t j = 0; j < n; ++j) grad[i] += A[i * n + j] * y[j];
            rq += y[i] * grad[i];
        }
        for (std::size_t i = 0; i < n; ++i) y[i] -= eta * 2.0 * (grad[i] - rq * y[i]);
        project(y);
    }
    return rq;
}

double delta0_of(const WeightedGraph& g) {
    double d = 0;
    for (std::size_t i = 0; i < g.n(); ++i) d = std::max(d, g.degree(i) / g.w(i));
    return d;
}

SpectrogramField constant_spec(const Grid2D& g, double c) {
    return SpectrogramField::from_real(g, std::vector<double>(g.size(), c));
}

}  // namespace

TEST(Graph, Validation) {
    EXPECT_THROW(WeightedGraph({1, 1}, {0, 1, 2, 0}), DomainError);
    EXPECT_THROW(WeightedGraph({1, 0}, {0, 1, 1, 0}), DomainError);
    EXPECT_THROW(WeightedGraph({1, 1}, {1, 1, 1, 0}), DomainError);
    EXPECT_THROW(WeightedGraph({1, 1}, {0, -1, -1, 0}), DomainError);
}

TEST(BuildGraph, HalfOverlapOnConstant) {
    const Grid2D g = Grid2D::from_bounds(-2, 2, -2, 2, 0.05);
    SquareCover cover({Square{0, 0, 1, 0}, Square{0.5, 0, 1, 0}});
    auto gr = build_graph(constant_spec(g, 1.0), cover);
    EXPECT_NEAR(gr.w(0), 1.0, 1e-10);
    EXPECT_NEAR(gr.w(1), 1.0, 1e-10);
    EXPECT_NEAR(gr.sigma(0, 1), 0.25, 1e-10);
    EXPECT_EQ(gr.sigma(0, 1), gr.sigma(1, 0));
}

TEST(BuildGraph, DisjointAndDuplicates) {
    const Grid2D g = Grid2D::from_bounds(-3, 3, -3, 3, 0.1);
    auto gr = build_graph(constant_spec(g, 1.0), SquareCover({Square{-1, 0, 1, 0}, Square{1, 0, 1, 0}}));
    EXPECT_EQ(gr.sigma(0, 1), 0.0);
    EXPECT_THROW(SquareCover({Square{0, 0, 1, 0}, Square{0, 0, 1, 0}}), DomainError);
    EXPECT_THROW(SquareCover({Square{0, 0, 1, 0}, Square{0, 0, 1, 3.14159265358979323846 / 2}}), DomainError);
    EXPECT_THROW(SquareCover({Square{0, 0, 2, 0}}), DomainError);
}

TEST(BuildGraph, Errors) {
    const Grid2D g = Grid2D::from_bounds(-1, 1, -1, 1, 0.1);
    EXPECT_THROW(build_graph(constant_spec(g, 1.0), SquareCover({Square{1, 0, 1, 0}})), DomainError);
    std::vector<double> v(g.size(), 0.0);
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
            if (g.x(i) < -0.05) v[g.index(i, j)] = 1.0;
    try {
        build_graph(SpectrogramField::from_real(g, v), SquareCover({Square{-0.5, 0, 1, 0}, Square{0.5, 0, 1, 0}}));
        FAIL() << "expected degenerate vertex";
    } catch (const DegenerateError& e) {
        ASSERT_EQ(e.indices().size(), 1u);
        EXPECT_EQ(e.indices()[0], 1u);
    }
}

TEST(BuildGraph, LaplacianPsdAndSymmetric) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.6, 0.6), th(0, 1.5);
    const Grid2D g = Grid2D::from_bounds(-2, 2, -2, 2, 0.05);
    for (int trial = 0; trial < 5; ++trial) {
        auto s = spectrogram(closed_form_gabor(oracle::random_mixture(rng, 3), g));
        std::vector<Square> sq;
        for (int k = 0; k < 4; ++k) sq.push_back({u(rng), u(rng), 1, th(rng)});
        auto gr = build_graph(s, SquareCover(sq));
        for (std::size_t i = 0; i < gr.n(); ++i)
            for (std::size_t j = 0; j < gr.n(); ++j) EXPECT_EQ(gr.sigma(i, j), gr.sigma(j, i));
        auto e = symmetric_eigen(gr.laplacian(), gr.n());
        EXPECT_GE(e.values.front(), -1e-10);
    }
}

TEST(Eigen, DiagonalizesRandomSymmetric) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    const std::size_t n = 7;
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a[i * n + j] = a[j * n + i] = nd(rng);
    auto e = symmetric_eigen(a, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) EXPECT_LE(e.values[k - 1], e.values[k]);
        for (std::size_t i = 0; i < n; ++i) {
            double av = 0;
            for (std::size_t j = 0; j < n; ++j) av += a[i * n + j] * e.vectors[j * n + k];
            EXPECT_NEAR(av, e.values[k] * e.vectors[i * n + k], 1e-12);
        }
    }
}

TEST(AlgebraicConnectivity, Examples) {
    const double s = 0.7;
    EXPECT_NEAR(algebraic_connectivity(WeightedGraph({1, 1}, {0, s, s, 0})), 2 * s, 1e-14);
    EXPECT_NEAR(algebraic_connectivity(WeightedGraph({1, 2, 3}, std::vector<double>(9, 0.0))), 0.0, 1e-15);
    EXPECT_NEAR(algebraic_connectivity(WeightedGraph({1, 1, 1}, {0, 1, 1, 1, 0, 1, 1, 1, 0})), 3.0, 1e-13);
    EXPECT_THROW(algebraic_connectivity(WeightedGraph({1}, {0})), DomainError);
}

TEST(AlgebraicConnectivity, MatchesProjectedGradient) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_graph(rng, 3 + trial % 6, 0.7);
        EXPECT_NEAR(algebraic_connectivity(g), lambda_pgd(g), 1e-6);
    }
}

TEST(Cheeger, Examples) {
    auto two = cheeger_constant(WeightedGraph({2, 5}, {0, 0.3, 0.3, 0}), CheegerMethod::exact);
    EXPECT_NEAR(two.value, 0.15, 1e-15);
    ASSERT_EQ(two.witness.size(), 1u);
    EXPECT_EQ(two.witness[0], 0u);
    EXPECT_EQ(cheeger_constant(WeightedGraph({1, 1, 1}, std::vector<double>(9, 0.0)), CheegerMethod::exact).value, 0.0);
    std::vector<double> path(16, 0.0);
    for (int i = 0; i < 3; ++i) path[i * 4 + i + 1] = path[(i + 1) * 4 + i] = 1;
    auto h = cheeger_constant(WeightedGraph({1, 1, 1, 1}, path), CheegerMethod::exact);
    EXPECT_NEAR(h.value, 0.5, 1e-15);
    EXPECT_NEAR(cut_ratio(WeightedGraph({1, 1, 1, 1}, path), h.witness), 0.5, 1e-15);
    EXPECT_THROW(cheeger_constant(WeightedGraph({1}, {0}), CheegerMethod::exact), DomainError);
    std::mt19937_64 rng(3);
    EXPECT_THROW(cheeger_constant(random_graph(rng, 21, 0.3), CheegerMethod::exact), ResourceError);
}

TEST(Cheeger, ExactMatchesBruteForce) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_graph(rng, 2 + trial % 8, 0.5);
        const std::size_t n = g.n();
        double best = INFINITY;
        for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
            double cut = 0, ws = 0, wt = 0;
            for (std::size_t i = 0; i < n; ++i) {
                ((mask >> i) & 1 ? ws : wt) += g.w(i);
                for (std::size_t j = 0; j < n; ++j)
                    if (((mask >> i) & 1) && !((mask >> j) & 1)) cut += g.sigma(i, j);
            }
            best = std::min(best, cut / std::min(ws, wt));
        }
        auto h = cheeger_constant(g, CheegerMethod::exact);
        EXPECT_NEAR(h.value, best, 1e-12 * (1 + best));
        EXPECT_NEAR(cut_ratio(g, h.witness), h.value, 1e-12 * (1 + best));
    }
}

TEST(Cheeger, InequalityOnRandomGraphs) {
    std::mt19937_64 rng(50);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto g = random_graph(rng, 2 + trial % 11, 0.2 + 0.015 * trial);
        auto rep = cheeger_inequality_check(g);
        const double slack = 1e-9;
        EXPECT_EQ(rep.cheeger_method, CheegerMethod::exact);
        // an edgeless graph has h = delta0 = 0 and a zero lower bound
        const double lo = rep.cheeger > 0 ? rep.cheeger * rep.cheeger / (2 * rep.delta0) : 0.0;
        if (!(2 * rep.cheeger + slack >= rep.lambda && rep.lambda + slack >= lo)) ++violations;
        EXPECT_TRUE(rep.inequality_holds);
        EXPECT_NEAR(rep.delta0, delta0_of(g), 1e-14);
    }
    EXPECT_EQ(violations, 0);
}

TEST(Cheeger, TwoVertexReport) {
    const double s = 0.4;
    auto rep = cheeger_inequality_check(WeightedGraph({1, 1}, {0, s, s, 0}));
    EXPECT_NEAR(rep.lambda, 2 * s, 1e-14);
    EXPECT_NEAR(rep.cheeger, s, 1e-14);
    EXPECT_NEAR(rep.delta0, s, 1e-14);
    auto dis = cheeger_inequality_check(WeightedGraph({1, 1}, {0, 0, 0, 0}));
    EXPECT_EQ(dis.lambda, 0.0);
    EXPECT_EQ(dis.cheeger, 0.0);
    EXPECT_TRUE(dis.inequality_holds);
}

TEST(Cheeger, SweepQuality) {
    std::mt19937_64 rng(60);
    for (int trial = 0; trial < 30; ++trial) {
        auto g = random_graph(rng, 3 + trial % 10, 0.6);
        const double exact = cheeger_constant(g, CheegerMethod::exact).value;
        auto sw = cheeger_constant(g, CheegerMethod::spectral_sweep);
        EXPECT_GE(sw.value, exact - 1e-12);
        EXPECT_LE(sw.value, 2 * std::sqrt(2 * delta0_of(g) * algebraic_connectivity(g)) + 1e-12);
        EXPECT_NEAR(cut_ratio(g, sw.witness), sw.value, 1e-12 * (1 + sw.value));
    }
}

TEST(Cheeger, LargeGraphUsesSweepBracket) {
    std::mt19937_64 rng(70);
    auto g = random_graph(rng, 24, 0.4);
    auto rep = cheeger_inequality_check(g);
    EXPECT_EQ(rep.cheeger_method, CheegerMethod::spectral_sweep);
    EXPECT_LE(rep.cheeger_lower, rep.cheeger_upper);
    EXPECT_NEAR(rep.cheeger_lower, rep.lambda / 2, 1e-14);
}

TEST(Graph, ScalingEdges) {
    std::mt19937_64 rng(80);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_graph(rng, 3 + trial % 6, 0.7);
        const double c = 0.37 + trial;
        auto gc = g.scaled_edges(c);
        EXPECT_NEAR(algebraic_connectivity(gc), c * algebraic_connectivity(g), 1e-11 * c);
        EXPECT_NEAR(cheeger_constant(gc, CheegerMethod::exact).value, c * cheeger_constant(g, CheegerMethod::exact).value,
                    1e-12 * c);
    }
}

TEST(Certificate, NineSquaresOnAtom) {
    GaussianMixtureSignal atom({{1.0, 0.0, 0.0}});
    const Grid2D g = Grid2D::from_bounds(-2, 2, -2, 2, 0.05);
    auto sf = spectrogram(closed_form_gabor(atom, g));
    auto sg = spectrogram(closed_form_gabor(GaussianMixtureSignal({{0.9, 0.05, 0.0}}), g));
    std::vector<Square> sq;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) sq.push_back({0.5 * i, 0.5 * j, 1, 0});
    SquareCover cover(sq);
    auto c = certificate(sf, sg, cover);
    double M = 0;
    for (const auto& s : sq) {
        const double w = region_norm(sf, Region({s}), Norm::L1);
        M += 1 / (w * w);
    }
    EXPECT_NEAR(c.M, M, 1e-9 * M);
    EXPECT_NEAR(c.K, sf.max_abs() + sg.max_abs(), 1e-15);
    EXPECT_EQ(c.nu, 9.0);
    EXPECT_EQ(c.L, 4.0);
    EXPECT_NEAR(c.volOmega, 4.0, 1e-12);
    EXPECT_TRUE(std::isfinite(c.bound_lambda));
    EXPECT_TRUE(std::isfinite(c.bound_cheeger));
    EXPECT_TRUE(c.connected);
    EXPECT_EQ(c.C, 1.0);
    for (double v : {c.K, c.M, c.L, c.nu, c.volOmega, c.lambda, c.cheeger, c.delta0, c.bound_lambda, c.bound_cheeger})
        EXPECT_GE(v, 0.0);
    const double base = c.K * std::sqrt(c.M * c.L) + std::sqrt(c.volOmega);
    const double tail = c.K * std::pow(c.nu, 1.5) * std::sqrt(c.L);
    EXPECT_NEAR(c.bound_lambda, std::sqrt(base + tail / c.lambda), 1e-12 * c.bound_lambda);
    EXPECT_NEAR(c.bound_cheeger, std::sqrt(base + tail * c.delta0 / (c.cheeger * c.cheeger)), 1e-12 * c.bound_cheeger);
    // lambda >= h^2 / (2 delta0) gives bound_lambda <= sqrt(2) bound_cheeger
    EXPECT_LE(c.bound_lambda, std::sqrt(2.0) * c.bound_cheeger * (1 + 1e-12));
}

TEST(Certificate, SingleSquareAndDisjoint) {
    GaussianMixtureSignal atom({{1.0, 0.0, 0.0}});
    const Grid2D g = Grid2D::from_bounds(-3, 3, -3, 3, 0.05);
    auto sf = spectrogram(closed_form_gabor(atom, g));
    auto one = certificate(sf, sf, SquareCover({Square{0, 0, 1, 0}}));
    EXPECT_TRUE(one.single_square);
    EXPECT_NEAR(one.bound_cheeger, std::sqrt(one.K / region_norm(sf, Region({Square{0, 0, 1, 0}}), Norm::L1)), 1e-12);
    auto two = certificate(sf, sf, SquareCover({Square{-1, 0, 1, 0}, Square{1, 0, 1, 0}}));
    EXPECT_TRUE(std::isinf(two.bound_cheeger));
    EXPECT_TRUE(std::isinf(two.bound_lambda));
    EXPECT_FALSE(two.connected);
    std::ostringstream os;
    write_certificate(os, two);
    EXPECT_NE(os.str().find("\"bound_cheeger\": \"inf\""), std::string::npos) << os.str();
}

TEST(Certificate, GraphExport) {
    WeightedGraph g({1, 2, 3}, {0, 0.5, 0, 0.5, 0, 0.25, 0, 0.25, 0});
    std::ostringstream e, v;
    write_graph_edges_csv(e, g);
    write_graph_vertices_csv(v, g);
    EXPECT_EQ(e.str(), "i,j,sigma\n0,1,0.5\n1,2,0.25\n");
    EXPECT_EQ(v.str(), "i,w\n0,1\n1,2\n2,3\n");
}
