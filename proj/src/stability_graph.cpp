#include "gaborstab/stability_graph.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <ostream>

#include "gaborstab/csv.hpp"
#include "gaborstab/errors.hpp"

namespace gaborstab {

SquareCover::SquareCover(std::vector<Square> squares) : squares_(std::move(squares)) {
    if (squares_.empty()) throw DomainError("cover needs at least one square");
    for (std::size_t i = 0; i < squares_.size(); ++i) {
        squares_[i].validate();
        if (std::abs(squares_[i].side - 1.0) > 1e-12) throw DomainError("cover squares must have unit side");
        for (std::size_t j = 0; j < i; ++j) {
            const auto a = squares_[i].corners(), b = squares_[j].corners();
            bool same = true;
            // same point set regardless of corner labelling
            for (const auto& p : a) {
                bool hit = false;
                for (const auto& q : b) hit = hit || (std::abs(p.x - q.x) < 1e-12 && std::abs(p.y - q.y) < 1e-12);
                same = same && hit;
            }
            if (same)
                throw DomainError("duplicate squares " + std::to_string(j) + " and " + std::to_string(i) + " in cover");
        }
    }
}

std::vector<Polygon> SquareCover::polygons() const {
    std::vector<Polygon> out;
    for (const auto& s : squares_) out.push_back(s.polygon());
    return out;
}

WeightedGraph::WeightedGraph(std::vector<double> w, std::vector<double> sigma) : w_(std::move(w)), sigma_(std::move(sigma)) {
    const std::size_t n = w_.size();
    if (sigma_.size() != n * n) throw UsageError("sigma must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(w_[i] > 0.0) || !std::isfinite(w_[i])) throw DomainError("vertex weights must be positive");
        if (sigma_[i * n + i] != 0.0) throw DomainError("sigma must have zero diagonal");
        for (std::size_t j = 0; j < n; ++j) {
            const double s = sigma_[i * n + j];
            if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("edge weights must be nonnegative");
            if (s != sigma_[j * n + i]) throw DomainError("sigma must be symmetric");
        }
    }
}

double WeightedGraph::degree(std::size_t i) const {
    double d = 0.0;
    for (std::size_t j = 0; j < n(); ++j) d += sigma(i, j);
    return d;
}

std::vector<double> WeightedGraph::laplacian() const {
    const std::size_t m = n();
    std::vector<double> L(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) L[i * m + j] = -sigma(i, j);
        L[i * m + i] = degree(i);
    }
    return L;
}

WeightedGraph WeightedGraph::scaled_edges(double c) const {
    auto s = sigma_;
    for (auto& v : s) v *= c;
    return WeightedGraph(w_, std::move(s));
}

SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t n) {
    if (a.size() != n * n) throw UsageError("matrix size mismatch");
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
        if (std::sqrt(off) <= 1e-15 * scale || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return A(x, x) < A(y, y); });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = A(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + k] = v[i * n + order[k]];
    }
    return out;
}

WeightedGraph build_graph(const SpectrogramField& specF, const SquareCover& cover) {
    if (specF.kind() != FieldKind::spectrogram) throw UsageError("build_graph expects a spectrogram");
    const std::size_t n = cover.size();
    const auto polys = cover.polygons();
    const auto vals = specF.real_values();
    std::vector<double> w(n);
    std::vector<std::size_t> empty;
    for (std::size_t i = 0; i < n; ++i) {
        RegionQuadrature q(specF.grid(), Region::from_polygons({polys[i]}));
        w[i] = std::max(0.0, q.integrate(vals));
        if (!(w[i] > 0.0)) empty.push_back(i);
    }
    if (!empty.empty()) {
        std::string msg = "squares without spectrogram energy:";
        for (auto i : empty) msg += " " + std::to_string(i);
        throw DegenerateError(msg, empty);
    }
    std::vector<double> sigma(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Polygon p = clip(polys[i], polys[j]);
            if (polygon_area(p) <= kAreaEps) continue;
            RegionQuadrature q(specF.grid(), Region::from_polygons({p}));
            const double e = std::max(0.0, q.integrate(vals));
            sigma[i * n + j] = sigma[j * n + i] = e * e;
        }
    }
    return WeightedGraph(std::move(w), std::move(sigma));
}

namespace {

SymmetricEigen normalized_eigen(const WeightedGraph& g) {
    const std::size_t n = g.n();
    auto L = g.laplacian();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) L[i * n + j] /= std::sqrt(g.w(i) * g.w(j));
    return symmetric_eigen(std::move(L), n);
}

}  // namespace

double algebraic_connectivity(const WeightedGraph& g) {
    if (g.n() < 2) throw DomainError("algebraic connectivity needs at least 2 vertices");
    return std::max(0.0, normalized_eigen(g).values[1]);
}

double cut_ratio(const WeightedGraph& g, const std::vector<std::size_t>& S) {
    const std::size_t n = g.n();
    std::vector<char> in(n, 0);
    for (auto v : S) in.at(v) = 1;
    double cut = 0.0, ws = 0.0, wt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        (in[i] ? ws : wt) += g.w(i);
        if (!in[i]) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (!in[j]) cut += g.sigma(i, j);
    }
    if (ws == 0.0 || wt == 0.0) throw DomainError("cut must split the vertex set");
    return cut / std::min(ws, wt);
}

CheegerResult cheeger_constant(const WeightedGraph& g, CheegerMethod method) {
    const std::size_t n = g.n();
    if (n < 2) throw DomainError("Cheeger constant needs at least 2 vertices");
    CheegerResult res;
    res.method = method;
    res.value = std::numeric_limits<double>::infinity();
    if (method == CheegerMethod::exact) {
        if (n > kMaxExactCheeger) throw ResourceError("exact Cheeger enumeration limited to 20 vertices");
        const double wtot = std::accumulate(g.w().begin(), g.w().end(), 0.0);
        // subsets of the first n-1 vertices; the complement holds vertex n-1
        const std::uint64_t count = std::uint64_t{1} << (n - 1);
        std::uint64_t best = 0;
        for (std::uint64_t mask = 1; mask < count; ++mask) {
            double ws = 0.0, cut = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                if (!((mask >> i) & 1U)) continue;
                ws += g.w(i);
                for (std::size_t j = 0; j < n; ++j)
                    if (j == n - 1 || !((mask >> j) & 1U)) cut += g.sigma(i, j);
            }
            const double r = cut / std::min(ws, wtot - ws);
            if (r < res.value) {
                res.value = r;
                best = mask;
            }
        }
        for (std::size_t i = 0; i + 1 < n; ++i)
            if ((best >> i) & 1U) res.witness.push_back(i);
        return res;
    }
    const auto eig = normalized_eigen(g);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = eig.vectors[i * n + 1] / std::sqrt(g.w(i));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
    std::size_t best = 1;
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<std::size_t> S(order.begin(), order.begin() + static_cast<long>(k));
        const double r = cut_ratio(g, S);
        if (r < res.value) {
            res.value = r;
            best = k;
        }
    }
    res.witness.assign(order.begin(), order.begin() + static_cast<long>(best));
    std::sort(res.witness.begin(), res.witness.end());
    return res;
}

ConnectivityReport cheeger_inequality_check(const WeightedGraph& g) {
    if (g.n() < 2) throw DomainError("connectivity report needs at least 2 vertices");
    ConnectivityReport rep;
    rep.lambda = algebraic_connectivity(g);
    const auto method = g.n() <= kMaxExactCheeger ? CheegerMethod::exact : CheegerMethod::spectral_sweep;
    const auto ch = cheeger_constant(g, method);
    rep.cheeger = ch.value;
    rep.cheeger_method = method;
    rep.witness = ch.witness;
    for (std::size_t v = 0; v < g.n(); ++v) rep.delta0 = std::max(rep.delta0, g.degree(v) / g.w(v));
    const double lo = rep.delta0 > 0.0 ? rep.cheeger * rep.cheeger / (2.0 * rep.delta0) : 0.0;
    if (method == CheegerMethod::exact) {
        rep.cheeger_lower = rep.cheeger_upper = rep.cheeger;
        const double tol = 1e-9 + 1e-12 * std::max({rep.lambda, rep.cheeger, lo});
        rep.inequality_holds = 2.0 * rep.cheeger >= rep.lambda - tol && rep.lambda >= lo - tol;
    } else {
        rep.cheeger_lower = rep.lambda / 2.0;
        rep.cheeger_upper = std::min(rep.cheeger, std::sqrt(2.0 * rep.delta0 * rep.lambda));
        rep.inequality_holds = true;
    }
    return rep;
}

StabilityCertificate certificate(const SpectrogramField& specF, const SpectrogramField& specG, const SquareCover& cover) {
    if (specF.kind() != FieldKind::spectrogram || specG.kind() != FieldKind::spectrogram)
        throw UsageError("certificate expects two spectrograms");
    StabilityCertificate c;
    c.graph = build_graph(specF, cover);
    // also validates that the cover lies inside the second field
    RegionQuadrature(specG.grid(), cover.region());
    const auto polys = cover.polygons();
    c.K = specF.max_abs() + specG.max_abs();
    for (double w : c.graph.w()) c.M += 1.0 / (w * w);
    c.L = max_multiplicity(polys);
    c.nu = static_cast<double>(cover.size());
    c.volOmega = union_area(polys);
    const double inf = std::numeric_limits<double>::infinity();
    if (cover.size() == 1) {
        c.single_square = true;
        c.lambda = c.cheeger = inf;
        c.bound_lambda = c.bound_cheeger = std::sqrt(c.K / c.graph.w(0));
        return c;
    }
    const auto rep = cheeger_inequality_check(c.graph);
    c.lambda = rep.lambda;
    c.delta0 = rep.delta0;
    c.cheeger_method = rep.cheeger_method;
    // with a sweep estimate only the lower bracket keeps the bound conservative
    c.cheeger = rep.cheeger_method == CheegerMethod::exact ? rep.cheeger : rep.cheeger_lower;
    c.connected = c.cheeger > 0.0 && c.lambda > 0.0;
    const double base = c.K * std::sqrt(c.M) * std::sqrt(c.L) + std::sqrt(c.volOmega);
    const double tail = c.K * std::pow(c.nu, 1.5) * std::sqrt(c.L);
    c.bound_lambda = c.lambda > 0.0 ? std::sqrt(base + tail / c.lambda) : inf;
    c.bound_cheeger = c.cheeger > 0.0 ? std::sqrt(base + tail * c.delta0 / (c.cheeger * c.cheeger)) : inf;
    return c;
}

namespace {

std::string json_number(double v) {
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    if (std::isnan(v)) return "\"nan\"";
    return format_number(v);
}

}  // namespace

void write_certificate(std::ostream& os, const StabilityCertificate& c) {
    os << "{\n";
    auto kv = [&](const char* k, const std::string& v, bool last = false) {
        os << "  \"" << k << "\": " << v << (last ? "\n" : ",\n");
    };
    kv("K", json_number(c.K));
    kv("M", json_number(c.M));
    kv("L", json_number(c.L));
    kv("nu", json_number(c.nu));
    kv("volOmega", json_number(c.volOmega));
    kv("lambda", json_number(c.lambda));
    kv("cheeger", json_number(c.cheeger));
    kv("cheeger_method", c.cheeger_method == CheegerMethod::exact ? "\"exact_enumeration\"" : "\"spectral_sweep\"");
    kv("delta0", json_number(c.delta0));
    kv("bound_lambda", json_number(c.bound_lambda));
    kv("bound_cheeger", json_number(c.bound_cheeger));
    kv("C", json_number(c.C));
    kv("single_square", c.single_square ? "true" : "false");
    kv("connected", c.connected ? "true" : "false", true);
    os << "}\n";
}

void write_graph_edges_csv(std::ostream& os, const WeightedGraph& g) {
    write_csv_header(os, {"i", "j", "sigma"});
    for (std::size_t i = 0; i < g.n(); ++i)
        for (std::size_t j = i + 1; j < g.n(); ++j)
            if (g.sigma(i, j) > 0.0) write_csv_row(os, {double(i), double(j), g.sigma(i, j)});
}

void write_graph_vertices_csv(std::ostream& os, const WeightedGraph& g) {
    write_csv_header(os, {"i", "w"});
    for (std::size_t i = 0; i < g.n(); ++i) write_csv_row(os, {double(i), g.w(i)});
}

}  // namespace gaborstab
