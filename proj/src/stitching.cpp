#include "gaborstab/stitching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>

#include "gaborstab/errors.hpp"
#include "gaborstab/tensor_phase.hpp"

namespace gaborstab {

namespace {

constexpr double pi = std::numbers::pi;

void require_same_grid(const SpectrogramField& F, const SpectrogramField& G) {
    if (!(F.grid() == G.grid())) throw UsageError("fields must share a grid");
}

double energy(std::span<const cplx> v, const RegionQuadrature& q) {
    std::vector<double> a(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) a[k] = std::norm(v[k]);
    return std::max(0.0, q.integrate(a));
}

cplx inner(std::span<const cplx> G, std::span<const cplx> F, const RegionQuadrature& q) {
    std::vector<cplx> p(G.size());
    for (std::size_t k = 0; k < G.size(); ++k) p[k] = G[k] * std::conj(F[k]);
    return q.integrate(p);
}

double residual(std::span<const cplx> F, std::span<const cplx> G, cplx c, const RegionQuadrature& q) {
    std::vector<double> a(F.size());
    for (std::size_t k = 0; k < F.size(); ++k) a[k] = std::norm(G[k] - c * F[k]);
    return std::sqrt(std::max(0.0, q.integrate(a)));
}

}  // namespace

LocalAlignment local_align(std::span<const cplx> F, std::span<const cplx> G, const RegionQuadrature& q,
                           std::size_t index) {
    if (F.size() != G.size()) throw UsageError("fields must share a grid");
    const double eF = energy(F, q);
    if (!(eF > 0.0)) throw DegenerateError("reference field has no energy on the square", {index});
    LocalAlignment a;
    a.square_index = index;
    a.z = inner(G, F, q) / eF;
    a.residual = residual(F, G, a.z, q);
    return a;
}

LocalAlignment local_align(const SpectrogramField& F, const SpectrogramField& G, const Square& square,
                           std::size_t index) {
    require_same_grid(F, G);
    RegionQuadrature q(F.grid(), Region({square}));
    return local_align(F.values(), G.values(), q, index);
}

GlobalAlignment synchronize(std::vector<LocalAlignment> alignments, const WeightedGraph& graph) {
    if (alignments.size() != graph.n()) throw UsageError("one alignment per graph vertex expected");
    if (alignments.empty()) throw UsageError("nothing to synchronize");
    GlobalAlignment g;
    double zmax = 0.0;
    cplx sum = 0.0, wsum = 0.0;
    double wabs = 0.0;
    for (const auto& a : alignments) {
        if (a.square_index >= graph.n()) throw UsageError("alignment index outside the graph");
        sum += a.z;
        wsum += graph.w(a.square_index) * a.z;
        wabs += graph.w(a.square_index) * std::abs(a.z);
        zmax = std::max(zmax, std::abs(a.z));
    }
    if (zmax <= 1e-12) throw NoInformationError("all local multipliers vanish");
    g.c0 = sum / static_cast<double>(alignments.size());
    if (std::abs(g.c0) > 1e-12) {
        g.tau = g.c0 / std::abs(g.c0);
    } else if (std::abs(wsum) > 1e-12 * wabs) {
        // argmax of sum_v w_v Re(conj(tau) z_v) = Re(conj(tau) wsum) over the circle
        g.tau = wsum / std::abs(wsum);
    } else {
        // every angle ties; take the smallest one
        g.tau = 1.0;
    }
    g.per_square = std::move(alignments);
    return g;
}

PhaseDistance min_phase_distance(std::span<const cplx> F, std::span<const cplx> G, const RegionQuadrature& q) {
    if (F.size() != G.size()) throw UsageError("fields must share a grid");
    PhaseDistance d;
    const cplx ip = inner(G, F, q);
    if (std::abs(ip) > 0.0) {
        d.tau = ip / std::abs(ip);
        d.dist = residual(F, G, d.tau, q);
    } else {
        d.tau = 1.0;
        d.dist = std::sqrt(energy(F, q) + energy(G, q));
    }
    return d;
}

PhaseDistance min_phase_distance(const SpectrogramField& F, const SpectrogramField& G, const Region& region) {
    require_same_grid(F, G);
    RegionQuadrature q(F.grid(), region);
    return min_phase_distance(F.values(), G.values(), q);
}

const SpectrogramField& RetrievalResult::field() const {
    if (components.size() != 1) throw UsageError("cover splits into several components; use components");
    return components.front().field;
}

RetrievalResult retrieve_phase(const SpectrogramField& spec, const SquareCover& cover, const RetrievalOptions& opt) {
    if (spec.kind() != FieldKind::spectrogram) throw UsageError("retrieve_phase expects a spectrogram");
    if (opt.source == JetSource::analytic && !opt.signal) throw UsageError("analytic jets need the mixture signal");
    if (opt.order < 0) throw DomainError("jet order must be nonnegative");
    if (opt.source == JetSource::finite_difference && opt.order > kMaxFdOrder)
        throw DomainError("finite-difference jets support orders up to 4; use analytic jets");

    const Grid2D& grid = spec.grid();
    const std::size_t nsq = cover.size();
    const auto polys = cover.polygons();
    const auto S = spec.real_values();
    const double smax = spec.max_abs();

    std::vector<RegionQuadrature> quads;
    quads.reserve(nsq);
    for (const auto& p : polys) quads.emplace_back(grid, Region::from_polygons({p}));

    // jet centers at the spectrogram peak inside each square
    std::vector<std::size_t> peak(nsq);
    std::vector<std::size_t> bad;
    for (std::size_t v = 0; v < nsq; ++v) {
        const auto& inside = quads[v].inside_nodes();
        double best = -1.0;
        for (auto idx : inside) {
            if (S[idx] > best) {
                best = S[idx];
                peak[v] = idx;
            }
        }
        if (inside.empty() || !(smax > 0.0) || best < opt.energy_threshold * smax) bad.push_back(v);
    }
    auto degenerate = [](const std::vector<std::size_t>& idx) {
        std::string msg = "degenerate squares (too little spectrogram energy):";
        for (auto i : idx) msg += " " + std::to_string(i);
        return DegenerateError(msg, idx);
    };
    if (!bad.empty()) throw degenerate(bad);

    // local fields on each square plus a band of about one cell
    const double band = 1.01 * std::sqrt(2.0) * std::max(grid.dx, grid.dy);
    std::vector<std::vector<cplx>> local(nsq);
    std::vector<std::vector<char>> mask(nsq);
    for (std::size_t v = 0; v < nsq; ++v) {
        const std::size_t pi_ = peak[v] % grid.nx, pj = peak[v] / grid.nx;
        LocalJet jet = opt.source == JetSource::analytic
                           ? jet_from_mixture(*opt.signal, fock_point(grid.x(pi_), grid.y(pj)), opt.order)
                           : jet_from_spectrogram(spec, pi_, pj, opt.order).jet;
        std::vector<std::size_t> nodes;
        std::vector<cplx> pts;
        for (std::size_t j = 0; j < grid.ny; ++j) {
            for (std::size_t i = 0; i < grid.nx; ++i) {
                if (!cover[v].contains(grid.x(i), grid.y(j), band)) continue;
                nodes.push_back(grid.index(i, j));
                pts.push_back(fock_point(grid.x(i), grid.y(j)));
            }
        }
        std::vector<cplx> Fz;
        try {
            Fz = local_phase_from_modulus(jet, pts, opt.center_threshold);
        } catch (const SingularCenterError&) {
            bad.push_back(v);
            continue;
        }
        local[v].assign(grid.size(), 0.0);
        mask[v].assign(grid.size(), 0);
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            const double x = pts[n].real(), y = -pts[n].imag();
            local[v][nodes[n]] = Fz[n] * std::polar(std::exp(-pi * (x * x + y * y) / 2.0), -pi * x * y);
            mask[v][nodes[n]] = 1;
        }
    }
    if (!bad.empty()) throw degenerate(bad);

    const WeightedGraph graph = build_graph(spec, cover);
    const double wmax = *std::max_element(graph.w().begin(), graph.w().end());
    auto linked = [&](std::size_t a, std::size_t b) { return graph.sigma(a, b) > opt.edge_tolerance * wmax * wmax; };

    // connected components
    std::vector<int> comp(nsq, -1);
    int ncomp = 0;
    for (std::size_t s = 0; s < nsq; ++s) {
        if (comp[s] >= 0) continue;
        std::queue<std::size_t> q;
        q.push(s);
        comp[s] = ncomp;
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (std::size_t v = 0; v < nsq; ++v)
                if (comp[v] < 0 && linked(u, v)) {
                    comp[v] = ncomp;
                    q.push(v);
                }
        }
        ++ncomp;
    }

    RetrievalResult result;
    for (int c = 0; c < ncomp; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t v = 0; v < nsq; ++v)
            if (comp[v] == c) members.push_back(v);

        // maximum spanning tree by sigma, grown from the most energetic square
        std::size_t root = members.front();
        for (auto v : members)
            if (graph.w(v) > graph.w(root)) root = v;
        std::vector<cplx> corr(nsq, 1.0);
        std::vector<char> done(nsq, 0);
        done[root] = 1;
        std::vector<LocalAlignment> aligns{{root, 1.0, 0.0}};
        for (std::size_t step = 1; step < members.size(); ++step) {
            std::size_t bu = nsq, bv = nsq;
            double bs = -1.0;
            for (auto u : members) {
                if (!done[u]) continue;
                for (auto v : members)
                    if (!done[v] && linked(u, v) && graph.sigma(u, v) > bs) {
                        bs = graph.sigma(u, v);
                        bu = u;
                        bv = v;
                    }
            }
            const Polygon overlap = clip(polys[bu], polys[bv]);
            RegionQuadrature q(grid, Region::from_polygons({overlap}));
            // aligned parent field against the raw child field
            std::vector<cplx> parent(local[bu]);
            for (auto& x : parent) x *= corr[bu];
            LocalAlignment a = local_align(local[bv], parent, q, bv);
            corr[bv] = std::abs(a.z) > 0.0 ? a.z / std::abs(a.z) : cplx(1.0);
            if (!(std::abs(a.z) > 0.0))
                result.warnings.push_back("square " + std::to_string(bv) + ": zero overlap correlation, phase not aligned");
            done[bv] = 1;
            aligns.push_back({bv, corr[bv], a.residual});
        }

        // fix the component gauge by the mean correction
        std::vector<double> sw(members.size());
        std::vector<double> ssig(members.size() * members.size(), 0.0);
        for (std::size_t a = 0; a < members.size(); ++a) {
            sw[a] = graph.w(members[a]);
            for (std::size_t b = 0; b < members.size(); ++b)
                if (a != b) ssig[a * members.size() + b] = graph.sigma(members[a], members[b]);
        }
        WeightedGraph sub(sw, ssig);
        std::vector<LocalAlignment> indexed;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (const auto& al : aligns)
                if (al.square_index == members[a]) indexed.push_back({a, al.z, al.residual});
        }
        GlobalAlignment glob = synchronize(indexed, sub);
        for (auto& al : glob.per_square) al.square_index = members[al.square_index];

        // assemble: average over squares containing the node, else over bands
        std::vector<cplx> out(grid.size(), 0.0);
        const cplx gauge = std::conj(glob.tau);
        for (std::size_t j = 0; j < grid.ny; ++j) {
            for (std::size_t i = 0; i < grid.nx; ++i) {
                const std::size_t idx = grid.index(i, j);
                cplx s = 0.0;
                int cnt = 0;
                for (auto v : members)
                    if (cover[v].contains(grid.x(i), grid.y(j))) {
                        s += corr[v] * local[v][idx];
                        ++cnt;
                    }
                if (cnt == 0) {
                    for (auto v : members)
                        if (mask[v][idx]) {
                            s += corr[v] * local[v][idx];
                            ++cnt;
                        }
                }
                if (cnt > 0) out[idx] = gauge * s / static_cast<double>(cnt);
            }
        }
        result.components.push_back({members, SpectrogramField(grid, FieldKind::gabor, std::move(out)), std::move(glob)});
    }
    if (ncomp > 1)
        result.warnings.push_back("multi-component cover: " + std::to_string(ncomp) +
                                  " components; relative phase between components is not recoverable");
    return result;
}

}  // namespace gaborstab
