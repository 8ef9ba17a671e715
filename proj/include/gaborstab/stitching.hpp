#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaborstab/field.hpp"
#include "gaborstab/gabor_engine.hpp"
#include "gaborstab/signal_model.hpp"
#include "gaborstab/stability_graph.hpp"

namespace gaborstab {

struct LocalAlignment {
    std::size_t square_index = 0;
    cplx z;                 // argmin_c ||G - c F||_{L^2(Q)}
    double residual = 0.0;  // ||G - z F||_{L^2(Q)}
};

struct GlobalAlignment {
    cplx c0;   // mean of the z_v
    cplx tau;  // unimodular
    std::vector<LocalAlignment> per_square;
};

// F and G must share a grid.
LocalAlignment local_align(const SpectrogramField& F, const SpectrogramField& G, const Square& square,
                           std::size_t index = 0);
LocalAlignment local_align(std::span<const cplx> F, std::span<const cplx> G, const RegionQuadrature& q,
                           std::size_t index = 0);

GlobalAlignment synchronize(std::vector<LocalAlignment> alignments, const WeightedGraph& graph);

struct PhaseDistance {
    cplx tau{1.0, 0.0};
    double dist = 0.0;
};

// min over unimodular tau of ||G - tau F||_{L^2(region)}.
PhaseDistance min_phase_distance(const SpectrogramField& F, const SpectrogramField& G, const Region& region);
PhaseDistance min_phase_distance(std::span<const cplx> F, std::span<const cplx> G, const RegionQuadrature& q);

enum class JetSource { analytic, finite_difference };

struct RetrievalOptions {
    JetSource source = JetSource::analytic;
    int order = 14;
    // required for analytic jets
    std::optional<GaussianMixtureSignal> signal;
    // a square is degenerate if its peak spectrogram value is below this
    // fraction of the global peak
    double energy_threshold = 1e-10;
    // |F(center)|^2 threshold passed to local_phase_from_modulus
    double center_threshold = 1e-10;
    // an edge with sigma <= edge_tolerance * max(w)^2 is treated as absent
    double edge_tolerance = 1e-12;
};

struct RetrievedComponent {
    std::vector<std::size_t> squares;
    SpectrogramField field;  // gabor kind on the spectrogram grid
    GlobalAlignment alignment;
};

struct RetrievalResult {
    std::vector<RetrievedComponent> components;
    std::vector<std::string> warnings;
    bool connected() const { return components.size() == 1; }
    // the retrieved field; throws UsageError when the cover splits
    const SpectrogramField& field() const;
};

// Values on Omega, plus a band of one cell around it that carries the
// extrapolated local fields (used when integrating over cut cells); zero elsewhere.
RetrievalResult retrieve_phase(const SpectrogramField& spec, const SquareCover& cover, const RetrievalOptions& opt);

}  // namespace gaborstab
