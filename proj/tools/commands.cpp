#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "gaborstab/csv.hpp"
#include "gaborstab/cubature.hpp"
#include "gaborstab/errors.hpp"
#include "gaborstab/gabor_engine.hpp"
#include "gaborstab/stability_graph.hpp"
#include "gaborstab/stitching.hpp"
#include "gaborstab/tensor_phase.hpp"

namespace gaborstab::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void invalid(const std::string& path, const std::string& msg) { throw ValidationError(path + ": " + msg); }

// Read-only view of a config value that knows its own key path.
class Node {
public:
    Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const json& raw() const { return *j_; }
    const std::string& path() const { return path_; }
    bool has(const std::string& k) const { return j_->is_object() && j_->contains(k); }

    Node at(const std::string& k) const {
        expect_object();
        if (!j_->contains(k)) invalid(path_ + "." + k, "is required");
        return Node((*j_)[k], path_ + "." + k);
    }
    Node index(std::size_t i) const { return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]"); }

    void expect_object() const {
        if (!j_->is_object()) invalid(path_, "expected an object");
    }
    std::size_t array_size(bool nonempty = true) const {
        if (!j_->is_array()) invalid(path_, "expected an array");
        if (nonempty && j_->empty()) invalid(path_, "must not be empty");
        return j_->size();
    }
    // Rejects keys outside the schema.
    void only(std::initializer_list<std::string_view> keys) const {
        expect_object();
        for (const auto& [k, v] : j_->items()) {
            bool known = false;
            for (auto a : keys) known = known || a == k;
            if (!known) invalid(path_ + "." + k, "unknown key");
        }
    }

    double as_number() const {
        if (!j_->is_number()) invalid(path_, "expected a number");
        const double v = j_->get<double>();
        if (!std::isfinite(v)) invalid(path_, "must be finite");
        return v;
    }
    double number(const std::string& k) const { return at(k).as_number(); }
    double number(const std::string& k, double def) const { return has(k) ? number(k) : def; }
    int integer(const std::string& k, int def) const {
        if (!has(k)) return def;
        Node n = at(k);
        if (!n.raw().is_number_integer()) invalid(n.path(), "expected an integer");
        return n.raw().get<int>();
    }
    std::string string(const std::string& k, const std::string& def) const {
        if (!has(k)) return def;
        Node n = at(k);
        if (!n.raw().is_string()) invalid(n.path(), "expected a string");
        return n.raw().get<std::string>();
    }

private:
    const json* j_;
    std::string path_;
};

std::string read_text(const fs::path& p, const std::string& key) {
    if (!fs::exists(p)) invalid(key, "file not found: " + p.string());
    std::ifstream is(p, std::ios::binary);
    if (!is) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        invalid(where, std::string("malformed JSON: ") + e.what());
    }
}

fs::path resolve(const fs::path& base, const std::string& rel) {
    const fs::path p(rel);
    return p.is_absolute() ? p : base / p;
}

// {"atoms": [{"re", "im", "shift", "modulation"}]}: shift in seconds,
// modulation in Hz.  A string value names a JSON file with that content.
GaussianMixtureSignal parse_signal(const Node& n, const fs::path& base) {
    if (n.raw().is_string()) {
        const fs::path p = resolve(base, n.raw().get<std::string>());
        const json doc = parse_json(read_text(p, n.path()), p.string());
        return parse_signal(Node(doc, p.string()), p.parent_path());
    }
    n.only({"atoms"});
    Node atoms = n.at("atoms");
    std::vector<GaussianAtom> v;
    for (std::size_t i = 0, m = atoms.array_size(); i < m; ++i) {
        Node a = atoms.index(i);
        a.only({"re", "im", "shift", "modulation"});
        v.push_back({cplx(a.number("re"), a.number("im", 0.0)), a.number("shift"), a.number("modulation", 0.0)});
    }
    return GaussianMixtureSignal(std::move(v));
}

// CSV with columns t, re and optionally im, uniformly spaced in t.
SampledSignal parse_samples(const Node& n, const fs::path& base) {
    if (!n.raw().is_string()) invalid(n.path(), "expected a CSV file path");
    const fs::path p = resolve(base, n.raw().get<std::string>());
    std::istringstream is(read_text(p, n.path()));
    CsvTable t;
    try {
        t = read_csv(is);
    } catch (const ValidationError& e) {
        invalid(n.path(), e.what());
    }
    if (t.rows.size() < 2) invalid(n.path(), "needs at least two samples");
    std::size_t ct, cr;
    try {
        ct = t.column("t");
        cr = t.column("re");
    } catch (const ValidationError& e) {
        invalid(n.path(), e.what());
    }
    const bool has_im = std::find(t.header.begin(), t.header.end(), "im") != t.header.end();
    const std::size_t ci = has_im ? t.column("im") : 0;
    SampledSignal s;
    s.t0 = t.rows[0][ct];
    s.dt = t.rows[1][ct] - t.rows[0][ct];
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const double expect = s.t0 + static_cast<double>(k) * s.dt;
        if (std::abs(t.rows[k][ct] - expect) > 1e-9 * (1.0 + std::abs(expect)))
            invalid(n.path(), "samples must be uniformly spaced in t (row " + std::to_string(k + 1) + ")");
        s.samples.emplace_back(t.rows[k][cr], has_im ? t.rows[k][ci] : 0.0);
    }
    try {
        s.validate();
    } catch (const DomainError& e) {
        invalid(n.path(), e.what());
    }
    return s;
}

// {"xmin", "xmax", "ymin", "ymax", "step"}: x in seconds, y in Hz.
Grid2D parse_grid(const Node& n, const Options& opt) {
    n.only({"xmin", "xmax", "ymin", "ymax", "step"});
    const double xmin = n.number("xmin"), xmax = n.number("xmax"), ymin = n.number("ymin"), ymax = n.number("ymax");
    const double step = opt.grid_step ? *opt.grid_step : n.number("step", 0.05);
    if (!(xmax > xmin)) invalid(n.path(), "xmax must exceed xmin");
    if (!(ymax > ymin)) invalid(n.path(), "ymax must exceed ymin");
    if (!(step > 0.0)) invalid(n.path() + ".step", "must be positive");
    if ((xmax - xmin) / step > 20000 || (ymax - ymin) / step > 20000) invalid(n.path(), "grid exceeds 20000 nodes per axis");
    return Grid2D::from_bounds(xmin, xmax, ymin, ymax, step);
}

// {"squares": [{"cx", "cy", "rotation", "side"}]}: rotation in radians, side 1.
SquareCover parse_cover(const Node& n, const fs::path& base) {
    if (n.raw().is_string()) {
        const fs::path p = resolve(base, n.raw().get<std::string>());
        const json doc = parse_json(read_text(p, n.path()), p.string());
        return parse_cover(Node(doc, p.string()), p.parent_path());
    }
    n.only({"squares"});
    Node sq = n.at("squares");
    std::vector<Square> v;
    for (std::size_t i = 0, m = sq.array_size(); i < m; ++i) {
        Node s = sq.index(i);
        s.only({"cx", "cy", "rotation", "side"});
        const double side = s.number("side", 1.0);
        if (side != 1.0) invalid(s.path() + ".side", "cover squares must have unit side");
        v.push_back({s.number("cx"), s.number("cy"), 1.0, s.number("rotation", 0.0)});
    }
    try {
        return SquareCover(std::move(v));
    } catch (const DomainError& e) {
        invalid(n.path(), e.what());
    }
}

SpectrogramField parse_spectrogram_file(const Node& n, const fs::path& base) {
    if (!n.raw().is_string()) invalid(n.path(), "expected a CSV file path");
    const fs::path p = resolve(base, n.raw().get<std::string>());
    std::istringstream is(read_text(p, n.path()));
    SpectrogramField f;
    try {
        f = read_field_csv(is);
    } catch (const Error& e) {
        invalid(n.path(), e.what());
    }
    if (f.kind() != FieldKind::spectrogram) invalid(n.path(), "expected a spectrogram table with columns x,y,s");
    return f;
}

json number_json(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string field_csv(const SpectrogramField& f) {
    std::ostringstream os;
    write_field_csv(os, f);
    return os.str();
}

struct Linear {
    double slope, intercept, r2;
};
Linear fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    return {slope, my - slope * mx, syy > 0 && sxx > 0 ? sxy * sxy / (sxx * syy) : 1.0};
}

// Collected outputs, written only after every computation succeeded.
struct Run {
    const Options& opt;
    json config;
    fs::path base;
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> warnings;
    json results = json::object();

    void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
    Node root() const { return Node(config, "config"); }
};

void write_all(const Run& run, const std::string& command, double wall) {
    json summary;
    summary["command"] = command;
    summary["version"] = kVersion;
    summary["config"] = run.config;
    summary["results"] = run.results;
    summary["warnings"] = run.warnings;
    summary["outputs"] = json::array();
    for (const auto& f : run.files) summary["outputs"].push_back(f.first);
    summary["wall_time_s"] = wall;
    const fs::path dir(run.opt.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    auto put = [&](const std::string& name, const std::string& content) {
        std::ofstream os(dir / name, std::ios::binary);
        os << content;
        if (!os) throw IoError("cannot write " + (dir / name).string());
    };
    for (const auto& [name, content] : run.files) put(name, content);
    put("summary.json", summary.dump(2) + "\n");
}

void cmd_transform(Run& run) {
    Node c = run.root();
    c.only({"signal", "samples", "grid", "method"});
    if (c.has("signal") == c.has("samples")) invalid("config", "exactly one of signal or samples is required");
    const Grid2D grid = parse_grid(c.at("grid"), run.opt);
    const std::string method = c.string("method", "quadrature");
    if (method != "quadrature" && method != "closed_form") invalid("config.method", "expected quadrature or closed_form");
    SpectrogramField field;
    if (c.has("signal")) {
        const auto sig = parse_signal(c.at("signal"), run.base);
        field = method == "closed_form" ? closed_form_gabor(sig, grid) : quadrature_gabor(sig, grid);
        run.results["signal_l2_norm"] = l2_norm(sig);
    } else {
        if (method == "closed_form") invalid("config.method", "closed_form needs a mixture signal");
        const auto sig = parse_samples(c.at("samples"), run.base);
        field = quadrature_gabor(sig, grid);
    }
    const auto spec = spectrogram(field);
    run.add("gabor.csv", field_csv(field));
    run.add("spectrogram.csv", field_csv(spec));
    run.results["nx"] = grid.nx;
    run.results["ny"] = grid.ny;
    run.results["rows"] = grid.size();
    run.results["max_spectrogram"] = spec.max_abs();
}

SpectrogramField spectrogram_input(const Node& c, const std::string& sig_key, const std::string& file_key,
                                   const std::optional<Grid2D>& grid, const fs::path& base) {
    if (c.has(sig_key) == c.has(file_key)) invalid("config", "exactly one of " + sig_key + " or " + file_key + " is required");
    if (c.has(file_key)) {
        auto f = parse_spectrogram_file(c.at(file_key), base);
        if (grid && !(f.grid().nx == grid->nx && f.grid().ny == grid->ny &&
                      std::abs(f.grid().x0 - grid->x0) <= 1e-9 && std::abs(f.grid().y0 - grid->y0) <= 1e-9 &&
                      std::abs(f.grid().dx - grid->dx) <= 1e-9 && std::abs(f.grid().dy - grid->dy) <= 1e-9))
            invalid("config." + file_key, "grid differs from config.grid");
        return f;
    }
    if (!grid) invalid("config.grid", "is required when " + sig_key + " is a signal");
    return spectrogram(closed_form_gabor(parse_signal(c.at(sig_key), base), *grid));
}

void cmd_certify(Run& run) {
    Node c = run.root();
    c.only({"f", "g", "spectrogram_f", "spectrogram_g", "grid", "cover"});
    std::optional<Grid2D> grid;
    if (c.has("grid")) grid = parse_grid(c.at("grid"), run.opt);
    const SquareCover cover = parse_cover(c.at("cover"), run.base);
    const auto sf = spectrogram_input(c, "f", "spectrogram_f", grid, run.base);
    const auto sg = spectrogram_input(c, "g", "spectrogram_g", grid, run.base);
    if (!(sf.grid().nx == sg.grid().nx && sf.grid().ny == sg.grid().ny && sf.grid().x0 == sg.grid().x0 &&
          sf.grid().y0 == sg.grid().y0 && sf.grid().dx == sg.grid().dx && sf.grid().dy == sg.grid().dy))
        invalid("config", "the two spectrograms live on different grids");
    const Box dom = sf.grid().domain();
    for (std::size_t i = 0; i < cover.size(); ++i)
        for (const auto& p : cover[i].corners())
            if (p.x < dom.xmin || p.x > dom.xmax || p.y < dom.ymin || p.y > dom.ymax)
                invalid("config.cover.squares[" + std::to_string(i) + "]", "square leaves the field domain");

    const auto cert = certificate(sf, sg, cover);
    std::ostringstream cj, ej, vj, cv;
    write_certificate(cj, cert);
    write_graph_edges_csv(ej, cert.graph);
    write_graph_vertices_csv(vj, cert.graph);
    write_csv_header(cv, {"i", "cx", "cy", "side", "rotation"});
    for (std::size_t i = 0; i < cover.size(); ++i)
        write_csv_row(cv, {static_cast<double>(i), cover[i].cx, cover[i].cy, cover[i].side, cover[i].rotation});
    run.add("certificate.json", cj.str());
    run.add("graph_edges.csv", ej.str());
    run.add("graph_vertices.csv", vj.str());
    run.add("cover.csv", cv.str());
    if (!cert.connected)
        run.warnings.push_back("disconnected cover: the overlap graph has zero Cheeger constant, the bounds are infinite");
    if (cert.cheeger_method == CheegerMethod::spectral_sweep)
        run.warnings.push_back("more than 20 squares: the Cheeger constant is replaced by its lower bracket lambda/2");
    for (auto [k, v] : {std::pair{"K", cert.K}, {"M", cert.M}, {"L", cert.L}, {"nu", cert.nu}, {"volOmega", cert.volOmega},
                        {"lambda", cert.lambda}, {"cheeger", cert.cheeger}, {"delta0", cert.delta0},
                        {"bound_lambda", cert.bound_lambda}, {"bound_cheeger", cert.bound_cheeger}, {"C", cert.C}})
        run.results[k] = number_json(v);
    run.results["connected"] = cert.connected;
}

void cmd_sharpness(Run& run) {
    Node c = run.root();
    c.only({"a_values", "grid_step"});
    Node av = c.at("a_values");
    std::vector<double> as;
    for (std::size_t i = 0, m = av.array_size(); i < m; ++i) {
        const double a = av.index(i).as_number();
        if (!(a > 0.0 && a <= 3.0)) invalid(av.index(i).path(), "a must lie in (0, 3]");
        as.push_back(a);
    }
    const double h = run.opt.grid_step ? *run.opt.grid_step : c.number("grid_step", 0.02);
    if (!(h > 0.0 && h <= 0.25)) invalid("config.grid_step", "must lie in (0, 0.25]");

    const Grid2D grid = Grid2D::from_bounds(-1, 1, -1, 1, h);
    const Region Q({Square{0, 0, 1, 0}});
    const RegionQuadrature quad(grid, Q);
    std::ostringstream os;
    write_csv_header(os, {"a", "dist", "l2diff_sqrt", "ratio", "log_ratio"});
    std::vector<double> logs;
    for (double a : as) {
        auto [f, g] = make_sharpness_pair(a);
        const auto F = closed_form_gabor(f, grid), G = closed_form_gabor(g, grid);
        const double dist = min_phase_distance(F, G, Q).dist;
        std::vector<double> d2(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double d = std::norm(F.values()[k]) - std::norm(G.values()[k]);
            d2[k] = d * d;
        }
        const double root = std::sqrt(std::sqrt(quad.integrate(d2)));
        const double ratio = dist / root;
        logs.push_back(std::log(ratio));
        write_csv_row(os, {a, dist, root, ratio, logs.back()});
    }
    run.add("sharpness.csv", os.str());
    run.results["grid_step"] = h;
    if (as.size() >= 2) {
        const Linear fit = fit_line(as, logs);
        run.results["slope"] = fit.slope;
        run.results["slope_over_pi"] = fit.slope / kPi;
        run.results["intercept"] = fit.intercept;
        run.results["r2"] = fit.r2;
        run.results["target_slope_over_pi"] = json::array({0.95, 1.3});
        const bool in = fit.slope >= 0.95 * kPi && fit.slope <= 1.3 * kPi;
        run.results["within_target"] = in;
        if (!in) {
            std::ostringstream w;
            w << "regression slope " << format_number(fit.slope / kPi) << " pi lies outside [0.95 pi, 1.3 pi]";
            run.warnings.push_back(w.str());
        }
    } else {
        run.warnings.push_back("a single a value: no regression slope");
    }
}

void cmd_plan_sample(Run& run) {
    Node c = run.root();
    c.only({"epsilon", "square", "f", "g"});
    std::vector<double> eps;
    Node e = c.at("epsilon");
    if (e.raw().is_array()) {
        for (std::size_t i = 0, m = e.array_size(); i < m; ++i) eps.push_back(e.index(i).as_number());
    } else {
        eps.push_back(e.as_number());
    }
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (!(eps[i] > 0.0 && eps[i] < 0.5)) invalid("config.epsilon", "each epsilon must lie in (0, 1/2)");
    Square sq{0, 0, 1, 0};
    if (c.has("square")) {
        Node s = c.at("square");
        s.only({"cx", "cy", "side", "rotation"});
        sq = {s.number("cx", 0.0), s.number("cy", 0.0), s.number("side", 1.0), s.number("rotation", 0.0)};
        if (!(sq.side > 0.0)) invalid("config.square.side", "must be positive");
    }
    const auto f = parse_signal(c.at("f"), run.base), g = parse_signal(c.at("g"), run.base);
    const double kappa = l2_norm(f) * l2_norm(f) + l2_norm(g) * l2_norm(g);
    if (!(kappa > 0.0)) invalid("config", "f and g are both zero");

    const double half = sq.side / 2.0;
    const SquareFrame frame{sq.cx, sq.cy, sq.rotation};
    auto integrand = [&](double x, double y) {
        const double d = std::norm(gabor_closed_form(f, x, y)) - std::norm(gabor_closed_form(g, x, y));
        return d * d;
    };
    // reference: 8 x 8 sub-squares with 24-point product rules each
    double reference = 0.0;
    {
        const int m = 8;
        const auto r = gauss_rule(24, half / m);
        for (int bi = 0; bi < m; ++bi)
            for (int bj = 0; bj < m; ++bj) {
                const double uc = -half + (2 * bi + 1) * half / m, vc = -half + (2 * bj + 1) * half / m;
                for (int i = 0; i < 24; ++i)
                    for (int j = 0; j < 24; ++j) {
                        const auto p = frame.map(uc + r.nodes[i], vc + r.nodes[j]);
                        reference += r.weights[i] * r.weights[j] * integrand(p[0], p[1]);
                    }
            }
    }
    std::ostringstream table;
    write_csv_header(table, {"epsilon", "N", "nodes", "kappa", "predicted_error", "epsilon4", "achieved_error",
                             "discrete_norm", "reference_norm"});
    std::vector<double> xs, ns;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const auto plan = plan_sampling(eps[k], half, kappa, frame);
        std::vector<double> vals;
        vals.reserve(plan.rule.points.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < plan.rule.points.size(); ++i) {
            const auto& p = plan.rule.points[i];
            vals.push_back(std::norm(gabor_closed_form(f, p[0], p[1])) - std::norm(gabor_closed_form(g, p[0], p[1])));
            sum += plan.rule.weights[i] * vals.back() * vals.back();
        }
        const double achieved = std::abs(reference - sum);
        const double e4 = std::pow(eps[k], 4);
        write_csv_row(table, {eps[k], static_cast<double>(plan.N), static_cast<double>(plan.rule.points.size()), kappa,
                              plan.predicted_error, e4, achieved, discrete_weighted_norm(vals, plan.rule),
                              std::sqrt(reference)});
        json pj;
        pj["N"] = plan.N;
        pj["epsilon"] = eps[k];
        pj["kappa"] = kappa;
        pj["predicted_error"] = plan.predicted_error;
        pj["half_width"] = half;
        pj["nodes"] = json::array();
        for (std::size_t i = 0; i < plan.rule.points.size(); ++i)
            pj["nodes"].push_back({plan.rule.points[i][0], plan.rule.points[i][1], plan.rule.weights[i]});
        run.add("plan_" + std::to_string(k) + ".json", pj.dump(1) + "\n");
        if (achieved > e4) run.warnings.push_back("epsilon " + format_number(eps[k]) + ": achieved error exceeds epsilon^4");
        xs.push_back(std::log(1.0 / eps[k]));
        ns.push_back(plan.N);
    }
    run.add("plan.csv", table.str());
    run.results["kappa"] = kappa;
    run.results["half_width"] = half;
    if (eps.size() >= 2) {
        const Linear fit = fit_line(xs, ns);
        run.results["N_vs_log_inv_eps"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    }
}

double relative_error(const SpectrogramField& truth, const SpectrogramField& out, const Region& r) {
    return min_phase_distance(truth, out, r).dist / std::sqrt(region_norm(spectrogram(truth), r, Norm::L1));
}

void cmd_retrieve(Run& run) {
    Node c = run.root();
    c.only({"spectrogram", "signal", "grid", "cover", "jet_source", "order", "truth"});
    const SquareCover cover = parse_cover(c.at("cover"), run.base);
    std::optional<GaussianMixtureSignal> signal, truth;
    if (c.has("signal")) signal = parse_signal(c.at("signal"), run.base);
    if (c.has("truth")) truth = parse_signal(c.at("truth"), run.base);
    if (!truth) truth = signal;
    SpectrogramField spec;
    if (c.has("spectrogram")) {
        spec = parse_spectrogram_file(c.at("spectrogram"), run.base);
    } else {
        if (!signal || !c.has("grid")) invalid("config", "either spectrogram or signal with grid is required");
        spec = spectrogram(closed_form_gabor(*signal, parse_grid(c.at("grid"), run.opt)));
    }
    const std::string src = c.string("jet_source", signal ? "analytic" : "finite_difference");
    RetrievalOptions ro;
    if (src == "analytic") {
        if (!signal) invalid("config.jet_source", "analytic jets need config.signal");
        ro.source = JetSource::analytic;
        ro.signal = signal;
    } else if (src == "finite_difference") {
        ro.source = JetSource::finite_difference;
    } else {
        invalid("config.jet_source", "expected analytic or finite_difference");
    }
    ro.order = c.integer("order", ro.source == JetSource::analytic ? 14 : kMaxFdOrder);
    if (ro.order < 0 || (ro.source == JetSource::finite_difference && ro.order > kMaxFdOrder))
        invalid("config.order", ro.source == JetSource::analytic ? "must be nonnegative" : "finite-difference jets need order <= 4");
    const Box dom = spec.grid().domain();
    for (std::size_t i = 0; i < cover.size(); ++i)
        for (const auto& p : cover[i].corners())
            if (p.x < dom.xmin || p.x > dom.xmax || p.y < dom.ymin || p.y > dom.ymax)
                invalid("config.cover.squares[" + std::to_string(i) + "]", "square leaves the spectrogram domain");

    const auto res = retrieve_phase(spec, cover, ro);
    std::optional<SpectrogramField> truth_field;
    if (truth) truth_field = closed_form_gabor(*truth, spec.grid());
    json comps = json::array();
    for (std::size_t k = 0; k < res.components.size(); ++k) {
        const auto& comp = res.components[k];
        const std::string name = res.connected() ? "retrieved.csv" : "retrieved_component_" + std::to_string(k) + ".csv";
        run.add(name, field_csv(comp.field));
        json cj;
        cj["squares"] = comp.squares;
        cj["file"] = name;
        cj["tau"] = {comp.alignment.tau.real(), comp.alignment.tau.imag()};
        if (truth_field) {
            std::vector<Square> sq;
            for (auto i : comp.squares) sq.push_back(cover[i]);
            cj["relative_error"] = relative_error(*truth_field, comp.field, Region(sq));
        }
        comps.push_back(cj);
    }
    run.results["jet_source"] = src;
    run.results["order"] = ro.order;
    run.results["components"] = comps;
    for (const auto& w : res.warnings) run.warnings.push_back(w);
}

void cmd_selftest(Run& run) {
    if (!run.config.is_null()) run.root().only({});
    const std::uint64_t seed = run.opt.seed.value_or(0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto mixture = [&](int n) {
        std::vector<GaussianAtom> v;
        for (int k = 0; k < n; ++k) v.push_back({{u(rng), u(rng)}, u(rng), u(rng)});
        return GaussianMixtureSignal(v);
    };
    struct Check {
        std::string name;
        double value, tol;
    };
    std::vector<Check> checks;

    {
        const auto f = mixture(3);
        const Grid2D g = Grid2D::from_bounds(-2, 2, -2, 2, 0.1);
        const auto a = quadrature_gabor(f, g), b = closed_form_gabor(f, g);
        double err = 0;
        for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, std::abs(a.values()[k] - b.values()[k]));
        checks.push_back({"closed_form_vs_quadrature", err, 1e-8});
    }
    {
        double worst = 0;
        for (int N = 1; N <= 20; ++N) {
            const auto r = gauss_rule(N, 1.0);
            for (int m = 0; m <= 2 * N - 1; ++m) {
                double q = 0;
                for (int k = 0; k < N; ++k) q += r.weights[k] * std::pow(r.nodes[k], m);
                const double exact = (m % 2) ? 0.0 : 2.0 / (m + 1);
                worst = std::max(worst, std::abs(q - exact) / (2.0 / (m + 1)));
            }
        }
        checks.push_back({"gauss_exactness", worst, 1e-11});
    }
    {
        int violations = 0;
        std::uniform_real_distribution<double> uw(0.2, 3.0), coin(0.0, 1.0);
        for (int t = 0; t < 20; ++t) {
            const std::size_t n = 2 + static_cast<std::size_t>(t % 9);
            std::vector<double> w(n), s(n * n, 0.0);
            for (auto& x : w) x = uw(rng);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (coin(rng) < 0.6) s[i * n + j] = s[j * n + i] = 2.0 * coin(rng);
            if (!cheeger_inequality_check(WeightedGraph(w, s)).inequality_holds) ++violations;
        }
        checks.push_back({"cheeger_inequality_violations", static_cast<double>(violations), 0.0});
    }
    {
        GaussianMixtureSignal f = mixture(3);
        while (std::abs(fock_value(f, 0.0)) <= 0.1) f = mixture(3);
        const auto jet = jet_from_mixture(f, 0.0, 14);
        std::vector<cplx> pts;
        for (int i = -5; i <= 5; ++i)
            for (int j = -5; j <= 5; ++j)
                if (i * i + j * j <= 25) pts.emplace_back(0.1 * i, 0.1 * j);
        const auto out = local_phase_from_modulus(jet, pts);
        const cplx ph = std::polar(1.0, -std::arg(fock_value(f, 0.0)));
        double err = 0, scale = 0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            err = std::max(err, std::abs(out[k] - ph * fock_value(f, pts[k])));
            scale = std::max(scale, std::abs(fock_value(f, pts[k])));
        }
        checks.push_back({"local_phase_recovery", err / scale, 1e-5});
    }
    {
        const GaussianMixtureSignal phi({{1.0, 0.0, 0.0}});
        const Grid2D g = Grid2D::from_bounds(-1.5, 1.5, -1.5, 1.5, 0.05);
        const SquareCover cover({Square{-0.25, -0.25, 1, 0}, Square{0.25, -0.25, 1, 0}, Square{-0.25, 0.25, 1, 0},
                                 Square{0.25, 0.25, 1, 0}});
        RetrievalOptions ro;
        ro.signal = phi;
        const auto G = closed_form_gabor(phi, g);
        const auto res = retrieve_phase(spectrogram(G), cover, ro);
        checks.push_back({"retrieval_gaussian", relative_error(G, res.field(), cover.region()), 1e-3});
    }
    {
        int failed = 0;
        for (int N = 1; N <= 10; ++N)
            for (auto [a, b] : {std::pair{1.5, 0.25}, std::pair{2.0, 1.0}, std::pair{3.0, 2.0}})
                if (!legendre_lower_bound_check(N, a, b)) ++failed;
        checks.push_back({"legendre_lower_bound_failures", static_cast<double>(failed), 0.0});
    }

    std::ostringstream os;
    write_csv_header(os, {"check", "value", "tolerance", "pass"});
    bool all = true;
    json rj = json::array();
    for (const auto& ch : checks) {
        const bool pass = ch.value <= ch.tol;
        all = all && pass;
        os << ch.name << ',' << format_number(ch.value) << ',' << format_number(ch.tol) << ',' << (pass ? 1 : 0) << '\n';
        rj.push_back({{"check", ch.name}, {"value", ch.value}, {"tolerance", ch.tol}, {"pass", pass}});
    }
    run.add("selftest.csv", os.str());
    run.results["seed"] = seed;
    run.results["checks"] = rj;
    run.results["all_passed"] = all;
    if (!all) run.warnings.push_back("selftest: some checks failed");
}

}  // namespace

int run(const std::string& command, const Options& opt, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Run r{opt, json(), fs::path("."), {}, {}, json::object()};
        if (!opt.config.empty()) {
            const fs::path p(opt.config);
            r.config = parse_json(read_text(p, "--config"), p.string());
            if (!r.config.is_object()) invalid("config", "expected a JSON object");
            r.base = p.parent_path();
        } else if (command != "selftest") {
            invalid("--config", "is required for " + command);
        }
        if (command == "transform") {
            cmd_transform(r);
        } else if (command == "certify") {
            cmd_certify(r);
        } else if (command == "sharpness") {
            cmd_sharpness(r);
        } else if (command == "plan-sample") {
            cmd_plan_sample(r);
        } else if (command == "retrieve") {
            cmd_retrieve(r);
        } else if (command == "selftest") {
            cmd_selftest(r);
        } else {
            invalid("command", "unknown command " + command);
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_all(r, command, wall);
        for (const auto& w : r.warnings) err << "warning: " << w << '\n';
        if (command == "selftest" && !r.results["all_passed"].get<bool>()) return kExitCheckFailed;
        return kExitOk;
    } catch (const DegenerateError& e) {
        err << "error: degenerate input: " << e.what();
        if (!e.indices().empty()) {
            err << " (squares";
            for (auto i : e.indices()) err << ' ' << i;
            err << ')';
        }
        err << '\n';
        return kExitDegenerate;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const json::exception& e) {
        err << "error: config: " << e.what() << '\n';
        return kExitValidation;
    }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability and phase retrieval experiments for Gabor spectrograms"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    double grid_step = 0.0;
    std::uint64_t seed = 0;
    app.add_option("--config", opt.config, "JSON config file");
    app.add_option("--out", opt.out, "output directory")->capture_default_str();
    auto* gs = app.add_option("--grid-step", grid_step, "grid step overriding the config")->check(CLI::PositiveNumber);
    auto* sd = app.add_option("--seed", seed, "seed for randomized checks");
    std::string command;
    for (const char* name : {"transform", "certify", "sharpness", "plan-sample", "retrieve", "selftest"}) {
        auto* sub = app.add_subcommand(name);
        sub->callback([&command, name] { command = name; });
    }
    app.get_subcommand("transform")->description("Gabor transform and spectrogram of a signal on a grid");
    app.get_subcommand("certify")->description("stability certificate of a square cover");
    app.get_subcommand("sharpness")->description("stability ratio of the sharpness pair");
    app.get_subcommand("plan-sample")->description("cubature sampling plan and achieved error");
    app.get_subcommand("retrieve")->description("phase retrieval from a spectrogram");
    app.get_subcommand("selftest")->description("quick internal consistency checks");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }
    if (gs->count()) opt.grid_step = grid_step;
    if (sd->count()) opt.seed = seed;
    return run(command, opt, err);
}

}  // namespace gaborstab::cli
