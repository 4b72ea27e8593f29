// speclab: command-line front end for the spectral bound toolkit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_io.hpp"
#include "speclab/speclab.hpp"

namespace {

using namespace speclab;
using nlohmann::json;

constexpr const char* tool_version = "1.0.0";

struct Run {
    std::string subcommand;
    json inputs = json::object();
    json residuals = json::object();
    std::optional<std::string> out;
    std::optional<std::string> manifest;
    std::optional<std::string> config;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
    return in;
}

void emit(const Run& run, const std::string& text) {
    if (run.out) {
        std::ofstream f(*run.out, std::ios::binary);
        if (!f) fail(ErrorKind::InvalidParameter, "cannot write " + *run.out);
        f << text;
    } else {
        std::cout << text;
    }
}

void write_manifest(const Run& run, double seconds) {
    std::optional<std::string> path = run.manifest;
    if (!path && run.out) path = *run.out + ".manifest.json";
    if (!path) return;
    json m;
    m["tool"] = "speclab";
    m["version"] = tool_version;
    m["subcommand"] = run.subcommand;
    m["inputs"] = run.inputs;
    m["output"] = run.out ? json(*run.out) : json("stdout");
    m["residuals"] = run.residuals;
    m["threads"] = thread_budget();
    m["wall_time_seconds"] = seconds;
    std::ofstream f(*path, std::ios::binary);
    if (!f) fail(ErrorKind::InvalidParameter, "cannot write " + *path);
    f << cli::dump_json(m) << '\n';
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& cell : speclab::detail::split(text, ',')) out.push_back(speclab::detail::parse_double(cell));
    if (out.empty()) fail(ErrorKind::ParseError, "empty list");
    return out;
}

RadialWeight parse_weight(const std::string& name, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorKind::InvalidParameter, "weight scale must be positive");
    if (name == "inv-square") return RadialWeight::inv_square(scale);
    if (name == "constant") return RadialWeight::constant(scale);
    fail(ErrorKind::InvalidParameter, "unknown weight '" + name + "'");
}

BumpShape parse_shape(const std::string& name) {
    if (name == "poisson") return BumpShape::Poisson;
    if (name == "gaussian") return BumpShape::Gaussian;
    fail(ErrorKind::InvalidParameter, "unknown bump shape '" + name + "'");
}

void require_k(int k) {
    if (k < 0) fail(ErrorKind::InvalidParameter, "k must be >= 0");
}

// ---------------------------------------------------------------- radial

struct RadialArgs {
    int dim = 0;
    std::string weight = "inv-square";
    double scale = 1.0;
    int grid = 2048;
    double delta = 1e-6;
    double gamma = 2.0;
    int lmax = 4;
    int k = 1;
};

std::string radial_csv(const Spectrum& spec) {
    std::string out = "k,value,sector_ell,multiplicity,essential_flag\n";
    const auto first = spec.first_indices();
    for (std::size_t i = 0; i < spec.entries.size(); ++i) {
        const auto& e = spec.entries[i];
        out += std::to_string(first[i]) + "," + cli::fmt(e.value) + "," + std::to_string(e.sector_ell) + "," +
               std::to_string(e.multiplicity) + "," + (e.localized ? "1" : "0") + "\n";
    }
    return out;
}

void run_radial(const RadialArgs& a, Run& run) {
    const Dimension d{a.dim};
    d.require_at_least_3();
    const RadialWeight w = parse_weight(a.weight, a.scale);
    const GridSpec grid{a.grid, a.delta, a.gamma};
    grid.validate();
    require_k(a.k);
    if (a.lmax < 0) fail(ErrorKind::InvalidParameter, "lmax must be >= 0");
    run.inputs = {{"dim", a.dim}, {"weight", a.weight}, {"scale", a.scale}, {"grid", a.grid},
                  {"delta", a.delta}, {"gamma", a.gamma}, {"lmax", a.lmax}, {"k", a.k}};

    const Spectrum spec = ball_weighted_neumann(d, w, a.k, grid, a.lmax);
    run.residuals["mass"] = spec.mass;
    run.residuals["essential_flag"] = spec.essential_flag;
    if (spec.essential_estimate) run.residuals["essential_estimate"] = *spec.essential_estimate;
    emit(run, radial_csv(spec));
}

// ---------------------------------------------------------------- disk

struct DiskArgs {
    std::optional<std::string> density;
    std::optional<std::string> mobius;
    std::optional<std::string> bumps;
    std::optional<double> epsilon;
    std::string shape = "poisson";
    int order = 0;
    int modes = 64;
    int k = 2;
};

FourierDensity disk_density(const DiskArgs& a, Run& run) {
    const int sources = (a.density ? 1 : 0) + (a.mobius ? 1 : 0) + (a.bumps ? 1 : 0);
    if (sources != 1) fail(ErrorKind::InvalidParameter, "give exactly one of --density, --mobius, --bumps");
    if (a.epsilon && !a.bumps) fail(ErrorKind::InvalidParameter, "--epsilon applies to --bumps only");
    if (a.density) {
        run.inputs["density"] = *a.density;
        auto in = open_input(*a.density);
        return cli::read_density_json(in);
    }
    if (a.mobius) {
        const auto parts = parse_list(*a.mobius);
        if (parts.size() != 2) fail(ErrorKind::ParseError, "--mobius expects RE,IM");
        const std::complex<double> z(parts[0], parts[1]);
        if (!(std::abs(z) < 1.0)) fail(ErrorKind::InvalidParameter, "Mobius parameter must satisfy |a| < 1");
        if (a.order < 0) fail(ErrorKind::InvalidParameter, "order must be >= 0");
        const int order = a.order > 0 ? a.order : 2 * a.modes;
        run.inputs["mobius"] = {parts[0], parts[1]};
        run.inputs["order"] = order;
        return density_from_mobius(z, order);
    }
    if (!a.epsilon) fail(ErrorKind::InvalidParameter, "--bumps needs --epsilon");
    std::vector<double> centers, masses;
    for (const auto& item : speclab::detail::split(*a.bumps, ',')) {
        const auto pair = speclab::detail::split(item, ':');
        if (pair.size() != 2) fail(ErrorKind::ParseError, "bumps are theta:mass pairs");
        centers.push_back(speclab::detail::parse_double(pair[0]));
        masses.push_back(speclab::detail::parse_double(pair[1]));
    }
    run.inputs["bumps"] = *a.bumps;
    run.inputs["epsilon"] = *a.epsilon;
    run.inputs["shape"] = a.shape;
    const auto bump = concentrating_density(centers, masses, *a.epsilon, parse_shape(a.shape));
    run.residuals["overlapping"] = bump.overlapping;
    return bump.density;
}

std::string disk_csv(const SteklovSpectrum& spec) {
    std::string out = "k,sigma,sigma_bar,mass,modes\n";
    for (std::size_t k = 0; k < spec.values.size(); ++k)
        out += std::to_string(k) + "," + cli::fmt(spec.values[k]) + "," + cli::fmt(spec.values[k] * spec.mass) + "," +
               cli::fmt(spec.mass) + "," + std::to_string(spec.modes) + "\n";
    return out;
}

void run_disk(const DiskArgs& a, Run& run) {
    require_k(a.k);
    if (a.modes < 1) fail(ErrorKind::InvalidParameter, "modes must be >= 1");
    if (a.modes < a.k + 2) fail(ErrorKind::InvalidParameter, "need modes >= k + 2");
    parse_shape(a.shape);
    run.inputs["modes"] = a.modes;
    run.inputs["k"] = a.k;
    const FourierDensity rho = disk_density(a, run);
    const SteklovSpectrum spec = steklov_eigenvalues(rho, a.k, a.modes);
    emit(run, disk_csv(spec));
}

// ---------------------------------------------------------------- center

struct CenterArgs {
    std::string measure;
    double radius = 1.0;
    std::optional<std::string> phi1;
    bool fold = false;
};

void run_center(const CenterArgs& a, Run& run) {
    if (!(a.radius > 0.0) || !std::isfinite(a.radius)) fail(ErrorKind::InvalidParameter, "radius must be positive");
    if (a.phi1 && !a.fold) fail(ErrorKind::InvalidParameter, "--phi1 requires --fold");
    run.inputs = {{"measure", a.measure}, {"radius", a.radius}, {"fold", a.fold}};
    auto in = open_input(a.measure);
    const PointMeasure mu = read_point_measure_csv(in);
    const int dim = mu.dimension();

    json result;
    if (a.fold) {
        CenteringProblem problem{mu, a.radius, std::nullopt};
        if (a.phi1) {
            run.inputs["phi1"] = *a.phi1;
            auto pin = open_input(*a.phi1);
            problem.phi1 = cli::read_scalar_csv(pin, "phi1");
            problem.validate();
            double mean = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < mu.size(); ++i) {
                mean += mu.atoms()[i].mass * (*problem.phi1)[i];
                scale += mu.atoms()[i].mass * std::abs((*problem.phi1)[i]);
            }
            if (std::abs(mean) > 1e-8 * std::max(scale, 1e-300))
                fail(ErrorKind::InvalidParameter, "phi1 must be mu-orthogonal to constants");
        }
        const auto r = solve_centering_fold(problem);
        result = {{"c", cli::json_vector(r.c)}, {"p", cli::json_vector(r.p)}, {"residual", r.residual}};
        run.residuals["start_index"] = r.start_index;
    } else {
        const auto r = solve_centering(mu, a.radius);
        result = {{"c", cli::json_vector(r.c)}, {"p", cli::json_vector(Point::Zero(dim))}, {"residual", r.residual}};
        run.residuals["start_index"] = r.start_index;
    }
    run.residuals["residual"] = result["residual"];
    emit(run, cli::dump_json(result) + "\n");
}

// ---------------------------------------------------------------- foldcheck

struct FoldcheckArgs {
    int dim = 0;
    std::string config;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
};

Point padded(const std::vector<double>& v, int dim, const std::string& what) {
    if (v.empty() || static_cast<int>(v.size()) > dim) fail(ErrorKind::InvalidParameter, what + " has wrong length");
    Point p = Point::Zero(dim);
    for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
    return p;
}

std::uint64_t as_count(const cli::TomlValue& v, const std::string& what) {
    const double x = v.number();
    if (!(x >= 1.0) || x != std::floor(x) || x > 1e12) fail(ErrorKind::InvalidParameter, what + " must be a positive integer");
    return static_cast<std::uint64_t>(x);
}

void run_foldcheck(const FoldcheckArgs& a, Run& run) {
    const Dimension d{a.dim};
    d.require_at_least_3();
    auto in = open_input(a.config);
    const cli::TomlDocument doc = cli::parse_toml(in);

    std::uint64_t samples = 1000000, seed = default_seed;
    if (auto it = doc.root.find("samples"); it != doc.root.end()) samples = as_count(it->second, "samples");
    if (auto it = doc.root.find("seed"); it != doc.root.end()) seed = static_cast<std::uint64_t>(it->second.number());
    if (a.samples) samples = *a.samples;
    if (a.seed) seed = *a.seed;
    if (samples < 2) fail(ErrorKind::InvalidParameter, "samples must be >= 2");
    const auto cases_it = doc.table_arrays.find("case");
    if (cases_it == doc.table_arrays.end() || cases_it->second.empty())
        fail(ErrorKind::ParseError, "config needs at least one [[case]]");
    run.inputs = {{"dim", a.dim}, {"config", a.config}, {"samples", samples}, {"seed", seed}};

    struct Case {
        std::string name;
        std::vector<Point> centers;
        std::vector<double> radii;
        std::optional<HalfSpaceParams> fold;
    };
    std::vector<Case> cases;
    for (const auto& table : cases_it->second) {
        Case c;
        const auto get = [&](const std::string& key) -> const cli::TomlValue& {
            const auto it = table.find(key);
            if (it == table.end()) fail(ErrorKind::ParseError, "case is missing '" + key + "'");
            return it->second;
        };
        c.name = get("name").string();
        for (const auto& center : get("centers").array()) c.centers.push_back(padded(center.numbers(), a.dim, "center"));
        c.radii = get("radii").numbers();
        if (c.centers.empty() || c.centers.size() != c.radii.size())
            fail(ErrorKind::InvalidParameter, "case " + c.name + ": centers and radii differ in length");
        for (double r : c.radii)
            if (!(r > 0.0)) fail(ErrorKind::InvalidParameter, "case " + c.name + ": radii must be positive");
        for (std::size_t i = 0; i < c.centers.size(); ++i)
            for (std::size_t j = i + 1; j < c.centers.size(); ++j)
                if ((c.centers[i] - c.centers[j]).norm() < c.radii[i] + c.radii[j])
                    fail(ErrorKind::InvalidParameter, "case " + c.name + ": balls overlap");
        if (table.count("fold_p")) {
            const double t = table.count("fold_t") ? table.at("fold_t").number() : 0.0;
            c.fold = HalfSpaceParams(padded(table.at("fold_p").numbers(), a.dim, "fold_p"), t);
        }
        cases.push_back(std::move(c));
    }

    std::vector<TwoBallComparison> results(cases.size());
    parallel_for_indexed(cases.size(), [&](std::size_t i) {
        const Case& c = cases[i];
        double total = 0.0;
        for (double r : c.radii) total += std::pow(r, a.dim);
        VolumeSamples omega;
        for (std::size_t b = 0; b < c.centers.size(); ++b) {
            const auto share = static_cast<std::size_t>(std::llround(static_cast<double>(samples) * std::pow(c.radii[b], a.dim) / total));
            omega.append(stratified_ball_samples(a.dim, c.centers[b], c.radii[b], std::max<std::size_t>(share, 2), seed + b));
        }
        results[i] = two_ball_comparison(omega, c.fold);
    });

    std::string out = "case,lhs,rhs,standard_error,holds\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& r = results[i];
        const bool holds = r.lhs <= r.rhs + 3.0 * r.standard_error;
        out += cases[i].name + "," + cli::fmt(r.lhs) + "," + cli::fmt(r.rhs) + "," + cli::fmt(r.standard_error) + "," +
               (holds ? "1" : "0") + "\n";
    }
    emit(run, out);
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
    int dim = 0;
    int k = 1;
    std::optional<std::string> input;
    std::string quantity = "neumann";
    bool table = false;
    int dmin = 3;
    int dmax = 12;
};

json report_json(const BoundReport& r) {
    return {{"quantity", r.quantity}, {"bound", r.bound}, {"margin", r.margin}, {"sharp", r.sharp},
            {"equality", r.equality}, {"k", r.k}, {"d", r.d}};
}

std::vector<std::string> read_csv_header(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) fail(ErrorKind::ParseError, "empty input file");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return speclab::detail::split(line, ',');
}

BoundReport bounds_from_input(const BoundsArgs& a) {
    auto in = open_input(*a.input);
    std::string line;
    const auto header = read_csv_header(in, line);
    if (a.dim == 2) {
        // output of `disk`
        if (header != std::vector<std::string>{"k", "sigma", "sigma_bar", "mass", "modes"})
            fail(ErrorKind::ParseError, "d = 2 input must be a disk spectrum CSV");
        SteklovSpectrum spec;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto cells = speclab::detail::split(line, ',');
            if (cells.size() != 5) fail(ErrorKind::ParseError, "disk CSV row has wrong column count");
            if (static_cast<std::size_t>(speclab::detail::parse_double(cells[0])) != spec.values.size())
                fail(ErrorKind::ParseError, "disk CSV rows must be k = 0, 1, ...");
            spec.values.push_back(speclab::detail::parse_double(cells[1]));
            spec.mass = speclab::detail::parse_double(cells[3]);
            spec.modes = static_cast<int>(speclab::detail::parse_double(cells[4]));
        }
        return steklov_bound_check(spec, a.k);
    }
    if (header != std::vector<std::string>{"sigma", "boundary_area", "volume"})
        fail(ErrorKind::ParseError, "d >= 3 input must have header sigma,boundary_area,volume");
    if (!std::getline(in, line)) fail(ErrorKind::ParseError, "missing Steklov triple row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cells = speclab::detail::split(line, ',');
    if (cells.size() != 3) fail(ErrorKind::ParseError, "Steklov triple row has wrong column count");
    const SteklovTriple triple{speclab::detail::parse_double(cells[0]), speclab::detail::parse_double(cells[1]),
                               speclab::detail::parse_double(cells[2])};
    return steklov_bound_check(Dimension{a.dim}, triple, a.k);
}

void run_bounds(const BoundsArgs& a, Run& run) {
    if (a.table) {
        run.inputs = {{"table", true}, {"dmin", a.dmin}, {"dmax", a.dmax}};
        std::string out = "d,k,constant\n";
        for (const auto& row : sharp_constant_table(a.dmin, a.dmax))
            out += std::to_string(row.d) + "," + std::to_string(row.k) + "," + cli::fmt(row.constant) + "\n";
        emit(run, out);
        return;
    }
    const Dimension d{a.dim};
    run.inputs = {{"dim", a.dim}, {"k", a.k}, {"quantity", a.quantity}};
    BoundReport report;
    if (a.input) {
        run.inputs["input"] = *a.input;
        if (a.dim != 2) d.require_at_least_3();
        report = bounds_from_input(a);
    } else {
        d.require_at_least_3();
        if (a.k != 1 && a.k != 2) fail(ErrorKind::UnsupportedIndex, "sharp constants exist for k = 1, 2 only");
        if (a.quantity == "neumann") {
            // k disjoint unit balls carrying the 1/|x|^2 weight
            const Spectrum ball = ball_weighted_neumann(d, RadialWeight::inv_square(), a.k, GridSpec{}, 4);
            const Spectrum domain = a.k == 1 ? ball : disjoint_union(ball, ball);
            report = neumann_bound_check(d, domain, a.k);
        } else if (a.quantity == "steklov") {
            report = steklov_bound_check(d, unit_ball_triple(d), a.k);
        } else {
            fail(ErrorKind::InvalidParameter, "quantity must be neumann or steklov");
        }
    }
    run.residuals["margin"] = report.margin;
    emit(run, cli::dump_json(report_json(report)) + "\n");
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string family;
    int dim = 3;
    std::string weight = "inv-square";
    std::string grids = "512,1024,2048,4096";
    double delta = 1e-6;
    double gamma = 2.0;
    int lmax = 4;
    int bumps = 2;
    std::string epsilons = "0.4,0.2,0.1,0.05";
    std::string shape = "poisson";
    std::string radii = "0,0.3,0.6,0.9";
    int count = 200;
    int modes = 64;
    std::uint64_t seed = default_seed;
};

int as_int(double v, const std::string& what) {
    if (v != std::floor(v) || v < 1 || v > 1e8) fail(ErrorKind::InvalidParameter, what + " must be a positive integer");
    return static_cast<int>(v);
}

void run_sweep(const SweepArgs& a, Run& run) {
    run.inputs = {{"family", a.family}, {"seed", a.seed}};
    std::vector<std::string> rows;
    std::string header;
    if (a.family == "radial-grid") {
        const Dimension d{a.dim};
        d.require_at_least_3();
        const RadialWeight w = parse_weight(a.weight, 1.0);
        std::vector<int> grids;
        for (double n : parse_list(a.grids)) grids.push_back(as_int(n, "grid size"));
        for (int n : grids) GridSpec{n, a.delta, a.gamma}.validate();
        run.inputs.update({{"dim", a.dim}, {"weight", a.weight}, {"grids", a.grids}, {"delta", a.delta}, {"gamma", a.gamma}, {"lmax", a.lmax}});
        header = "index,grid,lambda1,sector_ell,essential_flag";
        rows.resize(grids.size());
        parallel_for_indexed(grids.size(), [&](std::size_t i) {
            const auto spec = ball_weighted_neumann(d, w, 1, GridSpec{grids[i], a.delta, a.gamma}, a.lmax);
            const auto& e = spec.entry_for(1);
            rows[i] = std::to_string(i) + "," + std::to_string(grids[i]) + "," + cli::fmt(e.value) + "," +
                      std::to_string(e.sector_ell) + "," + (e.localized ? "1" : "0");
        });
    } else if (a.family == "bumps") {
        if (a.bumps < 1 || a.bumps > 64) fail(ErrorKind::InvalidParameter, "bumps must lie in 1..64");
        if (a.modes < a.bumps + 2) fail(ErrorKind::InvalidParameter, "need modes >= bumps + 2");
        const auto eps = parse_list(a.epsilons);
        const BumpShape shape = parse_shape(a.shape);
        for (double e : eps)
            if (!(e > 0.0 && e <= 0.5)) fail(ErrorKind::InvalidParameter, "epsilon must lie in (0, 0.5]");
        run.inputs.update({{"bumps", a.bumps}, {"epsilons", a.epsilons}, {"shape", a.shape}, {"modes", a.modes}});
        header = "index,epsilon,sigma_bar,bound,overlapping";
        std::vector<double> centers, masses(a.bumps, 1.0);
        for (int j = 0; j < a.bumps; ++j) centers.push_back(2.0 * std::numbers::pi * j / a.bumps);
        rows.resize(eps.size());
        parallel_for_indexed(eps.size(), [&](std::size_t i) {
            const auto bump = concentrating_density(centers, masses, eps[i], shape);
            const auto spec = steklov_eigenvalues(bump.density, a.bumps, a.modes);
            rows[i] = std::to_string(i) + "," + cli::fmt(eps[i]) + "," + cli::fmt(spec.normalized()[a.bumps]) + "," +
                      cli::fmt(2.0 * std::numbers::pi * a.bumps) + "," + (bump.overlapping ? "1" : "0");
        });
    } else if (a.family == "mobius") {
        const auto radii = parse_list(a.radii);
        for (double r : radii)
            if (!(r >= 0.0 && r < 1.0)) fail(ErrorKind::InvalidParameter, "Mobius radii must lie in [0, 1)");
        if (a.modes < 3) fail(ErrorKind::InvalidParameter, "need modes >= 3");
        run.inputs.update({{"radii", a.radii}, {"modes", a.modes}});
        header = "index,a,sigma_bar_1,bound";
        rows.resize(radii.size());
        parallel_for_indexed(radii.size(), [&](std::size_t i) {
            const auto spec = steklov_eigenvalues(density_from_mobius({radii[i], 0.0}, 2 * a.modes), 1, a.modes);
            rows[i] = std::to_string(i) + "," + cli::fmt(radii[i]) + "," + cli::fmt(spec.normalized()[1]) + "," +
                      cli::fmt(2.0 * std::numbers::pi);
        });
    } else if (a.family == "weinstock") {
        if (a.count < 1 || a.count > 1000000) fail(ErrorKind::InvalidParameter, "count must lie in 1..1e6");
        if (a.modes < 3) fail(ErrorKind::InvalidParameter, "need modes >= 3");
        run.inputs.update({{"count", a.count}, {"modes", a.modes}});
        header = "index,sigma_bar_1,margin";
        std::vector<FourierDensity> densities;
        std::mt19937_64 rng(a.seed);
        std::uniform_int_distribution<int> order(1, 8);
        std::uniform_real_distribution<double> amplitude(0.0, 0.95);
        for (int i = 0; i < a.count; ++i) {
            const int m = order(rng);
            densities.push_back(random_positive_density(rng, m, amplitude(rng)));
        }
        rows.resize(densities.size());
        parallel_for_indexed(densities.size(), [&](std::size_t i) {
            const double s = steklov_eigenvalues(densities[i], 1, a.modes).normalized()[1];
            rows[i] = std::to_string(i) + "," + cli::fmt(s) + "," + cli::fmt(2.0 * std::numbers::pi - s);
        });
    } else {
        fail(ErrorKind::InvalidParameter, "unknown sweep family '" + a.family + "'");
    }
    std::string out = header + "\n";
    for (const auto& r : rows) out += r + "\n";
    emit(run, out);
}

// Splices `key = value` lines of a --config file in as --key value flags.
// Flags given on the command line take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "foldcheck") {
        std::reverse(args.begin(), args.end());
        return args;
    }
    std::vector<std::string> out{args[0]};
    std::vector<std::string> rest, configs;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) configs.push_back(args[++i]);
        else if (args[i].rfind("--config=", 0) == 0) configs.push_back(args[i].substr(9));
        else rest.push_back(args[i]);
    }
    const auto given = [&](const std::string& key) {
        for (const auto& a : rest)
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& path : configs) {
        auto in = open_input(path);
        const auto doc = cli::parse_toml(in);
        if (!doc.tables.empty() || !doc.table_arrays.empty())
            fail(ErrorKind::ParseError, "flag config files take plain key = value lines");
        for (const auto& [key, value] : doc.root) {
            if (given(key)) continue;
            if (std::holds_alternative<bool>(value.v)) {
                if (value.boolean()) out.push_back("--" + key);
                continue;
            }
            out.push_back("--" + key);
            if (value.is_array()) {
                std::string joined;
                for (const auto& x : value.array()) {
                    if (!joined.empty()) joined += ",";
                    joined += x.is_number() ? cli::fmt_plain(x.number()) : x.string();
                }
                out.push_back(joined);
            } else if (value.is_number()) {
                out.push_back(cli::fmt_plain(value.number()));
            } else {
                out.push_back(value.string());
            }
        }
    }
    out.insert(out.end(), rest.begin(), rest.end());
    std::reverse(out.begin(), out.end()); // CLI11 consumes a reversed vector
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"speclab: weighted Neumann and Steklov spectra, trial maps and sharp bounds"};
    app.require_subcommand(1);
    Run run;

    RadialArgs radial;
    auto* rad = app.add_subcommand("radial", "weighted Neumann spectrum of the unit ball");
    rad->add_option("--dim", radial.dim, "dimension d >= 3")->required();
    rad->add_option("--weight", radial.weight, "inv-square or constant");
    rad->add_option("--scale", radial.scale, "weight multiplier");
    rad->add_option("--grid", radial.grid, "number of elements");
    rad->add_option("--delta", radial.delta, "inner cut-off radius");
    rad->add_option("--gamma", radial.gamma, "mesh grading exponent");
    rad->add_option("--lmax", radial.lmax, "largest spherical-harmonic degree");
    rad->add_option("--k", radial.k, "largest eigenvalue index");

    DiskArgs disk;
    auto* dsk = app.add_subcommand("disk", "weighted Steklov spectrum of the unit disk");
    dsk->add_option("--density", disk.density, "density JSON file");
    dsk->add_option("--mobius", disk.mobius, "Mobius parameter RE,IM");
    dsk->add_option("--bumps", disk.bumps, "bump list theta:mass,...");
    dsk->add_option("--epsilon", disk.epsilon, "bump width");
    dsk->add_option("--shape", disk.shape, "poisson or gaussian");
    dsk->add_option("--order", disk.order, "Fourier order for --mobius (default 2N)");
    dsk->add_option("--modes", disk.modes, "trigonometric truncation N");
    dsk->add_option("--k", disk.k, "largest eigenvalue index");

    CenterArgs center;
    auto* cen = app.add_subcommand("center", "zero of the centering map");
    cen->add_option("--measure", center.measure, "measure CSV x1,...,xd,mass")->required();
    cen->add_option("--radius", center.radius, "ball radius R");
    cen->add_option("--phi1", center.phi1, "first eigenfunction CSV (header phi1)");
    cen->add_flag("--fold", center.fold, "solve the fold variant for (c, p)");

    FoldcheckArgs foldcheck;
    auto* fck = app.add_subcommand("foldcheck", "folded equator energy against two unit balls");
    fck->add_option("--dim", foldcheck.dim, "dimension d >= 3")->required();
    fck->add_option("--config", foldcheck.config, "TOML file with [[case]] tables")->required();
    fck->add_option("--samples", foldcheck.samples, "Monte Carlo samples per case");
    fck->add_option("--seed", foldcheck.seed, "sampling seed");

    BoundsArgs bounds;
    auto* bnd = app.add_subcommand("bounds", "sharp constants and bound margins");
    bnd->add_option("--dim", bounds.dim, "dimension");
    bnd->add_option("--k", bounds.k, "eigenvalue index (1 or 2)");
    bnd->add_option("--input", bounds.input, "disk spectrum CSV (d = 2) or sigma,boundary_area,volume CSV");
    bnd->add_option("--quantity", bounds.quantity, "neumann or steklov (unit-ball checks)");
    bnd->add_flag("--table", bounds.table, "emit the sharp-constant table");
    bnd->add_option("--dmin", bounds.dmin, "table start");
    bnd->add_option("--dmax", bounds.dmax, "table end");

    SweepArgs sweep;
    auto* swp = app.add_subcommand("sweep", "parameter sweeps, one row per grid point");
    swp->add_option("--family", sweep.family, "radial-grid, bumps, mobius or weinstock")->required();
    swp->add_option("--dim", sweep.dim, "dimension (radial-grid)");
    swp->add_option("--weight", sweep.weight, "weight (radial-grid)");
    swp->add_option("--grids", sweep.grids, "grid sizes (radial-grid)");
    swp->add_option("--delta", sweep.delta, "inner cut-off (radial-grid)");
    swp->add_option("--gamma", sweep.gamma, "grading exponent (radial-grid)");
    swp->add_option("--lmax", sweep.lmax, "largest degree (radial-grid)");
    swp->add_option("--bumps", sweep.bumps, "number of equal bumps (bumps)");
    swp->add_option("--epsilons", sweep.epsilons, "bump widths (bumps)");
    swp->add_option("--shape", sweep.shape, "poisson or gaussian (bumps)");
    swp->add_option("--radii", sweep.radii, "Mobius |a| values (mobius)");
    swp->add_option("--count", sweep.count, "number of random densities (weinstock)");
    swp->add_option("--modes", sweep.modes, "trigonometric truncation N");
    swp->add_option("--seed", sweep.seed, "random seed (weinstock)");

    for (auto* sub : {rad, dsk, cen, bnd, swp}) {
        sub->add_option("--config", run.config, "TOML file mirroring the flags");
        sub->add_option("--out", run.out, "output path (default stdout)");
        sub->add_option("--manifest", run.manifest, "manifest path (default OUT.manifest.json)");
    }
    fck->add_option("--out", run.out, "output path (default stdout)");
    fck->add_option("--manifest", run.manifest, "manifest path (default OUT.manifest.json)");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "parse-error: " << e.what() << '\n';
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        if (rad->parsed()) {
            run.subcommand = "radial";
            run_radial(radial, run);
        } else if (dsk->parsed()) {
            run.subcommand = "disk";
            run_disk(disk, run);
        } else if (cen->parsed()) {
            run.subcommand = "center";
            run_center(center, run);
        } else if (fck->parsed()) {
            run.subcommand = "foldcheck";
            run_foldcheck(foldcheck, run);
        } else if (bnd->parsed()) {
            run.subcommand = "bounds";
            run_bounds(bounds, run);
        } else if (swp->parsed()) {
            run.subcommand = "sweep";
            run_sweep(sweep, run);
        }
        write_manifest(run, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return is_numeric_failure(e.kind()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric-breakdown: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
