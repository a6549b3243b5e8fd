#include "abcoh/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

namespace abcoh {

namespace {

// Builds the density part. Analytic kinds come back as probability
// densities; "table" values load raw so that atoms-plus-table files
// round-trip with their mass split intact (inside a mixture the table is
// normalized first, since mixture weights are shares).
DualMeasure density_from_spec(const ojson& spec, const GroupDescriptor& g,
                              std::int64_t grid_size, bool normalize_table) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "poisson")
        return make_poisson_measure(g, spec.at("r").get<double>(), grid_size);
    if (kind == "uniform_arc") {
        const auto arc = spec.at("arc");
        return make_uniform_arc_measure(g, arc.at(0).get<double>(),
                                        arc.at(1).get<double>(), grid_size);
    }
    if (kind == "uniform") return make_uniform_measure(g, grid_size);
    if (kind == "table") {
        DualMeasure mu = empty_grid_measure(g, grid_size);
        const auto& values = spec.at("values");
        if (values.size() != mu.grid.size())
            throw inconsistent_input_error(
                "density table length does not match the grid");
        for (std::size_t i = 0; i < mu.grid.size(); ++i)
            mu.grid[i].density = values.at(i).get<double>();
        return normalize_table ? normalize(std::move(mu)) : mu;
    }
    if (kind == "mixture") {
        std::vector<DualMeasure> parts;
        std::vector<double> weights;
        for (const auto& comp : spec.at("components")) {
            parts.push_back(density_from_spec(comp, g, grid_size, true));
            weights.push_back(comp.value("weight", 1.0));
        }
        return make_mixture(parts, weights);
    }
    throw inconsistent_input_error("unknown density kind '" + kind + "'");
}

}  // namespace

GroupDescriptor group_from_json(const ojson& j) {
    GroupDescriptor g;
    g.free_rank = j.at("free_rank").get<int>();
    if (j.contains("torsion"))
        for (const auto& n : j.at("torsion"))
            g.torsion_orders.push_back(n.get<std::int64_t>());
    g.validate();
    return g;
}

ojson group_to_json(const GroupDescriptor& g) {
    return ojson{{"free_rank", g.free_rank}, {"torsion", g.torsion_orders}};
}

LoadedMeasure measure_from_json(const ojson& j,
                                const std::optional<GroupDescriptor>& group) {
    GroupDescriptor g;
    if (j.contains("group"))
        g = group_from_json(j.at("group"));
    else if (group)
        g = *group;
    else
        throw inconsistent_input_error(
            "measure spec has no group and none was supplied");
    if (group && j.contains("group") && !(g == *group))
        throw dimension_mismatch_error(
            "measure spec group conflicts with the supplied group");

    DualMeasure mu;
    mu.group = g;
    const std::int64_t grid_size =
        j.value("grid_size", static_cast<std::int64_t>(kDefaultGridSize));
    if (j.contains("density") && !j.at("density").is_null()) {
        DualMeasure density = density_from_spec(j.at("density"), g, grid_size,
                                                /*normalize_table=*/false);
        const double w = j.at("density").value("weight", 1.0);
        mu.grid = std::move(density.grid);
        mu.grid_size = density.grid_size;
        mu.atoms = std::move(density.atoms);  // finite-group "densities"
        for (GridCell& c : mu.grid) c.density *= w;
        for (Atom& a : mu.atoms) a.weight *= w;
    }
    if (j.contains("atoms")) {
        for (const auto& aj : j.at("atoms")) {
            Atom a;
            std::vector<double> theta;
            if (aj.contains("theta"))
                for (const auto& t : aj.at("theta")) theta.push_back(t.get<double>());
            std::vector<std::int64_t> tors;
            if (aj.contains("torsion"))
                for (const auto& c : aj.at("torsion"))
                    tors.push_back(c.get<std::int64_t>());
            a.point = make_dual_point(g, std::move(theta), std::move(tors));
            a.weight = aj.at("weight").get<double>();
            bool merged = false;
            for (Atom& existing : mu.atoms)
                if (dual_distance(existing.point, a.point) <= 1e-12) {
                    existing.weight += a.weight;
                    merged = true;
                    break;
                }
            if (!merged) mu.atoms.push_back(std::move(a));
        }
    }
    LoadedMeasure out;
    out.measure = normalize(std::move(mu), &out.normalization);
    out.measure.validate();
    return out;
}

ojson measure_to_json(const DualMeasure& mu) {
    ojson j;
    j["group"] = group_to_json(mu.group);
    ojson atoms = ojson::array();
    for (const Atom& a : mu.atoms)
        atoms.push_back(ojson{{"theta", a.point.torus_angles},
                              {"torsion", a.point.torsion_characters},
                              {"weight", a.weight}});
    j["atoms"] = std::move(atoms);
    if (!mu.grid.empty()) {
        std::vector<double> values;
        values.reserve(mu.grid.size());
        for (const GridCell& c : mu.grid) values.push_back(c.density);
        j["density"] = ojson{{"kind", "table"}, {"values", std::move(values)}};
        j["grid_size"] = mu.grid_size;
    }
    return j;
}

PdFunction function_from_json(const ojson& j) {
    PdFunction phi;
    phi.group = group_from_json(j.at("group"));
    phi.window_radius = j.at("window_radius").get<std::int64_t>();
    std::int64_t expected = phi.group.torsion_size();
    for (int i = 0; i < phi.group.free_rank; ++i)
        expected *= 2 * phi.window_radius + 1;
    phi.values.assign(static_cast<std::size_t>(expected), cplx{});
    std::vector<bool> seen(phi.values.size(), false);
    for (const auto& vj : j.at("values")) {
        GroupElement x = zero_element(phi.group);
        for (int i = 0; i < phi.group.free_rank; ++i)
            x.free_part[i] = vj.at("x").at(i).get<std::int64_t>();
        for (std::size_t t = 0; t < phi.group.torsion_orders.size(); ++t)
            x.torsion_part[t] = vj.at("t").at(t).get<std::int64_t>();
        const std::size_t idx = phi.index_of(x);
        phi.values[idx] = cplx(vj.at("re").get<double>(), vj.at("im").get<double>());
        seen[idx] = true;
    }
    for (bool s : seen)
        if (!s) throw inconsistent_input_error("function file misses window values");
    phi.validate();
    return phi;
}

ojson function_to_json(const PdFunction& phi) {
    ojson j;
    j["group"] = group_to_json(phi.group);
    j["window_radius"] = phi.window_radius;
    ojson values = ojson::array();
    for (const GroupElement& x : phi.window_elements()) {
        const cplx v = phi.value(x);
        values.push_back(ojson{{"x", x.free_part},
                               {"t", x.torsion_part},
                               {"re", v.real()},
                               {"im", v.imag()}});
    }
    j["values"] = std::move(values);
    return j;
}

const char* verdict_name(Verdict v) {
    return v == Verdict::vanishes ? "vanishes" : "nonvanishing";
}

ojson report_to_json(const ClassificationReport& report, double normalization,
                     const std::string& witness_csv) {
    ojson j;
    j["trivial_mass"] = report.trivial_mass;
    j["hom_dim"] = report.hom_dim;
    j["support_distance"] = report.support_distance;
    j["h1"] = verdict_name(report.h1);
    j["reduced_h1"] = verdict_name(report.reduced_h1);
    j["mass_normalization"] = normalization;
    ojson witness;
    switch (report.witness_kind) {
        case WitnessKind::none:
            witness["kind"] = "none";
            break;
        case WitnessKind::homomorphism:
            witness["kind"] = "homomorphism";
            break;
        case WitnessKind::shell_cocycle: {
            witness["kind"] = "shell_cocycle";
            ojson shells = ojson::array();
            for (const Shell& s : report.witness_shells)
                shells.push_back(ojson{{"k", s.k},
                                       {"u_mass", s.u_mass},
                                       {"mass", s.mass},
                                       {"inner_distance", s.inner_distance}});
            witness["shells"] = std::move(shells);
            break;
        }
    }
    if (!witness_csv.empty() && report.witness_kind != WitnessKind::none)
        witness["csv"] = witness_csv;
    j["witness"] = std::move(witness);
    return j;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

void write_cocycle_csv(const std::filesystem::path& path, const Cocycle& b) {
    const DualMeasure& mu = b.measure;
    std::ofstream out = open_out(path);
    out << "kind,index";
    for (int i = 0; i < mu.group.free_rank; ++i) out << ",theta_" << i;
    for (int t = 0; t < mu.group.torsion_rank(); ++t) out << ",chi_" << t;
    out << ",mass";
    for (std::size_t j = 0; j < b.generator_values.size(); ++j)
        out << ",g" << j << "_re,g" << j << "_im";
    out << "\n";
    for (std::size_t p = 0; p < mu.point_count(); ++p) {
        const bool is_atom = p < mu.atoms.size();
        out << (is_atom ? "atom" : "grid") << ","
            << (is_atom ? p : p - mu.atoms.size());
        const DualPoint& pt = mu.point(p);
        for (double t : pt.torus_angles) out << "," << format_double(t);
        for (std::int64_t c : pt.torsion_characters) out << "," << c;
        out << "," << format_double(mu.mass(p));
        for (const MeasureVector& v : b.generator_values)
            out << "," << format_double(v[p].real()) << ","
                << format_double(v[p].imag());
        out << "\n";
    }
}

Cocycle cocycle_from_csv(const std::filesystem::path& path, DualMeasure measure) {
    std::ifstream in(path);
    if (!in) throw error("cannot open '" + path.string() + "'");
    std::string header;
    std::getline(in, header);
    const int gens = measure.group.generator_count();
    Cocycle b;
    b.generator_values.assign(gens, MeasureVector{});
    b.measure = std::move(measure);
    for (MeasureVector& v : b.generator_values) v = zero_vector(b.measure);
    const std::size_t coord_cols = static_cast<std::size_t>(
        b.measure.group.free_rank + b.measure.group.torsion_rank());
    std::string line;
    std::size_t p = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (p >= b.measure.point_count())
            throw inconsistent_input_error("cocycle CSV has too many rows");
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        const std::size_t expected = 3 + coord_cols + 2 * gens;
        if (cells.size() != expected)
            throw inconsistent_input_error("cocycle CSV row has wrong arity");
        for (int j = 0; j < gens; ++j) {
            const std::size_t base = 3 + coord_cols + 2 * j;
            b.generator_values[j][p] =
                cplx(std::stod(cells[base]), std::stod(cells[base + 1]));
        }
        ++p;
    }
    if (p != b.measure.point_count())
        throw inconsistent_input_error("cocycle CSV row count mismatch");
    return b;
}

void write_residual_csv(const std::filesystem::path& path,
                        const std::vector<ApproxStage>& stages) {
    std::ofstream out = open_out(path);
    out << "stage,radius,residual\n";
    for (std::size_t n = 0; n < stages.size(); ++n)
        out << (n + 1) << "," << format_double(stages[n].radius) << ","
            << format_double(stages[n].residual) << "\n";
}

void write_shells_csv(const std::filesystem::path& path,
                      const std::vector<Shell>& shells) {
    std::ofstream out = open_out(path);
    out << "n,k,u_mass,mass,inner_distance\n";
    for (std::size_t n = 0; n < shells.size(); ++n)
        out << (n + 1) << "," << shells[n].k << ","
            << format_double(shells[n].u_mass) << ","
            << format_double(shells[n].mass) << ","
            << format_double(shells[n].inner_distance) << "\n";
}

void write_obstruction_csv(const std::filesystem::path& path,
                           const ShellCocycle& sc) {
    std::ofstream out = open_out(path);
    out << "shell,delta,obstruction\n";
    for (std::size_t n = 0; n < sc.obstruction_delta.size(); ++n)
        out << (n + 1) << "," << format_double(sc.obstruction_delta[n]) << ","
            << format_double(sc.obstruction_value[n]) << "\n";
}

void write_defect_csv(const std::filesystem::path& path, const ShellCocycle& sc,
                      int max_box) {
    std::ofstream out = open_out(path);
    out << "l,tail_sum,tail_limit,total_sum,total_limit\n";
    const GroupDescriptor& g = sc.cocycle.measure.group;
    for (int l = 1; l <= max_box; ++l) {
        double tail = 0.0, total = 0.0;
        for (const GroupElement& x : box_elements(g, l)) {
            double t = 0.0, full = 0.0;
            for (std::size_t n = 0; n < sc.shells.size(); ++n) {
                const double d = shell_translate_defect(sc, x, n);
                full += d;
                if (static_cast<int>(n) + 1 >= l) t += d;
            }
            tail = std::max(tail, t);
            total = std::max(total, full);
        }
        out << l << "," << format_double(tail) << "," << format_double(4.0 / 3.0)
            << "," << format_double(total) << ","
            << format_double(4.0 * l + 4.0 / 3.0) << "\n";
    }
}

ojson read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open '" + path.string() + "'");
    return ojson::parse(in);
}

void write_json_file(const std::filesystem::path& path, const ojson& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

}  // namespace abcoh
