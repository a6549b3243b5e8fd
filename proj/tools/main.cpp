// abelian-coh: spectral measures on duals of finitely generated abelian
// groups, their positive definite functions, and the vanishing of the first
// (reduced) cohomology of the associated representation.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "abcoh/gns.hpp"
#include "abcoh/scenario.hpp"

namespace {

using namespace abcoh;

std::filesystem::path resolve_out(const std::filesystem::path& p) {
    if (const char* env = std::getenv("ABELIAN_COH_OUT")) {
        std::filesystem::create_directories(env);
        return std::filesystem::path(env) / p.filename();
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
}

std::optional<GroupDescriptor> load_group_opt(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return group_from_json(read_json_file(path));
}

LoadedMeasure load_measure(const std::string& measure_path,
                           const std::string& group_path) {
    return measure_from_json(read_json_file(measure_path),
                             load_group_opt(group_path));
}

// Parses "0..8" or "8" into the inclusive shift count.
std::int64_t parse_shifts(const std::string& text) {
    const std::size_t dots = text.find("..");
    const std::string last = dots == std::string::npos ? text : text.substr(dots + 2);
    return std::stoll(last);
}

int cmd_classify(const std::string& measure_path, const std::string& group_path,
                 double atom_tol, int witness_shells, const std::string& out,
                 const std::string& witness_csv) {
    LoadedMeasure loaded = load_measure(measure_path, group_path);
    ClassifyOptions opts;
    opts.atom_tol = atom_tol;
    opts.witness_shell_count = witness_shells;
    ClassificationReport report = classify(loaded.measure, opts);
    std::string csv_name;
    if (report.witness) {
        csv_name = witness_csv;
        write_cocycle_csv(resolve_out(csv_name), *report.witness);
    }
    const ojson j = report_to_json(report, loaded.normalization, csv_name);
    if (!out.empty()) write_json_file(resolve_out(out), j);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_selftest(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_int_distribution<std::int64_t> coord(-20, 20);
    int failures = 0;

    GroupDescriptor g{2, {3}};
    for (int round = 0; round < 50; ++round) {
        const DualPoint xi = make_dual_point(
            g, {angle(rng), angle(rng)},
            {std::uniform_int_distribution<std::int64_t>(0, 2)(rng)});
        const GroupElement x = make_element(g, {coord(rng), coord(rng)}, {coord(rng)});
        const GroupElement y = make_element(g, {coord(rng), coord(rng)}, {coord(rng)});
        const cplx lhs = evaluate_character(g, xi, group_add(g, x, y));
        const cplx rhs = evaluate_character(g, xi, x) * evaluate_character(g, xi, y);
        if (std::abs(lhs - rhs) > 1e-10) ++failures;
    }
    std::cout << (failures ? "FAIL" : "ok") << " character homomorphism\n";

    GroupDescriptor z{1, {}};
    int psd_failures = 0;
    for (int round = 0; round < 10; ++round) {
        std::vector<Atom> atoms;
        const int n_atoms = 1 + static_cast<int>(rng() % 3);
        for (int a = 0; a < n_atoms; ++a)
            atoms.push_back(Atom{make_dual_point(z, {angle(rng)}),
                                 0.1 + 0.9 * std::generate_canonical<double, 53>(rng)});
        DualMeasure mu = make_atomic_measure(z, std::move(atoms));
        PdFunction phi = bochner_forward(mu, 16);
        if (!check_positive_definite(phi).positive) ++psd_failures;
    }
    std::cout << (psd_failures ? "FAIL" : "ok") << " forward transforms are PSD\n";

    failures += psd_failures;
    std::cout << (failures ? "selftest FAILED\n" : "selftest passed\n");
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Bochner correspondence and first-cohomology classification for "
        "finitely generated abelian groups"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::int64_t global_grid = kDefaultGridSize;
    std::int64_t global_window = 256;
    std::uint64_t global_seed = 1;
    app.add_option("--grid", global_grid, "default grid size per torus dimension");
    app.add_option("--window", global_window, "default window radius");
    app.add_option("--seed", global_seed, "seed for randomized self tests");

    std::string measure_path, group_path, function_path, cocycle_path, out_path;
    std::string shifts_text = "0..8";

    auto* classify_cmd = app.add_subcommand("classify", "decide H1 / reduced H1");
    double atom_tol = 1e-6;
    int witness_shells = 4;
    std::string witness_csv = "witness_cocycle.csv";
    classify_cmd->add_option("--measure", measure_path)->required();
    classify_cmd->add_option("--group", group_path);
    classify_cmd->add_option("--atom-tol", atom_tol);
    classify_cmd->add_option("--witness-shells", witness_shells);
    classify_cmd->add_option("--out", out_path);
    classify_cmd->add_option("--witness-csv", witness_csv);

    auto* transform_cmd = app.add_subcommand("transform", "Bochner transforms");
    transform_cmd->require_subcommand(1);
    auto* forward_cmd = transform_cmd->add_subcommand("forward", "measure -> phi");
    std::int64_t window = -1;
    forward_cmd->add_option("--measure", measure_path)->required();
    forward_cmd->add_option("--group", group_path);
    forward_cmd->add_option("--window", window);
    forward_cmd->add_option("--out", out_path);
    auto* inverse_cmd = transform_cmd->add_subcommand("inverse", "phi -> measure");
    std::int64_t grid = -1;
    std::vector<double> candidate_angles;
    inverse_cmd->add_option("--function", function_path)->required();
    inverse_cmd->add_option("--grid", grid);
    inverse_cmd->add_option("--candidate", candidate_angles,
                            "candidate atom angle (repeatable; G = Z)");
    inverse_cmd->add_option("--out", out_path);

    auto* gns_cmd = app.add_subcommand("gns", "GNS model checks");
    gns_cmd->require_subcommand(1);
    auto* verify_cmd = gns_cmd->add_subcommand(
        "verify", "Gram equality of the two cyclic orbits");
    double gns_threshold = 1e-8;
    verify_cmd->add_option("--measure", measure_path)->required();
    verify_cmd->add_option("--group", group_path);
    verify_cmd->add_option("--shifts", shifts_text, "e.g. 0..8");
    verify_cmd->add_option("--threshold", gns_threshold);

    auto* cocycle_cmd = app.add_subcommand("cocycle", "cocycle constructions");
    cocycle_cmd->require_subcommand(1);
    auto* build_cmd = cocycle_cmd->add_subcommand("build", "dyadic-shell cocycle");
    int shells = 8;
    int check_box = 0;
    std::string out_dir = "out";
    build_cmd->add_option("--measure", measure_path)->required();
    build_cmd->add_option("--group", group_path);
    build_cmd->add_option("--shells", shells);
    build_cmd->add_option("--check-box", check_box,
                          "also emit translate-defect sums over boxes K_l");
    build_cmd->add_option("--out-dir", out_dir);
    auto* solve_cmd = cocycle_cmd->add_subcommand("solve", "coboundary equation");
    solve_cmd->add_option("--measure", measure_path)->required();
    solve_cmd->add_option("--group", group_path);
    solve_cmd->add_option("--cocycle", cocycle_path)->required();
    solve_cmd->add_option("--out", out_path);
    auto* approx_cmd =
        cocycle_cmd->add_subcommand("approx", "coboundary approximation stages");
    int stages = 5;
    double r1 = 1.0;
    approx_cmd->add_option("--measure", measure_path)->required();
    approx_cmd->add_option("--group", group_path);
    approx_cmd->add_option("--cocycle", cocycle_path)->required();
    approx_cmd->add_option("--stages", stages);
    approx_cmd->add_option("--r1", r1);
    approx_cmd->add_option("--out", out_path);

    auto* measure_cmd = app.add_subcommand("measure", "generate a measure file");
    std::string spec_path;
    measure_cmd->add_option("--spec", spec_path, "measure spec JSON")->required();
    measure_cmd->add_option("--group", group_path);
    measure_cmd->add_option("--out", out_path)->required();

    auto* run_cmd = app.add_subcommand("run", "execute a scenario pipeline");
    std::string scenario_path;
    run_cmd->add_option("scenario", scenario_path)->required();

    auto* selftest_cmd =
        app.add_subcommand("selftest", "randomized property checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classify_cmd)
            return cmd_classify(measure_path, group_path, atom_tol, witness_shells,
                                out_path, witness_csv);
        if (*forward_cmd) {
            LoadedMeasure loaded = load_measure(measure_path, group_path);
            const std::int64_t n = window >= 0 ? window : global_window;
            PdFunction phi = bochner_forward(loaded.measure, n);
            const ojson j = function_to_json(phi);
            if (out_path.empty())
                std::cout << j.dump(2) << "\n";
            else
                write_json_file(resolve_out(out_path), j);
            return kExitOk;
        }
        if (*inverse_cmd) {
            PdFunction phi = function_from_json(read_json_file(function_path));
            std::vector<DualPoint> candidates;
            for (double t : candidate_angles)
                candidates.push_back(make_dual_point(phi.group, {t}));
            const std::int64_t m = grid >= 0 ? grid : global_grid;
            InverseResult inv = bochner_inverse(phi, m, candidates);
            ojson j = measure_to_json(inv.measure);
            j["roundtrip_error"] = inv.roundtrip_error;
            if (out_path.empty())
                std::cout << j.dump(2) << "\n";
            else
                write_json_file(resolve_out(out_path), j);
            return kExitOk;
        }
        if (*verify_cmd) {
            LoadedMeasure loaded = load_measure(measure_path, group_path);
            const std::int64_t s = parse_shifts(shifts_text);
            PdFunction phi = bochner_forward(loaded.measure, 2 * s);
            GnsModel model = build_gns(phi, s);
            std::vector<GroupElement> shift_elems;
            const GroupElement g1 = generator(loaded.measure.group, 0);
            for (std::int64_t k = 0; k <= s; ++k)
                shift_elems.push_back(group_scale(loaded.measure.group, k, g1));
            const double disc = verify_equivalence(model, loaded.measure, shift_elems);
            const bool pass = disc <= gns_threshold;
            std::cout << ojson{{"discrepancy", disc},
                               {"threshold", gns_threshold},
                               {"pass", pass}}
                             .dump(2)
                      << "\n";
            return pass ? kExitOk : kExitPrecondition;
        }
        if (*build_cmd) {
            LoadedMeasure loaded = load_measure(measure_path, group_path);
            const Decomposition dec = decompose(loaded.measure);
            ShellCocycle sc = build_nontrivial_cocycle(dec.perp, shells);
            std::filesystem::path dir = out_dir;
            if (const char* env = std::getenv("ABELIAN_COH_OUT")) dir = env;
            std::filesystem::create_directories(dir);
            write_json_file(dir / "perp_measure.json", measure_to_json(dec.perp));
            write_cocycle_csv(dir / "cocycle.csv", sc.cocycle);
            write_shells_csv(dir / "shells.csv", sc.shells);
            write_obstruction_csv(dir / "obstruction.csv", sc);
            if (check_box > 0) write_defect_csv(dir / "defects.csv", sc, check_box);
            std::cout << "wrote " << (dir / "cocycle.csv").string() << "\n";
            return kExitOk;
        }
        if (*solve_cmd) {
            LoadedMeasure loaded = load_measure(measure_path, group_path);
            Cocycle b = cocycle_from_csv(cocycle_path, loaded.measure);
            CoboundarySolution sol = solve_coboundary(b);
            std::cout << ojson{{"residual", sol.residual},
                               {"certified", sol.certified},
                               {"box_side", sol.smoothing.box_side}}
                             .dump(2)
                      << "\n";
            if (!out_path.empty()) {
                Cocycle primitive{loaded.measure, {sol.primitive}};
                write_cocycle_csv(resolve_out(out_path), primitive);
            }
            return kExitOk;
        }
        if (*approx_cmd) {
            LoadedMeasure loaded = load_measure(measure_path, group_path);
            Cocycle b = cocycle_from_csv(cocycle_path, loaded.measure);
            const auto result = approximate_by_coboundaries(b, stages, r1);
            const std::string name = out_path.empty() ? "residuals.csv" : out_path;
            write_residual_csv(resolve_out(name), result);
            std::cout << "wrote " << name << "\n";
            return kExitOk;
        }
        if (*measure_cmd) {
            LoadedMeasure loaded = measure_from_json(read_json_file(spec_path),
                                                     load_group_opt(group_path));
            ojson j = measure_to_json(loaded.measure);
            j["mass_normalization"] = loaded.normalization;
            write_json_file(resolve_out(out_path), j);
            return kExitOk;
        }
        if (*run_cmd) return run_scenario(scenario_path, std::cerr);
        if (*selftest_cmd) return cmd_selftest(global_seed);
    } catch (const ojson::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
