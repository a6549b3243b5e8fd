#include "abcoh/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include "abcoh/gns.hpp"

namespace abcoh {

namespace {

struct PipelineState {
    std::filesystem::path out_dir;
    GroupDescriptor group;
    DualMeasure measure;
    double normalization = 1.0;
    std::optional<PdFunction> function;
    std::optional<ShellCocycle> shell_cocycle;
    std::ofstream summary;
};

std::vector<GroupElement> shift_range(const GroupDescriptor& g, std::int64_t count) {
    // Multiples 0..count of the first generator.
    std::vector<GroupElement> shifts;
    const GroupElement g1 = generator(g, 0);
    for (std::int64_t k = 0; k <= count; ++k)
        shifts.push_back(group_scale(g, k, g1));
    return shifts;
}

void step_classify(PipelineState& st, const ojson& cmd) {
    ClassifyOptions opts;
    opts.atom_tol = cmd.value("atom_tol", opts.atom_tol);
    opts.witness_shell_count = cmd.value("witness_shells", opts.witness_shell_count);
    ClassificationReport report = classify(st.measure, opts);
    std::string witness_csv;
    if (report.witness) {
        witness_csv = "witness_cocycle.csv";
        write_cocycle_csv(st.out_dir / witness_csv, *report.witness);
    }
    write_json_file(st.out_dir / "report.json",
                    report_to_json(report, st.normalization, witness_csv));
    st.summary << "classify: H1=" << verdict_name(report.h1)
               << " reduced_H1=" << verdict_name(report.reduced_h1)
               << " trivial_mass=" << format_double(report.trivial_mass)
               << " hom_dim=" << report.hom_dim
               << " support_distance=" << format_double(report.support_distance)
               << "\n";
}

void step_forward(PipelineState& st, const ojson& cmd) {
    const std::int64_t window = cmd.value("window", static_cast<std::int64_t>(16));
    st.function = bochner_forward(st.measure, window);
    write_json_file(st.out_dir / "function.json", function_to_json(*st.function));
    st.summary << "transform-forward: window=" << window << "\n";
}

void step_inverse(PipelineState& st, const ojson& cmd) {
    if (!st.function)
        throw precondition_error("transform-inverse needs a preceding forward step");
    const std::int64_t grid =
        cmd.value("grid", st.measure.grid_size > 0 ? st.measure.grid_size
                                                   : kDefaultGridSize);
    std::vector<DualPoint> candidates;
    if (cmd.contains("candidates"))
        for (const auto& cj : cmd.at("candidates")) {
            std::vector<double> theta;
            for (const auto& t : cj) theta.push_back(t.get<double>());
            candidates.push_back(make_dual_point(st.group, std::move(theta)));
        }
    InverseResult inv = bochner_inverse(*st.function, grid, candidates);
    write_json_file(st.out_dir / "inverse_measure.json",
                    measure_to_json(inv.measure));
    st.summary << "transform-inverse: grid=" << grid
               << " roundtrip_error=" << format_double(inv.roundtrip_error)
               << " clipped=" << format_double(inv.clipped_negative_mass) << "\n";
}

void step_gns(PipelineState& st, const ojson& cmd) {
    const std::int64_t shifts = cmd.value("shifts", static_cast<std::int64_t>(8));
    const std::int64_t window = cmd.value("window", 2 * shifts);
    const double threshold = cmd.value("threshold", 1e-8);
    PdFunction phi = st.function ? *st.function : bochner_forward(st.measure, window);
    GnsModel model = build_gns(phi, shifts);
    const double disc =
        verify_equivalence(model, st.measure, shift_range(st.group, shifts));
    const bool pass = disc <= threshold;
    write_json_file(st.out_dir / "gns.json",
                    ojson{{"discrepancy", disc},
                          {"threshold", threshold},
                          {"shifts", shifts},
                          {"pass", pass}});
    st.summary << "gns-verify: discrepancy=" << format_double(disc)
               << (pass ? " pass" : " FAIL") << "\n";
}

void step_build(PipelineState& st, const ojson& cmd) {
    const int shells = cmd.value("shells", 8);
    const Decomposition dec = decompose(st.measure);
    st.shell_cocycle = build_nontrivial_cocycle(dec.perp, shells);
    const ShellCocycle& sc = *st.shell_cocycle;
    write_json_file(st.out_dir / "perp_measure.json", measure_to_json(dec.perp));
    write_cocycle_csv(st.out_dir / "cocycle.csv", sc.cocycle);
    write_shells_csv(st.out_dir / "shells.csv", sc.shells);
    write_obstruction_csv(st.out_dir / "obstruction.csv", sc);
    if (cmd.contains("check_box"))
        write_defect_csv(st.out_dir / "defects.csv", sc,
                         cmd.at("check_box").get<int>());
    st.summary << "cocycle-build: shells=" << shells << " k=[";
    for (std::size_t n = 0; n < sc.shells.size(); ++n)
        st.summary << (n ? "," : "") << sc.shells[n].k;
    st.summary << "]\n";
}

void step_solve(PipelineState& st, const ojson&) {
    if (!st.shell_cocycle)
        throw precondition_error("cocycle-solve needs a preceding cocycle-build");
    // The shell cocycle lives in the no-gap regime by construction, so the
    // solver is expected to refuse; report whichever way it goes.
    try {
        CoboundarySolution sol = solve_coboundary(st.shell_cocycle->cocycle);
        write_json_file(st.out_dir / "solve.json",
                        ojson{{"residual", sol.residual},
                              {"certified", sol.certified},
                              {"box_side", sol.smoothing.box_side}});
        st.summary << "cocycle-solve: residual=" << format_double(sol.residual)
                   << "\n";
    } catch (const no_gap_error& e) {
        write_json_file(st.out_dir / "solve.json",
                        ojson{{"error", "no_gap"}, {"message", e.what()}});
        st.summary << "cocycle-solve: no_gap\n";
    }
}

void step_approx(PipelineState& st, const ojson& cmd) {
    if (!st.shell_cocycle)
        throw precondition_error("cocycle-approx needs a preceding cocycle-build");
    const int stages = cmd.value("stages", 5);
    const double r1 = cmd.value("r1", 1.0);
    const auto result =
        approximate_by_coboundaries(st.shell_cocycle->cocycle, stages, r1);
    write_residual_csv(st.out_dir / "residuals.csv", result);
    ojson detail = ojson::array();
    for (std::size_t n = 0; n < result.size(); ++n)
        detail.push_back(ojson{{"stage", n + 1},
                               {"radius", result[n].radius},
                               {"residual", result[n].residual},
                               {"tail_bound", result[n].tail_bound},
                               {"neighborhood_mass", result[n].neighborhood_mass}});
    write_json_file(st.out_dir / "approx.json", detail);
    st.summary << "cocycle-approx: stages=" << stages << " final_residual="
               << format_double(result.empty() ? 0.0 : result.back().residual)
               << "\n";
}

}  // namespace

int run_scenario(const std::filesystem::path& scenario_file, std::ostream& log) {
    ojson spec;
    try {
        spec = read_json_file(scenario_file);
    } catch (const ojson::parse_error& e) {
        log << "scenario parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        log << e.what() << "\n";
        return kExitUsage;
    }

    try {
        PipelineState st;
        st.group = group_from_json(spec.at("group"));
        std::filesystem::path out = spec.value("out_dir", std::string("out"));
        if (const char* env = std::getenv("ABELIAN_COH_OUT")) out = env;
        st.out_dir = out;

        const auto pipeline = spec.value("pipeline", ojson::array());
        if (pipeline.empty()) return kExitOk;  // nothing to do, no artifacts

        std::filesystem::create_directories(st.out_dir);
        LoadedMeasure loaded = measure_from_json(spec.at("measure"), st.group);
        st.measure = std::move(loaded.measure);
        st.normalization = loaded.normalization;
        st.summary.open(st.out_dir / "summary.txt");
        st.summary << "scenario: " << scenario_file.filename().string() << "\n";
        st.summary << "mass_normalization: " << format_double(st.normalization)
                   << "\n";

        for (const auto& cmd : pipeline) {
            const std::string name = cmd.at("cmd").get<std::string>();
            if (name == "classify")
                step_classify(st, cmd);
            else if (name == "transform-forward")
                step_forward(st, cmd);
            else if (name == "transform-inverse")
                step_inverse(st, cmd);
            else if (name == "gns-verify")
                step_gns(st, cmd);
            else if (name == "cocycle-build")
                step_build(st, cmd);
            else if (name == "cocycle-solve")
                step_solve(st, cmd);
            else if (name == "cocycle-approx")
                step_approx(st, cmd);
            else
                throw std::runtime_error("unknown pipeline command '" + name + "'");
        }
        return kExitOk;
    } catch (const ojson::exception& e) {
        log << "scenario field error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const error& e) {
        log << "precondition: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        log << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace abcoh
