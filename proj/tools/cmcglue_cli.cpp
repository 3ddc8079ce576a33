#include "cmcglue/assembly.hpp"
#include "cmcglue/conformal.hpp"
#include "cmcglue/fit.hpp"
#include "cmcglue/jacobi.hpp"
#include "cmcglue/mesh.hpp"
#include "cmcglue/spec_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace cmcglue;
using Json = nlohmann::ordered_json;

namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json check(const std::string& name, Json inputs, Json measured, Json threshold, bool pass)
{
    Json c;
    c["name"] = name;
    c["inputs"] = std::move(inputs);
    c["measured"] = std::move(measured);
    c["threshold"] = std::move(threshold);
    c["pass"] = pass;
    return c;
}

void check_tau(double tau)
{
    if (!(tau > 0.0 && tau <= 0.25))
        throw ValidationError("tau must lie in (0, 1/4], got " + std::to_string(tau));
}

BuildOptions options_from(const SpecParams& p)
{
    BuildOptions o;
    o.delta = p.delta;
    if (p.b_override)
        o.b = *p.b_override;
    return o;
}

std::string stem_of(const std::string& path)
{
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return path.substr(0, dot);
    return path;
}

// validate

int cmd_validate(const std::string& spec_path, double eps_override)
{
    const GraphSpec spec = load_graph_spec(spec_path);
    const Graph& g = spec.graph;
    const double eps = eps_override > 0.0 ? eps_override : spec.params.eps_pre_embed;
    bool ok = true;

    for (size_t i = 0; i < g.vertices().size(); ++i) {
        const Vec3 w = unbalancing(g, static_cast<int>(i));
        if (w.norm() > 1e-9) {
            ok = false;
            std::printf("balanced: FAIL vertex %s |W| = %.6e\n", g.vertices()[i].id.c_str(), w.norm());
        }
    }
    if (ok)
        std::printf("balanced: ok\n");

    bool central = true;
    for (size_t e = 0; e < g.edges().size(); ++e) {
        const double gap = g.edge_length(static_cast<int>(e)) - 2.0 * g.edges()[e].l;
        if (std::abs(gap) > 1e-9) {
            central = false;
            std::printf("central: FAIL edge %s |p+ - p-| - 2 l = %.6e\n", g.edges()[e].id.c_str(), gap);
        }
    }
    if (central)
        std::printf("central: ok\n");
    ok = ok && central;

    if (!ok) {
        std::printf("pre-embedded: skipped (requires a central graph)\n");
        return 1;
    }
    const PreEmbedReport pre = check_pre_embedded(g, eps);
    static const char* names[] = {"", "(i) angle >= pi/3", "(ii) distance > 2 + eps", "(iii) 1 - v.v' > eps"};
    for (const auto& v : pre.violations)
        std::printf("pre-embedded: FAIL condition %s between %s and %s (value %.6e)\n", names[v.condition], v.first.c_str(),
                    v.second.c_str(), v.value);
    if (pre.pass())
        std::printf("pre-embedded: ok (eps = %g)\n", eps);
    ok = ok && pre.pass();
    return ok ? 0 : 1;
}

// build

struct BuildArgs
{
    std::string spec;
    double tau = 0.0;
    std::string d_file;
    std::string zeta_file;
    int resolution = 12;
    std::string out = "surface.obj";
    bool check_embedded = false;
};

int cmd_build(const BuildArgs& args)
{
    const GraphSpec spec = load_graph_spec(args.spec);
    const double tau = args.tau > 0.0 || args.tau < 0.0 ? args.tau : spec.params.tau;
    check_tau(tau);
    std::map<std::string, Vec3> d;
    ZetaAssignment zeta;
    if (!args.d_file.empty())
        d = parse_d_file(read_text_file(args.d_file));
    if (!args.zeta_file.empty())
        zeta = parse_zeta_file(read_text_file(args.zeta_file));

    const InitialSurface s = build_initial_surface(spec.graph, tau, d, zeta, options_from(spec.params));
    TessellationReport trep;
    const TriangleMesh mesh = tessellate(s, args.resolution, &trep);
    const std::string stem = stem_of(args.out);
    write_obj(mesh, args.out);
    write_tags(mesh, stem + ".tags.json");

    Json rep;
    rep["command"] = "build";
    rep["inputs"] = {{"spec", args.spec}, {"tau", tau}, {"resolution", args.resolution}, {"a", s.a}, {"b", s.b}};
    Json elements = Json::array();
    for (const auto& el : s.elements) {
        Json row;
        row["id"] = el.id;
        row["kind"] = el.kind == ElementKind::Edge ? "edge" : "ray";
        row["tau_e"] = el.tau_e;
        row["tau_target"] = el.tau_d;
        row["P_domain"] = el.block.domain_profile().quarter_period();
        row["P_target"] = el.block.target_profile().quarter_period();
        if (el.kind == ElementKind::Edge) {
            row["l"] = el.l;
            row["ell"] = el.ell;
        }
        elements.push_back(row);
    }
    rep["elements"] = elements;
    Json charts = Json::array();
    for (const auto& r : s.chart_report())
        charts.push_back({{"vertex", r.vertex}, {"element", r.element}, {"residual", r.residual}});
    rep["chart_residuals"] = charts;
    rep["mesh"] = {{"path", args.out},
                   {"vertices", mesh.vertices.size()},
                   {"triangles", mesh.triangles.size()},
                   {"max_stitch_mismatch", trep.max_stitch_mismatch}};
    bool embedded = true;
    if (args.check_embedded) {
        const IntersectionReport ir = self_intersection_check(mesh);
        Json pairs = Json::array();
        for (const auto& [i, j] : ir.pairs)
            pairs.push_back(Json::array({i, j}));
        rep["intersections"] = {{"count", ir.count}, {"candidate_pairs", ir.candidate_pairs}, {"pairs", pairs}};
        embedded = ir.empty();
    }
    write_text_file(stem + ".report.json", rep.dump(2) + "\n");
    std::printf("wrote %s (%zu vertices, %zu triangles)\n", args.out.c_str(), mesh.vertices.size(), mesh.triangles.size());
    if (args.check_embedded)
        std::printf("self-intersections: %s\n", embedded ? "none" : "FOUND");
    return embedded ? 0 : 1;
}

// diagnose

struct DiagnoseArgs
{
    std::string spec;
    std::vector<double> taus{1e-4, 1e-5, 1e-6};
    std::string out;
    double scale = 1e-3;
};

int cmd_diagnose(const DiagnoseArgs& args)
{
    const GraphSpec spec = load_graph_spec(args.spec);
    const Graph& g = spec.graph;
    for (double t : args.taus)
        check_tau(t);
    if (args.taus.size() < 2)
        throw ValidationError("diagnose: the sweep needs at least two values");
    const BuildOptions opts = options_from(spec.params);
    Json checks = Json::array();
    bool all_pass = true, errored = false;
    auto push = [&](Json c) {
        all_pass = all_pass && c["pass"].get<bool>();
        checks.push_back(std::move(c));
    };
    auto failure = [&](const std::string& name, const Error& e) {
        errored = true;
        Json c = check(name, Json::object(), {{"error", e.what()}}, Json::object(), false);
        all_pass = false;
        checks.push_back(std::move(c));
    };

    // Period limits.
    try {
        const auto rows = period_limit_report(args.taus);
        Json measured = Json::array();
        bool decreasing = true;
        for (size_t i = 0; i < rows.size(); ++i) {
            measured.push_back({{"tau", rows[i].tau}, {"P", rows[i].P}, {"p", rows[i].p}, {"p_over_minus_tau_log_tau", rows[i].ratio_p},
                                {"dp_over_minus_log_tau", rows[i].ratio_dp}});
            if (i > 0 && std::abs(rows[i].ratio_p - 1.0) >= std::abs(rows[i - 1].ratio_p - 1.0))
                decreasing = false;
        }
        push(check("period_limits", {{"taus", args.taus}}, measured,
                   {{"rule", "|p/(-tau log tau) - 1| strictly decreasing along the sweep"}}, decreasing));
    } catch (const Error& e) {
        failure("period_limits", e);
    }

    // Mean-curvature error scaling and flux balance per tau.
    std::vector<double> sup_g, sup_d;
    Json flux_rows = Json::array();
    bool flux_ok = true;
    try {
        for (size_t k = 0; k < args.taus.size(); ++k) {
            const double tau = args.taus[k];
            const auto [d, zeta] = random_parameters(g, tau, args.scale, args.scale, 7u, opts.eps);
            const InitialSurface s = build_initial_surface(g, tau, d, zeta, opts);
            double sg = 0.0, sd = 0.0;
            for (const auto& el : s.elements)
                for (const auto& [lo, hi] : el.block.error_support()) {
                    const HErrorField f = h_error_field(el.block, lo, hi, 16, 24);
                    sg = std::max(sg, f.sup_gluing);
                    sd = std::max(sd, f.sup_dislocation);
                }
            sup_g.push_back(sg);
            sup_d.push_back(sd);
            for (size_t v = 0; v < s.spheres.size(); ++v) {
                const FluxReport fr = flux_balance_check(s, static_cast<int>(v));
                const bool pass = fr.relative_error < 5e-2;
                flux_ok = flux_ok && pass;
                flux_rows.push_back({{"tau", tau},
                                     {"vertex", g.vertices()[v].id},
                                     {"quadrature", vec_json(fr.quadrature)},
                                     {"formula", vec_json(fr.formula)},
                                     {"relative_error", fr.relative_error},
                                     {"pass", pass}});
            }
        }
        auto scaling = [&](const std::string& name, const std::vector<double>& v) {
            bool positive = true;
            for (double x : v)
                positive = positive && x > 0.0;
            Json measured = {{"sup", v}};
            bool pass = false;
            if (positive) {
                const LinearFit f = loglog_fit(args.taus, v);
                measured["fitted_exponent"] = f.slope;
                measured["r2"] = f.r2;
                pass = f.slope >= 0.7;
            }
            push(check(name, {{"taus", args.taus}, {"scale", args.scale}, {"seed", 7}}, measured,
                       {{"claimed_exponent", 1.0}, {"rule", "fitted exponent >= claimed - 0.3"}}, pass));
        };
        scaling("h_error_gluing_scaling", sup_g);
        scaling("h_error_dislocation_scaling", sup_d);
        push(check("flux_balance", {{"taus", args.taus}, {"scale", args.scale}}, flux_rows,
                   {{"relative_error", 5e-2}}, flux_ok));
    } catch (const Error& e) {
        failure("h_error_and_flux", e);
    }

    // Metric comparisons.
    try {
        if (args.taus.size() < 3)
            throw ValidationError("metric comparisons need at least three tau values");
        const MetricSuite suite = metric_comparison_suite(g, args.taus, opts);
        for (const auto& it : suite.items) {
            push(check("metric_comparison_" + std::to_string(it.item),
                       {{"taus", suite.taus}, {"quantity", it.name}},
                       {{"values", it.values}, {"fitted_exponent", it.fitted_exponent}, {"r2", it.r2}},
                       {{"claimed_exponent", it.claimed_exponent}, {"rule", "fitted exponent >= claimed - 0.3"}},
                       it.within_band));
        }
    } catch (const Error& e) {
        failure("metric_comparisons", e);
    }

    Json report;
    report["schema"] = "cmcglue.diagnostics/1";
    report["command"] = "diagnose";
    report["spec"] = args.spec;
    report["checks"] = checks;
    report["pass"] = all_pass;
    const std::string text = report.dump(2) + "\n";
    if (args.out.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_text_file(args.out, text);
    if (errored)
        return 2;
    return all_pass ? 0 : 1;
}

// jacobi

struct JacobiArgs
{
    std::string spec;
    double tau = 0.0;
    std::string region = "transition";
    int modes = 8;
    std::string out;
};

Json approx_json(const ApproxKernelResult& r)
{
    return {{"eigenvalues", r.eigenvalues},
            {"eigen_modes", r.eigen_modes},
            {"kernel_eigenvalues", r.kernel_eigenvalues},
            {"principal_angles", r.principal_angles},
            {"count_eps", r.count_eps},
            {"count_window", r.count_window},
            {"unknowns", r.unknowns}};
}

Json coeff_json(const SubstituteCoefficients& c)
{
    Json gram = Json::array();
    for (const auto& row : c.gram)
        gram.push_back(Json::array({row[0], row[1], row[2]}));
    return {{"c", Json::array({c.c[0], c.c[1], c.c[2]})}, {"gram", gram}, {"max_off_diagonal", c.max_off_diagonal}};
}

int cmd_jacobi(const JacobiArgs& args)
{
    const GraphSpec spec = load_graph_spec(args.spec);
    const double tau = args.tau > 0.0 || args.tau < 0.0 ? args.tau : spec.params.tau;
    check_tau(tau);
    if (args.modes < 1)
        throw ValidationError("--modes must be positive");
    Json rep;
    rep["schema"] = "cmcglue.jacobi/1";
    rep["command"] = "jacobi";
    rep["inputs"] = {{"spec", args.spec}, {"tau", tau}, {"region", args.region}, {"modes", args.modes}};

    const std::string& sel = args.region;
    const auto colon = sel.find(':');
    const std::string kind = sel.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : sel.substr(colon + 1);
    if (kind == "transition") {
        const TransitionProblem p(tau, kSpectralB, 0, true, args.modes);
        const EigenReport e = lowest_eigenvalue(p);
        const KernelReport k = kernel_solutions(p);
        std::vector<std::pair<int, double>> data;
        for (int m = 2; m <= std::min(args.modes, 4); ++m)
            data.emplace_back(m, 1.0 / (m - 1));
        const DecayReport d = decay_measure(p, data);
        rep["transition"] = {{"length", p.length()}, {"b", p.b()}, {"intervals", p.intervals()}};
        rep["lowest_eigenvalue"] = {{"lambda_min", e.lambda_min},
                                    {"mode", e.mode},
                                    {"lambda_l2", e.lambda_l2},
                                    {"mode_lowest", e.mode_lowest},
                                    {"flat_value", e.flat_value},
                                    {"within_perturbation_bound", e.within_perturbation_bound}};
        rep["kernel"] = {{"A1_plus", k.A1_plus}, {"A1_minus", k.A1_minus}, {"A2", k.A2}, {"A3", k.A3},
                         {"item2", k.item2},     {"item4", k.item4},       {"item5", k.item5}};
        rep["decay"] = {{"gamma_hat", d.gamma_hat}, {"r2", d.r2}, {"resolved", d.resolved}};
    } else if (kind == "standard") {
        int n = 0;
        try {
            n = std::stoi(arg);
        } catch (const std::exception&) {
            throw ValidationError("invalid region selector '" + sel + "': expected standard:<n>");
        }
        rep["approx_kernel"] = approx_json(approx_kernel_standard(tau, n, kSpectralB, 0, args.modes));
        rep["substitute_kernel"] = coeff_json(substitute_kernel_coeffs_standard(tau, n));
    } else if (kind == "central") {
        const Graph& g = spec.graph;
        int v = -1;
        for (size_t i = 0; i < g.vertices().size(); ++i)
            if (g.vertices()[i].id == arg)
                v = static_cast<int>(i);
        if (v < 0)
            throw ValidationError("invalid region selector '" + sel + "': unknown vertex");
        const InitialSurface s = build_initial_surface(g, tau, {}, {}, options_from(spec.params));
        rep["approx_kernel"] = approx_json(approx_kernel_central(s, v));
        rep["substitute_kernel"] = coeff_json(substitute_kernel_coeffs_central(s, v));
    } else {
        throw ValidationError("invalid region selector '" + sel + "': use transition, standard:<n> or central:<vertex>");
    }
    const std::string text = rep.dump(2) + "\n";
    if (args.out.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_text_file(args.out, text);
    return 0;
}

// generate

int cmd_generate(const std::string& family, int param, const std::string& out, double tau)
{
    SpecParams p;
    if (tau > 0.0)
        p.tau = tau;
    const std::string text = write_graph_spec(generate_example(family, param), p);
    if (out.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_text_file(out, text);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Initial surfaces for constant mean curvature gluing from finite graphs"};
    app.require_subcommand(1);

    std::string validate_spec;
    double validate_eps = 0.0;
    auto* validate = app.add_subcommand("validate", "Check balancing, centrality and pre-embeddedness");
    validate->add_option("spec", validate_spec, "Graph spec file")->required();
    validate->add_option("--eps", validate_eps, "Pre-embedding constant (default from the spec)");

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "Assemble the initial surface and export a mesh");
    build->add_option("spec", build_args.spec, "Graph spec file")->required();
    build->add_option("--tau", build_args.tau, "Global parameter tau (default from the spec)");
    build->add_option("--d-file", build_args.d_file, "JSON vertex displacements d");
    build->add_option("--zeta-file", build_args.zeta_file, "JSON dislocations zeta");
    build->add_option("--resolution", build_args.resolution, "Samples per unit length")->check(CLI::Range(8, 200));
    build->add_option("--out", build_args.out, "OBJ output path");
    build->add_flag("--check-embedded", build_args.check_embedded, "Append a self-intersection report");

    DiagnoseArgs diag_args;
    auto* diagnose = app.add_subcommand("diagnose", "Scaling, flux, period and metric diagnostics");
    diagnose->add_option("spec", diag_args.spec, "Graph spec file")->required();
    diagnose->add_option("--tau-sweep", diag_args.taus, "Tau values")->delimiter(',');
    diagnose->add_option("--scale", diag_args.scale, "Fraction of the admissible caps for the seeded (d, zeta)");
    diagnose->add_option("--out", diag_args.out, "Report path (default stdout)");

    JacobiArgs jac_args;
    auto* jacobi = app.add_subcommand("jacobi", "Linearized operator spectra and decay");
    jacobi->add_option("spec", jac_args.spec, "Graph spec file")->required();
    jacobi->add_option("--tau", jac_args.tau, "Tau (default from the spec)");
    jacobi->add_option("--region", jac_args.region, "transition | standard:<n> | central:<vertex id>");
    jacobi->add_option("--modes", jac_args.modes, "Fourier mode cutoff M");
    jacobi->add_option("--out", jac_args.out, "Report path (default stdout)");

    std::string gen_family, gen_out;
    int gen_param = 0;
    double gen_tau = 0.0;
    auto* generate = app.add_subcommand("generate", "Write the spec of an example graph family");
    generate->add_option("family", gen_family, "star | triangle_genus1 | double_triangle_genus2 | tetra_chain | dodecahedral_22ray")
        ->required();
    generate->add_option("--param", gen_param, "Family parameter (ray or vertex count)");
    generate->add_option("--tau", gen_tau, "tau written to params");
    generate->add_option("--out", gen_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate)
            return cmd_validate(validate_spec, validate_eps);
        if (*build)
            return cmd_build(build_args);
        if (*diagnose)
            return cmd_diagnose(diag_args);
        if (*jacobi)
            return cmd_jacobi(jac_args);
        if (*generate)
            return cmd_generate(gen_family, gen_param, gen_out, gen_tau);
    } catch (const SpecParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.kind()) {
        case ErrorKind::Validation:
            return 1;
        case ErrorKind::Numerical:
            return 2;
        case ErrorKind::IO:
            return 3;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
