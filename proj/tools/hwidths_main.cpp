#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hwidths/hwidths.hpp"

namespace {

using namespace hwidths;

struct CommonOpts {
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 42;
    Index probes = 500;
    std::vector<std::string> tol_overrides;
};

Tolerances apply_overrides(const std::vector<std::string>& overrides) {
    Tolerances tol = default_tolerances();
    const std::map<std::string, double Tolerances::*> fields = {
        {"schur_residual", &Tolerances::schur_residual},
        {"svd_residual", &Tolerances::svd_residual},
        {"eig_residual", &Tolerances::eig_residual},
        {"symmetry_check", &Tolerances::symmetry_check},
        {"expm_accuracy", &Tolerances::expm_accuracy},
        {"solve_residual", &Tolerances::solve_residual},
        {"condition_limit", &Tolerances::condition_limit},
        {"lyap_residual", &Tolerances::lyap_residual},
        {"psd_clip", &Tolerances::psd_clip},
        {"stability_margin", &Tolerances::stability_margin},
        {"zero_sigma_rel", &Tolerances::zero_sigma_rel},
        {"schmidt_residual", &Tolerances::schmidt_residual},
        {"quadrature_rel", &Tolerances::quadrature_rel},
        {"discnorm_rel", &Tolerances::discnorm_rel},
        {"width_slack_rel", &Tolerances::width_slack_rel},
        {"attain_rel", &Tolerances::attain_rel},
        {"angle_tol", &Tolerances::angle_tol},
        {"cluster_rel", &Tolerances::cluster_rel},
        {"minimality_rel", &Tolerances::minimality_rel},
        {"ohna_rel", &Tolerances::ohna_rel},
    };
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw BadParameter("--tol expects name=value, got '" + ov + "'");
        const std::string name = ov.substr(0, eq);
        const auto it = fields.find(name);
        if (it == fields.end())
            throw BadParameter("--tol: unknown tolerance '" + name + "'");
        tol.*(it->second) = std::stod(ov.substr(eq + 1));
    }
    return tol;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write file: " + out_path);
    out << text;
}

std::string width_report_text(const WidthReport& rep, const std::string& format) {
    if (format == "csv") {
        std::string text = csv_row({"n", "error", "sigma_next", "gap", "probe_min",
                                    "probes", "provenance"});
        text += csv_row({std::to_string(rep.n), fmt17(rep.error), fmt17(rep.sigma_next),
                         fmt17(rep.gap), fmt17(rep.probe_min), std::to_string(rep.probes),
                         rep.provenance});
        return text;
    }
    json j{{"n", rep.n},
           {"error", rep.error},
           {"sigma_next", rep.sigma_next},
           {"gap", rep.gap},
           {"probe_min", rep.probe_min},
           {"probes", rep.probes},
           {"seed", rep.seed},
           {"provenance", rep.provenance}};
    return j.dump(2) + "\n";
}

int cmd_hsv(const std::string& path, const CommonOpts& opts) {
    const Tolerances tol = apply_overrides(opts.tol_overrides);
    const HankelSpectrum spec = hankel_spectrum(load_system(path), tol);
    if (opts.format == "csv") {
        std::string text = csv_row({"i", "sigma"});
        for (Index i = 0; i < spec.sigma.size(); ++i)
            text += csv_row({std::to_string(i + 1), fmt17(spec.sigma[i])});
        emit(text, opts.out);
    } else {
        json j;
        j["sigma"] = json::array();
        for (Index i = 0; i < spec.sigma.size(); ++i)
            j["sigma"].push_back(spec.sigma[i]);
        emit(j.dump(2) + "\n", opts.out);
    }
    return 0;
}

int cmd_width(const std::string& path, Index order, bool input_side, const CommonOpts& opts) {
    const Tolerances tol = apply_overrides(opts.tol_overrides);
    const HankelSpectrum spec = hankel_spectrum(load_system(path), tol);
    const WidthReport rep = input_side
                                ? active_subspace(spec, order, opts.probes, opts.seed, tol)
                                : nwidth(spec, order, opts.probes, opts.seed, tol);
    emit(width_report_text(rep, opts.format), opts.out);
    return 0;
}

int cmd_reduce(const std::string& path, Index order, const std::string& method,
               const CommonOpts& opts) {
    const Tolerances tol = apply_overrides(opts.tol_overrides);
    const LtiSystem sys = load_system(path);
    ReducedModel red;
    if (method == "bt")
        red = balanced_truncation(sys, order, tol);
    else if (method == "ohna")
        red = optimal_hankel(sys, order, tol);
    else
        throw BadParameter("reduce: method must be bt or ohna");
    red.achieved_error = hankel_error(sys, red, tol);
    const HankelSpectrum spec = hankel_spectrum(sys, tol);
    json j{{"method", red.method},
           {"order", red.order},
           {"requested_order", red.requested_order},
           {"order_shifted", red.order_shifted},
           {"hankel_error", red.achieved_error},
           {"sigma_next", sigma_ref(spec, red.order)},
           {"system", system_to_json(red.system)}};
    emit(j.dump(2) + "\n", opts.out);
    return 0;
}

std::vector<Index> parse_grid_counts(const std::string& spec) {
    std::vector<Index> counts;
    std::string token;
    std::istringstream in(spec);
    while (std::getline(in, token, ','))
        counts.push_back(static_cast<Index>(std::stoll(token)));
    if (counts.empty())
        throw BadParameter("--grid expects comma-separated per-axis counts");
    return counts;
}

int cmd_sweep(const std::string& path, const std::string& grid_spec, Index order,
              const CommonOpts& opts) {
    const Tolerances tol = apply_overrides(opts.tol_overrides);
    const ParametricLtiSystem psys = load_parametric(path);
    const ParameterGrid grid = tensor_grid(psys, parse_grid_counts(grid_spec));
    const SweepResult res = sweep(psys, grid, tol);
    for (size_t k = 0; k < res.points.size(); ++k) {
        if (!res.stable[k])
            std::cerr << "warning: grid point " << k
                      << " is unstable and was excluded from the sweep\n";
    }

    if (opts.format == "csv") {
        std::vector<std::string> header;
        for (const auto& r : psys.box)
            header.push_back("p_" + r.name);
        for (Index i = 1; i <= res.state_dim; ++i)
            header.push_back("sigma_" + std::to_string(i));
        std::string text = csv_row(header);
        for (size_t k = 0; k < res.points.size(); ++k) {
            if (!res.stable[k])
                continue;
            std::vector<std::string> cells;
            for (Index a = 0; a < res.points[k].size(); ++a)
                cells.push_back(fmt17(res.points[k][a]));
            for (Index i = 0; i < res.state_dim; ++i)
                cells.push_back(fmt17(res.sigma_table[k][i]));
            text += csv_row(cells);
        }
        std::vector<std::string> lb{"lower_bound(n=" + std::to_string(order) + ")",
                                    fmt17(res.lower_bound(order))};
        const Vector& argmax = res.points[res.argmax_index(order)];
        for (Index a = 0; a < argmax.size(); ++a)
            lb.push_back(fmt17(argmax[a]));
        text += csv_row(lb);
        emit(text, opts.out);
    } else {
        json points = json::array();
        for (size_t k = 0; k < res.points.size(); ++k) {
            json pj;
            pj["p"] = json::array();
            for (Index a = 0; a < res.points[k].size(); ++a)
                pj["p"].push_back(res.points[k][a]);
            pj["stable"] = static_cast<bool>(res.stable[k]);
            pj["sigma"] = json::array();
            for (Index i = 0; i < res.sigma_table[k].size(); ++i)
                pj["sigma"].push_back(res.sigma_table[k][i]);
            points.push_back(std::move(pj));
        }
        json j{{"points", std::move(points)},
               {"order", order},
               {"lower_bound", res.lower_bound(order)}};
        json am = json::array();
        const Vector& argmax = res.points[res.argmax_index(order)];
        for (Index a = 0; a < argmax.size(); ++a)
            am.push_back(argmax[a]);
        j["argmax"] = std::move(am);
        emit(j.dump(2) + "\n", opts.out);
    }
    return 0;
}

int cmd_generate(const std::string& model, Index order, Index inputs, Index outputs,
                 const std::string& out_path, const CommonOpts& opts) {
    const GeneratedSystem gen = generate(model, order, opts.seed, inputs, outputs);
    json j;
    if (std::holds_alternative<LtiSystem>(gen))
        j = system_to_json(std::get<LtiSystem>(gen));
    else
        j = parametric_to_json(std::get<ParametricLtiSystem>(gen));
    if (out_path.empty())
        emit(j.dump(2) + "\n", "");
    else
        save_json(j, out_path);
    return 0;
}

int cmd_verify(const std::string& system_path, const std::string& corpus_dir,
               const std::string& report_path, const CommonOpts& opts) {
    const Tolerances tol = apply_overrides(opts.tol_overrides);
    std::vector<verify::NamedSystem> systems;
    if (!system_path.empty()) {
        LtiSystem sys = load_system(system_path);
        require_stable(sys, "verify", tol);
        systems.push_back({std::filesystem::path(system_path).filename().string(),
                           std::move(sys)});
    } else if (!corpus_dir.empty()) {
        std::vector<std::string> files;
        for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
            if (entry.path().extension() == ".json")
                files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw ParseError("verify: no .json systems in " + corpus_dir);
        for (const auto& f : files)
            systems.push_back({std::filesystem::path(f).filename().string(), load_system(f)});
    } else {
        for (auto& named : verify::default_corpus())
            systems.push_back(std::move(named));
    }

    std::vector<verify::SystemReport> reports;
    reports.reserve(systems.size());
    for (const auto& named : systems)
        reports.push_back(verify::run_battery(named.name, named.sys, opts.probes, opts.seed, tol));
    const json report = verify::report_to_json(reports, opts.seed, opts.probes);
    emit(report.dump(2) + "\n", report_path.empty() ? opts.out : report_path);
    return report["summary"]["all_pass"].get<bool>() ? 0 : 1;
}

json error_json(const char* type, const std::string& message) {
    return json{{"error", json{{"type", type}, {"message", message}}}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hankel singular values, Kolmogorov n-widths, and optimal "
                 "reduced models for stable LTI systems"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string system_path, parametric_path, corpus_dir, report_path, out_path;
    std::string method = "ohna", model = "random_stable", grid_spec = "11";
    Index order = 1, gen_order = 4, inputs = 1, outputs = 1;

    auto add_common = [&](CLI::App* sub, bool with_format = true) {
        sub->add_option("--out", opts.out, "Output file (default stdout)");
        if (with_format)
            sub->add_option("--format", opts.format, "json or csv")
                ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", opts.seed, "Random seed (default 42)");
        sub->add_option("--probes", opts.probes, "Random probe count");
        sub->add_option("--tol", opts.tol_overrides, "Tolerance override name=value")
            ->take_all();
    };

    auto* hsv = app.add_subcommand("hsv", "Hankel singular values of a system");
    hsv->add_option("--system", system_path, "System JSON file")->required();
    add_common(hsv);

    auto* nw = app.add_subcommand("nwidth", "Kolmogorov n-width of the Hankel image");
    nw->add_option("--system", system_path, "System JSON file")->required();
    nw->add_option("--order", order, "Subspace dimension n")->required();
    add_common(nw);

    auto* act = app.add_subcommand("active", "Active input subspace error");
    act->add_option("--system", system_path, "System JSON file")->required();
    act->add_option("--order", order, "Subspace dimension n")->required();
    add_common(act);

    auto* red = app.add_subcommand("reduce", "Reduced-order model");
    red->add_option("--system", system_path, "System JSON file")->required();
    red->add_option("--order", order, "Target order n")->required();
    red->add_option("--method", method, "bt or ohna")->check(CLI::IsMember({"bt", "ohna"}));
    add_common(red, /*with_format=*/false);

    auto* sw = app.add_subcommand("sweep", "Parameter sweep of Hankel singular values");
    sw->add_option("--parametric", parametric_path, "Parametric system JSON file")->required();
    sw->add_option("--grid", grid_spec, "Per-axis grid counts, comma separated");
    sw->add_option("--order", order, "n for the lower bound line");
    add_common(sw);

    auto* gen = app.add_subcommand("generate", "Benchmark system generator");
    gen->add_option("--model", model, "random_stable | rc_ladder | heat1d | diag");
    gen->add_option("--order", gen_order, "State dimension");
    gen->add_option("--inputs", inputs, "Input count (random_stable)");
    gen->add_option("--outputs", outputs, "Output count (random_stable)");
    gen->add_option("--out", out_path, "Output file (default stdout)");
    gen->add_option("--seed", opts.seed, "Random seed (default 42)");

    auto* ver = app.add_subcommand("verify", "Run the invariant suites");
    ver->add_option("--system", system_path, "Single system JSON file");
    ver->add_option("--corpus", corpus_dir, "Directory of system JSON files");
    ver->add_option("--report", report_path, "Report file (default stdout)");
    add_common(ver, /*with_format=*/false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (hsv->parsed())
            return cmd_hsv(system_path, opts);
        if (nw->parsed())
            return cmd_width(system_path, order, false, opts);
        if (act->parsed())
            return cmd_width(system_path, order, true, opts);
        if (red->parsed())
            return cmd_reduce(system_path, order, method, opts);
        if (sw->parsed())
            return cmd_sweep(parametric_path, grid_spec, order, opts);
        if (gen->parsed())
            return cmd_generate(model, gen_order, inputs, outputs, out_path, opts);
        if (ver->parsed())
            return cmd_verify(system_path, corpus_dir, report_path, opts);
    } catch (const hwidths::ParseError& e) {
        std::cerr << error_json("ParseError", e.what()).dump(2) << "\n";
        return 3;
    } catch (const hwidths::NumericalError& e) {
        std::cerr << error_json("NumericalError", e.what()).dump(2) << "\n";
        return 4;
    } catch (const hwidths::Unstable& e) {
        std::cerr << error_json("Unstable", e.what()).dump(2) << "\n";
        return 2;
    } catch (const hwidths::DomainError& e) {
        std::cerr << error_json("DomainError", e.what()).dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << error_json("Error", e.what()).dump(2) << "\n";
        return 2;
    }
    return 0;
}
