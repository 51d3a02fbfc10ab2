// Command-line front end: run built-in or inline-defined PDEs on the sphere,
// emit snapshots / convergence tables, render snapshots, dump operator
// diagnostics.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spherepde/dfs.hpp"
#include "spherepde/expr.hpp"
#include "spherepde/fourier.hpp"
#include "spherepde/problems.hpp"
#include "spherepde/snapshot.hpp"
#include "spherepde/timesteppers.hpp"

namespace fs = std::filesystem;
using namespace spherepde;

namespace {

struct RunOptions {
    std::string problem;
    std::string alpha_expr;
    std::string nonlin_expr;
    std::string init_spec;
    int l = 4;
    int m = 0;
    int n = 64;
    double h = 0.01;
    std::vector<double> tspan{0.0, 1.0};
    std::string scheme = "lirk4";
    std::vector<double> snapshots;
    std::string outdir = "out";
    std::string formats = "bin";
    bool dealias = false;
    int cf_poles = 12;
    int contour_points = 32;
};

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::string token;
    std::stringstream ss(text);
    while (ss >> token) {
        std::stringstream item(token);
        std::string piece;
        while (std::getline(item, piece, ',')) {
            if (!piece.empty()) out.push_back(std::stod(piece));
        }
    }
    return out;
}

// Flat key=value configuration; command-line flags always win.
void apply_config_file(const std::string& path, const CLI::App* cmd, RunOptions& opt,
                       std::string& schemes_csv, std::vector<double>& h_list,
                       std::string& out_path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    auto overridden = [&](const std::string& flag) {
        const CLI::Option* option = cmd->get_option_no_throw(flag);
        return option != nullptr && option->count() > 0;
    };
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not key=value");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key == "problem") {
            if (!overridden("--problem")) opt.problem = value;
        } else if (key == "alpha") {
            if (!overridden("--alpha")) opt.alpha_expr = value;
        } else if (key == "nonlin") {
            if (!overridden("--nonlin")) opt.nonlin_expr = value;
        } else if (key == "init") {
            if (!overridden("--init")) opt.init_spec = value;
        } else if (key == "l") {
            if (!overridden("--l")) opt.l = std::stoi(value);
        } else if (key == "m") {
            if (!overridden("--m")) opt.m = std::stoi(value);
        } else if (key == "n") {
            if (!overridden("--n")) opt.n = std::stoi(value);
        } else if (key == "h") {
            if (!overridden("--h")) opt.h = std::stod(value);
        } else if (key == "tspan") {
            if (!overridden("--tspan")) opt.tspan = parse_number_list(value);
        } else if (key == "scheme") {
            if (!overridden("--scheme")) opt.scheme = value;
        } else if (key == "snapshots") {
            if (!overridden("--snapshots")) opt.snapshots = parse_number_list(value);
        } else if (key == "outdir") {
            if (!overridden("--outdir")) opt.outdir = value;
        } else if (key == "formats") {
            if (!overridden("--formats")) opt.formats = value;
        } else if (key == "dealias") {
            if (!overridden("--dealias")) opt.dealias = value == "1" || value == "true";
        } else if (key == "cf_poles") {
            if (!overridden("--cf-poles")) opt.cf_poles = std::stoi(value);
        } else if (key == "contour_points") {
            if (!overridden("--contour-points")) opt.contour_points = std::stoi(value);
        } else if (key == "schemes") {
            if (!overridden("--schemes")) schemes_csv = value;
        } else if (key == "h_list") {
            if (!overridden("--h-list")) h_list = parse_number_list(value);
        } else if (key == "out") {
            if (!overridden("--out")) out_path = value;
        } else {
            throw std::invalid_argument("unknown config key '" + key + "' on line " +
                                        std::to_string(line_no));
        }
    }
}

Scheme parse_scheme_or_throw(const std::string& name) {
    auto scheme = parse_scheme(name);
    if (!scheme) {
        throw std::invalid_argument("unknown scheme '" + name +
                                    "' (expected etdrk4-cf, etdrk4-eig, imex-bdf4 or lirk4)");
    }
    return *scheme;
}

SphereFunction initial_from_spec(const std::string& spec_text, int l) {
    if (spec_text.rfind("harmonic:", 0) == 0) {
        const std::string rest = spec_text.substr(9);
        const auto comma = rest.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("init spec must be harmonic:<l>,<order> or a problem name");
        }
        const int hl = std::stoi(rest.substr(0, comma));
        const int order = std::stoi(rest.substr(comma + 1));
        return SphereFunction::from_evaluator([hl, order](double la, double th) {
            return spherical_harmonic_value(hl, order, la, th);
        });
    }
    return builtin_problem(spec_text, l).initial;
}

ProblemSpec resolve_problem(const RunOptions& opt) {
    ProblemSpec problem;
    if (!opt.problem.empty()) {
        problem = builtin_problem(opt.problem, opt.l);
    } else {
        if (opt.init_spec.empty()) {
            throw std::invalid_argument("inline problems need --init (harmonic:<l>,<order> or a "
                                        "builtin name) plus --alpha/--nonlin");
        }
        problem.name = "inline";
        problem.initial = initial_from_spec(opt.init_spec, opt.l);
    }
    if (!opt.alpha_expr.empty()) {
        problem.alpha = parse_complex_constant(opt.alpha_expr);
        problem.exact_at = nullptr;
        if (problem.name != "inline") problem.name += "+alpha";
    }
    if (!opt.nonlin_expr.empty()) {
        problem.g = parse_nonlinearity(opt.nonlin_expr);
        problem.exact_at = nullptr;
        if (problem.name != "inline") problem.name += "+nonlin";
    }
    return problem;
}

std::string problem_param_string(const ProblemSpec& problem, const RunOptions& opt,
                                 const GridSpec& grid) {
    std::ostringstream os;
    os << problem.name << ";alpha=" << problem.alpha.real() << "," << problem.alpha.imag()
       << ";l=" << opt.l << ";m=" << grid.m << ";n=" << grid.n << ";nonlin=" << opt.nonlin_expr
       << ";init=" << opt.init_spec;
    return os.str();
}

int cmd_run(const RunOptions& opt) {
    const GridSpec grid{opt.m > 0 ? opt.m : opt.n, opt.n};
    grid.require_valid();
    ProblemSpec problem = resolve_problem(opt);

    SchemeConfig config;
    config.scheme = parse_scheme_or_throw(opt.scheme);
    config.h = opt.h;
    if (opt.tspan.size() != 2) throw std::invalid_argument("--tspan needs exactly two values");
    config.t0 = opt.tspan[0];
    config.t_end = opt.tspan[1];
    config.snapshot_times = opt.snapshots;
    if (config.snapshot_times.empty()) config.snapshot_times = {config.t_end};
    config.dealias = opt.dealias;
    config.cf_poles = opt.cf_poles;
    config.contour_points = opt.contour_points;

    fs::create_directories(opt.outdir);
    const IntegrationResult result = integrate(problem, config, grid);
    const uint64_t hash = fnv1a_hash(problem_param_string(problem, opt, grid));

    std::ofstream manifest(fs::path(opt.outdir) / "manifest.txt");
    manifest.precision(17);
    manifest << "problem=" << problem.name << "\n";
    manifest << "m=" << grid.m << "\nn=" << grid.n << "\n";
    manifest << "l=" << opt.l << "\n";
    manifest << "alpha_re=" << problem.alpha.real() << "\nalpha_im=" << problem.alpha.imag()
             << "\n";
    manifest << "nonlin=" << opt.nonlin_expr << "\n";
    manifest << "init=" << opt.init_spec << "\n";
    manifest << "scheme=" << scheme_name(config.scheme) << "\n";
    manifest << "h=" << config.h << "\nt0=" << config.t0 << "\nt_end=" << config.t_end << "\n";
    manifest << "cf_poles=" << config.cf_poles << "\ncontour_points=" << config.contour_points
             << "\ndealias=" << (config.dealias ? 1 : 0) << "\n";
    manifest << "problem_hash=" << hash << "\n";
    manifest << "steps=" << result.stats.steps << "\n";
    manifest << "ffts=" << result.stats.ffts << "\n";
    manifest << "block_solves=" << result.stats.block_solves << "\n";
    manifest << "eig_matvecs=" << result.stats.eig_matvecs << "\n";
    manifest << "precompute_seconds=" << result.stats.precompute_seconds << "\n";
    manifest << "stepping_seconds=" << result.stats.stepping_seconds << "\n";

    const bool want_bin = opt.formats.find("bin") != std::string::npos;
    const bool want_csv = opt.formats.find("csv") != std::string::npos;
    int index = 0;
    for (const Snapshot& snap : result.snapshots) {
        char stem[64];
        std::snprintf(stem, sizeof(stem), "snap_%03d", index);
        const CMatrix sphere_vals = restrict_to_sphere(coeffs_to_vals(snap.coeffs));
        if (want_bin) {
            SnapshotFile file;
            file.is_complex = true;
            file.m = grid.m;
            file.n = grid.n;
            file.t = snap.t;
            file.problem_hash = hash;
            file.values = sphere_vals;
            write_snapshot((fs::path(opt.outdir) / (std::string(stem) + ".bin")).string(), file);
        }
        if (want_csv) {
            std::ofstream csv(fs::path(opt.outdir) / (std::string(stem) + ".csv"));
            csv.precision(17);
            csv << "# t=" << snap.t << " rows=" << sphere_vals.rows() << " cols="
                << sphere_vals.cols() << " (re,im pairs)\n";
            for (int r = 0; r < sphere_vals.rows(); ++r) {
                for (int c = 0; c < sphere_vals.cols(); ++c) {
                    if (c) csv << ",";
                    csv << sphere_vals(r, c).real() << "," << sphere_vals(r, c).imag();
                }
                csv << "\n";
            }
        }
        manifest << "snapshot_" << index << "_t=" << snap.t << "\n";
        manifest << "snapshot_" << index << "_file=" << stem << (want_bin ? ".bin" : ".csv")
                 << "\n";
        manifest << "snapshot_" << index << "_pole_residual=" << snap.pole_res << "\n";
        manifest << "snapshot_" << index << "_symmetry_residual=" << snap.sym_res << "\n";
        ++index;
    }
    if (problem.exact_at) {
        const CoeffGrid exact = problem.exact_at(config.t_end).to_coeffs(grid);
        manifest << "exact_error_final=" << relative_error(result.final_coeffs, exact) << "\n";
    }
    std::cout << "wrote " << index << " snapshot(s) and manifest to " << opt.outdir << "\n";
    return 0;
}

int cmd_converge(const RunOptions& opt, const std::string& schemes_csv,
                 const std::vector<double>& h_list, const std::string& out_path) {
    const GridSpec grid{opt.m > 0 ? opt.m : opt.n, opt.n};
    grid.require_valid();
    ProblemSpec problem = resolve_problem(opt);
    if (opt.tspan.size() != 2) throw std::invalid_argument("--tspan needs exactly two values");

    std::vector<Scheme> schemes;
    std::stringstream ss(schemes_csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) schemes.push_back(parse_scheme_or_throw(token));
    }
    if (schemes.empty()) throw std::invalid_argument("--schemes is empty");
    if (h_list.empty()) throw std::invalid_argument("--h-list is empty");

    const ConvergenceTable table =
        convergence_study(problem, schemes, h_list, grid, opt.tspan[0], opt.tspan[1]);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        out = &file;
    }
    out->precision(12);
    *out << "scheme,h,h_over_T,E,wall_seconds,precompute_seconds\n";
    const double span = opt.tspan[1] - opt.tspan[0];
    for (const auto& row : table.rows) {
        *out << scheme_name(row.scheme) << "," << row.h << "," << row.h / span << ","
             << row.rel_error << "," << row.wall_seconds << "," << row.precompute_seconds << "\n";
    }
    for (Scheme s : schemes) {
        *out << "# slope," << scheme_name(s) << "," << table.slope(s) << "\n";
    }
    return 0;
}

int cmd_render(const std::string& input, const std::string& output, int upscale) {
    const SnapshotFile snap = read_snapshot(input);
    std::string out = output;
    if (out.empty()) out = fs::path(input).replace_extension(".ppm").string();
    render_ppm(out, snap.values, upscale);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_diagnose(int n, int m, const std::string& alpha_expr) {
    const GridSpec grid{m > 0 ? m : n, n};
    const Complex alpha = alpha_expr.empty() ? Complex(1.0, 0.0)
                                             : parse_complex_constant(alpha_expr);
    const BlockPencil pencil = assemble_laplacian(grid, alpha);
    const SpectralDiagnostics diag = spectral_diagnostics(pencil);
    std::cout.precision(12);
    std::cout << "m=" << grid.m << " n=" << grid.n << " alpha=" << alpha.real() << "+"
              << alpha.imag() << "i\n";
    std::cout << "max_abs_eig=" << diag.max_abs_eig << "\n";
    std::cout << "max_imag=" << diag.max_imag << "\n";
    std::cout << "max_real_pos=" << diag.max_real_pos << "\n";
    std::cout << "all_real=" << (diag.all_real ? 1 : 0) << "\n";
    std::cout << "all_nonpositive=" << (diag.all_nonpositive ? 1 : 0) << "\n";
    std::cout << "cond_V=" << diag.cond_V << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coefficient-space double Fourier sphere solver for stiff PDEs on the sphere"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string schemes_csv = "lirk4";
    std::vector<double> h_list;
    std::string out_path;
    std::string render_in, render_out;
    int upscale = 1;
    int diag_n = 16, diag_m = 0;
    std::string diag_alpha;

    std::string config_path;
    auto add_common = [&](CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help");  // frees -h for the time step
        cmd->add_option("--problem", opt.problem,
                        "builtin problem (allen-cahn, nls, ginzburg-landau, heat, heat-reaction, "
                        "heat-reaction-dispersive)");
        cmd->add_option("--alpha", opt.alpha_expr, "diffusion coefficient expression, e.g. 1e-4 or i");
        cmd->add_option("--nonlin", opt.nonlin_expr, "pointwise nonlinearity over u, e.g. u-u^3");
        cmd->add_option("--init", opt.init_spec, "initial condition: harmonic:<l>,<order> or a builtin name");
        cmd->add_option("--l", opt.l, "harmonic degree for the heat family");
        cmd->add_option("--m", opt.m, "latitudinal points (default: n)");
        cmd->add_option("--n", opt.n, "longitudinal points");
        cmd->add_option("--tspan", opt.tspan, "t0 and t_end")->expected(2);
        cmd->add_flag("--dealias", opt.dealias, "2/3-rule truncation of nonlinear terms");
        cmd->add_option("--cf-poles", opt.cf_poles, "CF pole count (10, 12 or 14)");
        cmd->add_option("--contour-points", opt.contour_points, "contour points for phi evaluation");
        cmd->add_option("--config", config_path, "flat key=value configuration file");
    };

    CLI::App* run = app.add_subcommand("run", "integrate a PDE and write snapshots + manifest");
    add_common(run);
    run->add_option("--h", opt.h, "time step");
    run->add_option("--scheme", opt.scheme, "etdrk4-cf | etdrk4-eig | imex-bdf4 | lirk4");
    run->add_option("--snapshots", opt.snapshots, "snapshot times (default: t_end)");
    run->add_option("--outdir", opt.outdir, "output directory");
    run->add_option("--formats", opt.formats, "comma list of bin,csv");

    CLI::App* converge = app.add_subcommand("converge", "error/time table over schemes and steps");
    add_common(converge);
    converge->add_option("--schemes", schemes_csv, "comma list of schemes");
    converge->add_option("--h-list", h_list, "time steps to sweep")->expected(-1);
    converge->add_option("--out", out_path, "CSV output path (default: stdout)");

    CLI::App* render = app.add_subcommand("render", "rasterize a snapshot to PPM");
    render->add_option("input", render_in, "snapshot file")->required();
    render->add_option("--out", render_out, "output image (default: input with .ppm)");
    render->add_option("--upscale", upscale, "bilinear upscale factor");

    CLI::App* diagnose = app.add_subcommand("diagnose", "spectral diagnostics of the Laplacian");
    diagnose->add_option("--n", diag_n, "longitudinal points");
    diagnose->add_option("--m", diag_m, "latitudinal points (default: n)");
    diagnose->add_option("--alpha", diag_alpha, "diffusion coefficient expression");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!config_path.empty()) {
                apply_config_file(config_path, run, opt, schemes_csv, h_list, out_path);
            }
            return cmd_run(opt);
        }
        if (converge->parsed()) {
            if (!config_path.empty()) {
                apply_config_file(config_path, converge, opt, schemes_csv, h_list, out_path);
            }
            return cmd_converge(opt, schemes_csv, h_list, out_path);
        }
        if (render->parsed()) return cmd_render(render_in, render_out, upscale);
        if (diagnose->parsed()) return cmd_diagnose(diag_n, diag_m, diag_alpha);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
