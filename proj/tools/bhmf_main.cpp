// Command-line front end: thermodynamics of the long-range-hopping
// Bose-Hubbard model from the single-site variational pressure formula.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 domain error.

#include <complex>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bhmf/bhmf.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitDomain = 3;

std::optional<int> parse_cutoff(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
        size_t pos = 0;
        const int value = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw CLI::ValidationError("--cutoff expects a positive integer or 'auto', got '" + text + "'");
    }
}

void print_solution(const bhmf::VariationalSolution& sol) {
    std::printf("pressure = %.12g\n", sol.pressure);
    std::printf("r_star = %.12g\n", sol.r_star);
    std::printf("density = %.12g\n", sol.density);
    std::printf("n2_mean = %.12g\n", sol.number_sq_mean);
    std::printf("condensate_fraction = %.12g\n", sol.condensate_fraction);
    std::printf("gap_residual = %.12g\n", sol.gap_residual);
    std::printf("degenerate_branch = %d\n", sol.degenerate_branch ? 1 : 0);
    if (sol.degenerate_branch) std::printf("competing_r = %.12g\n", sol.competing_r);
}

std::vector<double> linear_grid(double lo, double hi, int count) {
    std::vector<double> grid;
    grid.reserve(count);
    for (int i = 0; i < count; ++i)
        grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return grid;
}

// Table writer sharing the sweep module's formatting and temp-file contract.
void write_table(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::fputs(body.c_str(), stdout);
        return;
    }
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw bhmf::numerical_error("cannot open '" + tmp + "' for writing");
    const bool ok = std::fputs(body.c_str(), f) >= 0;
    std::fclose(f);
    if (!ok) throw bhmf::numerical_error("write to '" + tmp + "' failed");
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw bhmf::numerical_error("cannot move output into place at '" + path + "': " + ec.message());
}

void emit_phase_points(const std::vector<bhmf::PhasePoint>& points, const std::string& out_path,
                       bhmf::OutputFormat format) {
    std::vector<bhmf::SweepRecord> records;
    records.reserve(points.size());
    for (const bhmf::PhasePoint& pt : points)
        records.push_back({pt.beta, pt.mu, pt.lambda, pt.solution});
    bhmf::SweepSpec spec;
    spec.out_path = out_path;
    spec.format = format;
    bhmf::emit(records, spec);
}

int run(int argc, char** argv) {
    CLI::App app{"Long-range-hopping Bose-Hubbard thermodynamics"};
    app.require_subcommand(1);

    double beta = 1.0, mu = 0.0, lambda = 0.0;
    std::string cutoff_text = "auto";
    std::string out_path;
    std::string format_text = "csv";
    int threads = 0;

    auto add_model_flags = [&](CLI::App* cmd, bool need_mu) {
        cmd->add_option("--beta", beta, "inverse temperature")->required();
        if (need_mu) cmd->add_option("--mu", mu, "chemical potential")->required();
        cmd->add_option("--lambda", lambda, "on-site repulsion")->required();
        cmd->add_option("--cutoff", cutoff_text, "occupation cutoff or 'auto'")->capture_default_str();
    };

    // pressure
    CLI::App* cmd_pressure = app.add_subcommand("pressure", "solve the variational problem at one point");
    add_model_flags(cmd_pressure, true);

    // sweep
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sweep with CSV/JSON output");
    std::vector<std::string> axis_specs;
    bool have_beta = false, have_mu = false, have_lambda = false;
    cmd_sweep->add_option("--axis", axis_specs, "axis as name:start:stop:count (name in beta|mu|lambda)");
    cmd_sweep->add_option("--beta", beta, "fixed inverse temperature")->each([&](const std::string&) {
        have_beta = true;
    });
    cmd_sweep->add_option("--mu", mu, "fixed chemical potential")->each([&](const std::string&) {
        have_mu = true;
    });
    cmd_sweep->add_option("--lambda", lambda, "fixed on-site repulsion")->each([&](const std::string&) {
        have_lambda = true;
    });
    cmd_sweep->add_option("--cutoff", cutoff_text, "occupation cutoff or 'auto'")->capture_default_str();
    cmd_sweep->add_option("--out", out_path, "output path")->required();
    cmd_sweep->add_option("--format", format_text, "csv or json")->capture_default_str();
    cmd_sweep->add_option("--threads", threads, "worker count (0 = all cores)")->capture_default_str();

    // rate
    CLI::App* cmd_rate = app.add_subcommand("rate", "rate function table on an x grid");
    add_model_flags(cmd_rate, true);
    double x_max = 2.0;
    int x_count = 41;
    cmd_rate->add_option("--x-max", x_max, "largest grid x")->capture_default_str();
    cmd_rate->add_option("--x-count", x_count, "number of grid points")->capture_default_str();
    cmd_rate->add_option("--out", out_path, "output path (stdout when omitted)");

    // phase-boundary
    CLI::App* cmd_boundary = app.add_subcommand("phase-boundary", "critical beta at fixed density");
    double rho = 1.0, beta_min = 0.5, beta_max = 500.0;
    cmd_boundary->add_option("--lambda", lambda, "on-site repulsion")->required();
    cmd_boundary->add_option("--rho", rho, "density")->required();
    cmd_boundary->add_option("--beta-min", beta_min, "bracket lower end")->capture_default_str();
    cmd_boundary->add_option("--beta-max", beta_max, "bracket upper end")->capture_default_str();

    // isotherm / condensate
    double rho_min = 0.1, rho_max = 3.0;
    int rho_count = 30;
    auto add_density_grid = [&](CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "on-site repulsion")->required();
        cmd->add_option("--beta", beta, "inverse temperature")->required();
        cmd->add_option("--rho-min", rho_min, "smallest density")->capture_default_str();
        cmd->add_option("--rho-max", rho_max, "largest density")->capture_default_str();
        cmd->add_option("--rho-count", rho_count, "grid size")->capture_default_str();
        cmd->add_option("--out", out_path, "output path")->required();
        cmd->add_option("--format", format_text, "csv or json")->capture_default_str();
    };
    CLI::App* cmd_isotherm = app.add_subcommand("isotherm", "pressure along a density grid");
    add_density_grid(cmd_isotherm);
    CLI::App* cmd_condensate = app.add_subcommand("condensate", "condensate fraction along a density grid");
    add_density_grid(cmd_condensate);

    // lambda-critical
    CLI::App* cmd_lambda_c = app.add_subcommand("lambda-critical", "critical coupling at integer density");
    int k = 1;
    double beta_large = 200.0;
    cmd_lambda_c->add_option("--k", k, "integer density")->required();
    cmd_lambda_c->add_option("--beta", beta_large, "low-temperature proxy beta")->capture_default_str();

    // oracle-compare
    CLI::App* cmd_oracle = app.add_subcommand("oracle-compare", "finite-size pressures vs variational value");
    int site_cutoff = 3;
    std::vector<int> v_list{2, 3, 4, 5};
    add_model_flags(cmd_oracle, true);
    cmd_oracle->add_option("--site-cutoff", site_cutoff, "per-site occupation cutoff")->capture_default_str();
    cmd_oracle->add_option("--v-list", v_list, "site counts")->delimiter(',')->capture_default_str();

    // entropy-check
    CLI::App* cmd_entropy = app.add_subcommand("entropy-check", "residual of the relative-entropy identity");
    double nu_re = 0.5, nu_im = 0.0;
    add_model_flags(cmd_entropy, true);
    cmd_entropy->add_option("--nu", nu_re, "perturbation strength (real part)")->capture_default_str();
    cmd_entropy->add_option("--nu-im", nu_im, "perturbation strength (imaginary part)")->capture_default_str();

    // growth-exponent
    CLI::App* cmd_growth = app.add_subcommand("growth-exponent", "fitted large-field exponent of p~");
    double nu_min = 20.0, nu_max = 200.0;
    int n_points = 8;
    add_model_flags(cmd_growth, true);
    cmd_growth->add_option("--nu-min", nu_min, "fit window lower end")->capture_default_str();
    cmd_growth->add_option("--nu-max", nu_max, "fit window upper end")->capture_default_str();
    cmd_growth->add_option("--points", n_points, "geometric grid size")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    const std::optional<int> cutoff = parse_cutoff(cutoff_text);
    bhmf::ModelParams params{beta, mu, lambda, cutoff};

    if (app.got_subcommand(cmd_pressure)) {
        print_solution(bhmf::solve(params));
    } else if (app.got_subcommand(cmd_sweep)) {
        bhmf::SweepSpec spec;
        for (const std::string& text : axis_specs) {
            bhmf::SweepAxis axis;
            char name[16];
            if (std::sscanf(text.c_str(), "%15[a-z]:%lf:%lf:%d", name, &axis.start, &axis.stop,
                            &axis.count) != 4)
                throw bhmf::domain_error("bad --axis '" + text + "', expected name:start:stop:count");
            axis.name = name;
            spec.axes.push_back(axis);
        }
        auto fixed_or_axis = [&](const std::string& name, bool have) {
            for (const auto& axis : spec.axes)
                if (axis.name == name) return;
            if (!have) throw bhmf::domain_error("parameter '" + name + "' is neither fixed nor an axis");
        };
        fixed_or_axis("beta", have_beta);
        fixed_or_axis("mu", have_mu);
        fixed_or_axis("lambda", have_lambda);
        spec.fixed = params;
        spec.out_path = out_path;
        if (format_text == "csv")
            spec.format = bhmf::OutputFormat::csv;
        else if (format_text == "json")
            spec.format = bhmf::OutputFormat::json;
        else
            throw bhmf::domain_error("unknown format '" + format_text + "'");
        spec.threads = threads;
        bhmf::emit(bhmf::run_sweep(spec), spec);
    } else if (app.got_subcommand(cmd_rate)) {
        if (x_count < 2 || !(x_max > 0.0)) throw bhmf::domain_error("rate: need x_max > 0 and x_count >= 2");
        const bhmf::RateFunctionTable table = bhmf::rate_function(params, linear_grid(0.0, x_max, x_count));
        std::string body = "x,rate,r_argmax\n";
        for (size_t i = 0; i < table.x_grid.size(); ++i) {
            body += bhmf::format_double(table.x_grid[i]);
            body += ',';
            body += bhmf::format_double(table.i_values[i]);
            body += ',';
            body += bhmf::format_double(table.r_argmax[i]);
            body += '\n';
        }
        write_table(out_path, body);
    } else if (app.got_subcommand(cmd_boundary)) {
        std::printf("critical_beta = %.12g\n", bhmf::critical_beta(lambda, rho, beta_min, beta_max));
    } else if (app.got_subcommand(cmd_isotherm) || app.got_subcommand(cmd_condensate)) {
        if (rho_count < 1) throw bhmf::domain_error("density grid needs at least one point");
        const auto grid = linear_grid(rho_min, rho_max, rho_count);
        const auto points = app.got_subcommand(cmd_isotherm) ? bhmf::isotherm(lambda, beta, grid)
                                                             : bhmf::condensate_curve(lambda, beta, grid);
        bhmf::OutputFormat format = bhmf::OutputFormat::csv;
        if (format_text == "json")
            format = bhmf::OutputFormat::json;
        else if (format_text != "csv")
            throw bhmf::domain_error("unknown format '" + format_text + "'");
        emit_phase_points(points, out_path, format);
    } else if (app.got_subcommand(cmd_lambda_c)) {
        std::printf("lambda_critical = %.12g\n", bhmf::lambda_critical(k, beta_large));
    } else if (app.got_subcommand(cmd_oracle)) {
        const auto rows = bhmf::convergence_report(beta, mu, lambda, site_cutoff, v_list);
        bhmf::ModelParams matched = params;
        matched.cutoff = site_cutoff;
        std::printf("p_variational = %.12g\n", bhmf::solve(matched).pressure);
        for (const auto& row : rows)
            std::printf("V = %d  p_V = %.12g  deviation = %.12g\n", row.sites, row.pressure, row.deviation);
    } else if (app.got_subcommand(cmd_entropy)) {
        const double residual = bhmf::entropy_identity_residual(params, {nu_re, nu_im});
        std::printf("entropy_identity_residual = %.12g\n", residual);
    } else if (app.got_subcommand(cmd_growth)) {
        std::printf("growth_exponent = %.12g\n", bhmf::growth_exponent(params, nu_min, nu_max, n_points));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bhmf::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const bhmf::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
