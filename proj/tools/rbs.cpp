// rbs: design, verify and simulate radial backstepping boundary control from a JSON config.

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "rbs/combinatorics.hpp"
#include "rbs/config.hpp"
#include "rbs/kernel/bounds.hpp"
#include "rbs/kernel/io.hpp"
#include "rbs/kernel/operators.hpp"
#include "rbs/kernel/solver.hpp"
#include "rbs/simulator.hpp"
#include "rbs/special_functions.hpp"
#include "rbs/verify.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int {
    ok = 0,
    check_failed = 1,
    config_error = 2,
    max_iter = 3,
    quadrature = 4,
    simulation = 5,
    io = 6,
};

struct Globals {
    std::string config;
    std::string out;
    unsigned threads = 1;
    std::optional<double> tol;
};

void log(const std::string& msg) { std::cerr << "[rbs] " << msg << '\n'; }

rbs::ExperimentConfig load(const Globals& g)
{
    if (g.config.empty()) {
        throw rbs::ConfigError({"--config is required for this subcommand"});
    }
    rbs::ExperimentConfig cfg = rbs::parse_config(g.config);
    if (g.tol) {
        if (!(*g.tol > 0.0)) {
            throw rbs::ConfigError({"--tol must be positive"});
        }
        cfg.tol = *g.tol;
    }
    return cfg;
}

fs::path out_dir(const Globals& g, const rbs::ExperimentConfig* cfg)
{
    if (!g.out.empty()) {
        return g.out;
    }
    return cfg ? fs::path(cfg->output_directory) : fs::path(rbs::defaults::out_dir);
}

rbs::SolverOptions solver_options(const rbs::ExperimentConfig& cfg, rbs::KernelVariant v, unsigned threads)
{
    return {cfg.tol, cfg.max_iter, v, threads};
}

std::string fmt(double v, int precision = 6)
{
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

int run_kernel(const Globals& g)
{
    const auto cfg = load(g);
    const auto profile = cfg.profile();
    const rbs::TriangleGrid grid(cfg.N_kernel, cfg.R);
    const fs::path dir = out_dir(g, &cfg);
    for (auto v : {rbs::KernelVariant::direct, rbs::KernelVariant::inverse}) {
        log(std::string("solving ") + rbs::to_string(v) + " kernel, N=" + std::to_string(cfg.N_kernel));
        const rbs::KernelOperators ops(grid, profile, v, g.threads);
        const auto table = rbs::solve_kernel(profile, ops, solver_options(cfg, v, g.threads));
        const double res = rbs::residual(table, ops, profile);
        const std::string stem = std::string("kernel_") + rbs::to_string(v);
        rbs::write_kernel_csv(table, dir / (stem + ".csv"));
        rbs::write_json(rbs::kernel_sidecar(table, profile, res), dir / (stem + ".json"));
        std::cout << rbs::to_string(v) << ": iterations=" << table.iterations_used << " residual=" << fmt(res)
                  << " sup|G|=" << fmt(table.G.sup_norm()) << '\n';
    }
    log("wrote kernels to " + dir.string());
    return ok;
}

int run_verify(const Globals& g)
{
    const auto cfg = load(g);
    const auto profile = cfg.profile();
    const rbs::TriangleGrid grid(cfg.N_kernel, cfg.R);
    std::vector<rbs::CheckResult> results;
    std::optional<rbs::KernelTable> direct;
    std::optional<rbs::KernelTable> inverse;
    for (auto v : {rbs::KernelVariant::direct, rbs::KernelVariant::inverse}) {
        log(std::string("solving ") + rbs::to_string(v) + " kernel");
        const rbs::KernelOperators ops(grid, profile, v, g.threads);
        auto table = rbs::solve_kernel(profile, ops, solver_options(cfg, v, g.threads));
        if (profile.is_constant()) {
            results.push_back(rbs::check_oracle(table, profile));
        }
        results.push_back(rbs::check_boundary_conditions(table, profile));
        results.push_back(rbs::check_residual(table, ops, profile));
        if (v == rbs::KernelVariant::direct) {
            results.push_back(rbs::check_bound_domination(table, profile));
            direct = std::move(table);
        } else {
            inverse = std::move(table);
        }
    }
    results.push_back(rbs::check_roundtrip(*direct, *inverse));
    log("checking majorant identities");
    results.push_back(rbs::check_majorant_identity(profile.lambda_bar(), cfg.R, g.threads));

    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(36) << r.name << r.detail << '\n';
        all = all && r.pass;
    }
    return all ? ok : check_failed;
}

int run_simulate(const Globals& g)
{
    const auto cfg = load(g);
    const auto profile = cfg.profile();
    const rbs::RadialGrid rgrid(cfg.M_sim, cfg.R);
    const fs::path dir = out_dir(g, &cfg);
    log("solving direct kernel, N=" + std::to_string(cfg.N_kernel));
    const auto kernel = rbs::solve_kernel(profile, rbs::TriangleGrid(cfg.N_kernel, cfg.R),
                                          solver_options(cfg, rbs::KernelVariant::direct, g.threads));
    const auto gain = rbs::feedback_gain_vector(kernel, rgrid);
    const auto u0 = cfg.initial_condition();
    rbs::SimOptions opt;
    opt.snapshot_stride = cfg.snapshot_stride;

    const double target = profile.epsilon() * std::pow(rbs::j0_first_zero() / cfg.R, 2);
    for (const bool closed : {false, true}) {
        const std::string label = closed ? "closed" : "open";
        log("simulating " + label + " loop, M=" + std::to_string(cfg.M_sim) + " dt=" + fmt(cfg.dt) +
            " horizon=" + fmt(cfg.horizon));
        const auto state = rbs::simulate(profile, rgrid, closed ? gain : std::vector<double>{}, u0, cfg.horizon,
                                         cfg.dt, opt);
        rbs::write_trajectory_csv(state, dir / ("trajectory_" + label + ".csv"));
        if (cfg.snapshot_stride > 0) {
            rbs::write_snapshot_csv(state, rgrid, dir / ("snapshots_" + label + ".csv"));
        }
        const auto& first = state.norm_history.front();
        const auto& last = state.norm_history.back();
        std::cout << label << ": norm_disk(0)=" << fmt(first.disk) << " norm_disk(T)=" << fmt(last.disk);
        try {
            const auto fit = rbs::fit_decay(state.norm_history);
            std::cout << " c2=" << fmt(fit.c2) << " r2=" << fmt(fit.r_squared) << " window=[" << fmt(fit.t_start)
                      << ',' << fmt(fit.t_end) << ']';
        } catch (const rbs::SimulationError& e) {
            std::cout << " c2=n/a";
            log(label + " loop decay fit: " + e.what());
        }
        std::cout << '\n';
    }
    std::cout << "target rate eps*j01^2/R^2=" << fmt(target) << '\n';
    log("wrote trajectories to " + dir.string());
    return ok;
}

int run_catalan(const Globals& g, std::size_t rows)
{
    if (rows < 1) {
        throw rbs::ConfigError({"--rows must be >= 1"});
    }
    const auto tri = rbs::build_triangle(rows);
    std::size_t width = 1;
    for (std::size_t j = 1; j <= rows; ++j) {
        width = std::max(width, tri.at(rows, j).str().size());
    }
    for (std::size_t i = 1; i <= rows; ++i) {
        for (std::size_t j = 1; j <= i; ++j) {
            std::cout << (j > 1 ? " " : "") << std::setw(static_cast<int>(width)) << tri.at(i, j).str();
        }
        std::cout << '\n';
    }
    const fs::path dir = out_dir(g, nullptr);
    {
        const fs::path path = dir / "catalan.csv";
        auto out = rbs::detail::open_for_write(path);
        out << "i,j,C_ij\n";
        for (std::size_t i = 1; i <= rows; ++i) {
            for (std::size_t j = 1; j <= i; ++j) {
                out << i << ',' << j << ',' << tri.at(i, j).str() << '\n';
            }
        }
        rbs::detail::check_written(out, path);
    }

    bool recurrence = true;
    bool diagonal = true;
    bool columns = true;
    bool row_sums = true;
    for (std::size_t i = 1; i <= rows; ++i) {
        diagonal = diagonal && tri.at(i, i) == 1;
        for (std::size_t j = 1; j <= i; ++j) {
            const rbs::BigInt below = (i >= 2) ? tri.at(i - 1, j - 1) : rbs::BigInt{0};
            const rbs::BigInt right = tri.at(i, j + 1);
            if (!(i == 1 && j == 1)) {
                recurrence = recurrence && tri.at(i, j) == below + right;
            }
            if (i >= 2) {
                const auto [lhs, rhs] = rbs::row_sum_identity(tri, i, j);
                row_sums = row_sums && lhs == rhs;
            }
        }
        if (i >= 2) {
            columns = columns && tri.at(i, 1) == tri.at(i, 2);
        }
    }
    bool genfun = true;
    for (unsigned j = 1; j <= 30; ++j) {
        genfun = genfun && rbs::genfun_at_quarter(j) == rbs::DyadicRational::pow2(2 - static_cast<int>(j));
    }
    const std::vector<std::pair<const char*, bool>> checks{
        {"recurrence C(i,j) = C(i-1,j-1) + C(i,j+1)", recurrence},
        {"diagonal C(i,i) = 1", diagonal},
        {"row sums C(i,j) = sum_k C(i-1,k)", row_sums},
        {"column 1 equals column 2", columns},
        {"f_j(1/4) = 2^(2-j), j = 1..30", genfun},
    };
    bool all = true;
    for (const auto& [name, pass] : checks) {
        std::cout << (pass ? "PASS" : "FAIL") << "  " << name << '\n';
        all = all && pass;
    }
    log("wrote " + (dir / "catalan.csv").string());
    return all ? ok : check_failed;
}

int run_bessel(const Globals& g, double xmax, std::size_t points)
{
    if (!(xmax > 0.0) || xmax > 30.0 || points < 2) {
        throw rbs::ConfigError({"--xmax must lie in (0, 30] and --points must be >= 2"});
    }
    const fs::path path = out_dir(g, nullptr) / "bessel_i1.csv";
    auto out = rbs::detail::open_for_write(path);
    out << "x,I1,I1_over_x\n";
    for (std::size_t k = 0; k < points; ++k) {
        const double x = xmax * static_cast<double>(k) / static_cast<double>(points - 1);
        out << x << ',' << rbs::bessel_i1(x) << ',' << rbs::bessel_i1_ratio(x) << '\n';
    }
    rbs::detail::check_written(out, path);
    log("wrote " + path.string());
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Radial backstepping boundary control: kernel design, verification and simulation"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Output directory (default: outputs.directory from the config, else out)");
    app.add_option("--threads", g.threads, "Worker threads for the kernel solver")
        ->default_val(1)
        ->check(CLI::Range(1u, 1024u));
    double tol_override = 0.0;
    auto* tol_opt = app.add_option("--tol", tol_override,
                                   "Override solver tolerance (default " + fmt(rbs::defaults::tol) + ")");

    const std::string defaults_note = "Config defaults: grid.N_kernel=" + std::to_string(rbs::defaults::n_kernel) +
                                      " grid.M_sim=" + std::to_string(rbs::defaults::m_sim) +
                                      " solver.tol=" + fmt(rbs::defaults::tol) +
                                      " solver.max_iter=" + std::to_string(rbs::defaults::max_iter) +
                                      " sim.dt=" + fmt(rbs::defaults::dt) + " sim.horizon=" + fmt(rbs::defaults::horizon) +
                                      " sim.u0=polynomial [1,0,-1] outputs.directory=" + rbs::defaults::out_dir +
                                      " outputs.snapshot_stride=0";
    app.footer(defaults_note + "\nExit codes: 0 ok, 1 check failed, 2 config/usage, 3 series did not converge, "
                               "4 quadrature failure, 5 simulation failure, 6 I/O failure");

    auto* kernel = app.add_subcommand("kernel", "Solve direct and inverse kernels and export CSV + JSON sidecar");
    auto* verify = app.add_subcommand("verify", "Run the kernel self-check suite (PASS/FAIL table)");
    auto* simulate = app.add_subcommand("simulate", "Open- and closed-loop simulation with decay fits");
    auto* catalan = app.add_subcommand("catalan", "Print Catalan's Triangle and check its identities");
    std::size_t rows = 10;
    catalan->add_option("--rows", rows, "Number of rows")->default_val(10);
    auto* bessel = app.add_subcommand("bessel", "Tabulate I1 on [0, xmax]");
    double xmax = 10.0;
    std::size_t points = 101;
    bessel->add_option("--xmax", xmax, "Upper end of the table")->default_val(10.0);
    bessel->add_option("--points", points, "Number of samples")->default_val(101);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }
    if (tol_opt->count() > 0) {
        g.tol = tol_override;
    }

    try {
        if (*kernel) {
            return run_kernel(g);
        }
        if (*verify) {
            return run_verify(g);
        }
        if (*simulate) {
            return run_simulate(g);
        }
        if (*catalan) {
            return run_catalan(g, rows);
        }
        if (*bessel) {
            return run_bessel(g, xmax, points);
        }
    } catch (const rbs::ConfigError& e) {
        log(e.what());
        return config_error;
    } catch (const rbs::MaxIterExceeded& e) {
        log(std::string(e.what()) + " after " + std::to_string(e.partial().iterations_used) +
            " terms; raise solver.max_iter or refine the grid");
        return max_iter;
    } catch (const rbs::QuadratureFailure& e) {
        log(std::string("quadrature failure: ") + e.what());
        return quadrature;
    } catch (const rbs::SimulationError& e) {
        log(std::string("simulation failure: ") + e.what());
        return simulation;
    } catch (const rbs::IoError& e) {
        log(std::string("I/O failure: ") + e.what());
        return io;
    } catch (const std::invalid_argument& e) {
        log(std::string("invalid input: ") + e.what());
        return config_error;
    } catch (const std::exception& e) {
        log(std::string("error: ") + e.what());
        return check_failed;
    }
    return ok;
}
