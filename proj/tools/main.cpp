#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "minsurf/errors.hpp"

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("minsurf");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("MINSURF_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void emit(const minsurf::cli::Json& report, const std::string& path) {
    const std::string text = report.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw minsurf::IoError("cannot write report to " + path);
    os << text;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace minsurf::cli;
    setup_logging();

    CLI::App app{"Riemann minimal examples: construction, verification and export"};
    app.require_subcommand(1);
    RunConfig cfg;
    double sigma = 0.0, lambda = 0.0;
    std::string grid = "40x60";
    std::vector<std::string> tols;

    auto add_shape = [&](CLI::App* sub) {
        auto* s = sub->add_option("--sigma", sigma, "curve parameter sigma > 0");
        auto* l = sub->add_option("--lambda", lambda, "Riemann parameter lambda");
        s->excludes(l);
        l->excludes(s);
        sub->add_option("--seed", cfg.seed, "seed for randomized samples");
        sub->add_option("--tol", tols, "threshold override name=value (repeatable)");
        sub->add_option("--json", cfg.json_path, "write the JSON report here");
    };
    auto add_mesh = [&](CLI::App* sub) {
        sub->add_option("--e", cfg.e, "end truncation radius in (0,1)");
        sub->add_option("--grid", grid, "polar grid NRxNT");
        sub->add_option("--copies", cfg.copies, "translated copies");
        sub->add_option("--warp", cfg.warp, "angular warp exponent");
    };

    auto* gen = app.add_subcommand("gen", "sample, extend and export a surface");
    add_shape(gen);
    add_mesh(gen);
    gen->add_option("-o", cfg.out_dir, "output directory");
    gen->add_option("--format", cfg.format, "obj|ply|both")->check(CLI::IsMember({"obj", "ply", "both"}));

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    add_shape(verify);
    add_mesh(verify);

    auto* kdv = app.add_subcommand("kdv", "KdV hierarchy and algebro-geometric test");
    add_shape(kdv);
    kdv->add_option("--print-p", cfg.print_p, "print P_0 .. P_N");
    kdv->add_option("--n", cfg.n, "hierarchy level for the stationarity fit");
    kdv->add_option("--samples", cfg.samples, "number of curve samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (sub->count("--sigma")) cfg.sigma = sigma;
    if (sub->count("--lambda")) cfg.lambda = lambda;

    try {
        if (sub != kdv) std::tie(cfg.nr, cfg.nt) = parse_grid(grid);
        for (const auto& t : tols) cfg.tolerances.insert(parse_tolerance(t));
        Json report;
        if (sub == gen) {
            report = cmd_generate(cfg);
        } else if (sub == verify) {
            report = cmd_verify(cfg);
        } else {
            report = cmd_kdv(cfg, std::cout);
            if (report.is_null()) return 0;
        }
        emit(report, cfg.json_path);
        if (sub == verify && !report_passed(report)) return 1;
        if (!report_passed(report)) return 3;
        return 0;
    } catch (const minsurf::ConfigError& e) {
        spdlog::error("{}", e.what());
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const minsurf::Error& e) {
        spdlog::error("{}", e.what());
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
