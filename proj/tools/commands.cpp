#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <spdlog/spdlog.h>

#include "minsurf/classical.hpp"
#include "minsurf/curve.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/shiffkdv.hpp"

namespace minsurf::cli {

namespace {

constexpr const char* kVersion = "1.0.0";

class Report {
public:
    explicit Report(const RunConfig& cfg) : cfg_(cfg) {}

    // Records a check; pass means value <= threshold (after overrides).
    void check(const std::string& name, double value, double threshold) {
        if (auto it = cfg_.tolerances.find(name); it != cfg_.tolerances.end()) threshold = it->second;
        const bool pass = std::isfinite(value) && value <= threshold;
        if (!pass) spdlog::warn("check {} failed: {} > {}", name, value, threshold);
        Json c;
        c["name"] = name;
        c["value"] = std::isfinite(value) ? Json(value) : Json("nan");
        c["threshold"] = threshold;
        c["pass"] = pass;
        checks_.push_back(std::move(c));
    }

    // Runs fn, recording the time under `name`.
    template <class F>
    void timed(const std::string& name, F&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    Json& data() { return data_; }

    Json finish() const {
        Json out;
        out["schema"] = 1;
        out["command"] = cfg_.command;
        for (auto it = data_.begin(); it != data_.end(); ++it) out[it.key()] = it.value();
        out["checks"] = checks_;
        bool pass = true;
        for (const auto& c : checks_) pass = pass && c["pass"].get<bool>();
        out["pass"] = pass;
        Json env;
        env["version"] = kVersion;
        env["seed"] = cfg_.seed;
        Json stamp;
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        stamp["utc"] = buf;
        stamp["timings"] = timings_;
        env["timestamp"] = stamp;
        out["environment"] = env;
        return out;
    }

private:
    const RunConfig& cfg_;
    Json data_ = Json::object();
    Json checks_ = Json::array();
    Json timings_ = Json::object();
};

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

void shape_data(Report& rep, const RunConfig& cfg, double sigma) {
    rep.data()["sigma"] = sigma;
    if (cfg.lambda) rep.data()["lambda"] = *cfg.lambda;
    else rep.data()["lambda"] = lambda_of_sigma(sigma);
}

void validate_mesh_options(const RunConfig& cfg) {
    if (!(cfg.e > 0.0 && cfg.e < 1.0)) throw ConfigError("--e must lie in (0, 1)");
    if (cfg.nr < 2 || cfg.nt < 2) throw ConfigError("--grid needs NR, NT >= 2");
    if (cfg.copies < 0) throw ConfigError("--copies must be >= 0");
    if (!(cfg.warp > 0.0)) throw ConfigError("--warp must be positive");
}

FoliationData random_foliation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    FoliationData d;
    d.r = 1.0 + 0.5 * U(rng);
    d.rp = 0.5 * U(rng);
    d.rpp = 0.5 * U(rng);
    d.kappa = 0.8 + 0.5 * U(rng);
    d.kappap = 0.5 * U(rng);
    d.tau = U(rng);
    d.alpha = U(rng);
    d.beta = U(rng);
    d.delta = U(rng);
    d.alphap = U(rng);
    d.betap = U(rng);
    d.deltap = U(rng);
    return d;
}

double max_period_gamma1(const CurveParams& c) {
    const FormTriple p = period(c, make_loop(c, LoopKind::Gamma1));
    double m = 0.0;
    for (const auto& v : p) m = std::max(m, std::abs(v.real()));
    return m;
}

// Circle fits on seeded generic slices plus the classification at line heights.
void circle_checks(Report& rep, const TriMesh& mesh, const ExtensionData& ext, unsigned seed) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : mesh.vertices) {
        lo = std::min(lo, v[2]);
        hi = std::max(hi, v[2]);
    }
    const double period = ext.t0[2];
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(lo, hi);
    double worst = 0.0;
    int fitted = 0;
    for (int attempt = 0; fitted < 10 && attempt < 200; ++attempt) {
        const double H = U(rng);
        // skip heights near the horizontal lines (multiples of t0_3)
        const double k = std::round(H / period);
        if (std::abs(H - k * period) < 1e-2 * period) continue;
        const auto pts = slice(mesh, H);
        if (pts.size() < 5) continue;
        const CircleFit f = level_circle_fit(pts);
        ++fitted;
        worst = std::max(worst, f.kind == CircleFit::Kind::Circle ? f.residual / f.radius
                                                                 : std::numeric_limits<double>::infinity());
    }
    if (fitted < 10) worst = std::numeric_limits<double>::infinity();
    rep.check("circle_fit", worst, 1e-5);

    int misclassified = 0, tested = 0;
    const double center = 0.5 * (lo + hi);
    for (int k = -3; k <= 3; ++k) {
        const double H = std::round(center / period) * period + k * period;
        if (H < lo - 1e-9 || H > hi + 1e-9) continue;
        const auto pts = slice(mesh, H, 1e-8);
        if (pts.size() < 5) continue;
        ++tested;
        try {
            if (level_circle_fit(pts, 1e-8).kind != CircleFit::Kind::Line) ++misclassified;
        } catch (const Degenerate&) {
            ++misclassified;
        }
    }
    rep.data()["line_slices"] = tested;
    rep.check("line_slices_misclassified", tested > 0 ? misclassified : std::numeric_limits<double>::infinity(), 0.0);
}

struct MinimalityResult {
    double mean_curvature = 0.0;
    double conformality = 0.0;
};

// 20x20 grid on the (t, v) chart with q = q1 + t^2; positions are built from
// local increments so quadrature noise does not enter the difference quotients.
double classical_minimality(double lambda) {
    const RiemannParams p = RiemannParams::make(lambda);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double t0 = 0.2 + 1.6 * i / 19.0;
        const double q0 = p.q1 + t0 * t0;
        for (int j = 0; j < 20; ++j) {
            const double v0 = 2.0 * std::numbers::pi * (j + 0.5) / 20.0;
            auto chart = [&](double du, double dv) {
                const double t = t0 + du;
                const double q = p.q1 + t * t;
                const auto inc = q == q0 ? std::array<double, 2>{0.0, 0.0} : profile_increment(p, q0, q);
                const double v = v0 + dv;
                return Vec3(inc[0] + std::sqrt(q) * std::cos(v), std::sqrt(q) * std::sin(v), inc[1]);
            };
            worst = std::max(worst, surface_diagnostics(chart, 1e-3).mean_curvature);
        }
    }
    return worst;
}

MinimalityResult weierstrass_minimality(double sigma) {
    const Immersion imm(sigma);
    const DomainMap map{sigma, 0.1};
    MinimalityResult out;
    for (int i = 0; i < 20; ++i) {
        const double r = 0.1 + 0.9 * (i + 0.5) / 20.0;
        for (int j = 0; j < 20; ++j) {
            const double t = (j + 0.5) / 20.0;
            const cplx z0 = map(std::polar(r, std::numbers::pi * t));
            const Immersed base = imm.at(z0);
            auto chart = [&](double du, double dv) {
                if (du == 0.0 && dv == 0.0) return base.position;
                return imm.step(base, z0 + cplx(du, dv)).position;
            };
            out.mean_curvature = std::max(out.mean_curvature, surface_diagnostics(chart, 1e-3).mean_curvature);
            out.conformality = std::max(out.conformality, surface_diagnostics(chart, 1e-4).conformality);
        }
    }
    return out;
}

void write_meshes(const TriMesh& mesh, const std::filesystem::path& stem, const std::string& format, Json& files) {
    if (format == "obj" || format == "both") {
        const auto path = stem.string() + ".obj";
        files[std::filesystem::path(path).filename().string()] = export_obj(mesh, path);
    }
    if (format == "ply" || format == "both") {
        const auto path = stem.string() + ".ply";
        files[std::filesystem::path(path).filename().string()] = export_ply(mesh, path);
    }
}

}  // namespace

std::pair<int, int> parse_grid(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw ConfigError("grid must look like NRxNT, got '" + text + "'");
    try {
        std::size_t used1 = 0, used2 = 0;
        const std::string a = text.substr(0, x), b = text.substr(x + 1);
        const int nr = std::stoi(a, &used1), nt = std::stoi(b, &used2);
        if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument("trailing characters");
        return {nr, nt};
    } catch (const std::logic_error&) {
        throw ConfigError("grid must look like NRxNT, got '" + text + "'");
    }
}

std::pair<std::string, double> parse_tolerance(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("tolerance must look like name=value, got '" + text + "'");
    double v = 0.0;
    try {
        std::size_t used = 0;
        const std::string num = text.substr(eq + 1);
        v = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::logic_error&) {
        throw ConfigError("tolerance value is not a number in '" + text + "'");
    }
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerance override must be positive: '" + text + "'");
    return {text.substr(0, eq), v};
}

double resolve_sigma(const RunConfig& cfg) {
    if (cfg.sigma.has_value() == cfg.lambda.has_value()) throw ConfigError("give exactly one of --sigma and --lambda");
    if (cfg.sigma) {
        if (!(*cfg.sigma > 0.0) || !std::isfinite(*cfg.sigma)) throw ConfigError("--sigma must be positive");
        return *cfg.sigma;
    }
    if (!std::isfinite(*cfg.lambda)) throw ConfigError("--lambda must be finite");
    return sigma_of_lambda(*cfg.lambda);
}

bool report_passed(const Json& report) { return !report.contains("pass") || report["pass"].get<bool>(); }

Json cmd_generate(const RunConfig& cfg) {
    const double sigma = resolve_sigma(cfg);
    validate_mesh_options(cfg);
    Report rep(cfg);
    shape_data(rep, cfg, sigma);
    rep.data()["e"] = cfg.e;
    rep.data()["grid"] = Json::array({cfg.nr, cfg.nt});
    rep.data()["copies"] = cfg.copies;

    TriMesh fundamental, extended;
    ExtensionData ext;
    SampleOptions opt;
    opt.warp = cfg.warp;
    rep.timed("sample", [&] { fundamental = sample_fundamental(sigma, cfg.e, cfg.nr, cfg.nt, opt); });
    rep.timed("extend", [&] {
        ext = extension_ops(sigma);
        extended = extend(fundamental, ext.ops, cfg.copies);
    });

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create " + cfg.out_dir + ": " + ec.message());
    Json files = Json::object();
    rep.timed("export", [&] {
        const std::filesystem::path dir(cfg.out_dir);
        write_meshes(fundamental, dir / "fundamental", cfg.format, files);
        write_meshes(extended, dir / "extended", cfg.format, files);
    });

    rep.data()["fundamental_vertices"] = fundamental.vertices.size();
    rep.data()["fundamental_faces"] = fundamental.faces.size();
    rep.data()["extended_vertices"] = extended.vertices.size();
    rep.data()["extended_faces"] = extended.faces.size();
    rep.data()["slab_height"] = ext.t0[2];
    rep.data()["neck_point"] = vec_json(ext.c);
    rep.data()["translation"] = vec_json(2.0 * ext.t0);
    rep.data()["files"] = files;

    std::size_t bad = 0;
    for (const auto& v : extended.vertices) bad += v.allFinite() ? 0 : 1;
    rep.check("nonfinite_vertices", static_cast<double>(bad), 0.0);
    const std::size_t expected = fundamental.vertices.size() * 8 * static_cast<std::size_t>(cfg.copies + 1);
    rep.check("extended_count_defect",
              std::abs(static_cast<double>(extended.vertices.size()) - static_cast<double>(expected)), 0.0);

    Json report = rep.finish();
    const auto path = std::filesystem::path(cfg.out_dir) / "report.json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    os << report.dump(2) << "\n";
    return report;
}

Json cmd_verify(const RunConfig& cfg) {
    const double sigma = resolve_sigma(cfg);
    validate_mesh_options(cfg);
    const double lambda = cfg.lambda ? *cfg.lambda : lambda_of_sigma(sigma);
    Report rep(cfg);
    shape_data(rep, cfg, sigma);
    const CurveParams curve(sigma);

    rep.timed("periods", [&] {
        rep.check("period_gamma1", max_period_gamma1(curve), 1e-7);
        const FormTriple p2 = period(curve, make_loop(curve, LoopKind::Gamma2));
        rep.check("period_gamma2_x2", std::abs(p2[1].real()), 1e-7);
        rep.data()["flux_gamma2"] = Json::array({p2[0].imag(), p2[1].imag(), p2[2].imag()});
        rep.check("end_flux", flux(curve, make_loop(curve, LoopKind::EndLoop)).norm(), 1e-7);
    });

    rep.timed("symmetries", [&] {
        const auto pts = random_points(curve, 50, cfg.seed);
        rep.check("symmetry_S1", verify_symmetry_action(curve, Symmetry::S1, pts), 1e-9);
        rep.check("symmetry_S2", verify_symmetry_action(curve, Symmetry::S2, pts), 1e-9);
        rep.check("symmetry_S3", verify_symmetry_action(curve, Symmetry::S3, pts), 1e-9);
        double ode = 0.0;
        for (const auto& p : pts) ode = std::max(ode, gauss_ode_residual(curve, p));
        rep.check("gauss_ode", ode, 1e-9);
    });

    rep.timed("shiffman", [&] {
        double worst = 0.0;
        for (const auto& p : random_points(curve, 1000, cfg.seed))
            worst = std::max(worst, std::abs(shiffman(Jet{gauss_jet(curve, p, 3)})));
        rep.check("shiffman", worst, 1e-9);
    });

    rep.timed("circle_fit", [&] {
        SampleOptions opt;
        opt.warp = cfg.warp;
        const TriMesh fundamental = sample_fundamental(sigma, cfg.e, cfg.nr, cfg.nt, opt);
        const ExtensionData ext = extension_ops(sigma);
        circle_checks(rep, extend(fundamental, ext.ops, cfg.copies), ext, cfg.seed);
    });

    rep.timed("registration", [&] {
        const Registration reg = register_constructions(lambda);
        rep.data()["registration_scale"] = reg.scale;
        rep.check("registration", reg.max_relative_error, 1e-3);
    });

    rep.timed("enneper", [&] {
        std::mt19937_64 rng(cfg.seed);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) worst = std::max(worst, enneper_fourier_check(random_foliation(rng)).residual);
        FoliationData canonical;
        canonical.delta = 1.0;
        worst = std::max(worst, enneper_fourier_check(canonical).residual);
        rep.check("enneper", worst, 1e-4);
    });

    rep.timed("minimality", [&] {
        rep.check("minimality_classical", classical_minimality(lambda), 1e-3);
        const MinimalityResult w = weierstrass_minimality(sigma);
        rep.check("minimality_weierstrass", w.mean_curvature, 1e-3);
        rep.check("conformality_weierstrass", w.conformality, 1e-5);
    });

    rep.timed("gauss_limit", [&] {
        double defect = std::numeric_limits<double>::infinity();
        try {
            const GaussLimit g = gauss_limit(RiemannParams::make(lambda));
            defect = std::max(std::abs(g.numeric - g.closed_form), std::abs(g.numeric - g.minus_sqrt_sigma));
            rep.data()["gauss_limit"] = g.numeric;
        } catch (const ConvergenceError& e) {
            spdlog::warn("{}", e.what());
        }
        rep.check("gauss_limit", defect, 1e-4);
    });

    if (cfg.lambda && *cfg.lambda == 0.0) {
        rep.timed("catenoid", [&] {
            double worst = 0.0;
            for (double lc : {0.5, 1.0, 2.0})
                for (int k = 0; k < 20; ++k) {
                    const double q = 1.0 / lc + 0.25 * k * k / lc;
                    worst = std::max(worst, std::abs(catenoid_height(lc, q) - catenoid_height_quadrature(lc, q)));
                }
            rep.check("catenoid", worst, 1e-8);
        });
    }
    return rep.finish();
}

Json cmd_kdv(const RunConfig& cfg, std::ostream& text) {
    if (cfg.print_p > kHierarchyMax) throw ConfigError("--print-p is limited to " + std::to_string(kHierarchyMax));
    for (int k = 0; k <= cfg.print_p; ++k) text << "P" << k << " = " << hierarchy_P(k).to_string() << "\n";
    const bool fit_requested = cfg.sigma || cfg.lambda;
    if (!fit_requested) {
        if (cfg.print_p < 0) throw ConfigError("kdv needs --print-p or one of --sigma/--lambda");
        return Json();
    }
    const double sigma = resolve_sigma(cfg);
    if (cfg.n < 1 || cfg.n + 1 > kHierarchyMax)
        throw ConfigError("--n must lie in [1, " + std::to_string(kHierarchyMax - 1) + "]");
    if (cfg.samples < cfg.n) throw ConfigError("--samples must be at least --n");

    Report rep(cfg);
    shape_data(rep, cfg, sigma);
    rep.data()["n"] = cfg.n;
    rep.data()["samples"] = cfg.samples;
    const CurveParams curve(sigma);
    AlgebroGeometricFit fit;
    rep.timed("fit", [&] {
        const auto pts = random_points(curve, static_cast<std::size_t>(cfg.samples), cfg.seed);
        fit = algebro_geometric_residual(curve, cfg.n, pts);
    });
    Json coeffs = Json::array();
    for (const auto& c : fit.coefficients) coeffs.push_back(Json::array({c.real(), c.imag()}));
    rep.data()["coefficients"] = coeffs;
    rep.data()["residual"] = fit.residual;
    rep.data()["rank_deficient"] = fit.rank_deficient;
    return rep.finish();
}

}  // namespace minsurf::cli
