// Acceptance gate: one PASS/FAIL line per criterion, each with a time limit.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "minsurf/classical.hpp"
#include "minsurf/curve.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/shiffkdv.hpp"

using namespace minsurf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome anchors() {
    double err = std::abs(q_min(0.0) - 1.0);
    err = std::max(err, std::abs(q_min(1.0) - (std::sqrt(5.0) - 1) / 2));
    err = std::max(err, std::abs(sigma_of_lambda(0.0) - 1.0));
    err = std::max(err, std::abs(sigma_of_lambda(1.0) - (3 + std::sqrt(5.0)) / 2));
    for (int k = 0; k < 20; ++k) {
        const double l = -3.0 + 6.0 * k / 19.0, q = q_min(l);
        err = std::max(err, std::abs(sigma_of_lambda(l) * q * q - 1.0));
    }
    return {err < 1e-12, "max error " + fmt("%.2e", err)};
}

Outcome catenoid() {
    double err = 0.0;
    for (double l : {0.5, 1.0, 2.0})
        for (int k = 0; k < 20; ++k) {
            const double q = 1.0 / l + 0.25 * k * k / l;
            err = std::max(err, std::abs(catenoid_height(l, q) - catenoid_height_quadrature(l, q)));
        }
    return {err < 1e-8, "max deviation " + fmt("%.2e", err)};
}

Outcome radius_ode() {
    double ode = 0.0, first = 0.0;
    for (double l : {0.5, 1.0, 2.0}) {
        const RiemannParams p = RiemannParams::make(l);
        auto q = [&](double z) { return q_at_height(p, z); };
        for (int k = 1; k <= 8; ++k) {
            const double z = 0.1 * k * p.zeta, h1 = 1e-4, h2 = 1e-3;
            const double q0 = q(z);
            const double qp = (-q(z + 2 * h1) + 8 * q(z + h1) - 8 * q(z - h1) + q(z - 2 * h1)) / (12 * h1);
            const double qpp = (-q(z + 2 * h2) + 16 * q(z + h2) - 30 * q0 + 16 * q(z - h2) - q(z - 2 * h2)) / (12 * h2 * h2);
            ode = std::max(ode, std::abs(2 * q0 * q0 * q0 + qp * qp + q0 * (2 - qpp)));
            first = std::max(first, std::abs(qp * qp / (q0 * q0) - 4 * (q0 - 1 / q0) - 4 * l));
        }
    }
    return {ode < 1e-4 && first < 1e-6, "radius ODE " + fmt("%.2e", ode) + ", first integral " + fmt("%.2e", first)};
}

Outcome enneper() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
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
        worst = std::max(worst, enneper_fourier_check(d).residual);
    }
    FoliationData c;
    c.delta = 1.0;
    const auto a = enneper_coefficients(c);
    const auto chk = enneper_fourier_check(c);
    const std::array<double, 7> expected = {0, 0, 0, 0, -3, 0, 0};
    bool canonical = chk.residual < 1e-4;
    for (int k = 0; k < 7; ++k) canonical = canonical && a[k] == expected[k] && std::abs(chk.extracted[k] - expected[k]) < 1e-4;
    return {worst < 1e-4 && canonical, "random max residual " + fmt("%.2e", worst) + ", canonical a5 " + fmt("%.6f", chk.extracted[4])};
}

Outcome periods() {
    double g1 = 0.0, g2 = 0.0, end = 0.0;
    for (double s : {0.5, 2.0, 5.0}) {
        const CurveParams c(s);
        for (const auto& v : period(c, make_loop(c, LoopKind::Gamma1))) g1 = std::max(g1, std::abs(v.real()));
        g2 = std::max(g2, std::abs(period(c, make_loop(c, LoopKind::Gamma2))[1].real()));
        end = std::max(end, flux(c, make_loop(c, LoopKind::EndLoop)).cwiseAbs().maxCoeff());
    }
    return {g1 < 1e-7 && g2 < 1e-7 && end < 1e-7,
            "gamma1 " + fmt("%.2e", g1) + ", gamma2 x2 " + fmt("%.2e", g2) + ", end flux " + fmt("%.2e", end)};
}

Outcome symmetries() {
    double worst = 0.0;
    for (double s : {0.5, 2.0, 5.0}) {
        const CurveParams c(s);
        const auto pts = random_points(c, 50, 7);
        for (Symmetry w : {Symmetry::S1, Symmetry::S2, Symmetry::S3}) worst = std::max(worst, verify_symmetry_action(c, w, pts));
    }
    return {worst < 1e-9, "max residual " + fmt("%.2e", worst)};
}

Outcome shiffman_vanishing() {
    double worst = 0.0;
    for (double s : {0.5, 1.0, 2.618034, 5.0}) {
        const CurveParams c(s);
        for (const auto& p : random_points(c, 1000, 7)) worst = std::max(worst, std::abs(shiffman(Jet{gauss_jet(c, p, 3)})));
    }
    return {worst < 1e-9, "max |S| " + fmt("%.2e", worst)};
}

Outcome minimality() {
    double hc = 0.0, hw = 0.0, conf = 0.0;
    for (double l : {0.5, 1.0, 2.0}) {
        const RiemannParams p = RiemannParams::make(l);
        for (int i = 0; i < 20; ++i) {
            const double t0 = 0.2 + 1.6 * i / 19.0, q0 = p.q1 + t0 * t0;
            for (int j = 0; j < 20; ++j) {
                const double v0 = 2 * std::numbers::pi * (j + 0.5) / 20;
                auto chart = [&](double du, double dv) {
                    const double q = p.q1 + (t0 + du) * (t0 + du);
                    const auto inc = q == q0 ? std::array<double, 2>{0, 0} : profile_increment(p, q0, q);
                    return Vec3(inc[0] + std::sqrt(q) * std::cos(v0 + dv), std::sqrt(q) * std::sin(v0 + dv), inc[1]);
                };
                hc = std::max(hc, surface_diagnostics(chart, 1e-3).mean_curvature);
            }
        }
        const double s = sigma_of_lambda(l);
        const Immersion imm(s);
        const DomainMap map{s, 0.1};
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) {
                const cplx z0 = map(std::polar(0.1 + 0.9 * (i + 0.5) / 20, std::numbers::pi * (j + 0.5) / 20));
                const Immersed b = imm.at(z0);
                auto chart = [&](double du, double dv) {
                    return du == 0.0 && dv == 0.0 ? b.position : imm.step(b, z0 + cplx(du, dv)).position;
                };
                hw = std::max(hw, surface_diagnostics(chart, 1e-3).mean_curvature);
                conf = std::max(conf, surface_diagnostics(chart, 1e-4).conformality);
            }
    }
    return {hc < 1e-3 && hw < 1e-3 && conf < 1e-5, "|H| classical " + fmt("%.2e", hc) + ", Weierstrass " + fmt("%.2e", hw) +
                                                       "; conformality defect " + fmt("%.2e", conf)};
}

Outcome registration() {
    const Registration r = register_constructions(1.0);
    return {r.max_relative_error < 1e-3,
            "max relative error " + fmt("%.2e", r.max_relative_error) + ", scale " + fmt("%.9f", r.scale)};
}

Outcome circle_foliation() {
    const ExtensionData ext = extension_ops(2.0);
    const TriMesh mesh = extend(sample_fundamental(2.0, 0.1, 40, 60), ext.ops, 1);
    double lo = 1e300, hi = -1e300;
    for (const auto& v : mesh.vertices) {
        lo = std::min(lo, v[2]);
        hi = std::max(hi, v[2]);
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(lo, hi);
    const double period = ext.t0[2];
    double worst = 0.0;
    int fitted = 0;
    bool circles = true;
    while (fitted < 10) {
        const double H = U(rng);
        if (std::abs(H - std::round(H / period) * period) < 1e-2 * period) continue;
        const auto pts = slice(mesh, H);
        if (pts.size() < 5) continue;
        const CircleFit f = level_circle_fit(pts);
        circles = circles && f.kind == CircleFit::Kind::Circle;
        worst = std::max(worst, f.residual / f.radius);
        ++fitted;
    }
    int lines = 0, tested = 0;
    for (int k = -1; k <= 3; ++k) {
        const double H = k * period;
        if (H < lo - 1e-9 || H > hi + 1e-9) continue;
        ++tested;
        if (level_circle_fit(slice(mesh, H, 1e-8), 1e-8).kind == CircleFit::Kind::Line) ++lines;
    }
    return {circles && worst < 1e-5 && tested > 0 && lines == tested,
            "max residual/radius " + fmt("%.2e", worst) + ", line slices " + std::to_string(lines) + "/" + std::to_string(tested)};
}

Outcome kdv() {
    bool printed = hierarchy_P(1).to_string() == "u" && hierarchy_P(2).to_string() == "u'' + 3 u^2" &&
                   hierarchy_P(3).to_string() == "u'''' + 10 u u'' + 5 u'^2 + 10 u^3";
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto jet = [&](int order) {
        Jet j;
        for (int k = 0; k <= order; ++k) j.values.emplace_back(U(rng), U(rng));
        return j;
    };
    const DiffPoly u = DiffPoly::u(0), u1 = DiffPoly::u(1);
    double rec = 0.0;
    for (int n = 0; n <= 5; ++n) {
        const DiffPoly& p = hierarchy_P(n);
        const DiffPoly dp = p.derivative();
        const DiffPoly op = dp.derivative().derivative() + u * dp * Rational(4) + u1 * p * Rational(2);
        const DiffPoly next = hierarchy_P(n + 1).derivative();
        for (int k = 0; k < 20; ++k) {
            const Jet j = jet(2 * n + 4);
            rec = std::max(rec, std::abs(op.evaluate(j) - next.evaluate(j)) / (1 + std::abs(next.evaluate(j))));
        }
    }
    double miura_defect = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Jet x = jet(5);
        miura_defect = std::max(miura_defect, std::abs(miura_rate(x) - kMiuraTimeScale * kdv_flow(miura(x))));
    }
    return {printed && rec < 1e-10 && miura_defect < 1e-10,
            std::string(printed ? "P1..P3 match" : "printed forms differ") + ", recurrence " + fmt("%.2e", rec) +
                ", Miura " + fmt("%.2e", miura_defect)};
}

Outcome algebro() {
    const CurveParams c(2.0);
    const auto a = algebro_geometric_residual(c, 1, random_points(c, 60, 7));
    const auto b = algebro_geometric_residual(c, 1, random_points(c, 120, 7));
    const double change = std::abs(a.residual - b.residual);
    const double coef = std::abs(a.coefficients[0] - b.coefficients[0]) / std::abs(a.coefficients[0]);
    return {!a.rank_deficient && change < 1e-6 && coef < 1e-6,
            "residual " + fmt("%.3e", a.residual) + " (baseline), change on doubling " + fmt("%.2e", change) +
                ", coefficient change " + fmt("%.2e", coef)};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MINSURF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string read_all(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Outcome pipeline() {
    const fs::path a = fs::temp_directory_path() / "minsurf_acceptance_a", b = fs::temp_directory_path() / "minsurf_acceptance_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const std::string args = "gen --sigma 2 --e 0.1 --grid 40x60 --copies 1 -o ";
    if (run_cli(args + a.string()) != 0 || run_cli(args + b.string()) != 0) return {false, "gen exited nonzero"};
    const std::string fa = read_all(a / "fundamental.obj");
    std::size_t vertices = 0;
    std::istringstream is(fa);
    for (std::string line; std::getline(is, line);)
        if (line.rfind("v ", 0) == 0) ++vertices;
    const bool same = fa == read_all(b / "fundamental.obj") && read_all(a / "extended.obj") == read_all(b / "extended.obj");
    return {vertices == 2400 && same, std::to_string(vertices) + " fundamental vertices, " + (same ? "identical" : "different") + " files"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "closed-form anchors", 1, anchors},
        {2, "catenoid cross-check", 5, catenoid},
        {3, "radius ODE residuals", 10, radius_ode},
        {4, "Enneper coefficients", 10, enneper},
        {5, "period closure and end flux", 30, periods},
        {6, "symmetry residuals", 5, symmetries},
        {7, "Shiffman vanishing", 5, shiffman_vanishing},
        {8, "minimality and conformality", 60, minimality},
        {9, "cross-construction registration", 60, registration},
        {10, "circle foliation of exported mesh", 30, circle_foliation},
        {11, "KdV hierarchy and Miura", 5, kdv},
        {12, "algebro-geometric measurement", 10, algebro},
        {13, "pipeline reproduction", 120, pipeline},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs < c.limit;
        failures += pass ? 0 : 1;
        std::printf("%s %2d %-36s %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.limit);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
