#include "minsurf/classical.hpp"

#include <cmath>
#include <numbers>

namespace minsurf {

namespace {

// u^3 - u + lambda u^2 = u (u - q1)(u - q2)
double q_second(const RiemannParams& p) { return -p.lambda - p.q1; }

double split_point(const RiemannParams& p) { return p.q1 + 1.0; }

double radicand(const RiemannParams& p, double u) { return u * (u - p.q1) * (u - q_second(p)); }

// z(t) with q = q1 + t^2
double height_t(const RiemannParams& p, double t, const QuadSettings& s) {
    if (t == 0.0) return 0.0;
    const double q2 = q_second(p);
    return integrate_gk<double>(
        [&](double x) {
            const double u = p.q1 + x * x;
            return 1.0 / std::sqrt(u * (u - q2));
        },
        0.0, t, s);
}

double dheight_dt(const RiemannParams& p, double t) {
    const double u = p.q1 + t * t;
    return 1.0 / std::sqrt(u * (u - q_second(p)));
}

void require_domain(const RiemannParams& p, double q) {
    if (!(q >= p.q1)) throw DomainError("q = " + std::to_string(q) + " is below q1 = " + std::to_string(p.q1));
}

}  // namespace

double q_min(double lambda) { return 0.5 * (-lambda + std::sqrt(4.0 + lambda * lambda)); }

double sigma_of_lambda(double lambda) {
    const double d = 2.0 / (std::sqrt(lambda * lambda + 4.0) - lambda);
    return d * d;
}

double lambda_of_sigma(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    const double q1 = 1.0 / std::sqrt(sigma);
    return 1.0 / q1 - q1;
}

double slab_height(double lambda, const QuadSettings& s) {
    RiemannParams p;
    p.lambda = lambda;
    p.q1 = q_min(lambda);
    const double a = split_point(p);
    const double head = height_t(p, 1.0, s);  // q1 + 1 = q1 + t^2 with t = 1
    const double tail = integrate_tail([&](double u) { return 1.0 / std::sqrt(radicand(p, u)); }, a, 1.5, s,
                                       TailMap::ReciprocalSquare);
    return head + 0.5 * tail;
}

RiemannParams RiemannParams::make(double lambda, const QuadSettings& s) {
    if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
    RiemannParams p;
    p.lambda = lambda;
    p.q1 = q_min(lambda);
    p.zeta = slab_height(lambda, s);
    return p;
}

double height(const RiemannParams& p, double q, const QuadSettings& s) {
    require_domain(p, q);
    if (q == p.q1) return 0.0;
    if (q <= split_point(p)) {
        const double q2 = q_second(p);
        return 0.5 * integrate_sqrt_singular([&](double u, double du) { return 1.0 / std::sqrt(u * du * (u - q2)); },
                                             p.q1, q, s);
    }
    const double tail = integrate_tail([&](double u) { return 1.0 / std::sqrt(radicand(p, u)); }, q, 1.5, s,
                                       TailMap::ReciprocalSquare);
    return p.zeta - 0.5 * tail;
}

double center_offset(const RiemannParams& p, double q, const QuadSettings& s) {
    require_domain(p, q);
    const double q2 = q_second(p);
    const double a = split_point(p);
    auto head = [&](double b) {
        return integrate_sqrt_singular([&](double u, double du) { return u / std::sqrt(u * du * (u - q2)); }, p.q1, b,
                                       s);
    };
    if (q == p.q1) return 0.0;
    if (q <= a) return -0.5 * head(q);
    // u = x^2 keeps the u^(-1/2) growth smooth over long ranges
    const double rest = integrate_gk<double>(
        [&](double x) {
            const double u = x * x;
            return 2.0 * x * u / std::sqrt(radicand(p, u));
        },
        std::sqrt(a), std::sqrt(q), s);
    return -0.5 * (head(a) + rest);
}

double q_at_height(const RiemannParams& p, double z, const QuadSettings& s) {
    if (!(z >= 0.0) || !(z < p.zeta)) throw DomainError("height " + std::to_string(z) + " outside [0, zeta)");
    if (z == 0.0) return p.q1;
    // z(t) is increasing and concave, so Newton from the tangent at 0 climbs
    // monotonically to the root.
    double t = z / dheight_dt(p, 0.0);
    for (int it = 0; it < 200; ++it) {
        const double dt = (height_t(p, t, s) - z) / dheight_dt(p, t);
        t -= dt;
        if (std::abs(dt) <= 1e-15 * (1.0 + t)) return p.q1 + t * t;
    }
    throw ConvergenceError("q_at_height: Newton iteration did not converge");
}

Vec3 parameterize(const RiemannParams& p, double q, double v, const QuadSettings& s) {
    const double r = std::sqrt(q);
    return Vec3(center_offset(p, q, s) + r * std::cos(v), r * std::sin(v), height(p, q, s));
}

std::array<double, 2> profile_increment(const RiemannParams& p, double q0, double q1, const QuadSettings& s) {
    if (!(q0 > p.q1) || !(q1 > p.q1)) throw DomainError("profile_increment needs q > q1");
    const double df = integrate_gk<double>([&](double u) { return -0.5 * u / std::sqrt(radicand(p, u)); }, q0, q1, s);
    const double dz = integrate_gk<double>([&](double u) { return 0.5 / std::sqrt(radicand(p, u)); }, q0, q1, s);
    return {df, dz};
}

double catenoid_height(double lambda, double q) {
    if (!(lambda > 0.0)) throw DomainError("catenoid needs lambda > 0");
    if (!(q >= 1.0 / lambda)) throw DomainError("catenoid needs q >= 1/lambda");
    return std::asinh(std::sqrt(std::max(0.0, lambda * q - 1.0))) / std::sqrt(lambda);
}

double catenoid_height_quadrature(double lambda, double q, const QuadSettings& s) {
    if (!(lambda > 0.0)) throw DomainError("catenoid needs lambda > 0");
    const double a = 1.0 / lambda;
    if (!(q >= a)) throw DomainError("catenoid needs q >= 1/lambda");
    if (q == a) return 0.0;
    // a = 0: the radicand is lambda u^2 - u = lambda u (u - 1/lambda)
    return 0.5 * integrate_sqrt_singular([&](double u, double du) { return 1.0 / std::sqrt(lambda * u * du); }, a, q,
                                         s);
}

GaussLimit gauss_limit(const RiemannParams& p) {
    const double lam = p.lambda;
    auto sample = [&](double q) {
        const double R = q * q * q - q + lam * q * q;
        const double sR = std::sqrt(R), sq = std::sqrt(q);
        const double zq = 0.5 / sR;
        // f'(q) + 1/(2 sqrt q) without cancellation
        const double fq_plus = 0.5 * (lam * q * q - q) / (sq * sR * (sR + q * sq));
        // X_q x X_v at v = 0
        const double n1 = -zq * sq, n3 = fq_plus * sq;
        const double n = std::hypot(n1, n3);
        return (n1 / n) / (1.0 - n3 / n);
    };
    GaussLimit g{};
    g.sequence = {sample(1e3), sample(1e4), sample(1e5)};
    // the approach is O(1/q): extrapolate each decade pair and require the
    // extrapolants to agree
    const double r01 = g.sequence[1] + (g.sequence[1] - g.sequence[0]) / 9.0;
    const double r12 = g.sequence[2] + (g.sequence[2] - g.sequence[1]) / 9.0;
    if (std::abs(r12 - r01) > 1e-4) throw ConvergenceError("Gauss map limit sequence is not Cauchy at 1e-4");
    g.numeric = r12;
    g.closed_form = 2.0 / (lam - std::sqrt(lam * lam + 4.0));
    g.minus_sqrt_sigma = -std::sqrt(sigma_of_lambda(lam));
    if (std::abs(g.numeric - g.closed_form) > 1e-4 || std::abs(g.numeric - g.minus_sqrt_sigma) > 1e-4)
        throw ConvergenceError("Gauss map limit disagrees with the closed form");
    return g;
}

std::array<double, 7> enneper_coefficients(const FoliationData& d) {
    const double r = d.r, rp = d.rp, rpp = d.rpp, k = d.kappa, kp = d.kappap, t = d.tau;
    const double al = d.alpha, be = d.beta, de = d.delta, alp = d.alphap, bep = d.betap, dep = d.deltap;
    const double r2 = r * r, r3 = r2 * r;
    std::array<double, 7> a{};
    a[0] = -0.5 * r3 * k * (be * be - de * de + r2 * k * k);
    a[1] = -r3 * be * de * k;
    a[2] = 0.5 * r3 * (-6 * be * k * rp + r * (5 * al * k * k + k * bep - be * kp));
    a[3] = 0.5 * r3 * (r * k * dep - de * (6 * k * rp + r * kp));
    a[4] = -0.5 * r2 *
           (3 * r3 * k * k * k - 4 * al * be * rp +
            r * (8 * al * al * k + 3 * be * be * k + 3 * k * (de * de + 2 * rp * rp) - 2 * be * alp +
                 2 * al * (de * t + bep)) +
            2 * r2 * (rp * kp - k * rpp));
    a[5] = r2 * (2 * al * de * rp + r2 * k * t * rp + r * (de * alp + al * (be * t - dep)));
    a[6] = 0.5 * r2 *
           (2 * al * al * al + r * (2 * rp * (-2 * be * k + alp) + r * (k * (2 * de * t + bep) - be * kp)) +
            al * (2 * be * be + 2 * de * de + 5 * r2 * k * k + 2 * rp * rp - 2 * r * rpp));
    return a;
}

namespace {

struct Frame {
    Vec3 c, t, n, b;
};

// Frame and centre at parameter u, by RK4 from the identity frame at u = 0.
// Convention: t' = k n, n' = -k t - tau b, b' = tau n.
Frame frame_at(const FoliationData& d, double u, int steps = 8) {
    using State = std::array<Vec3, 4>;
    auto rhs = [&](double s, const State& y) {
        const double k = d.kappa + d.kappap * s;
        const double al = d.alpha + d.alphap * s, be = d.beta + d.betap * s, de = d.delta + d.deltap * s;
        return State{al * y[1] + be * y[2] + de * y[3], k * y[2], -k * y[1] - d.tau * y[3], d.tau * y[2]};
    };
    State y{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    const double h = u / steps;
    double s = 0.0;
    auto axpy = [](const State& a, double f, const State& b) {
        State r;
        for (int i = 0; i < 4; ++i) r[i] = a[i] + f * b[i];
        return r;
    };
    for (int i = 0; i < steps; ++i) {
        auto k1 = rhs(s, y);
        auto k2 = rhs(s + h / 2, axpy(y, h / 2, k1));
        auto k3 = rhs(s + h / 2, axpy(y, h / 2, k2));
        auto k4 = rhs(s + h, axpy(y, h, k3));
        for (int j = 0; j < 4; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        s += h;
    }
    return {y[0], y[1], y[2], y[3]};
}

}  // namespace

EnneperCheck enneper_fourier_check(const FoliationData& d, int samples, double h) {
    const Frame fm = frame_at(d, -h), f0 = frame_at(d, 0.0), fp = frame_at(d, h);
    auto radius = [&](double u) { return d.r + d.rp * u + 0.5 * d.rpp * u * u; };
    const double rm = radius(-h), r0 = radius(0.0), rpl = radius(h);
    auto X = [](const Frame& f, double r, double v) { return Vec3(f.c + r * (std::cos(v) * f.n + std::sin(v) * f.b)); };
    auto Xv = [](const Frame& f, double r, double v) { return Vec3(r * (-std::sin(v) * f.n + std::cos(v) * f.b)); };

    std::vector<double> P(samples), vs(samples);
    for (int i = 0; i < samples; ++i) {
        const double v = 2.0 * std::numbers::pi * i / samples;
        vs[i] = v;
        const Vec3 x0 = X(f0, r0, v);
        const Vec3 xu = (X(fp, rpl, v) - X(fm, rm, v)) / (2 * h);
        const Vec3 xuu = (X(fp, rpl, v) - 2 * x0 + X(fm, rm, v)) / (h * h);
        const Vec3 xv = Xv(f0, r0, v);
        const Vec3 xvv = -r0 * (std::cos(v) * f0.n + std::sin(v) * f0.b);
        const Vec3 xuv = (Xv(fp, rpl, v) - Xv(fm, rm, v)) / (2 * h);
        const Vec3 cr = xu.cross(xv);
        const double E = xu.dot(xu), F = xu.dot(xv), G = xv.dot(xv);
        P[i] = cr.dot(xuu) * G - 2 * cr.dot(xuv) * F + cr.dot(xvv) * E;
    }
    EnneperCheck out{};
    auto proj = [&](auto fn) {
        double acc = 0.0;
        for (int i = 0; i < samples; ++i) acc += P[i] * fn(vs[i]);
        return acc / samples;
    };
    out.extracted = {2 * proj([](double v) { return std::cos(3 * v); }), 2 * proj([](double v) { return std::sin(3 * v); }),
                     2 * proj([](double v) { return std::cos(2 * v); }), 2 * proj([](double v) { return std::sin(2 * v); }),
                     2 * proj([](double v) { return std::cos(v); }),     2 * proj([](double v) { return std::sin(v); }),
                     proj([](double) { return 1.0; })};
    const auto a = enneper_coefficients(d);
    out.residual = 0.0;
    for (int i = 0; i < 7; ++i) out.residual = std::max(out.residual, std::abs(a[i] - out.extracted[i]));
    return out;
}

SurfaceDiagnostics surface_diagnostics(const std::function<Vec3(double, double)>& chart, double h) {
    const Vec3 x0 = chart(0, 0);
    const Vec3 xpu = chart(h, 0), xmu = chart(-h, 0), xpv = chart(0, h), xmv = chart(0, -h);
    const Vec3 xu = (xpu - xmu) / (2 * h), xv = (xpv - xmv) / (2 * h);
    const Vec3 xuu = (xpu - 2 * x0 + xmu) / (h * h), xvv = (xpv - 2 * x0 + xmv) / (h * h);
    const Vec3 xuv = (chart(h, h) - chart(h, -h) - chart(-h, h) + chart(-h, -h)) / (4 * h * h);
    const double E = xu.dot(xu), F = xu.dot(xv), G = xv.dot(xv);
    const Vec3 N = xu.cross(xv).normalized();
    const double e = xuu.dot(N), f = xuv.dot(N), g = xvv.dot(N);
    SurfaceDiagnostics out;
    out.mean_curvature = std::abs((e * G - 2 * f * F + g * E) / (2 * (E * G - F * F)));
    out.conformality = std::max(std::abs(E - G), std::abs(F)) / E;
    return out;
}

}  // namespace minsurf
