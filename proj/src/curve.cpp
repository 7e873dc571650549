#include "minsurf/curve.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace minsurf {

namespace {

constexpr cplx I(0.0, 1.0);

bool is_root(const CurveParams& c, cplx z) {
    for (const cplx& e : c.roots())
        if (z == e) return true;
    return false;
}

// w on the segment from (za, wa): exact product of principal square roots,
// valid while each ratio (z - e)/(za - e) stays off the negative axis.
cplx w_along(const CurveParams& c, cplx za, cplx wa, cplx z) {
    cplx r = wa;
    for (const cplx& e : c.roots()) r *= std::sqrt((z - e) / (za - e));
    return r;
}

cplx snap(const CurveParams& c, cplx z, cplx w) {
    const cplx s = std::sqrt(c.poly(z));
    const cplx pick = std::abs(w - s) <= std::abs(w + s) ? s : -s;
    if (std::abs(w - pick) > 0.25 * std::abs(s) + 1e-300) {
        std::ostringstream os;
        os << "cannot resolve sqrt branch at z=" << z << " (tracked " << w << ", candidates +-" << s << ")";
        throw BranchAmbiguity(os.str());
    }
    return pick;
}

FormTriple densities(const CurveParams& c, cplx z, cplx w) {
    const cplx g = z / std::sqrt(c.sigma);
    const cplx p3 = 1.0 / w;
    return {0.5 * (1.0 / g - g) * p3, 0.5 * I * (1.0 / g + g) * p3, p3};
}

void check_clearance(const CurveParams& c, const ComplexPath& path, bool end_at_branch) {
    if (path.nodes.size() < 2) return;
    auto r = c.roots();
    ComplexPath head{path.nodes, path.clearance};
    if (!end_at_branch || !is_root(c, path.nodes.back())) {
        check_path(head, r);
        return;
    }
    // All segments but the last see the full exclusion set; the last one
    // sees every root except the one it ends on.
    head.nodes.pop_back();
    check_path(head, r);
    std::vector<cplx> others;
    for (const cplx& e : r)
        if (e != path.nodes.back()) others.push_back(e);
    ComplexPath tail{{path.nodes[path.nodes.size() - 2], path.nodes.back()}, path.clearance};
    check_path(tail, others);
}

// Walks one polyline segment in sub-steps no longer than half the distance
// to the nearest branch point; `visit(za, wa, zn, last)` integrates a piece.
template <class Visit>
cplx walk_segment(const CurveParams& c, cplx za, cplx wa, cplx zb, bool ends_at_branch, Visit&& visit) {
    for (;;) {
        double d = std::numeric_limits<double>::infinity();
        for (const cplx& e : c.roots()) {
            if (ends_at_branch && e == zb) continue;
            d = std::min(d, std::abs(za - e));
        }
        const double L = std::abs(zb - za);
        const bool last = L <= 0.5 * d;
        const cplx zn = last ? zb : za + (zb - za) * (0.5 * d / L);
        visit(za, wa, zn, last && ends_at_branch);
        if (last && ends_at_branch) return cplx(0.0);
        wa = snap(c, zn, w_along(c, za, wa, zn));
        za = zn;
        if (last) return wa;
    }
}

}  // namespace

CurveParams::CurveParams(double s) : sigma(s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("sigma must be positive, got " + std::to_string(s));
}

bool on_curve(const CurveParams& c, const CurvePoint& p, double tol) {
    return std::abs(p.w * p.w - c.poly(p.z)) <= tol * (1.0 + std::pow(std::abs(p.z), 3));
}

CurvePoint point_at(const CurveParams& c, cplx z) { return {z, std::sqrt(c.poly(z))}; }

WeierstrassForms weierstrass_forms(const CurveParams& c, const CurvePoint& p) {
    auto d = densities(c, p.z, p.w);
    return {p.z / std::sqrt(c.sigma), d[0], d[1], d[2]};
}

cplx continue_w(const CurveParams& c, const ComplexPath& path, cplx w_start) {
    if (path.nodes.empty()) return w_start;
    if (!on_curve(c, {path.nodes.front(), w_start}))
        throw DomainError("w_start is not on the curve at the first node");
    check_clearance(c, path, false);
    cplx w = w_start;
    for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k)
        w = walk_segment(c, path.nodes[k], w, path.nodes[k + 1], false, [](cplx, cplx, cplx, bool) {});
    return w;
}

PathIntegral integrate_forms(const CurveParams& c, const ComplexPath& path, cplx w_start, const QuadSettings& s,
                             bool end_at_branch) {
    PathIntegral out;
    if (path.nodes.empty()) return out;
    if (is_root(c, path.nodes.front())) throw DomainError("path may not start at a branch point");
    if (!on_curve(c, {path.nodes.front(), w_start}))
        throw DomainError("w_start is not on the curve at the first node");
    check_clearance(c, path, end_at_branch);
    cplx w = w_start;
    auto visit = [&](cplx za, cplx wa, cplx zn, bool singular_end) {
        const cplx dz = zn - za;
        FormTriple piece;
        if (!singular_end) {
            piece = integrate_gk<FormTriple>(
                [&](double t) {
                    const cplx z = za + t * dz;
                    auto d = densities(c, z, w_along(c, za, wa, z));
                    for (auto& x : d) x *= dz;
                    return d;
                },
                0.0, 1.0, s);
        } else {
            // t = 1 - (1 - u)^2 absorbs the (1 - t)^(-1/2) behaviour at the end
            piece = integrate_gk<FormTriple>(
                [&](double u) {
                    const double t = 1.0 - (1.0 - u) * (1.0 - u);
                    const cplx z = za + t * dz;
                    auto d = densities(c, z, w_along(c, za, wa, z));
                    const cplx scale = dz * (2.0 * (1.0 - u));
                    for (auto& x : d) x *= scale;
                    return d;
                },
                0.0, 1.0, s);
        }
        for (int i = 0; i < 3; ++i) out.periods[i] += piece[i];
    };
    for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k) {
        const bool last = k + 2 == path.nodes.size();
        w = walk_segment(c, path.nodes[k], w, path.nodes[k + 1], end_at_branch && last && is_root(c, path.nodes[k + 1]),
                         visit);
    }
    out.end = {path.nodes.back(), w};
    return out;
}

Immersed immerse(const CurveParams& c, const ComplexPath& path, cplx w_start, const Vec3& base_position,
                 const QuadSettings& s) {
    if (path.nodes.size() < 2) {
        const cplx z = path.nodes.empty() ? cplx(0.0) : path.nodes.front();
        return {base_position, {z, w_start}};
    }
    auto r = integrate_forms(c, path, w_start, s);
    Vec3 p = base_position;
    for (int i = 0; i < 3; ++i) p[i] += r.periods[i].real();
    return {p, r.end};
}

Vec3 gauss_map(const WeierstrassForms& f) {
    const cplx g = f.g;
    if (g == 0.0 || !std::isfinite(std::abs(g))) throw PoleOfGaussMap("g is 0 or infinite");
    const double n = std::norm(g);
    return Vec3(2.0 * g.real(), 2.0 * g.imag(), n - 1.0) / (1.0 + n);
}

double gaussian_curvature(const WeierstrassForms& f, cplx g_prime) {
    const double ag = std::abs(f.g);
    if (ag == 0.0 || !std::isfinite(ag)) throw PoleOfGaussMap("g is 0 or infinite");
    const double lam = ag + 1.0 / ag;
    const double k = 4.0 * std::abs(g_prime / f.g) / (lam * lam);
    return -k * k;
}

HomologyLoop make_loop(const CurveParams& c, LoopKind kind) {
    const double s = c.sigma;
    const double m = 0.5 * std::min(1.0, s);
    std::vector<cplx> nodes;
    auto circle = [&](cplx centre, double radius, int turns) {
        const int n = 256;
        for (int k = 0; k <= n * turns; ++k)
            nodes.push_back(centre + radius * std::polar(1.0, 2.0 * std::numbers::pi * k / n));
        nodes.back() = nodes.front();
    };
    switch (kind) {
    case LoopKind::Gamma1:
        // encloses 0 and 1
        circle(0.5, 0.5 + m, 1);
        break;
    case LoopKind::EndLoop:
        // z = 0 is a branch point, so the lift only closes after two turns
        circle(0.0, m, 2);
        break;
    case LoopKind::Gamma2: {
        // encloses 1 and -sigma but not 0: a box with a slot reaching down
        // past 0 from above
        const double r = m, rho = m, H = 1.0 + 0.5 * (1.0 + s), h = 0.5;
        const std::vector<cplx> corners = {
            {1 + r, -h}, {1 + r, H}, {-s - r, H}, {-s - r, -h}, {-rho, -h},
            {-rho, rho}, {rho, rho}, {rho, -h}, {1 + r, -h}};
        for (std::size_t k = 0; k + 1 < corners.size(); ++k)
            for (int j = 0; j < 16; ++j) nodes.push_back(corners[k] + (corners[k + 1] - corners[k]) * (j / 16.0));
        nodes.push_back(corners.back());
        break;
    }
    }
    HomologyLoop loop{kind, point_at(c, nodes.front()), ComplexPath{nodes, c.default_clearance()}};
    return loop;
}

HomologyLoop reversed(const HomologyLoop& loop) {
    HomologyLoop r = loop;
    std::reverse(r.geometry.nodes.begin(), r.geometry.nodes.end());
    return r;
}

HomologyLoop repeated(const HomologyLoop& loop, int times) {
    HomologyLoop r = loop;
    for (int k = 1; k < times; ++k)
        r.geometry.nodes.insert(r.geometry.nodes.end(), loop.geometry.nodes.begin() + 1, loop.geometry.nodes.end());
    return r;
}

FormTriple period(const CurveParams& c, const HomologyLoop& loop, const QuadSettings& s) {
    const auto& n = loop.geometry.nodes;
    if (n.size() < 3 || n.front() != n.back() || n.front() != loop.base.z)
        throw DomainError("loop geometry must be closed at its base point");
    auto r = integrate_forms(c, loop.geometry, loop.base.w, s);
    if (std::abs(r.end.w - loop.base.w) > 1e-8 * std::abs(loop.base.w))
        throw BranchAmbiguity("loop lift does not close");
    return r.periods;
}

Vec3 flux(const CurveParams& c, const HomologyLoop& loop, const QuadSettings& s) {
    auto p = period(c, loop, s);
    return Vec3(p[0].imag(), p[1].imag(), p[2].imag());
}

CurvePoint apply_symmetry(const CurveParams& c, Symmetry which, const CurvePoint& p) {
    switch (which) {
    case Symmetry::S1:
        if (p.z == 0.0) throw DomainError("S1 is not evaluated at z = 0");
        return {-c.sigma / p.z, -c.sigma * p.w / (p.z * p.z)};
    case Symmetry::S2:
        return {std::conj(p.z), -std::conj(p.w)};
    case Symmetry::S3:
        return {std::conj(p.z), std::conj(p.w)};
    }
    return p;
}

double verify_symmetry_action(const CurveParams& c, Symmetry which, std::span<const CurvePoint> samples) {
    double worst = 0.0;
    auto rel = [](cplx a, cplx b) { return std::abs(a - b) / (1.0 + std::abs(b)); };
    for (const auto& p : samples) {
        const CurvePoint q = apply_symmetry(c, which, p);
        const auto f = weierstrass_forms(c, p);
        const auto h = weierstrass_forms(c, q);
        double d = std::abs(q.w * q.w - c.poly(q.z)) / (1.0 + std::pow(std::abs(q.z), 3));
        switch (which) {
        case Symmetry::S1: {
            const cplx jac = c.sigma / (p.z * p.z);  // d(-sigma/z)/dz
            d = std::max(d, rel(h.g, -1.0 / f.g));
            d = std::max(d, rel(h.phi3 * jac, -f.phi3));
            break;
        }
        case Symmetry::S2:
            d = std::max(d, rel(h.g, std::conj(f.g)));
            d = std::max(d, rel(h.phi3, -std::conj(f.phi3)));
            break;
        case Symmetry::S3:
            d = std::max(d, rel(h.g, std::conj(f.g)));
            d = std::max(d, rel(h.phi3, std::conj(f.phi3)));
            break;
        }
        worst = std::max(worst, d);
    }
    return worst;
}

double gauss_ode_residual(const CurveParams& c, const CurvePoint& p) {
    const double rs = std::sqrt(c.sigma);
    const cplx g = p.z / rs, gp = p.w / rs;
    const double r1 = std::abs(gp * gp - g * (rs + g) * (rs * g - 1.0));
    // g'' = (w dw/dz)/sqrt(sigma) = P'(z)/(2 sqrt(sigma))
    const cplx z = p.z;
    const cplx gpp = (3.0 * z * z + 2.0 * (c.sigma - 1.0) * z - c.sigma) / (2.0 * rs);
    const double r2 = std::abs(gpp - (-rs / 2.0 + (c.sigma - 1.0) * g + 1.5 * rs * g * g));
    return std::max(r1, r2);
}

namespace {

using Poly = std::vector<cplx>;  // coefficients in g, lowest first

Poly padd(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}
Poly pmul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}
Poly pder(const Poly& a) {
    Poly r;
    for (std::size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * static_cast<double>(i));
    return r;
}
cplx peval(const Poly& a, cplx x) {
    cplx r = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * x + *it;
    return r;
}

}  // namespace

std::vector<cplx> gauss_jet(const CurveParams& c, const CurvePoint& p, int order) {
    const double rs = std::sqrt(c.sigma);
    const Poly Q = {0.0, -rs, c.sigma - 1.0, rs};
    const Poly R = {-rs / 2.0, c.sigma - 1.0, 1.5 * rs};
    const cplx g = p.z / rs, gp = p.w / rs;
    // g^(k) = A_k(g) + B_k(g) g'
    Poly A = {0.0, 1.0}, B = {};
    std::vector<cplx> out;
    for (int k = 0; k <= order; ++k) {
        out.push_back(peval(A, g) + peval(B, g) * gp);
        Poly An = padd(pmul(pder(B), Q), pmul(B, R));
        Poly Bn = pder(A);
        A = std::move(An);
        B = std::move(Bn);
    }
    return out;
}

std::vector<CurvePoint> random_points(const CurveParams& c, std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double rmax = 2.0 + c.sigma, rmin = 0.05;
    const double keep = 0.05 * std::min(1.0, c.sigma);
    std::vector<CurvePoint> out;
    while (out.size() < n) {
        const double r = rmin + (rmax - rmin) * U(rng);
        const double t = 2.0 * std::numbers::pi * U(rng);
        const bool flip = U(rng) < 0.5;
        const cplx z = std::polar(r, t);
        bool ok = true;
        for (const cplx& e : c.roots()) ok = ok && std::abs(z - e) > keep;
        if (!ok) continue;
        CurvePoint p = point_at(c, z);
        if (flip) p.w = -p.w;
        out.push_back(p);
    }
    return out;
}

Immersion::Immersion(double sigma, double delta, QuadSettings s) : curve_(sigma), settings_(s) {
    const double b = 1.0 + delta;
    base_ = {cplx(b), cplx(std::sqrt(b * delta * (b + sigma)))};
    // position of the basepoint relative to X(1): minus the integral from b back to 1
    ComplexPath back{{base_.z, cplx(1.0)}, 0.0};
    auto r = integrate_forms(curve_, back, base_.w, settings_, true);
    base_pos_ = Vec3(-r.periods[0].real(), -r.periods[1].real(), -r.periods[2].real());
}

Immersed Immersion::at(cplx z) const {
    if (z.imag() < 0.0) throw DomainError("Immersion::at needs Im z >= 0");
    const double h = 0.7;
    const cplx b = base_.z;
    std::vector<cplx> nodes;
    if (z.imag() >= h) {
        nodes = {b, b + I * z.imag(), z};
    } else {
        nodes = {b, b + I * h, z + I * h, z};
    }
    // drop repeated nodes (z directly above b)
    std::vector<cplx> clean{nodes.front()};
    for (std::size_t k = 1; k < nodes.size(); ++k)
        if (nodes[k] != clean.back()) clean.push_back(nodes[k]);
    if (clean.size() < 2) return {base_pos_, base_};
    auto r = integrate_forms(curve_, ComplexPath{clean, 0.0}, base_.w, settings_, true);
    Vec3 p = base_pos_;
    for (int i = 0; i < 3; ++i) p[i] += r.periods[i].real();
    return {p, r.end};
}

Immersed Immersion::step(const Immersed& from, cplx z) const {
    if (z == from.end.z) return from;
    auto r = integrate_forms(curve_, ComplexPath{{from.end.z, z}, 0.0}, from.end.w, settings_, true);
    Vec3 p = from.position;
    for (int i = 0; i < 3; ++i) p[i] += r.periods[i].real();
    return {p, r.end};
}

}  // namespace minsurf
