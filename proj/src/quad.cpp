#include "minsurf/quad.hpp"

#include <sstream>

namespace minsurf {

namespace {

double segment_distance(cplx a, cplx b, cplx p) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    double t = len2 > 0 ? ((p - a) * std::conj(d)).real() / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(a + t * d - p);
}

}  // namespace

void check_path(const ComplexPath& path, std::span<const cplx> exclusion) {
    for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k) {
        const cplx a = path.nodes[k], b = path.nodes[k + 1];
        if (a == b) throw DomainError("consecutive path nodes coincide at index " + std::to_string(k));
        for (const cplx& e : exclusion) {
            const double d = segment_distance(a, b, e);
            if (d < path.clearance) {
                std::ostringstream os;
                os << "segment " << k << " passes within " << d << " of excluded point " << e
                   << " (clearance " << path.clearance << ")";
                throw ClearanceViolation(os.str());
            }
        }
    }
}

cplx integrate_path(const std::function<cplx(cplx)>& f, const ComplexPath& path, const QuadSettings& s,
                    std::span<const cplx> exclusion) {
    check_path(path, exclusion);
    cplx total = 0.0;
    for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k) {
        const cplx a = path.nodes[k], d = path.nodes[k + 1] - a;
        total += integrate_gk<cplx>([&](double t) { return f(a + t * d) * d; }, 0.0, 1.0, s);
    }
    return total;
}

double integrate_sqrt_singular(const std::function<double(double)>& f, double a, double b,
                               const QuadSettings& s) {
    if (!(a < b)) throw DomainError("integrate_sqrt_singular needs a < b");
    const double L = std::sqrt(b - a);
    return integrate_gk<double>([&](double t) { return t == 0.0 ? 0.0 : 2.0 * t * f(a + t * t); }, 0.0, L, s);
}

double integrate_sqrt_singular(const std::function<double(double, double)>& f, double a, double b,
                               const QuadSettings& s) {
    if (!(a < b)) throw DomainError("integrate_sqrt_singular needs a < b");
    const double L = std::sqrt(b - a);
    return integrate_gk<double>([&](double t) { return t == 0.0 ? 0.0 : 2.0 * t * f(a + t * t, t * t); }, 0.0, L,
                                s);
}

double integrate_tail(const std::function<double(double)>& f, double a, double p, const QuadSettings& s,
                      TailMap map) {
    if (p <= 1.0) throw Divergent("declared decay exponent " + std::to_string(p) + " <= 1");
    if (!(a > 0.0)) throw DomainError("integrate_tail needs a > 0");
    if (map == TailMap::Reciprocal) {
        // u = a/v leaves v^(p-2) at v = 0; grading v = t^k with k(p-1) >= 1
        // makes it bounded
        const int k = p >= 2.0 ? 1 : static_cast<int>(std::ceil(1.0 / (p - 1.0)));
        return integrate_gk<double>(
            [&](double t) {
                if (t == 0.0) return 0.0;
                const double v = std::pow(t, k);
                return f(a / v) * a / (v * v) * k * v / t;
            },
            0.0, 1.0, s);
    }
    // u = a/v^2, du = 2a/v^3 dv
    return integrate_gk<double>([&](double v) { return f(a / (v * v)) * 2.0 * a / (v * v * v); }, 0.0, 1.0, s);
}

}  // namespace minsurf
