#include "minsurf/shiffkdv.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace minsurf {

namespace {

constexpr cplx I(0.0, 1.0);

void require_order(const Jet& j, int k, const char* what) {
    if (j.order() < k)
        throw JetTooShort(std::string(what) + " needs a jet of order " + std::to_string(k) + ", got " +
                          std::to_string(j.order()));
}

cplx gauss_value(const Jet& g) {
    const cplx v = g[0];
    if (v == 0.0 || !std::isfinite(std::abs(v))) throw PoleOfGaussMap("g is 0 or infinite");
    return v;
}

// (3/2)x^2 - g''/g - x^2/(1+|g|^2), x = g'/g
cplx shiffman_bracket(const Jet& g) {
    require_order(g, 2, "shiffman");
    const cplx v = gauss_value(g);
    const cplx x = g[1] / v;
    return 1.5 * x * x - g[2] / v - x * x / (1.0 + std::norm(v));
}

}  // namespace

double level_curvature_raw(const Jet& g) {
    require_order(g, 1, "level_curvature_raw");
    const cplx v = gauss_value(g);
    const double a = std::abs(v);
    return a / (1.0 + a * a) * (g[1] / v).real();
}

double shiffman(const Jet& g) { return shiffman_bracket(g).imag(); }

cplx shiffman_complex(const Jet& g) { return -I * shiffman_bracket(g); }

cplx shiffman_velocity(const Jet& g) {
    require_order(g, 3, "shiffman_velocity");
    const cplx v = gauss_value(g);
    return 0.5 * I * (g[3] - 3.0 * g[1] * g[2] / v + 1.5 * g[1] * g[1] * g[1] / (v * v));
}

ConformalGrid ConformalGrid::build(int nx, int ny, double spacing, cplx origin,
                                   const std::function<Jet(cplx)>& g_at) {
    ConformalGrid grid;
    grid.nx = nx;
    grid.ny = ny;
    grid.spacing = spacing;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            Jet g = g_at(origin + cplx(i * spacing, j * spacing));
            const double a = std::abs(gauss_value(g));
            grid.metric.push_back(0.5 * (a + 1.0 / a));
            grid.g_jets.push_back(std::move(g));
        }
    return grid;
}

double jacobi_residual(const ConformalGrid& grid, std::span<const double> field) {
    if (grid.nx < 3 || grid.ny < 3) throw GridTooSmall("jacobi_residual needs at least 3x3 nodes");
    if (field.size() != static_cast<std::size_t>(grid.nx * grid.ny))
        throw DomainError("field size does not match the grid");
    const double h2 = grid.spacing * grid.spacing;
    double worst = 0.0;
    for (int j = 1; j + 1 < grid.ny; ++j)
        for (int i = 1; i + 1 < grid.nx; ++i) {
            const int k = j * grid.nx + i;
            const double lap =
                (field[k - 1] + field[k + 1] + field[k - grid.nx] + field[k + grid.nx] - 4.0 * field[k]) / h2;
            const Jet& g = grid.g_jets[k];
            const double K = gaussian_curvature({g[0], 0.0, 0.0, 1.0}, g[1]);
            const double L = grid.metric[k];
            worst = std::max(worst, std::abs(lap / (L * L) - 2.0 * K * field[k]));
        }
    return worst;
}

Jet miura(const Jet& x) {
    require_order(x, 1, "miura");
    const Jet xp = jet_derivative(x);
    return jet_add(jet_scale(xp, 0.5), jet_scale(jet_mul(x, x), -0.25));
}

Jet potential_u(const Jet& g, int m) {
    require_order(g, m + 2, "potential_u");
    gauss_value(g);
    const Jet gt = jet_truncate(g, m + 2);
    const Jet x = jet_div(jet_derivative(gt), jet_truncate(gt, m + 1));
    return miura(x);
}

cplx kdv_flow(const Jet& u) {
    require_order(u, 3, "kdv_flow");
    return -u[3] - 6.0 * u[0] * u[1];
}

cplx mkdv_flow(const Jet& x) {
    require_order(x, 3, "mkdv_flow");
    return 0.5 * I * (x[3] - 1.5 * x[0] * x[0] * x[1]);
}

Jet mkdv_flow_jet(const Jet& x) {
    require_order(x, 3, "mkdv_flow_jet");
    const int n = x.order() - 3;
    const Jet x3 = jet_derivative(jet_derivative(jet_derivative(x)));
    const Jet x1 = jet_truncate(jet_derivative(x), n);
    const Jet x0 = jet_truncate(x, n);
    const Jet cubic = jet_mul(jet_mul(x0, x0), x1);
    return jet_scale(jet_add(x3, jet_scale(cubic, -1.5)), 0.5 * I);
}

cplx miura_rate(const Jet& x) {
    require_order(x, 4, "miura_rate");
    const Jet xdot = mkdv_flow_jet(jet_truncate(x, 4));
    // u = x'/2 - x^2/4  =>  u_t = (x_t)'/2 - x x_t/2
    return 0.5 * xdot[1] - 0.5 * x[0] * xdot[0];
}

// ---------------------------------------------------------------------------
// DiffPoly

DiffPoly DiffPoly::constant(Rational c) {
    DiffPoly p;
    p.add_term({}, c);
    return p;
}

DiffPoly DiffPoly::u(int k) {
    DiffPoly p;
    p.add_term({k}, Rational(1));
    return p;
}

void DiffPoly::add_term(Monomial m, Rational c) {
    if (c.numerator() == 0) return;
    std::sort(m.begin(), m.end());
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(std::move(m), c);
        return;
    }
    it->second += c;
    if (it->second.numerator() == 0) terms_.erase(it);
}

int DiffPoly::max_order() const {
    int k = -1;
    for (const auto& [m, c] : terms_)
        if (!m.empty()) k = std::max(k, m.back());
    return k;
}

DiffPoly DiffPoly::operator+(const DiffPoly& o) const {
    DiffPoly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

DiffPoly DiffPoly::operator-(const DiffPoly& o) const { return *this + o * Rational(-1); }

DiffPoly DiffPoly::operator*(Rational c) const {
    DiffPoly r;
    for (const auto& [m, a] : terms_) r.add_term(m, a * c);
    return r;
}

DiffPoly DiffPoly::operator*(const DiffPoly& o) const {
    DiffPoly r;
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) {
            Monomial m = m1;
            m.insert(m.end(), m2.begin(), m2.end());
            r.add_term(std::move(m), c1 * c2);
        }
    return r;
}

DiffPoly DiffPoly::derivative() const {
    DiffPoly r;
    for (const auto& [m, c] : terms_)
        for (std::size_t i = 0; i < m.size(); ++i) {
            Monomial d = m;
            d[i] += 1;
            r.add_term(std::move(d), c);
        }
    return r;
}

DiffPoly DiffPoly::antiderivative() const {
    DiffPoly rest = *this, result;
    while (!rest.is_zero()) {
        // a highest-order monomial; peeling it only introduces lower orders
        const Monomial* pick = nullptr;
        for (const auto& [m, c] : rest.terms_)
            if (!m.empty() && (!pick || m.back() > pick->back())) pick = &m;
        if (!pick || pick->back() == 0)
            throw NotExactDerivative("remainder " + rest.to_string() + " has no derivative-free antiderivative");
        const Monomial M = *pick;
        const Rational c = rest.terms_.at(M);
        const int k = M.back();
        if (M.size() >= 2 && M[M.size() - 2] == k) {
            DiffPoly bad;
            bad.add_term(M, c);
            throw NotExactDerivative("term " + bad.to_string() + " is not linear in its top derivative");
        }
        // M = u^(k) (u^(k-1))^m R0  ->  C = (u^(k-1))^(m+1) R0 / (m+1)
        Monomial C(M.begin(), M.end() - 1);
        const long long m = std::count(C.begin(), C.end(), k - 1);
        C.push_back(k - 1);
        DiffPoly cand;
        cand.add_term(C, c / Rational(m + 1));
        result = result + cand;
        rest = rest - cand.derivative();
    }
    return result;
}

cplx DiffPoly::evaluate(const Jet& u) const {
    if (u.order() < max_order())
        throw JetTooShort("evaluation needs a jet of order " + std::to_string(max_order()));
    cplx acc = 0.0;
    for (const auto& [m, c] : terms_) {
        cplx t = static_cast<double>(c.numerator()) / static_cast<double>(c.denominator());
        for (int k : m) t *= u[k];
        acc += t;
    }
    return acc;
}

std::string DiffPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Monomial, Rational>> items(terms_.begin(), terms_.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        Monomial x(a.first.rbegin(), a.first.rend()), y(b.first.rbegin(), b.first.rend());
        return x > y;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : items) {
        Rational a = c;
        if (first) {
            if (a.numerator() < 0) os << "-";
        } else {
            os << (a.numerator() < 0 ? " - " : " + ");
        }
        if (a.numerator() < 0) a = -a;
        first = false;
        const bool unit = a == Rational(1);
        if (!unit || m.empty()) {
            os << a.numerator();
            if (a.denominator() != 1) os << "/" << a.denominator();
        }
        bool space = !unit || m.empty();
        for (std::size_t i = 0; i < m.size();) {
            std::size_t j = i;
            while (j < m.size() && m[j] == m[i]) ++j;
            if (space) os << " ";
            space = true;
            os << "u" << std::string(m[i], '\'');
            if (j - i > 1) os << "^" << (j - i);
            i = j;
        }
    }
    return os.str();
}

namespace {

std::vector<DiffPoly> build_hierarchy() {
    std::vector<DiffPoly> P{DiffPoly::constant(Rational(1, 2))};
    const DiffPoly u = DiffPoly::u(0), u1 = DiffPoly::u(1);
    for (int n = 0; n < kHierarchyMax; ++n) {
        const DiffPoly& p = P.back();
        const DiffPoly d1 = p.derivative();
        const DiffPoly rhs = d1.derivative().derivative() + u * d1 * Rational(4) + u1 * p * Rational(2);
        P.push_back(rhs.antiderivative());
    }
    return P;
}

}  // namespace

const DiffPoly& hierarchy_P(int n) {
    static std::once_flag once;
    static std::vector<DiffPoly> table;
    if (n < 0 || n > kHierarchyMax)
        throw DomainError("hierarchy level " + std::to_string(n) + " outside [0, " + std::to_string(kHierarchyMax) +
                          "]");
    std::call_once(once, [] { table = build_hierarchy(); });
    return table[n];
}

cplx flow_n(int n, const Jet& u) {
    if (n < 0 || n + 1 > kHierarchyMax) throw DomainError("flow level out of range");
    if (u.order() < 2 * n + 1)
        throw JetTooShort("flow " + std::to_string(n) + " needs a jet of order " + std::to_string(2 * n + 1));
    static std::once_flag once;
    static std::vector<DiffPoly> flows;
    std::call_once(once, [] {
        for (int k = 0; k + 1 <= kHierarchyMax; ++k) flows.push_back(hierarchy_P(k + 1).derivative() * Rational(-1));
    });
    return flows[n].evaluate(u);
}

std::vector<Jet> curve_potential_jets(const CurveParams& c, std::span<const CurvePoint> samples, int m) {
    std::vector<Jet> out;
    out.reserve(samples.size());
    for (const auto& p : samples) out.push_back(potential_u(Jet{gauss_jet(c, p, m + 2)}, m));
    return out;
}

AlgebroGeometricFit fit_flows(int n, std::span<const Jet> u_jets) {
    if (n < 1) throw DomainError("fit_flows needs n >= 1");
    const int rows = static_cast<int>(u_jets.size());
    Eigen::MatrixXcd A(rows, n);
    Eigen::VectorXcd b(rows);
    for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < n; ++k) A(r, k) = flow_n(k, u_jets[r]);
        b(r) = flow_n(n, u_jets[r]);
    }
    AlgebroGeometricFit fit;
    fit.coefficients.assign(n, 0.0);
    if (b.norm() == 0.0) return fit;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < n) fit.rank_deficient = true;
    const Eigen::VectorXcd x = qr.solve(b);
    for (int k = 0; k < n; ++k) fit.coefficients[k] = x(k);
    fit.residual = (A * x - b).norm() / b.norm();
    return fit;
}

AlgebroGeometricFit algebro_geometric_residual(const CurveParams& c, int n, std::span<const CurvePoint> samples) {
    const auto jets = curve_potential_jets(c, samples, 2 * n + 1);
    return fit_flows(n, jets);
}

}  // namespace minsurf
