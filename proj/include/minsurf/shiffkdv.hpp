#pragma once

#include <boost/rational.hpp>
#include <complex>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "minsurf/curve.hpp"

namespace minsurf {

// (f, f', ..., f^(k)) at a point.
struct Jet {
    std::vector<cplx> values;

    int order() const { return static_cast<int>(values.size()) - 1; }
    const cplx& operator[](int k) const { return values.at(k); }
};

// Truncated Taylor arithmetic on jets. All results carry the order of the
// shortest operand (division and products keep it; derivative drops one).
Jet jet_add(const Jet& a, const Jet& b);
Jet jet_scale(const Jet& a, cplx s);
Jet jet_mul(const Jet& a, const Jet& b);
Jet jet_div(const Jet& a, const Jet& b);
Jet jet_derivative(const Jet& a);
Jet jet_truncate(const Jet& a, int order);

double level_curvature_raw(const Jet& g);
double shiffman(const Jet& g);
cplx shiffman_complex(const Jet& g);
cplx shiffman_velocity(const Jet& g);

struct ConformalGrid {
    int nx = 0, ny = 0;
    double spacing = 0.0;
    std::vector<Jet> g_jets;      // row-major, index j * nx + i
    std::vector<double> metric;   // Lambda = (|g| + 1/|g|)/2

    static ConformalGrid build(int nx, int ny, double spacing, cplx origin, const std::function<Jet(cplx)>& g_at);
};

double jacobi_residual(const ConformalGrid& grid, std::span<const double> field);

// u = -3 g'^2/(4 g^2) + g''/(2 g) with m derivatives.
Jet potential_u(const Jet& g, int m);
// u = x'/2 - x^2/4 with x = g'/g
Jet miura(const Jet& x);

cplx kdv_flow(const Jet& u);
cplx mkdv_flow(const Jet& x);
// Jet of the mKdV right-hand side (order drops by three).
Jet mkdv_flow_jet(const Jet& x);
// d/dt of u = x'/2 - x^2/4 when x evolves by mkdv_flow.
cplx miura_rate(const Jet& x);
// The Miura image of the mKdV flow is the KdV flow run in rescaled time:
// miura_rate(x) = kMiuraTimeScale * kdv_flow(miura(x)).
inline const cplx kMiuraTimeScale{0.0, -0.5};

using Rational = boost::rational<long long>;

// Polynomial in u, u', u'', ... with rational coefficients. A monomial is
// the ascending multiset of derivative orders of its factors.
class DiffPoly {
public:
    using Monomial = std::vector<int>;

    DiffPoly() = default;
    static DiffPoly constant(Rational c);
    static DiffPoly u(int k = 0);

    const std::map<Monomial, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int max_order() const;

    DiffPoly operator+(const DiffPoly& o) const;
    DiffPoly operator-(const DiffPoly& o) const;
    DiffPoly operator*(const DiffPoly& o) const;
    DiffPoly operator*(Rational c) const;
    bool operator==(const DiffPoly& o) const { return terms_ == o.terms_; }

    DiffPoly derivative() const;
    // Formal antiderivative with zero constant; NotExactDerivative if none.
    DiffPoly antiderivative() const;

    cplx evaluate(const Jet& u) const;
    std::string to_string() const;

private:
    void add_term(Monomial m, Rational c);
    std::map<Monomial, Rational> terms_;
};

inline constexpr int kHierarchyMax = 6;

const DiffPoly& hierarchy_P(int n);
cplx flow_n(int n, const Jet& u);

struct AlgebroGeometricFit {
    std::vector<cplx> coefficients;
    double residual = 0.0;
    bool rank_deficient = false;
};

// u-jets of the Gauss map g = z/sqrt(sigma) at curve points, with m derivatives.
std::vector<Jet> curve_potential_jets(const CurveParams& c, std::span<const CurvePoint> samples, int m);

AlgebroGeometricFit algebro_geometric_residual(const CurveParams& c, int n, std::span<const CurvePoint> samples);
AlgebroGeometricFit fit_flows(int n, std::span<const Jet> u_jets);

}  // namespace minsurf
