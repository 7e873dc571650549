#include <algorithm>
#include <cmath>

#include "minsurf/shiffkdv.hpp"

namespace minsurf {

namespace {

std::vector<cplx> to_taylor(const Jet& a, int order) {
    std::vector<cplx> t(order + 1);
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) fact *= k;
        t[k] = a.values[k] / fact;
    }
    return t;
}

Jet from_taylor(const std::vector<cplx>& t) {
    Jet j;
    j.values.resize(t.size());
    double fact = 1.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        j.values[k] = t[k] * fact;
    }
    return j;
}

void require_nonempty(const Jet& a) {
    if (a.values.empty()) throw JetTooShort("empty jet");
}

}  // namespace

Jet jet_truncate(const Jet& a, int order) {
    if (a.order() < order) throw JetTooShort("jet of order " + std::to_string(a.order()) + " cannot be truncated to " +
                                             std::to_string(order));
    return Jet{{a.values.begin(), a.values.begin() + order + 1}};
}

Jet jet_add(const Jet& a, const Jet& b) {
    const int n = std::min(a.order(), b.order());
    Jet r = jet_truncate(a, n);
    for (int k = 0; k <= n; ++k) r.values[k] += b.values[k];
    return r;
}

Jet jet_scale(const Jet& a, cplx s) {
    Jet r = a;
    for (auto& v : r.values) v *= s;
    return r;
}

Jet jet_mul(const Jet& a, const Jet& b) {
    require_nonempty(a);
    require_nonempty(b);
    const int n = std::min(a.order(), b.order());
    auto ta = to_taylor(a, n), tb = to_taylor(b, n);
    std::vector<cplx> tc(n + 1, 0.0);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) tc[i + j] += ta[i] * tb[j];
    return from_taylor(tc);
}

Jet jet_div(const Jet& a, const Jet& b) {
    require_nonempty(a);
    require_nonempty(b);
    if (b.values[0] == 0.0) throw PoleOfGaussMap("division by a jet with zero value");
    const int n = std::min(a.order(), b.order());
    auto ta = to_taylor(a, n), tb = to_taylor(b, n);
    std::vector<cplx> tc(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        cplx s = ta[k];
        for (int i = 1; i <= k; ++i) s -= tb[i] * tc[k - i];
        tc[k] = s / tb[0];
    }
    return from_taylor(tc);
}

Jet jet_derivative(const Jet& a) {
    if (a.order() < 1) throw JetTooShort("cannot differentiate a jet of order 0");
    return Jet{{a.values.begin() + 1, a.values.end()}};
}

}  // namespace minsurf
