#include "reskit/bath.hpp"

#include <algorithm>
#include <cmath>

#include "reskit/quadrature.hpp"

namespace reskit::bath {

namespace {

// Angular-integrated thermal coupling density on the signed line. For u > 0
// this is (2/pi) J(u) / (1 - e^{-beta u}); detailed balance continues it to
// u < 0 exactly.
double thermal_density(const SpectralDensity& J, double beta, double u) {
    const double a = std::abs(u);
    if (a == 0.0) return 0.0;
    const double base = (2.0 / M_PI) * J(a);
    if (std::isinf(beta)) return u > 0.0 ? base : 0.0;
    // sign(u)/(1 - e^{-beta u}) at u = -w equals e^{-beta w}/(1 - e^{-beta w});
    // sharing the positive-side denominator keeps detailed balance exact.
    const double bose = base / (1.0 - std::exp(-beta * a));
    return u > 0.0 ? bose : bose * std::exp(-beta * a);
}

} // namespace

double SpectralDensity::operator()(double omega) const {
    if (omega < 0.0) fail(ErrorCode::InvalidArgument, "spectral density evaluated at omega < 0");
    if (family == Family::OhmicExp)
        return amplitude * std::pow(omega, exponent) * std::exp(-omega / cutoff);
    // table: linear interpolation, zero outside the tabulated range
    if (table_omega.empty()) return 0.0;
    if (omega <= table_omega.front() || omega >= table_omega.back()) return 0.0;
    auto it = std::upper_bound(table_omega.begin(), table_omega.end(), omega);
    const std::size_t hi = static_cast<std::size_t>(it - table_omega.begin());
    const std::size_t lo = hi - 1;
    const double w = (omega - table_omega[lo]) / (table_omega[hi] - table_omega[lo]);
    return (1.0 - w) * table_value[lo] + w * table_value[hi];
}

Discretization discretize(const SpectralDensity& J, double beta, int n, double window,
                          const std::string& scheme) {
    if (n < 100) fail(ErrorCode::InvalidArgument, "discretize: need n >= 100 modes");
    if (n % 2 != 0) fail(ErrorCode::InvalidArgument, "discretize: need even n (signed grid)");
    if (!(window > 0.0)) fail(ErrorCode::InvalidArgument, "discretize: window must be positive");
    if (!(beta > 0.0)) fail(ErrorCode::InvalidArgument, "discretize: beta must be positive");

    // Mass check: thermally weighted density outside [-window, window].
    auto density = [&](double u) { return thermal_density(J, beta, u); };
    const double far = std::max(10.0 * window, window + 40.0 * J.cutoff);
    const double inside =
        quad::integrate([&](double u) { return Complex(density(u), 0.0); }, -window, window, 1e-12)
            .value.real();
    double outside =
        quad::integrate([&](double u) { return Complex(density(u), 0.0); }, window, far, 1e-12)
            .value.real();
    if (!std::isinf(beta))
        outside += quad::integrate([&](double u) { return Complex(density(u), 0.0); }, -far,
                                   -window, 1e-12)
                       .value.real();
    if (outside > 0.01 * std::max(inside, 1e-300))
        fail(ErrorCode::WindowTooNarrow, "thermal coupling mass outside the window: " +
                                             format_double(outside / std::max(inside, 1e-300)) +
                                             " relative");

    Discretization d;
    d.scheme = scheme;
    d.omega.resize(n);
    d.g.resize(n);
    const double h = 2.0 * window / n;
    d.spacing = h;

    if (scheme == "uniform") {
        // Midpoint rule on the symmetric grid; u = 0 is never a node.
        for (int k = 0; k < n; ++k) {
            const double u = -window + (k + 0.5) * h;
            d.omega[k] = u;
            const double dens_w = density(u) * h;
            d.g[k] = std::sqrt(std::max(dens_w, 0.0));
        }
    } else if (scheme == "gauss") {
        // Composite 8-node Gauss-Legendre panels.
        static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                                     -0.5255324099163290, -0.1834346424956498,
                                     0.1834346424956498,  0.5255324099163290,
                                     0.7966664774136267,  0.9602898564975363};
        static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                                     0.3137066458778873, 0.3626837833783620,
                                     0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};
        if (n % 8 != 0) fail(ErrorCode::InvalidArgument, "gauss scheme: n must be divisible by 8");
        const int panels = n / 8;
        const double plen = 2.0 * window / panels;
        int idx = 0;
        for (int p = 0; p < panels; ++p) {
            const double a = -window + p * plen;
            const double c = a + 0.5 * plen;
            for (int q = 0; q < 8; ++q, ++idx) {
                const double u = c + 0.5 * plen * gx[q];
                d.omega[idx] = u;
                d.g[idx] = std::sqrt(std::max(density(u) * 0.5 * plen * gw[q], 0.0));
            }
        }
    } else {
        fail(ErrorCode::InvalidArgument, "discretize: unknown scheme '" + scheme + "'");
    }
    return d;
}

Discretization uniform_grid(double a, double b, int n) {
    if (!(b > a) || n < 2) fail(ErrorCode::InvalidArgument, "uniform_grid: bad window");
    Discretization d;
    d.scheme = "uniform";
    const double h = (b - a) / n;
    d.spacing = h;
    d.omega.resize(n);
    d.g.resize(n);
    for (int k = 0; k < n; ++k) {
        d.omega[k] = a + (k + 0.5) * h;
        d.g[k] = std::sqrt(h);
    }
    return d;
}

Model build_friedrichs(const std::vector<FriedrichsCluster>& clusters,
                       const Discretization& grid, double delta) {
    const int n = grid.size();
    int nbound = 0;
    for (const auto& c : clusters) nbound += static_cast<int>(c.member_profiles.size());
    const int dim = n + nbound;

    Model m;
    m.delta = delta;
    m.grid.spacing = grid.spacing;
    m.grid.window_min = grid.omega.front();
    m.grid.window_max = grid.omega.back();
    m.L0 = CMatrix::Zero(dim, dim);
    m.I = CMatrix::Zero(dim, dim);
    for (int k = 0; k < n; ++k) m.L0(k, k) = grid.omega[k];

    int next = n;
    for (const auto& c : clusters) {
        if (c.e <= grid.omega.front() || c.e >= grid.omega.back())
            fail(ErrorCode::ClusterOutsideContinuum,
                 "cluster energy " + format_double(c.e) + " outside the grid window");
        EigenvalueCluster cl;
        cl.e = c.e;
        cl.multiplicity = static_cast<int>(c.member_profiles.size());
        for (const auto& profile : c.member_profiles) {
            m.L0(next, next) = c.e;
            if (profile) {
                for (int k = 0; k < n; ++k) {
                    const double g = profile(grid.omega[k]) * grid.g[k];
                    m.I(k, next) = g;
                    m.I(next, k) = g;
                }
            }
            cl.indices.push_back(next);
            ++next;
        }
        m.clusters.push_back(std::move(cl));
    }
    m.validate();
    return m;
}

Model build_spinboson_liouvillean_surrogate(const LiouvilleSurrogateParams& params,
                                            const Discretization& thermal_grid, double beta) {
    if (params.truncation != "single-excitation")
        fail(ErrorCode::UnsupportedCoupling,
             "only the single-excitation V1-form truncation is supported (the Weyl-form V2 "
             "interaction has no finite matrix representation here)");
    if (!(params.eps > 0.0))
        fail(ErrorCode::InvalidArgument, "surrogate requires a positive Bohr frequency eps");
    const int n = thermal_grid.size();
    const double eps = params.eps;
    if (eps + thermal_grid.spacing >= thermal_grid.omega.back() ||
        -eps - thermal_grid.spacing <= thermal_grid.omega.front())
        fail(ErrorCode::ClusterOutsideContinuum, "eps clusters outside the signed grid window");

    // Doubled system basis (pp, pm, mp, mm); L_S = (eps/2)(sz x 1 - 1 x sz).
    const double ls[4] = {0.0, eps, -eps, 0.0};
    const int dim = 4 + 4 * n;
    auto mode_index = [n](int s, int k) { return 4 + 4 * k + s; };

    Model m;
    m.delta = params.delta;
    m.grid.spacing = thermal_grid.spacing;
    m.grid.window_min = thermal_grid.omega.front();
    m.grid.window_max = thermal_grid.omega.back();
    m.L0 = CMatrix::Zero(dim, dim);
    m.I = CMatrix::Zero(dim, dim);
    for (int s = 0; s < 4; ++s) m.L0(s, s) = ls[s];
    for (int k = 0; k < n; ++k)
        for (int s = 0; s < 4; ++s) m.L0(mode_index(s, k), mode_index(s, k)) = ls[s] + thermal_grid.omega[k];

    // V = G x 1 x phi(h), G = (1/2) sx in the system eigenbasis; the modular
    // conjugate contributes +(1 x conj(G)) x phi(h^J) with
    // h^J(u) = -e^{-beta u / 2} h(u). phi(h)|vac> = h / sqrt(2).
    // First-slot flip: pp<->mp, pm<->mm. Second-slot flip: pp<->pm, mp<->mm.
    const int flip_first[4] = {2, 3, 0, 1};
    const int flip_second[4] = {1, 0, 3, 2};
    const double half_over_sqrt2 = 0.5 / std::sqrt(2.0);
    for (int k = 0; k < n; ++k) {
        const double g = params.g_scale * thermal_grid.g[k];
        const double gj = -std::exp(-0.5 * beta * thermal_grid.omega[k]) * g;
        for (int s = 0; s < 4; ++s) {
            const int a = mode_index(flip_first[s], k);
            m.I(a, s) += half_over_sqrt2 * g;
            m.I(s, a) += half_over_sqrt2 * g;
            const int b = mode_index(flip_second[s], k);
            m.I(b, s) += half_over_sqrt2 * gj;
            m.I(s, b) += half_over_sqrt2 * gj;
        }
    }

    EigenvalueCluster zero;
    zero.e = 0.0;
    zero.multiplicity = 2;
    zero.indices = {0, 3};
    EigenvalueCluster plus;
    plus.e = eps;
    plus.multiplicity = 1;
    plus.indices = {1};
    EigenvalueCluster minus;
    minus.e = -eps;
    minus.multiplicity = 1;
    minus.indices = {2};
    m.clusters = {zero, plus, minus};
    m.validate();
    return m;
}

double golden_rule_rate(const SpectralDensity& J, double beta, double eps, double g_scale) {
    const double coth = std::isinf(beta) ? 1.0 : 1.0 / std::tanh(0.5 * beta * eps);
    return 0.5 * g_scale * g_scale * J(eps) * coth;
}

} // namespace reskit::bath
