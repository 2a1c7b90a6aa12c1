#include "reskit/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace reskit::quad {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric halves).
constexpr int kN = 15;
constexpr double kNodes[kN] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272, -0.7244177313601700,
    -0.5709721726085388, -0.3941513470775634, -0.2011940939974345, 0.0,
    0.2011940939974345,  0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kWeights[kN] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719, 0.1395706779261543,
    0.1662692058169939, 0.1861610000155622, 0.1984314853271116, 0.2025782419255613,
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

// 7-point Gauss-Legendre for the embedded error estimate.
constexpr int kM = 7;
constexpr double kNodes7[kM] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                                0.0,                 0.4058451513773972,  0.7415311855993945,
                                0.9491079123427585};
constexpr double kWeights7[kM] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                  0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                  0.1294849661688697};

struct PanelEval {
    Complex fine;
    Complex coarse;
    std::size_t evals;
};

PanelEval eval_panel(const std::function<Complex(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    PanelEval out{Complex(0, 0), Complex(0, 0), kN + kM};
    for (int i = 0; i < kN; ++i) out.fine += kWeights[i] * f(c + h * kNodes[i]);
    for (int i = 0; i < kM; ++i) out.coarse += kWeights7[i] * f(c + h * kNodes7[i]);
    out.fine *= h;
    out.coarse *= h;
    return out;
}

void integrate_panel(const std::function<Complex(double)>& f, double a, double b, double tol,
                     int depth, int max_depth, QuadResult& acc) {
    PanelEval pe = eval_panel(f, a, b);
    acc.evaluations += pe.evals;
    const double err = std::abs(pe.fine - pe.coarse);
    if (err <= tol || depth >= max_depth) {
        acc.value += pe.fine;
        acc.error_estimate += err;
        return;
    }
    const double mid = 0.5 * (a + b);
    integrate_panel(f, a, mid, 0.5 * tol, depth + 1, max_depth, acc);
    integrate_panel(f, mid, b, 0.5 * tol, depth + 1, max_depth, acc);
}

} // namespace

QuadResult integrate(const std::function<Complex(double)>& f, double a, double b, double abs_tol,
                     double max_panel, int max_depth) {
    QuadResult acc;
    if (!(b > a)) return acc;
    int npanels = 1;
    if (max_panel > 0.0) npanels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    const double h = (b - a) / npanels;
    for (int k = 0; k < npanels; ++k)
        integrate_panel(f, a + k * h, a + (k + 1) * h, abs_tol / npanels, 0, max_depth, acc);
    return acc;
}

TailResult integrate_to_horizon(const std::function<Complex(double)>& f, double a, double step,
                                double abs_tol, const std::function<bool(double)>& horizon_stop,
                                const std::function<double(double)>& tail_bound, double t_cap) {
    TailResult out;
    double t = a;
    while (t < t_cap) {
        const double t_next = t + step;
        QuadResult piece = integrate(f, t, t_next, abs_tol, step, 24);
        out.value += piece.value;
        out.error_estimate += piece.error_estimate;
        t = t_next;
        if (horizon_stop(t)) {
            out.horizon = t;
            out.tail_bound = tail_bound(t);
            return out;
        }
    }
    fail(ErrorCode::IntegralNotDamped,
         "integrand not negligible by t = " + format_double(t_cap) +
             " (envelope decays too slowly for the requested horizon)");
}

CMatrix richardson(const std::vector<double>& eps, const std::vector<CMatrix>& samples,
                   double* spread) {
    if (eps.size() != samples.size() || eps.empty())
        fail(ErrorCode::InvalidArgument, "richardson: sample/eps mismatch");
    std::vector<CMatrix> tableau = samples;
    CMatrix prev = tableau.back();
    // Neville scheme for the polynomial through (eps_k, f_k) evaluated at 0.
    for (std::size_t stage = 1; stage < tableau.size(); ++stage) {
        for (std::size_t i = tableau.size() - 1; i >= stage; --i) {
            const double denom = eps[i - stage] - eps[i];
            tableau[i] = tableau[i] + (eps[i] / denom) * (tableau[i] - tableau[i - stage]).eval();
            if (i == stage) break;
        }
        if (stage == tableau.size() - 1 && spread != nullptr)
            *spread = (tableau.back() - prev).norm();
        prev = tableau.back();
    }
    if (tableau.size() == 1 && spread != nullptr) *spread = std::numeric_limits<double>::infinity();
    return tableau.back();
}

CMatrix extrapolate_to_zero(const std::function<CMatrix(double)>& f, double eps_max,
                            double eps_min, double tol, int min_samples) {
    if (!(eps_max > eps_min) || !(eps_min > 0.0))
        fail(ErrorCode::InvalidArgument, "extrapolate_to_zero: need eps_max > eps_min > 0");
    std::vector<double> eps;
    std::vector<CMatrix> samples;
    double spread = std::numeric_limits<double>::infinity();
    double e = eps_max;
    while (e >= eps_min * (1.0 - 1e-12)) {
        eps.push_back(e);
        samples.push_back(f(e));
        if (static_cast<int>(eps.size()) >= min_samples) {
            CMatrix value = richardson(eps, samples, &spread);
            const double scale = std::max(1.0, value.norm());
            if (spread <= tol * scale) return value;
        }
        e *= 0.5;
    }
    double final_spread = std::numeric_limits<double>::infinity();
    CMatrix value = richardson(eps, samples, &final_spread);
    const double scale = std::max(1.0, value.norm());
    if (final_spread > tol * scale)
        fail(ErrorCode::LimitNotConverged,
             "boundary-value extrapolation spread " + format_double(final_spread) +
                 " exceeds tolerance " + format_double(tol * scale) +
                 " (grid too coarse for the requested limit)");
    return value;
}

} // namespace reskit::quad
