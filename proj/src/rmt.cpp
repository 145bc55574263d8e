#include "asymspec/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace asymspec::rmt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHMin = 1.0, kHMax = 1e4;
constexpr double kQMin = 0.1, kQMax = 1e3;

void check_q(double q, const char* op) {
    if (!(q > 0.0)) {
        std::ostringstream msg;
        msg << op << ": q must be positive, got " << q;
        throw std::invalid_argument(msg.str());
    }
}

// Radial formula 2*x*q^2 / sqrt((1-q)^2 + 4q^2 x^2) without the support
// cutoff; density_effective needs it for all x >= 0.
double radial_formula(double x, double q) {
    const double d = 1.0 - q;
    return 2.0 * x * q * q / std::sqrt(d * d + 4.0 * q * q * x * x);
}

// Golden-section minimum of a unimodal f on [a, b].
template <class F>
double golden_min(F&& f, double a, double b) {
    constexpr double kPhi = 0.6180339887498949;
    double x1 = b - kPhi * (b - a), x2 = a + kPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-10 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kPhi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// Coarse log-space scan followed by golden-section refinement between the
// best point's neighbors; guards against multimodal objectives.
template <class F>
double scan_then_golden(F&& f, double lo, double hi, int scan_points) {
    const double llo = std::log(lo), lhi = std::log(hi);
    std::vector<double> grid(static_cast<std::size_t>(scan_points));
    for (int i = 0; i < scan_points; ++i)
        grid[static_cast<std::size_t>(i)] =
            llo + (lhi - llo) * static_cast<double>(i) / (scan_points - 1);
    std::size_t best_i = 0;
    double best_v = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = f(std::exp(grid[i]));
        if (i == 0 || v < best_v) {
            best_v = v;
            best_i = i;
        }
    }
    double best_l = grid[best_i];
    const double bl = grid[best_i > 0 ? best_i - 1 : 0];
    const double bh = grid[best_i + 1 < grid.size() ? best_i + 1 : grid.size() - 1];
    if (bh > bl)
        best_l = golden_min([&](double l) { return f(std::exp(l)); }, bl, bh);
    return std::exp(best_l);
}

double sum_sq_error(const RadialHistogram& hist, const DensityParams& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < hist.densities.size(); ++i) {
        const double c = 0.5 * (hist.bin_edges[i] + hist.bin_edges[i + 1]);
        const double r = density_effective(c, p) - hist.densities[i];
        s += r * r;
    }
    return s;
}

// Best h for a given q; returns {h, sum of squared errors}.
std::pair<double, double> fit_h_for_q(const RadialHistogram& hist, double q) {
    auto obj = [&](double h) {
        DensityParams p;
        p.q = q;
        p.h = h;
        return sum_sq_error(hist, p);
    };
    const double h = scan_then_golden(obj, kHMin, kHMax, 64);
    return {h, obj(h)};
}

double adaptive_simpson(const DensityParams& p, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = density_effective(lm, p), frm = density_effective(rm, p);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(p, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(p, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double support_radius(double q) {
    check_q(q, "support_radius");
    return 1.0 / std::sqrt(q);
}

double density_complex(std::complex<double> lam, double q) {
    check_q(q, "density_complex");
    const double mod = std::abs(lam);
    if (mod > support_radius(q)) return 0.0;
    const double d = 1.0 - q;
    return q * q / (kPi * std::sqrt(d * d + 4.0 * q * q * mod * mod));
}

double density_radial(double x, double q) {
    return 2.0 * kPi * x * density_complex(std::complex<double>(x, 0.0), q);
}

double radial_cdf(double x, double q) {
    check_q(q, "radial_cdf");
    const double xc = std::min(x, support_radius(q));
    const double d = 1.0 - q;
    return 0.5 * (std::sqrt(d * d + 4.0 * q * q * xc * xc) - std::abs(d));
}

double density_effective(double x, const DensityParams& p) {
    return 0.5 * radial_formula(x, p.q) * std::erfc(p.h * (x - support_radius(p.q)));
}

double model_integral(const DensityParams& p) {
    const double hi = support_radius(p.q) + 8.0 / p.h;
    const double fa = density_effective(0.0, p);
    const double fm = density_effective(0.5 * hi, p);
    const double fb = density_effective(hi, p);
    const double whole = hi / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(p, 0.0, hi, fa, fm, fb, whole, 1e-11, 40);
}

std::size_t default_bin_count(std::size_t total_count) {
    const auto root = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(total_count))));
    return std::clamp<std::size_t>(root, 5, 100);
}

double default_exclusion(double q_nominal) {
    check_q(q_nominal, "default_exclusion");
    return 3.0 * support_radius(q_nominal);
}

RadialHistogram radial_histogram(const std::vector<double>& moduli, std::size_t bins,
                                 std::optional<double> exclude) {
    if (bins < 2) throw std::invalid_argument("radial_histogram: need at least 2 bins");
    std::vector<double> kept;
    kept.reserve(moduli.size());
    std::size_t excluded = 0;
    for (double m : moduli) {
        if (exclude && m > *exclude)
            ++excluded;
        else
            kept.push_back(m);
    }
    if (kept.size() < 10) {
        std::ostringstream msg;
        msg << "radial_histogram: only " << kept.size()
            << " eigenvalues after exclusion; need at least 10";
        throw std::runtime_error(msg.str());
    }
    double xmax = *std::max_element(kept.begin(), kept.end());
    if (xmax <= 0.0) xmax = 1.0;

    RadialHistogram h;
    h.total_count = kept.size();
    h.excluded_count = excluded;
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        h.bin_edges[i] = xmax * static_cast<double>(i) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double m : kept) {
        auto idx = static_cast<std::size_t>(m / xmax * static_cast<double>(bins));
        ++counts[std::min(idx, bins - 1)];
    }
    const double width = xmax / static_cast<double>(bins);
    h.densities.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
        h.densities[i] =
            static_cast<double>(counts[i]) / (static_cast<double>(kept.size()) * width);
    return h;
}

RadialHistogram radial_histogram(const eig::ComplexSpectrum& s, std::size_t bins,
                                 std::optional<double> exclude) {
    std::vector<double> moduli;
    moduli.reserve(s.size());
    for (const auto& lam : s.eigenvalues) moduli.push_back(std::abs(lam));
    return radial_histogram(moduli, bins, exclude);
}

RadialHistogram radial_histogram(const std::vector<eig::ComplexSpectrum>& pooled,
                                 std::size_t bins, std::optional<double> exclude) {
    std::vector<double> moduli;
    for (const auto& s : pooled)
        for (const auto& lam : s.eigenvalues) moduli.push_back(std::abs(lam));
    return radial_histogram(moduli, bins, exclude);
}

DensityParams fit_density(const RadialHistogram& hist, QMode mode, double q_nominal) {
    if (hist.densities.empty() || hist.bin_edges.size() != hist.densities.size() + 1)
        throw std::invalid_argument("fit_density: malformed histogram");

    DensityParams out;
    out.q_fixed = (mode == QMode::fixed);
    if (mode == QMode::fixed) {
        check_q(q_nominal, "fit_density");
        out.q = q_nominal;
        auto [h, sse] = fit_h_for_q(hist, q_nominal);
        out.h = h;
        out.fit_residual = std::sqrt(sse / static_cast<double>(hist.densities.size()));
    } else {
        auto profile = [&](double q) { return fit_h_for_q(hist, q).second; };
        out.q = scan_then_golden(profile, kQMin, kQMax, 96);
        auto [h, sse] = fit_h_for_q(hist, out.q);
        out.h = h;
        out.fit_residual = std::sqrt(sse / static_cast<double>(hist.densities.size()));
        out.q_at_bound = out.q < kQMin * 1.001 || out.q > kQMax * 0.999;
    }
    out.h_at_bound = out.h < kHMin * 1.001 || out.h > kHMax * 0.999;

    double peak = 0.0;
    for (std::size_t i = 0; i < hist.densities.size(); ++i) {
        const double c = 0.5 * (hist.bin_edges[i] + hist.bin_edges[i + 1]);
        peak = std::max({peak, hist.densities[i], density_effective(c, out)});
    }
    out.poor_fit = peak > 0.0 && *out.fit_residual > 0.15 * peak;
    out.integral_deviation = model_integral(out) - 1.0;
    return out;
}

}  // namespace asymspec::rmt
