#include "chargefcs/analytic.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace chargefcs::analytic {
namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSeriesRadius = 0.9;
// e^{-v^2} is below 1e-40 past this point, so the tail of the v-integral is dropped.
constexpr double kUpperCutoff = 10.0;

double integrate_part(auto&& f, double lo, double hi, double& abs_error, double& l1) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0, norm = 0.0;
    const double v = gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-14, &err, &norm);
    abs_error += err;
    l1 += norm;
    return v;
}

// Taylor coefficients of omega(lambda) around 0, orders 0..4.
std::array<cplx, 5> omega_taylor(double rho_l, double rho_r) {
    std::array<cplx, 5> c{};
    double fact = 1.0;
    cplx ipow = 1.0;
    for (int k = 1; k <= 4; ++k) {
        fact *= k;
        ipow *= cplx(0.0, 1.0);
        // (e^{i l}-1)(e^{-i l}-1) = 2 - 2 cos l
        const double cross = (k % 2 == 0) ? -2.0 * ((k / 2) % 2 == 0 ? 1.0 : -1.0) / fact : 0.0;
        c[k] = rho_l * ipow / fact + rho_r * std::conj(ipow) / fact + rho_l * rho_r * cross;
    }
    return c;
}

// Product of two truncated series (orders 0..4).
std::array<cplx, 5> series_mul(const std::array<cplx, 5>& a, const std::array<cplx, 5>& b) {
    std::array<cplx, 5> out{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; i + j < 5; ++j) out[i + j] += a[i] * b[j];
    return out;
}

}  // namespace

cplx omega(double lambda, double rho_left, double rho_right) {
    if (!(rho_left >= 0.0 && rho_left <= 1.0 && rho_right >= 0.0 && rho_right <= 1.0))
        throw ConfigError("omega: densities must lie in [0, 1]");
    const double s = std::sin(0.5 * lambda);
    const double s2 = s * s;
    const double sin_l = std::sin(lambda);
    // e^{i l} - 1 = -2 sin^2(l/2) + i sin l, and the cross term is 4 sin^2(l/2).
    const double re = s2 * (4.0 * rho_left * rho_right - 2.0 * (rho_left + rho_right));
    const double im = (rho_left - rho_right) * sin_l;
    return {re, im};
}

cplx sep_F_series(cplx w, double tol) {
    if (!(std::abs(w) < 1.0)) throw ConfigError("sep_F_series requires |omega| < 1");
    cplx sum = 0.0;
    cplx wn = w;
    for (int n = 1; n < 100000; ++n) {
        const double sign = (n % 2 == 1) ? 1.0 : -1.0;
        const cplx term = sign * wn / (double(n) * std::sqrt(double(n)));
        sum += term;
        if (std::abs(term) <= tol * std::abs(sum) || std::abs(term) == 0.0) break;
        wn *= w;
    }
    return sum / kSqrtPi;
}

cplx sep_F_integral(cplx w) {
    const double aw = std::abs(w);
    if (aw == 0.0) return 0.0;
    if (w.real() < -1.0 && std::abs(w.imag()) <= 1e-15 * aw)
        throw ConfigError("sep_F: omega lies on the branch cut (real, < -1)");

    // F(w) = (2w/pi) int_0^inf 2 v^2 / (e^{v^2} + w) dv after u = v^2.
    // expm1 keeps the denominator accurate near v = 0 when w is close to -1.
    const cplx w_plus_one = 1.0 + w;
    auto integrand = [w_plus_one](double v) { return 2.0 * v * v / (std::expm1(v * v) + w_plus_one); };
    auto re_f = [&](double v) { return integrand(v).real(); };
    auto im_f = [&](double v) { return integrand(v).imag(); };

    // Split where e^{v^2} = |w|: the denominator comes closest to zero there.
    std::vector<double> knots{0.0};
    if (aw > 1.0) knots.push_back(std::sqrt(std::log(aw)));
    knots.push_back(std::max(kUpperCutoff, knots.back() + 4.0));

    double err = 0.0, l1 = 0.0, re = 0.0, im = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        re += integrate_part(re_f, knots[i], knots[i + 1], err, l1);
        im += integrate_part(im_f, knots[i], knots[i + 1], err, l1);
    }
    if (!std::isfinite(re) || !std::isfinite(im) || err > 1e-9 * std::max(l1, 1e-300))
        throw NumericalError("sep_F: quadrature missed its error target (error " + std::to_string(err) + ")");
    return (2.0 / std::numbers::pi) * w * cplx(re, im);
}

cplx sep_F(cplx w) {
    if (std::abs(w) <= kSeriesRadius) return sep_F_series(w);
    return sep_F_integral(w);
}

cplx sep_cgf(double lambda, double t, double rho_left, double rho_right) {
    if (t < 0) throw ConfigError("sep_cgf: t must be non-negative");
    return std::sqrt(t) * sep_F(omega(lambda, rho_left, rho_right));
}

double sep_cumulant(int order, double t, double rho_left, double rho_right) {
    if (order < 1 || order > 4) throw ConfigError("sep_cumulant: order must be in 1..4");
    if (t < 0) throw ConfigError("sep_cumulant: t must be non-negative");
    if (!(rho_left >= 0.0 && rho_left <= 1.0 && rho_right >= 0.0 && rho_right <= 1.0))
        throw ConfigError("sep_cumulant: densities must lie in [0, 1]");

    // omega has no constant term, so F(omega) to order lambda^4 needs F's coefficients 1..4.
    const auto w = omega_taylor(rho_left, rho_right);
    std::array<cplx, 5> power = w;
    std::array<cplx, 5> chi{};
    for (int n = 1; n <= 4; ++n) {
        const double c = ((n % 2 == 1) ? 1.0 : -1.0) / (double(n) * std::sqrt(double(n)) * kSqrtPi);
        for (int k = 0; k < 5; ++k) chi[k] += c * power[k];
        power = series_mul(power, w);
    }
    double fact = 1.0;
    for (int k = 2; k <= order; ++k) fact *= k;
    // C_m = (-i)^m m! [lambda^m] chi
    cplx minus_i_pow = 1.0;
    for (int k = 0; k < order; ++k) minus_i_pow *= cplx(0.0, -1.0);
    return std::sqrt(t) * (minus_i_pow * fact * chi[order]).real();
}

double sep_cumulant_finite_difference(int order, double t, double rho_left, double rho_right, double h) {
    if (order < 1 || order > 4) throw ConfigError("finite-difference cumulant: order must be in 1..4");
    if (!(h > 0)) throw ConfigError("finite-difference step must be positive");
    // Nine-point central stencils over offsets -4..4.
    static constexpr std::array<std::array<double, 9>, 4> stencil{{
        {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280},
        {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560},
        {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0.0, -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240},
        {7.0 / 240, -2.0 / 5, 169.0 / 60, -122.0 / 15, 91.0 / 8, -122.0 / 15, 169.0 / 60, -2.0 / 5, 7.0 / 240},
    }};
    const bool even = order % 2 == 0;
    double acc = 0.0;
    for (int j = -4; j <= 4; ++j) {
        const double c = stencil[std::size_t(order - 1)][std::size_t(j + 4)];
        if (c == 0.0) continue;
        const cplx chi = sep_cgf(j * h, t, rho_left, rho_right);
        acc += c * (even ? chi.real() : chi.imag());
    }
    const double deriv = acc / std::pow(h, order);
    // (-i)^m d^m chi: m=1 -> Im', m=2 -> -Re'', m=3 -> -Im''', m=4 -> Re''''
    switch (order) {
        case 1: return deriv;
        case 2: return -deriv;
        case 3: return -deriv;
        default: return deriv;
    }
}

double kurtosis_prediction(double t) {
    if (!(t > 0)) throw ConfigError("kurtosis_prediction: t must be positive");
    return (4.0 - 3.0 * std::numbers::sqrt2) * kSqrtPi / (2.0 * std::sqrt(t));
}

double spinwave_dc2(ChemicalPotential mu, double t, double d) {
    if (!(t > 0)) throw ConfigError("spinwave_dc2: t must be positive");
    const double th = mu.tanh_half();
    return a_of_d(d) * th * th / (16.0 * std::sqrt(std::numbers::pi * t));
}

double spinwave_dc3(double mu, double t, double d) {
    if (!(t > 0)) throw ConfigError("spinwave_dc3: t must be positive");
    return 3.0 * a_of_d(d) * mu / (64.0 * std::sqrt(std::numbers::pi * t));
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 1) throw ConfigError("uniform_grid needs at least one point");
    if (n == 1) return {lo};
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
    g.back() = hi;
    return g;
}

std::vector<double> default_lambda_grid() { return uniform_grid(-3.0, 3.0, 101); }

}  // namespace chargefcs::analytic
