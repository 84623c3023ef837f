#include "fracdhk/specfun.hpp"
#include "fracdhk/errors.hpp"

#include <cmath>
#include <limits>

namespace fracdhk::specfun {

namespace {

// Lanczos g = 7, 9-term coefficient set (Godfrey).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kSqrtTwoPi = 2.5066282746310002;

double lanczos_sum(double z) {
    // z is the shifted argument: gamma(z+1) is being computed.
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
    return a;
}

} // namespace

double gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("gamma: argument must be a positive finite real");
    if (x < 0.5) return gamma(x + 1.0) / x;
    double z = x - 1.0;
    double t = z + kLanczosG + 0.5;
    return kSqrtTwoPi * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_sum(z);
}

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("log_gamma: argument must be a positive finite real");
    if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
    double z = x - 1.0;
    double t = z + kLanczosG + 0.5;
    return std::log(kSqrtTwoPi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double gamma_ratio(double p, double q) {
    if (p > 30.0 || q > 30.0) return std::exp(log_gamma(p) - log_gamma(q));
    return gamma(p) / gamma(q);
}

namespace {

using cplx = std::complex<double>;

// Sum of the lower-gamma power series: sum_k z^k / (n (n+1) ... (n+k)),
// so that gamma(n,z) = z^n e^{-z} * series_sum(n,z).
cplx lower_series_sum(double n, cplx z) {
    cplx term = 1.0 / n;
    cplx sum = term;
    for (int k = 1; k < 600; ++k) {
        term *= z / (n + k);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) return sum;
    }
    throw QuadratureNonConvergence("lower incomplete gamma series did not converge");
}

// Modified Lentz continued fraction for Gamma(n, z) = e^{-z} z^n * cf(n, z).
// Valid away from the negative real axis; here z = i x with x > 0.
cplx upper_cf(double n, cplx z) {
    const double tiny = 1e-290;
    cplx b = z + 1.0 - n;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 4000; ++i) {
        double an = -i * (i - n);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        cplx del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    throw QuadratureNonConvergence("upper incomplete gamma continued fraction stalled");
}

// Poincare asymptotic series: Gamma(n,z) ~ z^{n-1} e^{-z} (1 + (n-1)/z + ...).
cplx upper_asymptotic_factor(double n, cplx z) {
    cplx sum = 1.0;
    cplx term = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= (n - k) / z;
        if (std::abs(term) < 1e-18) break;
        sum += term;
    }
    return sum;
}

constexpr double kSeriesCut = 12.0;
constexpr double kAsymptoticCut = 1e7;

} // namespace

std::complex<double> upper_gamma_regularized_imag_scaled(double n, double z) {
    if (!(n > 0.0)) throw DomainError("upper gamma: n must be positive");
    if (z < 0.0) throw DomainError("upper gamma: z must be nonnegative");
    const cplx iz(0.0, z);
    const cplx i_pow_n = std::polar(1.0, 0.5 * M_PI * n);
    if (z <= kSeriesCut) {
        // e^{iz} - (iz)^n * series / Gamma(n)
        cplx expiz = std::polar(1.0, z);
        cplx zn = std::pow(z, n) * i_pow_n;
        return expiz - zn * lower_series_sum(n, iz) / gamma(n);
    }
    if (z <= kAsymptoticCut) {
        cplx zn = std::pow(z, n) * i_pow_n;
        return zn * upper_cf(n, iz) / gamma(n);
    }
    cplx znm1 = std::pow(z, n - 1.0) * std::polar(1.0, 0.5 * M_PI * (n - 1.0));
    return znm1 * upper_asymptotic_factor(n, iz) / gamma(n);
}

std::complex<double> lower_gamma_regularized_imag(double n, double x) {
    if (!(n > 0.0)) throw DomainError("lower gamma: n must be positive");
    if (x < 0.0) throw DomainError("lower gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x <= kSeriesCut) {
        cplx iz(0.0, x);
        cplx zn = std::pow(x, n) * std::polar(1.0, 0.5 * M_PI * n);
        return zn * std::exp(-iz) * lower_series_sum(n, iz) / gamma(n);
    }
    // P = 1 - e^{-iz} * S(n, z)
    cplx expmiz = std::polar(1.0, -x);
    return 1.0 - expmiz * upper_gamma_regularized_imag_scaled(n, x);
}

double frac_cos_kernel(double mu, double omega, double phase_a, double L) {
    if (!(mu > 0.0)) throw DomainError("frac_cos_kernel: mu must be positive");
    if (!(omega > 0.0)) throw DomainError("frac_cos_kernel: omega must be positive");
    if (L <= 0.0) return 0.0;
    const double z = omega * L;
    if (z <= kSeriesCut) {
        // L^mu * Re[e^{i phase_a} * series] / Gamma(mu); the e^{i omega x} and
        // e^{-iz} phases cancel exactly in this grouping.
        cplx s = lower_series_sum(mu, cplx(0.0, z));
        cplx ph = std::polar(1.0, phase_a);
        return std::pow(L, mu) * (ph * s).real() / gamma(mu);
    }
    const double rot = phase_a - 0.5 * M_PI * mu;
    cplx s = upper_gamma_regularized_imag_scaled(mu, z);
    double full = std::cos(z + rot);
    double tail = (std::polar(1.0, rot) * s).real();
    return (full - tail) / std::pow(omega, mu);
}

} // namespace fracdhk::specfun
