#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace fracdhk::quad {

/// Nodes and weights on the reference interval [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached, shared read-only).
const Rule& gauss_legendre(int n);

/// n-point Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta, alpha, beta > -1.
const Rule& gauss_jacobi(int n, double alpha, double beta);

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
    int min_nodes = 16;
    int max_nodes = 1024;
    /// Absolute noise level of integrand evaluations; the convergence test
    /// will not demand agreement below noise * panel_length.
    double noise = 0.0;
    /// Maximum bisection depth after node doubling is exhausted.
    int max_depth = 14;
};

/// Adaptive integral of f over [lo, hi]: per-panel node doubling, then
/// bisection. Throws QuadratureNonConvergence when the budget is exhausted.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Options& opts = {});

std::complex<double> integrate(const std::function<std::complex<double>(double)>& f,
                               double lo, double hi, const Options& opts = {});

/// Adaptive integral of (hi-t)^alpha (t-lo)^beta f(t) over [lo, hi] with f smooth;
/// the weight is absorbed by a Gauss-Jacobi rule, never sampled.
double integrate_jacobi(const std::function<double(double)>& f, double lo, double hi,
                        double alpha, double beta, const Options& opts = {});

/// Split [lo, hi] at the supplied interior breakpoints and integrate each panel.
double integrate_panels(const std::function<double(double)>& f, double lo, double hi,
                        std::span<const double> breaks, const Options& opts = {});

std::complex<double> integrate_panels(const std::function<std::complex<double>(double)>& f,
                                      double lo, double hi, std::span<const double> breaks,
                                      const Options& opts = {});

} // namespace fracdhk::quad
