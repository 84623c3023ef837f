#include "fracdhk/quadrature.hpp"
#include "fracdhk/errors.hpp"
#include "fracdhk/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace fracdhk::quad {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi recurrence matrix,
// weights come from the first eigenvector components.
Rule build_jacobi_rule(int n, double alpha, double beta) {
    if (n < 1) throw DomainError("quadrature rule needs at least one node");
    if (alpha <= -1.0 || beta <= -1.0)
        throw DomainError("Gauss-Jacobi weight exponents must exceed -1");
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        if (k == 0)
            diag(k) = (beta - alpha) / (ab + 2.0);
        else {
            double d = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
            diag(k) = (beta * beta - alpha * alpha) / d;
        }
    }
    for (int k = 1; k < n; ++k) {
        double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
        double den = (2.0 * k + ab) * (2.0 * k + ab);
        den *= (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
        sub(k - 1) = std::sqrt(num / den);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw QuadratureNonConvergence("Golub-Welsch eigensolve failed");
    const double mu0 = std::pow(2.0, ab + 1.0) *
                       std::exp(specfun::log_gamma(alpha + 1.0) + specfun::log_gamma(beta + 1.0) -
                                specfun::log_gamma(ab + 2.0));
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = solver.eigenvalues()(k);
        double v = solver.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v * v;
    }
    return rule;
}

struct RuleKey {
    int n;
    double alpha;
    double beta;
    bool operator<(const RuleKey& o) const {
        if (n != o.n) return n < o.n;
        if (alpha != o.alpha) return alpha < o.alpha;
        return beta < o.beta;
    }
};

std::mutex g_cache_mutex;
std::map<RuleKey, Rule> g_cache;

} // namespace

const Rule& gauss_jacobi(int n, double alpha, double beta) {
    RuleKey key{n, alpha, beta};
    std::lock_guard lock(g_cache_mutex);
    auto it = g_cache.find(key);
    if (it == g_cache.end()) it = g_cache.emplace(key, build_jacobi_rule(n, alpha, beta)).first;
    return it->second;
}

const Rule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

namespace {

template <class T>
T apply_rule(const Rule& rule, const std::function<T(double)>& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    T acc{};
    for (size_t k = 0; k < rule.nodes.size(); ++k)
        acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return acc * half;
}

template <class T>
bool converged(T coarse, T fine, double len, const Options& o) {
    double tol = std::max({o.abs_tol, o.rel_tol * std::abs(fine), 2.0 * o.noise * len});
    return std::abs(fine - coarse) <= tol;
}

template <class T>
T integrate_panel(const std::function<T(double)>& f, double lo, double hi,
                  const Options& opts, int depth) {
    const double len = hi - lo;
    if (len <= 0.0) return T{};
    int n = opts.min_nodes;
    T prev = apply_rule<T>(gauss_legendre(n), f, lo, hi);
    while (2 * n <= opts.max_nodes) {
        n *= 2;
        T cur = apply_rule<T>(gauss_legendre(n), f, lo, hi);
        if (converged(prev, cur, len, opts)) return cur;
        prev = cur;
    }
    if (depth >= opts.max_depth)
        throw QuadratureNonConvergence("adaptive quadrature budget exhausted");
    const double mid = 0.5 * (lo + hi);
    return integrate_panel<T>(f, lo, mid, opts, depth + 1) +
           integrate_panel<T>(f, mid, hi, opts, depth + 1);
}

template <class T>
T integrate_panels_impl(const std::function<T(double)>& f, double lo, double hi,
                        std::span<const double> breaks, const Options& opts) {
    if (!(hi > lo)) return T{};
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double c : breaks)
        if (c > lo + 1e-300 && c < hi) cuts.push_back(c);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    T acc{};
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) acc += integrate_panel<T>(f, cuts[i], cuts[i + 1], opts, 0);
    return acc;
}

} // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Options& opts) {
    if (!(hi > lo)) return 0.0;
    return integrate_panel<double>(f, lo, hi, opts, 0);
}

std::complex<double> integrate(const std::function<std::complex<double>(double)>& f,
                               double lo, double hi, const Options& opts) {
    if (!(hi > lo)) return {};
    return integrate_panel<std::complex<double>>(f, lo, hi, opts, 0);
}

double integrate_jacobi(const std::function<double(double)>& f, double lo, double hi,
                        double alpha, double beta, const Options& opts) {
    if (!(hi > lo)) return 0.0;
    const double len = hi - lo, half = 0.5 * len;
    // t = lo + half*(1+xi); weight (hi-t)^a (t-lo)^b = half^{a+b} (1-xi)^a (1+xi)^b
    const double scale = std::pow(half, alpha + beta) * half;
    auto mapped = [&](const Rule& rule) {
        double acc = 0.0;
        for (size_t k = 0; k < rule.nodes.size(); ++k)
            acc += rule.weights[k] * f(lo + half * (1.0 + rule.nodes[k]));
        return scale * acc;
    };
    int n = opts.min_nodes;
    double prev = mapped(gauss_jacobi(n, alpha, beta));
    while (2 * n <= opts.max_nodes) {
        n *= 2;
        double cur = mapped(gauss_jacobi(n, alpha, beta));
        if (converged(prev, cur, len, opts)) return cur;
        prev = cur;
    }
    throw QuadratureNonConvergence("Gauss-Jacobi refinement exhausted");
}

double integrate_panels(const std::function<double(double)>& f, double lo, double hi,
                        std::span<const double> breaks, const Options& opts) {
    return integrate_panels_impl<double>(f, lo, hi, breaks, opts);
}

std::complex<double> integrate_panels(const std::function<std::complex<double>(double)>& f,
                                      double lo, double hi, std::span<const double> breaks,
                                      const Options& opts) {
    return integrate_panels_impl<std::complex<double>>(f, lo, hi, breaks, opts);
}

} // namespace fracdhk::quad
