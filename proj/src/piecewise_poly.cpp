#include "fracdhk/piecewise_poly.hpp"
#include "fracdhk/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fracdhk {

namespace poly {

double eval(std::span<const double> c, double u) {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * u + c[i];
    return acc;
}

std::vector<double> derivative(std::span<const double> c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return d;
}

std::vector<double> antiderivative(std::span<const double> c) {
    std::vector<double> a(c.size() + 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i) a[i + 1] = c[i] / static_cast<double>(i + 1);
    return a;
}

std::vector<double> shift(std::span<const double> c, double s) {
    // Horner-style Taylor shift: repeatedly divide by (u - (-s)).
    std::vector<double> work(c.begin(), c.end());
    std::vector<double> out(c.size(), 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
        for (size_t i = work.size() - 1; i > k; --i) work[i - 1] += s * work[i];
        out[k] = work[k];
    }
    return out;
}

} // namespace poly

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<std::vector<double>> coeffs)
    : breaks_(std::move(breaks)), coeffs_(std::move(coeffs)) {
    if (breaks_.size() < 2 || coeffs_.size() + 1 != breaks_.size())
        throw DomainError("PiecewisePoly: breakpoint/coefficient count mismatch");
    if (!std::is_sorted(breaks_.begin(), breaks_.end()))
        throw DomainError("PiecewisePoly: breakpoints must be sorted");
    for (auto& c : coeffs_)
        if (c.empty()) c.push_back(0.0);
}

PiecewisePoly PiecewisePoly::single(double lo, double hi, std::vector<double> coeffs) {
    return PiecewisePoly({lo, hi}, {std::move(coeffs)});
}

PiecewisePoly PiecewisePoly::constant(double lo, double hi, double value) {
    return single(lo, hi, {value});
}

PiecewisePoly PiecewisePoly::from_samples(double lo, double hi, std::span<const double> values,
                                          bool cubic) {
    const size_t n = values.size();
    if (n < 2) throw DomainError("from_samples: need at least two samples");
    const double h = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> breaks(n);
    for (size_t i = 0; i < n; ++i) breaks[i] = lo + h * static_cast<double>(i);
    breaks.back() = hi;
    std::vector<std::vector<double>> coeffs(n - 1);
    if (!cubic) {
        for (size_t i = 0; i + 1 < n; ++i)
            coeffs[i] = {values[i], (values[i + 1] - values[i]) / h};
        return PiecewisePoly(std::move(breaks), std::move(coeffs));
    }
    // Natural cubic spline, Thomas algorithm for the second-derivative system.
    std::vector<double> m(n, 0.0);
    if (n > 2) {
        const size_t k = n - 2; // unknowns m[1..n-2], diag 4, off-diag 1
        std::vector<double> c(k, 0.0), d(k, 0.0);
        auto rhs = [&](size_t i) {
            return 6.0 * (values[i] - 2.0 * values[i + 1] + values[i + 2]) / (h * h);
        };
        c[0] = 1.0 / 4.0;
        d[0] = rhs(0) / 4.0;
        for (size_t i = 1; i < k; ++i) {
            double denom = 4.0 - c[i - 1];
            c[i] = 1.0 / denom;
            d[i] = (rhs(i) - d[i - 1]) / denom;
        }
        m[k] = d[k - 1];
        for (size_t i = k - 1; i-- > 0;) m[i + 1] = d[i] - c[i] * m[i + 2];
    }
    for (size_t i = 0; i + 1 < n; ++i) {
        double a = values[i];
        double b = (values[i + 1] - values[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
        double cc = m[i] / 2.0;
        double d = (m[i + 1] - m[i]) / (6.0 * h);
        coeffs[i] = {a, b, cc, d};
    }
    return PiecewisePoly(std::move(breaks), std::move(coeffs));
}

size_t PiecewisePoly::piece_index(double x) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    if (it == breaks_.begin()) return 0;
    size_t idx = static_cast<size_t>(it - breaks_.begin()) - 1;
    return std::min(idx, coeffs_.size() - 1);
}

double PiecewisePoly::eval(double x) const {
    size_t i = piece_index(x);
    return poly::eval(coeffs_[i], x - breaks_[i]);
}

double PiecewisePoly::eval_left(double x) const {
    auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
    size_t idx = (it == breaks_.begin()) ? 0 : static_cast<size_t>(it - breaks_.begin()) - 1;
    idx = std::min(idx, coeffs_.size() - 1);
    return poly::eval(coeffs_[idx], x - breaks_[idx]);
}

int PiecewisePoly::max_degree() const {
    size_t d = 0;
    for (const auto& c : coeffs_) d = std::max(d, c.size());
    return static_cast<int>(d) - 1;
}

PiecewisePoly PiecewisePoly::derivative() const {
    std::vector<std::vector<double>> out(coeffs_.size());
    for (size_t i = 0; i < coeffs_.size(); ++i) out[i] = poly::derivative(coeffs_[i]);
    return PiecewisePoly(breaks_, std::move(out));
}

PiecewisePoly PiecewisePoly::antiderivative() const {
    std::vector<std::vector<double>> out(coeffs_.size());
    double running = 0.0;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        out[i] = poly::antiderivative(coeffs_[i]);
        out[i][0] = running;
        running = poly::eval(out[i], breaks_[i + 1] - breaks_[i]);
    }
    return PiecewisePoly(breaks_, std::move(out));
}

PiecewisePoly PiecewisePoly::scaled(double c) const {
    std::vector<std::vector<double>> out = coeffs_;
    for (auto& piece : out)
        for (auto& v : piece) v *= c;
    return PiecewisePoly(breaks_, std::move(out));
}

PiecewisePoly PiecewisePoly::plus(const PiecewisePoly& other) const {
    std::vector<double> merged;
    merged.reserve(breaks_.size() + other.breaks_.size());
    std::merge(breaks_.begin(), breaks_.end(), other.breaks_.begin(), other.breaks_.end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    std::vector<std::vector<double>> out(merged.size() - 1);
    for (size_t i = 0; i + 1 < merged.size(); ++i) {
        double u0 = merged[i];
        size_t ia = piece_index(std::min(std::max(u0, lo()), hi()));
        size_t ib = other.piece_index(std::min(std::max(u0, other.lo()), other.hi()));
        auto ca = poly::shift(coeffs_[ia], u0 - breaks_[ia]);
        auto cb = poly::shift(other.coeffs_[ib], u0 - other.breaks_[ib]);
        if (cb.size() > ca.size()) ca.resize(cb.size(), 0.0);
        for (size_t k = 0; k < cb.size(); ++k) ca[k] += cb[k];
        out[i] = std::move(ca);
    }
    return PiecewisePoly(std::move(merged), std::move(out));
}

PiecewisePoly PiecewisePoly::reflected() const {
    const double s = lo() + hi();
    const size_t m = coeffs_.size();
    std::vector<double> breaks(breaks_.size());
    for (size_t i = 0; i < breaks_.size(); ++i) breaks[i] = s - breaks_[breaks_.size() - 1 - i];
    std::vector<std::vector<double>> out(m);
    for (size_t i = 0; i < m; ++i) {
        // New piece i covers [s - breaks_[j+1], s - breaks_[j]] with j = m-1-i.
        size_t j = m - 1 - i;
        // q(w) = p(v - w) in old local coords: substitute u = (v - u_j) - w.
        double span = breaks_[j + 1] - breaks_[j];
        auto shifted = poly::shift(coeffs_[j], span); // p(span + t), t = u - span
        // now substitute t = -w: alternate signs
        for (size_t k = 1; k < shifted.size(); k += 2) shifted[k] = -shifted[k];
        out[i] = std::move(shifted);
    }
    return PiecewisePoly(std::move(breaks), std::move(out));
}

double PiecewisePoly::max_breakpoint_jump() const {
    double worst = 0.0;
    for (size_t i = 1; i + 1 < breaks_.size(); ++i) {
        double left = poly::eval(coeffs_[i - 1], breaks_[i] - breaks_[i - 1]);
        double right = coeffs_[i].empty() ? 0.0 : coeffs_[i][0];
        worst = std::max(worst, std::abs(left - right));
    }
    return worst;
}

double PiecewisePoly::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& piece : coeffs_)
        for (double v : piece) m = std::max(m, std::abs(v));
    return m;
}

} // namespace fracdhk
