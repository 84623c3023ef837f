#pragma once

#include <span>
#include <vector>

namespace fracdhk {

/// Polynomial in one variable, coefficients in increasing degree order.
namespace poly {
double eval(std::span<const double> c, double u);
std::vector<double> derivative(std::span<const double> c);
std::vector<double> antiderivative(std::span<const double> c); // constant term 0
/// Expand p(s + u) as a polynomial in u (Taylor shift by s).
std::vector<double> shift(std::span<const double> c, double s);
} // namespace poly

/// Piecewise polynomial on [breaks.front(), breaks.back()], piece i holding
/// local coefficients in (x - breaks[i]). Continuity is not enforced here;
/// the Primitive wrapper validates it where the representation requires it.
class PiecewisePoly {
public:
    PiecewisePoly(std::vector<double> breaks, std::vector<std::vector<double>> coeffs);

    /// Single piece spanning [lo, hi] with global-anchored local coefficients.
    static PiecewisePoly single(double lo, double hi, std::vector<double> coeffs);
    static PiecewisePoly constant(double lo, double hi, double value);

    /// Interpolant of uniformly spaced samples: "linear" or natural cubic spline.
    static PiecewisePoly from_samples(double lo, double hi, std::span<const double> values,
                                      bool cubic);

    double eval(double x) const;
    /// Value using the piece left of the breakpoint (for jump diagnostics).
    double eval_left(double x) const;

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<std::vector<double>>& coefficients() const { return coeffs_; }
    size_t piece_count() const { return coeffs_.size(); }
    int max_degree() const;
    double lo() const { return breaks_.front(); }
    double hi() const { return breaks_.back(); }

    PiecewisePoly derivative() const;
    /// Continuous antiderivative vanishing at the left endpoint.
    PiecewisePoly antiderivative() const;
    PiecewisePoly scaled(double c) const;
    /// Sum with another piecewise polynomial over the same span (breakpoints merged).
    PiecewisePoly plus(const PiecewisePoly& other) const;
    /// The reflected polynomial x -> p(lo + hi - x).
    PiecewisePoly reflected() const;

    /// Largest |left value - right value| over interior breakpoints.
    double max_breakpoint_jump() const;
    double max_abs_coefficient() const;

private:
    size_t piece_index(double x) const;
    std::vector<double> breaks_;
    std::vector<std::vector<double>> coeffs_;
};

} // namespace fracdhk
