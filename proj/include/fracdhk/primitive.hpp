#pragma once

#include "fracdhk/interval.hpp"
#include "fracdhk/piecewise_poly.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracdhk {

class Part;
using PartPtr = std::shared_ptr<const Part>;
using Parts = std::vector<PartPtr>;

/// One additive component of a Primitive. Parts are immutable; structural
/// operations return fresh parts. The exact_* hooks return std::nullopt when
/// the part cannot produce the result in closed form, in which case the
/// Primitive falls back to quadrature-backed nodes.
class Part {
public:
    virtual ~Part() = default;

    virtual double eval(double x) const = 0;
    virtual void collect_breaks(std::vector<double>& out) const { (void)out; }
    /// Absolute evaluation-noise estimate (0 for closed forms).
    virtual double noise() const { return 0.0; }
    virtual PartPtr scaled(double c) const = 0;

    /// Antiderivative vanishing at a.
    virtual std::optional<Parts> exact_antiderivative(double a) const { return std::nullopt; }
    virtual std::optional<Parts> exact_derivative() const { return std::nullopt; }
    /// Left Riemann-Liouville integral of order mu from a.
    virtual std::optional<Parts> exact_frac_integral(double a, double mu) const {
        return std::nullopt;
    }
    /// The part x -> eval(a + b - x); nullptr when only the generic
    /// wrapper (applied by the Primitive layer) is available.
    virtual PartPtr reflected(double a, double b) const {
        (void)a;
        (void)b;
        return nullptr;
    }

    virtual nlohmann::json to_json() const = 0;
    virtual std::string backend_name() const = 0;
};

/// Continuous, pointwise-evaluable function on [a,b], stored as a sum of
/// parts (piecewise polynomial, power sum, trig sum, fractional-integral
/// images, quadrature nodes). The primitive representation of D_HK.
class Primitive {
public:
    Primitive(Interval iv, Parts parts);

    const Interval& interval() const { return iv_; }
    double eval(double x) const;
    double operator()(double x) const { return eval(x); }

    /// Sorted interior breakpoints of all parts (kinks, spline knots, ...).
    std::vector<double> breakpoints() const;
    double noise() const;
    /// True when every part evaluates in closed form (no quadrature nodes).
    bool exact_backend() const;

    Primitive scaled(double c) const;
    Primitive plus(const Primitive& other) const;
    Primitive plus_constant(double c) const;
    /// Subtract eval(x0) so the result vanishes at x0.
    Primitive vanishing_at(double x0) const;
    Primitive reflected() const;

    /// Antiderivative x -> int_a^x of this, vanishing at a.
    Primitive antiderivative() const;
    /// J_a^mu applied to this function, mu > 0; exact per part where possible.
    Primitive frac_integral(double mu) const;
    /// Right-sided J_{b-}^mu applied to this function via direct quadrature.
    Primitive frac_integral_right_direct(double mu) const;

    /// Closed-form derivative when every part supplies one (piecewise
    /// polynomial jumps are NOT checked here; reduce_order owns that).
    std::optional<Primitive> exact_derivative() const;
    /// Break-aware central-difference derivative (mixes exact parts with a
    /// numeric node over the rest).
    Primitive numeric_derivative() const;

    /// Max |eval| over a refined grid with local parabolic sharpening.
    double sup_abs(int coarse = 1025, int refinements = 2) const;

    const Parts& parts() const { return parts_; }

    nlohmann::json to_json() const;
    static Primitive from_json(const nlohmann::json& j);

    // Constructors for the standard backends.
    static Primitive zero(Interval iv);
    static Primitive constant(Interval iv, double value);
    static Primitive piecewise(Interval iv, PiecewisePoly pp);
    static Primitive from_samples(Interval iv, std::vector<double> samples, bool cubic);
    /// c * (x - a)^p, p >= 0.
    static Primitive power(Interval iv, double c, double p);
    /// amp * cos(omega (x - a) + phase).
    static Primitive cosine(Interval iv, double amp, double omega, double phase);
    static Primitive from_callable(Interval iv, std::function<double(double)> fn,
                                   std::vector<double> breaks = {}, double noise = 1e-13);

private:
    Interval iv_;
    Parts parts_;
};

/// Exact kernel integral J_a^mu of a piecewise polynomial (degree <= 10),
/// exposed for backend cross-validation tests.
PartPtr make_kernel_pp_part(double a, const PiecewisePoly& pp, double mu);

/// Quadrature-backed kernel integral over an arbitrary primitive.
PartPtr make_kernel_quad_part(std::shared_ptr<const Primitive> src, double mu);

} // namespace fracdhk
