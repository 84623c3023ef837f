#include "fracdhk/primitive.hpp"
#include "fracdhk/errors.hpp"
#include "fracdhk/quadrature.hpp"
#include "fracdhk/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace fracdhk {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// (d)^e with the conventions of one-sided limits: 0^0 = 1, 0^pos = 0, and a
// tiny clamp for negative exponents so breakpoint hits stay finite.
double pw(double d, double e, double clamp) {
    if (e == 0.0) return 1.0;
    if (d <= 0.0) {
        if (e > 0.0) return 0.0;
        d = clamp;
    } else if (e < 0.0 && d < clamp) {
        d = clamp;
    }
    return std::pow(d, e);
}

void sort_unique(std::vector<double>& v, double tol) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [tol](double x, double y) { return std::abs(x - y) <= tol; }),
            v.end());
}

} // namespace

// ---------------------------------------------------------------------------
// Piecewise polynomial part
// ---------------------------------------------------------------------------

namespace {

struct GridMeta {
    std::vector<double> samples;
    bool cubic = true;
};

class PPPart final : public Part {
public:
    PPPart(PiecewisePoly pp, std::optional<GridMeta> grid = std::nullopt)
        : pp_(std::move(pp)), grid_(std::move(grid)) {}

    double eval(double x) const override { return pp_.eval(x); }

    void collect_breaks(std::vector<double>& out) const override {
        const auto& b = pp_.breakpoints();
        for (size_t i = 1; i + 1 < b.size(); ++i) out.push_back(b[i]);
    }

    PartPtr scaled(double c) const override {
        return std::make_shared<PPPart>(pp_.scaled(c));
    }

    std::optional<Parts> exact_antiderivative(double) const override {
        return Parts{std::make_shared<PPPart>(pp_.antiderivative())};
    }

    std::optional<Parts> exact_derivative() const override {
        // Jump control at breakpoints belongs to reduce_order.
        return Parts{std::make_shared<PPPart>(pp_.derivative())};
    }

    std::optional<Parts> exact_frac_integral(double a, double mu) const override {
        if (pp_.max_degree() > 10 || pp_.lo() != a) return std::nullopt;
        return Parts{make_kernel_pp_part(a, pp_, mu)};
    }

    PartPtr reflected(double, double) const override {
        return std::make_shared<PPPart>(pp_.reflected());
    }

    nlohmann::json to_json() const override {
        if (grid_) {
            return {{"backend", "grid"},
                    {"data",
                     {{"samples", grid_->samples}, {"rule", grid_->cubic ? "cubic" : "linear"}}}};
        }
        return {{"backend", "piecewise_polynomial"},
                {"data",
                 {{"breakpoints", pp_.breakpoints()}, {"coefficients", pp_.coefficients()}}}};
    }
    std::string backend_name() const override { return grid_ ? "grid" : "piecewise_polynomial"; }

    const PiecewisePoly& pp() const { return pp_; }

private:
    PiecewisePoly pp_;
    std::optional<GridMeta> grid_;
};

// ---------------------------------------------------------------------------
// Power sums  sum_i c_i (x-a)^{p_i}  (or mirrored (b-x)^{p_i})
// ---------------------------------------------------------------------------

struct PowerTerm {
    double c;
    double p;
};

class PowerSumPart final : public Part {
public:
    PowerSumPart(double a, double b, bool from_left, std::vector<PowerTerm> terms)
        : a_(a), b_(b), from_left_(from_left), terms_(std::move(terms)) {
        for (const auto& t : terms_)
            if (t.p < 0.0) throw DomainError("PowerSumPart: exponents must be >= 0");
    }

    double eval(double x) const override {
        double d = from_left_ ? x - a_ : b_ - x;
        if (d < 0.0) d = 0.0;
        double acc = 0.0;
        for (const auto& t : terms_) acc += t.c * pw(d, t.p, 0.0);
        return acc;
    }

    PartPtr scaled(double c) const override {
        auto terms = terms_;
        for (auto& t : terms) t.c *= c;
        return std::make_shared<PowerSumPart>(a_, b_, from_left_, std::move(terms));
    }

    std::optional<Parts> exact_antiderivative(double a) const override {
        if (from_left_) {
            std::vector<PowerTerm> out;
            for (const auto& t : terms_) out.push_back({t.c / (t.p + 1.0), t.p + 1.0});
            return Parts{std::make_shared<PowerSumPart>(a_, b_, true, std::move(out))};
        }
        // int_a^x c (b-t)^p dt = c[(b-a)^{p+1} - (b-x)^{p+1}]/(p+1)
        std::vector<PowerTerm> out;
        double constant = 0.0;
        for (const auto& t : terms_) {
            out.push_back({-t.c / (t.p + 1.0), t.p + 1.0});
            constant += t.c * std::pow(b_ - a, t.p + 1.0) / (t.p + 1.0);
        }
        Parts parts{std::make_shared<PowerSumPart>(a_, b_, false, std::move(out))};
        parts.push_back(std::make_shared<PPPart>(PiecewisePoly::constant(a, b_, constant)));
        return parts;
    }

    std::optional<Parts> exact_derivative() const override {
        std::vector<PowerTerm> out;
        for (const auto& t : terms_) {
            if (t.c == 0.0 || t.p == 0.0) continue;
            if (t.p < 1.0 - 1e-12) return std::nullopt; // unbounded at the anchor
            double sign = from_left_ ? 1.0 : -1.0;
            out.push_back({sign * t.c * t.p, t.p - 1.0});
        }
        if (out.empty()) out.push_back({0.0, 0.0});
        return Parts{std::make_shared<PowerSumPart>(a_, b_, from_left_, std::move(out))};
    }

    std::optional<Parts> exact_frac_integral(double a, double mu) const override {
        if (!from_left_ || a != a_) return std::nullopt;
        std::vector<PowerTerm> out;
        for (const auto& t : terms_)
            out.push_back({t.c * specfun::gamma_ratio(t.p + 1.0, t.p + mu + 1.0), t.p + mu});
        return Parts{std::make_shared<PowerSumPart>(a_, b_, true, std::move(out))};
    }

    PartPtr reflected(double, double) const override {
        return std::make_shared<PowerSumPart>(a_, b_, !from_left_, terms_);
    }

    nlohmann::json to_json() const override {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : terms_) terms.push_back({{"c", t.c}, {"p", t.p}});
        return {{"backend", "power_sum"},
                {"data", {{"side", from_left_ ? "left" : "right"}, {"terms", terms}}}};
    }
    std::string backend_name() const override { return "power_sum"; }

    bool from_left() const { return from_left_; }
    const std::vector<PowerTerm>& terms() const { return terms_; }

private:
    double a_, b_;
    bool from_left_;
    std::vector<PowerTerm> terms_;
};

// ---------------------------------------------------------------------------
// Trigonometric sums and their fractional-integral images
// ---------------------------------------------------------------------------

struct TrigTerm {
    double amp;
    double omega; // > 0
    double phase; // referenced to x = a
};

class FracTrigPart;

class TrigSumPart final : public Part {
public:
    TrigSumPart(double a, double b, std::vector<TrigTerm> terms)
        : a_(a), b_(b), terms_(std::move(terms)) {
        for (const auto& t : terms_)
            if (!(t.omega > 0.0)) throw DomainError("TrigSumPart: omega must be positive");
    }

    double eval(double x) const override {
        double acc = 0.0;
        for (const auto& t : terms_) acc += t.amp * std::cos(t.omega * (x - a_) + t.phase);
        return acc;
    }

    PartPtr scaled(double c) const override {
        auto terms = terms_;
        for (auto& t : terms) t.amp *= c;
        return std::make_shared<TrigSumPart>(a_, b_, std::move(terms));
    }

    std::optional<Parts> exact_antiderivative(double a) const override;
    std::optional<Parts> exact_derivative() const override {
        std::vector<TrigTerm> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_)
            out.push_back({t.amp * t.omega, t.omega, t.phase + 0.5 * M_PI});
        return Parts{std::make_shared<TrigSumPart>(a_, b_, std::move(out))};
    }
    std::optional<Parts> exact_frac_integral(double a, double mu) const override;

    PartPtr reflected(double a, double b) const override {
        std::vector<TrigTerm> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_)
            out.push_back({t.amp, t.omega, -(t.omega * (b - a) + t.phase)});
        return std::make_shared<TrigSumPart>(a, b, std::move(out));
    }

    nlohmann::json to_json() const override {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : terms_)
            terms.push_back({{"amp", t.amp}, {"omega", t.omega}, {"phase", t.phase}});
        return {{"backend", "trig_sum"}, {"data", {{"terms", terms}}}};
    }
    std::string backend_name() const override { return "trig_sum"; }

    const std::vector<TrigTerm>& terms() const { return terms_; }

private:
    double a_, b_;
    std::vector<TrigTerm> terms_;
};

// J^mu image of a trig sum; each term evaluates through the incomplete-gamma
// kernel, so arbitrarily high frequencies stay accurate.
class FracTrigPart final : public Part {
public:
    FracTrigPart(double a, double b, double mu, std::vector<TrigTerm> terms)
        : a_(a), b_(b), mu_(mu), terms_(std::move(terms)) {
        if (!(mu_ > 0.0)) throw DomainError("FracTrigPart: mu must be positive");
        prune();
    }

    double eval(double x) const override {
        const double L = x - a_;
        if (L <= 0.0) return 0.0;
        double acc = 0.0;
        for (const auto& t : terms_)
            acc += t.amp * specfun::frac_cos_kernel(mu_, t.omega, t.phase, L);
        return acc;
    }

    double noise() const override { return 1e-13 * amp_scale(); }

    PartPtr scaled(double c) const override {
        auto terms = terms_;
        for (auto& t : terms) t.amp *= c;
        return std::make_shared<FracTrigPart>(a_, b_, mu_, std::move(terms));
    }

    std::optional<Parts> exact_antiderivative(double) const override {
        return Parts{std::make_shared<FracTrigPart>(a_, b_, mu_ + 1.0, terms_)};
    }

    std::optional<Parts> exact_derivative() const override {
        if (mu_ > 1.0 + 1e-12)
            return Parts{std::make_shared<FracTrigPart>(a_, b_, mu_ - 1.0, terms_)};
        if (std::abs(mu_ - 1.0) <= 1e-12)
            return Parts{std::make_shared<TrigSumPart>(a_, b_, terms_)};
        return std::nullopt; // derivative unbounded at a for mu < 1
    }

    std::optional<Parts> exact_frac_integral(double a, double mu) const override {
        if (a != a_) return std::nullopt;
        return Parts{std::make_shared<FracTrigPart>(a_, b_, mu_ + mu, terms_)};
    }

    nlohmann::json to_json() const override {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : terms_)
            terms.push_back({{"amp", t.amp}, {"omega", t.omega}, {"phase", t.phase}});
        return {{"backend", "frac_trig"}, {"data", {{"mu", mu_}, {"terms", terms}}}};
    }
    std::string backend_name() const override { return "frac_trig"; }

private:
    double amp_scale() const {
        double s = 0.0;
        for (const auto& t : terms_) s += std::abs(t.amp) * term_bound(t);
        return s;
    }
    double term_bound(const TrigTerm& t) const {
        const double len = b_ - a_;
        double smooth = std::pow(len, mu_) / specfun::gamma(mu_ + 1.0);
        double osc = 3.0 * std::pow(t.omega, -mu_) +
                     2.0 * std::pow(len, mu_ - 1.0) / (t.omega * specfun::gamma(mu_));
        return std::min(smooth, osc);
    }
    void prune() {
        double top = 0.0;
        for (const auto& t : terms_) top = std::max(top, std::abs(t.amp) * term_bound(t));
        if (top == 0.0) return;
        std::vector<TrigTerm> kept;
        for (const auto& t : terms_)
            if (std::abs(t.amp) * term_bound(t) >= 1e-16 * top) kept.push_back(t);
        terms_ = std::move(kept);
    }

    double a_, b_, mu_;
    std::vector<TrigTerm> terms_;
};

std::optional<Parts> TrigSumPart::exact_antiderivative(double a) const {
    std::vector<TrigTerm> out;
    double constant = 0.0;
    for (const auto& t : terms_) {
        out.push_back({t.amp / t.omega, t.omega, t.phase - 0.5 * M_PI});
        constant -= (t.amp / t.omega) * std::cos(t.phase - 0.5 * M_PI);
    }
    Parts parts{std::make_shared<TrigSumPart>(a_, b_, std::move(out))};
    parts.push_back(std::make_shared<PPPart>(PiecewisePoly::constant(a, b_, constant)));
    return parts;
}

std::optional<Parts> TrigSumPart::exact_frac_integral(double a, double mu) const {
    if (a != a_) return std::nullopt;
    return Parts{std::make_shared<FracTrigPart>(a_, b_, mu, terms_)};
}

// ---------------------------------------------------------------------------
// Exact J^mu of a piecewise polynomial: per-piece two-power term lists,
// closed under differentiation.
// ---------------------------------------------------------------------------

struct TwoPowerTerm {
    double coef;
    double eu; // exponent on (x - u)
    double ev; // exponent on (x - v)
};
struct InsideTerm {
    double coef;
    double e; // exponent on (x - u)
};
struct PieceBlock {
    double u, v;
    std::vector<TwoPowerTerm> full;   // active when x >= v
    std::vector<InsideTerm> inside;   // active when u < x < v
};

class PieceTermPart final : public Part {
public:
    PieceTermPart(double a, double span, std::vector<PieceBlock> blocks)
        : a_(a), span_(span), clamp_(1e-16 * span), blocks_(std::move(blocks)) {}

    double eval(double x) const override {
        double acc = 0.0;
        for (const auto& blk : blocks_) {
            if (x <= blk.u) break;
            if (x >= blk.v) {
                for (const auto& t : blk.full)
                    acc += t.coef * pw(x - blk.u, t.eu, clamp_) * pw(x - blk.v, t.ev, clamp_);
            } else {
                for (const auto& t : blk.inside) acc += t.coef * pw(x - blk.u, t.e, clamp_);
            }
        }
        return acc;
    }

    void collect_breaks(std::vector<double>& out) const override {
        for (const auto& blk : blocks_) {
            out.push_back(blk.u);
            out.push_back(blk.v);
        }
    }

    PartPtr scaled(double c) const override {
        auto blocks = blocks_;
        for (auto& blk : blocks) {
            for (auto& t : blk.full) t.coef *= c;
            for (auto& t : blk.inside) t.coef *= c;
        }
        return std::make_shared<PieceTermPart>(a_, span_, std::move(blocks));
    }

    std::optional<Parts> exact_derivative() const override {
        std::vector<PieceBlock> blocks;
        blocks.reserve(blocks_.size());
        for (const auto& blk : blocks_) {
            PieceBlock nb{blk.u, blk.v, {}, {}};
            for (const auto& t : blk.full) {
                if (t.eu != 0.0) nb.full.push_back({t.coef * t.eu, t.eu - 1.0, t.ev});
                if (t.ev != 0.0) nb.full.push_back({t.coef * t.ev, t.eu, t.ev - 1.0});
            }
            for (const auto& t : blk.inside)
                if (t.e != 0.0) nb.inside.push_back({t.coef * t.e, t.e - 1.0});
            blocks.push_back(std::move(nb));
        }
        return Parts{std::make_shared<PieceTermPart>(a_, span_, std::move(blocks))};
    }

    nlohmann::json to_json() const override { return {{"backend", "opaque"}}; }
    std::string backend_name() const override { return "opaque"; }

private:
    double a_;
    double span_;
    double clamp_;
    std::vector<PieceBlock> blocks_;
};

} // namespace

PartPtr make_kernel_pp_part(double a, const PiecewisePoly& pp, double mu) {
    const double span = pp.hi() - pp.lo();
    const auto& breaks = pp.breakpoints();
    const auto& coeffs = pp.coefficients();
    std::vector<PieceBlock> blocks;
    blocks.reserve(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) {
        PieceBlock blk{breaks[i], breaks[i + 1], {}, {}};
        const auto& c = coeffs[i];
        for (size_t j = 0; j < c.size(); ++j) {
            if (c[j] == 0.0) continue;
            // inside & leading full term: c_j * j! / Gamma(mu+j+1) * (x-u)^{mu+j}
            double lead = c[j] * specfun::gamma_ratio(static_cast<double>(j) + 1.0,
                                                      mu + static_cast<double>(j) + 1.0);
            blk.inside.push_back({lead, mu + static_cast<double>(j)});
            blk.full.push_back({lead, mu + static_cast<double>(j), 0.0});
            for (size_t r = 0; r <= j; ++r) {
                double coef = -c[j] * binom(static_cast<int>(j), static_cast<int>(r)) *
                              ((r % 2 == 0) ? 1.0 : -1.0) /
                              ((mu + static_cast<double>(r)) * specfun::gamma(mu));
                blk.full.push_back(
                    {coef, static_cast<double>(j - r), mu + static_cast<double>(r)});
            }
        }
        blocks.push_back(std::move(blk));
    }
    return std::make_shared<PieceTermPart>(a, span, std::move(blocks));
}

namespace {

// ---------------------------------------------------------------------------
// Quadrature-backed kernel integrals and numeric derivatives
// ---------------------------------------------------------------------------

class KernelQuadPart final : public Part {
public:
    KernelQuadPart(std::shared_ptr<const Primitive> src, double mu)
        : src_(std::move(src)), mu_(mu) {
        breaks_ = src_->breakpoints();
    }

    double eval(double x) const override {
        const double a = src_->interval().a;
        if (x <= a) return 0.0;
        {
            std::lock_guard lock(mutex_);
            auto it = memo_.find(x);
            if (it != memo_.end()) return it->second;
        }
        double last = a;
        for (double c : breaks_)
            if (c < x) last = std::max(last, c);
        quad::Options opts;
        opts.noise = src_->noise();
        const auto& src = *src_;
        double val = 0.0;
        if (last > a) {
            val += quad::integrate_panels(
                [&](double t) { return std::pow(x - t, mu_ - 1.0) * src.eval(t); }, a, last,
                breaks_, opts);
        }
        val += quad::integrate_jacobi([&](double t) { return src.eval(t); }, last, x,
                                      mu_ - 1.0, 0.0, opts);
        val /= specfun::gamma(mu_);
        std::lock_guard lock(mutex_);
        memo_.emplace(x, val);
        return val;
    }

    void collect_breaks(std::vector<double>& out) const override {
        out.insert(out.end(), breaks_.begin(), breaks_.end());
    }

    double noise() const override { return 4e-10 + 2.0 * src_->noise(); }

    PartPtr scaled(double c) const override {
        auto scaled_src = std::make_shared<Primitive>(src_->scaled(c));
        return std::make_shared<KernelQuadPart>(std::move(scaled_src), mu_);
    }

    std::optional<Parts> exact_antiderivative(double) const override {
        // Dirichlet/Fubini on the continuous integrand: J^1 J^mu = J^{mu+1}.
        return Parts{std::make_shared<KernelQuadPart>(src_, mu_ + 1.0)};
    }

    nlohmann::json to_json() const override { return {{"backend", "opaque"}}; }
    std::string backend_name() const override { return "opaque"; }

private:
    std::shared_ptr<const Primitive> src_;
    double mu_;
    std::vector<double> breaks_;
    mutable std::mutex mutex_;
    mutable std::map<double, double> memo_;
};

class RightKernelQuadPart final : public Part {
public:
    RightKernelQuadPart(std::shared_ptr<const Primitive> src, double mu)
        : src_(std::move(src)), mu_(mu) {
        breaks_ = src_->breakpoints();
    }

    double eval(double x) const override {
        const double b = src_->interval().b;
        if (x >= b) return 0.0;
        double first = b;
        for (double c : breaks_)
            if (c > x) first = std::min(first, c);
        quad::Options opts;
        opts.noise = src_->noise();
        const auto& src = *src_;
        double val = quad::integrate_jacobi([&](double t) { return src.eval(t); }, x, first,
                                            0.0, mu_ - 1.0, opts);
        if (first < b) {
            val += quad::integrate_panels(
                [&](double t) { return std::pow(t - x, mu_ - 1.0) * src.eval(t); }, first, b,
                breaks_, opts);
        }
        return val / specfun::gamma(mu_);
    }

    void collect_breaks(std::vector<double>& out) const override {
        out.insert(out.end(), breaks_.begin(), breaks_.end());
    }
    double noise() const override { return 4e-10 + 2.0 * src_->noise(); }

    PartPtr scaled(double c) const override {
        auto scaled_src = std::make_shared<Primitive>(src_->scaled(c));
        return std::make_shared<RightKernelQuadPart>(std::move(scaled_src), mu_);
    }

    nlohmann::json to_json() const override { return {{"backend", "opaque"}}; }
    std::string backend_name() const override { return "opaque"; }

private:
    std::shared_ptr<const Primitive> src_;
    double mu_;
    std::vector<double> breaks_;
};

class NumDerivPart final : public Part {
public:
    explicit NumDerivPart(std::shared_ptr<const Primitive> src) : src_(std::move(src)) {
        breaks_ = src_->breakpoints();
        const double len = src_->interval().length();
        hbase_ = std::max(3e-4, std::cbrt(std::max(src_->noise(), 1e-15))) * len;
    }

    double eval(double x) const override {
        const auto& iv = src_->interval();
        const double len = iv.length();
        double dist = len;
        for (double c : breaks_) dist = std::min(dist, std::abs(x - c));
        double h = std::min(hbase_, 0.45 * std::max(dist, 1e-13 * len));
        h = std::max(h, 1e-9 * len);
        const auto& f = *src_;
        auto central = [&](double hh) { return (f.eval(x + hh) - f.eval(x - hh)) / (2.0 * hh); };
        auto fwd = [&](double hh) {
            return (-3.0 * f.eval(x) + 4.0 * f.eval(x + hh) - f.eval(x + 2.0 * hh)) / (2.0 * hh);
        };
        auto bwd = [&](double hh) {
            return (3.0 * f.eval(x) - 4.0 * f.eval(x - hh) + f.eval(x - 2.0 * hh)) / (2.0 * hh);
        };
        if (x - iv.a < 2.0 * h) {
            double hh = std::min(h, (iv.b - x) / 2.1);
            return (4.0 * fwd(hh / 2.0) - fwd(hh)) / 3.0;
        }
        if (iv.b - x < 2.0 * h) {
            double hh = std::min(h, (x - iv.a) / 2.1);
            return (4.0 * bwd(hh / 2.0) - bwd(hh)) / 3.0;
        }
        return (4.0 * central(h / 2.0) - central(h)) / 3.0;
    }

    void collect_breaks(std::vector<double>& out) const override {
        out.insert(out.end(), breaks_.begin(), breaks_.end());
    }

    double noise() const override {
        return std::max(1e-9, 3.0 * src_->noise() / hbase_);
    }

    PartPtr scaled(double c) const override {
        auto scaled_src = std::make_shared<Primitive>(src_->scaled(c));
        return std::make_shared<NumDerivPart>(std::move(scaled_src));
    }

    nlohmann::json to_json() const override { return {{"backend", "opaque"}}; }
    std::string backend_name() const override { return "opaque"; }

private:
    std::shared_ptr<const Primitive> src_;
    std::vector<double> breaks_;
    double hbase_;
};

class CallablePart final : public Part {
public:
    CallablePart(std::function<double(double)> fn, std::vector<double> breaks, double noise)
        : fn_(std::move(fn)), breaks_(std::move(breaks)), noise_(noise) {}

    double eval(double x) const override { return fn_(x); }
    void collect_breaks(std::vector<double>& out) const override {
        out.insert(out.end(), breaks_.begin(), breaks_.end());
    }
    double noise() const override { return noise_; }
    PartPtr scaled(double c) const override {
        auto fn = fn_;
        return std::make_shared<CallablePart>([fn, c](double x) { return c * fn(x); }, breaks_,
                                              std::abs(c) * noise_);
    }
    nlohmann::json to_json() const override { return {{"backend", "opaque"}}; }
    std::string backend_name() const override { return "opaque"; }

private:
    std::function<double(double)> fn_;
    std::vector<double> breaks_;
    double noise_;
};

// Fallback reflection wrapper; double reflection unwraps.
class ReflectedPart final : public Part {
public:
    ReflectedPart(PartPtr inner, double a, double b) : inner_(std::move(inner)), a_(a), b_(b) {}

    double eval(double x) const override { return inner_->eval(a_ + b_ - x); }
    void collect_breaks(std::vector<double>& out) const override {
        std::vector<double> inner;
        inner_->collect_breaks(inner);
        for (double c : inner) out.push_back(a_ + b_ - c);
    }
    double noise() const override { return inner_->noise(); }
    PartPtr scaled(double c) const override {
        return std::make_shared<ReflectedPart>(inner_->scaled(c), a_, b_);
    }
    std::optional<Parts> exact_derivative() const override {
        auto d = inner_->exact_derivative();
        if (!d) return std::nullopt;
        Parts out;
        for (const auto& p : *d)
            out.push_back(std::make_shared<ReflectedPart>(p->scaled(-1.0), a_, b_));
        return out;
    }
    PartPtr reflected(double a, double b) const override {
        if (a == a_ && b == b_) return inner_;
        return nullptr;
    }
    nlohmann::json to_json() const override { return {{"backend", "opaque"}}; }
    std::string backend_name() const override { return "opaque"; }

private:
    PartPtr inner_;
    double a_, b_;
};

} // namespace

// ---------------------------------------------------------------------------
// Primitive
// ---------------------------------------------------------------------------

Primitive::Primitive(Interval iv, Parts parts) : iv_(iv), parts_(std::move(parts)) {}

double Primitive::eval(double x) const {
    double acc = 0.0;
    for (const auto& p : parts_) acc += p->eval(x);
    return acc;
}

std::vector<double> Primitive::breakpoints() const {
    std::vector<double> out;
    for (const auto& p : parts_) p->collect_breaks(out);
    std::vector<double> inner;
    for (double c : out)
        if (c > iv_.a && c < iv_.b) inner.push_back(c);
    sort_unique(inner, 1e-15 * iv_.length());
    return inner;
}

double Primitive::noise() const {
    double acc = 0.0;
    for (const auto& p : parts_) acc += p->noise();
    return acc;
}

bool Primitive::exact_backend() const {
    for (const auto& p : parts_)
        if (p->backend_name() == "opaque") return false;
    return true;
}

Primitive Primitive::scaled(double c) const {
    Parts out;
    out.reserve(parts_.size());
    for (const auto& p : parts_) out.push_back(p->scaled(c));
    return Primitive(iv_, std::move(out));
}

Primitive Primitive::plus(const Primitive& other) const {
    if (!(iv_ == other.iv_)) throw DomainError("Primitive::plus: interval mismatch");
    Parts out = parts_;
    out.insert(out.end(), other.parts_.begin(), other.parts_.end());
    return Primitive(iv_, std::move(out));
}

Primitive Primitive::plus_constant(double c) const {
    if (c == 0.0) return *this;
    Parts out = parts_;
    out.push_back(std::make_shared<PPPart>(PiecewisePoly::constant(iv_.a, iv_.b, c)));
    return Primitive(iv_, std::move(out));
}

Primitive Primitive::vanishing_at(double x0) const { return plus_constant(-eval(x0)); }

Primitive Primitive::reflected() const {
    Parts out;
    out.reserve(parts_.size());
    for (const auto& p : parts_) {
        if (auto r = p->reflected(iv_.a, iv_.b))
            out.push_back(std::move(r));
        else
            out.push_back(std::make_shared<ReflectedPart>(p, iv_.a, iv_.b));
    }
    return Primitive(iv_, std::move(out));
}

Primitive Primitive::antiderivative() const {
    Parts exact;
    Parts leftover;
    for (const auto& p : parts_) {
        if (auto r = p->exact_antiderivative(iv_.a))
            exact.insert(exact.end(), r->begin(), r->end());
        else
            leftover.push_back(p);
    }
    if (!leftover.empty()) {
        auto sub = std::make_shared<Primitive>(iv_, std::move(leftover));
        exact.push_back(std::make_shared<KernelQuadPart>(std::move(sub), 1.0));
    }
    if (exact.empty()) return zero(iv_);
    return Primitive(iv_, std::move(exact));
}

Primitive Primitive::frac_integral(double mu) const {
    if (mu == 0.0) return *this;
    if (!(mu > 0.0)) throw DomainError("frac_integral: order must be >= 0");
    Parts exact;
    Parts leftover;
    for (const auto& p : parts_) {
        if (auto r = p->exact_frac_integral(iv_.a, mu))
            exact.insert(exact.end(), r->begin(), r->end());
        else
            leftover.push_back(p);
    }
    if (!leftover.empty()) {
        auto sub = std::make_shared<Primitive>(iv_, std::move(leftover));
        exact.push_back(std::make_shared<KernelQuadPart>(std::move(sub), mu));
    }
    if (exact.empty()) return zero(iv_);
    return Primitive(iv_, std::move(exact));
}

Primitive Primitive::frac_integral_right_direct(double mu) const {
    if (mu == 0.0) return *this;
    if (!(mu > 0.0)) throw DomainError("frac_integral_right_direct: order must be >= 0");
    auto self = std::make_shared<Primitive>(*this);
    return Primitive(iv_, {std::make_shared<RightKernelQuadPart>(std::move(self), mu)});
}

std::optional<Primitive> Primitive::exact_derivative() const {
    Parts out;
    for (const auto& p : parts_) {
        auto d = p->exact_derivative();
        if (!d) return std::nullopt;
        out.insert(out.end(), d->begin(), d->end());
    }
    if (out.empty()) return zero(iv_);
    return Primitive(iv_, std::move(out));
}

Primitive Primitive::numeric_derivative() const {
    Parts exact;
    Parts leftover;
    for (const auto& p : parts_) {
        if (auto d = p->exact_derivative())
            exact.insert(exact.end(), d->begin(), d->end());
        else
            leftover.push_back(p);
    }
    if (!leftover.empty()) {
        auto sub = std::make_shared<Primitive>(iv_, std::move(leftover));
        exact.push_back(std::make_shared<NumDerivPart>(std::move(sub)));
    }
    if (exact.empty()) return zero(iv_);
    return Primitive(iv_, std::move(exact));
}

double Primitive::sup_abs(int coarse, int refinements) const {
    int n = coarse;
    for (int r = 0; r < refinements; ++r) n = 2 * n - 1;
    const double h = iv_.length() / static_cast<double>(n - 1);
    double best = 0.0;
    int best_i = 0;
    std::vector<double> vals(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = iv_.a + h * i;
        vals[static_cast<size_t>(i)] = eval(x);
        double v = std::abs(vals[static_cast<size_t>(i)]);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    for (double c : breakpoints()) best = std::max(best, std::abs(eval(c)));
    // golden-section sharpening around the grid argmax
    double lo = iv_.a + h * std::max(0, best_i - 1);
    double hi = iv_.a + h * std::min(n - 1, best_i + 1);
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = std::abs(eval(x1)), f2 = std::abs(eval(x2));
    for (int it = 0; it < 40 && hi - lo > 1e-12 * iv_.length(); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = std::abs(eval(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = std::abs(eval(x1));
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

Primitive Primitive::zero(Interval iv) {
    return Primitive(iv, {std::make_shared<PPPart>(PiecewisePoly::constant(iv.a, iv.b, 0.0))});
}

Primitive Primitive::constant(Interval iv, double value) {
    return Primitive(iv, {std::make_shared<PPPart>(PiecewisePoly::constant(iv.a, iv.b, value))});
}

Primitive Primitive::piecewise(Interval iv, PiecewisePoly pp) {
    if (std::abs(pp.lo() - iv.a) > 1e-14 * iv.length() ||
        std::abs(pp.hi() - iv.b) > 1e-14 * iv.length())
        throw DomainError("Primitive::piecewise: polynomial span must equal the interval");
    return Primitive(iv, {std::make_shared<PPPart>(std::move(pp))});
}

Primitive Primitive::from_samples(Interval iv, std::vector<double> samples, bool cubic) {
    auto pp = PiecewisePoly::from_samples(iv.a, iv.b, samples, cubic);
    GridMeta meta{std::move(samples), cubic};
    return Primitive(iv, {std::make_shared<PPPart>(std::move(pp), std::move(meta))});
}

Primitive Primitive::power(Interval iv, double c, double p) {
    return Primitive(iv,
                     {std::make_shared<PowerSumPart>(iv.a, iv.b, true,
                                                     std::vector<PowerTerm>{{c, p}})});
}

Primitive Primitive::cosine(Interval iv, double amp, double omega, double phase) {
    return Primitive(iv, {std::make_shared<TrigSumPart>(iv.a, iv.b,
                                                        std::vector<TrigTerm>{{amp, omega, phase}})});
}

Primitive Primitive::from_callable(Interval iv, std::function<double(double)> fn,
                                   std::vector<double> breaks, double noise) {
    return Primitive(iv, {std::make_shared<CallablePart>(std::move(fn), std::move(breaks), noise)});
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json Primitive::to_json() const {
    nlohmann::json interval = {{"a", iv_.a}, {"b", iv_.b}};
    if (!exact_backend()) {
        // Lossy fallback: sample on the default grid.
        const int n = 4097;
        std::vector<double> samples(n);
        for (int i = 0; i < n; ++i)
            samples[static_cast<size_t>(i)] = eval(iv_.a + iv_.length() * i / (n - 1.0));
        return {{"interval", interval},
                {"backend", "grid"},
                {"data", {{"samples", samples}, {"rule", "cubic"}}}};
    }
    if (parts_.size() == 1) {
        nlohmann::json j = parts_[0]->to_json();
        j["interval"] = interval;
        return j;
    }
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : parts_) parts.push_back(p->to_json());
    return {{"interval", interval}, {"backend", "sum"}, {"data", {{"parts", parts}}}};
}

namespace {

PartPtr part_from_json(const Interval& iv, const nlohmann::json& j);

Parts parts_from_json(const Interval& iv, const nlohmann::json& j) {
    const std::string backend = j.at("backend").get<std::string>();
    if (backend == "sum") {
        Parts out;
        for (const auto& pj : j.at("data").at("parts")) out.push_back(part_from_json(iv, pj));
        return out;
    }
    return {part_from_json(iv, j)};
}

PartPtr part_from_json(const Interval& iv, const nlohmann::json& j) {
    const std::string backend = j.at("backend").get<std::string>();
    const auto& data = j.at("data");
    if (backend == "piecewise_polynomial") {
        PiecewisePoly pp(data.at("breakpoints").get<std::vector<double>>(),
                         data.at("coefficients").get<std::vector<std::vector<double>>>());
        return std::make_shared<PPPart>(std::move(pp));
    }
    if (backend == "grid") {
        auto samples = data.at("samples").get<std::vector<double>>();
        bool cubic = data.at("rule").get<std::string>() == "cubic";
        auto pp = PiecewisePoly::from_samples(iv.a, iv.b, samples, cubic);
        return std::make_shared<PPPart>(std::move(pp), GridMeta{std::move(samples), cubic});
    }
    if (backend == "power_sum") {
        bool left = data.at("side").get<std::string>() == "left";
        std::vector<PowerTerm> terms;
        for (const auto& t : data.at("terms"))
            terms.push_back({t.at("c").get<double>(), t.at("p").get<double>()});
        return std::make_shared<PowerSumPart>(iv.a, iv.b, left, std::move(terms));
    }
    if (backend == "trig_sum" || backend == "frac_trig") {
        std::vector<TrigTerm> terms;
        for (const auto& t : data.at("terms"))
            terms.push_back({t.at("amp").get<double>(), t.at("omega").get<double>(),
                             t.at("phase").get<double>()});
        if (backend == "trig_sum")
            return std::make_shared<TrigSumPart>(iv.a, iv.b, std::move(terms));
        return std::make_shared<FracTrigPart>(iv.a, iv.b, data.at("mu").get<double>(),
                                              std::move(terms));
    }
    throw DomainError("Primitive::from_json: unknown backend '" + backend + "'");
}

} // namespace

Primitive Primitive::from_json(const nlohmann::json& j) {
    const auto& ij = j.at("interval");
    Interval iv(ij.at("a").get<double>(), ij.at("b").get<double>());
    return Primitive(iv, parts_from_json(iv, j));
}

} // namespace fracdhk
