#pragma once

// Convex-analysis toolkit: scalar convex functions with evaluable values and
// subdifferentials, Legendre conjugation, Moreau envelopes, and the coupled
// energy/pressure-function constructions used by the dissipation diagnostics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <utility>
#include <vector>

#include "brinkman/common.hpp"

namespace brinkman {

/// Closed interval [lo, hi] of slopes; hi may be +inf. `empty` signals an
/// empty subdifferential.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = false;

    static Interval point(double v) { return {v, v, false}; }
    static Interval none() { return {0.0, 0.0, true}; }

    bool contains(double v, double tol = 0.0) const {
        return !empty && v >= lo - tol && v <= hi + tol;
    }
};

/// A proper convex lower-semicontinuous function on the real line.
///
/// Two representations exist: closed_form functions evaluate through caller
/// supplied callables; tabulated functions store a monotone piecewise-linear
/// derivative (with possible jumps at the nodes, i.e. kinks of the function)
/// on a uniform grid, with node values kept exactly consistent with the
/// derivative data. Values are immutable after construction.
class ConvexScalarFunction {
public:
    enum class Repr { closed_form, tabulated };

    using ValueFn = std::function<double(double)>;
    using SubdiffFn = std::function<Interval(double)>;
    using CurvatureFn = std::function<double(double)>;

    ConvexScalarFunction() = default;

    static ConvexScalarFunction closed_form(double dom_lo, double dom_hi,
                                            ValueFn value, SubdiffFn subdiff,
                                            CurvatureFn curvature = nullptr) {
        if (!(dom_lo < dom_hi)) throw Error("convex: empty domain");
        ConvexScalarFunction f;
        f.repr_ = Repr::closed_form;
        f.lo_ = dom_lo;
        f.hi_ = dom_hi;
        f.value_ = std::move(value);
        f.subdiff_ = std::move(subdiff);
        f.curvature_ = std::move(curvature);
        return f;
    }

    /// Build a tabulated function on the uniform grid of [dom_lo, dom_hi]
    /// with n nodes. dminus/dplus are the one-sided derivatives at the nodes
    /// (dminus[0] is ignored, dplus[n-1] may be +inf to signal a domain
    /// wall). If `values` is empty, node values are the exact integral of
    /// the piecewise-linear derivative starting from value_at_lo.
    static ConvexScalarFunction tabulated(double dom_lo, double dom_hi,
                                          std::vector<double> dminus,
                                          std::vector<double> dplus,
                                          std::vector<double> values = {},
                                          double value_at_lo = 0.0) {
        const std::size_t n = dplus.size();
        if (n < 2 || dminus.size() != n)
            throw Error("convex: tabulated needs >= 2 nodes");
        if (!(dom_lo < dom_hi)) throw Error("convex: empty domain");
        // monotonicity of the stored subgradients
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (dplus[i] > dminus[i + 1] + 1e-12 * (1.0 + std::fabs(dplus[i])))
                throw Error("convex: derivative samples not monotone");
        }
        for (std::size_t i = 0; i < n; ++i)
            if (dminus[i] > dplus[i]) dminus[i] = dplus[i];

        ConvexScalarFunction f;
        f.repr_ = Repr::tabulated;
        f.lo_ = dom_lo;
        f.hi_ = dom_hi;
        f.dm_ = std::move(dminus);
        f.dp_ = std::move(dplus);
        const double h = (dom_hi - dom_lo) / static_cast<double>(n - 1);
        f.h_ = h;
        if (values.empty()) {
            f.val_.resize(n);
            f.val_[0] = value_at_lo;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                double dl = f.dp_[i];
                double dr = f.dm_[i + 1];
                f.val_[i + 1] = f.val_[i] + 0.5 * h * (dl + dr);
            }
        } else {
            if (values.size() != n) throw Error("convex: values size mismatch");
            f.val_ = std::move(values);
        }
        return f;
    }

    Repr representation() const { return repr_; }
    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }

    /// f(a); +inf outside the domain.
    double operator()(double a) const {
        if (a < lo_ || a > hi_) return kInf;
        if (repr_ == Repr::closed_form) return value_(a);
        return tab_value(a);
    }

    /// [inf dF(a), sup dF(a)]; empty signal where the subdifferential is
    /// empty (outside the closure of the domain).
    Interval subdifferential_at(double a) const {
        if (a < lo_ || a > hi_) return Interval::none();
        if (repr_ == Repr::closed_form) return subdiff_(a);
        return tab_subdiff(a);
    }

    /// Single-valued derivative; throws when the subdifferential at a is
    /// empty; returns the midpoint at a kink with finite endpoints.
    double derivative(double a) const {
        Interval s = subdifferential_at(a);
        if (s.empty) throw Error("convex: empty subdifferential at a=" + std::to_string(a));
        if (std::isinf(s.hi)) return s.lo;
        return 0.5 * (s.lo + s.hi);
    }

    /// Second derivative (density). For tabulated functions this is the
    /// slope of the piecewise-linear derivative in the cell containing a.
    double curvature(double a) const {
        if (repr_ == Repr::closed_form) {
            if (curvature_) return curvature_(a);
            throw Error("convex: curvature not available");
        }
        if (a < lo_ || a > hi_) return 0.0;
        std::size_t i = cell_index(a);
        double dl = dp_[i], dr = dm_[i + 1];
        return (dr - dl) / h_;
    }

    bool has_curvature() const {
        return repr_ == Repr::tabulated || static_cast<bool>(curvature_);
    }

    std::size_t node_count() const { return val_.size(); }

    /// CSV serialization (columns: a, f(a), inf_df, sup_df) sampled on the
    /// tabulation grid, or on `samples` uniform points for closed forms.
    void write_csv(std::ostream& os, std::size_t samples = 257) const;

private:
    double tab_value(double a) const {
        if (val_.empty()) throw Error("convex: empty tabulation");
        if (a >= hi_) return val_.back();
        std::size_t i = cell_index(a);
        double x = a - (lo_ + static_cast<double>(i) * h_);
        double dl = dp_[i], dr = dm_[i + 1];
        if (std::isinf(dl)) return val_[i];  // domain wall
        return val_[i] + dl * x + 0.5 * (dr - dl) / h_ * x * x;
    }

    Interval tab_subdiff(double a) const {
        std::size_t n = val_.size();
        double t = (a - lo_) / h_;
        std::size_t i = static_cast<std::size_t>(std::llround(t));
        if (i < n && std::fabs(t - static_cast<double>(i)) < 1e-9) {
            return {dm_[i], dp_[i], false};  // at a node: one-sided pair
        }
        i = cell_index(a);
        double x = a - (lo_ + static_cast<double>(i) * h_);
        double dl = dp_[i], dr = dm_[i + 1];
        if (std::isinf(dl)) return {dl, dl, false};
        return Interval::point(dl + (dr - dl) / h_ * x);
    }

    std::size_t cell_index(double a) const {
        double t = (a - lo_) / h_;
        auto i = static_cast<long long>(t);
        long long last = static_cast<long long>(val_.size()) - 2;
        if (i < 0) i = 0;
        if (i > last) i = last;
        return static_cast<std::size_t>(i);
    }

    Repr repr_ = Repr::closed_form;
    double lo_ = 0.0, hi_ = 1.0;
    ValueFn value_;
    SubdiffFn subdiff_;
    CurvatureFn curvature_;
    // tabulated data
    double h_ = 0.0;
    std::vector<double> dm_, dp_, val_;
};

inline void ConvexScalarFunction::write_csv(std::ostream& os, std::size_t samples) const {
    os << "a,f,inf_df,sup_df\n";
    std::size_t n = (repr_ == Repr::tabulated) ? val_.size() : samples;
    for (std::size_t i = 0; i < n; ++i) {
        double a = lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(n - 1);
        Interval s = subdifferential_at(a);
        os << a << ',' << (*this)(a) << ',' << s.lo << ',' << s.hi << '\n';
    }
}

namespace detail {

/// sup{a in [lo,hi] : inf dF(a) <= b} by bisection (monotone predicate).
inline double argmax_upper(const ConvexScalarFunction& f, double b, double lo, double hi) {
    auto le = [&](double a) {
        Interval s = f.subdifferential_at(a);
        return !s.empty && s.lo <= b;
    };
    if (!le(lo)) return lo;
    if (le(hi)) return hi;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        double m = 0.5 * (lo + hi);
        if (m == lo || m == hi) break;
        (le(m) ? lo : hi) = m;
    }
    return lo;
}

/// inf{a in [lo,hi] : sup dF(a) >= b} by bisection.
inline double argmax_lower(const ConvexScalarFunction& f, double b, double lo, double hi) {
    auto ge = [&](double a) {
        Interval s = f.subdifferential_at(a);
        return !s.empty && s.hi >= b;
    };
    if (ge(lo)) return lo;
    if (!ge(hi)) return hi;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        double m = 0.5 * (lo + hi);
        if (m == lo || m == hi) break;
        (ge(m) ? hi : lo) = m;
    }
    return hi;
}

inline void clip_finite_window(const ConvexScalarFunction& f, double& lo, double& hi) {
    lo = f.domain_lo();
    hi = f.domain_hi();
    if (std::isinf(lo)) lo = -1e12;
    if (std::isinf(hi)) hi = 1e12;
    // shrink to where f is finite (tabulated walls carry +inf derivative,
    // closed forms may return +inf inside the nominal domain bounds)
    while (hi > lo && std::isinf(f(hi))) hi = lo + (hi - lo) * (1.0 - 1e-12);
}

}  // namespace detail

struct ConjugateOptions {
    double b_lo = 0.0;
    double b_hi = 4.0;
    std::size_t nodes = 4096;
};

/// Legendre conjugate f*(b) = sup_a ab - f(a), tabulated on [b_lo, b_hi].
/// The supremum is located through the monotone subdifferential (exact for
/// the stored representation up to bisection round-off).
inline ConvexScalarFunction conjugate(const ConvexScalarFunction& f,
                                      const ConjugateOptions& opt = {}) {
    double alo, ahi;
    detail::clip_finite_window(f, alo, ahi);
    if (!(alo < ahi) || std::isinf(f(0.5 * (alo + ahi))))
        throw Error("conjugate: function is +inf everywhere on its domain");
    // proper check on a few samples
    for (int k = 0; k <= 8; ++k) {
        double a = alo + (ahi - alo) * k / 8.0;
        double v = f(a);
        if (v == -kInf || std::isnan(v)) throw Error("conjugate: improper function");
    }

    const std::size_t n = opt.nodes;
    std::vector<double> dm(n), dp(n), val(n);
    const double db = (opt.b_hi - opt.b_lo) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        double b = opt.b_lo + db * static_cast<double>(j);
        double a_hi = detail::argmax_upper(f, b, alo, ahi);
        double a_lo = detail::argmax_lower(f, b, alo, ahi);
        double fa = f(a_hi);
        if (std::isinf(fa)) {
            a_hi = a_hi - 1e-12 * (ahi - alo);
            fa = f(a_hi);
        }
        val[j] = a_hi * b - fa;
        // dF*(b) = argmax interval [a_lo, a_hi]
        dm[j] = a_lo;
        dp[j] = a_hi;
    }
    return ConvexScalarFunction::tabulated(opt.b_lo, opt.b_hi, std::move(dm),
                                           std::move(dp), std::move(val));
}

/// Convenience: sup d f*(b) without building the full conjugate.
inline double conjugate_sup_subdiff(const ConvexScalarFunction& f, double b) {
    double alo, ahi;
    detail::clip_finite_window(f, alo, ahi);
    return detail::argmax_upper(f, b, alo, ahi);
}

/// f*(b) evaluated pointwise (no tabulation).
inline double conjugate_value(const ConvexScalarFunction& f, double b) {
    double alo, ahi;
    detail::clip_finite_window(f, alo, ahi);
    double a = detail::argmax_upper(f, b, alo, ahi);
    double fa = f(a);
    if (std::isinf(fa)) {
        a -= 1e-12 * (ahi - alo);
        fa = f(a);
    }
    return a * b - fa;
}

/// Moreau envelope of f_star with parameter delta:
///   f_delta(b) = inf_theta f_star(theta) + |theta - b|^2 / (2 delta).
/// Differentiable with derivative (b - theta*)/delta <= inf d f_star(b).
inline ConvexScalarFunction moreau_envelope(const ConvexScalarFunction& f_star,
                                            double delta,
                                            const ConjugateOptions& opt = {}) {
    if (!(delta > 0.0)) throw Error("moreau: delta must be positive");
    double tlo, thi;
    detail::clip_finite_window(f_star, tlo, thi);
    const std::size_t n = opt.nodes;
    std::vector<double> dm(n), dp(n), val(n);
    const double db = (opt.b_hi - opt.b_lo) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        double b = opt.b_lo + db * static_cast<double>(j);
        // minimizer: 0 in dF(theta) + (theta - b)/delta, monotone in theta
        auto neg = [&](double th) {
            Interval s = f_star.subdifferential_at(th);
            double g = (s.empty ? kInf : s.lo) + (th - b) / delta;
            return g <= 0.0;
        };
        double lo = tlo, hi = thi;
        if (!neg(lo)) {
            hi = lo;
        } else if (neg(hi)) {
            lo = hi;
        } else {
            for (int it = 0; it < 200; ++it) {
                double m = 0.5 * (lo + hi);
                if (m == lo || m == hi) break;
                (neg(m) ? lo : hi) = m;
            }
        }
        double th = 0.5 * (lo + hi);
        double fs = f_star(th);
        if (std::isinf(fs)) { th = tlo; fs = f_star(th); }
        val[j] = fs + (th - b) * (th - b) / (2.0 * delta);
        dm[j] = dp[j] = (b - th) / delta;
    }
    // enforce monotone derivative against bisection jitter
    for (std::size_t j = 1; j < n; ++j) {
        if (dm[j] < dp[j - 1]) dm[j] = dp[j] = dp[j - 1];
    }
    return ConvexScalarFunction::tabulated(opt.b_lo, opt.b_hi, std::move(dm),
                                           std::move(dp), std::move(val));
}

/// A nondecreasing scalar map with an evaluable derivative (used to couple
/// density energies to pressure functions).
struct MonotoneMap {
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    static MonotoneMap identity() {
        return {[](double b) { return b; }, [](double) { return 1.0; }};
    }
};

struct CouplingOptions {
    double b_hi = 4.0;       // pressure window [0, b_hi]
    std::size_t nodes = 4096;
    double check_tol = 1e-6; // sampled validation tolerance
};

/// Build the pressure function z from a density energy e coupled to f:
///   z(0) = 0,  z'(b) = integral_0^b f*'(beta) S'(beta) dbeta,
/// where de(a) = {S(b) : b in df(a)}. The compatibility of (e, S, f) is
/// checked by sampling; a non-monotone S or e(0) != 0 is rejected.
inline ConvexScalarFunction z_from_e(const ConvexScalarFunction& e,
                                     const MonotoneMap& S,
                                     const ConvexScalarFunction& f,
                                     const CouplingOptions& opt = {}) {
    if (std::fabs(e(std::max(0.0, e.domain_lo()))) > 1e-12)
        throw Error("z_from_e: e(0) must vanish");
    // monotone S
    double prev = S.value(0.0);
    for (std::size_t k = 1; k <= 64; ++k) {
        double b = opt.b_hi * static_cast<double>(k) / 64.0;
        double cur = S.value(b);
        if (cur < prev - 1e-12 * (1.0 + std::fabs(prev)))
            throw Error("z_from_e: S is not nondecreasing");
        prev = cur;
    }
    // compatibility de(a) = S(df(a)) on samples of int dom(f)
    {
        double alo, ahi;
        detail::clip_finite_window(f, alo, ahi);
        double a0 = std::max(alo, 1e-9) + 1e-6 * (ahi - alo);
        for (int k = 1; k <= 16; ++k) {
            double a = a0 + (ahi - a0) * (k / 17.0);
            Interval df = f.subdifferential_at(a);
            Interval de = e.subdifferential_at(a);
            if (df.empty || de.empty) continue;
            if (df.hi > opt.b_hi) continue;  // outside the window we integrate
            double want = S.value(df.lo);
            double got = de.lo;
            if (std::fabs(want - got) > opt.check_tol * (1.0 + std::fabs(want)))
                throw Error("z_from_e: de(a) != S(df(a)) at a=" + std::to_string(a));
        }
    }

    const std::size_t n = opt.nodes;
    const double db = opt.b_hi / static_cast<double>(n - 1);
    double alo, ahi;
    detail::clip_finite_window(f, alo, ahi);
    std::vector<double> zp(n), zval(n);
    zp[0] = 0.0;
    // 4-point Gauss-Legendre per cell: f*' can have unbounded slope at 0
    // (power laws), where the plain trapezoid rule loses digits.
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    auto integrand = [&](double b) {
        return detail::argmax_upper(f, b, alo, ahi) * S.derivative(b);
    };
    for (std::size_t j = 1; j < n; ++j) {
        double bl = db * static_cast<double>(j - 1);
        double cell = 0.0;
        for (int q = 0; q < 4; ++q)
            cell += gw[q] * integrand(bl + 0.5 * db * (1.0 + gx[q]));
        zp[j] = zp[j - 1] + 0.5 * db * cell;
    }
    zval[0] = 0.0;
    for (std::size_t j = 1; j < n; ++j)
        zval[j] = zval[j - 1] + 0.5 * db * (zp[j - 1] + zp[j]);
    std::vector<double> dm = zp;
    return ConvexScalarFunction::tabulated(0.0, opt.b_hi, std::move(dm),
                                           std::move(zp), std::move(zval));
}

struct EnergyFromPressureOptions {
    double a_hi = 4.0;        // density window (0, a_hi]
    std::size_t nodes = 4096;
};

/// Build the density energy e from a pressure function z coupled to f:
///   e(a) = a * integral_{a1}^{a} z'(f'(alpha)) / alpha^2 dalpha,  e(0) = 0.
/// a1 must lie in the interior of dom(f); e is unique up to a linear term.
inline ConvexScalarFunction e_from_z(const ConvexScalarFunction& z,
                                     const ConvexScalarFunction& f, double a1,
                                     const EnergyFromPressureOptions& opt = {}) {
    if (std::fabs(z(0.0)) > 1e-10 || std::fabs(z.subdifferential_at(0.0).hi) > 1e-10)
        throw Error("e_from_z: need z(0) = z'(0) = 0");
    double alo, ahi;
    detail::clip_finite_window(f, alo, ahi);
    if (!(a1 > alo && a1 < ahi))
        throw Error("e_from_z: a1 outside int dom(f)");

    const std::size_t n = opt.nodes;
    double amax = std::min(opt.a_hi, ahi);
    const double da = amax / static_cast<double>(n - 1);
    auto integrand = [&](double alpha) {
        Interval df = f.subdifferential_at(alpha);
        double b = df.empty ? 0.0 : df.lo;
        Interval dz = z.subdifferential_at(std::max(0.0, b));
        double zp = dz.empty ? 0.0 : 0.5 * (dz.lo + std::min(dz.hi, dz.lo));
        return zp / (alpha * alpha);
    };
    // cumulative trapezoid of the integrand over the grid (signed from a1)
    std::vector<double> I(n, 0.0);  // I[k] = integral_{a_1}^{a_k}
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a = da * static_cast<double>(k);
        g[k] = (k == 0) ? 0.0 : integrand(a);
    }
    // integral from node to node, then shift so that I = 0 at a1
    std::vector<double> cum(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        cum[k] = cum[k - 1] + 0.5 * da * (g[k - 1] + g[k]);
    // value of cum at a1 by interpolation
    double t = a1 / da;
    auto k1 = static_cast<std::size_t>(t);
    if (k1 + 1 >= n) k1 = n - 2;
    double frac = t - static_cast<double>(k1);
    double cum_a1 = cum[k1] + frac * (cum[k1 + 1] - cum[k1]);
    for (std::size_t k = 0; k < n; ++k) I[k] = cum[k] - cum_a1;

    std::vector<double> val(n), dm(n), dp(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a = da * static_cast<double>(k);
        val[k] = a * I[k];
        // e'(a) = I(a) + z'(f'(a)) / a
        double d;
        if (k == 0) {
            d = I[0];
        } else {
            Interval df = f.subdifferential_at(a);
            double b = df.empty ? 0.0 : df.lo;
            Interval dz = z.subdifferential_at(std::max(0.0, b));
            double zp = dz.empty ? 0.0 : dz.lo;
            d = I[k] + zp / a;
        }
        dm[k] = dp[k] = d;
    }
    val[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {  // guard against quadrature jitter
        if (dm[k] < dp[k - 1]) dm[k] = dp[k] = dp[k - 1];
    }
    return ConvexScalarFunction::tabulated(0.0, amax, std::move(dm),
                                           std::move(dp), std::move(val));
}

/// H^{-1} companion energy h(a) = a f(a) - 2 integral_0^a f; satisfies
/// c = a b - f(a) in dh(a) whenever b in df(a).
inline ConvexScalarFunction h_energy(const ConvexScalarFunction& f,
                                     const EnergyFromPressureOptions& opt = {}) {
    double alo, ahi;
    detail::clip_finite_window(f, alo, ahi);
    if (alo > 0.0) throw Error("h_energy: f must be finite on [0, a]");
    const std::size_t n = opt.nodes;
    double amax = std::min(opt.a_hi, ahi);
    const double da = amax / static_cast<double>(n - 1);
    std::vector<double> F(n, 0.0);  // integral of f
    double prev = f(0.0);
    for (std::size_t k = 1; k < n; ++k) {
        double a = da * static_cast<double>(k);
        double cur = f(a);
        F[k] = F[k - 1] + 0.5 * da * (prev + cur);
        prev = cur;
    }
    std::vector<double> val(n), dm(n), dp(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a = da * static_cast<double>(k);
        val[k] = a * f(a) - 2.0 * F[k];
        Interval df = f.subdifferential_at(a);
        double bl = df.empty ? 0.0 : df.lo;
        double bh = df.empty ? bl : df.hi;
        dm[k] = a * bl - f(a);   // h'(a) = a f'(a) - f(a) = f*(f'(a))
        dp[k] = std::isfinite(bh) ? a * bh - f(a) : dm[k];
        if (!std::isfinite(dm[k])) dm[k] = dp[k];
        if (!std::isfinite(dp[k])) dp[k] = dm[k];
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (dm[k] < dp[k - 1]) { dm[k] = dp[k - 1]; if (dp[k] < dm[k]) dp[k] = dm[k]; }
    }
    return ConvexScalarFunction::tabulated(0.0, amax, std::move(dm),
                                           std::move(dp), std::move(val));
}

/// Composite-trapezoid quadrature of a callable (shared helper; tolerance
/// scales like O((hi-lo)^2 / n^2) for BV integrands).
inline double trapezoid(const std::function<double(double)>& g, double lo,
                        double hi, std::size_t n = 4096) {
    if (n < 2) n = 2;
    const double h = (hi - lo) / static_cast<double>(n - 1);
    double s = 0.5 * (g(lo) + g(hi));
    for (std::size_t k = 1; k + 1 < n; ++k) s += g(lo + h * static_cast<double>(k));
    return s * h;
}

}  // namespace brinkman
