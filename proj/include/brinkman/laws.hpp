#pragma once

// Catalog of concrete internal-energy / growth pairs for congestion-averse
// growth models, plus validation of the structural assumptions they must
// satisfy and of well-prepared initial data.

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brinkman/convex.hpp"

namespace brinkman {

/// Growth map p -> G(p): continuous, decreasing, G(0) > 0, G(p_H) = 0.
struct GrowthLaw {
    std::function<double(double)> value;
    double p_H = 1.0;   // homeostatic pressure, zero of G
    double g0 = 1.0;    // G(0)
    std::string name = "none";
};

/// G(p) = g0 (1 - p / p_H).
inline GrowthLaw linear_growth(double p_H, double g0) {
    if (!(p_H > 0.0) || !(g0 > 0.0)) throw Error("linear_growth: p_H, g0 must be positive");
    GrowthLaw g;
    g.value = [p_H, g0](double p) { return g0 * (1.0 - p / p_H); };
    g.p_H = p_H;
    g.g0 = g0;
    g.name = "linear";
    return g;
}

/// max(G, 0) variant of the linear growth (no decay above p_H).
inline GrowthLaw clamped_linear_growth(double p_H, double g0) {
    GrowthLaw g = linear_growth(p_H, g0);
    auto base = g.value;
    g.value = [base](double p) { return std::max(base(p), 0.0); };
    g.name = "clamped_linear";
    return g;
}

inline GrowthLaw zero_growth() {
    GrowthLaw g;
    g.value = [](double) { return 0.0; };
    g.p_H = 1.0;
    g.g0 = 0.0;
    g.name = "zero";
    return g;
}

enum class LawFamily { power, logarithmic, incompressible };

/// A named energy/viscosity/growth triple. The closed-form members
/// (pressure, density_from_pressure, conjugate pieces) are exact for the
/// shipped families; the generic tabulated route remains available through
/// the convex_energy operations.
struct PressureLaw {
    LawFamily family = LawFamily::power;
    ConvexScalarFunction energy;        // f
    ConvexScalarFunction energy_dual;   // f*
    double nu = 0.0;                    // viscosity in the momentum closure
    double gamma = 1.0;                 // exponent (power family)
    GrowthLaw growth;

    // pointwise closed forms
    std::function<double(double)> pressure;               // p = f'(rho)
    std::function<double(double)> density_from_pressure;  // sup d f*(b)
    std::function<double(double)> dual_deriv;             // f*'(b)
    std::function<double(double)> dual_curvature;         // f*''(b)

    bool single_valued_pressure = true;

    double density_cap(double B) const { return density_from_pressure(B); }
    double homeostatic_pressure() const { return growth.p_H; }
    std::string name() const {
        switch (family) {
            case LawFamily::power: {
                std::ostringstream os;
                os << "power(gamma=" << gamma << ",nu=" << nu << ")";
                return os.str();
            }
            case LawFamily::logarithmic: {
                std::ostringstream os;
                os << "log(nu=" << nu << ")";
                return os.str();
            }
            default: return "incompressible";
        }
    }
};

/// Power law with the p = f'(rho) = rho^gamma normalization:
///   f(a)  = a^{gamma+1}/(gamma+1) on a >= 0, +inf on a < 0,
///   f*(b) = gamma/(gamma+1) b_+^{(gamma+1)/gamma}.
inline PressureLaw power_law(double gamma, double nu, GrowthLaw growth,
                             double domain_hi = 64.0) {
    if (!(gamma >= 1.0)) throw Error("power_law: gamma must be >= 1");
    if (!(nu >= 0.0)) throw Error("power_law: nu must be nonnegative");
    PressureLaw law;
    law.family = LawFamily::power;
    law.nu = nu;
    law.gamma = gamma;
    law.growth = std::move(growth);
    const double g = gamma;
    law.energy = ConvexScalarFunction::closed_form(
        0.0, domain_hi,
        [g](double a) { return std::pow(a, g + 1.0) / (g + 1.0); },
        [g](double a) { return Interval::point(std::pow(a, g)); },
        [g](double a) { return g * std::pow(a, g - 1.0); });
    const double q = (g + 1.0) / g;
    law.energy_dual = ConvexScalarFunction::closed_form(
        -kInf, kInf,
        [g, q](double b) { return b <= 0.0 ? 0.0 : (g / (g + 1.0)) * std::pow(b, q); },
        [g](double b) { return Interval::point(b <= 0.0 ? 0.0 : std::pow(b, 1.0 / g)); },
        [g](double b) {
            return b <= 0.0 ? 0.0 : (1.0 / g) * std::pow(b, 1.0 / g - 1.0);
        });
    law.pressure = [g](double rho) { return std::pow(rho, g); };
    law.density_from_pressure = [g](double b) { return b <= 0.0 ? 0.0 : std::pow(b, 1.0 / g); };
    law.dual_deriv = law.density_from_pressure;
    law.dual_curvature = [g](double b) {
        return b <= 0.0 ? 0.0 : (1.0 / g) * std::pow(b, 1.0 / g - 1.0);
    };
    return law;
}

/// Logarithmic congestion law:
///   f(a)  = -nu (a + ln(1-a)) on [0,1), +inf otherwise,
///   p     = f'(a) = nu a/(1-a), inverse a = p/(p+nu),
///   f*(b) = b - nu ln(1 + b/nu) on b >= 0, 0 on b < 0.
inline PressureLaw log_law(double nu_energy, double nu_viscosity, GrowthLaw growth) {
    if (!(nu_energy > 0.0)) throw Error("log_law: nu must be positive");
    PressureLaw law;
    law.family = LawFamily::logarithmic;
    law.nu = nu_viscosity;
    law.gamma = nu_energy;  // stores the energy stiffness parameter
    law.growth = std::move(growth);
    const double nu = nu_energy;
    law.energy = ConvexScalarFunction::closed_form(
        0.0, 1.0,
        [nu](double a) {
            if (a >= 1.0) return kInf;
            return -nu * (a + std::log1p(-a));
        },
        [nu](double a) {
            if (a >= 1.0) return Interval::none();
            return Interval::point(nu * a / (1.0 - a));
        },
        [nu](double a) { return nu / ((1.0 - a) * (1.0 - a)); });
    law.energy_dual = ConvexScalarFunction::closed_form(
        -kInf, kInf,
        [nu](double b) { return b <= 0.0 ? 0.0 : b - nu * std::log1p(b / nu); },
        [nu](double b) { return Interval::point(b <= 0.0 ? 0.0 : b / (b + nu)); },
        [nu](double b) {
            return b <= 0.0 ? 0.0 : nu / ((b + nu) * (b + nu));
        });
    law.pressure = [nu](double rho) {
        if (rho >= 1.0) return kInf;
        return nu * rho / (1.0 - rho);
    };
    law.density_from_pressure = [nu](double b) { return b <= 0.0 ? 0.0 : b / (b + nu); };
    law.dual_deriv = law.density_from_pressure;
    law.dual_curvature = [nu](double b) {
        return b <= 0.0 ? 0.0 : nu / ((b + nu) * (b + nu));
    };
    return law;
}

/// Incompressible hard-congestion energy (exact piecewise form, never
/// tabulated):
///   f0(a) = 0 if a <= 1, +inf otherwise;  f0*(b) = b_+;  df0(1) = [0, inf).
/// Darcy-limit reference only: its multivalued pressure is rejected by the
/// steppers.
inline PressureLaw incompressible_law(GrowthLaw growth) {
    PressureLaw law;
    law.family = LawFamily::incompressible;
    law.nu = 0.0;
    law.gamma = kInf;
    law.growth = std::move(growth);
    law.single_valued_pressure = false;
    law.energy = ConvexScalarFunction::closed_form(
        0.0, 1.0,
        [](double a) { return a <= 1.0 ? 0.0 : kInf; },
        [](double a) {
            if (a < 1.0) return Interval::point(0.0);
            if (a == 1.0) return Interval{0.0, kInf, false};
            return Interval::none();
        },
        [](double) { return 0.0; });
    law.energy_dual = ConvexScalarFunction::closed_form(
        -kInf, kInf,
        [](double b) { return std::max(b, 0.0); },
        [](double b) {
            if (b < 0.0) return Interval::point(0.0);
            if (b == 0.0) return Interval{0.0, 1.0, false};
            return Interval::point(1.0);
        },
        [](double) { return 0.0; });
    law.pressure = [](double) -> double {
        throw Error("incompressible law: pressure is multivalued");
    };
    law.density_from_pressure = [](double b) { return b >= 0.0 ? 1.0 : 0.0; };
    law.dual_deriv = law.density_from_pressure;
    law.dual_curvature = [](double) { return 0.0; };
    return law;
}

/// Closed-form H^{-1} companion energy h(a) = a f(a) - 2 int_0^a f for the
/// shipped families (exact antiderivatives).
inline ConvexScalarFunction h_energy_closed_form(const PressureLaw& law) {
    if (law.family == LawFamily::power) {
        const double g = law.gamma;
        // h(a) = g / ((g+1)(g+2)) a^{g+2}
        const double K = g / ((g + 1.0) * (g + 2.0));
        return ConvexScalarFunction::closed_form(
            0.0, law.energy.domain_hi(),
            [K, g](double a) { return K * std::pow(a, g + 2.0); },
            [K, g](double a) { return Interval::point(K * (g + 2.0) * std::pow(a, g + 1.0)); },
            [K, g](double a) { return K * (g + 2.0) * (g + 1.0) * std::pow(a, g); });
    }
    if (law.family == LawFamily::logarithmic) {
        const double nu = law.gamma;
        // int_0^a f = -nu (a^2/2 + (1-a) - (1-a) ln(1-a) - 1)
        auto F = [nu](double a) {
            return -nu * (0.5 * a * a + (1.0 - a) - (1.0 - a) * std::log1p(-a) - 1.0);
        };
        auto f = [nu](double a) { return -nu * (a + std::log1p(-a)); };
        auto fp = [nu](double a) { return nu * a / (1.0 - a); };
        return ConvexScalarFunction::closed_form(
            0.0, 1.0,
            [F, f](double a) { return a >= 1.0 ? kInf : a * f(a) - 2.0 * F(a); },
            [f, fp](double a) {
                if (a >= 1.0) return Interval::none();
                return Interval::point(a * fp(a) - f(a));  // = f*(f'(a))
            },
            [nu](double a) { return a * nu / ((1.0 - a) * (1.0 - a)); });  // h'' = a f''
    }
    throw Error("h_energy_closed_form: no closed form for this family");
}

/// Pointwise conjugate of a smooth strictly convex function given through
/// its derivative, by bisection on f'(a) = y (used for h* of the shipped
/// laws, which has no elementary closed form in the logarithmic case).
inline ConvexScalarFunction conjugate_by_inversion(const ConvexScalarFunction& f) {
    return ConvexScalarFunction::closed_form(
        -kInf, kInf,
        [f](double y) { return conjugate_value(f, y); },
        [f](double y) { return Interval::point(conjugate_sup_subdiff(f, y)); });
}

/// Validation of the structural assumptions on a law: growth shape and the
/// energy's properness / superlinearity / domain conditions. Failures are
/// returned as messages, not thrown.
struct AssumptionReport {
    bool pass = true;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failures.push_back(what);
        }
    }
};

inline AssumptionReport validate_assumptions(const PressureLaw& law, double a0 = 0.5) {
    AssumptionReport r;
    const GrowthLaw& G = law.growth;
    if (G.g0 > 0.0) {
        r.check(G.value(0.0) > 0.0, "G(0) > 0");
        r.check(std::fabs(G.value(G.p_H)) <= 1e-12 * (1.0 + G.g0), "G(p_H) = 0");
        double prev = G.value(0.0);
        bool dec = true;
        for (int k = 1; k <= 16; ++k) {
            double cur = G.value(G.p_H * k / 8.0);
            if (cur > prev + 1e-12) dec = false;
            prev = cur;
        }
        r.check(dec, "G nonincreasing");
    }
    const auto& f = law.energy;
    r.check(f(-1.0) == kInf, "f = +inf on negatives");
    double small = 1e-6;
    r.check(std::fabs(f(small)) / small < 1e-3, "f(a)/a -> 0 as a -> 0+");
    double big = std::min(1e6 * a0, f.domain_hi() * (1.0 - 1e-9));
    double fb = f(big);
    // superlinearity: the secant slope must grow (a domain wall counts too)
    r.check(fb == kInf || fb / big >= 10.0 * f(a0) / a0,
            "f(a)/a -> +inf as a -> +inf");
    r.check(f(a0) < kInf, "[0,a0] inside dom(f)");
    return r;
}

struct WellPreparedReport {
    bool pass = true;
    double max_density = 0.0;
    double density_cap = 0.0;   // sup d f*(B)
    double mass = 0.0;          // M(0)
    double linf = 0.0;
    std::vector<std::string> failures;
};

}  // namespace brinkman
