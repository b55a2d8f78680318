#pragma once

// Evaluation of the K-function
//   K^{m,n}_{p,q}(a; b | z; tau, alpha)
//     = (1/2 pi i) int_gamma G^{m,n}_{p,q}(s) e^{pi alpha s^2/tau} z^{-s} ds
// by adaptive Gauss-Kronrod quadrature over the contour of contour.hpp,
// plus the three transformation identities, the residue asymptotics at
// z -> 0 / z -> infinity (simple poles), and the Mellin transform check.

#include <cmath>
#include <complex>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbk/contour.hpp"
#include "mbk/errors.hpp"
#include "mbk/kernel.hpp"
#include "mbk/quadrature.hpp"

namespace mbk {

struct QuadratureConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    int max_panels = 40000;
    int panel_order = 15;
    double ray_cap = 400.0;

    void validate() const {
        if (rel_tol < 1e-13) throw domain_error("QuadratureConfig: rel_tol must be >= 1e-13");
        if (max_panels < 64) throw domain_error("QuadratureConfig: max_panels must be >= 64");
        if (panel_order != 15 && panel_order != 21)
            throw domain_error("QuadratureConfig: panel_order must be 15 or 21");
    }
};

struct EvalResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    int panels_used = 0;
    double decay_margin = 0.0;
    std::string contour_id;
    std::vector<std::string> notes;
};

struct AsymptoticTerm {
    cplx exponent{0.0, 0.0}; // power of z^{-exponent}
    int log_power = 0;
    cplx coefficient{0.0, 0.0};
};

enum class ExpansionSide { zero, infinity };

struct AsymptoticExpansion {
    std::vector<AsymptoticTerm> terms;
    ExpansionSide side = ExpansionSide::zero;
    std::pair<double, double> valid_sector{0.0, 0.0};
};

inline cplx evaluate_expansion(const AsymptoticExpansion& e, cplx z) {
    const cplx lz = std::log(z);
    cplx acc = 0.0;
    for (const AsymptoticTerm& t : e.terms) {
        cplx lp = 1.0;
        for (int i = 0; i < t.log_power; ++i) lp *= lz;
        acc += t.coefficient * lp * std::exp(-t.exponent * lz);
    }
    return acc;
}

class KFunction {
public:
    explicit KFunction(KParams kp, QuadratureConfig cfg = {},
                       std::optional<AngleChoice> angles = std::nullopt)
        : ev_(std::move(kp)), cfg_(cfg), override_(angles) {
        cfg_.validate();
        cc_ = classify_case(ev_.params());
        if (cc_.variant == CaseVariant::inadmissible)
            throw inadmissible_error("k_function: " + cc_.reason);
        dp_ = derived_params(ev_.params());
        if (override_) validate_angles(*override_, /*z=*/2.0, cc_.variant != CaseVariant::logarithmic);
        if (cc_.variant != CaseVariant::logarithmic)
            contour_ = make_contour(/*z=*/1.0);
    }

    const CaseClass& case_class() const { return cc_; }
    const DerivedParams& derived() const { return dp_; }
    const KernelEvaluator& kernel() const { return ev_; }
    const QuadratureConfig& config() const { return cfg_; }

    EvalResult operator()(cplx z) const {
        check_domain(z);
        if (cc_.variant == CaseVariant::logarithmic) {
            const Contour c = make_contour(z.real());
            return integrate_contour(c, z);
        }
        return integrate_contour(*contour_, z);
    }

    EvalResult operator()(double z) const { return (*this)(cplx(z, 0.0)); }

    // contour actually used for a given evaluation point
    Contour contour_for(cplx z) const {
        check_domain(z);
        if (cc_.variant == CaseVariant::logarithmic) return make_contour(z.real());
        return *contour_;
    }

private:
    void check_domain(cplx z) const {
        if (!(std::abs(z) > 0.0))
            throw domain_error("k_function: z must be nonzero");
        if (cc_.variant == CaseVariant::logarithmic) {
            if (z.imag() != 0.0 || z.real() <= 0.0)
                throw domain_error("k_function: case (vii) requires real z > 0");
            if (std::abs(z.real() - 1.0) < 1e-3)
                throw unit_argument_error(
                    "k_function: case (vii) evaluation refused within |z-1| < 1e-3");
        } else if (cc_.variant == CaseVariant::linear) {
            const double bound = -M_PI * dp_.nu.real() / (2.0 * ev_.params().tau);
            if (std::abs(std::arg(z)) >= bound && z.imag() != 0.0)
                throw domain_error("k_function: case (vi) requires |arg z| < -pi Re(nu)/(2 tau)");
        } else if (z.real() <= 0.0 && z.imag() == 0.0) {
            throw domain_error("k_function: z on the negative real axis");
        }
    }

    void validate_angles(const AngleChoice& ac, double z, bool strict) const {
        if (!angle_admissible(ev_.params(), dp_, cc_.variant, ac.theta_plus, +1, z) ||
            !angle_admissible(ev_.params(), dp_, cc_.variant, ac.theta_minus, -1, z)) {
            if (strict) {
                std::ostringstream os;
                os << "angles (" << ac.theta_plus << ", " << ac.theta_minus
                   << ") violate the decay conditions of case "
                   << case_name(cc_.variant);
                throw inadmissible_error(os.str());
            }
        }
    }

    Contour make_contour(double z) const {
        AngleChoice ac;
        if (override_) {
            ac = *override_;
            validate_angles(ac, z, true);
        } else if (cc_.variant != CaseVariant::logarithmic &&
                   can_use_vertical_line(ev_.params(), cplx(std::abs(z), 0.0))) {
            // Remark-1 deformation: the vertical line gives the fastest decay
            // whenever it is available (and is required by the Mellin ops)
            ac.theta_plus = M_PI / 2.0;
            ac.theta_minus = -M_PI / 2.0;
        } else {
            ac = select_angles(cc_, dp_, ev_.params(), z);
        }
        Contour c = build_contour(ev_.params(), ac, cfg_.ray_cap);
        verify_contour(c, ev_.params());
        return c;
    }

    EvalResult integrate_contour(const Contour& c, cplx z) const {
        const cplx lz = std::log(z); // fixed once per evaluation
        auto f = [&](cplx s) { return std::exp(ev_.ln_phi(s) - s * lz); };

        quad_result total;
        for (size_t i = 0; i + 1 < c.finite_path.size(); ++i) {
            const cplx A = c.finite_path[i], B = c.finite_path[i + 1];
            if (std::abs(B - A) == 0.0) continue;
            auto g = [&](double u) { return f(A + u * (B - A)) * (B - A); };
            quad_result piece = integrate(g, 0.0, 1.0, cfg_.abs_tol, cfg_.rel_tol,
                                          26, cfg_.panel_order);
            total.value += piece.value;
            total.error += piece.error;
            total.panels += piece.panels;
        }

        double margin = 1e300;
        bool truncated_any = false;
        double tail_mag = 0.0;
        auto do_ray = [&](cplx base, double theta, double sgn) {
            const cplx dir = std::exp(cplx(0.0, theta));
            auto g = [&](double r) { return f(base + r * dir) * dir; };
            bool trunc = false;
            quad_result piece = integrate_to_inf(g, 0.0, 2.0, c.truncation_radius,
                                                 cfg_.abs_tol, 1e-17, &trunc,
                                                 cfg_.panel_order);
            total.value += sgn * piece.value;
            total.error += piece.error;
            total.panels += piece.panels;
            if (trunc) {
                truncated_any = true;
                tail_mag = std::max(tail_mag,
                                    std::abs(g(c.truncation_radius)) * c.truncation_radius);
            }
            const double far = std::abs(g(c.truncation_radius));
            const double mid = std::abs(g(0.5 * c.truncation_radius));
            if (far > 0.0 && mid > 0.0)
                margin = std::min(margin, std::log(mid / far));
            else if (mid == 0.0 || far == 0.0)
                margin = std::min(margin, 700.0);
        };
        do_ray(c.finite_path.front(), c.theta_minus, -1.0);
        do_ray(c.finite_path.back(), c.theta_plus, +1.0);

        EvalResult r;
        r.value = total.value / cplx(0.0, 2.0 * M_PI);
        r.error_estimate = (total.error + tail_mag) / (2.0 * M_PI);
        r.panels_used = total.panels;
        r.decay_margin = (margin == 1e300) ? 0.0 : margin;
        {
            std::ostringstream os;
            os << "L(" << c.theta_minus << "," << c.theta_plus << ")@"
               << c.anchor.real();
            r.contour_id = os.str();
        }
        if (truncated_any) {
            const double budget =
                10.0 * (cfg_.abs_tol + cfg_.rel_tol * std::abs(r.value));
            if (tail_mag / (2.0 * M_PI) > budget)
                throw truncation_error(
                    "k_function: ray cap reached before the tail fell below tolerance");
            r.notes.push_back("TruncationWarning: ray cap reached; tail below tolerance");
        }
        if (total.panels > cfg_.max_panels)
            r.notes.push_back("panel budget exceeded");
        return r;
    }

    KernelEvaluator ev_;
    QuadratureConfig cfg_;
    std::optional<AngleChoice> override_;
    CaseClass cc_;
    DerivedParams dp_;
    std::optional<Contour> contour_;
};

// One-shot evaluation.
inline EvalResult k_function(const KParams& kp, cplx z, QuadratureConfig cfg = {}) {
    return KFunction(kp, cfg)(z);
}

// ---- transformation identities -------------------------------------------

struct ShiftTransform {
    KParams shifted;       // (c+a, c+b)
    cplx gauss_prefactor;  // e^{pi alpha c^2 / tau}
    cplx z_power;          // K(shifted | z) = gauss * z^{z_power} * K(orig | z_scale * z)
    cplx z_scale;          // e^{-2 pi alpha c / tau}
};

inline ShiftTransform k_transform_shift(const KParams& kp, cplx c) {
    KParams s = kp;
    for (cplx& v : s.a) v += c;
    for (cplx& v : s.b) v += c;
    const CaseClass cc = classify_case(s);
    if (cc.variant == CaseVariant::inadmissible)
        throw inadmissible_error("k_transform_shift: shifted tuple inadmissible: " + cc.reason);
    ShiftTransform t;
    t.shifted = std::move(s);
    t.gauss_prefactor = std::exp(M_PI * kp.alpha * c * c / kp.tau);
    t.z_power = -c;
    t.z_scale = std::exp(-2.0 * M_PI * kp.alpha * c / kp.tau);
    return t;
}

// K(a,b | z; tau, alpha) = K(1+tau-b, 1+tau-a | 1/z; tau, alpha) with
// swapped orders (q,p,n,m).
inline KParams k_transform_invert(const KParams& kp) {
    return reflect_params(kp);
}

struct ModularTransform {
    KParams mapped;   // (a/tau, b/tau), tau -> 1/tau, alpha -> alpha - N ln(tau)/(2 pi)
    cplx A, B;        // K(orig | z) = A * tau * K(mapped | (B z)^tau)
};

inline ModularTransform k_transform_modular(const KParams& kp) {
    const DerivedParams d = derived_params(kp);
    const double tau = kp.tau;
    ModularTransform t;
    KParams m = kp;
    for (cplx& v : m.a) v /= tau;
    for (cplx& v : m.b) v /= tau;
    m.tau = 1.0 / tau;
    m.alpha = kp.alpha - (double)d.N * std::log(tau) / (2.0 * M_PI);
    const CaseClass cc = classify_case(m);
    if (cc.variant == CaseVariant::inadmissible)
        throw inadmissible_error("k_transform_modular: mapped tuple inadmissible: " + cc.reason);
    t.mapped = std::move(m);
    const double nmq = (double)(kp.n + kp.m - kp.q);
    t.A = std::exp(((1.0 - tau) / (2.0 * tau)) * (d.nu - (1.0 + tau) * nmq) * ln_two_pi
                   + (((1.0 + tau) * d.mu - d.xi) / (2.0 * tau) - (double)d.N) * std::log(tau));
    t.B = std::exp(((1.0 - tau) / (2.0 * tau)) * (double)(kp.p - kp.q) * ln_two_pi
                   + (((double)d.N * (1.0 + tau) - 2.0 * d.mu) / (2.0 * tau)) * std::log(tau));
    return t;
}

// ---- residue asymptotics ---------------------------------------------------

namespace detail {

struct SharpPole {
    cplx location;
    int source_j;     // index into b (zero side) or a (infinity side)
    long l, k;
    int multiplicity;
    bool numerator_zero;
};

// all Lambda- points with Re = lambda_sharp (zero side) or Lambda+ points
// with Re = lambda_flat (infinity side)
inline std::vector<SharpPole> extremal_poles(const KParams& kp, bool zero_side) {
    std::vector<SharpPole> found;
    const double tol = 1e-10;
    auto push = [&](cplx loc, int j, long l, long k) {
        for (SharpPole& s : found)
            if (std::abs(s.location - loc) <= tol) {
                s.multiplicity += 1;
                return;
            }
        found.push_back({loc, j, l, k, 1, numerator_vanishes_at(kp, loc, tol)});
    };
    if (zero_side) {
        const auto ls = lambda_sharp(kp);
        if (!ls) return found;
        for (int j = kp.m; j < kp.q; ++j)
            for (long l = 1; kp.b[j].real() - l * kp.tau - 1.0 >= *ls - tol; ++l) {
                const double kreal = kp.b[j].real() - l * kp.tau - *ls;
                const long k = (long)std::llround(kreal);
                if (k >= 1 && std::abs(kreal - (double)k) <= tol)
                    push(kp.b[j] - cplx(l * kp.tau + k, 0.0), j, l, k);
            }
    } else {
        const auto lf = lambda_flat(kp);
        if (!lf) return found;
        for (int j = kp.n; j < kp.p; ++j)
            for (long l = 0; kp.a[j].real() + l * kp.tau <= *lf + tol; ++l) {
                const double kreal = *lf - kp.a[j].real() - l * kp.tau;
                const long k = (long)std::llround(kreal);
                if (k >= 0 && std::abs(kreal - (double)k) <= tol)
                    push(kp.a[j] + cplx(l * kp.tau + k, 0.0), j, l, k);
            }
    }
    return found;
}

// residue of phi at a simple kernel pole: the vanishing denominator factor
// G(w(s)) is replaced by sigma G'(w0), sigma = dw/ds
inline cplx phi_residue(const KernelEvaluator& ev, cplx p) {
    const KParams& kp = ev.params();
    const DoubleGamma& dg = ev.dg();
    cplx ln_acc = 0.0;
    cplx reg = 1.0; // product of derivative replacements
    int singular = 0;
    for (int j = 0; j < kp.m; ++j) ln_acc += dg.ln_g(kp.b[j] - p);
    for (int j = 0; j < kp.n; ++j) ln_acc += dg.ln_g(1.0 + kp.tau - kp.a[j] + p);
    for (int j = kp.m; j < kp.q; ++j) {
        const cplx w = 1.0 + kp.tau - kp.b[j] + p;
        if (lattice_zero(w, kp.tau).on_lattice) {
            reg *= dg.g_derivative_at_zero(w); // sigma = +1
            ++singular;
        } else {
            ln_acc -= dg.ln_g(w);
        }
    }
    for (int j = kp.n; j < kp.p; ++j) {
        const cplx w = kp.a[j] - p;
        if (lattice_zero(w, kp.tau).on_lattice) {
            reg *= -dg.g_derivative_at_zero(w); // sigma = -1
            ++singular;
        } else {
            ln_acc -= dg.ln_g(w);
        }
    }
    if (singular != 1)
        throw higher_order_pole_error("phi_residue: pole is not simple");
    ln_acc += M_PI * kp.alpha * p * p / kp.tau;
    return std::exp(ln_acc) / reg;
}

} // namespace detail

// Expansion of K as z -> 0 over the poles of maximal real part lambda_sharp:
// K(z) ~ sum_k A_{k,0} z^{-p_k}; simple poles only.
inline AsymptoticExpansion k_asymptotic_zero(const KParams& kp, int num_poles = 8) {
    const CaseClass cc = classify_case(kp);
    if (cc.variant == CaseVariant::inadmissible)
        throw inadmissible_error("k_asymptotic_zero: " + cc.reason);
    const DerivedParams dp = derived_params(kp);
    // Theorem hypothesis: a contour with theta+ >= pi/2 and theta- <= -pi/2
    const double zref = 0.5; // zero side: case (vii) uses the left-opening contour
    bool ok_plus = false, ok_minus = false;
    for (double th : {M_PI / 2.0, 0.6 * M_PI, 0.75 * M_PI, M_PI - M_PI / 12.0}) {
        ok_plus = ok_plus || angle_admissible(kp, dp, cc.variant, th, +1, zref);
        ok_minus = ok_minus || angle_admissible(kp, dp, cc.variant, -th, -1, zref);
    }
    if (!ok_plus || !ok_minus)
        throw hypothesis_error(
            "k_asymptotic_zero: no admissible contour with theta+ >= pi/2, theta- <= -pi/2");
    std::vector<detail::SharpPole> poles = detail::extremal_poles(kp, true);
    AsymptoticExpansion e;
    e.side = ExpansionSide::zero;
    e.valid_sector = {-M_PI, M_PI};
    KernelEvaluator ev(kp);
    for (const auto& sp : poles) {
        if ((int)e.terms.size() >= num_poles) break;
        if (sp.multiplicity > 1 || sp.numerator_zero)
            throw higher_order_pole_error(
                "k_asymptotic_zero: extremal pole is not simple (multiplicity "
                + std::to_string(sp.multiplicity) + ")");
        e.terms.push_back({sp.location, 0, detail::phi_residue(ev, sp.location)});
    }
    return e;
}

// Expansion as z -> infinity over the poles of minimal real part lambda_flat:
// K(z) ~ -sum_k B_{k,0} z^{-q_k}.  Coefficients are stored so that
// evaluate_expansion approximates K directly.
inline AsymptoticExpansion k_asymptotic_infinity(const KParams& kp, int num_poles = 8) {
    const CaseClass cc = classify_case(kp);
    if (cc.variant == CaseVariant::inadmissible)
        throw inadmissible_error("k_asymptotic_infinity: " + cc.reason);
    const DerivedParams dp = derived_params(kp);
    const double zref = 2.0;
    bool ok_plus = false, ok_minus = false;
    for (double th : {M_PI / 2.0, 0.4 * M_PI, 0.25 * M_PI, M_PI / 12.0}) {
        ok_plus = ok_plus || angle_admissible(kp, dp, cc.variant, th, +1, zref);
        ok_minus = ok_minus || angle_admissible(kp, dp, cc.variant, -th, -1, zref);
    }
    if (!ok_plus || !ok_minus)
        throw hypothesis_error(
            "k_asymptotic_infinity: no admissible contour with theta+ <= pi/2, theta- >= -pi/2");
    std::vector<detail::SharpPole> poles = detail::extremal_poles(kp, false);
    AsymptoticExpansion e;
    e.side = ExpansionSide::infinity;
    e.valid_sector = {-M_PI, M_PI};
    KernelEvaluator ev(kp);
    for (const auto& sp : poles) {
        if ((int)e.terms.size() >= num_poles) break;
        if (sp.multiplicity > 1 || sp.numerator_zero)
            throw higher_order_pole_error(
                "k_asymptotic_infinity: extremal pole is not simple (multiplicity "
                + std::to_string(sp.multiplicity) + ")");
        e.terms.push_back({sp.location, 0, detail::phi_residue(ev, sp.location)});
    }
    return e;
}

// ---- Mellin transform check ------------------------------------------------

struct MellinCheckResult {
    cplx lhs{0, 0};
    cplx rhs{0, 0};
    double residual = 0.0;
};

// Caches K on a fixed logarithmic grid so several strip points can be checked
// against one set of contour integrations.
class MellinChecker {
public:
    explicit MellinChecker(KParams kp, QuadratureConfig cfg = {},
                           double x_lo = 1e-4, double x_hi = 1e4, int points_per_decade = 24)
        : kf_(kp, cfg), kp_(std::move(kp)), x_lo_(x_lo), x_hi_(x_hi) {
        if (!can_use_vertical_line(kp_, cplx(2.0, 0.0)))
            throw hypothesis_error("mellin_check: Remark-1 vertical-line conditions fail");
        const double u0 = std::log(x_lo_), u1 = std::log(x_hi_);
        int n = (int)std::ceil((u1 - u0) / std::log(10.0) * points_per_decade);
        if (n % 2 == 1) ++n; // Simpson needs an even panel count
        du_ = (u1 - u0) / n;
        for (int i = 0; i <= n; ++i) {
            const double x = std::exp(u0 + i * du_);
            kvals_.push_back(kf_(cplx(x, 0.0)).value);
        }
        try { zero_exp_ = k_asymptotic_zero(kp_); } catch (const error&) {}
        try { inf_exp_ = k_asymptotic_infinity(kp_); } catch (const error&) {}
    }

    MellinCheckResult check(cplx s) const {
        const auto ls = lambda_sharp(kp_);
        const auto lf = lambda_flat(kp_);
        if ((ls && s.real() <= *ls) || (lf && s.real() >= *lf))
            throw strip_error("mellin_check: s outside the Mellin strip");
        // composite Simpson for int K(x) x^{s-1} dx on the log grid
        cplx mid = 0.0;
        const double u0 = std::log(x_lo_);
        auto g = [&](int i) {
            const double u = u0 + i * du_;
            return kvals_[i] * std::exp(s * u);
        };
        const int n = (int)kvals_.size() - 1;
        for (int i = 0; i < n; i += 2)
            mid += du_ / 3.0 * (g(i) + 4.0 * g(i + 1) + g(i + 2));
        // endpoint completion from the one-term algebraic asymptotics:
        // int_0^xlo sum A_k x^{s-p_k-1} dx,  int_xhi^inf -(...) analogous
        cplx head = 0.0, tail = 0.0;
        if (zero_exp_)
            for (const AsymptoticTerm& t : zero_exp_->terms)
                head += t.coefficient * std::pow(cplx(x_lo_, 0.0), s - t.exponent)
                        / (s - t.exponent);
        if (inf_exp_)
            for (const AsymptoticTerm& t : inf_exp_->terms)
                tail += t.coefficient * std::pow(cplx(x_hi_, 0.0), s - t.exponent)
                        / (t.exponent - s);
        MellinCheckResult r;
        r.lhs = head + mid + tail;
        r.rhs = kf_.kernel().phi(s);
        r.residual = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
        return r;
    }

private:
    KFunction kf_;
    KParams kp_;
    double x_lo_, x_hi_, du_ = 0.0;
    std::vector<cplx> kvals_;
    std::optional<AsymptoticExpansion> zero_exp_, inf_exp_;
};

inline MellinCheckResult mellin_check(const KParams& kp, cplx s, QuadratureConfig cfg = {}) {
    return MellinChecker(kp, cfg).check(s);
}

} // namespace mbk
