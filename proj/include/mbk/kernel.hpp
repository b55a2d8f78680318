#pragma once

// The double-gamma kernel
//   G^{m,n}_{p,q}(a; b | s; tau) =
//     prod_{j<=m} G(b_j-s) prod_{j<=n} G(1+tau-a_j+s)
//     / [ prod_{j>m} G(1+tau-b_j+s) prod_{j>n} G(a_j-s) ],
// its pole lattices Lambda+/-, the derived parameters (N, nu, mu, xi), the
// seven-case admissibility classification, and the sector asymptotics of
// ln G^{m,n}_{p,q}.

#include <algorithm>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbk/double_gamma.hpp"
#include "mbk/errors.hpp"

namespace mbk {

struct KParams {
    int m = 0, n = 0, p = 0, q = 0;
    std::vector<cplx> a; // length p; first n are "barred" (numerator) entries
    std::vector<cplx> b; // length q; first m are "barred" (numerator) entries
    double tau = 1.0;
    cplx alpha{0.0, 0.0};

    void validate() const {
        if (m < 0 || n < 0 || p < 0 || q < 0)
            throw domain_error("KParams: orders must be non-negative");
        if (m > q || n > p)
            throw domain_error("KParams: requires m <= q and n <= p");
        if ((int)a.size() != p || (int)b.size() != q)
            throw domain_error("KParams: parameter list lengths must match p, q");
        if (!(tau > 0.0))
            throw domain_error("KParams: tau must be a positive real");
        for (const cplx& v : a)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw domain_error("KParams: non-finite parameter");
        for (const cplx& v : b)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw domain_error("KParams: non-finite parameter");
    }
};

struct DerivedParams {
    int N = 0;      // 2(m+n) - p - q
    cplx nu{0, 0};  // sum a - sum b
    cplx mu{0, 0};  // sum_{j<=n} a - sum_{j>n} a + sum_{j<=m} b - sum_{j>m} b
    cplx xi{0, 0};  // same signs with squared entries
};

inline DerivedParams derived_params(const KParams& kp) {
    kp.validate();
    DerivedParams d;
    d.N = 2 * (kp.m + kp.n) - kp.p - kp.q;
    for (int j = 0; j < kp.p; ++j) {
        d.nu += kp.a[j];
        const double sgn = (j < kp.n) ? 1.0 : -1.0;
        d.mu += sgn * kp.a[j];
        d.xi += sgn * kp.a[j] * kp.a[j];
    }
    for (int j = 0; j < kp.q; ++j) {
        d.nu -= kp.b[j];
        const double sgn = (j < kp.m) ? 1.0 : -1.0;
        d.mu += sgn * kp.b[j];
        d.xi += sgn * kp.b[j] * kp.b[j];
    }
    return d;
}

// max Re over Lambda-: b_sharp - tau - 1; empty when m == q.
inline std::optional<double> lambda_sharp(const KParams& kp) {
    std::optional<double> bs;
    for (int j = kp.m; j < kp.q; ++j)
        bs = bs ? std::max(*bs, kp.b[j].real()) : kp.b[j].real();
    if (!bs) return std::nullopt;
    return *bs - kp.tau - 1.0;
}

// min Re over Lambda+: a_flat; empty when n == p.
inline std::optional<double> lambda_flat(const KParams& kp) {
    std::optional<double> af;
    for (int j = kp.n; j < kp.p; ++j)
        af = af ? std::min(*af, kp.a[j].real()) : kp.a[j].real();
    return af;
}

enum class PoleSide { plus, minus };

struct PoleRecord {
    cplx location{0, 0};
    PoleSide side = PoleSide::plus;
    int source_index = 0;    // 0-based index into a (plus) or b (minus)
    long l = 0, k = 0;
    int representations = 1;
    bool numerator_zero = false; // a numerator G factor vanishes here too
};

struct Window {
    double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;
    bool contains(cplx z) const {
        return z.real() >= re_lo && z.real() <= re_hi &&
               z.imag() >= im_lo && z.imag() <= im_hi;
    }
};

namespace detail {

inline bool numerator_vanishes_at(const KParams& kp, cplx s, double tol) {
    for (int j = 0; j < kp.m; ++j)
        if (lattice_zero(kp.b[j] - s, kp.tau, tol).on_lattice) return true;
    for (int j = 0; j < kp.n; ++j)
        if (lattice_zero(1.0 + kp.tau - kp.a[j] + s, kp.tau, tol).on_lattice) return true;
    return false;
}

} // namespace detail

// Enumerate Lambda+ (j>n: a_j + l tau + k, l,k >= 0) and Lambda-
// (j>m: b_j - l tau - k, l,k >= 1) inside the window; coincident points are
// merged with representation counts.  Throws overlap_error when a plus and a
// minus point coincide within 1e-10.
inline std::vector<PoleRecord> pole_sets(const KParams& kp, const Window& w) {
    kp.validate();
    std::vector<PoleRecord> out;
    auto emit = [&](cplx loc, PoleSide side, int j, long l, long k) {
        if (!w.contains(loc)) return;
        out.push_back({loc, side, j, l, k, 1, false});
    };
    for (int j = kp.n; j < kp.p; ++j) {
        const cplx base = kp.a[j];
        if (base.imag() < w.im_lo || base.imag() > w.im_hi) continue;
        for (long l = 0; base.real() + l * kp.tau <= w.re_hi; ++l)
            for (long k = 0; base.real() + l * kp.tau + k <= w.re_hi; ++k)
                emit(base + cplx(l * kp.tau + k, 0.0), PoleSide::plus, j, l, k);
    }
    for (int j = kp.m; j < kp.q; ++j) {
        const cplx base = kp.b[j];
        if (base.imag() < w.im_lo || base.imag() > w.im_hi) continue;
        for (long l = 1; base.real() - l * kp.tau >= w.re_lo; ++l)
            for (long k = 1; base.real() - l * kp.tau - k >= w.re_lo; ++k)
                emit(base - cplx(l * kp.tau + k, 0.0), PoleSide::minus, j, l, k);
    }
    std::sort(out.begin(), out.end(), [](const PoleRecord& x, const PoleRecord& y) {
        if (x.location.real() != y.location.real())
            return x.location.real() < y.location.real();
        if (x.location.imag() != y.location.imag())
            return x.location.imag() < y.location.imag();
        return x.side == PoleSide::minus && y.side == PoleSide::plus;
    });
    // merge coincident points
    std::vector<PoleRecord> merged;
    const double tol = 1e-10;
    for (const PoleRecord& r : out) {
        if (!merged.empty() && std::abs(merged.back().location - r.location) <= tol) {
            if (merged.back().side != r.side) {
                std::ostringstream os;
                os << "pole_sets: Lambda+ and Lambda- overlap near ("
                   << r.location.real() << ", " << r.location.imag() << ")";
                throw overlap_error(os.str());
            }
            merged.back().representations += 1;
        } else {
            merged.push_back(r);
        }
    }
    for (PoleRecord& r : merged)
        r.numerator_zero = detail::numerator_vanishes_at(kp, r.location, 1e-10);
    return merged;
}

// Window the contour builder cares about: the separation strip plus a margin
// of one lattice cell on each side.
inline Window contour_window(const KParams& kp) {
    const auto ls = lambda_sharp(kp);
    const auto lf = lambda_flat(kp);
    double lo = 0.0, hi = 0.0;
    if (ls && lf) {
        lo = std::min(*ls, *lf);
        hi = std::max(*ls, *lf);
    } else if (ls) {
        lo = hi = *ls;
    } else if (lf) {
        lo = hi = *lf;
    }
    double imax = 0.0;
    for (const cplx& v : kp.a) imax = std::max(imax, std::abs(v.imag()));
    for (const cplx& v : kp.b) imax = std::max(imax, std::abs(v.imag()));
    const double margin = 2.0 * (kp.tau + 1.0) + 2.0;
    return {lo - margin, hi + margin, -imax - 1.0, imax + 1.0};
}

enum class CaseVariant {
    log_quadratic,  // (i)   N > 0
    quadratic,      // (ii)  N = 0, Re(alpha) >= 0, 4 alpha != +-(p-q) i
    upper_balanced, // (iii) N = 0, 4 alpha = (q-p) i != 0, arg mu != pi/2
    lower_balanced, // (iv)  N = 0, 4 alpha = (p-q) i != 0, arg mu != -pi/2
    balanced,       // (v)   N = alpha = p-q = 0, Re(mu) != 0
    linear,         // (vi)  N = alpha = p-q = mu = 0, Re(nu) < 0
    logarithmic,    // (vii) N = alpha = p-q = mu = nu = 0
    inadmissible,
};

struct CaseClass {
    CaseVariant variant = CaseVariant::inadmissible;
    std::string reason; // which exclusion fired, for inadmissible
};

inline const char* case_name(CaseVariant v) {
    switch (v) {
        case CaseVariant::log_quadratic: return "LogQuadratic";
        case CaseVariant::quadratic: return "Quadratic";
        case CaseVariant::upper_balanced: return "UpperBalanced";
        case CaseVariant::lower_balanced: return "LowerBalanced";
        case CaseVariant::balanced: return "Balanced";
        case CaseVariant::linear: return "Linear";
        case CaseVariant::logarithmic: return "Logarithmic";
        case CaseVariant::inadmissible: return "Inadmissible";
    }
    return "?";
}

// Total classification into the seven admissible cases and the exclusions.
// Equality comparisons use tolerance 1e-12; arg(mu)=+-pi/2 ties classify as
// inadmissible.  Lambda overlap is checked on the contour window.
inline CaseClass classify_case(const KParams& kp, bool check_overlap = true) {
    const DerivedParams d = derived_params(kp);
    const double tol = 1e-12;
    if (check_overlap) {
        try {
            (void)pole_sets(kp, contour_window(kp));
        } catch (const overlap_error& e) {
            return {CaseVariant::inadmissible, e.what()};
        }
    }
    if (d.N < 0) return {CaseVariant::inadmissible, "N < 0"};
    if (d.N > 0) return {CaseVariant::log_quadratic, ""};
    // N = 0 from here on
    if (kp.alpha.real() < -tol)
        return {CaseVariant::inadmissible, "N = 0 and Re(alpha) < 0"};
    const double pq = (double)(kp.p - kp.q);
    const bool upper_deg = std::abs(kp.alpha - cplx(0.0, -pq / 4.0)) <= tol; // 4a=(q-p)i
    const bool lower_deg = std::abs(kp.alpha - cplx(0.0, pq / 4.0)) <= tol;  // 4a=(p-q)i
    if (!upper_deg && !lower_deg)
        return {CaseVariant::quadratic, ""};
    if (upper_deg && !lower_deg) {
        if (std::abs(std::arg(d.mu) - M_PI / 2.0) <= tol || std::abs(d.mu) <= tol)
            return {CaseVariant::inadmissible, "4 alpha = (q-p) i and arg(mu) = pi/2"};
        return {CaseVariant::upper_balanced, ""};
    }
    if (lower_deg && !upper_deg) {
        if (std::abs(std::arg(d.mu) + M_PI / 2.0) <= tol || std::abs(d.mu) <= tol)
            return {CaseVariant::inadmissible, "4 alpha = (p-q) i and arg(mu) = -pi/2"};
        return {CaseVariant::lower_balanced, ""};
    }
    // both degenerate: alpha = 0 and p = q
    if (std::abs(d.mu.real()) > tol)
        return {CaseVariant::balanced, ""};
    if (std::abs(d.mu) > tol) {
        const char* which = d.mu.imag() > 0.0
            ? "4 alpha = (q-p) i and arg(mu) = pi/2"
            : "4 alpha = (p-q) i and arg(mu) = -pi/2";
        return {CaseVariant::inadmissible, which};
    }
    if (std::abs(d.nu) <= tol)
        return {CaseVariant::logarithmic, ""};
    if (d.nu.real() < -tol)
        return {CaseVariant::linear, ""};
    return {CaseVariant::inadmissible, "N = alpha = p-q = mu = 0 and Re(nu) >= 0, nu != 0"};
}

// Reflected/swapped tuple of eq-identity (and of the 1/z transformation):
// (q,p,n,m; 1+tau-b, 1+tau-a), same tau and alpha.
inline KParams reflect_params(const KParams& kp) {
    KParams r;
    r.m = kp.n; r.n = kp.m; r.p = kp.q; r.q = kp.p;
    r.tau = kp.tau; r.alpha = kp.alpha;
    r.a.resize(kp.q);
    r.b.resize(kp.p);
    for (int j = 0; j < kp.q; ++j) r.a[j] = 1.0 + kp.tau - kp.b[j];
    for (int j = 0; j < kp.p; ++j) r.b[j] = 1.0 + kp.tau - kp.a[j];
    return r;
}

class KernelEvaluator {
public:
    explicit KernelEvaluator(KParams kp)
        : kp_(std::move(kp)), dg_(&double_gamma_cache(kp_.tau)) {
        kp_.validate();
        dp_ = derived_params(kp_);
    }

    const KParams& params() const { return kp_; }
    const DerivedParams& derived() const { return dp_; }
    const DoubleGamma& dg() const { return *dg_; }

    // ln of the kernel; throws pole_error on Lambda+/Lambda- and
    // domain_error at a numerator zero (where the kernel value is 0).
    cplx ln_kernel(cplx s) const {
        cplx acc = 0.0;
        for (int j = 0; j < kp_.m; ++j) acc += ln_num(kp_.b[j] - s, s);
        for (int j = 0; j < kp_.n; ++j) acc += ln_num(1.0 + kp_.tau - kp_.a[j] + s, s);
        for (int j = kp_.m; j < kp_.q; ++j) acc -= ln_den(1.0 + kp_.tau - kp_.b[j] + s, s, j, PoleSide::minus);
        for (int j = kp_.n; j < kp_.p; ++j) acc -= ln_den(kp_.a[j] - s, s, j, PoleSide::plus);
        return acc;
    }

    cplx kernel(cplx s) const {
        for (int j = 0; j < kp_.m; ++j)
            if (lattice_zero(kp_.b[j] - s, kp_.tau).on_lattice) return {0.0, 0.0};
        for (int j = 0; j < kp_.n; ++j)
            if (lattice_zero(1.0 + kp_.tau - kp_.a[j] + s, kp_.tau).on_lattice) return {0.0, 0.0};
        cplx acc = 0.0;
        for (int j = 0; j < kp_.m; ++j) acc += dg_->ln_g(kp_.b[j] - s);
        for (int j = 0; j < kp_.n; ++j) acc += dg_->ln_g(1.0 + kp_.tau - kp_.a[j] + s);
        for (int j = kp_.m; j < kp_.q; ++j) acc -= ln_den(1.0 + kp_.tau - kp_.b[j] + s, s, j, PoleSide::minus);
        for (int j = kp_.n; j < kp_.p; ++j) acc -= ln_den(kp_.a[j] - s, s, j, PoleSide::plus);
        return std::exp(acc);
    }

    // phi(s) = kernel(s) * exp(pi alpha s^2 / tau)
    cplx ln_phi(cplx s) const {
        return ln_kernel(s) + M_PI * kp_.alpha * s * s / kp_.tau;
    }
    cplx phi(cplx s) const {
        return kernel(s) * std::exp(M_PI * kp_.alpha * s * s / kp_.tau);
    }

    // Leading asymptotic terms of ln kernel as s -> infinity off the real
    // axis (chi = sign Im s), by decreasing refinement:
    //   N != 0          : N s^2 ln s / (2 tau)
    //   N = 0           : pi i chi (p-q) s^2/(4 tau) - mu s ln s / tau
    //   N = p-q = 0     : -mu s ln s/tau + (1+ln tau) mu s/tau + pi i chi (mu-nu) s/(2 tau)
    //   ... mu = nu = 0 : xi ln|s| / (2 tau)
    cplx asymptotic_exponent(cplx s) const {
        if (s.imag() == 0.0)
            throw domain_error("kernel_asymptotic_exponent: requires Im(s) != 0");
        const double chi = (s.imag() > 0.0) ? 1.0 : -1.0;
        const double tau = kp_.tau;
        const cplx lns = std::log(s);
        if (dp_.N != 0)
            return (double)dp_.N * s * s * lns / (2.0 * tau);
        if (kp_.p != kp_.q)
            return cplx(0.0, M_PI * chi) * (double)(kp_.p - kp_.q) * s * s / (4.0 * tau)
                 - dp_.mu * s * lns / tau;
        if (std::abs(dp_.mu) > 1e-12)
            return -dp_.mu * s * lns / tau
                 + (1.0 + std::log(tau)) * dp_.mu * s / tau
                 + cplx(0.0, M_PI * chi) * (dp_.mu - dp_.nu) * s / (2.0 * tau);
        if (std::abs(dp_.nu) > 1e-12)
            // linear case: dominant term pi i chi (mu-nu) s/(2 tau) with mu=0
            return cplx(0.0, M_PI * chi) * (-dp_.nu) * s / (2.0 * tau);
        return dp_.xi * std::log(std::abs(s)) / (2.0 * tau);
    }

    // Leading exponent of phi(s) z^{-s} (adds the Gaussian factor and the
    // power of z); used for ray-decay checks.
    cplx phi_decay_exponent(cplx s, cplx log_z) const {
        return asymptotic_exponent(s) + M_PI * kp_.alpha * s * s / kp_.tau - s * log_z;
    }

private:
    cplx ln_num(cplx w, cplx s) const {
        const LatticePoint lp = lattice_zero(w, kp_.tau);
        if (lp.on_lattice)
            throw domain_error("kernel: numerator G factor vanishes (kernel value is 0)");
        (void)s;
        return dg_->ln_g(w);
    }
    cplx ln_den(cplx w, cplx s, int j, PoleSide side) const {
        const LatticePoint lp = lattice_zero(w, kp_.tau);
        if (lp.on_lattice) {
            std::ostringstream os;
            os << "kernel: pole at s = (" << s.real() << ", " << s.imag() << ") from "
               << (side == PoleSide::plus ? "a" : "b") << "[" << j << "]";
            throw pole_error(os.str(), s);
        }
        return dg_->ln_g(w);
    }

    KParams kp_;
    DerivedParams dp_;
    const DoubleGamma* dg_;
};

} // namespace mbk
