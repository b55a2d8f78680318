#pragma once

// Construction of the integration path L_{theta-,theta+}: two asymptotic rays
// joined by a finite rectilinear path separating Lambda- (kept on the left of
// the upward-oriented contour) from Lambda+ (right).
//
// The finite part is a sequence of vertical strokes spanning the horizontal
// band that contains all poles, connected alternately above and below the
// band.  Stroke abscissas sit in the gaps between runs of same-side poles
// ordered by real part; with a separating strip this degenerates to the
// single vertical segment of the classical contour.  Since tau is real, the
// pole lattices extend only horizontally, so every pole keeps its distance
// to a stroke equal to the difference of real parts.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "mbk/errors.hpp"
#include "mbk/kernel.hpp"

namespace mbk {

struct AngleChoice {
    double theta_plus = M_PI / 2.0;   // in (0, pi]
    double theta_minus = -M_PI / 2.0; // in [-pi, 0)
    double epsilon = M_PI / 12.0;
    bool z_dependent = false;         // case (vii): angles flip across z = 1
};

struct Contour {
    double theta_plus = M_PI / 2.0;
    double theta_minus = -M_PI / 2.0;
    cplx anchor{0.0, 0.0};            // ray origin (start of the minus ray)
    std::vector<cplx> finite_path;    // oriented, minus-ray base first
    double truncation_radius = 400.0; // ray cap for the quadrature
    double clearance = 0.0;
};

// Decay predicate for a candidate ray angle, by case.  theta is measured
// from the positive real axis; side +1 means the upper ray, -1 the lower.
inline bool angle_admissible(const KParams& kp, const DerivedParams& dp,
                             CaseVariant cv, double theta, int side, double z) {
    const double tol = 1e-12;
    if (side > 0 && !(theta > 0.0 && theta <= M_PI)) return false;
    if (side < 0 && !(theta >= -M_PI && theta < 0.0)) return false;
    const cplx e1 = std::exp(cplx(0.0, theta));
    const cplx e2 = std::exp(cplx(0.0, 2.0 * theta));
    const double pq = (double)(kp.p - kp.q);
    switch (cv) {
        case CaseVariant::log_quadratic:
            // need Re(s^2 ln s) -> -inf: |theta - pi/2| < pi/4 on each side
            return std::abs(std::abs(theta) - M_PI / 2.0) < M_PI / 4.0 - tol;
        case CaseVariant::quadratic: {
            const cplx w = kp.alpha + cplx(0.0, (side > 0 ? 1.0 : -1.0) * pq / 4.0);
            return (w * e2).real() < -tol;
        }
        case CaseVariant::upper_balanced:
            if (side > 0) return (dp.mu * e1).real() > tol;
            return (cplx(0.0, (double)(kp.q - kp.p)) * e2).real() < -tol;
        case CaseVariant::lower_balanced:
            if (side < 0) return (dp.mu * e1).real() > tol;
            return (cplx(0.0, (double)(kp.p - kp.q)) * e2).real() < -tol;
        case CaseVariant::balanced:
            return (dp.mu * e1).real() > tol;
        case CaseVariant::linear:
            return std::abs(std::abs(theta) - M_PI / 2.0) <= tol;
        case CaseVariant::logarithmic:
            if (z > 1.0) return std::abs(theta) < M_PI / 2.0 - tol;
            return std::abs(theta) > M_PI / 2.0 + tol;
        case CaseVariant::inadmissible:
            return false;
    }
    return false;
}

// Table-1 default angles for an admissible case.  In case (vii) the choice
// depends on which side of z = 1 the evaluation point lies.
inline AngleChoice select_angles(const CaseClass& cc, const DerivedParams& dp,
                                 const KParams& kp, double z) {
    if (cc.variant == CaseVariant::inadmissible)
        throw inadmissible_error("select_angles: " + cc.reason);
    const double eps = M_PI / 12.0;
    AngleChoice ac;
    ac.epsilon = eps;
    auto mu_upper = [&]() {
        // theta+ = pi/2 if Im(mu)<0; eps if arg(mu) in [0,pi/2); pi-eps if (pi/2,pi]
        if (dp.mu.imag() < 0.0) return M_PI / 2.0;
        const double am = std::arg(dp.mu);
        return (am >= 0.0 && am < M_PI / 2.0) ? eps : M_PI - eps;
    };
    auto mu_lower = [&]() {
        if (dp.mu.imag() > 0.0) return -M_PI / 2.0;
        const double am = std::arg(dp.mu);
        return (am > -M_PI / 2.0 && am <= 0.0) ? -eps : -M_PI + eps;
    };
    switch (cc.variant) {
        case CaseVariant::log_quadratic:
        case CaseVariant::linear:
            ac.theta_plus = M_PI / 2.0;
            ac.theta_minus = -M_PI / 2.0;
            break;
        case CaseVariant::quadratic: {
            const double pq = (double)(kp.p - kp.q);
            if (kp.alpha.real() > 0.0) {
                ac.theta_plus = M_PI / 2.0;
                ac.theta_minus = -M_PI / 2.0;
            } else {
                // Re(alpha)=0: sign of 4 i alpha -+ (p-q) decides the quadrant
                const double up = -4.0 * kp.alpha.imag() + (double)(kp.q - kp.p);
                ac.theta_plus = (up > 0.0) ? 3.0 * M_PI / 4.0 : M_PI / 4.0;
                const double dn = -4.0 * kp.alpha.imag() + pq;
                ac.theta_minus = (dn > 0.0) ? -M_PI / 4.0 : -3.0 * M_PI / 4.0;
            }
            break;
        }
        case CaseVariant::upper_balanced:
            ac.theta_plus = mu_upper();
            ac.theta_minus = (kp.p > kp.q) ? -M_PI / 4.0 : -3.0 * M_PI / 4.0;
            break;
        case CaseVariant::lower_balanced:
            ac.theta_plus = (kp.p > kp.q) ? M_PI / 4.0 : 3.0 * M_PI / 4.0;
            ac.theta_minus = mu_lower();
            break;
        case CaseVariant::balanced:
            ac.theta_plus = mu_upper();
            ac.theta_minus = mu_lower();
            break;
        case CaseVariant::logarithmic:
            if (z == 1.0)
                throw unit_argument_error("select_angles: case (vii) undefined at z = 1");
            ac.z_dependent = true;
            if (z > 1.0) {
                ac.theta_plus = eps;
                ac.theta_minus = -eps;
            } else {
                ac.theta_plus = M_PI - eps;
                ac.theta_minus = -M_PI + eps;
            }
            break;
        case CaseVariant::inadmissible:
            break;
    }
    return ac;
}

// Remark-1 conditions for deforming the contour to a vertical line.
inline bool can_use_vertical_line(const KParams& kp, cplx z) {
    const DerivedParams dp = derived_params(kp);
    const double tol = 1e-12;
    if (dp.N > 0) return true;
    if (dp.N < 0) return false;
    if (kp.alpha.real() > tol) return true;
    if (std::abs(kp.alpha) > tol) return false;
    if (kp.p != kp.q) return false;
    // N = alpha = p-q = 0
    if (std::abs(dp.mu.imag()) <= tol && std::abs(dp.mu) > tol) {
        return dp.nu.real() < -tol &&
               std::abs(std::arg(z)) < -M_PI * dp.nu.real() / (2.0 * kp.tau);
    }
    if (std::abs(dp.mu) <= tol && std::abs(dp.nu) <= tol) {
        return dp.xi.real() < -2.0 * kp.tau &&
               std::abs(z - 1.0) > tol && z.imag() == 0.0 && z.real() > 0.0;
    }
    return false;
}

namespace detail {

struct run {
    bool is_minus = false;   // side requirement: minus poles stay left
    double re_min = 0, re_max = 0;
    cplx witness{0, 0};
};

} // namespace detail

// Build the separating path.  clearance defaults to 0.05 min(1, tau).
inline Contour build_contour(const KParams& kp, const AngleChoice& ac,
                             double truncation_radius = 400.0) {
    kp.validate();
    const double h = 0.05 * std::min(1.0, kp.tau);
    const Window w = contour_window(kp);
    const std::vector<PoleRecord> poles = pole_sets(kp, w); // throws on overlap

    // group poles into maximal same-side runs, ordered by descending Re
    std::vector<detail::run> runs;
    for (auto it = poles.rbegin(); it != poles.rend(); ++it) {
        const bool mn = (it->side == PoleSide::minus);
        if (!runs.empty() && runs.back().is_minus == mn) {
            runs.back().re_min = std::min(runs.back().re_min, it->location.real());
        } else {
            runs.push_back({mn, it->location.real(), it->location.real(), it->location});
        }
    }

    // stroke abscissas: one per boundary where the side requirement changes,
    // plus outer strokes when the extreme run faces the wrong virtual side
    std::vector<double> strokes;
    const double outer_gap = std::max(2.0 * h, 0.5 * std::min(1.0, kp.tau));
    if (!runs.empty() && runs.front().is_minus)
        strokes.push_back(runs.front().re_max + outer_gap);
    for (size_t i = 0; i + 1 < runs.size(); ++i) {
        const double hi = runs[i].re_min;       // right run's leftmost pole
        const double lo = runs[i + 1].re_max;   // left run's rightmost pole
        if (hi - lo < 2.0 * h) {
            std::ostringstream os;
            os << "build_contour: poles too close to separate: (" << lo << ") vs ("
               << hi << "), need clearance " << h;
            throw separation_error(os.str());
        }
        strokes.push_back(0.5 * (lo + hi));
    }
    if (!runs.empty() && !runs.back().is_minus)
        strokes.push_back(runs.back().re_min - outer_gap);
    if (runs.empty())
        strokes.push_back(0.0); // no poles at all: any vertical line works

    // the path must make a net upward crossing: odd number of strokes
    if (strokes.size() % 2 == 0)
        throw separation_error("build_contour: inconsistent run structure");

    double ymax = 0.0;
    for (const PoleRecord& r : poles) ymax = std::max(ymax, std::abs(r.location.imag()));
    for (const cplx& v : kp.a) ymax = std::max(ymax, std::abs(v.imag()));
    for (const cplx& v : kp.b) ymax = std::max(ymax, std::abs(v.imag()));
    const double Y = ymax + std::max(1.0, 4.0 * h);
    const double riser = 2.0 * h + 0.5;

    Contour c;
    c.theta_plus = ac.theta_plus;
    c.theta_minus = ac.theta_minus;
    c.truncation_radius = truncation_radius;
    c.clearance = h;
    std::vector<cplx>& path = c.finite_path;
    path.push_back({strokes.front(), -(Y + riser)});
    double y = -Y;
    path.push_back({strokes.front(), y});
    for (size_t i = 0; i < strokes.size(); ++i) {
        y = -y;
        path.push_back({strokes[i], y});                    // vertical stroke
        if (i + 1 < strokes.size()) path.push_back({strokes[i + 1], y});
    }
    path.push_back({strokes.back(), Y + riser});
    c.anchor = path.front();
    return c;
}

// Side of the oriented contour (running from the minus ray to the plus ray):
// +1 left, -1 right.  Crossing parity of the horizontal ray to +infinity.
inline int contour_side(const Contour& c, cplx pt) {
    std::vector<std::pair<cplx, cplx>> segs;
    const double big = 0.0; // rays extended far past every test ordinate
    const double reach = 1e4 + std::abs(pt) * 10.0 + big;
    segs.push_back({c.finite_path.front()
                        + reach * std::exp(cplx(0.0, c.theta_minus)),
                    c.finite_path.front()});
    for (size_t i = 0; i + 1 < c.finite_path.size(); ++i)
        segs.push_back({c.finite_path[i], c.finite_path[i + 1]});
    segs.push_back({c.finite_path.back(),
                    c.finite_path.back() + reach * std::exp(cplx(0.0, c.theta_plus))});
    int crossings = 0;
    for (auto& [a, b] : segs) {
        const double y1 = a.imag(), y2 = b.imag();
        if (y1 == y2) continue;
        const bool up = y2 > y1;
        // half-open in the upward direction avoids double counting
        if (up ? (pt.imag() >= y1 && pt.imag() < y2)
               : (pt.imag() >= y2 && pt.imag() < y1)) {
            const double t = (pt.imag() - y1) / (y2 - y1);
            const double x = a.real() + t * (b.real() - a.real());
            if (x > pt.real()) crossings += up ? 1 : -1;
        }
    }
    return crossings == 0 ? -1 : +1;
}

// Minimum distance from a point to the contour (finite part and rays).
inline double contour_distance(const Contour& c, cplx pt) {
    auto seg_dist = [&](cplx a, cplx b) {
        const cplx ab = b - a;
        const double L2 = std::norm(ab);
        if (L2 == 0.0) return std::abs(pt - a);
        double t = ((pt - a).real() * ab.real() + (pt - a).imag() * ab.imag()) / L2;
        t = std::clamp(t, 0.0, 1.0);
        return std::abs(pt - (a + t * ab));
    };
    const double reach = 1e4 + 10.0 * std::abs(pt);
    double d = seg_dist(c.finite_path.front(),
                        c.finite_path.front() + reach * std::exp(cplx(0.0, c.theta_minus)));
    for (size_t i = 0; i + 1 < c.finite_path.size(); ++i)
        d = std::min(d, seg_dist(c.finite_path[i], c.finite_path[i + 1]));
    d = std::min(d, seg_dist(c.finite_path.back(),
                             c.finite_path.back() + reach * std::exp(cplx(0.0, c.theta_plus))));
    return d;
}

// Check the separation invariant: every window pole on its required side
// with the required clearance.
inline void verify_contour(const Contour& c, const KParams& kp) {
    const std::vector<PoleRecord> poles = pole_sets(kp, contour_window(kp));
    for (const PoleRecord& r : poles) {
        const int side = contour_side(c, r.location);
        const int want = (r.side == PoleSide::minus) ? +1 : -1;
        if (side != want) {
            std::ostringstream os;
            os << "contour verification: pole at (" << r.location.real() << ","
               << r.location.imag() << ") on the wrong side";
            throw separation_error(os.str());
        }
        if (contour_distance(c, r.location) < c.clearance * (1.0 - 1e-9)) {
            std::ostringstream os;
            os << "contour verification: clearance violated at ("
               << r.location.real() << "," << r.location.imag() << ")";
            throw separation_error(os.str());
        }
    }
}

} // namespace mbk
