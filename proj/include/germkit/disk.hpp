#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "word.hpp"

namespace germkit {

using Point = std::complex<double>;

// Orientation-preserving automorphism of the unit disk,
// z -> (a z + b) / (conj(b) z + conj(a)) with |a|^2 - |b|^2 = 1.
class MobiusDisk {
public:
    MobiusDisk() = default;
    MobiusDisk(Point a, Point b) : a_(a), b_(b) { normalize(); }

    static MobiusDisk identity() { return {}; }

    Point a() const noexcept { return a_; }
    Point b() const noexcept { return b_; }

    Point operator()(Point z) const { return (a_ * z + b_) / (std::conj(b_) * z + std::conj(a_)); }

    Point derivative(Point z) const
    {
        const Point d = std::conj(b_) * z + std::conj(a_);
        return 1.0 / (d * d);
    }

    MobiusDisk inverse() const { return {std::conj(a_), -b_}; }

    // (*this) o other
    MobiusDisk operator*(const MobiusDisk& o) const
    {
        return {a_ * o.a_ + b_ * std::conj(o.b_), a_ * o.b_ + b_ * std::conj(o.a_)};
    }

    double determinant() const { return std::norm(a_) - std::norm(b_); }
    double trace() const { return std::abs(2.0 * a_.real()); }

private:
    void normalize()
    {
        const double det = std::norm(a_) - std::norm(b_);
        if (!(det > 0) || !std::isfinite(det))
            fail(ErrorKind::InvalidArgument, "coefficients do not define a disk automorphism");
        const double s = std::sqrt(det);
        a_ /= s;
        b_ /= s;
    }

    Point a_{1.0, 0.0};
    Point b_{0.0, 0.0};
};

inline constexpr double kClassifyTol = 1e-9;

// T_c o R_theta o T_c^{-1}, T_c(z) = (z + c) / (1 + conj(c) z).
inline MobiusDisk rotation_about(Point c, double theta)
{
    if (!(std::abs(c) < 1.0))
        fail(ErrorKind::InvalidArgument, "rotation center must lie in the open unit disk");
    const MobiusDisk t(Point(1.0), c);
    const MobiusDisk r(std::polar(1.0, theta / 2), Point(0.0));
    return t * r * t.inverse();
}

enum class MobiusType { Elliptic, Parabolic, Hyperbolic };

inline const char* to_string(MobiusType t)
{
    switch (t) {
    case MobiusType::Elliptic: return "Elliptic";
    case MobiusType::Parabolic: return "Parabolic";
    case MobiusType::Hyperbolic: return "Hyperbolic";
    }
    return "?";
}

struct Classification {
    MobiusType type;
    bool identity = false;
    double trace = 0;
};

inline Classification classify(const MobiusDisk& m, double tol = kClassifyTol)
{
    const double t = m.trace();
    Classification c{MobiusType::Parabolic, false, t};
    if (t < 2 - tol)
        c.type = MobiusType::Elliptic;
    else if (t > 2 + tol)
        c.type = MobiusType::Hyperbolic;
    if (std::abs(m.b()) < tol && std::abs(m.a().imag()) < tol) {
        c.type = MobiusType::Elliptic;
        c.identity = true;
    }
    return c;
}

// Roots of conj(b) z^2 + (conj(a) - a) z - b = 0. For b = 0 the fixed points
// are 0 and infinity; infinity is reported as an empty optional.
inline std::array<std::optional<Point>, 2> fixed_points(const MobiusDisk& m)
{
    const Point a = m.a(), b = m.b();
    const Point qa = std::conj(b), qb = std::conj(a) - a, qc = -b;
    if (std::abs(qa) < 1e-15)
        return {Point(0.0), std::nullopt};
    const Point disc = std::sqrt(qb * qb - 4.0 * qa * qc);
    // avoid cancellation
    const Point qq = -0.5 * (qb + (std::real(std::conj(qb) * disc) >= 0 ? disc : -disc));
    Point z1 = qq / qa;
    Point z2 = std::abs(qq) > 0 ? qc / qq : z1;
    return {z1, z2};
}

// Fixed point inside the disk of an elliptic element.
inline Point elliptic_center(const MobiusDisk& m)
{
    auto c = classify(m);
    if (c.type != MobiusType::Elliptic || c.identity)
        fail(ErrorKind::InvalidArgument, "expected a non-identity elliptic map");
    auto fp = fixed_points(m);
    std::optional<Point> best;
    for (const auto& p : fp)
        if (p && (!best || std::abs(*p) < std::abs(*best)))
            best = p;
    return *best;
}

// Attracting and repelling boundary fixed points of a hyperbolic element.
inline std::pair<Point, Point> hyperbolic_axis(const MobiusDisk& m)
{
    if (classify(m).type != MobiusType::Hyperbolic)
        fail(ErrorKind::NotHyperbolic, "map is not hyperbolic");
    auto fp = fixed_points(m);
    Point p = *fp[0], q = *fp[1];
    p /= std::abs(p);
    q /= std::abs(q);
    if (std::abs(m.derivative(p)) > std::abs(m.derivative(q)))
        std::swap(p, q);
    return {p, q};
}

inline MobiusDisk evaluate_word(const Word& w, const MobiusDisk& f, const MobiusDisk& g)
{
    MobiusDisk acc;
    for (auto l : w.letters())
        acc = acc * (l == Letter::F ? f : g);
    return acc;
}

inline double hyperbolic_distance(Point z, Point w)
{
    const double r = std::abs((z - w) / (1.0 - std::conj(w) * z));
    return 2 * std::atanh(r);
}

// First hyperbolic product (shortlex) in the positive semigroup <gamma, tau>.
inline std::pair<Word, MobiusDisk> find_hyperbolic_word(const MobiusDisk& gamma, const MobiusDisk& tau, int max_len)
{
    if (max_len < 1 || max_len > 24)
        fail(ErrorKind::InvalidArgument, "max_len must be in 1..24");
    const Point c1 = elliptic_center(gamma);
    const Point c2 = elliptic_center(tau);
    if (std::abs(c1 - c2) < kClassifyTol)
        fail(ErrorKind::SameCenter, "rotations share a fixed point, the semigroup is abelian");
    std::vector<MobiusDisk> prev;
    for (int len = 1; len <= max_len; ++len) {
        const std::size_t count = std::size_t{1} << len;
        std::vector<MobiusDisk> cur(count);
        for (std::size_t idx = 0; idx < count; ++idx) {
            const auto& last = (idx & 1) ? tau : gamma;
            cur[idx] = len == 1 ? last : prev[idx >> 1] * last;
            if (classify(cur[idx]).type == MobiusType::Hyperbolic)
                return {Word::from_index(idx, len), cur[idx]};
        }
        prev = std::move(cur);
    }
    fail(ErrorKind::NotFound, "no hyperbolic word up to length " + std::to_string(max_len));
}

struct RoundDisk {
    Point center;
    double radius = 0;
    bool contains(Point z, double slack = 0) const { return std::abs(z - center) <= radius - slack; }
};

// Region of the disk cut off by the geodesic over the boundary arc centered at
// angle `mid` with half-width `half` (< pi/2): a round disk orthogonal to the
// unit circle.
inline RoundDisk half_plane(double mid, double half)
{
    return {std::polar(1.0 / std::cos(half), mid), std::tan(half)};
}

struct PingPongCertificate {
    // FourDisk: h maps the complement of h_minus into h_plus and likewise for
    // g, the four disks pairwise disjoint. This makes <h, g> a Schottky group.
    // NestedDomain: h(domain) and g(domain) are disjoint subsets of domain,
    // which is enough for the positive semigroup.
    enum class Kind { FourDisk, NestedDomain };
    Kind kind = Kind::FourDisk;
    MobiusDisk h, g;
    RoundDisk h_plus, h_minus, g_plus, g_minus;
    RoundDisk domain, h_image, g_image;
    int samples = 0;
    double margin = 0;
};

inline const char* to_string(PingPongCertificate::Kind k)
{
    return k == PingPongCertificate::Kind::FourDisk ? "FourDisk" : "NestedDomain";
}

namespace detail {

constexpr double kTwoPi = 6.283185307179586;

// Sampled boundary of (closed unit disk) minus U, or of the part of U inside
// the disk when `inside` is set.
inline std::vector<Point> region_boundary(const RoundDisk& u, int samples, bool inside)
{
    std::vector<Point> pts;
    for (int i = 0; i < samples; ++i) {
        const double t = kTwoPi * i / samples;
        const Point on_circle = std::polar(1.0, t);
        if (u.contains(on_circle) == inside)
            pts.push_back(on_circle);
        const Point on_u = u.center + std::polar(u.radius, t);
        if (std::abs(on_u) <= 1.0)
            pts.push_back(on_u);
    }
    return pts;
}

// Least slack of m(D \ from) inside to, over the sampled boundary.
inline double inclusion_slack(const MobiusDisk& m, const RoundDisk& from, const RoundDisk& to, int samples)
{
    double slack = std::numeric_limits<double>::infinity();
    for (const Point& p : region_boundary(from, samples, false))
        slack = std::min(slack, to.radius - std::abs(m(p) - to.center));
    return slack;
}

inline double angle_of(Point p) { return std::arg(p) < 0 ? std::arg(p) + kTwoPi : std::arg(p); }

// Counterclockwise angular distance from p to q in [0, 2 pi).
inline double ccw(Point from, Point to)
{
    double d = angle_of(to) - angle_of(from);
    return d < 0 ? d + kTwoPi : d;
}

inline std::optional<PingPongCertificate> four_disk(const MobiusDisk& h, const MobiusDisk& g,
                                                   const std::array<Point, 4>& pts, int samples, std::string& why)
{
    std::optional<PingPongCertificate> best;
    for (double r = 0.05;; r *= 1.02) {
        const double half = std::atan(r);
        std::array<RoundDisk, 4> u;
        for (std::size_t i = 0; i < 4; ++i)
            u[i] = half_plane(std::arg(pts[i]), half);
        double disjoint = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                disjoint = std::min(disjoint, std::abs(u[i].center - u[j].center) - u[i].radius - u[j].radius);
        if (disjoint <= 0)
            break;
        PingPongCertificate c;
        c.kind = PingPongCertificate::Kind::FourDisk;
        c.h = h;
        c.g = g;
        c.h_plus = u[0];
        c.h_minus = u[1];
        c.g_plus = u[2];
        c.g_minus = u[3];
        c.samples = samples;
        const double sh = inclusion_slack(h, c.h_minus, c.h_plus, samples);
        const double sg = inclusion_slack(g, c.g_minus, c.g_plus, samples);
        c.margin = std::min({sh, sg, disjoint});
        if (c.margin > 0 && (!best || c.margin > best->margin))
            best = c;
        else if (!best)
            why = sh <= sg ? "h(D \\ U_h-) not inside U_h+" : "g(D \\ U_g-) not inside U_g+";
    }
    return best;
}

inline std::optional<PingPongCertificate> nested_domain(const MobiusDisk& h, const MobiusDisk& g,
                                                       const std::array<Point, 4>& pts, int samples,
                                                       std::string& why)
{
    const Point hp = pts[0], hm = pts[1], gp = pts[2], gm = pts[3];
    // arc from one attractor to the other that avoids both repellers
    Point from = hp, to = gp;
    if (ccw(from, hm) < ccw(from, to) || ccw(from, gm) < ccw(from, to))
        std::swap(from, to);
    const double width = ccw(from, to);
    if (ccw(from, hm) < width || ccw(from, gm) < width) {
        why = "repelling fixed points separate the attracting ones";
        return std::nullopt;
    }
    if (width >= kTwoPi / 2 - 1e-9) {
        why = "attracting fixed points span a half circle or more";
        return std::nullopt;
    }
    auto arc_disk = [](Point a, Point b) { return half_plane(angle_of(a) + ccw(a, b) / 2, ccw(a, b) / 2); };

    PingPongCertificate c;
    c.kind = PingPongCertificate::Kind::NestedDomain;
    c.h = h;
    c.g = g;
    c.samples = samples;
    c.domain = arc_disk(from, to);
    // each map fixes its own attractor and pulls the other endpoint toward it
    const bool h_first = from == hp;
    const Point h_end = h(h_first ? to : from), g_end = g(h_first ? from : to);
    c.h_image = h_first ? arc_disk(from, h_end) : arc_disk(h_end, to);
    c.g_image = h_first ? arc_disk(g_end, to) : arc_disk(from, g_end);
    const double gap = h_first ? ccw(h_end, g_end) : ccw(g_end, h_end);
    if (gap <= 0 || gap >= width) {
        why = "h(domain) and g(domain) overlap";
        return std::nullopt;
    }

    constexpr double kTouch = 1e-12; // attractors sit on the domain boundary
    double margin = gap;
    for (const Point& p : region_boundary(c.domain, samples, true)) {
        const Point hp_img = h(p), gp_img = g(p);
        if (!c.domain.contains(hp_img, -kTouch) || !c.domain.contains(gp_img, -kTouch)) {
            why = "domain is not mapped into itself";
            return std::nullopt;
        }
        margin = std::min({margin, std::abs(hp_img - c.g_image.center) - c.g_image.radius,
                           std::abs(gp_img - c.h_image.center) - c.h_image.radius});
    }
    if (!(margin > 0)) {
        why = "sampled images of h and g meet";
        return std::nullopt;
    }
    c.margin = margin;
    return c;
}

} // namespace detail

// Ping-pong certificate for the positive semigroup <h, g>. The four-disk
// Schottky configuration is tried first over a geometric ladder of radii
// starting at 0.05, keeping the rung with the largest slack. If no rung works,
// the nested-domain configuration on the arc between the attractors is tried.
inline PingPongCertificate ping_pong_certificate(const MobiusDisk& h, const MobiusDisk& g, int samples = 720)
{
    if (samples < 8)
        fail(ErrorKind::InvalidArgument, "need at least 8 samples");
    const auto [hp, hm] = hyperbolic_axis(h);
    const auto [gp, gm] = hyperbolic_axis(g);
    const std::array<Point, 4> pts{hp, hm, gp, gm};
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            min_gap = std::min(min_gap, std::abs(pts[i] - pts[j]));
    if (min_gap < 1e-6)
        fail(ErrorKind::AxesTooClose, "boundary fixed points nearly coincide");

    std::string four_why = "no radius fits", nested_why;
    if (auto c = detail::four_disk(h, g, pts, samples, four_why))
        return *c;
    if (auto c = detail::nested_domain(h, g, pts, samples, nested_why))
        return *c;
    fail(ErrorKind::PingPongFailure, "four-disk: " + four_why + "; nested domain: " + nested_why);
}

} // namespace germkit
