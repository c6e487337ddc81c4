#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"

namespace germkit {

using Complex = std::complex<double>;

// Pairwise summation; the reduction tree depends only on n.
template <class T>
T pairwise_sum(const T* p, std::size_t n)
{
    if (n <= 8) {
        T s{};
        for (std::size_t i = 0; i < n; ++i)
            s += p[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

template <class T>
T pairwise_sum(const std::vector<T>& v)
{
    return pairwise_sum(v.data(), v.size());
}

// c_0 + c_1 z + ... + c_d z^d.
class PolynomialMap {
public:
    explicit PolynomialMap(std::vector<Complex> coeffs) : c_(std::move(coeffs))
    {
        while (c_.size() > 1 && c_.back() == Complex(0))
            c_.pop_back();
        if (c_.size() < 2)
            fail(ErrorKind::InvalidArgument, "polynomial map must have degree >= 1");
        for (const auto& x : c_)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                fail(ErrorKind::InvalidArgument, "non-finite coefficient");
    }

    // Coefficients listed from the leading one down, as on the command line.
    static PolynomialMap from_leading_first(std::vector<Complex> coeffs)
    {
        std::reverse(coeffs.begin(), coeffs.end());
        return PolynomialMap(std::move(coeffs));
    }

    static PolynomialMap monomial(Complex a, int d)
    {
        std::vector<Complex> c(static_cast<std::size_t>(d) + 1);
        c.back() = a;
        return PolynomialMap(std::move(c));
    }

    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Complex>& coefficients() const noexcept { return c_; }

    Complex operator()(Complex z) const
    {
        Complex acc = c_.back();
        for (auto it = c_.rbegin() + 1; it != c_.rend(); ++it)
            acc = acc * z + *it;
        return acc;
    }

    Complex derivative(Complex z) const
    {
        Complex acc = c_.back() * static_cast<double>(degree());
        for (int j = degree() - 1; j >= 1; --j)
            acc = acc * z + c_[static_cast<std::size_t>(j)] * static_cast<double>(j);
        return acc;
    }

    // |z| > R implies |f(z)| > 2|z|; infinite for affine maps.
    double escape_radius() const
    {
        if (degree() == 1)
            return std::numeric_limits<double>::infinity();
        double lower = 0;
        for (int j = 0; j < degree(); ++j)
            lower += std::abs(c_[static_cast<std::size_t>(j)]);
        return std::max(2.0, (2.0 + lower) / std::abs(c_.back()));
    }

private:
    std::vector<Complex> c_;
};

namespace detail {

inline std::vector<Complex> poly_mul(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    std::vector<Complex> out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

} // namespace detail

// f o g with expanded coefficients.
inline PolynomialMap compose(const PolynomialMap& f, const PolynomialMap& g)
{
    const auto& fc = f.coefficients();
    std::vector<Complex> acc{fc.back()};
    for (auto it = fc.rbegin() + 1; it != fc.rend(); ++it) {
        acc = detail::poly_mul(acc, g.coefficients());
        acc[0] += *it;
    }
    return PolynomialMap(std::move(acc));
}

inline PolynomialMap iterate(const PolynomialMap& f, int n)
{
    if (n < 1)
        fail(ErrorKind::InvalidArgument, "iteration count must be positive");
    auto acc = f;
    for (int i = 1; i < n; ++i)
        acc = compose(f, acc);
    return acc;
}

inline double coefficient_residual(const PolynomialMap& a, const PolynomialMap& b)
{
    const auto& x = a.coefficients();
    const auto& y = b.coefficients();
    double r = 0;
    for (std::size_t i = 0; i < std::max(x.size(), y.size()); ++i) {
        const Complex u = i < x.size() ? x[i] : Complex(0);
        const Complex v = i < y.size() ? y[i] : Complex(0);
        r = std::max(r, std::abs(u - v));
    }
    return r;
}

// ---------------------------------------------------------------- orbits

struct Orbit {
    std::vector<Complex> points;
    bool escaped = false;
};

// [z0, f(z0), ..., f^n(z0)]. The escape flag records that the orbit left the
// escape disk; iteration only stops early once values stop being finite.
template <class Map>
Orbit orbit(const Map& f, Complex z0, int n, double escape_radius)
{
    if (n < 0)
        fail(ErrorKind::InvalidArgument, "orbit length must be non-negative");
    Orbit o;
    o.points.push_back(z0);
    o.escaped = std::abs(z0) > escape_radius;
    Complex z = z0;
    for (int i = 0; i < n; ++i) {
        z = f(z);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            o.escaped = true;
            break;
        }
        o.points.push_back(z);
        o.escaped = o.escaped || std::abs(z) > escape_radius;
    }
    return o;
}

inline Orbit orbit(const PolynomialMap& f, Complex z0, int n) { return orbit(f, z0, n, f.escape_radius()); }

struct OrbitMatch {
    Complex point;
    int i = 0; // f^i(z0)
    int j = 0; // g^j(z0)
};

// Points common to the two forward orbits within tol, first (i, j) kept per point.
template <class MapF, class MapG>
std::vector<OrbitMatch> orbit_intersection(const MapF& f, const MapG& g, Complex z0, int n, double tol,
                                           double escape_f, double escape_g)
{
    const auto of = orbit(f, z0, n, escape_f).points;
    const auto og = orbit(g, z0, n, escape_g).points;
    std::vector<OrbitMatch> out;
    for (std::size_t i = 0; i < of.size(); ++i)
        for (std::size_t j = 0; j < og.size(); ++j) {
            if (std::abs(of[i] - og[j]) >= tol)
                continue;
            const bool seen = std::any_of(out.begin(), out.end(),
                                          [&](const OrbitMatch& m) { return std::abs(m.point - of[i]) < tol; });
            if (!seen)
                out.push_back({of[i], static_cast<int>(i), static_cast<int>(j)});
        }
    return out;
}

inline std::vector<OrbitMatch> orbit_intersection(const PolynomialMap& f, const PolynomialMap& g, Complex z0, int n,
                                                  double tol)
{
    return orbit_intersection(f, g, z0, n, tol, f.escape_radius(), g.escape_radius());
}

struct Preperiodic {
    int tail = 0;
    int period = 0;
};
struct Escapes {
    int step = 0;
};
struct Undecided {};
using PreperiodicVerdict = std::variant<Preperiodic, Escapes, Undecided>;

// Brent cycle detection on the orbit of z with approximate equality.
inline PreperiodicVerdict preperiodic_test(const PolynomialMap& f, Complex z, int max_iter = 1000, double tol = 1e-9)
{
    const double radius = f.escape_radius();
    auto close = [tol](Complex a, Complex b) { return std::abs(a - b) < tol; };
    int steps = 0;
    bool escaped = false;
    auto step = [&](Complex w) {
        ++steps;
        Complex next = f(w);
        if (!(std::abs(next) <= radius))
            escaped = true;
        return next;
    };
    if (!(std::abs(z) <= radius))
        return Escapes{0};

    int power = 1, lam = 1;
    Complex tortoise = z, hare = step(z);
    while (!close(tortoise, hare)) {
        if (escaped)
            return Escapes{steps};
        if (steps >= max_iter)
            return Undecided{};
        if (power == lam) {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = step(hare);
        ++lam;
    }
    if (escaped)
        return Escapes{steps};

    tortoise = hare = z;
    for (int i = 0; i < lam; ++i)
        hare = f(hare);
    int mu = 0;
    while (!close(tortoise, hare)) {
        tortoise = f(tortoise);
        hare = f(hare);
        if (++mu > max_iter)
            return Undecided{};
    }
    return Preperiodic{mu, lam};
}

struct TransportReport {
    double identity_residual = 0; // worst coefficient residual of the two identities
    int samples = 0;
    int checked = 0;     // samples preperiodic for g
    int transported = 0; // of those, f^n(z) preperiodic for f
    std::vector<Complex> counterexamples;
};

// With f^n o g^k = f^{2n} and g^k o f^n = g^{2k}, f^n semiconjugates g^k to f^n
// and carries g-preperiodic points to f-preperiodic points.
inline TransportReport semiconjugacy_transport_check(const PolynomialMap& f, const PolynomialMap& g, int n, int k,
                                                     const std::vector<Complex>& samples, int max_iter = 1000,
                                                     double tol = 1e-9)
{
    if (n < 1 || k < 1)
        fail(ErrorKind::InvalidArgument, "n and k must be positive");
    const auto fn = iterate(f, n);
    const auto gk = iterate(g, k);
    TransportReport r;
    r.identity_residual = std::max(coefficient_residual(compose(fn, gk), iterate(f, 2 * n)),
                                   coefficient_residual(compose(gk, fn), iterate(g, 2 * k)));
    if (!(r.identity_residual < 1e-9))
        fail(ErrorKind::LevinFails, "identity residual " + std::to_string(r.identity_residual));
    r.samples = static_cast<int>(samples.size());
    for (const Complex& z : samples) {
        if (!std::holds_alternative<Preperiodic>(preperiodic_test(g, z, max_iter, tol)))
            continue;
        ++r.checked;
        if (std::holds_alternative<Preperiodic>(preperiodic_test(f, fn(z), max_iter, tol)))
            ++r.transported;
        else
            r.counterexamples.push_back(z);
    }
    return r;
}

// ---------------------------------------------------------------- grids

struct Bounds {
    double xmin = -2, ymin = -2, xmax = 2, ymax = 2;
    bool operator==(const Bounds&) const = default;
};

// Cell-centered complex samples on a rectangle, row-major (y outer).
class GridField {
public:
    GridField() = default;
    GridField(Bounds b, int nx, int ny) : b_(b), nx_(nx), ny_(ny)
    {
        if (nx < 1 || ny < 1)
            fail(ErrorKind::InvalidArgument, "grid resolution must be positive");
        if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin))
            fail(ErrorKind::InvalidArgument, "grid bounds are empty");
        v_.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), Complex(0));
    }

    template <class Fn>
    static GridField sample(Bounds b, int nx, int ny, Fn&& fn)
    {
        GridField g(b, nx, ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                g.at(i, j) = fn(g.center(i, j));
        return g;
    }

    const Bounds& bounds() const noexcept { return b_; }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return v_.size(); }
    double dx() const { return (b_.xmax - b_.xmin) / nx_; }
    double dy() const { return (b_.ymax - b_.ymin) / ny_; }
    double cell_area() const { return dx() * dy(); }

    Complex center(int i, int j) const { return {b_.xmin + (i + 0.5) * dx(), b_.ymin + (j + 0.5) * dy()}; }
    Complex center(std::size_t idx) const
    {
        return center(static_cast<int>(idx % static_cast<std::size_t>(nx_)),
                      static_cast<int>(idx / static_cast<std::size_t>(nx_)));
    }

    Complex& at(int i, int j) { return v_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i)]; }
    Complex at(int i, int j) const { return v_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i)]; }
    Complex& operator[](std::size_t idx) { return v_[idx]; }
    Complex operator[](std::size_t idx) const { return v_[idx]; }
    const std::vector<Complex>& values() const noexcept { return v_; }

    bool same_grid(const GridField& o) const { return b_ == o.b_ && nx_ == o.nx_ && ny_ == o.ny_; }

    // Bilinear interpolation between cell centers; zero outside the bounds,
    // clamped within the outer half cell.
    Complex interpolate(Complex z) const
    {
        const double x = z.real(), y = z.imag();
        if (!(x >= b_.xmin && x <= b_.xmax && y >= b_.ymin && y <= b_.ymax))
            return 0;
        const double u = std::clamp((x - b_.xmin) / dx() - 0.5, 0.0, nx_ - 1.0);
        const double w = std::clamp((y - b_.ymin) / dy() - 0.5, 0.0, ny_ - 1.0);
        const int i0 = std::min(static_cast<int>(u), std::max(nx_ - 2, 0));
        const int j0 = std::min(static_cast<int>(w), std::max(ny_ - 2, 0));
        const int i1 = std::min(i0 + 1, nx_ - 1), j1 = std::min(j0 + 1, ny_ - 1);
        const double fu = u - i0, fw = w - j0;
        return (1 - fu) * (1 - fw) * at(i0, j0) + fu * (1 - fw) * at(i1, j0) + (1 - fu) * fw * at(i0, j1) +
               fu * fw * at(i1, j1);
    }

    double l1_norm() const
    {
        std::vector<double> a(v_.size());
        std::transform(v_.begin(), v_.end(), a.begin(), [](Complex c) { return std::abs(c); });
        return pairwise_sum(a) * cell_area();
    }

    double sup_norm() const
    {
        double s = 0;
        for (auto c : v_)
            s = std::max(s, std::abs(c));
        return s;
    }

    GridField& operator+=(const GridField& o)
    {
        require_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i)
            v_[i] += o.v_[i];
        return *this;
    }
    GridField& operator-=(const GridField& o)
    {
        require_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i)
            v_[i] -= o.v_[i];
        return *this;
    }
    GridField& operator*=(Complex s)
    {
        for (auto& c : v_)
            c *= s;
        return *this;
    }
    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(Complex s, GridField a) { return a *= s; }

    void require_same(const GridField& o) const
    {
        if (!same_grid(o))
            fail(ErrorKind::GridMismatch, "grids differ in bounds or resolution");
    }

private:
    Bounds b_;
    int nx_ = 0, ny_ = 0;
    std::vector<Complex> v_;
};

// sum mu * phi * cell area
inline Complex pairing(const GridField& mu, const GridField& phi)
{
    mu.require_same(phi);
    std::vector<Complex> p(mu.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = mu[i] * phi[i];
    return pairwise_sum(p) * mu.cell_area();
}

namespace detail {

template <class T>
void put_le(std::ostream& os, T v)
{
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is)
{
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T)))
        fail(ErrorKind::ParseError, "grid file is truncated");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace detail

// Binary layout: xmin, ymin, xmax, ymax (f64), nx, ny (i32), then nx*ny
// (re, im) f64 pairs row-major; everything little-endian.
inline void write_grid(std::ostream& os, const GridField& g)
{
    detail::put_le(os, g.bounds().xmin);
    detail::put_le(os, g.bounds().ymin);
    detail::put_le(os, g.bounds().xmax);
    detail::put_le(os, g.bounds().ymax);
    detail::put_le(os, static_cast<std::int32_t>(g.nx()));
    detail::put_le(os, static_cast<std::int32_t>(g.ny()));
    for (auto c : g.values()) {
        detail::put_le(os, c.real());
        detail::put_le(os, c.imag());
    }
}

inline GridField read_grid(std::istream& is)
{
    Bounds b;
    b.xmin = detail::get_le<double>(is);
    b.ymin = detail::get_le<double>(is);
    b.xmax = detail::get_le<double>(is);
    b.ymax = detail::get_le<double>(is);
    const auto nx = detail::get_le<std::int32_t>(is);
    const auto ny = detail::get_le<std::int32_t>(is);
    if (nx < 1 || ny < 1 || static_cast<std::int64_t>(nx) * ny > (std::int64_t{1} << 28))
        fail(ErrorKind::ParseError, "grid header has an invalid resolution");
    if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin))
        fail(ErrorKind::ParseError, "grid header has empty bounds");
    GridField g(b, nx, ny);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double re = detail::get_le<double>(is);
        const double im = detail::get_le<double>(is);
        g[i] = {re, im};
    }
    if (is.peek() != std::char_traits<char>::eof())
        fail(ErrorKind::ParseError, "trailing bytes after grid data");
    return g;
}

inline void save_grid(const std::string& path, const GridField& g)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        fail(ErrorKind::IoError, "cannot write " + path);
    write_grid(os, g);
    if (!os)
        fail(ErrorKind::IoError, "write failed for " + path);
}

inline GridField load_grid(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        fail(ErrorKind::IoError, "cannot open " + path);
    return read_grid(is);
}

// ---------------------------------------------------------------- operators

inline constexpr double kCriticalExclusion = 1e-6;
inline constexpr double kRootResidual = 1e-10;

// Roots of sum c_j y^j by Aberth-Ehrlich iteration followed by Newton polish.
// Residuals are backward errors |p(y)| / sum |c_j| |y|^j.
inline std::vector<Complex> polynomial_roots(const std::vector<Complex>& c)
{
    const int d = static_cast<int>(c.size()) - 1;
    if (d < 1 || c.back() == Complex(0))
        fail(ErrorKind::InvalidArgument, "root finding needs a nonzero leading coefficient");
    auto eval = [&](Complex y, Complex& dp, double& scale) {
        Complex p = c.back();
        dp = 0;
        scale = std::abs(c.back());
        const double ay = std::abs(y);
        for (int j = d - 1; j >= 0; --j) {
            dp = dp * y + p;
            p = p * y + c[static_cast<std::size_t>(j)];
            scale = scale * ay + std::abs(c[static_cast<std::size_t>(j)]);
        }
        return p;
    };
    if (d == 1)
        return {-c[0] / c[1]};
    if (d == 2) {
        const Complex disc = std::sqrt(c[1] * c[1] - 4.0 * c[2] * c[0]);
        const Complex q = -0.5 * (c[1] + (std::real(std::conj(c[1]) * disc) >= 0 ? disc : -disc));
        if (q == Complex(0))
            return {0, 0};
        std::vector<Complex> r{q / c[2], c[0] / q};
        for (auto& y : r) {
            Complex dp;
            double scale;
            const Complex p = eval(y, dp, scale);
            if (dp != Complex(0))
                y -= p / dp;
        }
        return r;
    }

    double bound = 0;
    for (int j = 0; j < d; ++j)
        bound = std::max(bound, std::abs(c[static_cast<std::size_t>(j)] / c.back()));
    bound += 1;
    std::vector<Complex> y(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k)
        y[static_cast<std::size_t>(k)] = std::polar(bound, 2 * std::numbers::pi * k / d + 0.4);
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0;
        for (std::size_t k = 0; k < y.size(); ++k) {
            Complex dp;
            double scale;
            const Complex p = eval(y[k], dp, scale);
            if (std::abs(p) <= 1e-300)
                continue;
            const Complex ratio = p / dp;
            Complex sum = 0;
            for (std::size_t m = 0; m < y.size(); ++m)
                if (m != k)
                    sum += 1.0 / (y[k] - y[m]);
            const Complex step = ratio / (1.0 - ratio * sum);
            y[k] -= step;
            moved = std::max(moved, std::abs(step) / std::max(1.0, std::abs(y[k])));
        }
        if (moved < 1e-15)
            break;
    }
    return y;
}

inline double root_residual(const std::vector<Complex>& c, Complex y)
{
    Complex p = c.back();
    double scale = std::abs(c.back());
    for (int j = static_cast<int>(c.size()) - 2; j >= 0; --j) {
        p = p * y + c[static_cast<std::size_t>(j)];
        scale = scale * std::abs(y) + std::abs(c[static_cast<std::size_t>(j)]);
    }
    return std::abs(p) / std::max(scale, 1e-300);
}

// All solutions of f(y) = x.
inline std::vector<Complex> preimages(const PolynomialMap& f, Complex x)
{
    auto c = f.coefficients();
    c[0] -= x;
    auto roots = polynomial_roots(c);
    for (const auto& y : roots)
        if (!(root_residual(c, y) < kRootResidual))
            fail(ErrorKind::RootFindingFailed, "preimage residual above tolerance");
    return roots;
}

struct OperatorResult {
    GridField field;
    std::size_t excluded = 0; // preimages or cells skipped near critical points
};

// (f_* phi)(x) = sum over f(y) = x of phi(y) / f'(y)^2.
inline OperatorResult ruelle_pushforward(const PolynomialMap& f, const GridField& phi)
{
    OperatorResult r{GridField(phi.bounds(), phi.nx(), phi.ny()), 0};
    std::vector<std::uint32_t> skipped(phi.size());
    parallel_for(phi.size(), [&](std::size_t idx) {
        Complex sum = 0;
        for (const Complex& y : preimages(f, phi.center(idx))) {
            const Complex d = f.derivative(y);
            if (std::abs(d) < kCriticalExclusion) {
                ++skipped[idx];
                continue;
            }
            sum += phi.interpolate(y) / (d * d);
        }
        r.field[idx] = sum;
    });
    for (auto s : skipped)
        r.excluded += s;
    return r;
}

// (B_f mu)(z) = mu(f(z)) conj(f'(z)) / f'(z) with mu evaluated by `eval`.
template <class Eval>
OperatorResult beltrami_pullback(const PolynomialMap& f, Eval&& eval, Bounds b, int nx, int ny)
{
    OperatorResult r{GridField(b, nx, ny), 0};
    std::vector<std::uint8_t> skipped(r.field.size());
    parallel_for(r.field.size(), [&](std::size_t idx) {
        const Complex z = r.field.center(idx);
        const Complex d = f.derivative(z);
        if (std::abs(d) < kCriticalExclusion) {
            skipped[idx] = 1;
            return;
        }
        r.field[idx] = eval(f(z)) * std::conj(d) / d;
    });
    for (auto s : skipped)
        r.excluded += s;
    return r;
}

inline OperatorResult beltrami_pullback(const PolynomialMap& f, const GridField& mu)
{
    return beltrami_pullback(f, [&](Complex w) { return mu.interpolate(w); }, mu.bounds(), mu.nx(), mu.ny());
}

// |<B_f mu, phi> - <mu, f_* phi>|
inline double duality_residual(const PolynomialMap& f, const GridField& mu, const GridField& phi)
{
    mu.require_same(phi);
    const auto lhs = pairing(beltrami_pullback(f, mu).field, phi);
    const auto rhs = pairing(mu, ruelle_pushforward(f, phi).field);
    return std::abs(lhs - rhs);
}

struct CesaroResult {
    GridField average;
    std::vector<double> increments; // ||C_m - C_{m-1}||_1 for m = 2..n
    std::vector<double> norms;      // ||C_m||_1 for m = 1..n
    std::size_t excluded = 0;
};

// C_n = (1/n) sum_{i<n} f_*^i phi
inline CesaroResult cesaro_average(const PolynomialMap& f, const GridField& phi, int n)
{
    if (n < 1)
        fail(ErrorKind::InvalidArgument, "n must be positive");
    CesaroResult r;
    GridField term = phi, sum = phi;
    GridField prev = phi;
    r.norms.push_back(phi.l1_norm());
    for (int m = 2; m <= n; ++m) {
        auto pushed = ruelle_pushforward(f, term);
        r.excluded += pushed.excluded;
        term = std::move(pushed.field);
        sum += term;
        GridField cur = Complex(1.0 / m) * sum;
        r.increments.push_back((cur - prev).l1_norm());
        r.norms.push_back(cur.l1_norm());
        prev = std::move(cur);
    }
    r.average = std::move(prev);
    return r;
}

struct AlignmentReport {
    double fixed_residual = 0; // ||f_* h - h||_1
    std::size_t support_cells = 0;
    std::size_t checked_cells = 0; // support cells whose image stays well inside the support
    double sup_residual = 0;       // max |B_f nu - nu| over checked cells
    bool passes = false;
};

// For h with f_* h ~ h, nu = conj(h)/|h| should satisfy B_f nu = nu on the
// support of h.
inline AlignmentReport alignment_check(const PolynomialMap& f, const GridField& h, double tol,
                                       double check_tol = 1e-6)
{
    AlignmentReport r;
    r.fixed_residual = (ruelle_pushforward(f, h).field - h).l1_norm();
    if (!(r.fixed_residual < tol))
        fail(ErrorKind::NotFixed, "||f_* h - h||_1 = " + std::to_string(r.fixed_residual));
    GridField nu(h.bounds(), h.nx(), h.ny());
    std::vector<bool> support(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (std::abs(h[i]) > tol) {
            support[i] = true;
            nu[i] = std::conj(h[i]) / std::abs(h[i]);
            ++r.support_cells;
        }
    }
    if (r.support_cells == 0)
        fail(ErrorKind::NoSupport, "h vanishes within tolerance");

    // interpolation only uses the four surrounding cells, so a cell is checked
    // when all of those lie in the support
    auto inside = [&](Complex w) {
        const double u = (w.real() - h.bounds().xmin) / h.dx() - 0.5;
        const double v = (w.imag() - h.bounds().ymin) / h.dy() - 0.5;
        const int i0 = static_cast<int>(std::floor(u)), j0 = static_cast<int>(std::floor(v));
        for (int dj = 0; dj <= 1; ++dj)
            for (int di = 0; di <= 1; ++di) {
                const int i = i0 + di, j = j0 + dj;
                if (i < 0 || j < 0 || i >= h.nx() || j >= h.ny())
                    return false;
                if (!support[static_cast<std::size_t>(j) * static_cast<std::size_t>(h.nx()) + static_cast<std::size_t>(i)])
                    return false;
            }
        return true;
    };
    const auto pulled = beltrami_pullback(f, nu).field;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!support[i] || !inside(f(h.center(i))) || std::abs(f.derivative(h.center(i))) < kCriticalExclusion)
            continue;
        ++r.checked_cells;
        r.sup_residual = std::max(r.sup_residual, std::abs(pulled[i] - nu[i]));
    }
    r.passes = r.checked_cells > 0 && r.sup_residual < check_tol;
    return r;
}

} // namespace germkit
