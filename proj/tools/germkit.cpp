// germkit command-line front end. Every subcommand prints one JSON document
// {status, payload, diagnostics, version} on stdout. Exit codes: 0 ok,
// 1 domain error, 2 usage or input error.

#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <germkit/disk.hpp>
#include <germkit/dynamics.hpp>
#include <germkit/json_dump.hpp>
#include <germkit/monomial.hpp>
#include <germkit/normal_forms.hpp>
#include <germkit/relations.hpp>
#include <germkit/series_io.hpp>

#ifndef GERMKIT_VERSION
#define GERMKIT_VERSION "0.0.0"
#endif

using nlohmann::json;
using namespace germkit;

namespace {

struct Outcome {
    json payload;
    std::vector<std::string> diagnostics;
};

using Action = std::function<Outcome()>;

// ------------------------------------------------------------ parsing helpers

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        out.push_back(cur);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

double parse_double(const std::string& s)
{
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::ParseError, "not a number: '" + s + "'");
}

std::vector<double> parse_doubles(const std::string& s, std::size_t expected)
{
    std::vector<double> v;
    for (const auto& tok : split(s, ','))
        v.push_back(parse_double(tok));
    if (v.size() != expected)
        fail(ErrorKind::ParseError, "expected " + std::to_string(expected) + " comma-separated numbers in '" + s + "'");
    return v;
}

// "x" or "x,y"
Complex parse_point(const std::string& s)
{
    auto parts = split(s, ',');
    if (parts.size() == 1)
        return {parse_double(parts[0]), 0};
    if (parts.size() == 2)
        return {parse_double(parts[0]), parse_double(parts[1])};
    fail(ErrorKind::ParseError, "expected x or x,y in '" + s + "'");
}

// Leading coefficient first; each entry "re" or "re:im".
PolynomialMap parse_poly(const std::string& s)
{
    std::vector<Complex> c;
    for (const auto& tok : split(s, ',')) {
        auto parts = split(tok, ':');
        if (parts.size() == 1)
            c.emplace_back(parse_double(parts[0]), 0);
        else if (parts.size() == 2)
            c.emplace_back(parse_double(parts[0]), parse_double(parts[1]));
        else
            fail(ErrorKind::ParseError, "bad polynomial coefficient '" + tok + "'");
    }
    return PolynomialMap::from_leading_first(std::move(c));
}

Bounds parse_bounds(const std::string& s)
{
    auto v = parse_doubles(s, 4);
    return {v[0], v[1], v[2], v[3]};
}

// "e/q" or "e/inf"
UnitScale parse_scale(const std::string& s)
{
    auto parts = split(s, '/');
    if (parts.size() != 2)
        fail(ErrorKind::ParseError, "scale must be exponent/order, got '" + s + "'");
    try {
        const std::int64_t e = std::stoll(parts[0]);
        if (parts[1] == "inf")
            return UnitScale(e, std::nullopt);
        return UnitScale(e, std::stoll(parts[1]));
    } catch (const std::logic_error&) {
        fail(ErrorKind::ParseError, "scale must be exponent/order, got '" + s + "'");
    }
}

MobiusDisk parse_mobius(const std::string& s)
{
    auto v = parse_doubles(s, 4);
    return {Complex(v[0], v[1]), Complex(v[2], v[3])};
}

// ------------------------------------------------------------ JSON helpers

json point_json(Complex z) { return json::array({z.real(), z.imag()}); }

json points_json(const std::vector<Complex>& zs)
{
    json a = json::array();
    for (auto z : zs)
        a.push_back(point_json(z));
    return a;
}

json disk_json(const RoundDisk& d) { return {{"center", point_json(d.center)}, {"radius", d.radius}}; }

json mobius_json(const MobiusDisk& m) { return {{"a", point_json(m.a())}, {"b", point_json(m.b())}}; }

json scale_json(const UnitScale& s)
{
    return {{"exponent", s.exponent}, {"base_order", s.base_order ? json(*s.base_order) : json("inf")}};
}

json monomial_json(const Monomial& m) { return {{"scale", scale_json(m.scale)}, {"degree", m.degree}}; }

template <Coefficient C>
json normal_form_json(const NormalFormResult<C>& r)
{
    json j{{"kind", to_string(r.kind)},
           {"conjugator", series_to_json(r.conjugator)},
           {"normal_form", series_to_json(r.normal_form)},
           {"verified_order", r.verified_order},
           {"principal_root", r.principal_root},
           {"exact", is_exact_v<C>}};
    if (r.parabolic) {
        const auto& p = *r.parabolic;
        j["parameters"] = {{"k", p.k},
                           {"n", p.n},
                           {"c", coefficient_to_json(p.c)},
                           {"b1", coefficient_to_json(p.b1)},
                           {"c1", coefficient_to_json(p.c1)}};
    }
    return j;
}

template <Coefficient C>
json certificate_json(const RelationCertificate<C>& c)
{
    using K = typename RelationCertificate<C>::Kind;
    json j{{"kind", certificate_kind_name(c.kind)}, {"order", c.order}};
    switch (c.kind) {
    case K::FreeUpTo: j["max_len"] = c.max_len; break;
    case K::OrderNRelation:
    case K::ExactRelation:
        j["max_len"] = c.max_len;
        j["w1"] = c.w1->str();
        j["w2"] = c.w2->str();
        j["vanishing"] = c.vanishing;
        break;
    case K::SharedIteration:
        j["m"] = c.m;
        j["n"] = c.n;
        j["vanishing"] = c.vanishing;
        break;
    case K::Levin:
        j["k"] = c.k;
        j["l"] = c.l;
        break;
    case K::Commute: break;
    }
    if (c.lhs)
        j["lhs"] = series_to_json(*c.lhs);
    if (c.rhs)
        j["rhs"] = series_to_json(*c.rhs);
    return j;
}

json grid_summary(const GridField& g)
{
    return {{"nx", g.nx()},
            {"ny", g.ny()},
            {"bounds", json::array({g.bounds().xmin, g.bounds().ymin, g.bounds().xmax, g.bounds().ymax})},
            {"l1", g.l1_norm()},
            {"sup", g.sup_norm()}};
}

json verdict_json(const PreperiodicVerdict& v)
{
    if (const auto* p = std::get_if<Preperiodic>(&v))
        return {{"kind", "Preperiodic"}, {"tail", p->tail}, {"period", p->period}};
    if (const auto* e = std::get_if<Escapes>(&v))
        return {{"kind", "Escapes"}, {"step", e->step}};
    return {{"kind", "Undecided"}};
}

// Calls fn(f, g) with both series in the same coefficient mode.
template <class Fn>
Outcome with_series_pair(const std::string& fpath, const std::string& gpath, Fn&& fn)
{
    auto f = load_series(fpath);
    auto g = load_series(gpath);
    if (f.index() != g.index())
        fail(ErrorKind::ModeMismatch, "f and g must both be exact or both approximate");
    if (std::holds_alternative<ExactSeries>(f))
        return fn(std::get<ExactSeries>(f), std::get<ExactSeries>(g));
    return fn(std::get<ApproxSeries>(f), std::get<ApproxSeries>(g));
}

constexpr const char* kOrderCaveat = "relation holds to the truncation order only; the underlying maps may differ";

// ------------------------------------------------------------ grid helpers

struct GridOptions {
    int grid = 256;
    std::string bounds = "-2,-2,2,2";
    CLI::Option* grid_opt = nullptr;
    CLI::Option* bounds_opt = nullptr;

    void add(CLI::App* app)
    {
        grid_opt = app->add_option("--grid", grid, "grid resolution per axis")->capture_default_str();
        bounds_opt = app->add_option("--bounds", bounds, "xmin,ymin,xmax,ymax")->capture_default_str();
    }

    // Loaded grids carry their own geometry; explicit flags must agree with it.
    GridField load(const std::string& path) const
    {
        auto g = load_grid(path);
        if (grid_opt->count() && (g.nx() != grid || g.ny() != grid))
            fail(ErrorKind::GridMismatch, path + " has resolution " + std::to_string(g.nx()) + "x" +
                                              std::to_string(g.ny()));
        if (bounds_opt->count() && !(g.bounds() == parse_bounds(bounds)))
            fail(ErrorKind::GridMismatch, path + " has different bounds");
        return g;
    }
};

double bump(Complex z, Complex c, double r)
{
    const double s = std::norm(z - c) / (r * r);
    return s < 1 ? std::exp(1 - 1 / (1 - s)) : 0;
}

bool is_usage_error(ErrorKind k)
{
    return k == ErrorKind::ParseError || k == ErrorKind::IoError || k == ErrorKind::InvalidArgument;
}

void emit(const std::string& status, const json& payload, const std::vector<std::string>& diagnostics)
{
    json out{{"status", status}, {"payload", payload}, {"diagnostics", diagnostics}, {"version", GERMKIT_VERSION}};
    std::cout << dump_json(out) << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"germkit: formal germs, monomial semigroups, disk ping-pong and transfer operators"};
    // -h is left free: several subcommands take a map or density named h
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);
    Action action;

    // version
    app.add_subcommand("version", "print the toolkit version")->callback([&] {
        action = [] { return Outcome{{{"version", GERMKIT_VERSION}}, {}}; };
    });

    // series
    {
        auto* series = app.add_subcommand("series", "truncated power series operations");
        series->require_subcommand(1);
        auto* f = new std::string;
        auto* g = new std::string;
        auto* n = new std::int64_t(2);
        auto* w = new std::string;

        auto binary = [&](const char* op, const char* help, auto fn, std::initializer_list<const char*> extra = {}) {
            auto* sub = series->add_subcommand(op, help);
            sub->add_option("--f", *f, "series JSON file")->required();
            sub->add_option("--g", *g, "series JSON file")->required();
            for (const char* e : extra) {
                if (std::string(e) == "--word")
                    sub->add_option("--word", *w, "word over {F, G}, leftmost letter applied last")->required();
            }
            sub->callback([&action, f, g, fn] {
                action = [=] { return with_series_pair(*f, *g, fn); };
            });
        };
        auto unary = [&](const char* op, const char* help, auto fn, bool takes_n = false) {
            auto* sub = series->add_subcommand(op, help);
            sub->add_option("--f", *f, "series JSON file")->required();
            if (takes_n)
                sub->add_option("--n", *n, "number of iterations")->capture_default_str();
            sub->callback([&action, f, fn] {
                action = [=] {
                    auto s = load_series(*f);
                    return std::visit([&](const auto& a) { return fn(a); }, s);
                };
            });
        };

        binary("compose", "f o g", [](const auto& a, const auto& b) {
            return Outcome{{{"result", series_to_json(compose(a, b))}}, {}};
        });
        binary("conjugate", "f o g o f^-1: g in the coordinate given by f", [](const auto& a, const auto& b) {
            return Outcome{{{"result", series_to_json(conjugate(a, b))}}, {}};
        });
        binary("commute", "compare f o g with g o f", [](const auto& a, const auto& b) {
            return Outcome{{{"commute", commute_check(a, b)}, {"order", a.order()}}, {}};
        });
        binary(
            "word", "evaluate a word in f and g",
            [w](const auto& a, const auto& b) {
                return Outcome{{{"word", *w}, {"result", series_to_json(evaluate_word(Word::parse(*w), a, b))}}, {}};
            },
            {"--word"});
        unary("invert", "compositional inverse", [](const auto& a) {
            return Outcome{{{"result", series_to_json(invert(a))}}, {}};
        });
        unary("valuation", "index of the first nonzero coefficient", [](const auto& a) {
            return Outcome{{{"valuation", valuation(a)}, {"order", a.order()}}, {}};
        });
        unary(
            "iterate", "n-fold composition",
            [n](const auto& a) { return Outcome{{{"n", *n}, {"result", series_to_json(iterate(a, *n))}}, {}}; }, true);
    }

    // normal-form
    {
        auto* sub = app.add_subcommand("normal-form", "Koenig, Boettcher or parabolic normal form of a series");
        auto* input = new std::string;
        auto* order = new int(0);
        auto* hint = new int(0);
        sub->add_option("--input", *input, "series JSON file")->required();
        sub->add_option("--order", *order, "re-truncate the input to this order");
        sub->add_option("--hint", *hint, "order of the multiplier as a root of unity (approximate inputs)");
        sub->callback([&, input, order, hint] {
            action = [=] {
                auto s = load_series(*input);
                return std::visit(
                    [&](auto& g) -> Outcome {
                        auto series = *order > 0 ? g.with_order(*order) : g;
                        std::optional<int> h;
                        if (*hint > 0)
                            h = *hint;
                        return {normal_form_json(normal_form(series, h)), {}};
                    },
                    s);
            };
        });
    }

    // classify-pair
    {
        auto* sub = app.add_subcommand("classify-pair", "classify <z^m, w z^k> for a root of unity w");
        auto* m = new std::int64_t(2);
        auto* k = new std::int64_t(2);
        auto* bound = new int(10);
        auto* g_scale = new std::string("0/1");
        auto* f_scale = new std::string;
        sub->add_option("--m", *m, "degree of f")->capture_default_str();
        sub->add_option("--k", *k, "degree of g")->capture_default_str();
        sub->add_option("--g-scale", *g_scale, "scale of g as exponent/order (order may be inf)")->capture_default_str();
        sub->add_option("--f-scale", *f_scale, "scale of f as exponent/order (default 0 over the same base)");
        sub->add_option("--bound", *bound, "word length bound")->capture_default_str();
        sub->callback([&, m, k, bound, g_scale, f_scale] {
            action = [=] {
                const UnitScale gs = parse_scale(*g_scale);
                const UnitScale fs = f_scale->empty() ? UnitScale(0, gs.base_order) : parse_scale(*f_scale);
                const Monomial f{fs, *m}, g{gs, *k};
                const auto c = classify_pair(f, g, *bound);
                json j{{"kind", to_string(c.kind)}, {"bound", c.bound}, {"f", monomial_json(f)}, {"g", monomial_json(g)}};
                if (c.kind == PairClass::Kind::LevinPair) {
                    j["k"] = c.k;
                    j["l"] = c.l;
                }
                if (c.w1) {
                    j["w1"] = c.w1->str();
                    j["w2"] = c.w2->str();
                }
                if (c.value)
                    j["value"] = monomial_json(*c.value);
                if (gs.base_order && fs.exponent == 0 && *m >= 2) {
                    const auto s = deck_aut_split(gs.base_order, *m);
                    j["deck_aut"] = {{"q_d", s.q_d}, {"q_a", s.q_a}, {"r", s.r},
                                     {"s", s.s},     {"alpha", s.alpha}, {"beta", s.beta}};
                }
                return Outcome{j, {}};
            };
        });
    }

    // relations
    {
        auto* sub = app.add_subcommand("relations", "shortlex-least word relation of <f, g> at the truncation order");
        auto* f = new std::string;
        auto* g = new std::string;
        auto* max_len = new int(8);
        sub->add_option("--f", *f, "series JSON file")->required();
        sub->add_option("--g", *g, "series JSON file")->required();
        sub->add_option("--max-len", *max_len, "longest word enumerated")->capture_default_str();
        sub->callback([&, f, g, max_len] {
            action = [=] {
                return with_series_pair(*f, *g, [&](const auto& a, const auto& b) {
                    auto c = find_relations(a, b, *max_len);
                    Outcome o{certificate_json(c), {}};
                    if (c.kind == decltype(c)::Kind::OrderNRelation)
                        o.diagnostics.emplace_back(kOrderCaveat);
                    return o;
                });
            };
        });
    }

    // shared-iter
    {
        auto* sub = app.add_subcommand("shared-iter", "search f^m = g^n at the truncation order");
        auto* f = new std::string;
        auto* g = new std::string;
        auto* max_m = new int(6);
        auto* max_n = new int(6);
        sub->add_option("--f", *f, "series JSON file")->required();
        sub->add_option("--g", *g, "series JSON file")->required();
        sub->add_option("--max-m", *max_m, "largest iterate of f")->capture_default_str();
        sub->add_option("--max-n", *max_n, "largest iterate of g")->capture_default_str();
        sub->callback([&, f, g, max_m, max_n] {
            action = [=] {
                return with_series_pair(*f, *g, [&](const auto& a, const auto& b) {
                    auto c = shared_iteration(a, b, *max_m, *max_n);
                    if (!c)
                        fail(ErrorKind::NotFound, "no f^m = g^n with m <= " + std::to_string(*max_m) +
                                                      ", n <= " + std::to_string(*max_n));
                    return Outcome{certificate_json(*c), {kOrderCaveat}};
                });
            };
        });
    }

    // levin
    {
        auto* sub = app.add_subcommand("levin", "check f^k o g^l = f^2k and g^l o f^k = g^2l");
        auto* f = new std::string;
        auto* g = new std::string;
        auto* k = new std::int64_t(1);
        auto* l = new std::int64_t(1);
        sub->add_option("--f", *f, "series JSON file")->required();
        sub->add_option("--g", *g, "series JSON file")->required();
        sub->add_option("--k", *k)->capture_default_str();
        sub->add_option("--l", *l)->capture_default_str();
        sub->callback([&, f, g, k, l] {
            action = [=] {
                return with_series_pair(*f, *g, [&](const auto& a, const auto& b) {
                    return Outcome{{{"holds", levin_verify(a, b, *k, *l)}, {"order", a.order()}, {"k", *k}, {"l", *l}},
                                   {}};
                });
            };
        });
    }

    // disk
    {
        auto* disk = app.add_subcommand("disk", "unit-disk automorphisms");
        disk->require_subcommand(1);

        auto* rot = disk->add_subcommand("rotation", "elliptic rotation by theta about a center");
        auto* rc = new std::string("0");
        auto* rt = new double(0);
        rot->add_option("--c", *rc, "center, x or x,y")->capture_default_str();
        rot->add_option("--theta", *rt, "rotation angle")->capture_default_str();
        rot->callback([&action, rc, rt] {
            action = [=] {
                const auto m = rotation_about(parse_point(*rc), *rt);
                const auto c = classify(m);
                return Outcome{{{"map", mobius_json(m)}, {"type", to_string(c.type)}, {"identity", c.identity}}, {}};
            };
        });

        auto* cls = disk->add_subcommand("classify", "elliptic, parabolic or hyperbolic by trace");
        auto* cm = new std::string;
        cls->add_option("--map", *cm, "a_re,a_im,b_re,b_im")->required();
        cls->callback([&action, cm] {
            action = [=] {
                const auto m = parse_mobius(*cm);
                const auto c = classify(m);
                json j{{"map", mobius_json(m)}, {"type", to_string(c.type)}, {"identity", c.identity}, {"trace", c.trace}};
                json fps = json::array();
                for (const auto& p : fixed_points(m))
                    if (p)
                        fps.push_back(point_json(*p));
                j["fixed_points"] = fps;
                return Outcome{j, {}};
            };
        });

        auto* fh = disk->add_subcommand("find-hyperbolic", "first hyperbolic word in <rotation, rotation>");
        auto* c1 = new std::string("0");
        auto* c2 = new std::string("0.5,0");
        auto* t1 = new double(std::numbers::pi);
        auto* t2 = new double(std::numbers::pi);
        auto* max_len = new int(8);
        fh->add_option("--c1", *c1, "center of the first rotation, x or x,y")->capture_default_str();
        fh->add_option("--theta1", *t1, "angle of the first rotation");
        fh->add_option("--c2", *c2, "center of the second rotation")->capture_default_str();
        fh->add_option("--theta2", *t2, "angle of the second rotation");
        fh->add_option("--max-len", *max_len)->capture_default_str();
        fh->callback([&, c1, c2, t1, t2, max_len] {
            action = [=] {
                const Complex a = parse_point(*c1), b = parse_point(*c2);
                auto [w, m] = find_hyperbolic_word(rotation_about(a, *t1), rotation_about(b, *t2), *max_len);
                return Outcome{{{"word", w.str()},
                                {"map", mobius_json(m)},
                                {"trace", m.trace()},
                                {"type", to_string(classify(m).type)},
                                {"center_distance", hyperbolic_distance(a, b)}},
                               {}};
            };
        });

        auto* pp = disk->add_subcommand("pingpong", "ping-pong freeness certificate for two hyperbolic maps");
        auto* h = new std::string("1.25,0,0.75,0");
        auto* g = new std::string("1.25,0,0,0.75");
        auto* samples = new int(720);
        auto* check_len = new int(8);
        pp->add_option("--h", *h, "a_re,a_im,b_re,b_im of z -> (az+b)/(conj(b)z+conj(a))")->capture_default_str();
        pp->add_option("--g", *g, "second map, same format")->capture_default_str();
        pp->add_option("--samples", *samples, "boundary samples per region")->capture_default_str();
        pp->add_option("--check-len", *check_len, "word length for the orbit-separation cross-check (0 skips)")
            ->capture_default_str();
        pp->callback([&, h, g, samples, check_len] {
            action = [=] {
                const auto cert = ping_pong_certificate(parse_mobius(*h), parse_mobius(*g), *samples);
                json j{{"kind", to_string(cert.kind)},
                       {"h", mobius_json(cert.h)},
                       {"g", mobius_json(cert.g)},
                       {"samples", cert.samples},
                       {"margin", cert.margin}};
                if (cert.kind == PingPongCertificate::Kind::FourDisk)
                    j["disks"] = {{"h_plus", disk_json(cert.h_plus)},
                                  {"h_minus", disk_json(cert.h_minus)},
                                  {"g_plus", disk_json(cert.g_plus)},
                                  {"g_minus", disk_json(cert.g_minus)}};
                else
                    j["disks"] = {{"domain", disk_json(cert.domain)},
                                  {"h_image", disk_json(cert.h_image)},
                                  {"g_image", disk_json(cert.g_image)}};
                if (*check_len > 0) {
                    if (*check_len > 14)
                        fail(ErrorKind::InvalidArgument, "--check-len is at most 14");
                    std::vector<Complex> images;
                    for (int len = 1; len <= *check_len; ++len)
                        for (std::size_t i = 0; i < (std::size_t{1} << len); ++i)
                            images.push_back(evaluate_word(Word::from_index(i, len), cert.h, cert.g)(0.0));
                    double closest = std::numeric_limits<double>::infinity();
                    for (std::size_t i = 0; i < images.size(); ++i)
                        for (std::size_t k = 0; k < i; ++k)
                            closest = std::min(closest, std::abs(images[i] - images[k]));
                    j["separation"] = {{"max_len", *check_len},
                                       {"words", images.size()},
                                       {"min_distance", closest},
                                       {"distinct", closest > 1e-9}};
                }
                return Outcome{j, {}};
            };
        });
    }

    // orbit
    {
        auto* sub = app.add_subcommand("orbit", "forward orbit of a polynomial map");
        auto* poly = new std::string;
        auto* z0 = new std::string("0");
        auto* n = new int(10);
        auto* classify_flag = new bool(false);
        auto* max_iter = new int(1000);
        auto* tol = new double(1e-9);
        sub->add_option("--poly", *poly, "coefficients, leading first; entries re or re:im")->required();
        sub->add_option("--z0", *z0, "start point, x or x,y")->capture_default_str();
        sub->add_option("--n", *n, "number of iterations")->capture_default_str();
        sub->add_flag("--classify", *classify_flag, "also run the preperiodic test");
        sub->add_option("--max-iter", *max_iter)->capture_default_str();
        sub->add_option("--tol", *tol)->capture_default_str();
        sub->callback([&, poly, z0, n, classify_flag, max_iter, tol] {
            action = [=] {
                const auto f = parse_poly(*poly);
                const Complex z = parse_point(*z0);
                const auto o = orbit(f, z, *n);
                const double r = f.escape_radius();
                json j{{"points", points_json(o.points)},
                       {"escaped", o.escaped},
                       {"escape_radius", std::isfinite(r) ? json(r) : json(nullptr)}};
                if (*classify_flag)
                    j["preperiodic"] = verdict_json(preperiodic_test(f, z, *max_iter, *tol));
                return Outcome{j, {}};
            };
        });
    }

    // intersect
    {
        auto* sub = app.add_subcommand("intersect", "common points of two forward orbits");
        auto* f = new std::string;
        auto* g = new std::string;
        auto* z0 = new std::string("0");
        auto* n = new int(10);
        auto* tol = new double(1e-9);
        sub->add_option("--f", *f, "polynomial, leading coefficient first")->required();
        sub->add_option("--g", *g, "polynomial, leading coefficient first")->required();
        sub->add_option("--z0", *z0)->capture_default_str();
        sub->add_option("--n", *n)->capture_default_str();
        sub->add_option("--tol", *tol)->capture_default_str();
        sub->callback([&, f, g, z0, n, tol] {
            action = [=] {
                json matches = json::array();
                for (const auto& m : orbit_intersection(parse_poly(*f), parse_poly(*g), parse_point(*z0), *n, *tol))
                    matches.push_back({{"point", point_json(m.point)}, {"i", m.i}, {"j", m.j}});
                return Outcome{{{"matches", matches}}, {}};
            };
        });
    }

    // transport-check
    {
        auto* sub = app.add_subcommand("transport-check", "carry g-preperiodic points to f-preperiodic points");
        auto* f = new std::string;
        auto* g = new std::string;
        auto* n = new int(1);
        auto* k = new int(1);
        auto* roots = new int(0);
        auto* samples = new std::vector<std::string>;
        auto* max_iter = new int(1000);
        auto* tol = new double(1e-9);
        sub->add_option("--f", *f, "polynomial, leading coefficient first")->required();
        sub->add_option("--g", *g, "polynomial, leading coefficient first")->required();
        sub->add_option("--n", *n)->capture_default_str();
        sub->add_option("--k", *k)->capture_default_str();
        sub->add_option("--roots-of-unity", *roots, "add the M-th roots of unity as samples");
        sub->add_option("--sample", *samples, "sample point x,y (repeatable)");
        sub->add_option("--max-iter", *max_iter)->capture_default_str();
        sub->add_option("--tol", *tol)->capture_default_str();
        sub->callback([&, f, g, n, k, roots, samples, max_iter, tol] {
            action = [=] {
                std::vector<Complex> pts;
                for (int i = 0; i < *roots; ++i)
                    pts.push_back(std::polar(1.0, 2 * std::numbers::pi * i / *roots));
                for (const auto& s : *samples)
                    pts.push_back(parse_point(s));
                if (pts.empty())
                    fail(ErrorKind::InvalidArgument, "no sample points given");
                auto r = semiconjugacy_transport_check(parse_poly(*f), parse_poly(*g), *n, *k, pts, *max_iter, *tol);
                return Outcome{{{"identity_residual", r.identity_residual},
                                {"samples", r.samples},
                                {"checked", r.checked},
                                {"transported", r.transported},
                                {"counterexamples", points_json(r.counterexamples)}},
                               {}};
            };
        });
    }

    // ruelle
    {
        auto* ruelle = app.add_subcommand("ruelle", "transfer and Beltrami operators on grids");
        ruelle->require_subcommand(1);
        auto* opts = new GridOptions;

        // the output path is left out of the payload so runs into different
        // directories stay byte-identical
        auto write_if = [](const std::string& path, const GridField& g, json&) {
            if (!path.empty())
                save_grid(path, g);
        };

        auto* push = ruelle->add_subcommand("push", "f_* phi");
        auto* poly = new std::string;
        auto* phi = new std::string;
        auto* out = new std::string;
        push->add_option("--poly", *poly, "polynomial, leading coefficient first")->required();
        push->add_option("--phi", *phi, "input grid file")->required();
        push->add_option("--out", *out, "write the result grid here");
        opts->add(push);
        push->callback([&, poly, phi, out, opts, write_if] {
            action = [=] {
                const auto in = opts->load(*phi);
                const auto r = ruelle_pushforward(parse_poly(*poly), in);
                json j{{"input", grid_summary(in)}, {"output", grid_summary(r.field)}, {"excluded", r.excluded}};
                write_if(*out, r.field, j);
                return Outcome{j, {}};
            };
        });

        auto* bel = ruelle->add_subcommand("beltrami", "B_f mu");
        auto* bpoly = new std::string;
        auto* mu = new std::string;
        auto* bout = new std::string;
        bel->add_option("--poly", *bpoly)->required();
        bel->add_option("--mu", *mu, "input grid file")->required();
        bel->add_option("--out", *bout);
        auto* bopts = new GridOptions;
        bopts->add(bel);
        bel->callback([&, bpoly, mu, bout, bopts, write_if] {
            action = [=] {
                const auto in = bopts->load(*mu);
                const auto r = beltrami_pullback(parse_poly(*bpoly), in);
                json j{{"input", grid_summary(in)}, {"output", grid_summary(r.field)}, {"excluded", r.excluded}};
                write_if(*bout, r.field, j);
                return Outcome{j, {}};
            };
        });

        auto* dual = ruelle->add_subcommand("duality", "|<B_f mu, phi> - <mu, f_* phi>|");
        auto* dpoly = new std::string;
        auto* dmu = new std::string;
        auto* dphi = new std::string;
        dual->add_option("--poly", *dpoly)->required();
        dual->add_option("--mu", *dmu)->required();
        dual->add_option("--phi", *dphi)->required();
        auto* dopts = new GridOptions;
        dopts->add(dual);
        dual->callback([&, dpoly, dmu, dphi, dopts] {
            action = [=] {
                const auto f = parse_poly(*dpoly);
                const auto m = dopts->load(*dmu);
                const auto p = dopts->load(*dphi);
                m.require_same(p);
                const auto lhs = pairing(beltrami_pullback(f, m).field, p);
                const auto rhs = pairing(m, ruelle_pushforward(f, p).field);
                return Outcome{{{"residual", std::abs(lhs - rhs)}, {"lhs", point_json(lhs)}, {"rhs", point_json(rhs)}},
                               {}};
            };
        });

        auto* ces = ruelle->add_subcommand("cesaro", "Cesaro averages of f_*^i phi");
        auto* cpoly = new std::string;
        auto* cphi = new std::string;
        auto* cn = new int(4);
        auto* cout_path = new std::string;
        ces->add_option("--poly", *cpoly)->required();
        ces->add_option("--phi", *cphi)->required();
        ces->add_option("--n", *cn)->capture_default_str();
        ces->add_option("--out", *cout_path);
        auto* copts = new GridOptions;
        copts->add(ces);
        ces->callback([&, cpoly, cphi, cn, cout_path, copts, write_if] {
            action = [=] {
                const auto in = copts->load(*cphi);
                const auto r = cesaro_average(parse_poly(*cpoly), in, *cn);
                json j{{"increments", r.increments}, {"norms", r.norms}, {"excluded", r.excluded}};
                write_if(*cout_path, r.average, j);
                return Outcome{j, {}};
            };
        });

        auto* al = ruelle->add_subcommand("align", "phase of an f_*-fixed density as invariant Beltrami coefficient");
        auto* apoly = new std::string;
        auto* ah = new std::string;
        auto* atol = new double(1e-9);
        al->add_option("--poly", *apoly)->required();
        al->add_option("--h", *ah, "density grid file")->required();
        al->add_option("--tol", *atol)->capture_default_str();
        auto* aopts = new GridOptions;
        aopts->add(al);
        al->callback([&, apoly, ah, atol, aopts] {
            action = [=] {
                const auto r = alignment_check(parse_poly(*apoly), aopts->load(*ah), *atol);
                return Outcome{{{"fixed_residual", r.fixed_residual},
                                {"support_cells", r.support_cells},
                                {"checked_cells", r.checked_cells},
                                {"sup_residual", r.sup_residual},
                                {"passes", r.passes}},
                               {}};
            };
        });

        auto* smp = ruelle->add_subcommand("sample", "write a standard test field as a grid file");
        auto* field = new std::string("unit-disk");
        auto* sout = new std::string;
        auto* center = new std::string("0");
        auto* radius = new double(1.0);
        auto* value = new std::string("1");
        smp->add_option("--field", *field, "unit-disk | zero | constant | phase | bump | phase-density")
            ->capture_default_str();
        smp->add_option("--out", *sout)->required();
        smp->add_option("--center", *center, "bump center x,y")->capture_default_str();
        smp->add_option("--radius", *radius, "bump radius")->capture_default_str();
        smp->add_option("--value", *value, "amplitude x,y")->capture_default_str();
        auto* sopts = new GridOptions;
        sopts->add(smp);
        smp->callback([&, field, sout, center, radius, value, sopts, write_if] {
            action = [=] {
                const Bounds b = parse_bounds(sopts->bounds);
                const Complex c = parse_point(*center), v = parse_point(*value);
                const double r = *radius;
                std::function<Complex(Complex)> fn;
                if (*field == "unit-disk")
                    fn = [](Complex z) { return std::abs(z) < 1 ? Complex(1) : Complex(0); };
                else if (*field == "zero")
                    fn = [](Complex) { return Complex(0); };
                else if (*field == "constant")
                    fn = [v](Complex) { return v; };
                else if (*field == "phase")
                    fn = [](Complex z) { return z == Complex(0) ? Complex(0) : z / std::conj(z); };
                else if (*field == "bump")
                    fn = [c, r, v](Complex z) { return v * bump(z, c, r); };
                else if (*field == "phase-density")
                    fn = [r](Complex z) { return z == Complex(0) ? Complex(0) : bump(z, 0, r) * std::conj(z) / z; };
                else
                    fail(ErrorKind::InvalidArgument, "unknown field '" + *field + "'");
                const auto g = GridField::sample(b, sopts->grid, sopts->grid, fn);
                json j{{"field", *field}, {"grid", grid_summary(g)}};
                write_if(*sout, g, j);
                return Outcome{j, {}};
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "germkit: " << e.what() << '\n';
        emit("error", {{"error", "UsageError"}, {"message", e.what()}}, {});
        return 2;
    }

    try {
        auto o = action();
        emit("ok", o.payload, o.diagnostics);
        return 0;
    } catch (const Error& e) {
        std::cerr << "germkit: " << e.what() << '\n';
        emit("error", {{"error", std::string(name(e.kind()))}, {"message", e.what()}}, {});
        return is_usage_error(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "germkit: internal error: " << e.what() << '\n';
        emit("error", {{"error", "Internal"}, {"message", e.what()}}, {});
        return 1;
    }
}
