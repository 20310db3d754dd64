// Batch front-end: one subcommand per report.
//
// Exit codes: 0 ok, 2 bad configuration, 3 invariant violation, 4 numerical failure.

#include "plurilab/envelope.hpp"
#include "plurilab/geodesics.hpp"
#include "plurilab/kobayashi.hpp"
#include "plurilab/mappings.hpp"
#include "plurilab/monge_ampere.hpp"
#include "plurilab/peaks.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace plurilab;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "plurilab/1";

enum Exit { ok = 0, bad_config = 2, violated = 3, numerical = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Effective key/value configuration. Every lookup records the value used, so
// the report echoes defaults as well as explicit settings.
class RunConfig {
public:
    std::string subcommand;

    void set(const std::string& key, const std::string& value) { given_[key] = value; }

    std::string str(const std::string& key, const std::string& def) {
        const auto it = given_.find(key);
        const std::string v = it == given_.end() ? def : it->second;
        used_[key] = v;
        return v;
    }

    double num(const std::string& key, double def) {
        std::ostringstream os;
        os << def;
        return to_double(key, str(key, os.str()));
    }

    int integer(const std::string& key, int def) {
        const double v = num(key, def);
        if (v != std::floor(v)) throw ConfigError(key + " must be an integer");
        return int(v);
    }

    std::uint64_t seed() { return std::uint64_t(integer("seed", 1)); }

    std::vector<double> list(const std::string& key, const std::string& def) {
        std::vector<double> out;
        std::stringstream ss(str(key, def));
        for (std::string item; std::getline(ss, item, ',');)
            if (!item.empty()) out.push_back(to_double(key, item));
        return out;
    }

    // A point of C^n as 2n reals re1,im1,re2,im2,...
    Vec point(const std::string& key, int n, const std::string& def) {
        const auto xs = list(key, def);
        if (int(xs.size()) != 2 * n)
            throw ConfigError(key + " needs " + std::to_string(2 * n) + " real numbers");
        Vec z(n);
        for (int j = 0; j < n; ++j) z[j] = cd(xs[2 * j], xs[2 * j + 1]);
        return z;
    }

    [[nodiscard]] const std::map<std::string, std::string>& given() const { return given_; }
    [[nodiscard]] const std::map<std::string, std::string>& used() const { return used_; }

private:
    static double to_double(const std::string& key, const std::string& s) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ConfigError(key + ": not a number '" + s + "'");
        }
        if (pos != s.size()) throw ConfigError(key + ": not a number '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> given_, used_;
};

// key = value lines; '#' starts a comment.
void read_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

json cjson(cd z) { return json::array({z.real(), z.imag()}); }

json vjson(const Vec& z) {
    json a = json::array();
    for (Eigen::Index j = 0; j < z.size(); ++j) a.push_back(cjson(z[j]));
    return a;
}

std::string csv_vec(const Vec& z) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index j = 0; j < z.size(); ++j) os << (j ? "," : "") << z[j].real() << ',' << z[j].imag();
    return os.str();
}

std::string csv_header(const std::string& prefix, int n) {
    std::string h;
    for (int j = 1; j <= n; ++j)
        h += (j > 1 ? "," : "") + prefix + std::to_string(j) + "_re," + prefix + std::to_string(j) + "_im";
    return h;
}

struct Report {
    json result = json::object();
    json tolerances = json::object();
    std::vector<std::string> violations;
    std::string csv;

    void require(bool cond, const std::string& what) {
        if (!cond) violations.push_back(what);
    }
};

// The lens used throughout the tests when no ellipsoids are given.
std::vector<Ellipsoid> parse_balls(RunConfig& cfg, int n) {
    const auto xs = cfg.list("balls", n == 2 ? "0,0,0,0,1,0.5,0,0,0,1" : "");
    const std::size_t stride = 2 * std::size_t(n) + 1;
    if (xs.empty() || xs.size() % stride) throw ConfigError("balls: groups of 2n centre reals and a radius");
    std::vector<Ellipsoid> out;
    for (std::size_t k = 0; k < xs.size(); k += stride) {
        Vec c(n);
        for (int j = 0; j < n; ++j) c[j] = cd(xs[k + 2 * j], xs[k + 2 * j + 1]);
        out.push_back(ellipsoid_ball(c, xs[k + stride - 1]));
    }
    return out;
}

DomainSpec make_domain(RunConfig& cfg, const std::string& def) {
    const std::string name = cfg.str("domain", def);
    const auto names = builtin_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw ConfigError("unknown domain '" + name + "'");
    BuiltinParams p;
    if (name == "example_D")
        p.n = 2;
    else if (name == "example_Omega")
        p.n = 3;
    else
        p.n = cfg.integer("n", 2);
    if (name == "ball") p.r = cfg.num("radius", 1.0);
    if (name == "strongly_convex_intersection") p.ellipsoids = parse_balls(cfg, p.n);
    return make_builtin(name, p);
}

Vec unit(int n, int j) {
    Vec v = Vec::Zero(n);
    v[j] = 1;
    return v;
}

std::string point_text(const Vec& z) {
    std::ostringstream os;
    for (Eigen::Index j = 0; j < z.size(); ++j) os << (j ? "," : "") << z[j].real() << ',' << z[j].imag();
    return os.str();
}

// Kobayashi-Royden metric of the centred ball of radius R.
double ball_metric(const Vec& z, const Vec& v, double R) {
    const Vec x = z / R, w = v / R;
    const double s = 1 - x.squaredNorm();
    return std::sqrt(w.squaredNorm() / s + std::norm(x.dot(w)) / (s * s));
}

void kobayashi_bounds(RunConfig& cfg, Report& rep) {
    const auto dom = make_domain(cfg, "ball");
    const int n = dom.n;
    const Vec z = cfg.point("point", n, point_text(Vec::Zero(n)));
    Vec v = cfg.point("direction", n, point_text(unit(n, 0)));
    if (v.norm() == 0) throw ConfigError("direction must be nonzero");
    v.normalize();
    require_interior(dom, z);

    DiscOptions dopts;
    dopts.tol = cfg.num("tol", 1e-10);
    rep.tolerances["bisection"] = dopts.tol;
    rep.tolerances["distance"] = DistanceOptions{}.tol;
    const auto probe = disc_radius(dom, z, v, dopts);
    const auto up = upper_disc(dom, z, v);
    const auto gr = graham_bounds(dom, z, v);

    rep.result["z"] = vjson(z);
    rep.result["v"] = vjson(v);
    rep.result["delta"] = probe.delta;
    rep.result["disc_radius"] = probe.disc_radius;
    rep.result["upper_disc"] = {{"upper", up.upper}, {"provenance", to_string(up.provenance)}};
    rep.result["graham"] = {{"lower", gr.lower}, {"upper", gr.upper}, {"provenance", to_string(gr.provenance)}};
    rep.require(probe.delta <= probe.disc_radius * (1 + 1e-8), "delta <= disc_radius");
    rep.require(gr.lower <= gr.upper, "graham lower <= upper");

    if (dom.name == "ball") {
        const double exact = ball_metric(z, v, dom.params.count("r") ? dom.params.at("r") : 1.0);
        rep.result["exact"] = exact;
        rep.require(gr.lower <= exact * (1 + 1e-9) && exact <= gr.upper * (1 + 1e-9), "exact metric inside graham bounds");
    }
    if (cfg.given().count("point_b")) {
        const Vec b = cfg.point("point_b", n, "");
        const auto br = kobayashi_distance(dom, z, b);
        rep.result["distance"] = {{"lower", br.lower}, {"upper", br.upper}, {"exact", br.exact}};
        rep.require(br.lower <= br.upper * (1 + 1e-9), "distance bracket ordered");
    }
    rep.csv = "theta,exit_radius\n";
    std::ostringstream os;
    os.precision(17);
    for (std::size_t k = 0; k < probe.theta.size(); ++k) os << probe.theta[k] << ',' << probe.exit_radius[k] << '\n';
    rep.csv += os.str();
}

void holder_failure(RunConfig& cfg, Report& rep) {
    const auto dom = make_domain(cfg, "omega_phi");
    if (dom.n != 2) throw ConfigError("holder-failure uses the approach sequence in C^2");
    const auto alphas = cfg.list("alphas", "0.5,1");
    if (alphas.empty()) throw ConfigError("alphas must not be empty");
    const int kmin = cfg.integer("kmin", 2), kmax = cfg.integer("kmax", 16);
    if (kmin < 0 || kmax < kmin || kmax > 40) throw ConfigError("need 0 <= kmin <= kmax <= 40");
    const auto t = holder_divergence(dom, flat_approach_sequence(kmin, kmax), alphas);
    rep.tolerances["divergence_slope"] = kDivergenceSlope;
    rep.tolerances["bisection"] = DiscOptions{}.tol;

    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"nu", r.nu}, {"delta", r.delta}, {"r", r.r}, {"ratio", r.ratio}, {"half_ratio", r.half_ratio}});
        rep.require(std::isfinite(r.r) && r.delta <= r.r * (1 + 1e-8), "delta <= r at nu = " + std::to_string(r.nu));
    }
    json verdicts = json::array();
    for (const auto& v : t.verdicts)
        verdicts.push_back({{"alpha", v.alpha},
                            {"slope", v.slope},
                            {"diverges", v.diverges},
                            {"slope_half", v.slope_half},
                            {"diverges_half", v.diverges_half}});
    rep.result["rows"] = rows;
    rep.result["verdicts"] = verdicts;
    rep.result["enough_samples"] = t.enough_samples;
    rep.csv = t.to_csv();
}

double example_rho2(const Vec& w) { return std::norm(w[0] * w[0] - 1.0) + h_profile(w[1]) + std::norm(w[2]); }

void ma_pullback(RunConfig& cfg, Report& rep) {
    const std::string map = cfg.str("map", "example25");
    HoloMap F;
    HermitianField b;
    DomainSpec D;
    std::function<Mat(const Vec&)> oracle;
    if (map == "example25") {
        D = make_builtin("example_D");
        const auto Om = make_builtin("example_Omega");
        F = sqrt_embedding_map();
        b = hessian_field(example_rho2, 3, 8.0, [Om](const Vec& w) { return Om.contains(w); });
        oracle = [](const Vec& z) {
            Mat a = Mat::Zero(2, 2);
            a(0, 0) = 1;
            a(1, 1) = 0.5 + 3 * z[1].imag() * z[1].imag();
            return a;
        };
    } else if (map == "identity") {
        D = make_domain(cfg, "ball");
        F = identity_map(D.n);
        b = identity_field(D.n);
        oracle = [n = D.n](const Vec&) { return Mat(Mat::Identity(n, n)); };
    } else {
        throw ConfigError("unknown map '" + map + "'");
    }
    const double tol = cfg.num("tol", 1e-6);
    const int budget = cfg.integer("budget", 100);
    if (budget < 1) throw ConfigError("budget must be positive");
    rep.tolerances["field"] = tol;
    rep.tolerances["density"] = tol;

    Rng rng(cfg.seed());
    const auto pts = sample_interior(D, budget, rng);
    double worst = 0, min_density = std::numeric_limits<double>::infinity(), asym = 0;
    std::ostringstream os;
    os.precision(17);
    os << csv_header("z", F.m) << ",density,oracle_deviation\n";
    for (const auto& z : pts) {
        const auto s = pullback_field(F, b, z);
        const double dev = (s.a - oracle(z)).cwiseAbs().maxCoeff();
        worst = std::max(worst, dev);
        asym = std::max(asym, (s.a - s.a.adjoint()).cwiseAbs().maxCoeff());
        min_density = std::min(min_density, s.density);
        os << csv_vec(z) << ',' << s.density << ',' << dev << '\n';
    }
    rep.csv = os.str();
    rep.result["samples"] = int(pts.size());
    rep.result["normalization"] = PullbackField{F, b}.normalization;
    rep.result["oracle_deviation"] = worst;
    rep.result["hermitian_defect"] = asym;
    rep.result["min_density"] = min_density;
    rep.require(worst <= tol, "pullback field matches the symbolic field");
    rep.require(asym <= tol, "pullback field is Hermitian");
    rep.require(min_density >= -tol, "density is nonnegative");

    const double p = cfg.num("lp_p", 0);
    if (p > 0) {
        const int lb = cfg.integer("lp_budget", 4000);
        const auto lp = jacobian_lp_check(F, D, p, lb, cfg.seed());
        json prods = json::array();
        for (const auto& q : lp.products)
            prods.push_back({{"mu", q.mu}, {"j", q.j}, {"nu", q.nu}, {"k", q.k}, {"value", q.value},
                             {"refined", q.refined}, {"ratio", q.ratio}});
        rep.result["lp"] = {{"p", p}, {"budget", lb}, {"pass", lp.pass}, {"products", prods}};
        rep.tolerances["lp_ratio"] = {0.8, 1.25};
        rep.require(lp.pass, "Jacobian products are L^p with a stable estimate");
    }
}

void canonical(RunConfig& cfg, Report& rep) {
    const auto dom = make_domain(cfg, "omega_phi");
    if (dom.n != 2 || !dom.flags.reinhardt) throw ConfigError("canonical needs a Reinhardt domain in C^2");
    const std::string solver = cfg.str("solver", "envelope");
    if (solver != "envelope" && solver != "oracle") throw ConfigError("solver is envelope or oracle");
    EnvelopeOptions eo;
    eo.nodes = cfg.integer("nodes", eo.nodes);
    eo.tol = cfg.num("tol", eo.tol);
    eo.seed = cfg.seed();
    PerronOptions po;
    po.points = cfg.integer("oracle_points", po.points);
    const auto sol = canonical_function(dom, solver == "envelope" ? CanonicalSolver::envelope : CanonicalSolver::oracle,
                                        eo, po);
    rep.tolerances["solver"] = solver == "envelope" ? eo.tol : po.tol;

    const Vec xi = cfg.point("xi", 2, "0,0,-1,0");
    const auto fit = holder_fit(sol, dom, xi, dyadic_scales(cfg.integer("kmin", 4), cfg.integer("kmax", 10)));
    rep.result["method"] = sol.method;
    rep.result["iterations"] = sol.iterations;
    rep.result["residual"] = sol.residual;
    rep.result["invariants"] = {{"ok", sol.invariants.ok},
                                {"data_excess", sol.invariants.data_excess},
                                {"data_gap", sol.invariants.data_gap},
                                {"convexity_defect", sol.invariants.convexity_defect},
                                {"monotonicity_defect", sol.invariants.monotonicity_defect}};
    rep.result["holder"] = json::parse(fit.to_json());
    rep.require(sol.invariants.ok, "envelope invariants");
    rep.csv = sol.coords == GridCoords::log_modulus ? sol.to_csv_log() : sol.to_csv_modulus();
}

void extension_check(RunConfig& cfg, Report& rep) {
    const std::string map = cfg.str("map", "example25");
    if (map != "example25") throw ConfigError("unknown map '" + map + "'");
    const auto D = make_builtin("example_D");
    const auto Om = make_builtin("example_Omega");
    const auto F = sqrt_embedding_map();
    const int budget = cfg.integer("budget", 60);
    if (budget < 8) throw ConfigError("budget must be at least 8");
    Rng rng(cfg.seed());
    const auto layerO = boundary_layer_samples(Om, budget, 1e-3, 5e-2, rng);
    const auto layerD = boundary_layer_samples(D, budget, 1e-3, 5e-2, rng);
    const auto hopf = hopf_fit(Om.rho, Om, layerO);
    const auto c = exponent_chain(F, D, Om, Om.rho, cfg.num("s", default_target_exponent(Om)), hopf, layerD);

    ChartOptions co;
    co.radius = cfg.num("chart_radius", 0.1);
    co.seed = cfg.seed();
    const Vec anchor = cfg.point("anchor", 2, "0,0,0,0");
    if (std::abs(D.rho(anchor)) > 1e-12) throw ConfigError("anchor must lie on the boundary of example_D");
    const auto chart = lipschitz_chart_fit(D, anchor, co);

    ScanOptions so;
    so.M_star = c.M_star;
    so.s_tilde = c.s_tilde;
    so.seed = cfg.seed();
    const auto scan = extension_continuity_scan(F, D, chart, cfg.list("eps", "0.5,0.1,0.02"), so);

    const double tol = cfg.num("tol", 1e-4);
    rep.tolerances["closed_form"] = tol;
    rep.tolerances["quadrature"] = ExtensionOptions{}.tol;
    rep.result["constants"] = {{"s", c.s},           {"s0", c.s0},     {"alpha_hopf", c.alpha_hopf},
                               {"c0", c.c0},         {"s_star", c.s_star}, {"s_tilde", c.s_tilde},
                               {"M", c.M},           {"M_star", c.M_star}, {"C0", c.C0},
                               {"C1", c.C1},         {"held_out", c.held_out},
                               {"distance_violations", c.distance_violations},
                               {"derivative_violations", c.derivative_violations}};
    rep.result["chart"] = {{"anchor", vjson(anchor)}, {"radius", chart.radius}, {"C", chart.C},
                           {"checked", chart.checked}, {"violations", chart.violations}};
    double worst = 0;
    json values = json::array();
    std::ostringstream os;
    os.precision(17);
    os << csv_header("xi", 2) << ',' << csv_header("F", 3) << '\n';
    for (std::size_t k = 0; k < scan.xi.size(); ++k) {
        const Vec& x = scan.xi[k];
        Vec closed(3);
        closed << std::sqrt(x[0] + 1.0), x[1], 0.0;
        worst = std::max(worst, (scan.extension[k] - closed).norm());
        values.push_back({{"xi", vjson(x)}, {"value", vjson(scan.extension[k])}});
        os << csv_vec(x) << ',' << csv_vec(scan.extension[k]) << '\n';
    }
    json rows = json::array();
    for (const auto& r : scan.rows)
        rows.push_back({{"eps", r.eps}, {"kappa", r.kappa}, {"r", r.r}, {"extension_osc", r.extension_osc}});
    rep.result["extension"] = values;
    rep.result["closed_form_deviation"] = worst;
    rep.result["scan"] = rows;
    rep.csv = os.str();
    rep.require(c.holds(), "exponent chain holds on held-out samples");
    rep.require(chart.violations == 0, "chart sandwich");
    rep.require(worst <= tol, "extension matches (sqrt(xi1 + 1), xi2, 0)");
    for (const auto& r : scan.rows) rep.require(r.extension_osc < r.eps, "oscillation below eps");
}

ModulusOfContinuity parse_modulus(RunConfig& cfg) {
    const std::string s = cfg.str("omega", "power:1,1");
    const auto colon = s.find(':');
    const std::string fam = s.substr(0, colon);
    RunConfig tmp;
    tmp.set("x", colon == std::string::npos ? "" : s.substr(colon + 1));
    const auto args = tmp.list("x", "");
    if (args.size() != 2) throw ConfigError("omega is power:C,a or power_log:C,k");
    if (fam == "power") return ModulusOfContinuity::power(args[0], args[1]);
    if (fam == "power_log") return ModulusOfContinuity::power_log(args[0], args[1]);
    throw ConfigError("unknown modulus family '" + fam + "'");
}

void geodesic_extend(RunConfig& cfg, Report& rep) {
    const auto dom = make_domain(cfg, "ball");
    if (dom.name != "ball" || (dom.params.count("r") && dom.params.at("r") != 1.0))
        throw ConfigError("geodesic-extend builds geodesics of the unit ball");
    const int n = dom.n;
    if (n < 2) throw ConfigError("geodesic-extend needs n >= 2");
    Vec p0 = Vec::Zero(n), q0 = Vec::Zero(n);
    p0[0] = 0.3, p0[1] = cd(0, 0.2), q0[0] = -0.1, q0[1] = 0.5;
    const Vec p = cfg.point("p", n, point_text(p0)), q = cfg.point("q", n, point_text(q0));
    require_interior(dom, p);
    require_interior(dom, q);
    if ((p - q).norm() < 1e-12) throw ConfigError("p and q must differ");
    const auto g = ball_geodesic(p, q);

    HLOptions ho;
    ho.r0 = cfg.num("r0", ho.r0);
    ho.tol = cfg.num("tol", ho.tol);
    const int count = cfg.integer("angles", 64);
    if (count < 1) throw ConfigError("angles must be positive");
    const auto angles = uniform_angles(count);
    // The geodesic is analytic across the circle; bound |psi'| by its maximum there.
    double A = 0;
    for (double t : uniform_angles(1024)) A = std::max(A, g.derivative(std::polar(1.0, t)).cwiseAbs().maxCoeff());
    const auto maj = Majorant::power(1.5 * A, 0);
    std::vector<std::vector<BoundaryValue>> comps;
    for (int j = 0; j < n; ++j)
        comps.push_back(hl_extend([&](cd z) { return g(z)[j]; }, [&](cd z) { return g.derivative(z)[j]; }, maj,
                                  angles, ho));

    const auto fit = mercer_fit(g, dom, default_mercer_radii());
    const auto omega = parse_modulus(cfg);
    const auto dini = dini_check(omega, fit.C2, 1 / fit.beta, fit.C1, cfg.num("eps0", 0.1));
    const auto table = geodesic_derivative_bound(g, dom, omega, fit, {0.5, 0.75, 0.9, 0.99});

    rep.tolerances["hl_quadrature"] = ho.tol;
    rep.tolerances["mercer_safety"] = MercerOptions{}.safety;
    rep.result["p"] = vjson(p);
    rep.result["q"] = vjson(q);
    rep.result["majorant"] = {{"family", "power"}, {"A", maj.A}, {"a", 0.0}};
    rep.result["mercer"] = {{"C1", fit.C1},         {"C2", fit.C2},         {"beta", fit.beta},
                            {"slope", fit.slope},   {"residual", fit.residual}, {"fit_samples", fit.fit_samples},
                            {"held_out", fit.held_out}, {"violations", fit.violations}};
    rep.result["dini"] = {{"s", dini.s}, {"C2", dini.C2}, {"c", dini.c}, {"eps0", dini.eps0},
                          {"integral", std::isfinite(dini.integral) ? json(dini.integral) : json(nullptr)},
                          {"divergent", dini.divergent}, {"pass", dini.pass()}};
    rep.result["derivative_bound_c_max"] = table.c_max;

    double worst_err = 0;
    std::ostringstream os;
    os.precision(17);
    os << "theta," << csv_header("psi", n) << ",error\n";
    for (std::size_t k = 0; k < angles.size(); ++k) {
        Vec v(n);
        double err = 0;
        for (int j = 0; j < n; ++j) {
            v[j] = comps[j][k].value;
            err = std::max(err, comps[j][k].error);
        }
        worst_err = std::max(worst_err, err);
        os << angles[k] << ',' << csv_vec(v) << ',' << err << '\n';
    }
    rep.result["max_quadrature_error"] = worst_err;
    rep.csv = os.str();
    rep.require(fit.validated(), "Mercer sandwich on held-out radii");
}

void peak(RunConfig& cfg, Report& rep) {
    const auto dom = make_domain(cfg, "ball");
    const int n = dom.n;
    const Vec p = cfg.point("point", n, point_text(unit(n, 0)));
    PeakOptions po;
    po.samples = cfg.integer("budget", po.samples);
    po.seed = cfg.seed();
    po.map.tol = cfg.num("tol", po.map.tol);
    const auto pf = peak_function(dom, p, po);
    const auto& r = pf.report;
    rep.tolerances["map"] = po.map.tol;
    rep.tolerances["u_at_p"] = 1e-6;
    rep.tolerances["unimodularity"] = 1e-3;
    rep.result["p"] = vjson(pf.frame.p);
    rep.result["v"] = vjson(pf.frame.v);
    json loop = json::array();
    const std::size_t L = pf.map.shadow.loop.size(), stride = std::max<std::size_t>(1, L / 64);
    for (std::size_t k = 0; k < L; k += stride) loop.push_back(cjson(pf.map.shadow.loop[k]));
    rep.result["shadow"] = {{"anchor", cjson(pf.map.shadow.anchor)}, {"diameter", pf.map.shadow.diameter},
                            {"vertices", int(L)}, {"samples", loop}};
    const auto& mq = pf.map.quality;
    rep.result["map"] = {{"iterations", mq.iterations}, {"residual", mq.residual}, {"relaxation", mq.relaxation},
                         {"unimodularity", mq.unimodularity}, {"winding", mq.winding}, {"at_zero", mq.at_zero}};
    rep.result["report"] = {{"u_at_p", r.u_at_p}, {"max_u", r.max_u}, {"eta", r.eta}, {"diameter", r.diameter},
                            {"boundary_samples", r.boundary_samples}, {"interior_samples", r.interior_samples},
                            {"violations", r.violations}, {"min_hessian_eigenvalue", r.min_hessian_eigenvalue}};
    rep.require(r.violations == 0, "u < 0 away from p");
    rep.require(r.eta > 0, "eta > 0");

    Rng rng(cfg.seed() + 1);
    std::ostringstream os;
    os.precision(17);
    os << csv_header("z", n) << ",u\n";
    for (const auto& z : sample_boundary(dom, cfg.integer("u_samples", 100), rng)) os << csv_vec(z) << ',' << pf.u(z) << '\n';
    rep.csv = os.str();
}

const std::map<std::string, std::pair<std::function<void(RunConfig&, Report&)>, std::set<std::string>>>& commands() {
    static const std::map<std::string, std::pair<std::function<void(RunConfig&, Report&)>, std::set<std::string>>> c{
        {"kobayashi-bounds", {kobayashi_bounds, {"domain", "n", "radius", "balls", "point", "direction", "point_b", "tol"}}},
        {"holder-failure", {holder_failure, {"domain", "n", "radius", "balls", "alphas", "kmin", "kmax"}}},
        {"ma-pullback", {ma_pullback, {"map", "domain", "n", "radius", "balls", "seed", "budget", "tol", "lp_p", "lp_budget"}}},
        {"canonical", {canonical, {"domain", "n", "solver", "nodes", "tol", "seed", "oracle_points", "xi", "kmin", "kmax"}}},
        {"extension-check", {extension_check, {"map", "seed", "budget", "s", "chart_radius", "anchor", "eps", "tol"}}},
        {"geodesic-extend", {geodesic_extend, {"domain", "n", "radius", "p", "q", "r0", "tol", "angles", "omega", "eps0"}}},
        {"peak-function", {peak, {"domain", "n", "radius", "balls", "point", "budget", "seed", "tol", "u_samples"}}},
    };
    return c;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

int run(RunConfig& cfg, const std::string& out) {
    const auto& [fn, keys] = commands().at(cfg.subcommand);
    static const std::set<std::string> common{"seed", "budget", "tol"};
    for (const auto& [k, v] : cfg.given())
        if (!keys.count(k) && !common.count(k)) throw ConfigError("key '" + k + "' does not apply to " + cfg.subcommand);

    Report rep;
    int code = ok;
    std::string error;
    try {
        fn(cfg, rep);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        switch (e.kind()) {
        case ErrorKind::invalid_argument:
        case ErrorKind::unknown_name:
        case ErrorKind::not_interior:
            throw ConfigError(e.what());
        case ErrorKind::invariant_violation:
            code = violated;
            break;
        default:
            code = numerical;
        }
        error = e.what();
    }
    if (code == ok && !rep.violations.empty()) code = violated;

    json doc;
    doc["schema"] = kSchema;
    doc["subcommand"] = cfg.subcommand;
    auto input = cfg.used();
    for (const auto& [k, v] : cfg.given()) input[k] = v;
    doc["input"] = input;
    doc["tolerances"] = rep.tolerances;
    doc["status"] = code == ok ? "ok" : code == violated ? "invariant_violation" : "numerical_failure";
    if (!error.empty()) doc["error"] = error;
    doc["violations"] = rep.violations;
    doc["result"] = rep.result;
    const std::string text = doc.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text(out + ".json", text);
        if (!rep.csv.empty()) write_text(out + ".csv", rep.csv);
    }
    if (code != ok) std::cerr << "plurilab: " << doc["status"].get<std::string>() << (error.empty() ? "" : ": " + error) << '\n';
    for (const auto& v : rep.violations) std::cerr << "  violated: " << v << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"plurilab batch reports"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string domain, map, config, out, alphas, point, solver;
    long seed = 0;
    int budget = 0, n = 0;
    double tol = 0;
    auto* o_domain = app.add_option("--domain", domain, "builtin domain name");
    auto* o_map = app.add_option("--map", map, "holomorphic map (example25, identity)");
    auto* o_seed = app.add_option("--seed", seed, "sampling seed");
    auto* o_budget = app.add_option("--budget", budget, "sample budget");
    auto* o_tol = app.add_option("--tol", tol, "main tolerance");
    auto* o_n = app.add_option("--n", n, "dimension");
    auto* o_alphas = app.add_option("--alphas", alphas, "comma-separated exponents");
    auto* o_point = app.add_option("--point", point, "point as re1,im1,re2,im2,...");
    auto* o_solver = app.add_option("--solver", solver, "envelope or oracle");
    app.add_option("--out", out, "output prefix; writes PREFIX.json and PREFIX.csv");
    app.add_option("--config", config, "key = value file; its entries override flags");
    std::vector<std::string> sets;
    app.add_option("--set", sets, "extra key=value settings");
    for (const auto& [name, entry] : commands()) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_config;
    }

    RunConfig cfg;
    cfg.subcommand = app.get_subcommands().front()->get_name();
    try {
        if (*o_domain) cfg.set("domain", domain);
        if (*o_map) cfg.set("map", map);
        if (*o_seed) cfg.set("seed", std::to_string(seed));
        if (*o_budget) cfg.set("budget", std::to_string(budget));
        if (*o_tol) cfg.set("tol", o_tol->results().front());
        if (*o_n) cfg.set("n", std::to_string(n));
        if (*o_alphas) cfg.set("alphas", alphas);
        if (*o_point) cfg.set("point", point);
        if (*o_solver) cfg.set("solver", solver);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value");
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (!config.empty()) read_config_file(config, cfg);
        return run(cfg, out);
    } catch (const ConfigError& e) {
        std::cerr << "plurilab: " << e.what() << '\n';
        return bad_config;
    } catch (const std::exception& e) {
        std::cerr << "plurilab: " << e.what() << '\n';
        return numerical;
    }
}
