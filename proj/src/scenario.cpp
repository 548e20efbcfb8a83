#include "intertwine/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "intertwine/quadrature.hpp"

namespace itw {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

struct Ctx {
    const std::string& text;
    const std::string& source;
};

int line_of_pos(const std::string& text, size_t pos) {
    int line = 1;
    for (size_t i = 0; i < pos && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

// First occurrence of the quoted key followed by a colon. Good enough to
// anchor a diagnostic; configs rarely reuse a key name across sections.
int line_of_key(const Ctx& c, const std::string& key) {
    const std::string needle = "\"" + key + "\"";
    size_t from = 0;
    while (true) {
        size_t pos = c.text.find(needle, from);
        if (pos == std::string::npos) return 1;
        size_t after = pos + needle.size();
        while (after < c.text.size() && std::isspace(static_cast<unsigned char>(c.text[after])))
            ++after;
        if (after < c.text.size() && c.text[after] == ':') return line_of_pos(c.text, pos);
        from = pos + 1;
    }
}

int line_of_value(const Ctx& c, const std::string& value) {
    size_t pos = c.text.find("\"" + value + "\"");
    return pos == std::string::npos ? 1 : line_of_pos(c.text, pos);
}

[[noreturn]] void cfg_fail(const Ctx& c, const std::string& key, const std::string& msg) {
    throw ConfigError(c.source, line_of_key(c, key), key, msg);
}

// Strict object view: every key a parser touches is recorded, and done()
// rejects whatever is left over.
class Obj {
public:
    Obj(const Ctx& c, const njson& j, std::string path)
        : c_(c), j_(&j), path_(std::move(path)) {
        if (!j.is_object())
            cfg_fail(c_, leaf(), "\"" + path_ + "\" must be an object");
    }

    const njson* find(const std::string& k) {
        used_.insert(k);
        auto it = j_->find(k);
        return it == j_->end() ? nullptr : &*it;
    }

    bool has(const std::string& k) { return find(k) != nullptr; }

    double num(const std::string& k) {
        const njson* v = find(k);
        if (!v) missing(k);
        if (!v->is_number()) wrong(k, "a number");
        return v->get<double>();
    }
    double num_or(const std::string& k, double d) {
        const njson* v = find(k);
        if (!v) return d;
        if (!v->is_number()) wrong(k, "a number");
        return v->get<double>();
    }
    int integer(const std::string& k) {
        const njson* v = find(k);
        if (!v) missing(k);
        if (!v->is_number_integer()) wrong(k, "an integer");
        return v->get<int>();
    }
    int integer_or(const std::string& k, int d) {
        const njson* v = find(k);
        if (!v) return d;
        if (!v->is_number_integer()) wrong(k, "an integer");
        return v->get<int>();
    }
    std::string str(const std::string& k) {
        const njson* v = find(k);
        if (!v) missing(k);
        if (!v->is_string()) wrong(k, "a string");
        return v->get<std::string>();
    }
    std::string str_or(const std::string& k, std::string d) {
        const njson* v = find(k);
        if (!v) return d;
        if (!v->is_string()) wrong(k, "a string");
        return v->get<std::string>();
    }
    const njson& child(const std::string& k) {
        const njson* v = find(k);
        if (!v) missing(k);
        return *v;
    }
    const njson* child_opt(const std::string& k) { return find(k); }

    std::vector<double> numbers(const std::string& k) {
        const njson* v = find(k);
        if (!v) missing(k);
        if (!v->is_array() || v->empty()) wrong(k, "a non-empty array of numbers");
        std::vector<double> out;
        for (const auto& e : *v) {
            if (!e.is_number()) wrong(k, "a non-empty array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void done() {
        for (const auto& item : j_->items())
            if (!used_.count(item.key()))
                throw ConfigError(c_.source, line_of_key(c_, item.key()), item.key(),
                                  "unknown key \"" + item.key() + "\" in \"" + path_ + "\"");
    }

    [[noreturn]] void reject(const std::string& k, const std::string& msg) { cfg_fail(c_, k, msg); }

private:
    std::string leaf() const {
        size_t dot = path_.rfind('.');
        return dot == std::string::npos ? path_ : path_.substr(dot + 1);
    }
    [[noreturn]] void missing(const std::string& k) {
        throw ConfigError(c_.source, line_of_key(c_, leaf()), k,
                          "\"" + path_ + "\" is missing required key \"" + k + "\"");
    }
    [[noreturn]] void wrong(const std::string& k, const std::string& want) {
        cfg_fail(c_, k, "\"" + path_ + "." + k + "\" must be " + want);
    }

    const Ctx& c_;
    const njson* j_;
    std::string path_;
    std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Parsed configuration.

struct GridCfg {
    double lo = 0, hi = 0;
    int n = 0;
    bool present = false;
    Grid1D make() const { return make_grid(lo, hi, n); }
};

struct TimeCfg {
    double t0 = 0, dt = 0;
    int steps = 0, every = 1;
    bool present = false;
    TimeGrid make() const { return make_time_grid(t0, dt, steps); }
};

struct PacketCfg {
    double center = 0, width = 1, kick = 0;
};

struct ShapeCfg {
    bool flow = false;
    Profile prof;
    RiccatiKind rkind = RiccatiKind::painleve4;
    std::vector<double> params;
    double x_start = 0, y_start = 0;
};

struct SourceCfg {
    std::string kind;
    int level = 0;
    double offset = -1;
    double velocity = 0;
    double k = 1;
    PacketCfg packet;
    GridCfg ygrid;
    int branch = 2;
    bool present = false;
};

struct CheckCfg {
    std::string kind;
    double tol = 0;
    double t = 0;
    bool has_weight = false;
    double weight_expected = 0, weight_tol = 1e-8;
    std::string op;
    std::vector<PacketCfg> tests;
    double bad_floor = 1e-2;
    int count = 5;
    double k = 0, win_lo = 0, win_hi = 0;
    bool has_reference = false;
    Profile reference;
    double flow_tol = 1e-8, routes_tol = 1e-8;
    std::string oracle = "none";
    double drift_tol = 1e-8;
    int levels = 3;
    double expected = 2.0;
    double v2_tol = 1e-8;
    std::vector<double> times;
    double minp_tol = 1e-10, conj_tol = 1e-5, refl_tol = 1e-12;
    bool has_adjoint = false;
    SourceCfg adjoint;
};

struct FamilyCfg {
    std::string kind;
    Profile rho, mu, gamma, K;
    Profile omega, nu, Phi;
    Profile chi_x, chi_t, fp_rho;
    ChiCombine combine = ChiCombine::add;
    double chi_im = 0;
    ShapeCfg shape;
    double m = 0, a = 0, d = 0, m0_re = 1, m0_im = 0, gate = 1e-6;
    double mtilde = 0, nparam = 0, kparam = 0;
    double beta = 1, c = 0, a0 = 0, x0 = 0, theta0 = 1, lambda_init = 0;
    Profile f1;
    double sigma = 1, delta = 1, lambda0 = 1, stat_gate = 1e-5;
};

struct ScenarioCfg {
    std::string name;
    FamilyCfg family;
    GridCfg grid, probe;
    TimeCfg time;
    SourceCfg source;
    std::vector<CheckCfg> checks;
    unsigned long seed = 1;
    std::string output;
};

Profile parse_profile(const Ctx& c, const njson& j, const std::string& path) {
    Obj o(c, j, path);
    const std::string kind = o.str("kind");
    Profile p;
    if (kind == "zero") {
        p = Profile::zero();
    } else if (kind == "constant") {
        p = Profile::constant(o.num("value"));
    } else if (kind == "polynomial") {
        p = Profile::polynomial(o.numbers("coeffs"));
    } else if (kind == "linear") {
        p = Profile::linear(o.num("intercept"), o.num("slope"));
    } else if (kind == "exponential") {
        p = Profile::exponential(o.num("amplitude"), o.num("rate"));
    } else if (kind == "trig") {
        p = Profile::trig(o.num("amplitude"), o.num("frequency"), o.num_or("phase", 0.0));
    } else if (kind == "cosh") {
        p = Profile::cosh_p(o.num("amplitude"), o.num("rate"));
    } else if (kind == "sinh") {
        p = Profile::sinh_p(o.num("amplitude"), o.num("rate"));
    } else if (kind == "power") {
        p = Profile::power(o.num("amplitude"), o.num("exponent"));
    } else {
        o.reject("kind", "unknown profile kind \"" + kind + "\" in \"" + path + "\"");
    }
    o.done();
    return p;
}

GridCfg parse_grid(const Ctx& c, const njson& j, const std::string& path) {
    Obj o(c, j, path);
    GridCfg g;
    g.lo = o.num("x-min");
    g.hi = o.num("x-max");
    g.n = o.integer("n");
    g.present = true;
    if (!(std::isfinite(g.lo) && std::isfinite(g.hi) && g.hi > g.lo))
        o.reject("x-max", "\"" + path + "\" must have x-max > x-min");
    if (g.n < 9)
        o.reject("n", "\"" + path + ".n\" must be at least 9, got " + std::to_string(g.n));
    o.done();
    return g;
}

TimeCfg parse_time(const Ctx& c, const njson& j) {
    Obj o(c, j, "time");
    TimeCfg t;
    t.t0 = o.num_or("t0", 0.0);
    t.dt = o.num("dt");
    t.steps = o.integer("steps");
    t.every = o.integer_or("store-every", 1);
    t.present = true;
    if (!(std::isfinite(t.dt) && t.dt > 0)) o.reject("dt", "\"time.dt\" must be positive");
    if (t.steps < 1) o.reject("steps", "\"time.steps\" must be at least 1");
    if (t.every < 1) o.reject("store-every", "\"time.store-every\" must be at least 1");
    if (t.steps % t.every != 0)
        o.reject("store-every", "\"time.steps\" must be a multiple of \"time.store-every\"");
    o.done();
    return t;
}

PacketCfg parse_packet(const Ctx& c, const njson& j, const std::string& path) {
    Obj o(c, j, path);
    PacketCfg p;
    p.center = o.num_or("center", 0.0);
    p.width = o.num_or("width", 1.0);
    p.kick = o.num_or("kick", 0.0);
    if (!(p.width > 0)) o.reject("width", "\"" + path + ".width\" must be positive");
    o.done();
    return p;
}

ShapeCfg parse_shape(const Ctx& c, const njson& j, const std::string& path) {
    ShapeCfg s;
    if (j.is_object() && j.contains("kind") && j["kind"] == "riccati-flow") {
        Obj o(c, j, path);
        o.str("kind");
        const std::string flow = o.str("flow");
        try {
            s.rkind = riccati_kind_from_string(flow);
        } catch (const LabError&) {
            o.reject("flow", "unknown flow \"" + flow +
                                 "\"; expected painleve4-riccati, painleve2-riccati or eq41-riccati");
        }
        s.params = o.numbers("params");
        const size_t want = s.rkind == RiccatiKind::painleve2 ? 1 : 2;
        if (s.params.size() != want)
            o.reject("params", "\"" + path + ".params\" must hold " + std::to_string(want) +
                                   " numbers for flow \"" + flow + "\"");
        s.x_start = o.num("x-start");
        s.y_start = o.num("y-start");
        s.flow = true;
        o.done();
        return s;
    }
    s.prof = parse_profile(c, j, path);
    return s;
}

SourceCfg parse_source(const Ctx& c, const njson& j, const std::string& path) {
    Obj o(c, j, path);
    SourceCfg s;
    s.kind = o.str("kind");
    s.present = true;
    if (s.kind == "oscillator-state" || s.kind == "boosted-oscillator-state") {
        s.level = o.integer_or("level", 0);
        s.offset = o.num_or("offset", -1.0);
        if (s.level < 0) o.reject("level", "\"" + path + ".level\" must be non-negative");
        if (s.kind == "boosted-oscillator-state") s.velocity = o.num("velocity");
    } else if (s.kind == "plane-wave") {
        s.k = o.num("k");
        if (s.k == 0) o.reject("k", "\"" + path + ".k\" must be nonzero");
    } else if (s.kind == "packet") {
        s.packet.center = o.num_or("center", 0.0);
        s.packet.width = o.num_or("width", 1.0);
        s.packet.kick = o.num_or("kick", 0.0);
        if (!(s.packet.width > 0)) o.reject("width", "\"" + path + ".width\" must be positive");
    } else if (s.kind == "separated") {
        s.level = o.integer_or("level", 0);
        const std::string branch = o.str_or("branch", "lower");
        if (branch == "lower")
            s.branch = 2;
        else if (branch == "upper")
            s.branch = 1;
        else
            o.reject("branch", "\"" + path + ".branch\" must be \"lower\" or \"upper\"");
        if (s.level < 0) o.reject("level", "\"" + path + ".level\" must be non-negative");
        s.ygrid = parse_grid(c, o.child("y-grid"), path + ".y-grid");
    } else if (s.kind == "zero-mode") {
        // no parameters
    } else {
        o.reject("kind", "unknown source kind \"" + s.kind + "\"");
    }
    o.done();
    return s;
}

const std::set<std::string> kCheckKinds = {
    "intertwining", "zero-mode",   "separation-match", "symmetry",
    "symmetry-ordering", "norm-identity", "reflection",  "ode-residual",
    "constraints",  "propagation", "time-order",       "fp-equilibrium"};

CheckCfg parse_check(const Ctx& c, const njson& j, const std::string& path) {
    Obj o(c, j, path);
    CheckCfg k;
    k.kind = o.str("kind");
    if (!kCheckKinds.count(k.kind)) o.reject("kind", "unknown check kind \"" + k.kind + "\"");

    auto tests_from = [&](bool required) {
        const njson* arr = o.child_opt("tests");
        if (!arr) {
            if (required) o.reject("tests", "\"" + path + "\" needs a non-empty \"tests\" array");
            return;
        }
        if (!arr->is_array() || arr->empty())
            o.reject("tests", "\"" + path + ".tests\" must be a non-empty array");
        for (size_t i = 0; i < arr->size(); ++i)
            k.tests.push_back(
                parse_packet(c, (*arr)[i], path + ".tests[" + std::to_string(i) + "]"));
    };

    if (k.kind == "intertwining") {
        k.tol = o.num_or("tol", 1e-5);
        if (const njson* adj = o.child_opt("adjoint-source")) {
            k.adjoint = parse_source(c, *adj, path + ".adjoint-source");
            k.has_adjoint = true;
        }
    } else if (k.kind == "zero-mode") {
        k.tol = o.num_or("tol", 1e-8);
        k.t = o.num_or("t", 0.0);
        if (o.has("weight-expected")) {
            k.weight_expected = o.num("weight-expected");
            k.weight_tol = o.num_or("weight-tol", 1e-8);
            k.has_weight = true;
        }
    } else if (k.kind == "separation-match") {
        k.tol = o.num_or("tol", 1e-4);
    } else if (k.kind == "symmetry") {
        k.tol = o.num_or("tol", 1e-5);
        k.op = o.str("operator");
        if (k.op != "hamiltonian" && k.op != "family" && k.op != "R1" && k.op != "R2")
            o.reject("operator", "\"" + path +
                                     ".operator\" must be hamiltonian, family, R1 or R2");
        tests_from(true);
    } else if (k.kind == "symmetry-ordering") {
        k.tol = o.num_or("tol", 1e-5);
        k.bad_floor = o.num_or("bad-floor", 1e-2);
        tests_from(true);
    } else if (k.kind == "norm-identity") {
        k.tol = o.num_or("tol", 1e-5);
        k.count = o.integer_or("count", 5);
        k.t = o.num_or("t", 0.0);
        if (k.count < 1) o.reject("count", "\"" + path + ".count\" must be at least 1");
    } else if (k.kind == "reflection") {
        k.tol = o.num_or("tol", 1e-3);
        k.k = o.num("k");
        k.win_lo = o.num("window-lo");
        k.win_hi = o.num("window-hi");
        if (k.k == 0) o.reject("k", "\"" + path + ".k\" must be nonzero");
        if (!(k.win_hi > k.win_lo))
            o.reject("window-hi", "\"" + path + "\" needs window-hi > window-lo");
    } else if (k.kind == "ode-residual") {
        k.tol = o.num_or("tol", 1e-9);
        k.flow_tol = o.num_or("flow-tol", 1e-8);
        k.routes_tol = o.num_or("routes-tol", 1e-8);
        if (const njson* ref = o.child_opt("reference")) {
            k.reference = parse_profile(c, *ref, path + ".reference");
            k.has_reference = true;
        }
    } else if (k.kind == "constraints") {
        k.tol = o.num_or("tol", 1e-6);
        k.v2_tol = o.num_or("v2-tol", 1e-8);
        if (o.has("times")) k.times = o.numbers("times");
    } else if (k.kind == "propagation") {
        k.tol = o.num_or("tol", 1e-5);
        k.oracle = o.str_or("oracle", "none");
        k.drift_tol = o.num_or("drift-tol", 1e-8);
        if (k.oracle != "none" && k.oracle != "free-gaussian")
            o.reject("oracle", "\"" + path + ".oracle\" must be none or free-gaussian");
    } else if (k.kind == "time-order") {
        k.levels = o.integer_or("levels", 3);
        k.expected = o.num_or("expected", 2.0);
        if (k.levels < 2) o.reject("levels", "\"" + path + ".levels\" must be at least 2");
    } else if (k.kind == "fp-equilibrium") {
        k.tol = o.num_or("tol", 1e-6);
        k.minp_tol = o.num_or("min-p-tol", 1e-10);
        k.conj_tol = o.num_or("conjugation-tol", 1e-5);
        k.refl_tol = o.num_or("reflection-tol", 1e-12);
    }
    o.done();
    return k;
}

const std::set<std::string> kFamilyKinds = {"free",      "first-order", "symmetry",
                                            "fokker-planck", "painleve4",   "painleve2",
                                            "fourth-order",  "nonstat",     "td-oscillator"};

FamilyCfg parse_family(const Ctx& c, const njson& j) {
    Obj o(c, j, "family");
    FamilyCfg f;
    f.kind = o.str("kind");
    if (!kFamilyKinds.count(f.kind)) o.reject("kind", "unknown family kind \"" + f.kind + "\"");

    auto prof = [&](const std::string& key, Profile dflt) {
        const njson* v = o.child_opt(key);
        return v ? parse_profile(c, *v, "family." + key) : std::move(dflt);
    };
    auto prof_req = [&](const std::string& key) {
        return parse_profile(c, o.child(key), "family." + key);
    };

    if (f.kind == "free") {
        // nothing else
    } else if (f.kind == "first-order") {
        f.rho = prof("rho", Profile::constant(1.0));
        f.mu = prof("mu", Profile::zero());
        f.gamma = prof("gamma", Profile::zero());
        f.K = prof_req("K");
    } else if (f.kind == "symmetry") {
        f.omega = prof_req("omega");
        f.nu = prof("nu", Profile::zero());
        f.Phi = prof("phi", Profile::zero());
    } else if (f.kind == "fokker-planck") {
        f.chi_x = prof_req("chi-x");
        f.chi_t = prof("chi-t", Profile::zero());
        f.fp_rho = prof("rho", Profile::constant(1.0));
        const std::string comb = o.str_or("combine", "add");
        if (comb == "add")
            f.combine = ChiCombine::add;
        else if (comb == "multiply")
            f.combine = ChiCombine::multiply;
        else
            o.reject("combine", "\"family.combine\" must be \"add\" or \"multiply\"");
        f.chi_im = o.num_or("chi-amplitude-im", 0.0);
    } else if (f.kind == "painleve4") {
        f.shape = parse_shape(c, o.child("f"), "family.f");
        f.m = o.num("m");
        f.a = o.num("a");
        f.d = o.num("d");
        f.m0_re = o.num_or("m0-re", 1.0);
        f.m0_im = o.num_or("m0-im", 0.0);
        f.gate = o.num_or("residual-gate", 1e-6);
    } else if (f.kind == "painleve2") {
        f.shape = parse_shape(c, o.child("W"), "family.W");
        f.mtilde = o.num("mtilde");
        f.nparam = o.num("n");
        f.kparam = o.num("k");
        f.gate = o.num_or("residual-gate", 1e-6);
    } else if (f.kind == "fourth-order") {
        f.shape = parse_shape(c, o.child("f"), "family.f");
        f.beta = o.num_or("beta", 1.0);
        f.c = o.num_or("c", 0.0);
        f.a0 = o.num_or("a0", 0.0);
        f.x0 = o.num_or("x0", 0.0);
        f.theta0 = o.num_or("theta0", 1.0);
        f.lambda_init = o.num_or("lambda-init", 0.0);
        f.gate = o.num_or("residual-gate", 1e-6);
        if (!(f.beta > 0)) o.reject("beta", "\"family.beta\" must be positive");
    } else if (f.kind == "nonstat" || f.kind == "td-oscillator") {
        if (f.kind == "td-oscillator") f.rho = prof_req("rho");
        f.f1 = prof_req("f1");
        f.sigma = o.num_or("sigma", 1.0);
        f.delta = o.num_or("delta", 1.0);
        f.lambda0 = o.num_or("lambda0", 1.0);
        f.stat_gate = o.num_or("stationarity-gate", 1e-5);
    }
    o.done();
    return f;
}

// Which families a check can serve, and which sections it needs.
void validate(const Ctx& c, const ScenarioCfg& cfg) {
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"intertwining",
         {"first-order", "nonstat", "td-oscillator", "painleve4", "painleve2", "fourth-order"}},
        {"zero-mode", {"first-order"}},
        {"separation-match", {"first-order"}},
        {"symmetry-ordering", {"painleve4"}},
        {"norm-identity", {"nonstat"}},
        {"reflection",
         {"first-order", "nonstat", "td-oscillator", "painleve4", "painleve2", "fourth-order"}},
        {"ode-residual", {"painleve4", "painleve2", "fourth-order"}},
        {"constraints", {"nonstat"}},
        {"propagation", {"free", "first-order", "symmetry", "nonstat", "td-oscillator"}},
        {"time-order", {"free"}},
        {"fp-equilibrium", {"fokker-planck"}},
    };
    const bool needs_probe = cfg.family.kind == "painleve4" || cfg.family.kind == "painleve2" ||
                             cfg.family.kind == "fourth-order" || cfg.family.kind == "nonstat" ||
                             cfg.family.kind == "td-oscillator";
    if (needs_probe && !cfg.probe.present && !cfg.grid.present)
        throw ConfigError(c.source, line_of_key(c, "family"), "probe",
                          "family \"" + cfg.family.kind + "\" needs a \"probe\" (or \"grid\") section");

    if (cfg.checks.empty())
        throw ConfigError(c.source, line_of_key(c, "checks"), "checks",
                          "\"checks\" must contain at least one check");

    for (const auto& k : cfg.checks) {
        const int at = line_of_value(c, k.kind);
        auto need = [&](bool ok, const std::string& what) {
            if (!ok)
                throw ConfigError(c.source, at, k.kind,
                                  "check \"" + k.kind + "\" needs " + what);
        };
        if (k.kind == "symmetry") {
            bool ok = false;
            if (k.op == "hamiltonian")
                ok = cfg.family.kind != "fokker-planck";
            else if (k.op == "family")
                ok = cfg.family.kind == "symmetry";
            else
                ok = cfg.family.kind == "nonstat" || cfg.family.kind == "td-oscillator" ||
                     cfg.family.kind == "painleve4" || cfg.family.kind == "painleve2" ||
                     cfg.family.kind == "first-order";
            if (!ok)
                throw ConfigError(c.source, at, k.kind,
                                  "symmetry operator \"" + k.op + "\" does not exist for family \"" +
                                      cfg.family.kind + "\"");
        } else {
            auto it = allowed.find(k.kind);
            if (it != allowed.end() && !it->second.count(cfg.family.kind))
                throw ConfigError(c.source, at, k.kind,
                                  "check \"" + k.kind + "\" does not apply to family \"" +
                                      cfg.family.kind + "\"");
        }

        const bool wants_grid = k.kind != "ode-residual" && k.kind != "constraints";
        if (wants_grid) need(cfg.grid.present, "a \"grid\" section");
        const bool wants_time = k.kind == "intertwining" || k.kind == "separation-match" ||
                                k.kind == "symmetry" || k.kind == "symmetry-ordering" ||
                                k.kind == "reflection" || k.kind == "propagation" ||
                                k.kind == "time-order" || k.kind == "fp-equilibrium";
        if (wants_time) need(cfg.time.present, "a \"time\" section");
        const bool wants_source = k.kind == "intertwining" || k.kind == "separation-match" ||
                                  k.kind == "reflection" || k.kind == "propagation" ||
                                  k.kind == "time-order";
        if (wants_source) need(cfg.source.present, "a \"source\" section");

        if (k.kind == "separation-match")
            need(cfg.source.kind == "separated", "a source of kind \"separated\"");
        if (k.kind == "propagation" || k.kind == "time-order")
            need(cfg.source.kind == "packet", "a source of kind \"packet\"");
        if (k.kind == "time-order" && cfg.source.packet.kick != 0)
            need(false, "a kick-free packet (the closed-form reference is kick-free)");
        if (k.kind == "propagation" && k.oracle == "free-gaussian")
            need(cfg.family.kind == "free" && cfg.source.packet.kick == 0,
                 "the free family and a kick-free packet for the free-gaussian oracle");
        if (cfg.source.present &&
            (cfg.source.kind == "separated" || cfg.source.kind == "zero-mode"))
            need(cfg.family.kind == "first-order",
                 "a first-order family for source kind \"" + cfg.source.kind + "\"");
    }
}

ScenarioCfg parse_config(const Ctx& c) {
    njson root;
    try {
        root = njson::parse(c.text);
    } catch (const njson::parse_error& e) {
        throw ConfigError(c.source, line_of_pos(c.text, e.byte > 0 ? e.byte - 1 : 0), "",
                          std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object())
        throw ConfigError(c.source, 1, "", "top level of a scenario config must be an object");

    Obj o(c, root, "scenario");
    ScenarioCfg cfg;
    cfg.name = o.str("name");
    if (cfg.name.empty()) o.reject("name", "\"name\" must be non-empty");
    cfg.family = parse_family(c, o.child("family"));
    if (const njson* g = o.child_opt("grid")) cfg.grid = parse_grid(c, *g, "grid");
    if (const njson* g = o.child_opt("probe")) cfg.probe = parse_grid(c, *g, "probe");
    if (const njson* t = o.child_opt("time")) cfg.time = parse_time(c, *t);
    if (const njson* s = o.child_opt("source")) cfg.source = parse_source(c, *s, "source");
    {
        const njson& arr = o.child("checks");
        if (!arr.is_array())
            o.reject("checks", "\"checks\" must be an array");
        for (size_t i = 0; i < arr.size(); ++i)
            cfg.checks.push_back(parse_check(c, arr[i], "checks[" + std::to_string(i) + "]"));
    }
    {
        const njson* s = o.find("seed");
        if (s) {
            if (!s->is_number_unsigned())
                o.reject("seed", "\"seed\" must be a non-negative integer");
            cfg.seed = s->get<unsigned long>();
        }
    }
    cfg.output = o.str_or("output", "");
    o.done();
    validate(c, cfg);
    return cfg;
}

// ---------------------------------------------------------------------------
// Building blocks.

struct BuiltFamily {
    std::string kind;
    Grid1D probe;
    bool has_probe = false;
    std::optional<PotentialPair> pair;
    std::optional<FirstOrderFamily> first;
    std::optional<SymmetryFamilyOps> sym;
    std::optional<FokkerPlanckOps> fp;
    std::optional<PainleveIVOps> p4;
    std::optional<PainleveIIOps> p2;
    std::optional<FourthOrderOps> f4;
    std::optional<NonStatOps> ns;
    std::optional<TDOscOps> tdo;
    ShapeFn shape;
    Bivar V2;
};

ShapeFn build_shape(const ShapeCfg& s, const Grid1D& probe) {
    if (!s.flow) return ShapeFn(s.prof);
    OdeSolution sol = integrate_riccati(s.rkind, s.params, s.x_start, s.y_start, probe);
    return shape_from_solution(sol);
}

BuiltFamily build_family(const ScenarioCfg& cfg) {
    BuiltFamily b;
    b.kind = cfg.family.kind;
    const GridCfg& pg = cfg.probe.present ? cfg.probe : cfg.grid;
    if (pg.present) {
        b.probe = pg.make();
        b.has_probe = true;
    }
    const FamilyCfg& f = cfg.family;
    if (f.kind == "free") {
        b.V2 = [](double, double) { return 0.0; };
        return b;
    }
    if (f.kind == "first-order") {
        FirstOrderFamily fam{f.rho, f.mu, f.gamma, f.K};
        b.first = fam;
        b.pair = first_order_pair(fam);
    } else if (f.kind == "symmetry") {
        SymmetryFamily fam{f.omega, f.nu, f.Phi};
        b.sym = symmetry_family_build(fam);
        b.V2 = b.sym->V;
        return b;
    } else if (f.kind == "fokker-planck") {
        FokkerPlanckFamily fam;
        fam.chi_x = f.chi_x;
        fam.chi_t = f.chi_t;
        fam.combine = f.combine;
        fam.rho = f.fp_rho;
        fam.chi_amplitude = cplx(1.0, f.chi_im);
        b.fp = fokker_planck_pair(fam);
        b.pair = b.fp->pair;
    } else if (f.kind == "painleve4") {
        PainleveIVFamily fam;
        fam.f = build_shape(f.shape, b.probe);
        fam.m = f.m;
        fam.a = f.a;
        fam.d = f.d;
        fam.m0 = cplx(f.m0_re, f.m0_im);
        fam.residual_gate = f.gate;
        b.shape = fam.f;
        b.p4 = painleve4_pair(fam, b.probe);
        b.pair = b.p4->pair;
    } else if (f.kind == "painleve2") {
        PainleveIIFamily fam;
        fam.W = build_shape(f.shape, b.probe);
        fam.mtilde = f.mtilde;
        fam.n = f.nparam;
        fam.k = f.kparam;
        fam.residual_gate = f.gate;
        b.shape = fam.W;
        b.p2 = painleve2_pair(fam, b.probe);
        b.pair = b.p2->pair;
    } else if (f.kind == "fourth-order") {
        FourthOrderFamily fam;
        fam.f = build_shape(f.shape, b.probe);
        fam.beta = f.beta;
        fam.c = f.c;
        fam.a0 = f.a0;
        fam.x0 = f.x0;
        fam.theta0 = f.theta0;
        fam.lambda0 = f.lambda_init;
        fam.residual_gate = f.gate;
        b.shape = fam.f;
        b.f4 = fourth_order_family_build(fam, b.probe);
        b.pair = b.f4->pair;
    } else if (f.kind == "nonstat") {
        NonStatFamily fam{f.f1, f.sigma, f.delta, f.lambda0, f.stat_gate};
        b.ns = nonstat_stationary_pair(fam, b.probe);
        b.pair = b.ns->pair;
    } else if (f.kind == "td-oscillator") {
        TDOscFamily fam{f.rho, NonStatFamily{f.f1, f.sigma, f.delta, f.lambda0, f.stat_gate}};
        b.tdo = td_oscillator_pair(fam, b.probe);
        b.pair = b.tdo->pair;
    }
    b.V2 = b.pair->V2;
    return b;
}

double hermite_phi(int level, double x) {
    double prev = 0.0;
    double cur = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    for (int n = 0; n < level; ++n) {
        double next =
            std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(double(n) / (n + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

ComplexField packet_field(const Grid1D& g, const PacketCfg& p) {
    const double norm = std::pow(M_PI * p.width * p.width, -0.25);
    return sample_field(g, [&](double x) {
        const double u = (x - p.center) / p.width;
        return norm * std::exp(-0.5 * u * u) * std::exp(cplx(0.0, p.kick * x));
    });
}

cplx free_gaussian(const PacketCfg& p, double x, double t) {
    const double w2 = p.width * p.width;
    const cplx s(w2, 2.0 * t);
    const double u = x - p.center;
    return std::pow(M_PI * w2, -0.25) * std::sqrt(cplx(w2, 0.0) / s) *
           std::exp(-u * u / (2.0 * s));
}

SeparatedSpec make_separated_spec(const ScenarioCfg& cfg, const SourceCfg& src) {
    SeparatedSpec spec;
    spec.rho = cfg.family.rho.valid() ? cfg.family.rho : Profile::constant(1.0);
    spec.mu = cfg.family.mu.valid() ? cfg.family.mu : Profile::zero();
    spec.gamma = cfg.family.gamma.valid() ? cfg.family.gamma : Profile::zero();
    spec.modes = oscillator_eigenpairs(src.ygrid.make(), src.branch, src.level + 1);
    spec.level = src.level;
    return spec;
}

Snapshots build_source(const ScenarioCfg& cfg, const SourceCfg& src, const BuiltFamily& b,
                       const Grid1D& g, const TimeGrid& tg) {
    if (src.kind == "oscillator-state") {
        const double E = 2.0 * src.level + 1.0 + src.offset;
        const int level = src.level;
        return sample_snapshots(g, tg, [level, E](double x, double t) {
            return hermite_phi(level, x) * std::exp(cplx(0.0, -E * t));
        });
    }
    if (src.kind == "boosted-oscillator-state") {
        const double E = 2.0 * src.level + 1.0 + src.offset;
        const double v = src.velocity;
        const int level = src.level;
        return sample_snapshots(g, tg, [level, E, v](double x, double t) {
            const double phase = E * t + 0.5 * v * x + 0.25 * v * v * t;
            return hermite_phi(level, x + v * t) * std::exp(cplx(0.0, -phase));
        });
    }
    if (src.kind == "plane-wave") {
        const double k = src.k;
        return sample_snapshots(
            g, tg, [k](double x, double t) { return std::exp(cplx(0.0, k * x - k * k * t)); });
    }
    if (src.kind == "zero-mode") {
        CBivar mode = first_order_zero_mode(*b.first);
        return sample_snapshots(g, tg, mode);
    }
    if (src.kind == "separated") {
        SeparatedSpec spec = make_separated_spec(cfg, src);
        return separated_solution(spec, g, tg);
    }
    // packet: stepped under the family's own evolution
    PropagateOptions opt;
    return propagate(b.V2, packet_field(g, src.packet), tg, opt);
}

// ---------------------------------------------------------------------------
// Check runners.

ResidualEntry mk_entry(const std::string& name, double value, double tol, int band,
                       const std::string& note, bool pass) {
    ResidualEntry e;
    e.name = name;
    e.value = value;
    e.tolerance = tol;
    e.pass = pass;
    e.band = band;
    e.note = note;
    return e;
}

ResidualEntry mk_entry(const std::string& name, double value, double tol, int band,
                       const std::string& note) {
    return mk_entry(name, value, tol, band, note, value <= tol);
}

void add_field(ScenarioResult& res, std::string label, Snapshots s) {
    for (const auto& f : res.fields)
        if (f.first == label) {
            int suffix = 2;
            std::string candidate;
            do {
                candidate = label + "-" + std::to_string(suffix++);
                bool taken = false;
                for (const auto& g : res.fields)
                    if (g.first == candidate) taken = true;
                if (!taken) break;
            } while (true);
            label = candidate;
            break;
        }
    res.fields.emplace_back(std::move(label), std::move(s));
}

struct RunState {
    const ScenarioCfg& cfg;
    BuiltFamily& built;
    std::optional<Snapshots> source; // built once, shared by checks
};

const Snapshots& source_series(RunState& st, const Grid1D& g, const TimeGrid& tg) {
    if (!st.source) st.source = build_source(st.cfg, st.cfg.source, st.built, g, tg);
    return *st.source;
}

VerificationReport run_intertwining(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    const Grid1D g = st.cfg.grid.make();
    const TimeGrid tg = st.cfg.time.make();
    const Snapshots& src = source_series(st, g, tg);
    std::optional<Snapshots> adj;
    if (chk.has_adjoint) adj = build_source(st.cfg, chk.adjoint, st.built, g, tg);
    VerificationReport rep =
        check_intertwining(*st.built.pair, src, chk.tol, adj ? &*adj : nullptr);
    add_field(res, "source", src);
    if (!rep.kernel_element)
        add_field(res, "mapped", apply_charge_series(st.built.pair->charge, src));
    return rep;
}

VerificationReport run_zero_mode(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    const Grid1D g = st.cfg.grid.make();
    VerificationReport rep = zero_mode_check(*st.built.first, g, chk.t, chk.tol);
    if (chk.has_weight) {
        double integral = std::numeric_limits<double>::quiet_NaN();
        for (const auto& e : rep.residuals)
            if (e.name == "weight-integral") integral = e.value;
        const double diff = std::abs(integral - chk.weight_expected);
        rep.residuals.push_back(mk_entry("weight-integral-match", diff, chk.weight_tol, 0,
                                         "distance to the recorded integral value",
                                         std::isfinite(diff) && diff <= chk.weight_tol));
    }
    Snapshots mode;
    mode.tg.t0 = chk.t;
    mode.tg.dt = 1.0;
    mode.tg.steps = 0;
    CBivar fn = first_order_zero_mode(*st.built.first);
    mode.fields.push_back(sample_field(g, [&](double x) { return fn(x, chk.t); }));
    add_field(res, "zero-mode", std::move(mode));
    return rep;
}

VerificationReport run_separation_match(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    const Grid1D g = st.cfg.grid.make();
    const TimeGrid tg = st.cfg.time.make();
    SeparatedSpec spec = make_separated_spec(st.cfg, st.cfg.source);
    const TimeGrid thin = make_time_grid(tg.t0, tg.dt * st.cfg.time.every,
                                         tg.steps / st.cfg.time.every);
    Snapshots ref = separated_solution(spec, g, thin);
    PropagateOptions opt;
    opt.store_every = st.cfg.time.every;
    Snapshots stepped = propagate(st.built.pair->V2, ref.fields.front(), tg, opt);
    double worst = 0.0;
    for (size_t k = 0; k < stepped.fields.size(); ++k)
        worst = std::max(worst, l2_norm_interior(stepped.fields[k] - ref.fields[k], 4));
    VerificationReport rep;
    rep.scenario = "separation-match";
    rep.provenance = st.built.pair->provenance;
    rep.residuals.push_back(mk_entry("separation-error", worst, chk.tol, 4,
                                     "stepped solution against the separable closed form"));
    rep.residuals.push_back(mk_entry("norm-drift", stepped.max_norm_drift, 1e-8, 0,
                                     "per-run drift of the stored norms"));
    add_field(res, "stepped", std::move(stepped));
    add_field(res, "separable", std::move(ref));
    return rep;
}

VerificationReport run_symmetry(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    (void)res;
    const Grid1D g = st.cfg.grid.make();
    const TimeGrid tg = st.cfg.time.make();
    Bivar V;
    SymmetryOpSpec R;
    if (chk.op == "hamiltonian") {
        V = st.built.V2;
        SymTerm term;
        term.coeff = [](double) { return cplx(1.0, 0.0); };
        term.factors = {SymFactor::ham(V, 1)};
        R.terms = {term};
        R.note = "evolution Hamiltonian";
    } else if (chk.op == "family") {
        V = st.built.sym->V;
        R = st.built.sym->R_op;
    } else {
        const bool first = chk.op == "R1";
        if (st.built.ns) {
            R = first ? st.built.ns->R1 : st.built.ns->R2;
        } else if (st.built.p4) {
            R = first ? st.built.p4->R1 : st.built.p4->R2;
        } else if (st.built.p2) {
            R = first ? st.built.p2->R1 : st.built.p2->R2;
        } else {
            const ChargeSpec& q = st.built.pair->charge;
            R = first ? symmetry_product(q, adjoint_charge(q), "charge times its reverse")
                      : symmetry_product(adjoint_charge(q), q, "reverse times the charge");
        }
        V = first ? st.built.pair->V1 : st.built.pair->V2;
    }
    std::vector<ComplexField> tests;
    for (const auto& p : chk.tests) tests.push_back(packet_field(g, p));
    return check_symmetry(V, R, tests, tg, chk.tol);
}

VerificationReport run_symmetry_ordering(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    (void)res;
    const Grid1D g = st.cfg.grid.make();
    const TimeGrid tg = st.cfg.time.make();
    std::vector<ComplexField> tests;
    for (const auto& p : chk.tests) tests.push_back(packet_field(g, p));
    const Bivar& V = st.built.pair->V2;
    VerificationReport good = check_symmetry(V, st.built.p4->R2, tests, tg, chk.tol);
    VerificationReport bad = check_symmetry(V, st.built.p4->R2_misordered, tests, tg, chk.tol);
    VerificationReport rep;
    rep.scenario = "symmetry-ordering";
    rep.provenance = st.built.pair->provenance;
    int i = 0;
    for (auto e : good.residuals) {
        e.name = "ordering-correct-" + std::to_string(++i);
        rep.residuals.push_back(e);
    }
    double worst_bad = 0.0;
    for (const auto& e : bad.residuals) worst_bad = std::max(worst_bad, e.value);
    rep.residuals.push_back(mk_entry("ordering-swapped", worst_bad, chk.bad_floor, 0,
                                     "type-mismatched composition; pass means the defect "
                                     "exceeds the floor",
                                     worst_bad > chk.bad_floor));
    return rep;
}

VerificationReport run_norm_identity(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    (void)res;
    const Grid1D g = st.cfg.grid.make();
    std::mt19937 rng(static_cast<std::mt19937::result_type>(st.cfg.seed));
    auto uni = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (rng() * (1.0 / 4294967296.0));
    };
    VerificationReport rep;
    rep.scenario = "norm-identity";
    rep.provenance = st.built.pair->provenance;
    for (int i = 0; i < chk.count; ++i) {
        PacketCfg p;
        p.center = uni(-2.0, 2.0);
        p.width = uni(0.8, 1.6);
        p.kick = uni(-1.0, 1.0);
        ComplexField psi = packet_field(g, p);
        const double n0 = l2_norm(psi);
        psi = cplx(1.0 / n0, 0.0) * psi;
        VerificationReport sub =
            check_norm_identity(*st.built.pair, psi, st.built.ns->lambda0, chk.tol, chk.t);
        for (auto e : sub.residuals) {
            e.name += "-" + std::to_string(i + 1);
            rep.residuals.push_back(e);
        }
    }
    return rep;
}

VerificationReport run_reflection(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    const Grid1D g = st.cfg.grid.make();
    const TimeGrid tg = st.cfg.time.make();
    const Snapshots& src = source_series(st, g, tg);
    Snapshots mapped = apply_charge_series(st.built.pair->charge, src);
    VerificationReport rep =
        reflection_check(mapped.fields.back(), chk.k, chk.win_lo, chk.win_hi, chk.tol);
    add_field(res, "mapped", std::move(mapped));
    return rep;
}

VerificationReport run_ode_residual(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    (void)res;
    const FamilyCfg& f = st.cfg.family;
    ResidualKind rk;
    std::vector<double> params;
    if (st.built.p4) {
        rk = ResidualKind::painleve4;
        params = {f.m, f.a, f.d};
    } else if (st.built.p2) {
        rk = ResidualKind::painleve2;
        params = {f.mtilde, f.kparam};
    } else {
        rk = ResidualKind::eq40;
        params = {f.beta, f.c, f.a0, f.x0};
    }
    OdeResidual r = ode_residual(rk, st.built.shape, st.built.probe, params);
    VerificationReport rep;
    rep.scenario = "ode-residual";
    rep.provenance = st.built.pair->provenance;
    rep.residuals.push_back(mk_entry("shape-residual", r.max_abs, chk.tol, 0,
                                     "structural equation residual over the probe grid"));
    if (st.built.p4) {
        double worst = 0.0;
        for (int i = 0; i < st.built.probe.n; ++i) {
            const double x = st.built.probe.point(i);
            worst = std::max(worst, std::abs(st.built.p4->V1_alt(x, 0.0) -
                                             st.built.pair->V1(x, 0.0)));
            worst = std::max(worst, std::abs(st.built.p4->V2_alt(x, 0.0) -
                                             st.built.pair->V2(x, 0.0)));
        }
        rep.residuals.push_back(mk_entry("route-agreement", worst, chk.routes_tol, 0,
                                         "factorized against ratio-form potentials"));
    }
    if (chk.has_reference) {
        double worst = 0.0;
        for (int i = 0; i < st.built.probe.n; ++i) {
            const double x = st.built.probe.point(i);
            worst = std::max(worst, std::abs(st.built.shape(x) - chk.reference(x)));
        }
        rep.residuals.push_back(mk_entry("flow-agreement", worst, chk.flow_tol, 0,
                                         "integrated flow against the reference shape"));
    }
    return rep;
}

VerificationReport run_constraints(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    (void)res;
    std::vector<double> times = chk.times;
    if (times.empty()) {
        const double s = 1.0 / std::max(std::abs(st.built.ns->lambda0), 1e-12);
        times = {0.0, 0.2 * s, 0.4 * s};
    }
    const std::array<double, 4> r =
        nonstat_constraint_residuals(*st.built.ns, st.built.probe, times);
    static const char* names[4] = {"constraint-advection", "constraint-balance",
                                   "constraint-gradient", "constraint-closure"};
    static const char* notes[4] = {"f_t - c_x", "b_t + c_xx + 4 c f_x",
                                   "f_xx + 4 f f_x - V2_x - b_x",
                                   "c_t + 2 f V2_x - b_xx - 4 b f_x - V2_xx"};
    VerificationReport rep;
    rep.scenario = "constraints";
    rep.provenance = st.built.pair->provenance;
    for (int i = 0; i < 4; ++i)
        rep.residuals.push_back(mk_entry(names[i], r[size_t(i)], chk.tol, 0, notes[i]));
    double v2max = 0.0;
    for (int i = 0; i < st.built.probe.n; ++i)
        v2max = std::max(v2max, std::abs(st.built.ns->V2_of(st.built.probe.point(i))));
    rep.residuals.push_back(mk_entry("stationary-partner", v2max, chk.v2_tol, 0,
                                     st.built.ns->V2_zero
                                         ? "partner recognized as exactly free"
                                         : "largest partner value over the probe grid"));
    return rep;
}

VerificationReport run_propagation(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    const Grid1D g = st.cfg.grid.make();
    const TimeGrid tg = st.cfg.time.make();
    PropagateOptions opt;
    opt.store_every = st.cfg.time.every;
    Snapshots s = propagate(st.built.V2, packet_field(g, st.cfg.source.packet), tg, opt);
    VerificationReport rep;
    rep.scenario = "propagation";
    if (chk.oracle == "free-gaussian") {
        const PacketCfg& p = st.cfg.source.packet;
        const double tf = s.tg.time(s.tg.steps);
        const ComplexField exact =
            sample_field(g, [&](double x) { return free_gaussian(p, x, tf); });
        rep.residuals.push_back(mk_entry("final-error",
                                         l2_norm_interior(s.fields.back() - exact, 4), chk.tol,
                                         4, "distance to the closed-form spread packet"));
    }
    rep.residuals.push_back(
        mk_entry("norm-drift", s.max_norm_drift, chk.drift_tol, 0, "largest per-run norm drift"));
    rep.residuals.push_back(mk_entry("boundary-containment", s.boundary_leak ? 1.0 : 0.0, 0.5, 0,
                                     "flag raised when the packet reaches the walls",
                                     !s.boundary_leak));
    add_field(res, "propagated", std::move(s));
    return rep;
}

VerificationReport run_time_order(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    (void)res;
    const Grid1D g = st.cfg.grid.make();
    const PacketCfg packet = st.cfg.source.packet;
    LevelMeasure measure = [packet](const Grid1D& gg, const TimeGrid& tt) {
        PropagateOptions opt;
        opt.store_every = tt.steps;
        Bivar zero = [](double, double) { return 0.0; };
        Snapshots s = propagate(zero, packet_field(gg, packet), tt, opt);
        const double tf = tt.time(tt.steps);
        const ComplexField exact =
            sample_field(gg, [&](double x) { return free_gaussian(packet, x, tf); });
        return l2_norm_interior(s.fields.back() - exact, 4);
    };
    std::vector<std::pair<Grid1D, TimeGrid>> levels;
    double dt = st.cfg.time.dt;
    int steps = st.cfg.time.steps;
    for (int i = 0; i < chk.levels; ++i) {
        levels.emplace_back(g, make_time_grid(st.cfg.time.t0, dt, steps));
        dt *= 0.5;
        steps *= 2;
    }
    return convergence_study(measure, levels, chk.expected);
}

VerificationReport run_fp_equilibrium(RunState& st, const CheckCfg& chk, ScenarioResult& res) {
    const Grid1D g = st.cfg.grid.make();
    const TimeGrid tg = st.cfg.time.make();
    const FokkerPlanckOps& fp = *st.built.fp;
    ComplexField psi0 = sample_field(
        g, [&](double x) { return cplx(std::exp(-0.5 * fp.U2(x, tg.t0)), 0.0); });
    PropagateOptions opt;
    opt.kind = EvolutionKind::diffusion;
    opt.store_every = st.cfg.time.every;
    Snapshots s = propagate(fp.pair.V2, psi0, tg, opt);
    Snapshots P = fp_transform(s, fp.U2, "diffusion-to-fp");

    VerificationReport rep;
    rep.scenario = "fp-equilibrium";
    rep.provenance = fp.pair.provenance;

    const double mass0 = integrate_window(P.fields.front(), 0, g.n - 1).real();
    double drift = 0.0, floor = 0.0;
    for (const auto& f : P.fields) {
        const double mass = integrate_window(f, 0, g.n - 1).real();
        drift = std::max(drift, std::abs(mass - mass0) / std::abs(mass0));
        for (const auto& v : f.values) floor = std::min(floor, v.real());
    }
    rep.residuals.push_back(
        mk_entry("equilibrium-drift", drift, chk.tol, 0, "relative drift of the total mass"));
    rep.residuals.push_back(mk_entry("positivity-floor", std::max(0.0, -floor), chk.minp_tol, 0,
                                     "depth of the most negative density value"));

    // Drift-potential conjugation, sampled away from the walls with central
    // differences on the drift potential itself.
    double conj = 0.0, refl = 0.0;
    const double tf = tg.time(tg.steps);
    for (double t : {tg.t0, tg.t0 + 0.5 * (tf - tg.t0), tf}) {
        for (int i = 4; i < g.n - 4; i += 8) {
            const double x = g.point(i);
            const double dx = 2.5e-4 * (1.0 + std::abs(x));
            const double dtm = 1e-4;
            const double up = fp.U2(x + dx, t), um = fp.U2(x - dx, t), u0 = fp.U2(x, t);
            const double ux = (up - um) / (2.0 * dx);
            const double uxx = (up - 2.0 * u0 + um) / (dx * dx);
            const double ut = (fp.U2(x, t + dtm) - fp.U2(x, t - dtm)) / (2.0 * dtm);
            const double vdrift = 0.25 * ux * ux - 0.5 * uxx + 0.5 * ut;
            conj = std::max(conj, std::abs(vdrift - fp.pair.V2(x, -t)));
            refl = std::max(refl, std::abs(u0 - 2.0 * fp.chi(x, -t)));
        }
    }
    rep.residuals.push_back(mk_entry("drift-conjugation", conj, chk.conj_tol, 4,
                                     "drift potential against the diffusion partner at "
                                     "reflected time"));
    rep.residuals.push_back(mk_entry("time-reflection", refl, chk.refl_tol, 4,
                                     "drift potential against the doubled superpotential"));
    add_field(res, "density", std::move(P));
    return rep;
}

// ---------------------------------------------------------------------------
// Builtins.

struct Builtin {
    const char* name;
    const char* summary;
    const char* text;
};

const std::vector<Builtin>& builtins();

} // namespace

ConfigError::ConfigError(const std::string& source, int line, std::string key,
                         const std::string& what_arg)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what_arg),
      line_(line),
      key_(std::move(key)) {}

bool ScenarioResult::passed() const {
    for (const auto& r : reports)
        if (!r.passed()) return false;
    return !reports.empty();
}

ScenarioResult run_scenario(const std::string& json_text, const std::string& source_name,
                            std::optional<double> tol_override) {
    Ctx ctx{json_text, source_name};
    ScenarioCfg cfg = parse_config(ctx);
    if (tol_override) {
        for (auto& chk : cfg.checks) {
            chk.tol = *tol_override;
            chk.weight_tol = *tol_override;
            chk.flow_tol = *tol_override;
            chk.routes_tol = *tol_override;
            chk.drift_tol = *tol_override;
            chk.v2_tol = *tol_override;
            chk.minp_tol = *tol_override;
            chk.conj_tol = *tol_override;
            chk.refl_tol = *tol_override;
        }
    }
    BuiltFamily built = build_family(cfg);
    ScenarioResult res;
    res.name = cfg.name;
    RunState st{cfg, built, std::nullopt};
    for (const auto& chk : cfg.checks) {
        VerificationReport rep;
        if (chk.kind == "intertwining")
            rep = run_intertwining(st, chk, res);
        else if (chk.kind == "zero-mode")
            rep = run_zero_mode(st, chk, res);
        else if (chk.kind == "separation-match")
            rep = run_separation_match(st, chk, res);
        else if (chk.kind == "symmetry")
            rep = run_symmetry(st, chk, res);
        else if (chk.kind == "symmetry-ordering")
            rep = run_symmetry_ordering(st, chk, res);
        else if (chk.kind == "norm-identity")
            rep = run_norm_identity(st, chk, res);
        else if (chk.kind == "reflection")
            rep = run_reflection(st, chk, res);
        else if (chk.kind == "ode-residual")
            rep = run_ode_residual(st, chk, res);
        else if (chk.kind == "constraints")
            rep = run_constraints(st, chk, res);
        else if (chk.kind == "propagation")
            rep = run_propagation(st, chk, res);
        else if (chk.kind == "time-order")
            rep = run_time_order(st, chk, res);
        else
            rep = run_fp_equilibrium(st, chk, res);
        rep.scenario = chk.kind;
        if (rep.provenance.empty() && built.pair) rep.provenance = built.pair->provenance;
        res.reports.push_back(std::move(rep));
    }
    return res;
}

const std::vector<std::string>& builtin_scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& b : builtins()) v.push_back(b.name);
        return v;
    }();
    return names;
}

bool is_builtin_scenario(const std::string& name) {
    for (const auto& b : builtins())
        if (name == b.name) return true;
    return false;
}

std::string builtin_scenario_text(const std::string& name) {
    for (const auto& b : builtins())
        if (name == b.name) return b.text;
    fail("unknown-scenario", "no builtin scenario named \"" + name + "\"");
}

std::string builtin_scenario_summary(const std::string& name) {
    for (const auto& b : builtins())
        if (name == b.name) return b.summary;
    fail("unknown-scenario", "no builtin scenario named \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// Writers.

void write_field_csv(const Snapshots& s, std::ostream& os) {
    os << "x,t,re,im\n";
    char buf[160];
    const Grid1D& g = s.grid();
    for (size_t k = 0; k < s.fields.size(); ++k) {
        const double t = s.tg.time(static_cast<int>(k));
        for (int i = 0; i < g.n; ++i) {
            const cplx v = s.fields[k].values[size_t(i)];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.point(i), t, v.real(),
                          v.imag());
            os << buf;
        }
    }
}

namespace {

ojson jnum(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

} // namespace

void write_report_json(const ScenarioResult& r, std::ostream& os) {
    ojson root;
    root["scenario"] = r.name;
    root["passed"] = r.passed();
    root["reports"] = ojson::array();
    for (const auto& rep : r.reports) {
        ojson jr;
        jr["check"] = rep.scenario;
        jr["provenance"] = rep.provenance;
        jr["kernel-element"] = rep.kernel_element;
        jr["passed"] = rep.passed();
        jr["residuals"] = ojson::array();
        for (const auto& e : rep.residuals) {
            ojson je;
            je["name"] = e.name;
            je["value"] = jnum(e.value);
            je["tolerance"] = jnum(e.tolerance);
            je["pass"] = e.pass;
            je["band"] = e.band;
            je["note"] = e.note;
            jr["residuals"].push_back(je);
        }
        jr["convergence"] = ojson::array();
        for (const auto& e : rep.convergence) {
            ojson je;
            je["levels"] = e.levels;
            je["coarse"] = jnum(e.coarse);
            je["fine"] = jnum(e.fine);
            je["ratio"] = jnum(e.ratio);
            je["observed-order"] = jnum(e.observed_order);
            je["expected-order"] = jnum(e.expected_order);
            je["pass"] = e.pass;
            jr["convergence"].push_back(je);
        }
        root["reports"].push_back(jr);
    }
    root["fields"] = ojson::array();
    for (const auto& f : r.fields) {
        ojson jf;
        jf["label"] = f.first;
        jf["csv"] = f.first + ".csv";
        jf["snapshots"] = f.second.fields.size();
        const Grid1D& g = f.second.grid();
        jf["grid"] = {{"x-min", g.x_min}, {"x-max", g.x_max}, {"n", g.n}};
        root["fields"].push_back(jf);
    }
    os << root.dump(2) << "\n";
}

void write_plot_script(const ScenarioResult& r, std::ostream& os) {
    os << "# final stored snapshot of each field series; run gnuplot here\n";
    os << "set datafile separator ','\n";
    os << "set xlabel 'x'\n";
    os << "set ylabel 'field'\n";
    os << "set key outside\n";
    if (r.fields.empty()) {
        os << "print 'no field series were produced by this scenario'\n";
        return;
    }
    os << "plot \\\n";
    char buf[256];
    for (size_t f = 0; f < r.fields.size(); ++f) {
        const auto& [label, snaps] = r.fields[f];
        const int n = snaps.grid().n;
        const long last = static_cast<long>(snaps.fields.size()) - 1;
        const long a = last * n, b = (last + 1) * n - 1;
        const double t = snaps.tg.time(static_cast<int>(last));
        const char* tail = f + 1 < r.fields.size() ? ", \\\n" : "\n";
        std::snprintf(buf, sizeof buf,
                      "  '%s.csv' skip 1 using 1:3 every ::%ld::%ld with lines title '%s re t=%.6g', \\\n",
                      label.c_str(), a, b, label.c_str(), t);
        os << buf;
        std::snprintf(buf, sizeof buf,
                      "  '%s.csv' skip 1 using 1:4 every ::%ld::%ld with lines title '%s im t=%.6g'%s",
                      label.c_str(), a, b, label.c_str(), t, tail);
        os << buf;
    }
}

// ---------------------------------------------------------------------------
// Builtin catalog.

namespace {

const std::vector<Builtin>& builtins() {
    static const std::vector<Builtin> table = {
        {"harmonic-first-order",
         "static Gaussian-shape pair; ladder transport of oscillator states, both directions",
         R"({
  "name": "harmonic-first-order",
  "family": {
    "kind": "first-order",
    "K": { "kind": "polynomial", "coeffs": [0, 0, 0.5] }
  },
  "grid": { "x-min": -10, "x-max": 10, "n": 2001 },
  "time": { "t0": 0, "dt": 2e-4, "steps": 6 },
  "source": { "kind": "oscillator-state", "level": 1, "offset": -1 },
  "checks": [
    { "kind": "intertwining", "tol": 1e-5,
      "adjoint-source": { "kind": "oscillator-state", "level": 0, "offset": 1 } }
  ]
}
)"},
        {"zero-mode-quartic",
         "quartic-shape kernel element: annihilation plus weight normalizability",
         R"({
  "name": "zero-mode-quartic",
  "family": {
    "kind": "first-order",
    "K": { "kind": "polynomial", "coeffs": [0, 0, 0, 0, 0.25] }
  },
  "grid": { "x-min": -6, "x-max": 6, "n": 2401 },
  "checks": [
    { "kind": "zero-mode", "tol": 1e-8,
      "weight-expected": 2.15580054954092794, "weight-tol": 1e-8 }
  ]
}
)"},
        {"galilei-boost",
         "uniformly drifting frame; boosted oscillator states cross the charge both ways",
         R"({
  "name": "galilei-boost",
  "family": {
    "kind": "first-order",
    "mu": { "kind": "linear", "intercept": 0, "slope": 1.6 },
    "gamma": { "kind": "linear", "intercept": 0, "slope": 0.64 },
    "K": { "kind": "polynomial", "coeffs": [0, 0, 0.5] }
  },
  "grid": { "x-min": -12, "x-max": 12, "n": 2401 },
  "time": { "t0": 0, "dt": 2e-4, "steps": 6 },
  "source": { "kind": "boosted-oscillator-state", "level": 1, "offset": -1, "velocity": 1.6 },
  "checks": [
    { "kind": "intertwining", "tol": 1e-5,
      "adjoint-source": { "kind": "boosted-oscillator-state", "level": 0, "offset": 1,
                          "velocity": 1.6 } }
  ]
}
)"},
        {"exp-scaling-separation",
         "exponentially scaling frame; stepped packet against the separable closed form",
         R"({
  "name": "exp-scaling-separation",
  "family": {
    "kind": "first-order",
    "rho": { "kind": "exponential", "amplitude": 1, "rate": 1 },
    "K": { "kind": "polynomial", "coeffs": [0, 0, 0.5] }
  },
  "grid": { "x-min": -10, "x-max": 10, "n": 1601 },
  "time": { "t0": 0, "dt": 2.5e-4, "steps": 2000, "store-every": 400 },
  "source": { "kind": "separated", "level": 0, "branch": "lower",
              "y-grid": { "x-min": -10, "x-max": 10, "n": 1601 } },
  "checks": [ { "kind": "separation-match", "tol": 1e-4 } ]
}
)"},
        {"symmetry-traveling",
         "traveling-profile symmetry operator commutes with its evolution on packets",
         R"({
  "name": "symmetry-traveling",
  "family": {
    "kind": "symmetry",
    "omega": { "kind": "constant", "value": 1 },
    "nu": { "kind": "constant", "value": 1.6 },
    "phi": { "kind": "trig", "amplitude": 1, "frequency": 1, "phase": 0 }
  },
  "grid": { "x-min": -16, "x-max": 16, "n": 1601 },
  "time": { "t0": 0, "dt": 1e-4, "steps": 6 },
  "checks": [
    { "kind": "symmetry", "operator": "family", "tol": 1e-5,
      "tests": [ { "center": -1.0, "width": 1.1, "kick": 0.4 },
                 { "center": 1.3, "width": 0.9, "kick": -0.7 } ] }
  ]
}
)"},
        {"symmetry-nonstat-r2",
         "closed fourth-order symmetry of the balanced hyperbolic pair on packets",
         R"({
  "name": "symmetry-nonstat-r2",
  "family": {
    "kind": "nonstat",
    "f1": { "kind": "cosh", "amplitude": 0.70710678118654752, "rate": 1 },
    "sigma": 0.5, "delta": 0.5, "lambda0": 1
  },
  "probe": { "x-min": -6, "x-max": 6, "n": 601 },
  "grid": { "x-min": -18, "x-max": 18, "n": 721 },
  "time": { "t0": 0, "dt": 5e-4, "steps": 6 },
  "checks": [
    { "kind": "symmetry", "operator": "R2", "tol": 1e-5,
      "tests": [ { "center": -0.8, "width": 2.0, "kick": 0.25 },
                 { "center": 1.1, "width": 2.2, "kick": -0.2 } ] }
  ]
}
)"},
        {"symmetry-painleve4-ordering",
         "sixth-order symmetry ordering contrast: correct composition passes, swapped fails",
         R"({
  "name": "symmetry-painleve4-ordering",
  "family": {
    "kind": "painleve4",
    "f": { "kind": "power", "amplitude": 0.5, "exponent": -1 },
    "m": 1, "a": -1, "d": -1
  },
  "probe": { "x-min": 0.5, "x-max": 2.5, "n": 401 },
  "grid": { "x-min": 0.8, "x-max": 12.8, "n": 1201 },
  "time": { "t0": 0, "dt": 5e-6, "steps": 6 },
  "checks": [
    { "kind": "symmetry-ordering", "tol": 1e-5, "bad-floor": 1e-2,
      "tests": [ { "center": 5, "width": 0.6, "kick": 0 } ] }
  ]
}
)"},
        {"norm-identity-nonstat",
         "charge-norm identity on seeded random packets for the balanced hyperbolic pair",
         R"({
  "name": "norm-identity-nonstat",
  "family": {
    "kind": "nonstat",
    "f1": { "kind": "cosh", "amplitude": 0.70710678118654752, "rate": 1 },
    "sigma": 0.5, "delta": 0.5, "lambda0": 1
  },
  "probe": { "x-min": -6, "x-max": 6, "n": 601 },
  "grid": { "x-min": -16, "x-max": 16, "n": 3201 },
  "seed": 20260814,
  "checks": [ { "kind": "norm-identity", "tol": 1e-5, "count": 5, "t": 0.2 } ]
}
)"},
        {"reflectionless-nonstat",
         "plane wave crosses the balanced hyperbolic partner; counter Fourier weight stays small",
         R"({
  "name": "reflectionless-nonstat",
  "family": {
    "kind": "nonstat",
    "f1": { "kind": "cosh", "amplitude": 0.70710678118654752, "rate": 1 },
    "sigma": 0.5, "delta": 0.5, "lambda0": 1
  },
  "probe": { "x-min": -6, "x-max": 6, "n": 601 },
  "grid": { "x-min": -25, "x-max": 25, "n": 5001 },
  "time": { "t0": 0, "dt": 2e-4, "steps": 6 },
  "source": { "kind": "plane-wave", "k": 2 },
  "checks": [
    { "kind": "intertwining", "tol": 1e-4 },
    { "kind": "reflection", "k": 2, "window-lo": 12, "window-hi": 24, "tol": 1e-3 }
  ]
}
)"},
        {"painleve4-riccati",
         "flow-built rational shape: structural residual, closed-form and route agreement",
         R"({
  "name": "painleve4-riccati",
  "family": {
    "kind": "painleve4",
    "f": { "kind": "riccati-flow", "flow": "painleve4-riccati",
           "params": [1, -1], "x-start": 1, "y-start": 0.5 },
    "m": 1, "a": -1, "d": -1
  },
  "probe": { "x-min": 0.5, "x-max": 2.5, "n": 401 },
  "checks": [
    { "kind": "ode-residual", "tol": 1e-9, "flow-tol": 1e-8, "routes-tol": 1e-8,
      "reference": { "kind": "power", "amplitude": 0.5, "exponent": -1 } }
  ]
}
)"},
        {"painleve2-pole",
         "pole shape with a linear-in-time charge: structural residual on the half line",
         R"({
  "name": "painleve2-pole",
  "family": {
    "kind": "painleve2",
    "W": { "kind": "power", "amplitude": 1, "exponent": -1 },
    "mtilde": 1, "n": 0.33333333333333333, "k": -4
  },
  "probe": { "x-min": 0.5, "x-max": 8, "n": 751 },
  "checks": [ { "kind": "ode-residual", "tol": 1e-9 } ]
}
)"},
        {"fourth-order-riccati",
         "flow-built linear shape behind the oscillating fourth-order charge",
         R"({
  "name": "fourth-order-riccati",
  "family": {
    "kind": "fourth-order",
    "f": { "kind": "riccati-flow", "flow": "eq41-riccati",
           "params": [8, 1], "x-start": 1, "y-start": 1 },
    "beta": 8, "c": 0, "a0": 0, "x0": 1
  },
  "probe": { "x-min": 0.5, "x-max": 2.375, "n": 376 },
  "checks": [
    { "kind": "ode-residual", "tol": 1e-9, "flow-tol": 1e-8,
      "reference": { "kind": "polynomial", "coeffs": [0, 1] } }
  ]
}
)"},
        {"cn-free-gaussian",
         "long free spreading run: closed-form error, norm drift, boundary containment",
         R"({
  "name": "cn-free-gaussian",
  "family": { "kind": "free" },
  "grid": { "x-min": -20, "x-max": 20, "n": 801 },
  "time": { "t0": 0, "dt": 1e-4, "steps": 10000, "store-every": 500 },
  "source": { "kind": "packet", "center": 0, "width": 1, "kick": 0 },
  "checks": [
    { "kind": "propagation", "oracle": "free-gaussian", "tol": 1e-5, "drift-tol": 1e-8 }
  ]
}
)"},
        {"dt-order-study",
         "time-step refinement study on the free spreading packet",
         R"({
  "name": "dt-order-study",
  "family": { "kind": "free" },
  "grid": { "x-min": -20, "x-max": 20, "n": 4001 },
  "time": { "t0": 0, "dt": 4e-3, "steps": 125 },
  "source": { "kind": "packet", "center": 0, "width": 1, "kick": 0 },
  "checks": [ { "kind": "time-order", "levels": 3, "expected": 2.0 } ]
}
)"},
        {"fokker-planck-equilibrium",
         "drift-form equilibrium density held over a long run; conjugation identities checked",
         R"({
  "name": "fokker-planck-equilibrium",
  "family": {
    "kind": "fokker-planck",
    "chi-x": { "kind": "polynomial", "coeffs": [0, 0, 0.5] }
  },
  "grid": { "x-min": -6, "x-max": 6, "n": 601 },
  "time": { "t0": 0, "dt": 1e-3, "steps": 1000, "store-every": 50 },
  "checks": [
    { "kind": "fp-equilibrium", "tol": 1e-6, "min-p-tol": 1e-10,
      "conjugation-tol": 1e-5, "reflection-tol": 1e-12 }
  ]
}
)"},
        {"oscillator-transplant",
         "stationary hyperbolic pair transplanted into an oscillator background; state transport",
         R"({
  "name": "oscillator-transplant",
  "family": {
    "kind": "td-oscillator",
    "rho": { "kind": "trig", "amplitude": 1, "frequency": 2, "phase": 0 },
    "f1": { "kind": "cosh", "amplitude": 0.70710678118654752, "rate": 1 },
    "sigma": 0.5, "delta": 0.5, "lambda0": 1
  },
  "probe": { "x-min": -6, "x-max": 6, "n": 601 },
  "grid": { "x-min": -10, "x-max": 10, "n": 2001 },
  "time": { "t0": 0, "dt": 1e-4, "steps": 6 },
  "source": { "kind": "oscillator-state", "level": 1, "offset": 0 },
  "checks": [ { "kind": "intertwining", "tol": 1e-5 } ]
}
)"},
    };
    return table;
}

} // namespace

} // namespace itw
