#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tsallis::app {

namespace {

class Section {
public:
    Section(YAML::Node node, std::string path, const std::string& source)
        : node_(std::move(node)), path_(std::move(path)), source_(source) {
        if (!node_.IsMap()) fail(node_, path_, "expected a mapping");
    }

    [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& msg) const {
        std::ostringstream os;
        os << source_;
        const YAML::Mark mk = at.Mark();
        if (!mk.is_null()) os << ':' << mk.line + 1;
        os << ": " << field << ": " << msg;
        throw ConfigError(os.str());
    }

    void allow(std::initializer_list<const char*> keys) const {
        for (const auto& kv : node_) {
            const std::string k = kv.first.as<std::string>();
            if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
                std::string list;
                for (const char* a : keys) list += std::string(list.empty() ? "" : ", ") + a;
                fail(kv.first, field(k), "unknown key (expected one of: " + list + ")");
            }
        }
    }

    bool has(const char* key) const { return static_cast<bool>(node_[key]); }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    Section sub(const char* key) const {
        const YAML::Node n = node_[key];
        if (!n) fail(node_, field(key), "missing section");
        return Section(n, field(key), source_);
    }

    double num(const char* key, double dflt, double lo, double hi, bool lo_open = false) const {
        const YAML::Node n = node_[key];
        if (!n) return dflt;
        const double v = as_double(n, field(key));
        check_range(n, field(key), v, lo, hi, lo_open);
        return v;
    }

    double required_num(const char* key, double lo, double hi, bool lo_open = false) const {
        if (!has(key)) fail(node_, field(key), "missing required value");
        return num(key, 0.0, lo, hi, lo_open);
    }

    std::size_t count(const char* key, std::size_t dflt, std::size_t lo, std::size_t hi) const {
        const YAML::Node n = node_[key];
        if (!n) return dflt;
        std::uint64_t v = 0;
        try {
            v = n.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
            fail(n, field(key), "expected a non-negative integer");
        }
        if (v < lo || v > hi) {
            std::ostringstream os;
            os << "value " << v << " outside [" << lo << ", " << hi << "]";
            fail(n, field(key), os.str());
        }
        return static_cast<std::size_t>(v);
    }

    std::uint64_t u64(const char* key, std::uint64_t dflt) const {
        const YAML::Node n = node_[key];
        if (!n) return dflt;
        try {
            return n.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
            fail(n, field(key), "expected an unsigned 64-bit integer");
        }
    }

    bool flag(const char* key, bool dflt) const {
        const YAML::Node n = node_[key];
        if (!n) return dflt;
        try {
            return n.as<bool>();
        } catch (const YAML::Exception&) {
            fail(n, field(key), "expected true or false");
        }
    }

    std::string text(const char* key, const std::string& dflt) const {
        const YAML::Node n = node_[key];
        if (!n) return dflt;
        if (!n.IsScalar()) fail(n, field(key), "expected a string");
        return n.as<std::string>();
    }

    std::string choice(const char* key, const std::string& dflt, std::initializer_list<const char*> options) const {
        const std::string v = text(key, dflt);
        if (std::none_of(options.begin(), options.end(), [&](const char* o) { return v == o; })) {
            std::string list;
            for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
            fail(node_[key], field(key), "'" + v + "' is not one of: " + list);
        }
        return v;
    }

    std::vector<double> list(const char* key, std::vector<double> dflt, double lo, double hi,
                             bool lo_open = false) const {
        const YAML::Node n = node_[key];
        if (!n) return dflt;
        if (!n.IsSequence()) fail(n, field(key), "expected a list of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string f = field(key) + "[" + std::to_string(i) + "]";
            const double v = as_double(n[i], f);
            check_range(n[i], f, v, lo, hi, lo_open);
            out.push_back(v);
        }
        return out;
    }

    const YAML::Node& node() const { return node_; }
    const std::string& path() const { return path_; }
    const std::string& source() const { return source_; }

private:
    double as_double(const YAML::Node& n, const std::string& f) const {
        if (!n.IsScalar()) fail(n, f, "expected a number");
        double v = 0.0;
        try {
            v = n.as<double>();
        } catch (const YAML::Exception&) {
            fail(n, f, "expected a number, got '" + n.Scalar() + "'");
        }
        if (!std::isfinite(v)) fail(n, f, "must be finite");
        return v;
    }

    void check_range(const YAML::Node& n, const std::string& f, double v, double lo, double hi, bool lo_open) const {
        const bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
        if (!ok) {
            std::ostringstream os;
            os << "value " << v << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
            fail(n, f, os.str());
        }
    }

    YAML::Node node_;
    std::string path_;
    const std::string& source_;
};

void read_market(const Section& s, MarketModel& mk) {
    s.allow({"m", "n", "lambda", "T", "S0"});
    mk.m = static_cast<int>(s.count("m", 1, 1, 3));
    mk.n = static_cast<int>(s.count("n", 1, 1, 3));
    mk.T = s.num("T", 1.0, 0.0, 100.0, true);
    mk.S0 = s.list("S0", std::vector<double>(mk.m, 0.0), -1e6, 1e6);
    if (static_cast<int>(mk.S0.size()) != mk.m) s.fail(s.node()["S0"], s.field("S0"), "needs m entries");
    if (!s.has("lambda")) {
        mk.lambda = LambdaSpec::constant(std::vector<double>(mk.m, 0.0));
        return;
    }
    const Section l = s.sub("lambda");
    l.allow({"kind", "level", "slope"});
    const std::string kind = l.choice("kind", "constant", {"constant", "tanh"});
    const auto level = l.list("level", std::vector<double>(mk.m, 0.0), -10.0, 10.0);
    if (static_cast<int>(level.size()) != mk.m) l.fail(l.node()["level"], l.field("level"), "needs m entries");
    if (kind == "constant") {
        if (l.has("slope")) l.fail(l.node()["slope"], l.field("slope"), "only used with kind: tanh");
        mk.lambda = LambdaSpec::constant(level);
    } else {
        const auto slope = l.list("slope", std::vector<double>(mk.m, 1.0), -10.0, 10.0);
        if (static_cast<int>(slope.size()) != mk.m) l.fail(l.node()["slope"], l.field("slope"), "needs m entries");
        mk.lambda = LambdaSpec::tanh(level, slope);
    }
}

void read_params(const Section& s, ScenarioConfig& c) {
    s.allow({"q", "gamma"});
    c.q = s.required_num("q", 0.0, 100.0, true);
    if (c.q == 1.0)
        s.fail(s.node()["q"], s.field("q"),
               "q = 1 is excluded: the deformed exponential and logarithm are only defined for q != 1");
    c.gamma = s.num("gamma", 1.0, 0.0, 1e6, true);
}

void read_claim(const Section& s, ClaimConfig& c) {
    s.allow({"name", "params", "expr"});
    c.name = s.choice("name", "", {"constant", "digital_w", "digital_wperp", "smooth_mixed", "custom"});
    c.expr = s.text("expr", "");
    if (s.has("params")) {
        const Section p = s.sub("params");
        for (const auto& kv : p.node()) {
            const std::string k = kv.first.as<std::string>();
            c.params[k] = p.num(k.c_str(), 0.0, -1e6, 1e6);
        }
    }
    if (c.name == "custom" && c.expr.empty()) s.fail(s.node(), s.field("expr"), "custom claims need an expression");
    if (c.name != "custom" && !c.expr.empty())
        s.fail(s.node()["expr"], s.field("expr"), "only custom claims take an expression");
}

void read_numerics(const Section& s, PricingSetup& st) {
    s.allow({"paths", "steps", "grading", "seed", "scheme", "seller", "pde", "lsmc", "grid"});
    st.paths = s.count("paths", st.paths, 2, 100000000);
    st.steps = s.count("steps", st.steps, 1, 100000);
    st.grading = s.num("grading", st.grading, 1.0, 10.0);
    st.seed = s.u64("seed", st.seed);
    const std::string scheme = s.choice("scheme", "auto", {"auto", "pde", "lsmc"});
    st.scheme = scheme == "pde" ? SchemeChoice::Pde : scheme == "lsmc" ? SchemeChoice::Lsmc : SchemeChoice::Auto;
    st.seller = s.flag("seller", st.seller);
    if (s.has("pde")) {
        const Section p = s.sub("pde");
        p.allow({"points", "steps", "half_width", "grading", "picard_tol", "picard_max", "mu_min", "smoothing_cells",
                 "richardson"});
        auto& c = st.pde;
        c.points = p.count("points", c.points, 5, 4001);
        if (c.points % 2 == 0) p.fail(p.node()["points"], p.field("points"), "must be odd");
        c.steps = p.count("steps", c.steps, 1, 100000);
        c.half_width = p.num("half_width", c.half_width, 0.0, 1e3);
        c.grading = p.num("grading", c.grading, 1.0, 10.0);
        c.picard_tol = p.num("picard_tol", c.picard_tol, 0.0, 1e-2, true);
        c.picard_max = static_cast<int>(p.count("picard_max", static_cast<std::size_t>(c.picard_max), 1, 10000));
        c.mu_min = p.num("mu_min", c.mu_min, 0.0, 1.0, true);
        c.smoothing_cells = p.num("smoothing_cells", c.smoothing_cells, 0.0, 100.0, true);
        const std::string r = p.choice("richardson", "auto", {"auto", "on", "off"});
        c.richardson = r == "on" ? Richardson::On : r == "off" ? Richardson::Off : Richardson::Auto;
    }
    if (s.has("lsmc")) {
        const Section p = s.sub("lsmc");
        p.allow({"basis", "degree", "z_degree", "paths_per_cell", "max_cells_per_dim", "ridge", "frame",
                 "picard_passes", "clamp"});
        auto& c = st.lsmc;
        const std::string b = p.choice("basis", "auto", {"auto", "polynomial", "local_linear"});
        c.basis = b == "polynomial" ? LsmcBasis::Polynomial
                  : b == "local_linear" ? LsmcBasis::LocalLinear
                                        : LsmcBasis::Auto;
        c.degree = static_cast<int>(p.count("degree", static_cast<std::size_t>(c.degree), 1, 7));
        c.z_degree = static_cast<int>(p.count("z_degree", static_cast<std::size_t>(c.z_degree), 0, 7));
        if (c.z_degree > c.degree) p.fail(p.node()["z_degree"], p.field("z_degree"), "must not exceed degree");
        c.paths_per_cell = p.count("paths_per_cell", c.paths_per_cell, 4, 1000000);
        c.max_cells_per_dim = p.count("max_cells_per_dim", c.max_cells_per_dim, 1, 1024);
        c.ridge = p.num("ridge", c.ridge, 0.0, 1.0);
        c.frame = p.choice("frame", "qmin", {"qmin", "p"}) == "p" ? Frame::P : Frame::Qmin;
        c.picard_passes = static_cast<int>(p.count("picard_passes", static_cast<std::size_t>(c.picard_passes), 1, 50));
        c.clamp = p.flag("clamp", c.clamp);
    }
    if (s.has("grid")) {
        const Section g = s.sub("grid");
        g.allow({"lo", "hi", "points"});
        st.grid_lo = g.num("lo", st.grid_lo, -10.0, 10.0);
        st.grid_hi = g.num("hi", st.grid_hi, -10.0, 10.0);
        st.grid_points = g.count("points", st.grid_points, 1, 1001);
        if (st.grid_hi < st.grid_lo) g.fail(g.node(), g.field("hi"), "must not be below lo");
    }
}

void read_entropy(const Section& s, EntropyConfig& e, int n) {
    s.allow({"qs", "measures", "kl_delta", "submartingale", "keep_every"});
    e.qs = s.list("qs", e.qs, 0.0, 100.0, true);
    for (std::size_t i = 0; i < e.qs.size(); ++i)
        if (e.qs[i] == 1.0)
            s.fail(s.node()["qs"][i], s.field("qs"),
                   "q = 1 is excluded: the deformed exponential and logarithm are only defined for q != 1");
    e.keep_every = s.count("keep_every", e.keep_every, 1, 100000);
    if (s.has("kl_delta")) e.kl_delta = s.num("kl_delta", 0.01, 0.0, 0.1, true);
    if (s.has("measures")) {
        const YAML::Node list = s.node()["measures"];
        if (!list.IsSequence()) s.fail(list, s.field("measures"), "expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Section m(list[i], s.field("measures") + "[" + std::to_string(i) + "]", s.source());
            m.allow({"label", "alpha"});
            EntropyMeasure em;
            em.label = m.text("label", "measure" + std::to_string(i));
            em.alpha = m.list("alpha", std::vector<double>(n, 0.0), -10.0, 10.0);
            if (static_cast<int>(em.alpha.size()) != n) m.fail(m.node()["alpha"], m.field("alpha"), "needs n entries");
            e.measures.push_back(em);
        }
    }
    if (s.has("submartingale")) {
        const Section m = s.sub("submartingale");
        m.allow({"times", "inner", "outer"});
        e.submartingale_times = m.list("times", {0.25, 0.5}, 0.0, 1.0, true);
        e.inner = m.count("inner", e.inner, 2, 1000000);
        e.outer = m.count("outer", e.outer, 1, 100000000);
    }
}

}  // namespace

Claim ScenarioConfig::make_claim() const {
    return registry_claim(claim.name, claim.params, setup.model, claim.expr);
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << source << ':' << e.mark.line + 1 << ": syntax error: " << e.msg;
        throw ConfigError(os.str());
    }
    ScenarioConfig c;
    c.source = source;
    const Section top(root, "", c.source);
    top.allow({"market", "params", "claim", "numerics", "entropy", "dual", "sweep", "outputs"});
    read_market(top.sub("market"), c.setup.model);
    read_params(top.sub("params"), c);
    read_claim(top.sub("claim"), c.claim);
    if (top.has("numerics")) read_numerics(top.sub("numerics"), c.setup);
    if (top.has("entropy")) read_entropy(top.sub("entropy"), c.entropy, c.setup.model.n);
    if (top.has("dual")) {
        const Section d = top.sub("dual");
        d.allow({"grids"});
        c.dual_grids = d.flag("grids", c.dual_grids);
    }
    if (top.has("sweep")) {
        const Section s = top.sub("sweep");
        s.allow({"gammas", "kappas"});
        c.sweep.gammas = s.list("gammas", c.sweep.gammas, 0.0, 1e6, true);
        c.sweep.kappas = s.list("kappas", c.sweep.kappas, 0.0, 1e3, true);
        if (c.sweep.gammas.empty()) s.fail(s.node()["gammas"], s.field("gammas"), "needs at least one value");
    }
    if (top.has("outputs")) {
        const Section o = top.sub("outputs");
        o.allow({"report", "table", "surface", "surface_stride"});
        c.outputs.report = o.text("report", c.outputs.report);
        c.outputs.table = o.text("table", c.outputs.table);
        c.outputs.surface = o.text("surface", c.outputs.surface);
        c.outputs.surface_stride = o.count("surface_stride", c.outputs.surface_stride, 1, 10000);
    }
    if (c.setup.model.m != 1 || c.setup.model.n != 1) {
        if (c.setup.scheme == SchemeChoice::Pde)
            throw ConfigError(source + ": numerics.scheme: pde requires market.m = market.n = 1");
    }
    try {
        (void)c.make_claim();
    } catch (const std::exception& e) {
        const YAML::Node cn = root["claim"];
        std::ostringstream os;
        os << source << ':' << cn.Mark().line + 1 << ": claim: " << e.what();
        throw ConfigError(os.str());
    }
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace tsallis::app
