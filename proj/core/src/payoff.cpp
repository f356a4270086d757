#include "tsallis/payoff.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace tsallis {

namespace detail {

enum class Op { Const, W, Wp, Add, Sub, Mul, Neg, Min, Max, Clamp, Ind, Tanh };

struct Node {
    Op op;
    double value = 0.0;  // constant, or ramp half-width for Ind
    int index = 0;       // variable index
    std::vector<std::shared_ptr<const Node>> args;
};

}  // namespace detail

namespace {

using detail::Node;
using detail::Op;
using NodePtr = std::shared_ptr<const Node>;

constexpr double kInf = std::numeric_limits<double>::infinity();

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0, int index = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->index = index;
    n->args = std::move(args);
    return n;
}

double ramp(double x, double h) {
    if (h <= 0.0) return x > 0.0 ? 1.0 : 0.0;
    return std::clamp((x + h) / (2.0 * h), 0.0, 1.0);
}

double eval_node(const Node& n, const double* w, const double* wp, double smooth) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::W: return w[n.index];
        case Op::Wp: return wp[n.index];
        case Op::Add: return eval_node(*n.args[0], w, wp, smooth) + eval_node(*n.args[1], w, wp, smooth);
        case Op::Sub: return eval_node(*n.args[0], w, wp, smooth) - eval_node(*n.args[1], w, wp, smooth);
        case Op::Mul: return eval_node(*n.args[0], w, wp, smooth) * eval_node(*n.args[1], w, wp, smooth);
        case Op::Neg: return -eval_node(*n.args[0], w, wp, smooth);
        case Op::Min:
            return std::min(eval_node(*n.args[0], w, wp, smooth), eval_node(*n.args[1], w, wp, smooth));
        case Op::Max:
            return std::max(eval_node(*n.args[0], w, wp, smooth), eval_node(*n.args[1], w, wp, smooth));
        case Op::Clamp: {
            const double x = eval_node(*n.args[0], w, wp, smooth);
            const double lo = eval_node(*n.args[1], w, wp, smooth);
            const double hi = eval_node(*n.args[2], w, wp, smooth);
            return std::min(hi, std::max(lo, x));
        }
        case Op::Ind: {
            const double h = n.value > 0.0 ? n.value : smooth;
            return ramp(eval_node(*n.args[0], w, wp, smooth), h);
        }
        case Op::Tanh: return std::tanh(eval_node(*n.args[0], w, wp, smooth));
    }
    return 0.0;
}

// Product of interval endpoints with 0 * inf = 0.
double emul(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

Interval bounds_node(const Node& n) {
    auto arg = [&](std::size_t i) { return bounds_node(*n.args[i]); };
    switch (n.op) {
        case Op::Const: return {n.value, n.value};
        case Op::W:
        case Op::Wp: return {-kInf, kInf};
        case Op::Add: {
            const auto a = arg(0), b = arg(1);
            return {a.lo + b.lo, a.hi + b.hi};
        }
        case Op::Sub: {
            const auto a = arg(0), b = arg(1);
            return {a.lo - b.hi, a.hi - b.lo};
        }
        case Op::Mul: {
            const auto a = arg(0), b = arg(1);
            const double p[4] = {emul(a.lo, b.lo), emul(a.lo, b.hi), emul(a.hi, b.lo), emul(a.hi, b.hi)};
            return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
        }
        case Op::Neg: {
            const auto a = arg(0);
            return {-a.hi, -a.lo};
        }
        case Op::Min: {
            const auto a = arg(0), b = arg(1);
            return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
        }
        case Op::Max: {
            const auto a = arg(0), b = arg(1);
            return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
        }
        case Op::Clamp: {
            const auto x = arg(0), lo = arg(1), hi = arg(2);
            return {std::max(lo.lo, std::min(x.lo, hi.lo)), std::min(hi.hi, std::max(x.hi, lo.hi))};
        }
        case Op::Ind: {
            const auto x = arg(0);
            if (x.lo > n.value) return {1.0, 1.0};
            if (x.hi < -n.value || (n.value == 0.0 && x.hi <= 0.0)) return {0.0, 0.0};
            return {0.0, 1.0};
        }
        case Op::Tanh: {
            const auto x = arg(0);
            return {std::tanh(x.lo), std::tanh(x.hi)};
        }
    }
    return {-kInf, kInf};
}

bool uses(const Node& n, Op var) {
    if (n.op == var) return true;
    return std::any_of(n.args.begin(), n.args.end(), [&](const NodePtr& a) { return uses(*a, var); });
}

bool raw_indicator(const Node& n) {
    if (n.op == Op::Ind && n.value <= 0.0) return true;
    return std::any_of(n.args.begin(), n.args.end(), [](const NodePtr& a) { return raw_indicator(*a); });
}

class Parser {
public:
    Parser(const std::string& s, int m, int n) : s_(s), m_(m), n_(n) {}

    NodePtr parse() {
        auto e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "payoff expression: " << msg << " at column " << pos_ + 1;
        throw ParseError(os.str(), pos_ + 1);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(Op::Add, {lhs, term()});
            else if (accept('-'))
                lhs = make(Op::Sub, {lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term() {
        auto lhs = unary();
        while (accept('*')) lhs = make(Op::Mul, {lhs, unary()});
        return lhs;
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::Neg, {unary()});
        return atom();
    }

    double number() {
        skip();
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number");
        pos_ += static_cast<std::size_t>(end - begin);
        if (!std::isfinite(v)) fail("number out of range");
        return v;
    }

    std::string ident() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return s_.substr(start, pos_ - start);
    }

    int var_index(const std::string& name, std::size_t prefix, int limit) {
        int idx = 0;
        if (name.size() > prefix) {
            const std::string digits = name.substr(prefix);
            if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                fail("unknown identifier '" + name + "'");
            idx = std::stoi(digits);
        } else if (accept('[')) {
            idx = static_cast<int>(number());
            expect(']');
        }
        if (idx < 0 || idx >= limit) fail("variable index out of range in '" + name + "'");
        return idx;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make(Op::Const, {}, number());
        if (accept('(')) {
            auto e = expr();
            expect(')');
            return e;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected character '") + c + "'");
        const std::size_t at = pos_;
        const std::string name = ident();
        if (name.rfind("Wp", 0) == 0) return make(Op::Wp, {}, 0.0, var_index(name, 2, n_));
        if (name[0] == 'W') return make(Op::W, {}, 0.0, var_index(name, 1, m_));
        auto call = [&](std::size_t min_args, std::size_t max_args) {
            expect('(');
            std::vector<NodePtr> args{expr()};
            while (accept(',')) args.push_back(expr());
            expect(')');
            if (args.size() < min_args || args.size() > max_args) {
                pos_ = at;
                fail("wrong number of arguments to " + name);
            }
            return args;
        };
        if (name == "min") return make(Op::Min, call(2, 2));
        if (name == "max") return make(Op::Max, call(2, 2));
        if (name == "clamp") return make(Op::Clamp, call(3, 3));
        if (name == "tanh") return make(Op::Tanh, call(1, 1));
        if (name == "ind") {
            auto args = call(1, 2);
            double h = 0.0;
            if (args.size() == 2) {
                if (args[1]->op != Op::Const || !(args[1]->value > 0.0)) {
                    pos_ = at;
                    fail("ind smoothing width must be a positive constant");
                }
                h = args[1]->value;
            }
            return make(Op::Ind, {args[0]}, h);
        }
        pos_ = at;
        fail("unknown identifier '" + name + "'");
    }

    const std::string& s_;
    int m_, n_;
    std::size_t pos_ = 0;
};

// Shortest round-trip decimal form.
std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t column)
    : std::invalid_argument(what), column_(column) {}

Payoff::Payoff(std::shared_ptr<const detail::Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Payoff Payoff::parse(const std::string& text, int m, int n) {
    Parser p(text, m, n);
    return Payoff(p.parse(), text);
}

Payoff Payoff::constant(double c) { return Payoff(make(Op::Const, {}, c), fmt(c)); }

double Payoff::eval(const double* w, const double* wp, double smoothing) const {
    return eval_node(*root_, w, wp, smoothing);
}

Interval Payoff::bounds() const { return bounds_node(*root_); }
bool Payoff::depends_on_w() const { return uses(*root_, Op::W); }
bool Payoff::depends_on_wp() const { return uses(*root_, Op::Wp); }
bool Payoff::has_raw_indicator() const { return raw_indicator(*root_); }

Payoff Payoff::affine(double a, double b) const {
    auto node = make(Op::Add, {make(Op::Mul, {make(Op::Const, {}, a), root_}), make(Op::Const, {}, b)});
    return Payoff(node, fmt(a) + "*(" + text_ + ")+" + fmt(b));
}

Payoff Payoff::mix(double k, const Payoff& x, const Payoff& y) {
    auto node = make(Op::Add, {make(Op::Mul, {make(Op::Const, {}, k), x.root_}),
                               make(Op::Mul, {make(Op::Const, {}, 1.0 - k), y.root_})});
    return Payoff(node, fmt(k) + "*(" + x.text_ + ")+" + fmt(1.0 - k) + "*(" + y.text_ + ")");
}

const char* hedge_name(HedgeClass h) {
    switch (h) {
        case HedgeClass::Attainable: return "attainable";
        case HedgeClass::Unhedged: return "unhedged";
        case HedgeClass::General: return "general";
    }
    return "general";
}

Claim Claim::make(std::string id, Payoff payoff) {
    const Interval b = payoff.bounds();
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi))
        throw std::invalid_argument("claim '" + id + "': payoff is not provably bounded (" + payoff.text() + ")");
    const bool on_w = payoff.depends_on_w(), on_wp = payoff.depends_on_wp();
    HedgeClass h = HedgeClass::General;
    if (!on_wp) h = HedgeClass::Attainable;
    else if (!on_w) h = HedgeClass::Unhedged;
    return Claim{std::move(id), std::move(payoff), b.lo, b.hi, h};
}

Claim Claim::affine(double a, double b, std::string new_id) const {
    return make(std::move(new_id), payoff.affine(a, b));
}

Claim registry_claim(const std::string& name, const std::map<std::string, double>& params, const MarketModel& model,
                     const std::string& expr) {
    auto get = [&](const std::string& key, double dflt) {
        const auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    auto allow = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : params)
            if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
                throw std::invalid_argument("claim '" + name + "': unknown parameter '" + k + "'");
    };
    if (name != "custom" && !expr.empty())
        throw std::invalid_argument("claim '" + name + "': only custom claims take an expression");
    if (name == "constant") {
        allow({"value"});
        return Claim::make(name, Payoff::constant(get("value", 0.0)));
    }
    if (name == "digital_w") {
        allow({"shift", "scale"});
        double shift;
        if (params.count("shift")) {
            shift = params.at("shift");
        } else {
            if (!model.lambda.is_constant())
                throw std::invalid_argument("claim digital_w: give 'shift' explicitly when lambda is not constant");
            shift = model.lambda.level()[0] * model.T;
        }
        const double scale = get("scale", 1.0);
        auto p = Payoff::parse(fmt(scale) + "*ind(W[0]+" + fmt(shift) + ")", model.m, model.n);
        return Claim::make(name, p);
    }
    if (name == "digital_wperp") {
        allow({"scale"});
        return Claim::make(name, Payoff::parse(fmt(get("scale", 1.0)) + "*ind(Wp[0])", model.m, model.n));
    }
    if (name == "smooth_mixed") {
        allow({"scale"});
        const double s = get("scale", 1.0);
        return Claim::make(name, Payoff::parse(fmt(s) + "*(0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0]))", model.m, model.n));
    }
    if (name == "custom") {
        allow({});
        if (expr.empty()) throw std::invalid_argument("claim custom: missing expression");
        return Claim::make(name, Payoff::parse(expr, model.m, model.n));
    }
    throw std::invalid_argument("unknown claim '" + name +
                                "' (expected constant, digital_w, digital_wperp, smooth_mixed, custom)");
}

Admissibility check_admissible(const Claim& claim, const QGammaParams& params) {
    Admissibility a;
    const LambdaDomain dom = LambdaDomain::of(params);
    if (!dom.contains(claim.lo) || !dom.contains(claim.hi)) {
        std::ostringstream os;
        os.precision(17);
        os << "claim bounds [" << claim.lo << ", " << claim.hi << "] leave Lambda = (" << dom.lower << ", "
           << dom.upper << ") for q=" << params.q << ", gamma=" << params.gamma;
        a.reason = os.str();
        return a;
    }
    try {
        a.m1 = q_exp(-params.gamma * claim.hi, params.q);
        a.m2 = q_exp(-params.gamma * claim.lo, params.q);
    } catch (const DomainError& e) {
        a.reason = e.what();
        return a;
    }
    a.ok = a.m1 > 0.0 && std::isfinite(a.m2) && a.m1 <= a.m2;
    if (!a.ok) a.reason = "q_exp(-gamma xi) is not bounded away from 0 and infinity";
    return a;
}

}  // namespace tsallis
