#include "report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace tsallis::app {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// JSON has no infinities; they only arise from empty minima.
Json jnum(double v) {
    if (!std::isfinite(v)) return Json(nullptr);
    return Json(v);
}

}  // namespace

Json to_json(const Quote& q) {
    Json j;
    j["value"] = jnum(q.value);
    j["stderr"] = jnum(q.se);
    j["scheme_tol"] = jnum(q.scheme_tol);
    j["tolerance"] = jnum(q.tolerance());
    j["scheme"] = q.scheme;
    return j;
}

Json to_json(const Check& c) {
    Json j;
    j["name"] = c.name;
    j["relation"] = c.relation;
    j["lhs"] = jnum(c.lhs);
    j["rhs"] = jnum(c.rhs);
    j["tol"] = jnum(c.tol);
    j["pass"] = c.pass;
    return j;
}

Json to_json(const std::vector<Check>& checks) {
    Json a = Json::array();
    for (const auto& c : checks) a.push_back(to_json(c));
    return a;
}

Json to_json(const DualRecord& d) {
    Json j;
    j["problem"] = d.problem;
    j["candidate"] = d.candidate;
    j["optimizer"] = d.optimizer;
    j["value"] = jnum(d.value);
    j["stderr"] = jnum(d.se);
    if (d.problem != "problem2") {
        j["distorted"] = jnum(d.distorted);
        j["distorted_stderr"] = jnum(d.distorted_se);
    }
    j["reference"] = jnum(d.reference);
    j["reference_stderr"] = jnum(d.reference_se);
    j["gap"] = jnum(d.gap);
    j["allowance"] = jnum(d.allowance);
    j["pass"] = d.pass;
    return j;
}

Json to_json(const PriceReport& r) {
    Json j;
    j["claim"] = {{"id", r.claim_id}, {"payoff", r.payoff}, {"hedge", r.hedge}, {"lo", jnum(r.lo)}, {"hi", jnum(r.hi)}};
    j["params"] = {{"q", jnum(r.q)}, {"gamma", jnum(r.gamma)}};
    Json prices;
    prices["F0"] = to_json(r.F0);
    prices["seller"] = r.seller ? to_json(*r.seller) : Json(nullptr);
    prices["CE0"] = to_json(r.CE0);
    prices["riskneutral0"] = to_json(r.riskneutral0);
    j["prices"] = prices;
    j["bounds"] = to_json(r.checks);
    Json duals = Json::array();
    for (const auto& d : r.duals) duals.push_back(to_json(d));
    j["duals"] = duals;
    if (r.optimizers) {
        const auto& o = *r.optimizers;
        j["optimizers"] = {{"alpha_star0", jnum(o.alpha_star0)},
                           {"theta_star0", jnum(o.theta_star0)},
                           {"qxi_martingale_estimate", jnum(o.martingale_estimate)},
                           {"qxi_martingale_stderr", jnum(o.martingale_se)},
                           {"qxi_martingale_pass", o.martingale_pass}};
    } else {
        j["optimizers"] = nullptr;
    }
    j["diagnostics"] = {{"warnings", r.warnings}};
    j["pass"] = r.pass();
    return j;
}

Json to_json(const SweepReport& r) {
    Json j;
    j["claim"] = r.claim_id;
    j["q"] = jnum(r.q);
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"gamma", jnum(row.gamma)},
                        {"F0", to_json(row.F0)},
                        {"CE0", to_json(row.CE0)},
                        {"riskneutral0", to_json(row.riskneutral0)}});
    j["rows"] = rows;
    j["distorted_infimum"] = jnum(r.distorted_infimum);
    j["checks"] = to_json(r.checks);
    j["pass"] = r.pass();
    return j;
}

Json to_json(const BoundsReport& r) {
    Json j;
    Json claims = Json::array();
    for (const auto& c : r.claims) claims.push_back(to_json(c));
    j["claims"] = claims;
    j["checks"] = to_json(r.checks);
    j["pass"] = r.pass();
    return j;
}

Json to_json(const EntropyEstimate& e) {
    Json j;
    j["q"] = jnum(e.q);
    j["measure"] = e.measure;
    j["base"] = e.base;
    j["route"] = route_name(e.route);
    j["estimate"] = jnum(e.value);
    j["stderr"] = jnum(e.se);
    if (e.route == EntropyRoute::Definitional) {
        j["moment_form"] = jnum(e.moment_form);
        j["form_gap"] = jnum(e.form_gap);
    }
    return j;
}

Json setup_json(const PricingSetup& s) {
    Json j;
    const auto& mk = s.model;
    Json lam;
    lam["kind"] = mk.lambda.is_constant() ? "constant" : "tanh";
    lam["level"] = mk.lambda.level();
    if (!mk.lambda.is_constant()) lam["slope"] = mk.lambda.slope();
    j["market"] = {{"m", mk.m}, {"n", mk.n}, {"T", jnum(mk.T)}, {"S0", mk.S0}, {"lambda", lam}};
    j["numerics"] = {{"paths", s.paths},
                     {"steps", s.steps},
                     {"grading", jnum(s.grading)},
                     {"seed", s.seed},
                     {"scheme", scheme_choice_name(s.scheme)},
                     {"pde",
                      {{"points", s.pde.points},
                       {"steps", s.pde.steps},
                       {"half_width", jnum(s.pde.half_width)},
                       {"grading", jnum(s.pde.grading)},
                       {"picard_tol", jnum(s.pde.picard_tol)},
                       {"picard_max", s.pde.picard_max},
                       {"smoothing_cells", jnum(s.pde.smoothing_cells)}}},
                     {"lsmc",
                      {{"basis", basis_name(s.lsmc.basis)},
                       {"degree", s.lsmc.degree},
                       {"z_degree", s.lsmc.z_degree},
                       {"paths_per_cell", s.lsmc.paths_per_cell},
                       {"ridge", jnum(s.lsmc.ridge)},
                       {"frame", frame_name(s.lsmc.frame)}}},
                     {"grid", {{"lo", jnum(s.grid_lo)}, {"hi", jnum(s.grid_hi)}, {"points", s.grid_points}}}};
    return j;
}

void write_sweep_csv(std::ostream& os, const SweepReport& r) {
    os << "gamma,F0,CE0,riskneutral0\n";
    for (const auto& row : r.rows)
        os << num(row.gamma) << ',' << num(row.F0.value) << ',' << num(row.CE0.value) << ','
           << num(row.riskneutral0.value) << '\n';
}

void write_price_csv(std::ostream& os, const PriceReport& r) {
    os << "quantity,value,stderr,scheme_tol,scheme\n";
    auto row = [&](const char* name, const Quote& q) {
        os << name << ',' << num(q.value) << ',' << num(q.se) << ',' << num(q.scheme_tol) << ',' << q.scheme << '\n';
    };
    row("F0", r.F0);
    if (r.seller) row("seller", *r.seller);
    row("CE0", r.CE0);
    row("riskneutral0", r.riskneutral0);
}

void write_dual_csv(std::ostream& os, const std::vector<DualRecord>& duals) {
    os << "problem,candidate,optimizer,value,stderr,reference,gap,allowance,pass\n";
    for (const auto& d : duals)
        os << d.problem << ",\"" << d.candidate << "\"," << (d.optimizer ? 1 : 0) << ',' << num(d.value) << ','
           << num(d.se) << ',' << num(d.reference) << ',' << num(d.gap) << ',' << num(d.allowance) << ','
           << (d.pass ? 1 : 0) << '\n';
}

void write_check_csv(std::ostream& os, const std::vector<Check>& checks) {
    os << "name,relation,lhs,rhs,tol,pass\n";
    for (const auto& c : checks)
        os << '"' << c.name << "\"," << c.relation << ',' << num(c.lhs) << ',' << num(c.rhs) << ',' << num(c.tol)
           << ',' << (c.pass ? 1 : 0) << '\n';
}

}  // namespace tsallis::app
