#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "report.hpp"
#include "tsallis/entropy.hpp"
#include "tsallis/parallel.hpp"
#include "tsallis/stats.hpp"

namespace tsallis::app {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

fs::path output_path(const RunOptions& opt, const std::string& name) {
    const fs::path p(name);
    return p.is_absolute() ? p : fs::path(opt.out_dir) / p;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

int finish(Json report, bool pass, const std::vector<std::string>& warnings, const ScenarioConfig& cfg,
           const RunOptions& opt, Clock::time_point start, std::ostream& log) {
    Json out;
    out["command"] = opt.command;
    out["setup"] = setup_json(cfg.setup);
    for (auto& [k, v] : report.items()) out[k] = v;
    out["warnings"] = warnings;
    out["pass"] = pass;
    write_file(output_path(opt, cfg.outputs.report), out.dump(2) + "\n");

    Json meta;
    meta["command"] = opt.command;
    meta["config"] = cfg.source;
    meta["finished_utc"] = utc_now();
    meta["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
    meta["threads"] = thread_count();
    meta["version"] = "0.1.0";
    write_file(output_path(opt, "metadata.json"), meta.dump(2) + "\n");

    for (const auto& w : warnings) log << (opt.strict ? "error: " : "warning: ") << w << '\n';
    log << opt.command << ": " << (pass ? "all checks passed" : "some checks FAILED") << " -> "
        << output_path(opt, cfg.outputs.report).string() << '\n';
    if (opt.strict && !warnings.empty()) return kExitError;
    return pass ? kExitPass : kExitCheckFailed;
}

bool all_pass(const std::vector<Check>& c) {
    return std::all_of(c.begin(), c.end(), [](const Check& k) { return k.pass; });
}

void log_failures(const std::vector<Check>& checks, std::ostream& log) {
    for (const auto& c : checks)
        if (!c.pass)
            log << "  FAIL " << c.name << ": " << num(c.lhs) << ' ' << c.relation << ' ' << num(c.rhs)
                << " (tol " << num(c.tol) << ")\n";
}

}  // namespace

int run_price(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const auto start = Clock::now();
    const PricingEngine eng(cfg.setup);
    const Claim claim = cfg.make_claim();
    const PriceReport r = eng.price(claim, cfg.params());
    log_failures(r.checks, log);
    log << "F0 = " << num(r.F0.value) << " (" << r.F0.scheme << ", tol " << num(r.F0.tolerance()) << "), CE0 = "
        << num(r.CE0.value) << ", riskneutral0 = " << num(r.riskneutral0.value) << '\n';
    std::ostringstream csv;
    write_price_csv(csv, r);
    write_file(output_path(opt, cfg.outputs.table), csv.str());
    if (!cfg.outputs.surface.empty()) {
        const BSDESolution s = eng.solve_field(claim, cfg.params());
        if (!s.pde) throw std::runtime_error("surface export needs the PDE scheme (m = n = 1)");
        std::ostringstream os;
        s.pde->write_csv(os, cfg.outputs.surface_stride);
        write_file(output_path(opt, cfg.outputs.surface), os.str());
    }
    return finish(Json{{"report", to_json(r)}}, r.pass(), r.warnings, cfg, opt, start, log);
}

int run_entropy(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const auto start = Clock::now();
    const auto& st = cfg.setup;
    const auto& mk = st.model;
    const PathEnsemble ens = simulate(mk, TimeGrid::graded(mk.T, st.steps, st.grading), st.paths, st.seed);
    std::vector<EntropyMeasure> measures = cfg.entropy.measures;
    if (measures.empty()) measures.push_back({"alpha0", std::vector<double>(mk.n, 0.0)});

    std::vector<EntropyEstimate> rows;
    std::vector<Check> checks;
    Json kl_reports = Json::array(), sub_reports = Json::array();
    for (const auto& em : measures) {
        const MeasureSpec ms = MeasureSpec::constant(em.label, em.alpha);
        std::optional<double> c;
        if (mk.lambda.is_constant()) {
            double s = 0.0;
            for (double l : mk.lambda.level()) s += l * l;
            for (double a : em.alpha) s += a * a;
            c = s;
        }
        const DensityPaths dens = density_vs_p(ms, mk, ens, cfg.entropy.keep_every);
        for (double q : cfg.entropy.qs) {
            const EntropyEstimate def = tsallis_definitional(dens, q);
            const EntropyEstimate integ = tsallis_integral(mk, ens, ms, q);
            rows.push_back(def);
            rows.push_back(integ);
            const std::string tag = em.label + ":q=" + num(q);
            if (c) {
                const double exact = tsallis_closed_form(q, *c, mk.T);
                checks.push_back(make_check("definitional_vs_closed_form:" + tag, def.value, "==", exact, 4.0 * def.se));
                checks.push_back(make_check("integral_vs_closed_form:" + tag, integ.value, "==", exact, 4.0 * integ.se));
            }
            checks.push_back(make_check("definitional_vs_integral:" + tag, def.value, "==", integ.value,
                                        4.0 * combined_se(def.se, integ.se)));
        }
        if (cfg.entropy.kl_delta) {
            const KlLimitReport kl = kl_limit_check(mk, ens, ms, *cfg.entropy.kl_delta, c);
            rows.push_back(kl.kl);
            rows.push_back(kl.below);
            rows.push_back(kl.above);
            const double h1 = kl.kl_exact ? *kl.kl_exact : kl.kl.value;
            checks.push_back(make_check("kl_bracket_lower:" + em.label, kl.below.value - 4.0 * kl.below.se, "<=", h1, 0.0));
            checks.push_back(make_check("kl_bracket_upper:" + em.label, h1, "<=", kl.above.value + 4.0 * kl.above.se, 0.0));
            Json j{{"measure", em.label},
                   {"delta", kl.delta},
                   {"kl", to_json(kl.kl)},
                   {"below", to_json(kl.below)},
                   {"above", to_json(kl.above)},
                   {"slope", kl.slope},
                   {"bracket", kl.bracket}};
            if (kl.kl_exact) {
                j["kl_exact"] = *kl.kl_exact;
                j["below_exact"] = *kl.below_exact;
                j["above_exact"] = *kl.above_exact;
                j["closed_form_ok"] = kl.closed_form_ok;
                checks.push_back(make_check("kl_closed_forms:" + em.label, kl.closed_form_ok ? 1.0 : 0.0, "==", 1.0, 0.0));
            }
            kl_reports.push_back(j);
        }
        for (double f : cfg.entropy.submartingale_times) {
            const std::size_t k = ens.grid().index_of(f * mk.T);
            for (double q : cfg.entropy.qs) {
                const SubmartingaleReport s =
                    submartingale_check(mk, ens, ms, q, k, cfg.entropy.inner, cfg.entropy.outer);
                const std::string tag = em.label + ":q=" + num(q) + ":t=" + num(ens.grid()[k]);
                checks.push_back(make_check("submartingale_violation_fraction:" + tag, s.fraction, "<=", 0.01, 0.0));
                checks.back().relation = "<";
                checks.back().pass = s.pass;
                sub_reports.push_back({{"measure", em.label},
                                       {"q", q},
                                       {"t", ens.grid()[k]},
                                       {"paths", s.paths},
                                       {"violations", s.violations},
                                       {"fraction", s.fraction},
                                       {"pass", s.pass}});
            }
        }
    }
    std::ostringstream csv;
    write_entropy_csv(csv, rows);
    write_file(output_path(opt, cfg.outputs.table), csv.str());
    log_failures(checks, log);

    Json est = Json::array();
    for (const auto& r : rows) est.push_back(to_json(r));
    Json report{{"estimates", est}, {"kl_limit", kl_reports}, {"submartingale", sub_reports}, {"checks", to_json(checks)}};
    return finish(report, all_pass(checks), {}, cfg, opt, start, log);
}

int run_dual(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const auto start = Clock::now();
    const PricingEngine eng(cfg.setup);
    const Claim claim = cfg.make_claim();
    PriceReport r = eng.price(claim, cfg.params());
    eng.add_duals(r, claim, cfg.params(), cfg.dual_grids);
    std::ostringstream csv;
    write_dual_csv(csv, r.duals);
    write_file(output_path(opt, cfg.outputs.table), csv.str());
    log_failures(r.checks, log);
    for (const auto& d : r.duals)
        if (!d.pass)
            log << "  FAIL " << d.problem << ' ' << d.candidate << ": gap " << num(d.gap) << " (allowance "
                << num(d.allowance) << ")\n";
    return finish(Json{{"report", to_json(r)}}, r.pass(), r.warnings, cfg, opt, start, log);
}

int run_sweep(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const auto start = Clock::now();
    const PricingEngine eng(cfg.setup);
    const Claim claim = cfg.make_claim();
    SweepReport r = eng.gamma_sweep(claim, cfg.q, cfg.sweep.gammas);
    std::vector<Check> scaling;
    std::vector<std::string> warnings;
    for (double k : cfg.sweep.kappas) {
        const Claim scaled = claim.affine(k, 0.0, claim.id + "_scaled");
        if (!check_admissible(scaled, cfg.params()).ok) {
            warnings.push_back("scaling identity skipped for kappa = " + num(k) + ": kappa xi not admissible");
            continue;
        }
        scaling.push_back(eng.scaling_identity(claim, k, cfg.params()));
    }
    std::ostringstream csv;
    write_sweep_csv(csv, r);
    write_file(output_path(opt, cfg.outputs.table), csv.str());
    log_failures(r.checks, log);
    log_failures(scaling, log);
    const bool pass = r.pass() && all_pass(scaling);
    return finish(Json{{"sweep", to_json(r)}, {"scaling", to_json(scaling)}}, pass, warnings, cfg, opt, start, log);
}

int run_properties(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const auto start = Clock::now();
    const PricingEngine eng(cfg.setup);
    const PropertyReport props = eng.property_suite(cfg.params());
    const BoundsReport bounds = eng.bounds_report(default_battery(cfg.setup.model), cfg.params());
    std::vector<Check> all = props.checks;
    all.insert(all.end(), bounds.checks.begin(), bounds.checks.end());
    std::ostringstream csv;
    write_check_csv(csv, all);
    write_file(output_path(opt, cfg.outputs.table), csv.str());
    log_failures(all, log);
    std::vector<std::string> warnings;
    for (const auto& c : bounds.claims)
        for (const auto& w : c.warnings) warnings.push_back(c.claim_id + ": " + w);
    return finish(Json{{"properties", to_json(props.checks)}, {"bounds", to_json(bounds)}},
                  props.pass() && bounds.pass(), warnings, cfg, opt, start, log);
}

int run_command(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
    fs::create_directories(opt.out_dir);
    if (opt.command == "price") return run_price(cfg, opt, log);
    if (opt.command == "entropy") return run_entropy(cfg, opt, log);
    if (opt.command == "dual") return run_dual(cfg, opt, log);
    if (opt.command == "sweep") return run_sweep(cfg, opt, log);
    if (opt.command == "properties") return run_properties(cfg, opt, log);
    throw std::invalid_argument("unknown command '" + opt.command + "'");
}

}  // namespace tsallis::app
