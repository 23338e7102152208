#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <ietlab/ietlab.hpp>
#include <ietlab/io.hpp>

using namespace ietlab;
using io::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything that determines a run's output.
struct RunConfig {
    std::string command;
    mpfr_prec_t bits = kDefaultBits;
    std::uint64_t seed = 0;
    std::string format;
    unsigned threads = 1;
    int digits = 0;
    json inputs = json::object();
    json params = json::object();

    json to_json() const {
        return {{"command", command}, {"precision_bits", bits}, {"seed", seed},   {"format", format},
                {"threads", threads}, {"digits", digits},       {"inputs", inputs}, {"params", params}};
    }
    PrecisionContext ctx() const { return PrecisionContext(bits); }
};

std::string fmt(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.18Lg", v);
    return buf;
}

json fmt_vec(const std::vector<long double>& v) {
    json out = json::array();
    for (auto x : v) out.push_back(fmt(x));
    return out;
}

std::string real_str(const RunConfig& cfg, const Real& x) { return x.str(cfg.digits); }

json real_json(const RunConfig& cfg, const RealVector& v) { return io::to_json(v, cfg.digits); }

json vectors_json(const RunConfig& cfg, const std::vector<RealVector>& vs) {
    json out = json::array();
    for (const auto& v : vs) out.push_back(real_json(cfg, v));
    return out;
}

void emit_json(const RunConfig& cfg, json body) {
    json out;
    out["run_config"] = cfg.to_json();
    for (auto& [k, v] : body.items()) out[k] = v;
    std::cout << out.dump(2) << "\n";
}

void emit_csv(const RunConfig& cfg, const std::vector<std::string>& notes, const std::string& header,
              const std::vector<std::string>& rows) {
    std::cout << "# run_config " << cfg.to_json().dump() << "\n";
    for (const auto& n : notes) std::cout << "# " << n << "\n";
    std::cout << header << "\n";
    for (const auto& r : rows) std::cout << r << "\n";
}

void require_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
    for (const char* f : allowed)
        if (cfg.format == f) return;
    throw UsageError("format '" + cfg.format + "' is not available for '" + cfg.command + "'");
}

json load(RunConfig& cfg, const std::string& role, const std::string& path) {
    cfg.inputs[role] = path;
    return io::read_json_file(path);
}

Iet load_iet(RunConfig& cfg, const std::string& path) {
    return io::iet_from_spec(io::iet_spec_from_json(load(cfg, "iet", path), cfg.bits), cfg.ctx());
}

PeriodicIet load_periodic(RunConfig& cfg, const std::string& path, std::optional<mpfr_prec_t> bits = std::nullopt) {
    const mpfr_prec_t b = bits.value_or(cfg.bits);
    return io::periodic_from_spec(io::iet_spec_from_json(load(cfg, "iet", path), b), PrecisionContext(b));
}

Cocycle load_cocycle(RunConfig& cfg, const std::string& path, const Iet& t, bool center,
                     std::optional<mpfr_prec_t> bits = std::nullopt) {
    Cocycle c = io::cocycle_from_json(load(cfg, "cocycle", path), bits.value_or(cfg.bits));
    if (c.d() != t.d()) fail(ErrorKind::DimensionError, "cocycle has " + std::to_string(c.d()) + " letters, IET has " +
                                                            std::to_string(t.d()));
    c.validate_on(t);
    return center ? c.with_zero_mean(t) : c;
}

// ---- rauzy ------------------------------------------------------------------

struct RauzyOpts {
    std::string iet;
    std::size_t steps = 20;
    std::size_t period_search = 0;
};

void run_rauzy(RunConfig& cfg, const RauzyOpts& o) {
    require_format(cfg, {"json"});
    cfg.params = {{"steps", o.steps}, {"period_search", o.period_search}};
    const Iet t = load_iet(cfg, o.iet);
    InductionResult r = iterate_induction(t, o.steps);
    json steps = json::array();
    for (const auto& s : r.steps)
        steps.push_back({{"eps", s.eps}, {"winner", s.winner + 1}, {"loser", s.loser + 1}, {"pair", io::to_json(s.new_pair)}});
    json body = {{"start", {{"pair", io::to_json(t.pair())}, {"lambda", real_json(cfg, t.lambda())}}},
                 {"steps", steps},
                 {"end", {{"pair", io::to_json(r.iet.pair())}, {"lambda", real_json(cfg, r.iet.lambda())}}},
                 {"theta", io::to_json(r.theta)}};
    if (o.period_search) {
        auto per = detect_period(t, o.period_search, cfg.ctx().eps());
        if (per)
            body["period"] = {{"steps", per->steps}, {"loop", per->loop}, {"matrix", io::to_json(per->matrix)},
                              {"ratio", real_str(cfg, per->ratio)}};
        else
            body["period"] = nullptr;
    }
    emit_json(cfg, std::move(body));
}

// ---- build ------------------------------------------------------------------

void run_build(RunConfig& cfg, const std::string& path) {
    require_format(cfg, {"json"});
    const PeriodicIet p = load_periodic(cfg, path);
    const SingularityData s = singularity_data(p.pair);
    emit_json(cfg, {{"pair", io::to_json(p.pair)},
                    {"loop", p.loop_word},
                    {"loop_verified", p.loop_verified},
                    {"base_period", p.base_period},
                    {"loop_matrix", io::to_json(p.loop_matrix)},
                    {"multiplier", p.multiplier},
                    {"matrix", io::to_json(p.matrix)},
                    {"tower_multiplier", p.tower_multiplier},
                    {"positivity_power", p.positivity_power},
                    {"xi_order", p.xi_order},
                    {"nesting_power", p.nesting_power},
                    {"rho", real_str(cfg, p.rho)},
                    {"rho_enclosure", {real_str(cfg, p.rho_lo), real_str(cfg, p.rho_hi)}},
                    {"loop_rho", real_str(cfg, p.loop_rho)},
                    {"lambda", real_json(cfg, p.lambda)},
                    {"kappa", s.kappa},
                    {"genus", s.genus}});
}

// ---- spectrum ---------------------------------------------------------------

const char* class_name(ModulusClass c) {
    switch (c) {
    case ModulusClass::Stable: return "stable";
    case ModulusClass::Central: return "central";
    case ModulusClass::Unstable: return "unstable";
    }
    return "?";
}

void run_spectrum(RunConfig& cfg, const std::string& path) {
    require_format(cfg, {"json"});
    const json j = load(cfg, "matrix", path);
    IntMatrix a;
    std::optional<PermutationPair> pair;
    if (j.is_array()) {
        a = io::matrix_from_json(j);
    } else {
        a = io::matrix_from_json(j.contains("periodic_matrix") ? j.at("periodic_matrix") : j.at("matrix"));
        if (j.contains("pair")) pair = io::pair_from_json(j.at("pair"));
    }
    if (pair && pair->d() != a.rows()) fail(ErrorKind::DimensionError, "pair and matrix sizes differ");

    const LyapunovSpectrum spec = lyapunov_spectrum(a, cfg.ctx());
    std::optional<SingularityData> sd;
    if (pair) sd = singularity_data(*pair);
    const Splitting sp = splitting(a, cfg.ctx(), sd ? std::optional<int>(sd->kappa) : std::nullopt);

    json eig = json::array();
    for (const auto& e : spec.eigenvalues)
        eig.push_back({{"re", real_str(cfg, e.z.re)},
                       {"im", real_str(cfg, e.z.im)},
                       {"radius", e.radius.str(6)},
                       {"multiplicity", e.multiplicity},
                       {"class", class_name(e.cls)},
                       {"exact_unit", e.exact_unit}});
    json exps = json::array();
    for (std::size_t i = 0; i < spec.exponents.size(); ++i)
        exps.push_back({{"theta", real_str(cfg, spec.exponents[i])}, {"radius", spec.radii[i].str(6)}});
    json cp = json::array();
    for (const auto& c : spec.charpoly.coeffs()) cp.push_back(c.get_str());

    json body = {{"matrix", io::to_json(a)},
                 {"charpoly", cp},
                 {"exponents", exps},
                 {"theta2_over_theta1", real_str(cfg, spec.ratio())},
                 {"eigenvalues", eig},
                 {"zero_multiplicity", spec.zero_multiplicity},
                 {"M", spec.jordan_max},
                 {"bits_used", spec.bits_used}};
    if (sd) {
        body["kappa"] = sd->kappa;
        body["genus"] = sd->genus;
    } else {
        body["kappa"] = nullptr;
        body["genus"] = nullptr;
    }
    body["splitting"] = {{"dims", {{"stable", sp.stable.size()}, {"central", sp.central.size()}, {"unstable", sp.unstable.size()}}},
                         {"non_degenerate", sp.non_degenerate},
                         {"theta_plus", real_str(cfg, sp.theta_plus)},
                         {"stable", vectors_json(cfg, sp.stable)},
                         {"central", vectors_json(cfg, sp.central)},
                         {"unstable", vectors_json(cfg, sp.unstable)}};
    emit_json(cfg, std::move(body));
}

// ---- birkhoff / deviation ---------------------------------------------------

struct SumOpts {
    std::string iet, cocycle;
    std::uint64_t n = 1000;
    std::uint64_t stride = 0;
    std::size_t samples = 16;
    long double log_power = 0;
    bool center = false;
};

/// Sup over sample points of ‖φ^(n)‖ on the grid stride, 2·stride, …, n.
std::pair<std::vector<std::uint64_t>, std::vector<long double>> sup_sums(const Cocycle& phi, const Iet& t, std::uint64_t n,
                                                                         std::uint64_t stride, std::size_t samples,
                                                                         std::uint64_t seed, std::size_t& aborted) {
    std::vector<std::uint64_t> grid;
    for (std::uint64_t k = stride; k <= n; k += stride) grid.push_back(k);
    if (grid.empty() || grid.back() != n) grid.push_back(n);
    std::vector<long double> sup(grid.size(), 0);
    const FastIet f(t);
    const FastCocycle fc(phi, t, f);
    for (const auto& x : sample_points(t, samples, seed)) {
        std::vector<long double> local(grid.size(), 0);
        try {
            auto acc = fc.make_accumulator();
            u128 y = f.to_fixed(x, t.length());
            std::size_t next = 0;
            for (std::uint64_t k = 0; k < n; ++k) {
                u128 here = y;
                fc.add(acc, f.step_checked(y, k), here);
                if (next < grid.size() && k + 1 == grid[next]) local[next++] = sup_abs(fc.value(acc));
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NearBreakpoint) throw;
            ++aborted;
            continue;
        }
        for (std::size_t i = 0; i < grid.size(); ++i) sup[i] = std::max(sup[i], local[i]);
    }
    return {grid, sup};
}

void emit_series(const RunConfig& cfg, const std::vector<std::uint64_t>& n, const std::vector<long double>& sup,
                 std::vector<std::string> notes, json extra) {
    if (cfg.format == "csv") {
        std::vector<std::string> rows;
        for (std::size_t i = 0; i < n.size(); ++i) rows.push_back(std::to_string(n[i]) + "," + fmt(sup[i]));
        emit_csv(cfg, notes, "n,sup_norm", rows);
        return;
    }
    extra["n"] = n;
    extra["sup_norm"] = fmt_vec(sup);
    emit_json(cfg, std::move(extra));
}

void run_birkhoff(RunConfig& cfg, const SumOpts& o) {
    require_format(cfg, {"csv", "json"});
    const std::uint64_t stride = o.stride ? o.stride : std::max<std::uint64_t>(1, o.n / 1000);
    cfg.params = {{"n", o.n}, {"stride", stride}, {"samples", o.samples}, {"center", o.center}};
    const Iet t = load_iet(cfg, o.iet);
    const Cocycle phi = load_cocycle(cfg, o.cocycle, t, o.center);
    std::size_t aborted = 0;
    auto [grid, sup] = sup_sums(phi, t, o.n, stride, o.samples, cfg.seed, aborted);
    emit_series(cfg, grid, sup, {"aborted_samples=" + std::to_string(aborted)}, {{"aborted_samples", aborted}});
}

void run_deviation(RunConfig& cfg, const SumOpts& o) {
    require_format(cfg, {"csv", "json"});
    cfg.params = {{"nmax", o.n}, {"samples", o.samples}, {"log_power", fmt(o.log_power)}, {"center", o.center}};
    const Iet t = load_iet(cfg, o.iet);
    const Cocycle phi = load_cocycle(cfg, o.cocycle, t, o.center);
    const DeviationProfile prof = deviation_profile(phi, t, o.n, o.samples, o.log_power, cfg.seed);
    emit_series(cfg, prof.n, prof.sup,
                {"exponent=" + fmt(prof.exponent), "corrected_exponent=" + fmt(prof.corrected_exponent),
                 "aborted_samples=" + std::to_string(prof.aborted)},
                {{"exponent", fmt(prof.exponent)},
                 {"corrected_exponent", fmt(prof.corrected_exponent)},
                 {"aborted_samples", prof.aborted}});
}

// ---- correct ----------------------------------------------------------------

struct CorrectOpts {
    std::string iet, cocycle;
    std::optional<std::size_t> depth;
    std::size_t kmax = 12;
    mpfr_prec_t target_bits = 64;
    bool center = false;
};

json growth_json(const RunConfig& cfg, const std::vector<Real>& sup) {
    json out = json::array();
    for (std::size_t k = 0; k < sup.size(); ++k) out.push_back({{"k", k}, {"sup", real_str(cfg, sup[k])}});
    return out;
}

void run_correct(RunConfig& cfg, const CorrectOpts& o) {
    require_format(cfg, {"json"});
    cfg.params = {{"depth", o.depth ? json(*o.depth) : json(nullptr)},
                  {"kmax", o.kmax},
                  {"target_bits", o.target_bits},
                  {"center", o.center}};
    PeriodicIet p = load_periodic(cfg, o.iet);
    Cocycle phi = load_cocycle(cfg, o.cocycle, p.iet(), o.center);

    mpfr_prec_t work = cfg.bits;
    std::size_t depth = 0;
    if (o.depth) {
        depth = *o.depth;
        work = std::max(work, correction_bits(p, o.target_bits, std::max(depth, o.kmax)));
    } else {
        CorrectionPlan plan = plan_correction(phi, p, o.target_bits);
        depth = plan.depth;
        work = std::max({work, plan.bits, correction_bits(p, o.target_bits, o.kmax)});
    }
    if (work != p.ctx.bits) {
        p = load_periodic(cfg, o.iet, work);
        phi = load_cocycle(cfg, o.cocycle, p.iet(), o.center, work);
    }
    const Splitting sp = splitting(p.tower_matrix, p.ctx, singularity_data(p.pair).kappa);
    const CorrectionResult res = correct_bv(phi, p, sp, depth, o.kmax);
    const GrowthReport before = growth_check(phi, p, o.kmax);
    const GrowthReport after = growth_check(res.corrected, p, o.kmax);

    json h = json::array();
    for (const auto& v : res.h) h.push_back(real_json(cfg, v));
    emit_json(cfg, {{"working_bits", work},
                    {"depth", res.depth},
                    {"h", h},
                    {"tail_bound", res.tail_bound.str(6)},
                    {"rounding_bound", res.rounding_bound.str(6)},
                    {"corrected", io::to_json(res.corrected, cfg.digits)},
                    {"growth", growth_json(cfg, after.sup)},
                    {"growth_uncorrected", growth_json(cfg, before.sup)},
                    {"bounded", after.bounded},
                    {"per_step_growth_uncorrected", fmt(before.per_step_growth)}});
}

// ---- essential-values -------------------------------------------------------

struct EssentialOpts {
    std::string iet, cocycle;
    std::size_t levels = 3;
    long double tol = 1e-9L;
    bool center = false;
};

void run_essential(RunConfig& cfg, const EssentialOpts& o) {
    require_format(cfg, {"json", "csv"});
    cfg.params = {{"levels", o.levels}, {"tol", fmt(o.tol)}, {"center", o.center}};
    const PeriodicIet p = load_periodic(cfg, o.iet);
    const Cocycle phi = load_cocycle(cfg, o.cocycle, p.iet(), o.center);
    const EssentialReport rep = essential_value_probe(phi, p, o.levels, o.tol);

    if (cfg.format == "csv") {
        std::vector<std::string> rows;
        for (const auto& c : rep.candidates)
            for (const auto& l : c.levels)
                rows.push_back(std::to_string(c.letter + 1) + "," + std::to_string(l.n) + "," + fmt(l.base_value[0]) + "," +
                               fmt(l.spread) + "," + fmt(l.measure));
        emit_csv(cfg, {}, "letter,n,value,spread,measure", rows);
        return;
    }
    json cands = json::array();
    for (const auto& c : rep.candidates) {
        json levels = json::array();
        for (const auto& l : c.levels)
            levels.push_back({{"n", l.n},
                              {"value", fmt_vec(l.base_value)},
                              {"spread", fmt(l.spread)},
                              {"measure", fmt(l.measure)},
                              {"constant", l.constant}});
        cands.push_back({{"letter", c.letter + 1},
                         {"levels", levels},
                         {"limit", fmt_vec(c.limit)},
                         {"converged", c.converged},
                         {"constant", c.constant}});
    }
    json fixed;
    try {
        const FixedSpaceBasis fb = fixed_space_basis(p);
        json vecs = json::array();
        for (const auto& v : fb.vectors) vecs.push_back(io::to_json(v));
        fixed = {{"k", fb.k}, {"vectors", vecs}, {"zero_mean", fb.zero_mean}, {"generates", fb.generates}};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyFixedSpace) throw;
        fixed = {{"k", 0}, {"vectors", json::array()}};
    }
    emit_json(cfg, {{"tolerance", fmt(rep.tolerance)}, {"candidates", cands}, {"fixed_space", fixed}});
}

// ---- classify ---------------------------------------------------------------

struct ClassifyOpts {
    std::string iet, cocycle, lattice;
    std::vector<std::string> vector;
    std::string lattice_tol = "1e-20";
};

void run_classify(RunConfig& cfg, const ClassifyOpts& o) {
    require_format(cfg, {"json"});
    cfg.params = {{"vector", o.vector}, {"lattice_tol", o.lattice_tol}};
    const PeriodicIet p = load_periodic(cfg, o.iet);
    const Iet t = p.iet();
    json body;
    if (!o.vector.empty() || !o.cocycle.empty()) {
        RealVector v;
        if (!o.vector.empty()) {
            for (const auto& s : o.vector) v.push_back(Real(s, cfg.bits));
        } else {
            const Cocycle c = load_cocycle(cfg, o.cocycle, t, false);
            if (c.kind != CocycleKind::Step || !c.extras.empty() || c.dim != 1)
                fail(ErrorKind::Unsupported, "classify needs a scalar step cocycle without extra discontinuities");
            for (const auto& x : c.constants) v.push_back(x[0]);
        }
        if (v.size() != p.d()) fail(ErrorKind::DimensionError, "vector needs one entry per letter");
        const Splitting sp = splitting(p.tower_matrix, p.ctx, singularity_data(p.pair).kappa);
        const CoboundaryVerdict cv = coboundary_classify(v, sp, p.lambda);
        body["classification"] = {{"class", to_string(cv.cls)},
                                  {"unstable_norm", cv.unstable_norm.str(6)},
                                  {"central_norm", cv.central_norm.str(6)},
                                  {"stable_norm", cv.stable_norm.str(6)}};
    }
    if (!o.lattice.empty()) {
        const json qs = load(cfg, "lattice", o.lattice);
        std::vector<LatticeQuery> queries;
        for (const auto& q : qs) {
            Cocycle c = io::cocycle_from_json(q.at("cocycle"), cfg.bits);
            c.validate_on(t);
            queries.push_back({q.value("label", ""), std::move(c), io::real_from_json(q.at("scale"), cfg.bits)});
        }
        const LatticeReport lr = lattice_containment(queries, Real(o.lattice_tol, cfg.bits));
        json checks = json::array();
        for (const auto& c : lr.checks)
            checks.push_back({{"label", c.label},
                              {"scale", real_str(cfg, c.scale)},
                              {"contained", c.contained},
                              {"max_deviation", c.max_deviation.str(6)}});
        body["lattice"] = {{"checks", checks}, {"trivial_intersection", lr.trivial_intersection}, {"conclusion", lr.conclusion}};
    }
    if (body.empty()) throw UsageError("classify needs --vector, --cocycle or --lattice");
    emit_json(cfg, std::move(body));
}

// ---- simulate ---------------------------------------------------------------

struct SimulateOpts {
    std::string iet, cocycle;
    std::uint64_t n = 100000;
    std::size_t samples = 32;
    std::vector<std::string> eps{"0.1", "1"};
    bool center = false;
};

void run_simulate(RunConfig& cfg, const SimulateOpts& o) {
    require_format(cfg, {"json", "csv"});
    cfg.params = {{"n", o.n}, {"samples", o.samples}, {"eps", o.eps}, {"center", o.center}};
    const Iet t = load_iet(cfg, o.iet);
    const Cocycle phi = load_cocycle(cfg, o.cocycle, t, o.center);
    std::vector<long double> eps;
    for (const auto& e : o.eps) {
        try {
            eps.push_back(std::stold(e));
        } catch (const std::exception&) {
            throw UsageError("--eps: '" + e + "' is not a number");
        }
    }
    const RecurrenceStats st = skew_simulate(t, phi, sample_points(t, o.samples, cfg.seed), o.n, eps, cfg.seed);

    if (cfg.format == "csv") {
        std::vector<std::string> rows;
        for (std::size_t b = 0; b < st.histogram.size(); ++b)
            rows.push_back(std::to_string(static_cast<int>(b) - 4) + "," + std::to_string(st.histogram[b]));
        emit_csv(cfg, {"histogram of log10 |phi^(N)(x)| over samples"}, "log10_lo,count", rows);
        return;
    }
    json hits = json::array();
    for (std::size_t e = 0; e < st.eps.size(); ++e) hits.push_back({{"eps", fmt(st.eps[e])}, {"hits", st.hits[e]}});
    emit_json(cfg, {{"samples", st.samples},
                    {"aborted", st.aborted},
                    {"checkpoints", st.checkpoints},
                    {"hits", hits},
                    {"min_norm", fmt_vec(st.min_norm)},
                    {"final_norm", fmt_vec(st.final_norm)},
                    {"histogram", st.histogram}});
}

// ---- rotations --------------------------------------------------------------

struct RotationOpts {
    std::string alpha = "golden";
    std::uint64_t qmax = 1000000;
    std::size_t samples = 1000;
    std::vector<std::string> cuts{"0", "0.5"};
    std::vector<std::string> values{"0.5", "-0.5"};
    long bound = 1000;
};

void run_rotations(RunConfig& cfg, const RotationOpts& o) {
    require_format(cfg, {"json", "csv"});
    cfg.params = {{"alpha", o.alpha}, {"qmax", o.qmax}, {"samples", o.samples},
                  {"cuts", o.cuts},   {"values", o.values}, {"bpq_bound", o.bound}};
    const PrecisionContext ctx = cfg.ctx();
    const Real alpha = o.alpha == "golden" ? (sqrt(ctx.num(5)) - 1L) / 2L : ctx.num(o.alpha);
    if (o.cuts.size() != o.values.size()) throw UsageError("--cuts and --values need the same length");
    std::vector<Real> cuts, vals;
    for (const auto& s : o.cuts) cuts.push_back(ctx.num(s));
    for (const auto& s : o.values) vals.push_back(ctx.num(s));
    const CircleStep phi = CircleStep::make(cuts, vals);
    const DenjoyKoksmaReport rep = denjoy_koksma_check(phi, alpha, o.qmax, o.samples, ctx);
    const ContinuedFraction cf = continued_fraction(alpha, rep.cf.a.size(), o.bound);

    if (cfg.format == "csv") {
        std::vector<std::string> rows;
        for (std::size_t i = 0; i < rep.q.size(); ++i) rows.push_back(std::to_string(rep.q[i]) + "," + fmt(rep.max_abs[i]));
        emit_csv(cfg, {"variation=" + phi.variation().str(20), "violations=" + std::to_string(rep.violations)},
                 "q,max_abs", rows);
        return;
    }
    json q = json::array();
    for (const auto& x : cf.q) q.push_back(x.get_str());
    emit_json(cfg, {{"alpha", real_str(cfg, alpha)},
                    {"partial_quotients", cf.a},
                    {"denominators", q},
                    {"bpq", cf.bpq},
                    {"max_quotient", cf.max_quotient},
                    {"variation", phi.variation().str(20)},
                    {"denjoy_koksma", {{"q", rep.q},
                                       {"max_abs", fmt_vec(rep.max_abs)},
                                       {"samples", rep.samples},
                                       {"aborted", rep.aborted},
                                       {"violations", rep.violations}}}});
}

// ---- repro ------------------------------------------------------------------

struct ReproOpts {
    std::string which = "all";
    std::string json_out;
    bool timings = false;
};

json report_json(const ReproReport& r, bool timings) {
    json entries = json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"name", e.name},
                           {"computed", e.computed},
                           {"reference", e.reference},
                           {"source", e.source},
                           {"abs_delta", fmt(e.abs_delta)},
                           {"rel_delta", fmt(e.rel_delta)},
                           {"tolerance", fmt(e.tolerance)},
                           {"pass", e.pass}});
    json out = {{"id", r.id}, {"pass", r.pass()}, {"entries", entries}};
    if (timings) out["seconds"] = fmt(r.seconds);
    return out;
}

std::string clip(const std::string& s, std::size_t w) { return s.size() <= w ? s : s.substr(0, w - 3) + "..."; }

int run_repro(RunConfig& cfg, const ReproOpts& o) {
    require_format(cfg, {"table", "json"});
    cfg.params = {{"case", o.which}};
    const PrecisionContext ctx = cfg.ctx();
    std::vector<std::function<ReproReport()>> jobs;
    if (o.which == "appendix-b" || o.which == "all")
        for (long n = 1; n <= 10; ++n) jobs.push_back([n, ctx] { return appendix_b(n, ctx); });
    if (o.which == "example-7-2" || o.which == "all") jobs.push_back([ctx] { return example_7_2(ctx); });
    if (o.which == "appendix-d" || o.which == "all") jobs.push_back([ctx] { return appendix_d(ctx); });

    std::vector<ReproReport> reports(jobs.size());
    const std::size_t width = std::max(1u, cfg.threads);
    for (std::size_t start = 0; start < jobs.size(); start += width) {
        std::vector<std::future<ReproReport>> batch;
        for (std::size_t i = start; i < std::min(jobs.size(), start + width); ++i)
            batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, jobs[i]));
        for (std::size_t i = 0; i < batch.size(); ++i) reports[start + i] = batch[i].get();
    }

    bool all = !reports.empty();
    json arr = json::array();
    for (const auto& r : reports) {
        all = all && r.pass();
        arr.push_back(report_json(r, o.timings));
    }
    json doc;
    doc["run_config"] = cfg.to_json();
    doc["pass"] = all;
    doc["reports"] = arr;
    if (!o.json_out.empty()) {
        std::ofstream f(o.json_out);
        if (!f) fail(ErrorKind::DomainError, "cannot write '" + o.json_out + "'");
        f << doc.dump(2) << "\n";
    }
    if (cfg.format == "json") {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "# run_config " << cfg.to_json().dump() << "\n";
        char line[512];
        for (const auto& r : reports) {
            std::snprintf(line, sizeof line, "== %s  [%s, %.3f s]\n", r.id.c_str(), r.pass() ? "PASS" : "FAIL", r.seconds);
            std::cout << line;
            for (const auto& e : r.entries) {
                std::snprintf(line, sizeof line, "  %-4s %-44s %-26s %-26s %-11s %.1e\n", e.pass ? "ok" : "FAIL",
                              clip(e.name, 44).c_str(), clip(e.computed, 26).c_str(), clip(e.reference, 26).c_str(),
                              e.source.c_str(), e.rel_delta);
                std::cout << line;
            }
        }
        std::size_t passed = 0;
        for (const auto& r : reports) passed += r.pass();
        std::cout << "summary: " << passed << "/" << reports.size() << " reports pass\n";
    }
    if (!all) {
        std::cerr << "ietlab: reproduction failed\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ietlab: interval exchange transformations, Rauzy-Veech induction and cocycles"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::optional<mpfr_prec_t> bits_flag;
    app.add_option("--bits", bits_flag, "working precision in bits (default: IET_LAB_PRECISION_BITS or 128)")
        ->check(CLI::Range(64, 1 << 20));
    app.add_option("--seed", cfg.seed, "seed for sample-point selection");
    app.add_option("--threads", cfg.threads, "worker cap")->check(CLI::Range(1u, 256u));
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv", "table"}));
    app.add_option("--digits", cfg.digits, "significant digits for decimals (0: full precision)")->check(CLI::NonNegativeNumber);

    std::function<int()> action;
    std::string default_format = "json";
    auto sub = [&](const char* name, const char* desc, const char* fmt_default) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->callback([&, name, fmt_default] {
            cfg.command = name;
            default_format = fmt_default;
        });
        return s;
    };

    RauzyOpts ro;
    auto* rz = sub("rauzy", "run Rauzy-Veech induction on an IET", "json");
    rz->add_option("--iet", ro.iet, "IET spec file")->required();
    rz->add_option("--steps", ro.steps, "induction steps");
    rz->add_option("--period-search", ro.period_search, "look for a period within this many steps");

    std::string build_path;
    auto* bd = sub("build", "build a periodic-type IET from a matrix or loop", "json");
    bd->add_option("--iet", build_path, "IET spec file with periodic_matrix and/or loop")->required();

    std::string matrix_path;
    auto* sc = sub("spectrum", "Lyapunov spectrum and invariant splitting of an integer matrix", "json");
    sc->add_option("--matrix", matrix_path, "matrix file: an array of rows, or an IET spec with periodic_matrix")->required();

    SumOpts bo;
    auto* bk = sub("birkhoff", "sup-norm of Birkhoff sums over sample points", "csv");
    bk->add_option("--iet", bo.iet)->required();
    bk->add_option("--cocycle", bo.cocycle)->required();
    bk->add_option("--n", bo.n, "orbit length")->check(CLI::PositiveNumber);
    bk->add_option("--stride", bo.stride, "grid spacing (default n/1000)");
    bk->add_option("--samples", bo.samples)->check(CLI::PositiveNumber);
    bk->add_flag("--center", bo.center, "subtract the mean first");

    SumOpts dvo;
    dvo.n = 1000000;
    auto* dv = sub("deviation", "deviation profile and fitted growth exponent", "csv");
    dv->add_option("--iet", dvo.iet)->required();
    dv->add_option("--cocycle", dvo.cocycle)->required();
    dv->add_option("--nmax", dvo.n)->check(CLI::PositiveNumber);
    dv->add_option("--samples", dvo.samples)->check(CLI::PositiveNumber);
    dv->add_option("--log-power", dvo.log_power, "divide by log^p n before the corrected fit");
    dv->add_flag("--center", dvo.center, "subtract the mean first");

    CorrectOpts co;
    auto* cr = sub("correct", "correct a cocycle by a piecewise-constant function", "json");
    cr->add_option("--iet", co.iet)->required();
    cr->add_option("--cocycle", co.cocycle)->required();
    cr->add_option("--depth", co.depth, "truncation depth K (default: planned from --target-bits)");
    cr->add_option("--kmax", co.kmax, "renormalization levels in the growth table");
    cr->add_option("--target-bits", co.target_bits)->check(CLI::Range(16, 4096));
    cr->add_flag("--center", co.center, "subtract the mean first");

    EssentialOpts eo;
    auto* ev = sub("essential-values", "tower values of a cocycle over a periodic-type IET", "json");
    ev->add_option("--iet", eo.iet)->required();
    ev->add_option("--cocycle", eo.cocycle)->required();
    ev->add_option("--levels", eo.levels, "tower levels n = 0..levels");
    ev->add_option("--tol", eo.tol);
    ev->add_flag("--center", eo.center, "subtract the mean first");

    ClassifyOpts clo;
    auto* cl = sub("classify", "coboundary classification and lattice containment", "json");
    cl->add_option("--iet", clo.iet)->required();
    cl->add_option("--vector", clo.vector, "step vector, comma separated")->delimiter(',');
    cl->add_option("--cocycle", clo.cocycle, "scalar step cocycle file");
    cl->add_option("--lattice", clo.lattice, "lattice query file");
    cl->add_option("--lattice-tol", clo.lattice_tol);

    SimulateOpts so;
    auto* sm = sub("simulate", "recurrence statistics of the skew product", "json");
    sm->add_option("--iet", so.iet)->required();
    sm->add_option("--cocycle", so.cocycle)->required();
    sm->add_option("--n", so.n)->check(CLI::PositiveNumber);
    sm->add_option("--samples", so.samples)->check(CLI::PositiveNumber);
    sm->add_option("--eps", so.eps, "recurrence radii, comma separated")->delimiter(',');
    sm->add_flag("--center", so.center, "subtract the mean first");

    RotationOpts rto;
    auto* rt = sub("rotations", "continued fractions and Denjoy-Koksma for circle rotations", "json");
    rt->add_option("--alpha", rto.alpha, "rotation number in (0,1), or 'golden'");
    rt->add_option("--qmax", rto.qmax);
    rt->add_option("--samples", rto.samples)->check(CLI::PositiveNumber);
    rt->add_option("--cuts", rto.cuts, "step function cuts, first must be 0")->delimiter(',');
    rt->add_option("--values", rto.values, "value on each cut interval")->delimiter(',');
    rt->add_option("--bpq-bound", rto.bound);

    ReproOpts rpo;
    auto* rp = sub("repro", "reproduce the reference examples", "table");
    rp->add_option("--case", rpo.which)->check(CLI::IsMember({"appendix-b", "example-7-2", "appendix-d", "all"}));
    rp->add_option("--json-out", rpo.json_out, "also write the JSON report here");
    rp->add_flag("--timings", rpo.timings, "include run times in the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        cfg.bits = bits_flag ? *bits_flag : PrecisionContext::from_env().bits;
        if (cfg.format.empty()) cfg.format = default_format;
        const std::string& c = cfg.command;
        if (c == "rauzy") run_rauzy(cfg, ro);
        else if (c == "build") run_build(cfg, build_path);
        else if (c == "spectrum") run_spectrum(cfg, matrix_path);
        else if (c == "birkhoff") run_birkhoff(cfg, bo);
        else if (c == "deviation") run_deviation(cfg, dvo);
        else if (c == "correct") run_correct(cfg, co);
        else if (c == "essential-values") run_essential(cfg, eo);
        else if (c == "classify") run_classify(cfg, clo);
        else if (c == "simulate") run_simulate(cfg, so);
        else if (c == "rotations") run_rotations(cfg, rto);
        else if (c == "repro") return run_repro(cfg, rpo);
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "ietlab: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "ietlab: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "ietlab: malformed input: " << e.what() << "\n";
        return 1;
    }
}
