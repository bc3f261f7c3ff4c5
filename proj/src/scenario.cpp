#include "noonsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "noonsim/errors.hpp"
#include "noonsim/hamiltonians.hpp"
#include "noonsim/metrics.hpp"
#include "noonsim/states.hpp"

namespace noonsim {

using nlohmann::json;
using std::numbers::pi;

namespace {

constexpr std::size_t kMaxTruncation = 200;

[[noreturn]] void bad(const std::string& path, const std::string& what) { throw ValidationError(path + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads the fields of one JSON object, remembering which keys were consumed
// so that leftovers can be reported as unknown.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) bad(path_.empty() ? "config" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    std::string path(const std::string& key) const { return join(path_, key); }

    const json* raw(const std::string& key) {
        used_.insert(key);
        return has(key) ? &j_.at(key) : nullptr;
    }

    double real(const std::string& key, double def) {
        const json* v = raw(key);
        return v ? as_real(*v, path(key)) : def;
    }
    std::optional<double> opt_real(const std::string& key) {
        const json* v = raw(key);
        return v ? std::optional<double>(as_real(*v, path(key))) : std::nullopt;
    }
    std::size_t size(const std::string& key, std::size_t def) {
        const json* v = raw(key);
        return v ? as_size(*v, path(key)) : def;
    }
    std::optional<std::size_t> opt_size(const std::string& key) {
        const json* v = raw(key);
        return v ? std::optional<std::size_t>(as_size(*v, path(key))) : std::nullopt;
    }
    int integer(const std::string& key, int def) {
        const json* v = raw(key);
        return v ? as_int(*v, path(key)) : def;
    }
    std::uint64_t u64(const std::string& key, std::uint64_t def) {
        const json* v = raw(key);
        if (!v) return def;
        if (v->is_number_unsigned()) return v->get<std::uint64_t>();
        if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v->get<std::int64_t>());
        bad(path(key), "expected a non-negative integer");
    }
    std::string text(const std::string& key, const std::string& def) {
        const json* v = raw(key);
        if (!v) return def;
        if (!v->is_string()) bad(path(key), "expected a string");
        return v->get<std::string>();
    }
    template <class T, class F>
    std::vector<T> list(const std::string& key, std::vector<T> def, F&& each) {
        const json* v = raw(key);
        if (!v) return def;
        if (!v->is_array()) bad(path(key), "expected an array");
        std::vector<T> out;
        for (std::size_t i = 0; i < v->size(); ++i) out.push_back(each(v->at(i), path(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    void done() const {
        for (const auto& [k, v] : j_.items())
            if (!used_.count(k)) bad(path(k), "unknown key");
    }

    static double as_real(const json& v, const std::string& where) {
        if (!v.is_number()) bad(where, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) bad(where, "must be finite");
        return x;
    }
    static std::size_t as_size(const json& v, const std::string& where) {
        if (v.is_number_unsigned()) return v.get<std::size_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::size_t>(v.get<std::int64_t>());
        bad(where, "expected a non-negative integer");
    }
    static int as_int(const json& v, const std::string& where) {
        if (!v.is_number_integer()) bad(where, "expected an integer");
        const auto x = v.get<std::int64_t>();
        if (x < -1000000 || x > 1000000) bad(where, "out of range");
        return static_cast<int>(x);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

cplx parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {Fields::as_real(v, where), 0.0};
    if (v.is_array() && v.size() == 2)
        return {Fields::as_real(v[0], where + "[0]"), Fields::as_real(v[1], where + "[1]")};
    bad(where, "expected a number or [re, im]");
}

json opt(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const char* method_name(ExpmMethod m) { return m == ExpmMethod::series ? "series" : "eigen"; }

const char* scheme_name(FloquetScheme s) {
    return s == FloquetScheme::coupling_modulated ? "coupling-modulated" : "frequency-modulated";
}

const char* input_type_name(InputStateSpec::Type t) {
    switch (t) {
        case InputStateSpec::Type::vacuum: return "vacuum";
        case InputStateSpec::Type::fock: return "fock";
        case InputStateSpec::Type::coherent: return "coherent";
        case InputStateSpec::Type::squeezed: return "squeezed";
    }
    return "?";
}

// --- kind-specific parse / echo / validate ----------------------------------

InputStateSpec parse_input(const json& j, const std::string& where) {
    Fields f(j, where);
    const std::string type = f.text("type", "vacuum");
    InputStateSpec s;
    if (type == "vacuum") {
        s.type = InputStateSpec::Type::vacuum;
    } else if (type == "fock") {
        s.type = InputStateSpec::Type::fock;
        s.n = f.size("n", 0);
    } else if (type == "coherent") {
        s.type = InputStateSpec::Type::coherent;
        const json* a = f.raw("alpha");
        s.alpha = a ? parse_complex(*a, f.path("alpha")) : cplx{};
    } else if (type == "squeezed") {
        s.type = InputStateSpec::Type::squeezed;
        s.r = f.real("r", 0.0);
        s.phi = f.real("phi", 0.0);
    } else {
        bad(f.path("type"), "expected vacuum, fock, coherent or squeezed");
    }
    f.done();
    return s;
}

json input_json(const InputStateSpec& s) {
    json j = {{"type", input_type_name(s.type)}};
    switch (s.type) {
        case InputStateSpec::Type::vacuum: break;
        case InputStateSpec::Type::fock: j["n"] = s.n; break;
        case InputStateSpec::Type::coherent: j["alpha"] = {s.alpha.real(), s.alpha.imag()}; break;
        case InputStateSpec::Type::squeezed:
            j["r"] = s.r;
            j["phi"] = s.phi;
            break;
    }
    return j;
}

auto size_item = [](const json& v, const std::string& w) { return Fields::as_size(v, w); };
auto real_item = [](const json& v, const std::string& w) { return Fields::as_real(v, w); };
auto int_item = [](const json& v, const std::string& w) { return Fields::as_int(v, w); };

ScenarioParams parse_params(ScenarioKind kind, const json& j) {
    Fields f(j, "params");
    ScenarioParams out;
    switch (kind) {
        case ScenarioKind::noon_protocol: {
            NoonScenario p;
            p.N = f.list<std::size_t>("N", p.N, size_item);
            p.omega = f.real("omega", p.omega);
            p.truncation = f.opt_size("truncation");
            out = p;
            break;
        }
        case ScenarioKind::conditional_map: {
            ConditionalMapScenario p;
            if (const json* v = f.raw("psi1")) p.psi1 = parse_input(*v, f.path("psi1"));
            if (const json* v = f.raw("psi2")) p.psi2 = parse_input(*v, f.path("psi2"));
            p.truncation = f.size("truncation", p.truncation);
            p.omega = f.real("omega", p.omega);
            out = p;
            break;
        }
        case ScenarioKind::multi_noon: {
            MultiNoonScenario p;
            p.M = f.size("M", p.M);
            p.N = f.size("N", p.N);
            p.omega = f.real("omega", p.omega);
            p.truncation = f.opt_size("truncation");
            out = p;
            break;
        }
        case ScenarioKind::floquet_sweep: {
            FloquetSweepScenario p;
            const std::string scheme = f.text("scheme", scheme_name(p.scheme));
            if (scheme == "coupling-modulated") p.scheme = FloquetScheme::coupling_modulated;
            else if (scheme == "frequency-modulated") p.scheme = FloquetScheme::frequency_modulated;
            else bad(f.path("scheme"), "expected coupling-modulated or frequency-modulated");
            p.g0 = f.real("g0", p.g0);
            p.nu_over_g = f.list<double>("nu_over_g", p.nu_over_g, real_item);
            p.zeta = f.real("zeta", p.zeta);
            p.phi1 = f.real("phi1", p.phi1);
            p.phi2 = f.opt_real("phi2");
            p.delta = f.real("delta", p.delta);
            p.N = f.size("N", p.N);
            p.n_max = f.integer("n_max", p.n_max);
            p.steps_per_period = f.size("steps_per_period", p.steps_per_period);
            out = p;
            break;
        }
        case ScenarioKind::trapped_ion_verify: {
            TrappedIonScenario p;
            p.g0 = f.real("g0", p.g0);
            p.epsilon_abs = f.real("epsilon_abs", p.epsilon_abs);
            p.phi_L = f.real("phi_L", p.phi_L);
            p.ratios = f.list<double>("ratios", p.ratios, real_item);
            p.N = f.size("N", p.N);
            out = p;
            break;
        }
        case ScenarioKind::hp_sweep: {
            HpSweepScenario p;
            p.N0 = f.list<std::size_t>("N0", p.N0, size_item);
            p.g = f.real("g", p.g);
            p.gt = f.list<double>("gt", p.gt, real_item);
            p.initial_level = f.size("initial_level", p.initial_level);
            out = p;
            break;
        }
        case ScenarioKind::metrology_table: {
            MetrologyScenario p;
            p.noon_N = f.list<std::size_t>("noon_N", p.noon_N, size_item);
            p.cat_two_j = f.list<int>("cat_two_j", p.cat_two_j, int_item);
            p.random_cats = f.size("random_cats", p.random_cats);
            p.coherent_alpha = f.list<double>("coherent_alpha", p.coherent_alpha, real_item);
            p.multi_M = f.size("multi_M", p.multi_M);
            p.multi_N = f.size("multi_N", p.multi_N);
            out = p;
            break;
        }
    }
    f.done();
    return out;
}

struct ParamsEcho {
    json operator()(const NoonScenario& p) const {
        return {{"N", p.N}, {"omega", p.omega}, {"truncation", opt(p.truncation)}};
    }
    json operator()(const ConditionalMapScenario& p) const {
        return {{"psi1", input_json(p.psi1)}, {"psi2", input_json(p.psi2)}, {"truncation", p.truncation}, {"omega", p.omega}};
    }
    json operator()(const MultiNoonScenario& p) const {
        return {{"M", p.M}, {"N", p.N}, {"omega", p.omega}, {"truncation", opt(p.truncation)}};
    }
    json operator()(const FloquetSweepScenario& p) const {
        return {{"scheme", scheme_name(p.scheme)}, {"g0", p.g0}, {"nu_over_g", p.nu_over_g}, {"zeta", p.zeta},
                {"phi1", p.phi1}, {"phi2", opt(p.phi2)}, {"delta", p.delta}, {"N", p.N}, {"n_max", p.n_max},
                {"steps_per_period", p.steps_per_period}};
    }
    json operator()(const TrappedIonScenario& p) const {
        return {{"g0", p.g0}, {"epsilon_abs", p.epsilon_abs}, {"phi_L", p.phi_L}, {"ratios", p.ratios}, {"N", p.N}};
    }
    json operator()(const HpSweepScenario& p) const {
        return {{"N0", p.N0}, {"g", p.g}, {"gt", p.gt}, {"initial_level", p.initial_level}};
    }
    json operator()(const MetrologyScenario& p) const {
        return {{"noon_N", p.noon_N},           {"cat_two_j", p.cat_two_j},   {"random_cats", p.random_cats},
                {"coherent_alpha", p.coherent_alpha}, {"multi_M", p.multi_M}, {"multi_N", p.multi_N}};
    }
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) bad("params." + field, what);
}

void require_positive(double x, const std::string& field) { require(x > 0.0, field, "must be > 0"); }

template <class T>
void require_nonempty(const std::vector<T>& v, const std::string& field) {
    require(!v.empty(), field, "must not be empty");
}

std::size_t coherent_truncation(double alpha) {
    return 20 + 10 * static_cast<std::size_t>(std::ceil(alpha * alpha));
}

struct ParamsValidate {
    void operator()(const NoonScenario& p) const {
        require_nonempty(p.N, "N");
        require_positive(p.omega, "omega");
        for (std::size_t N : p.N) {
            require(N >= 1, "N", "every N must be >= 1");
            require(N + 1 <= kMaxTruncation, "N", "every N must be < " + std::to_string(kMaxTruncation));
            if (p.truncation)
                require(*p.truncation >= N + 1, "truncation",
                        "must be >= N+1 = " + std::to_string(N + 1) + " (N = " + std::to_string(N) + ")");
        }
        if (p.truncation) require(*p.truncation <= kMaxTruncation, "truncation", "too large");
    }
    void operator()(const ConditionalMapScenario& p) const {
        require(p.truncation >= 2 && p.truncation <= kMaxTruncation, "truncation",
                "must be in [2, " + std::to_string(kMaxTruncation) + "]");
        require_positive(p.omega, "omega");
        for (const auto& [spec, name] : {std::pair{&p.psi1, "psi1"}, std::pair{&p.psi2, "psi2"}}) {
            if (spec->type == InputStateSpec::Type::fock)
                require(spec->n < p.truncation, std::string(name) + ".n", "must be < truncation");
            if (spec->type == InputStateSpec::Type::squeezed)
                require(spec->r >= 0.0, std::string(name) + ".r", "must be >= 0");
            try {
                (void)spec->build(p.truncation);
            } catch (const TruncationError& e) {
                bad("params." + std::string(name), std::string("does not fit the truncation: ") + e.what());
            }
        }
    }
    void operator()(const MultiNoonScenario& p) const {
        require(p.M >= 1, "M", "must be >= 1");
        require(p.N >= 1, "N", "must be >= 1");
        require_positive(p.omega, "omega");
        const std::size_t d = p.truncation.value_or(p.N + 1);
        require(d >= p.N + 1, "truncation", "must be >= N+1 = " + std::to_string(p.N + 1));
        double dim = 2.0;
        for (std::size_t i = 0; i < 2 * p.M; ++i) dim *= static_cast<double>(d);
        require(dim <= static_cast<double>(kMultiNoonDimensionBudget), "M",
                "state dimension 2 d^(2M) exceeds " + std::to_string(kMultiNoonDimensionBudget));
    }
    void operator()(const FloquetSweepScenario& p) const {
        require_positive(p.g0, "g0");
        require_nonempty(p.nu_over_g, "nu_over_g");
        for (double r : p.nu_over_g)
            require(r >= kMinFloquetRatio, "nu_over_g", "every ratio must be >= 5 (high-frequency regime)");
        require(std::abs(p.zeta) <= 30.0, "zeta", "must satisfy |zeta| <= 30");
        require(p.n_max >= 1 && p.n_max <= 60, "n_max", "must be in [1, 60]");
        require(p.N >= 1 && p.N + 2 <= 40, "N", "must be in [1, 38]");
        require(p.steps_per_period >= 4 && p.steps_per_period <= 100000, "steps_per_period", "must be in [4, 100000]");
        const double dphi = p.phi1 - p.resolved_phi2();
        if (p.scheme == FloquetScheme::coupling_modulated) {
            require(std::abs(std::sin(dphi)) > 1e-6, "phi2", "sin(phi1 - phi2) vanishes; the exchange coupling is zero");
        } else {
            require(std::abs(chi(p.zeta, dphi, p.n_max).value) > 1e-6, "phi2", "chi vanishes; the exchange coupling is zero");
        }
    }
    void operator()(const TrappedIonScenario& p) const {
        require_positive(p.g0, "g0");
        require_positive(p.epsilon_abs, "epsilon_abs");
        require_nonempty(p.ratios, "ratios");
        for (double r : p.ratios) require(r > 0.0 && r <= 0.05, "ratios", "every g0 eta/|epsilon_L| must be in (0, 0.05]");
        require(p.N >= 1 && p.N + 1 <= 40, "N", "must be in [1, 39]");
    }
    void operator()(const HpSweepScenario& p) const {
        require_nonempty(p.N0, "N0");
        require_positive(p.g, "g");
        require_nonempty(p.gt, "gt");
        for (double t : p.gt) require(t >= 0.0, "gt", "every gt must be >= 0");
        for (std::size_t n : p.N0)
            require(n >= p.initial_level + 1, "N0",
                    "every N0 must be >= initial_level + 1 = " + std::to_string(p.initial_level + 1));
        require(p.initial_level <= 50, "initial_level", "must be <= 50");
    }
    void operator()(const MetrologyScenario& p) const {
        for (std::size_t N : p.noon_N) require(N >= 1 && N <= 60, "noon_N", "every N must be in [1, 60]");
        for (int j : p.cat_two_j) require(j >= 1 && j <= 60, "cat_two_j", "every 2j must be in [1, 60]");
        require(p.random_cats <= 1000, "random_cats", "must be <= 1000");
        for (double a : p.coherent_alpha) require(a >= 0.0 && a <= 4.0, "coherent_alpha", "every alpha must be in [0, 4]");
        MultiNoonScenario m;
        m.M = p.multi_M;
        m.N = p.multi_N;
        try {
            (*this)(m);
        } catch (const ValidationError& e) {
            bad("params.multi_M", e.what());
        }
    }
};

// --- runners -------------------------------------------------------------------

Column real_col(std::string name, std::string unit = "1", std::optional<double> tol = std::nullopt) {
    return {std::move(name), std::move(unit), tol, ColumnType::real};
}
Column int_col(std::string name) { return {std::move(name), "1", std::nullopt, ColumnType::integer}; }
Column text_col(std::string name) { return {std::move(name), "", std::nullopt, ColumnType::text}; }

Cell I(std::size_t v) { return static_cast<std::int64_t>(v); }
Cell I(int v) { return static_cast<std::int64_t>(v); }

StateVector plus_qubit(const StateVector& modes) {
    Vector q(2);
    q << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return product(StateVector(HilbertLayout{Factor::qubit()}, q), modes);
}

// One measurement policy per output row: the forced outcomes, or one sampled
// draw seeded with seed + row index.
std::vector<MeasurementPolicy> row_policies(const ScenarioConfig& c, std::size_t& row) {
    std::vector<MeasurementPolicy> out;
    if (c.policy.mode == MeasurementPolicy::Mode::forced) {
        for (int o : c.policy.outcomes) out.push_back(MeasurementPolicy::forced(o));
        row += out.size();
    } else {
        out.push_back(MeasurementPolicy::sampled(c.seed + row));
        ++row;
    }
    return out;
}

std::pair<double, double> step_extremes(const ProtocolRecord& r) {
    double leak = 0.0, norm_err = 0.0;
    for (const auto& s : r.steps) {
        leak = std::max(leak, s.leakage);
        norm_err = std::max(norm_err, std::abs(s.norm - 1.0));
    }
    return {leak, norm_err};
}

Table steps_table() {
    return {"steps",
            {int_col("row"), text_col("label"), text_col("kind"), real_col("duration", "time"), real_col("norm"),
             real_col("leakage", "1", kLeakageThreshold)},
            {}};
}

void add_steps(Table& t, std::size_t row, const ProtocolRecord& r) {
    for (const auto& s : r.steps)
        t.add_row({I(row), s.label, s.kind, s.duration.value_or(0.0), s.norm, s.leakage});
}

void run_noon(const ScenarioConfig& c, const NoonScenario& p, RunReport& rep) {
    Table t{"noon",
            {int_col("N"), int_col("truncation"), int_col("outcome"), real_col("probability", "1", 1e-12),
             real_col("fidelity", "1", 1e-10), real_col("phase_insensitive_fidelity", "1", 1e-10),
             real_col("literal_reference_fidelity"), real_col("max_leakage", "1", kLeakageThreshold),
             real_col("max_norm_error", "1", 1e-10)},
            {}};
    Table steps = steps_table();
    std::size_t row = 0;
    double min_fid = 1.0;
    for (std::size_t N : p.N) {
        const std::size_t d = p.truncation.value_or(N + 1);
        for (const auto& pol : row_policies(c, row)) {
            const ProtocolRecord r = run_noon_protocol(N, p.omega, pol, d);
            const auto [leak, nerr] = step_extremes(r);
            add_steps(steps, t.rows.size(), r);
            t.add_row({I(N), I(d), I(r.outcome), r.outcome_probability, r.fidelity, r.phase_insensitive_fidelity,
                       r.diagnostic("literal_reference_fidelity"), leak, nerr});
            min_fid = std::min(min_fid, r.fidelity);
        }
    }
    rep.summary["min_fidelity"] = min_fid;
    rep.tables.push_back(std::move(t));
    rep.tables.push_back(std::move(steps));
}

void run_cmap(const ScenarioConfig& c, const ConditionalMapScenario& p, RunReport& rep) {
    const StateVector psi1 = p.psi1.build(p.truncation);
    const StateVector psi2 = p.psi2.build(p.truncation);
    const double overlap = std::abs(inner(psi1, psi2));
    Table t{"conditional_map",
            {int_col("outcome"), text_col("status"), real_col("probability"), real_col("fidelity", "1", 1e-9),
             real_col("parity_exact_fidelity", "1", 1e-10), real_col("concurrence"),
             real_col("concurrence_closed_form", "1", 1e-10), real_col("max_leakage", "1", kLeakageThreshold)},
            {}};
    Table steps = steps_table();
    std::size_t row = 0;
    for (const auto& pol : row_policies(c, row)) {
        try {
            const ProtocolRecord r = run_conditional_map(psi1, psi2, p.omega, pol);
            const int sign = r.outcome == 0 ? 1 : -1;
            double closed = std::nan("");
            try {
                closed = concurrence_superposition(psi1, psi2, sign);
            } catch (const ValidationError&) {
            }
            add_steps(steps, t.rows.size(), r);
            t.add_row({I(r.outcome), std::string("ok"), r.outcome_probability, r.fidelity,
                       r.diagnostic("parity_exact_fidelity"), r.diagnostic("concurrence"), closed,
                       step_extremes(r).first});
        } catch (const ImpossibleBranchError&) {
            const double nan = std::nan("");
            t.add_row({I(pol.outcome), std::string("impossible-branch"), 0.0, nan, nan, nan, nan, nan});
        }
    }
    rep.summary["input_overlap_abs"] = overlap;
    rep.tables.push_back(std::move(t));
    rep.tables.push_back(std::move(steps));
}

Operator collective_first_modes(const HilbertLayout& modes, std::size_t M) {
    Operator g = Operator::zero(modes);
    for (std::size_t k = 0; k < M; ++k) g += embed(number(modes.factor(2 * k).dim), modes, 2 * k);
    return g;
}

void run_multi(const ScenarioConfig& c, const MultiNoonScenario& p, RunReport& rep) {
    const std::size_t d = p.truncation.value_or(p.N + 1);
    const double hl = 1.0 / static_cast<double>(p.M * p.N);
    Table t{"multi_noon",
            {int_col("M"), int_col("N"), int_col("outcome"), real_col("probability", "1", 1e-12),
             real_col("fidelity", "1", 1e-9), real_col("qfi_collective"), real_col("phase_uncertainty", "rad", 1e-9),
             real_col("heisenberg_limit", "rad"), real_col("max_leakage", "1", kLeakageThreshold)},
            {}};
    std::size_t row = 0;
    for (const auto& pol : row_policies(c, row)) {
        const ProtocolRecord r = run_multi_noon(p.M, p.N, p.omega, pol, d);
        const Operator g = collective_first_modes(r.final_modes.layout(), p.M);
        t.add_row({I(p.M), I(p.N), I(r.outcome), r.outcome_probability, r.fidelity, qfi(r.final_modes, g),
                   phase_uncertainty(r.final_modes, g), hl, step_extremes(r).first});
    }
    rep.tables.push_back(std::move(t));
}

// kappa read off a reduced Hamiltonian of the form i kappa (a1 a2^dag - a2 a1^dag) sigma_z:
// <e,0,1|H|e,1,0> = i kappa.
double extract_kappa(const Operator& h) {
    const HilbertLayout& l = h.layout();
    return h.matrix()(static_cast<Eigen::Index>(l.flatten({1, 0, 1})), static_cast<Eigen::Index>(l.flatten({1, 1, 0})))
        .imag();
}

void run_floquet(const ScenarioConfig& c, const FloquetSweepScenario& p, RunReport& rep) {
    const bool coupling = p.scheme == FloquetScheme::coupling_modulated;
    const std::size_t d = p.N + 2;  // the excited-qubit branch reaches N+1 photons in one mode
    const HilbertLayout layout{Factor::qubit(), Factor::mode(d), Factor::mode(d)};
    const StateVector psi0 = plus_qubit(fock(HilbertLayout{Factor::mode(d), Factor::mode(d)}, {0, p.N}));
    const double dphi = p.phi1 - p.resolved_phi2();
    const double chi_value = coupling ? 0.0 : chi(p.zeta, dphi, p.n_max).value;

    PropagatorConfig cfg;
    cfg.method = c.method;
    Table t{"floquet",
            {real_col("nu_over_g"), real_col("nu", "rad/time"), real_col(coupling ? "kappa" : "Omega", "rad/time"),
             real_col("coupling_from_reduction", "rad/time", 1e-10), real_col("t_final", "time"),
             real_col("periods"), real_col("infidelity"), real_col("self_convergence")},
            {}};
    for (double ratio : p.nu_over_g) {
        DriveSpec drive;
        drive.g0 = p.g0;
        drive.nu = ratio * p.g0;
        drive.phi1 = p.phi1;
        drive.phi2 = p.resolved_phi2();
        drive.zeta = p.zeta;
        drive.delta = p.delta;
        drive.n_max = p.n_max;
        const FourierHamiltonian f =
            coupling ? coupling_modulated_harmonics(drive, layout) : frequency_modulated_harmonics(drive, layout);
        const Operator heff = floquet_reduce(f.h0, f.harmonics, drive.nu);
        const double strength = coupling ? 2.0 * p.g0 * p.g0 / drive.nu * std::sin(dphi)
                                         : p.g0 * p.g0 * chi_value / drive.nu;
        // The frequency-modulated form i Omega (a1^dag a2 - a1 a2^dag) sigma_z is
        // build_effective with kappa = -Omega.
        const double from_reduction = coupling ? extract_kappa(heff - f.h0) : -extract_kappa(heff - f.h0);
        const double t_final = pi / (4.0 * std::abs(strength));
        const double period = 2.0 * pi / drive.nu;

        HamiltonianSource h_of_t;
        if (coupling) h_of_t = [drive, layout](double s) { return build_coupling_modulated(drive, layout, s); };
        else h_of_t = [drive, layout](double s) { return build_frequency_modulated(drive, layout, s); };

        const StateVector eff = expm_apply(heff, t_final, psi0, cfg);
        const StateVector exact = propagate_periodic(h_of_t, period, p.steps_per_period, t_final, psi0, cfg);
        const StateVector fine = propagate_periodic(h_of_t, period, 2 * p.steps_per_period, t_final, psi0, cfg);
        check_norm(exact, 1e-10, "floquet sweep");
        t.add_row({ratio, drive.nu, strength, from_reduction, t_final, t_final / period, 1.0 - fidelity(eff, exact),
                   (exact.amplitudes() - fine.amplitudes()).norm()});
    }
    rep.summary["scheme"] = scheme_name(p.scheme);
    rep.summary["phase_difference"] = dphi;
    if (coupling) {
        // Reduction at nu = 2 g0 with the coupling-maximizing phase difference pi/2.
        DriveSpec drive;
        drive.g0 = p.g0;
        drive.nu = 2.0 * p.g0;
        drive.phi1 = 0.0;
        drive.phi2 = -pi / 2;
        const HilbertLayout small{Factor::qubit(), Factor::mode(2), Factor::mode(2)};
        const FourierHamiltonian f = coupling_modulated_harmonics(drive, small);
        rep.summary["kappa_at_nu_2g0"] = extract_kappa(floquet_reduce(f.h0, f.harmonics, drive.nu));
        rep.summary["kappa_claimed_at_nu_2g0"] = 0.5 * p.g0;
    } else {
        rep.summary["chi"] = chi_value;
        rep.summary["chi_last_term"] = chi(p.zeta, dphi, p.n_max).last_term;
        rep.summary["J0_zeta"] = bessel_j(0, p.zeta);
    }
    rep.tables.push_back(std::move(t));
}

void run_trapped(const ScenarioConfig& c, const TrappedIonScenario& p, RunReport& rep) {
    const std::size_t d = p.N + 1;
    const HilbertLayout layout{Factor::qubit(), Factor::mode(d), Factor::mode(d)};
    Table t{"trapped_ion",
            {real_col("ratio"), real_col("eta"), real_col("Omega", "rad/time"), real_col("t_final", "time"),
             real_col("infidelity_rwa"), real_col("infidelity_effective", "1", 1e-2)},
            {}};
    for (double ratio : p.ratios) {
        TrappedIonParams ion;
        ion.g0 = p.g0;
        ion.eta = ratio * p.epsilon_abs / p.g0;
        ion.epsilon_L = std::polar(p.epsilon_abs, -p.phi_L);
        const double omega = 0.5 * p.g0 * ion.eta;
        const double t_final = pi / (4.0 * omega);

        const Operator full = build_trapped_ion(ion, layout, TrappedIonStage::full);
        TrappedIonParams drive_only = ion;
        drive_only.eta = 0.0;
        const Operator drive = build_trapped_ion(drive_only, layout, TrappedIonStage::full);
        const Operator rwa = build_trapped_ion(ion, layout, TrappedIonStage::rwa_reduced);
        const Operator eff = build_trapped_ion(ion, layout, TrappedIonStage::effective);
        const Operator w = embed(trapped_ion_frame(ion), layout, 0);

        // Start from |+>|0,N> in the effective frame.
        const StateVector eff0 = plus_qubit(fock(HilbertLayout{Factor::mode(d), Factor::mode(d)}, {0, p.N}));
        const StateVector psi0 = w.adjoint() * eff0;
        const StateVector lab = propagator(full, t_final, c.method) * psi0;
        const StateVector interaction = propagator(drive, -t_final, c.method) * lab;
        const StateVector reduced = propagator(rwa, t_final, c.method) * psi0;
        const StateVector effective = propagator(eff, t_final, c.method) * eff0;
        t.add_row({ratio, ion.eta, omega, t_final, 1.0 - fidelity(interaction, reduced),
                   1.0 - fidelity(w * interaction, effective)});
    }
    rep.tables.push_back(std::move(t));
}

void run_hp(const ScenarioConfig& c, const HpSweepScenario& p, RunReport& rep) {
    PropagatorConfig cfg;
    cfg.method = c.method;
    Table t{"hp",
            {int_col("N0"), real_col("sqrt_N0"), real_col("collective_coupling", "rad/time"), real_col("gt"),
             real_col("infidelity")},
            {}};
    for (std::size_t n0 : p.N0) {
        const HpModels m = hp_reference_dynamics({n0, p.initial_level + 1}, p.g);
        const StateVector psi0 = fock(m.layout, {1, p.initial_level});
        for (double gt : p.gt) {
            const double time = gt / p.g;
            const StateVector a = expm_apply(m.exact, time, psi0, cfg);
            const StateVector b = expm_apply(m.bosonic, time, psi0, cfg);
            const double sq = std::sqrt(static_cast<double>(n0));
            t.add_row({I(n0), sq, p.g * sq, gt, 1.0 - fidelity(a, b)});
        }
    }
    rep.tables.push_back(std::move(t));
}

void run_metrology(const ScenarioConfig& c, const MetrologyScenario& p, RunReport& rep) {
    Table t{"metrology",
            {text_col("state"), text_col("generator"), int_col("matched"), real_col("theta", "rad"),
             real_col("phi", "rad"), real_col("resource"), real_col("qfi", "1", 1e-8),
             real_col("heisenberg_qfi"), real_col("phase_uncertainty", "rad")},
            {}};
    auto add = [&](std::string state, std::string gen, bool matched, double th, double ph, double resource,
                   const StateVector& s, const Operator& g) {
        t.add_row({std::move(state), std::move(gen), I(matched ? 1 : 0), th, ph, resource, qfi(s, g),
                   resource * resource, phase_uncertainty(s, g)});
    };

    for (std::size_t N : p.noon_N) {
        const StateVector s = noon(N, N + 1);
        add("noon", "n_1", true, 0.0, 0.0, double(N), s, embed(number(N + 1), s.layout(), 0));
    }

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> uth(0.0, pi), uph(-pi, pi);
    for (int two_j : p.cat_two_j) {
        const SpinGenerators g = dicke_generators(two_j);
        const double size = two_j;
        struct Axis {
            const char* name;
            double theta, phi;
        };
        for (const Axis a : {Axis{"z-cat", 0.0, 0.0}, Axis{"x-cat", pi / 2, 0.0}, Axis{"y-cat", pi / 2, pi / 2}}) {
            const StateVector s = spin_cat({two_j, a.theta, a.phi}, SpinRepresentation::dicke_ladder);
            add(a.name, "J_gamma", true, a.theta, a.phi, size, s, spin_generator_along(g, a.theta, a.phi));
        }
        for (std::size_t i = 0; i < p.random_cats; ++i) {
            const double th = uth(rng), ph = uph(rng);
            const StateVector s = spin_cat({two_j, th, ph}, SpinRepresentation::dicke_ladder);
            add("cat", "J_gamma", true, th, ph, size, s, spin_generator_along(g, th, ph));
        }
        // Mismatched generators and a non-antipodal superposition.
        add("x-cat", "J_z", false, pi / 2, 0.0, size, spin_cat({two_j, pi / 2, 0.0}, SpinRepresentation::dicke_ladder),
            g.jz);
        add("z-cat", "J_x", false, 0.0, 0.0, size, spin_cat({two_j, 0.0, 0.0}, SpinRepresentation::dicke_ladder),
            g.jx());
        const StateVector a = spin_coherent({two_j, pi / 2, 0.0}, SpinRepresentation::dicke_ladder);
        const StateVector b = spin_coherent({two_j, pi / 2, pi / 2}, SpinRepresentation::dicke_ladder);
        add("non-antipodal", "J_z", false, pi / 2, 0.0, size,
            StateVector::normalized(a.layout(), a.amplitudes() + b.amplitudes()), g.jz);
    }

    for (double alpha : p.coherent_alpha) {
        const StateVector s = coherent(alpha, coherent_truncation(alpha)).state;
        add("coherent", "n_1", false, 0.0, 0.0, alpha * alpha, s, embed(number(s.layout().factor(0).dim), s.layout(), 0));
    }

    const ProtocolRecord r = run_multi_noon(p.multi_M, p.multi_N, 1.0, MeasurementPolicy::forced(0), p.multi_N + 1);
    add("multi-noon", "sum n_first", true, 0.0, 0.0, double(p.multi_M * p.multi_N), r.final_modes,
        collective_first_modes(r.final_modes.layout(), p.multi_M));
    rep.tables.push_back(std::move(t));
}

}  // namespace

// --- public ----------------------------------------------------------------------

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::noon_protocol: return "noon-protocol";
        case ScenarioKind::conditional_map: return "conditional-map";
        case ScenarioKind::multi_noon: return "multi-noon";
        case ScenarioKind::floquet_sweep: return "floquet-sweep";
        case ScenarioKind::trapped_ion_verify: return "trapped-ion-verify";
        case ScenarioKind::hp_sweep: return "hp-sweep";
        case ScenarioKind::metrology_table: return "metrology-table";
    }
    return "?";
}

const std::vector<ScenarioKind>& all_scenario_kinds() {
    static const std::vector<ScenarioKind> kinds{
        ScenarioKind::noon_protocol,      ScenarioKind::conditional_map, ScenarioKind::multi_noon,
        ScenarioKind::floquet_sweep,      ScenarioKind::trapped_ion_verify, ScenarioKind::hp_sweep,
        ScenarioKind::metrology_table};
    return kinds;
}

ScenarioKind parse_scenario_kind(const std::string& s) {
    for (ScenarioKind k : all_scenario_kinds())
        if (to_string(k) == s) return k;
    bad("kind", "unknown scenario kind '" + s + "'");
}

StateVector InputStateSpec::build(std::size_t truncation) const {
    const HilbertLayout l{Factor::mode(truncation)};
    switch (type) {
        case Type::vacuum: return fock(l, {0});
        case Type::fock: return fock(l, {n});
        case Type::coherent: return coherent(alpha, truncation).state;
        case Type::squeezed: return squeezed_vacuum(r, phi, truncation).state;
    }
    throw ValidationError("input state: unknown type");
}

double FloquetSweepScenario::resolved_phi2() const {
    if (phi2) return *phi2;
    return phi1 - (scheme == FloquetScheme::coupling_modulated ? pi / 2 : pi / 3);
}

void ScenarioConfig::validate() const {
    const std::size_t expected = static_cast<std::size_t>(kind);
    if (params.index() != expected) bad("params", "do not match kind " + to_string(kind));
    if (policy.mode == MeasurementPolicy::Mode::forced) {
        if (policy.outcomes.empty()) bad("policy.outcomes", "must not be empty in forced mode");
        std::set<int> seen;
        for (int o : policy.outcomes) {
            if (o != 0 && o != 1) bad("policy.outcomes", "every outcome must be 0 or 1");
            if (!seen.insert(o).second) bad("policy.outcomes", "duplicate outcome");
        }
    }
    std::visit(ParamsValidate{}, params);
}

ScenarioConfig default_config(ScenarioKind kind) {
    ScenarioConfig c;
    c.kind = kind;
    switch (kind) {
        case ScenarioKind::noon_protocol: c.params = NoonScenario{}; break;
        case ScenarioKind::conditional_map: c.params = ConditionalMapScenario{}; break;
        case ScenarioKind::multi_noon: c.params = MultiNoonScenario{}; break;
        case ScenarioKind::floquet_sweep: c.params = FloquetSweepScenario{}; break;
        case ScenarioKind::trapped_ion_verify: c.params = TrappedIonScenario{}; break;
        case ScenarioKind::hp_sweep: c.params = HpSweepScenario{}; break;
        case ScenarioKind::metrology_table: c.params = MetrologyScenario{}; break;
    }
    return c;
}

ScenarioConfig parse_config(const json& j) {
    Fields f(j, "");
    const json* kind = f.raw("kind");
    if (!kind || !kind->is_string()) bad("kind", "required string");
    ScenarioConfig c = default_config(parse_scenario_kind(kind->get<std::string>()));
    c.name = f.text("name", "");
    c.description = f.text("description", "");
    c.seed = f.u64("seed", 0);

    if (const json* pol = f.raw("policy")) {
        Fields pf(*pol, "policy");
        const std::string mode = pf.text("mode", "forced");
        if (mode == "forced") c.policy.mode = MeasurementPolicy::Mode::forced;
        else if (mode == "sampled") c.policy.mode = MeasurementPolicy::Mode::sampled;
        else bad("policy.mode", "expected forced or sampled");
        c.policy.outcomes = pf.list<int>("outcomes", c.policy.outcomes, int_item);
        pf.done();
    }
    if (const json* num = f.raw("numerics")) {
        Fields nf(*num, "numerics");
        const std::string m = nf.text("method", "series");
        if (m == "series") c.method = ExpmMethod::series;
        else if (m == "eigen") c.method = ExpmMethod::eigen;
        else bad("numerics.method", "expected series or eigen");
        nf.done();
    }
    if (const json* out = f.raw("output")) {
        Fields of(*out, "output");
        try {
            c.output.format = parse_report_format(of.text("format", "csv"));
        } catch (const ValidationError& e) {
            bad("output.format", e.what());
        }
        if (of.has("path")) c.output.path = of.text("path", "");
        else (void)of.raw("path");
        of.done();
    }
    if (const json* params = f.raw("params")) c.params = parse_params(c.kind, *params);
    f.done();
    c.validate();
    return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

json to_json(const ScenarioConfig& c) {
    json policy = {{"mode", c.policy.mode == MeasurementPolicy::Mode::forced ? "forced" : "sampled"},
                   {"outcomes", c.policy.outcomes}};
    json output = {{"format", to_string(c.output.format)},
                   {"path", c.output.path ? json(*c.output.path) : json(nullptr)}};
    return {{"kind", to_string(c.kind)},
            {"name", c.name},
            {"description", c.description},
            {"seed", c.seed},
            {"policy", std::move(policy)},
            {"numerics", {{"method", method_name(c.method)}}},
            {"output", std::move(output)},
            {"params", std::visit(ParamsEcho{}, c.params)}};
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + assignment + "': expected key=value");
    std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    static const std::set<std::string> top{"kind", "name", "description", "seed", "policy", "numerics", "output", "params"};
    const std::string head = key.substr(0, key.find('.'));
    if (!top.count(head)) key = "params." + key;

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError("override '" + assignment + "': empty key segment");
        if (!node->is_object()) {
            if (!node->is_null()) throw ValidationError("override '" + assignment + "': " + part + " is not inside an object");
            *node = json::object();
        }
        if (dot == std::string::npos) {
            (*node)[part] = parsed;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

RunReport run_scenario(const ScenarioConfig& config, const std::string& timestamp) {
    config.validate();
    RunReport rep;
    rep.kind = to_string(config.kind);
    rep.config = to_json(config);
    rep.provenance.seed = config.seed;
    rep.provenance.timestamp = timestamp;
    try {
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, NoonScenario>) run_noon(config, p, rep);
                else if constexpr (std::is_same_v<P, ConditionalMapScenario>) run_cmap(config, p, rep);
                else if constexpr (std::is_same_v<P, MultiNoonScenario>) run_multi(config, p, rep);
                else if constexpr (std::is_same_v<P, FloquetSweepScenario>) run_floquet(config, p, rep);
                else if constexpr (std::is_same_v<P, TrappedIonScenario>) run_trapped(config, p, rep);
                else if constexpr (std::is_same_v<P, HpSweepScenario>) run_hp(config, p, rep);
                else run_metrology(config, p, rep);
            },
            config.params);
    } catch (const NumericalError& e) {
        throw NumericalError(rep.kind + ": " + e.what());
    }
    return rep;
}

}  // namespace noonsim

namespace noonsim {

namespace detail {
const std::vector<std::pair<const char*, const char*>>& embedded_scenarios();
}

const std::vector<BuiltinScenario>& builtin_scenarios() {
    static const std::vector<BuiltinScenario> list = [] {
        std::vector<BuiltinScenario> out;
        for (const auto& [name, text] : detail::embedded_scenarios()) {
            nlohmann::json doc = nlohmann::json::parse(text);
            std::string summary = doc.value("description", "");
            out.push_back({name, std::move(summary), std::move(doc)});
        }
        return out;
    }();
    return list;
}

const BuiltinScenario& builtin_scenario(const std::string& name) {
    for (const auto& b : builtin_scenarios())
        if (b.name == name) return b;
    throw ValidationError("no built-in scenario named '" + name + "' (see list-scenarios)");
}

}  // namespace noonsim
