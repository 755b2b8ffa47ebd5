#ifndef SQUEEZELIM_SCENARIO_HPP
#define SQUEEZELIM_SCENARIO_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "squeezelim/optimize.hpp"
#include "squeezelim/single_mode.hpp"
#include "squeezelim/spectrum.hpp"
#include "squeezelim/table.hpp"

namespace squeezelim::scenario
{

using nlohmann::json;

// Bad configuration or out-of-range parameters: exit status 1.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Evaluation failed at a specific point; carries the exit status to report.
class RunError : public std::runtime_error
{
public:
    RunError(const std::string& what, int code) : std::runtime_error(what), exit_code(code) {}
    int exit_code;
};

enum class Task
{
    spectrum,
    limits,
    optimize,
    bandwidth,
    sweep
};

enum class Axis
{
    eps_read,
    eps_int,
    eps_inj,
    beta_db,
    q,
    zeta,
    omega
};

enum class Scale
{
    linear,
    log
};

enum class Format
{
    csv,
    json
};

inline constexpr const char* task_names[] = {"spectrum", "limits", "optimize", "bandwidth", "sweep"};
inline constexpr const char* axis_names[] = {"eps_read", "eps_int", "eps_inj", "beta_db", "q", "zeta", "omega"};

inline const char* to_string(Task t) { return task_names[static_cast<int>(t)]; }
inline const char* to_string(Axis a) { return axis_names[static_cast<int>(a)]; }

struct Range
{
    double start = 0.0;
    double stop = 0.0;
    std::size_t points = 0;
    Scale scale = Scale::linear;

    std::vector<double> values() const
    {
        return scale == Scale::log ? log_grid(start, stop, points) : linear_grid(start, stop, points);
    }
};

struct SweepSpec
{
    Axis axis = Axis::eps_read;
    Range range;
};

// Optional outer loop producing one curve per value.
struct SeriesSpec
{
    Axis axis = Axis::beta_db;
    std::vector<double> values;
};

struct ScenarioConfig
{
    CavityParams cavity;
    SqueezeSettings squeeze;
    std::vector<Model> models{Model::single_mode};
    std::string model_name = "single_mode";
    Task task = Task::limits;
    double omega = 0.0;
    std::optional<SweepSpec> sweep;
    std::optional<Range> frequency;
    std::optional<SeriesSpec> series;
    std::string output_path;
    Format format = Format::csv;

    // Normalised form (defaults filled in, output section excluded); its hash
    // identifies the computation.
    json canonical;

    std::string hash() const { return hex64(fnv1a64(canonical.dump())); }
};

namespace detail
{

inline std::string line_column(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    // nlohmann reports the byte after the offending token
    if (col > 1) --col;
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class Section
{
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail(path_.empty() ? "/" : path_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        for (const auto& item : j_.items()) {
            const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; });
            if (!known) fail(at(item.key()), "unknown key");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    double number(const char* key, double fallback) const
    {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        return v.get<double>();
    }

    std::size_t count(const char* key) const
    {
        const auto& v = required(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(at(key), "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    std::string text(const char* key, const std::string& fallback) const
    {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }

    template <std::size_t N>
    int choice(const char* key, const char* const (&names)[N], const std::string& fallback) const
    {
        const std::string v = text(key, fallback);
        for (std::size_t i = 0; i < N; ++i)
            if (v == names[i]) return static_cast<int>(i);
        std::string allowed;
        for (std::size_t i = 0; i < N; ++i) allowed += (i ? ", " : "") + std::string(names[i]);
        fail(at(key), "'" + v + "' is not one of " + allowed);
    }

    const json& required(const char* key) const
    {
        if (!has(key)) fail(at(key), "missing required key");
        return j_.at(key);
    }

    Section child(const char* key) const { return Section(j_.at(key), at(key)); }
    std::string at(const std::string& key) const { return path_ + "/" + key; }

    [[noreturn]] static void fail(const std::string& pointer, const std::string& msg)
    {
        throw ConfigError(pointer + ": " + msg);
    }

private:
    const json& j_;
    std::string path_;
};

inline Range parse_range(const Section& s)
{
    s.allow({"start", "stop", "points", "scale"});
    Range r;
    r.start = s.number("start", NAN);
    r.stop = s.number("stop", NAN);
    s.required("start");
    s.required("stop");
    r.points = s.count("points");
    const char* const scales[] = {"linear", "log"};
    r.scale = static_cast<Scale>(s.choice("scale", scales, "linear"));
    if (!(r.start < r.stop)) Section::fail(s.at("stop"), "range needs start < stop");
    if (r.points < 2) Section::fail(s.at("points"), "range needs at least 2 points");
    if (r.scale == Scale::log && !(r.start > 0.0)) Section::fail(s.at("start"), "logarithmic range needs start > 0");
    return r;
}

inline json range_json(const Range& r)
{
    return {{"start", r.start}, {"stop", r.stop}, {"points", r.points},
            {"scale", r.scale == Scale::log ? "log" : "linear"}};
}

}  // namespace detail

// Parses JSON configuration text. Syntax errors report line and column,
// field errors a JSON-pointer path.
inline ScenarioConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error at " + detail::line_column(text, e.byte) + ": " + e.what());
    }

    using detail::Section;
    const Section top(root, "");
    top.allow({"cavity", "squeeze", "model", "task", "omega", "sweep", "frequency", "series", "output"});

    ScenarioConfig c;
    if (top.has("cavity")) {
        const auto s = top.child("cavity");
        s.allow({"t_c", "eps_int", "eps_read", "eps_inj", "tau", "length", "power", "wavelength"});
        auto& p = c.cavity;
        p.t_c = s.number("t_c", p.t_c);
        p.eps_int = s.number("eps_int", p.eps_int);
        p.eps_read = s.number("eps_read", p.eps_read);
        p.eps_inj = s.number("eps_inj", p.eps_inj);
        p.tau = s.number("tau", p.tau);
        p.length = s.number("length", p.length);
        p.power = s.number("power", p.power);
        p.wavelength = s.number("wavelength", p.wavelength);
    }
    if (top.has("squeeze")) {
        const auto s = top.child("squeeze");
        s.allow({"q", "beta", "beta_db", "zeta"});
        if (s.has("beta") && s.has("beta_db")) Section::fail("/squeeze", "give either beta or beta_db, not both");
        c.squeeze.q = s.number("q", 0.0);
        c.squeeze.beta = s.has("beta_db") ? db_to_power(s.number("beta_db", 0.0)) : s.number("beta", 1.0);
        c.squeeze.zeta = s.number("zeta", 1.0);
    }

    const char* const models[] = {"single_mode", "full", "both"};
    const int m = top.choice("model", models, "single_mode");
    c.model_name = models[m];
    c.models = m == 2 ? std::vector<Model>{Model::single_mode, Model::full}
                      : std::vector<Model>{m == 1 ? Model::full : Model::single_mode};

    c.task = static_cast<Task>(top.choice("task", task_names, "limits"));
    c.omega = top.number("omega", 0.0);
    if (!(c.omega >= 0.0)) Section::fail("/omega", "expected a non-negative frequency");

    if (top.has("sweep")) {
        const auto s = top.child("sweep");
        SweepSpec sw;
        s.required("axis");
        sw.axis = static_cast<Axis>(s.choice("axis", axis_names, ""));
        // the axis key is validated by choice(); the remaining keys form the range
        json rest = root.at("sweep");
        rest.erase("axis");
        sw.range = detail::parse_range(Section(rest, "/sweep"));
        c.sweep = sw;
    }
    if (c.task == Task::sweep && !c.sweep) Section::fail("/sweep", "task 'sweep' needs a sweep section");
    if (c.task != Task::sweep && c.sweep) Section::fail("/sweep", "only task 'sweep' takes a sweep section");

    if (top.has("frequency")) {
        if (c.task != Task::spectrum) Section::fail("/frequency", "only task 'spectrum' takes a frequency grid");
        c.frequency = detail::parse_range(top.child("frequency"));
    }

    if (top.has("series")) {
        const auto s = top.child("series");
        s.allow({"axis", "values"});
        SeriesSpec se;
        s.required("axis");
        se.axis = static_cast<Axis>(s.choice("axis", axis_names, ""));
        const auto& v = s.required("values");
        if (!v.is_array() || v.empty()) Section::fail("/series/values", "expected a non-empty array of numbers");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) Section::fail("/series/values/" + std::to_string(i), "expected a number");
            se.values.push_back(v[i].get<double>());
        }
        if (c.sweep && c.sweep->axis == se.axis) Section::fail("/series/axis", "series and sweep use the same axis");
        c.series = se;
    }

    if (top.has("output")) {
        const auto s = top.child("output");
        s.allow({"path", "format"});
        c.output_path = s.text("path", "");
        const char* const formats[] = {"csv", "json"};
        c.format = static_cast<Format>(s.choice("format", formats, "csv"));
    }

    const auto report = validate(c.cavity, SqueezeSettings{0.0, c.squeeze.beta, c.squeeze.zeta});
    if (!report.ok()) throw ConfigError("invalid parameters: " + report.describe());

    const auto& p = c.cavity;
    c.canonical = {{"cavity",
                    {{"t_c", p.t_c},
                     {"eps_int", p.eps_int},
                     {"eps_read", p.eps_read},
                     {"eps_inj", p.eps_inj},
                     {"tau", p.tau},
                     {"length", p.length},
                     {"power", p.power},
                     {"wavelength", p.wavelength}}},
                   {"squeeze", {{"q", c.squeeze.q}, {"beta", c.squeeze.beta}, {"zeta", c.squeeze.zeta}}},
                   {"model", c.model_name},
                   {"task", to_string(c.task)},
                   {"omega", c.omega}};
    if (c.sweep) {
        auto s = detail::range_json(c.sweep->range);
        s["axis"] = to_string(c.sweep->axis);
        c.canonical["sweep"] = s;
    }
    if (c.frequency) c.canonical["frequency"] = detail::range_json(*c.frequency);
    if (c.series) c.canonical["series"] = {{"axis", to_string(c.series->axis)}, {"values", c.series->values}};
    return c;
}

inline ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// One evaluated point.
struct ResultRow
{
    double axis_value = 0.0;
    double series_value = NAN;
    Model model = Model::single_mode;
    CavityParams cavity;
    SqueezeSettings squeeze;
    double omega = 0.0;
    double s_hh = 0.0;
    double s_hh_norm = 0.0;  // S_hh / N0
    double q_opt = 0.0;      // analytic single-mode optimum (clamped)
    double q_star = 0.0;     // numeric optimum of this model at this omega
    double omega_hwhm = 0.0;
    double sbp = 0.0;
    double snr_gain = 0.0;
    double qcrb = 0.0;
    double ref_q0 = 0.0;
    double at_threshold = 0.0;
    double optimal = 0.0;
    double decoherence_limit = 0.0;
};

inline const std::vector<std::string>& row_columns()
{
    static const std::vector<std::string> cols{
        "axis_value", "series_value", "model",  "t_c",    "q",          "beta",   "zeta",     "eps_read",
        "eps_int",    "eps_inj",      "omega",  "S_hh",   "S_hh_norm",  "q_opt",  "q_star",   "omega_hwhm",
        "sbp",        "snr_gain",     "qcrb",   "ref_q0", "at_threshold", "optimal", "decoherence_limit"};
    return cols;
}

inline std::vector<std::string> row_cells(const ResultRow& r)
{
    const auto f = format_number;
    const auto& p = r.cavity;
    return {f(r.axis_value), f(r.series_value), to_string(r.model), f(p.t_c),        f(r.squeeze.q),
            f(r.squeeze.beta), f(r.squeeze.zeta), f(p.eps_read),    f(p.eps_int),     f(p.eps_inj),
            f(r.omega),       f(r.s_hh),         f(r.s_hh_norm),    f(r.q_opt),       f(r.q_star),
            f(r.omega_hwhm),  f(r.sbp),          f(r.snr_gain),     f(r.qcrb),        f(r.ref_q0),
            f(r.at_threshold), f(r.optimal),     f(r.decoherence_limit)};
}

inline void apply_axis(Axis a, double v, CavityParams& p, SqueezeSettings& s, double& omega)
{
    switch (a) {
        case Axis::eps_read: p.eps_read = v; break;
        case Axis::eps_int: p.eps_int = v; break;
        case Axis::eps_inj: p.eps_inj = v; break;
        case Axis::beta_db: s.beta = db_to_power(v); break;
        case Axis::q: s.q = v; break;
        case Axis::zeta: s.zeta = v; break;
        case Axis::omega: omega = v; break;
    }
}

inline ResultRow evaluate_point(const CavityParams& p, const SqueezeSettings& s, double omega, Model model)
{
    ensure_valid(p, s);
    ResultRow r;
    r.model = model;
    r.cavity = p;
    r.squeeze = s;
    r.omega = omega;
    r.s_hh = sensitivity(p, s, omega, model);
    r.s_hh_norm = r.s_hh / strain_prefactor(p);
    bool clamped = false;
    r.q_opt = single_mode::clamp_gain(p, single_mode::optimal_gain_unclamped(p, s.beta, s.zeta), clamped);
    r.q_star = numeric_optimal_gain(p, s, omega, model).q_star;
    const auto bw = bandwidth(p, s, model);
    r.omega_hwhm = bw.omega_hwhm;
    r.sbp = bw.sbp;
    r.snr_gain = snr_gain(p, s, omega, model);
    r.qcrb = single_mode::qcrb(p, s);
    r.ref_q0 = single_mode::limit_q0(p, s.beta);
    r.at_threshold = single_mode::limit_threshold(p);
    r.optimal = single_mode::full_opt_sensitivity(p, s.beta, s.zeta, 0.0);
    r.decoherence_limit = single_mode::decoherence_limit(p);
    return r;
}

inline json limits_json(const single_mode::LimitReport& r)
{
    auto opt = [](const std::optional<double>& v) { return v ? json(round_12(*v)) : json(nullptr); };
    return {{"n0", round_12(r.n0)},
            {"qcrb", round_12(r.qcrb)},
            {"qcrb_model", round_12(r.qcrb_model)},
            {"qcrb_ratio", round_12(r.qcrb_ratio)},
            {"ref_q0", round_12(r.ref_q0)},
            {"ref_no_isqz_nosqz", round_12(r.ref_no_isqz_nosqz)},
            {"ref_no_isqz_infsqz", round_12(r.ref_no_isqz_infsqz)},
            {"at_threshold", round_12(r.at_threshold)},
            {"optimal", round_12(r.optimal)},
            {"optimal_norm", round_12(r.optimal / r.n0)},
            {"q_opt", round_12(r.q_opt)},
            {"q_opt_clamped", r.q_opt_clamped},
            {"q_opt_uncorrected", round_12(r.q_opt_uncorrected)},
            {"decoherence_limit", round_12(r.decoherence_limit)},
            {"full_opt", round_12(r.full_opt)},
            {"inj_limit", round_12(r.inj_limit)},
            {"zeta_inf_limit", round_12(r.zeta_inf_limit)},
            {"output_amp_only_limit", round_12(r.output_amp_only_limit)},
            {"q_opt_sign_change_eps_read", opt(r.q_opt_sign_change_eps_read)},
            {"q_opt_uncorrected_sign_change_eps_read", opt(r.q_opt_uncorrected_sign_change_eps_read)}};
}

inline json row_json(const ResultRow& r)
{
    const auto cols = row_columns();
    const auto cells = row_cells(r);
    json o = json::object();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "model") {
            o[cols[i]] = cells[i];
            continue;
        }
        const double v = std::strtod(cells[i].c_str(), nullptr);
        o[cols[i]] = std::isfinite(v) ? json(v) : json(nullptr);
    }
    return o;
}

struct RunResult
{
    std::vector<ResultRow> rows;
    std::vector<std::pair<double, single_mode::LimitReport>> limits;  // per series value
};

// Worker count: SQUEEZELIM_THREADS if set (>= 1), else hardware concurrency.
inline std::size_t thread_count(std::size_t jobs)
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SQUEEZELIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

inline std::vector<double> axis_values(const ScenarioConfig& c)
{
    if (c.sweep) return c.sweep->range.values();
    if (c.task == Task::spectrum) return c.frequency ? c.frequency->values() : default_frequency_grid(c.cavity);
    return {c.omega};
}

inline RunResult run(const ScenarioConfig& c)
{
    struct Job
    {
        double series_value;
        double axis_value;
        Model model;
    };
    const std::vector<double> series = c.series ? c.series->values : std::vector<double>{NAN};
    const auto axis = axis_values(c);
    const Axis axis_kind = c.sweep ? c.sweep->axis : Axis::omega;

    std::vector<Job> jobs;
    for (double sv : series)
        for (double av : axis)
            for (Model m : c.models) jobs.push_back({sv, av, m});

    auto point_of = [&](const Job& j, CavityParams& p, SqueezeSettings& s, double& omega) {
        p = c.cavity;
        s = c.squeeze;
        omega = c.omega;
        if (c.series) apply_axis(c.series->axis, j.series_value, p, s, omega);
        apply_axis(axis_kind, j.axis_value, p, s, omega);
    };
    auto describe = [&](std::size_t i) {
        const auto& j = jobs[i];
        std::ostringstream os;
        os << "point " << i << " (";
        if (c.series) os << to_string(c.series->axis) << "=" << format_number(j.series_value) << ", ";
        os << to_string(axis_kind) << "=" << format_number(j.axis_value) << ", model=" << to_string(j.model) << ")";
        return os.str();
    };

    std::vector<ResultRow> rows(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                CavityParams p;
                SqueezeSettings s;
                double omega = 0.0;
                point_of(jobs[i], p, s, omega);
                rows[i] = evaluate_point(p, s, omega, jobs[i].model);
                rows[i].axis_value = jobs[i].axis_value;
                rows[i].series_value = jobs[i].series_value;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = thread_count(jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // report the first failing point in output order, independent of scheduling
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ThresholdError& e) {
            throw RunError(describe(i) + ": threshold: " + e.what(), 2);
        } catch (const NonConvergence& e) {
            throw RunError(describe(i) + ": no convergence: " + e.what(), 2);
        } catch (const BracketError& e) {
            throw RunError(describe(i) + ": no bracket: " + e.what(), 2);
        } catch (const std::invalid_argument& e) {
            throw RunError(describe(i) + ": out of range: " + e.what(), 1);
        }
    }

    RunResult out;
    out.rows = std::move(rows);
    if (c.task == Task::limits) {
        for (double sv : series) {
            CavityParams p = c.cavity;
            SqueezeSettings s = c.squeeze;
            double omega = c.omega;
            if (c.series) apply_axis(c.series->axis, sv, p, s, omega);
            out.limits.emplace_back(sv, single_mode::limit_report(p, s, omega));
        }
    }
    return out;
}

inline std::vector<std::string> header_lines(const ScenarioConfig& c)
{
    std::vector<std::string> h{std::string("squeezelim ") + version, "config_hash fnv1a64:" + c.hash(),
                               sbp_definition, std::string("task ") + to_string(c.task) + ", model " + c.model_name};
    const Axis axis_kind = c.sweep ? c.sweep->axis : Axis::omega;
    std::string axis = std::string("axis ") + to_string(axis_kind);
    if (c.series) axis += std::string(", series ") + to_string(c.series->axis);
    h.push_back(axis);
    return h;
}

inline void write_output(std::ostream& os, const ScenarioConfig& c, const RunResult& r)
{
    if (c.format == Format::json) {
        json doc;
        doc["squeezelim"] = version;
        doc["config_hash"] = "fnv1a64:" + c.hash();
        doc["sbp_definition"] = sbp_definition;
        doc["config"] = c.canonical;
        doc["columns"] = row_columns();
        doc["rows"] = json::array();
        for (const auto& row : r.rows) doc["rows"].push_back(row_json(row));
        if (!r.limits.empty()) {
            doc["limits"] = json::array();
            for (const auto& [sv, rep] : r.limits) {
                auto l = limits_json(rep);
                l["series_value"] = std::isfinite(sv) ? json(sv) : json(nullptr);
                doc["limits"].push_back(l);
            }
        }
        os << doc.dump(2) << '\n';
        return;
    }

    Table t;
    t.comments = header_lines(c);
    for (const auto& [sv, rep] : r.limits) {
        const auto l = limits_json(rep);
        std::string line = "limits";
        if (std::isfinite(sv)) line += " series_value=" + format_number(sv);
        for (const auto& item : l.items()) line += " " + item.key() + "=" + item.value().dump();
        t.comments.push_back(line);
    }
    t.columns = row_columns();
    for (const auto& row : r.rows) t.add_row(row_cells(row));
    write_csv(os, t);
}

}  // namespace squeezelim::scenario

#endif
