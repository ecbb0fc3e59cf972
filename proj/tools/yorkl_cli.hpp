#ifndef YORKL_CLI_HPP
#define YORKL_CLI_HPP

// Command-line front end. run_cli() is the whole program; main() only
// forwards to it so the tests can drive it in-process.
//
//   yorkl eval       --target T [params]     one value
//   yorkl crosscheck --name N [params]       one CrossCheckReport
//   yorkl suite      --name S [--nmax N]     a module's invariant grid
//   yorkl table      --target T [grids]      rows over a grid
//
// Exit status: 0 success, 1 failed check or unconverged value, 2 usage or
// parameter-window error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "yorkl/bessel.hpp"
#include "yorkl/kl.hpp"
#include "yorkl/polys.hpp"
#include "yorkl/quadrature.hpp"
#include "yorkl/report.hpp"
#include "yorkl/suites.hpp"
#include "yorkl/yor.hpp"

namespace yorkl::cli {

using json = nlohmann::json;

enum class Format { json, csv };

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> params;
    QuadratureSpec spec;
    std::optional<double> tolerance;
    Format format = Format::json;
    std::string output_path;
};

/// Bad command line or parameters; exit status 2.
class usage_error : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------- parsing

inline double parse_number(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw usage_error("--" + key + ": not a number: '" + text + "'");
    return v;
}

inline int parse_int(const std::string& key, const std::string& text)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw usage_error("--" + key + ": not an integer: '" + text + "'");
    return v;
}

/// `min:max:steps` with both ends included, or a single number.
inline std::vector<double> parse_grid(const std::string& key, const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(item);
    if (!text.empty() && text.back() == ':')
        parts.push_back("");
    if (parts.size() == 1)
        return {parse_number(key, parts[0])};
    if (parts.size() != 3)
        throw usage_error("--" + key + ": grid must be min:max:steps, got '" + text + "'");
    const double lo = parse_number(key, parts[0]);
    const double hi = parse_number(key, parts[1]);
    const int steps = parse_int(key, parts[2]);
    if (!(lo < hi))
        throw usage_error("--" + key + ": grid needs min < max");
    if (steps < 2)
        throw usage_error("--" + key + ": grid needs at least 2 steps");
    std::vector<double> g(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
    g.back() = hi;
    return g;
}

inline const std::string& require(const RunConfig& cfg, const std::string& key)
{
    const auto it = cfg.params.find(key);
    if (it == cfg.params.end() || it->second.empty())
        throw usage_error(cfg.command + ": missing --" + key);
    return it->second;
}

inline double num_param(const RunConfig& cfg, const std::string& key) { return parse_number(key, require(cfg, key)); }

inline double num_param(const RunConfig& cfg, const std::string& key, double fallback)
{
    const auto it = cfg.params.find(key);
    return it == cfg.params.end() || it->second.empty() ? fallback : parse_number(key, it->second);
}

inline int int_param(const RunConfig& cfg, const std::string& key) { return parse_int(key, require(cfg, key)); }

inline int int_param(const RunConfig& cfg, const std::string& key, int fallback)
{
    const auto it = cfg.params.find(key);
    return it == cfg.params.end() || it->second.empty() ? fallback : parse_int(key, it->second);
}

// --------------------------------------------------------------- emission

/// Shortest decimal that reads back to the same double. Both formats use it.
inline std::string number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// One output table: named columns, rows of already formatted cells. Cells
/// flagged as strings are quoted in JSON; everything else is a JSON number.
struct Table {
    std::vector<std::string> columns;
    std::vector<bool> is_string;
    std::vector<std::vector<std::string>> rows;
};

inline json cell_json(const std::string& cell, bool is_string)
{
    if (is_string)
        return cell;
    if (cell == "true" || cell == "false")
        return cell == "true";
    if (cell == "nan" || cell == "inf" || cell == "-inf")
        return nullptr;
    return json::parse(cell);
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline void write_table(std::ostream& os, const Table& t, Format f)
{
    if (f == Format::csv) {
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            os << (i ? "," : "") << t.columns[i];
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << csv_escape(row[i]);
            os << '\n';
        }
        return;
    }
    for (const auto& row : t.rows) {
        json j = json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            j[t.columns[i]] = cell_json(row[i], t.is_string[i]);
        os << j.dump() << '\n';
    }
}

inline Table report_table(const std::vector<CrossCheckReport>& reports)
{
    Table t{{"context", "lhs", "rhs", "rel_diff", "tolerance", "passed"}, {true, false, false, false, false, false}, {}};
    for (const auto& r : reports)
        t.rows.push_back({r.context, number(r.lhs), number(r.rhs), number(r.rel_diff), number(r.tolerance),
                          r.passed ? "true" : "false"});
    return t;
}

/// Wall time and command go in a record of their own, never in the data.
inline void write_meta(std::ostream& data, std::ostream& err, const RunConfig& cfg, double seconds, Format f)
{
    json meta = {{"meta", {{"command", cfg.command}, {"wall_time_s", seconds}}}};
    if (f == Format::json)
        data << meta.dump() << '\n';
    else
        err << "# " << meta.dump() << '\n';
}

inline std::filesystem::path output_dir()
{
    const char* env = std::getenv("YORKL_OUTPUT_DIR");
    return env && *env ? std::filesystem::path(env) : std::filesystem::path(".");
}

/// Relative output paths are placed under $YORKL_OUTPUT_DIR when it is set.
inline std::filesystem::path resolve_output(const std::string& path)
{
    std::filesystem::path p(path);
    if (p.is_relative() && std::getenv("YORKL_OUTPUT_DIR"))
        p = output_dir() / p;
    return p;
}

inline std::unique_ptr<std::ofstream> open_output(const std::filesystem::path& p)
{
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    auto f = std::make_unique<std::ofstream>(p);
    if (!*f)
        throw std::runtime_error("cannot open output file " + p.string());
    return f;
}

// --------------------------------------------------------------- commands

/// Evaluates `fn(i)` for i < count on up to hardware_concurrency threads and
/// returns the results in index order.
template <class T, class Fn>
std::vector<T> ordered_parallel(std::size_t count, Fn fn)
{
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto& th : pool)
        th.join();
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i])
            std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

struct EvalRecord {
    Table table;
    bool converged = true;
};

inline EvalRecord eval_record(const RunConfig& cfg)
{
    const std::string& target = require(cfg, "target");
    const QuadratureSpec& spec = cfg.spec;
    auto single = [](std::vector<std::string> cols, std::vector<std::string> cells, std::vector<bool> str) {
        return Table{std::move(cols), std::move(str), {std::move(cells)}};
    };
    if (target == "yor_direct" || target == "yor_spectral" || target == "yor_polyseries") {
        const double r = num_param(cfg, "r"), t = num_param(cfg, "t");
        DensityPoint p;
        if (target == "yor_direct")
            p = yor_direct(r, t, spec);
        else if (target == "yor_spectral")
            p = yor_spectral(r, t, spec);
        else
            p = yor_polyseries(r, t, int_param(cfg, "K", yor_max_series_terms), spec);
        const double scale = std::max(spec.rel_tol * std::abs(p.value), spec.abs_tol);
        const bool ok = target == "yor_polyseries" || p.error_estimate <= scale;
        return {single({"target", "r", "t", "value", "error_estimate", "method"},
                       {target, number(r), number(t), number(p.value), number(p.error_estimate), to_string(p.method)},
                       {true, false, false, false, false, true}),
                ok};
    }
    if (target == "bessel_k_imag") {
        const double tau = num_param(cfg, "tau"), x = num_param(cfg, "x");
        const auto res = bessel_k_imag_scaled_result(tau, x);
        const double e = std::exp(-x);
        return {single({"target", "tau", "x", "value", "error_estimate", "method"},
                       {target, number(tau), number(x), number(e * res.value), number(e * res.error_estimate),
                        detail::use_series(tau, x) ? "series" : "trapezoid"},
                       {true, false, false, false, false, true}),
                res.converged};
    }
    if (target == "bessel_k_real") {
        const double nu = num_param(cfg, "nu"), x = num_param(cfg, "x");
        return {single({"target", "nu", "x", "value", "method"},
                       {target, number(nu), number(x), number(bessel_k_real(nu, x)), "trapezoid"},
                       {true, false, false, false, true}),
                true};
    }
    if (target == "poly_eval") {
        const int n = int_param(cfg, "n");
        if (n < 0)
            throw usage_error("eval: --n must be >= 0");
        const double x = num_param(cfg, "x");
        return {single({"target", "n", "x", "value", "method"},
                       {target, std::to_string(n), number(x), number(poly_eval(poly_recurrence(n), x)), "exact"},
                       {true, false, false, false, true}),
                true};
    }
    if (target == "heat_kernel") {
        const double t = num_param(cfg, "t"), x = num_param(cfg, "x"), y = num_param(cfg, "y");
        const auto h = heat_kernel(t, x, y, spec);
        return {single({"target", "t", "x", "y", "value", "method"},
                       {target, number(t), number(x), number(y), number(h.value), "spectral"},
                       {true, false, false, false, false, true}),
                true};
    }
    if (target == "kl_forward") {
        const double tau = num_param(cfg, "tau");
        const std::string f = cfg.params.count("f") && !cfg.params.at("f").empty() ? cfg.params.at("f") : "exp";
        EvalResult res;
        if (f == "one")
            res = detail::kl_forward_result([](double) { return 1.0; }, tau, spec);
        else if (f == "exp")
            res = detail::kl_forward_result([](double r) { return std::exp(-r); }, tau, spec);
        else if (f == "yor") {
            const double t = num_param(cfg, "t");
            detail::check_time(t, "kl_forward");
            res = detail::kl_forward_result([&](double r) { return detail::yor_direct_unchecked(r, t, spec.nested()).value; },
                                            tau, spec);
        } else
            throw usage_error("eval: --f must be one of one, exp, yor");
        return {single({"target", "f", "tau", "value", "error_estimate", "method"},
                       {target, f, number(tau), number(res.value), number(res.error_estimate), "quadrature"},
                       {true, true, false, false, false, true}),
                res.converged};
    }
    throw usage_error("eval: unknown --target '" + target + "'");
}

inline CrossCheckReport crosscheck_report(const RunConfig& cfg)
{
    const std::string& name = require(cfg, "name");
    const QuadratureSpec& spec = cfg.spec;
    if (name == "direct_spectral") {
        const double r = num_param(cfg, "r"), t = num_param(cfg, "t");
        std::ostringstream ctx;
        ctx << "direct vs spectral F_" << t << "(" << r << ")";
        return make_report(ctx.str(), yor_direct(r, t, spec).value, yor_spectral(r, t, spec).value, 1e-8);
    }
    if (name == "kl_image")
        return yor_kl_image(num_param(cfg, "tau"), num_param(cfg, "t"), spec);
    if (name == "squared_norm")
        return yor_squared_norm(num_param(cfg, "t"), spec);
    if (name == "diffusion")
        return diffusion_residual(num_param(cfg, "r"), num_param(cfg, "t"), spec);
    if (name == "diffusion_rf")
        return diffusion_residual_rf(num_param(cfg, "r"), num_param(cfg, "t"), spec);
    if (name == "derivative_bound")
        return derivative_bound_check(num_param(cfg, "r"), num_param(cfg, "t"), int_param(cfg, "m", 0), spec);
    if (name == "macdonald")
        return macdonald_check(num_param(cfg, "tau"), num_param(cfg, "x"), num_param(cfg, "y"), spec);
    if (name == "semigroup")
        return semigroup_check(num_param(cfg, "t1"), num_param(cfg, "t2"), num_param(cfg, "r"), spec);
    if (name == "index_law")
        return index_law_check(num_param(cfg, "t1"), num_param(cfg, "t2"), num_param(cfg, "r"), spec);
    if (name == "heat_symmetry") {
        const double t = num_param(cfg, "t"), x = num_param(cfg, "x"), y = num_param(cfg, "y");
        std::ostringstream ctx;
        ctx << "x h_t(x,y) = y h_t(y,x) at t=" << t << ", x=" << x << ", y=" << y;
        return make_report(ctx.str(), x * heat_kernel(t, x, y, spec).value, y * heat_kernel(t, y, x, spec).value,
                           1e-10);
    }
    if (name == "generating")
        return generating_check(num_param(cfg, "x"), num_param(cfg, "t"), int_param(cfg, "N", 20));
    if (name == "bernoulli")
        return verify_bernoulli_integral(int_param(cfg, "n"), spec);
    if (name == "poly_kl_image")
        return poly_kl_image(int_param(cfg, "n"), num_param(cfg, "tau"), spec);
    if (name == "polyseries") {
        const double r = num_param(cfg, "r"), t = num_param(cfg, "t");
        const int K = int_param(cfg, "K", yor_max_series_terms);
        std::ostringstream ctx;
        ctx << "polynomial expansion K=" << K << " at r=" << r << ", t=" << t;
        return make_report(ctx.str(), yor_polyseries(r, t, K, spec).value, yor_spectral(r, t, spec).value, 1e-3);
    }
    throw usage_error("crosscheck: unknown --name '" + name + "'");
}

inline CheckSuite run_suite(const RunConfig& cfg)
{
    const std::string& name = require(cfg, "name");
    const int n_max = int_param(cfg, "nmax", 20);
    if (n_max < 1)
        throw usage_error("suite: --nmax must be >= 1");
    if (name == "polys")
        return polys_suite(n_max, cfg.spec);
    if (name == "bessel")
        return bessel_suite();
    if (name == "yor")
        return yor_suite(cfg.spec);
    if (name == "kl")
        return kl_suite(cfg.spec);
    if (name == "all")
        return all_suites(n_max, cfg.spec);
    throw usage_error("suite: --name must be one of polys, bessel, yor, kl, all");
}

inline Table table_rows(const RunConfig& cfg)
{
    const std::string& target = require(cfg, "target");
    if (target == "yor") {
        const auto rs = parse_grid("r", require(cfg, "r"));
        const auto ts = parse_grid("t", require(cfg, "t"));
        const std::string method = cfg.params.count("method") && !cfg.params.at("method").empty()
                                     ? cfg.params.at("method")
                                     : "spectral";
        if (method != "spectral" && method != "direct")
            throw usage_error("table: --method must be spectral or direct");
        // check the whole grid before starting any work
        for (double t : ts)
            for (double r : rs)
                detail::check_window(r, t, "table");
        struct Point {
            double r, t;
        };
        std::vector<Point> pts;
        for (double t : ts)
            for (double r : rs)
                pts.push_back({r, t});
        const QuadratureSpec spec = cfg.spec;
        auto rows = ordered_parallel<std::vector<std::string>>(pts.size(), [&](std::size_t i) {
            const auto p = method == "direct" ? yor_direct(pts[i].r, pts[i].t, spec) : yor_spectral(pts[i].r, pts[i].t, spec);
            return std::vector<std::string>{number(p.r), number(p.t), number(p.value), number(p.error_estimate)};
        });
        return {{"r", "t", "F", "err"}, {false, false, false, false}, std::move(rows)};
    }
    if (target == "coeffs") {
        const int n_max = int_param(cfg, "nmax");
        if (n_max < 0)
            throw usage_error("table: --nmax must be >= 0");
        auto polys = ordered_parallel<ExactPolynomial>(static_cast<std::size_t>(n_max) + 1,
                                                       [](std::size_t n) { return poly_recurrence(static_cast<int>(n)); });
        Table t{{"n", "k", "a"}, {false, false, true}, {}};
        for (int n = 0; n <= n_max; ++n)
            for (int k = 0; k <= n; ++k)
                t.rows.push_back({std::to_string(n), std::to_string(k), polys[static_cast<std::size_t>(n)].coeff(k).str()});
        return t;
    }
    if (target == "asymptotics") {
        const double x = num_param(cfg, "x", 1.0);
        const int n_max = int_param(cfg, "nmax", 25);
        if (n_max < 1)
            throw usage_error("table: --nmax must be >= 1");
        std::vector<double> betas{0.5, 1.0, 1.5};
        if (cfg.params.count("beta") && !cfg.params.at("beta").empty())
            betas = parse_grid("beta", cfg.params.at("beta"));
        const auto study = poly_asymptotic_study(x, betas, n_max);
        Table t{{"beta", "n", "x", "ratio", "step_ratio"}, {false, false, false, false, false}, {}};
        for (const auto& row : study)
            t.rows.push_back({number(row.beta), std::to_string(row.n), number(x), number(row.ratio), number(row.step_ratio)});
        return t;
    }
    throw usage_error("table: unknown --target '" + target + "'");
}

// ------------------------------------------------------------------ driver

inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    std::unique_ptr<std::ofstream> file;
    std::ostream* data = &out;
    auto redirect = [&](const std::filesystem::path& p) {
        file = open_output(p);
        data = file.get();
    };

    if (cfg.command == "suite") {
        const auto suite = run_suite(cfg);
        const std::string ext = cfg.format == Format::csv ? ".csv" : ".jsonl";
        const auto path = cfg.output_path.empty() ? output_dir() / ("suite-" + suite.name + ext)
                                                  : resolve_output(cfg.output_path);
        redirect(path);
        write_table(*data, report_table(suite.checks), cfg.format);
        write_meta(*data, err, cfg, elapsed(), cfg.format);
        std::size_t failed = 0;
        for (const auto& c : suite.checks)
            if (!c.passed) {
                ++failed;
                err << "FAIL " << c.context << " (lhs " << number(c.lhs) << ", rhs " << number(c.rhs) << ", tolerance "
                    << number(c.tolerance) << ")\n";
            }
        out << "suite " << suite.name << ": " << suite.checks.size() << " checks, " << failed << " failed; report "
            << path.string() << '\n';
        return failed == 0 ? 0 : 1;
    }

    if (!cfg.output_path.empty())
        redirect(resolve_output(cfg.output_path));

    if (cfg.command == "eval") {
        const auto rec = eval_record(cfg);
        write_table(*data, rec.table, cfg.format);
        write_meta(*data, err, cfg, elapsed(), cfg.format);
        if (!rec.converged)
            err << "eval: quadrature did not reach the requested tolerance\n";
        return rec.converged ? 0 : 1;
    }
    if (cfg.command == "crosscheck") {
        auto rep = crosscheck_report(cfg);
        if (cfg.tolerance && rep.tolerance > 0.0)
            rep = make_report(rep.context, rep.lhs, rep.rhs, *cfg.tolerance);
        write_table(*data, report_table({rep}), cfg.format);
        write_meta(*data, err, cfg, elapsed(), cfg.format);
        if (!rep.passed)
            err << "FAIL " << rep.context << '\n';
        return rep.passed ? 0 : 1;
    }
    if (cfg.command == "table") {
        write_table(*data, table_rows(cfg), cfg.format);
        write_meta(*data, err, cfg, elapsed(), cfg.format);
        return 0;
    }
    throw usage_error("unknown command '" + cfg.command + "'");
}

inline const std::vector<std::string>& param_keys()
{
    static const std::vector<std::string> keys{"target", "name", "r", "t", "tau", "x", "y", "nu", "n", "m", "K", "N",
                                               "t1", "t2", "nmax", "f", "method", "beta"};
    return keys;
}

/// Parses argv into a RunConfig. Throws CLI::ParseError (help included)
/// and usage_error.
inline RunConfig parse_args(int argc, const char* const* argv, std::ostream& out)
{
    CLI::App app{"Yor integral, Kontorovich-Lebedev transform and p_n toolkit"};
    app.set_config("--config", "", "key = value file with the same keys as the options");
    RunConfig cfg;
    app.add_option("command", cfg.command, "eval, crosscheck, suite or table")
        ->required()
        ->check(CLI::IsMember({"eval", "crosscheck", "suite", "table"}));
    for (const auto& key : param_keys())
        app.add_option("--" + key, cfg.params[key]);
    std::string format = "json";
    app.add_option("--format", format, "json (JSON lines) or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output", cfg.output_path, "output file; relative paths go under $YORKL_OUTPUT_DIR");
    app.add_option("--rel-tol", cfg.spec.rel_tol);
    app.add_option("--abs-tol", cfg.spec.abs_tol);
    app.add_option("--max-refinements", cfg.spec.max_refinements);
    app.add_option("--decades", cfg.spec.truncation_log_decades, "tail cut at 10^-decades");
    double tolerance = 0.0;
    auto* tol_opt = app.add_option("--tolerance", tolerance, "override the pass tolerance of a crosscheck");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        throw;
    }
    cfg.format = format == "csv" ? Format::csv : Format::json;
    if (tol_opt->count() > 0) {
        if (!(tolerance > 0.0))
            throw usage_error("--tolerance must be > 0");
        cfg.tolerance = tolerance;
    }
    try {
        cfg.spec.validate();
    } catch (const std::exception& e) {
        throw usage_error(e.what());
    }
    return cfg;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    try {
        const RunConfig cfg = parse_args(argc, argv, out);
        return execute(cfg, out, err);
    } catch (const CLI::CallForHelp&) {
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace yorkl::cli

#endif // YORKL_CLI_HPP
