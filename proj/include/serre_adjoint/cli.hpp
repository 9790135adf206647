#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adjoint.hpp"
#include "errors.hpp"
#include "form_spec.hpp"
#include "forms.hpp"
#include "lseries.hpp"
#include "petersson.hpp"
#include "qseries.hpp"
#include "spaces.hpp"
#include "verification.hpp"

namespace serre::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kComputation = 3 };

/// A parsed command line: the subcommand, its resolved parameters and the output format.
struct RunConfig {
    std::string command;
    nlohmann::json params = nlohmann::json::object();
    std::string output;

    nlohmann::json echo() const {
        nlohmann::json j = params;
        j["command"] = command;
        j["output"] = output;
        return j;
    }
};

class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::string dump(const nlohmann::json& j) { return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict); }

inline std::string decimal(double x, int digits = 17) {
    std::ostringstream s;
    s << std::setprecision(digits) << x;
    return s.str();
}

inline void require_output(const std::string& command, const std::string& output,
                           std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (output == a) return;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw UsageError(command + ": --output must be one of " + list);
}

inline std::pair<int, std::int64_t> parse_space(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw UsageError("--space must be 'k,N'");
    try {
        return {std::stoi(text.substr(0, comma)), std::stoll(text.substr(comma + 1))};
    } catch (const std::logic_error&) {
        throw UsageError("--space must be 'k,N' with integers");
    }
}

inline FormBuilder builder_for(const FormSpec& spec) {
    return [spec](std::size_t p) { return expand(spec, p); };
}

// --- commands --------------------------------------------------------------

inline void cmd_qexp(const RunConfig& c, std::ostream& out) {
    const auto spec = parse_form(c.params.at("form").get<std::string>());
    const auto prec = c.params.at("prec").get<std::size_t>();
    if (prec == 0) throw UsageError("qexp: --prec must be positive");
    const auto f = expand(spec, prec);
    if (c.output == "json") {
        out << dump({{"config", c.echo()}, {"form", to_json(spec)}, {"qexpansion", to_json(f)}}) << '\n';
    } else if (c.output == "csv") {
        out << "# config: " << dump(c.echo()) << '\n' << "n,coefficient\n";
        for (std::size_t n = 0; n < f.prec(); ++n) out << n << ',' << to_fraction_string(f[n]) << '\n';
    } else {
        out << "# config: " << dump(c.echo()) << '\n' << to_text(f);
    }
}

inline void cmd_lvalue(const RunConfig& c, std::ostream& out) {
    const auto spec = parse_form(c.params.at("form").get<std::string>());
    const int k = c.params.at("k").get<int>();
    const auto m = c.params.at("m").get<std::int64_t>();
    const double s = c.params.at("s").get<double>();
    const double tol = c.params.at("tol").get<double>();
    const auto l = shifted_L_auto(builder_for(spec), k, m, s, tol);
    nlohmann::json j{{"config", c.echo()},
                     {"m", l.m},
                     {"s", l.s},
                     {"value", l.value.convert_to<double>()},
                     {"value_decimal", to_decimal_string(l.value, 30)},
                     {"error_bound", l.error_bound},
                     {"horizon", l.horizon},
                     {"bound_kind", to_string(l.bound_kind)}};
    if (l.exact) j["exact"] = to_fraction_string(*l.exact);
    out << dump(j) << '\n';
}

inline void cmd_adjoint(const RunConfig& c, std::ostream& out) {
    const auto spec = parse_form(c.params.at("form").get<std::string>());
    const int k = c.params.at("k").get<int>();
    const auto level = c.params.at("level").get<std::int64_t>();
    const auto m_max = c.params.at("mmax").get<std::int64_t>();
    const double tol = c.params.at("tol").get<double>();
    if (m_max < 1) throw UsageError("adjoint: --mmax must be >= 1");
    const auto coeffs = adjoint_qexp_auto(builder_for(spec), k, level, m_max, tol);
    out << dump({{"config", c.echo()}, {"k", coeffs.k}, {"level", coeffs.level}, {"mu", coeffs.mu}}) << '\n';
    for (const auto& a : coeffs.coeffs) {
        nlohmann::json row{{"m", a.m},
                           {"c", a.value.convert_to<double>()},
                           {"c_decimal", to_decimal_string(a.value, 30)},
                           {"error_bound", a.error_bound}};
        if (a.exact_times_pi2) row["c_times_pi2_exact"] = to_fraction_string(*a.exact_times_pi2);
        out << dump(row) << '\n';
    }
}

inline void cmd_decompose(const RunConfig& c, std::ostream& out) {
    const auto spec = parse_form(c.params.at("form").get<std::string>());
    const auto [k, level] = parse_space(c.params.at("space").get<std::string>());
    const auto prec = c.params.at("prec").get<std::size_t>();
    const auto f = expand(spec, prec);
    const auto space = space_basis(k, level, prec);
    const auto coords = decompose(f, space);
    std::vector<std::string> fractions, decimals;
    for (const auto& x : coords) {
        fractions.push_back(to_fraction_string(x));
        decimals.push_back(decimal(to_double(x)));
    }
    if (c.output == "json") {
        out << dump({{"config", c.echo()},
                     {"space", {{"weight", k}, {"level", level}, {"dim", space.dim}}},
                     {"coordinates", fractions},
                     {"decimals", decimals}})
            << '\n';
        return;
    }
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    };
    out << "# config: " << dump(c.echo()) << '\n'
        << "space: S_" << k << "(Gamma_0(" << level << ")), dim " << space.dim << '\n'
        << "coordinates: " << join(fractions) << '\n'
        << "decimal: " << join(decimals) << '\n';
}

inline void cmd_petersson(const RunConfig& c, std::ostream& out) {
    const auto f = parse_form(c.params.at("f").get<std::string>());
    const auto g = parse_form(c.params.at("g").get<std::string>());
    QuadratureOptions opts;
    opts.nodes = c.params.at("nodes").get<int>();
    opts.y_cutoff = c.params.at("y_cutoff").get<double>();
    const auto est = petersson_inner(f, g, c.params.at("k").get<int>(), c.params.at("level").get<std::int64_t>(), opts);
    out << dump({{"config", c.echo()},
                 {"value", est.value.real()},
                 {"value_imag", est.value.imag()},
                 {"est_error", est.est_error},
                 {"cutoff_tail", est.cutoff_tail},
                 {"nodes", est.nodes},
                 {"y_cutoff", est.y_cutoff},
                 {"level", est.level},
                 {"mu", est.mu}})
        << '\n';
}

inline void emit_rows(const RunConfig& c, std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<nlohmann::json>>& rows, const nlohmann::json& summary) {
    if (c.output == "json") {
        out << dump({{"config", c.echo()}}) << '\n';
        for (const auto& row : rows) {
            nlohmann::json j;
            for (std::size_t i = 0; i < header.size(); ++i) j[header[i]] = row[i];
            out << dump(j) << '\n';
        }
        out << dump({{"summary", summary}}) << '\n';
        return;
    }
    out << "# config: " << dump(c.echo()) << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << (row[i].is_string() ? row[i].get<std::string>() : dump(row[i]));
        }
        out << '\n';
    }
    out << "# summary: " << dump(summary) << '\n';
}

inline void cmd_scan(const RunConfig& c, std::ostream& out) {
    const auto kind = c.params.at("kind").get<std::string>();
    const auto m_max = c.params.at("mmax").get<std::int64_t>();
    if (m_max < 1) throw UsageError("scan: --mmax must be >= 1");
    std::vector<std::vector<nlohmann::json>> rows;
    if (kind == "bound") {
        const auto report = bound_scan(m_max);
        for (const auto& r : report.rows)
            rows.push_back({r.m, r.tau.get_str(), to_fraction_string(r.l_value), decimal(r.scaled),
                            to_fraction_string(r.limit), r.pass});
        nlohmann::json summary{{"passed", report.passed()}};
        summary["first_violation"] = report.first_violation ? nlohmann::json(*report.first_violation) : nlohmann::json();
        emit_rows(c, out, {"m", "tau", "l_value", "scaled", "limit", "pass"}, rows, summary);
    } else if (kind == "sign") {
        const auto report = sign_scan(m_max);
        for (const auto& r : report.rows) rows.push_back({r.m, r.tau_sign, r.l_sign, r.consistent});
        nlohmann::json summary{{"passed", report.passed()},
                               {"tau_sign_changes", report.tau_sign_changes.size()},
                               {"l_sign_changes", report.l_sign_changes.size()}};
        summary["first_violation"] = report.first_violation ? nlohmann::json(*report.first_violation) : nlohmann::json();
        emit_rows(c, out, {"m", "tau_sign", "l_sign", "consistent"}, rows, summary);
    } else {
        const auto spec = parse_form(c.params.at("form").get<std::string>());
        const auto f = expand(spec, static_cast<std::size_t>(m_max) + 1);
        const auto report = deligne_check(f, f.weight(), static_cast<std::size_t>(m_max));
        const auto divisors = divisor_count_table(static_cast<std::size_t>(m_max) + 1);
        const double half = (f.weight() - 1) / 2.0;
        for (std::int64_t n = 1; n <= m_max; ++n) {
            const auto& a = f[static_cast<std::size_t>(n)];
            const double ratio = std::abs(to_double(a)) / (divisors[static_cast<std::size_t>(n)] *
                                                          std::pow(static_cast<double>(n), half));
            const Integer d = static_cast<unsigned long>(divisors[static_cast<std::size_t>(n)]);
            const bool pass = a.get_num() * a.get_num() <=
                              d * d * pow_integer(n, static_cast<unsigned long>(f.weight() - 1));
            rows.push_back({n, to_fraction_string(a), divisors[static_cast<std::size_t>(n)], decimal(ratio), pass});
        }
        nlohmann::json summary{{"passed", report.passed()}, {"max_ratio", report.max_ratio}, {"argmax", report.argmax}};
        summary["first_violation"] = report.first_violation ? nlohmann::json(*report.first_violation) : nlohmann::json();
        emit_rows(c, out, {"n", "a", "d", "ratio", "pass"}, rows, summary);
    }
}

}  // namespace detail

inline std::pair<int, std::string> run_captured(const std::vector<std::string>& args);

/// Executes a parsed configuration. Returns the process exit code.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command == "qexp") detail::cmd_qexp(config, out);
        else if (config.command == "lvalue") detail::cmd_lvalue(config, out);
        else if (config.command == "adjoint") detail::cmd_adjoint(config, out);
        else if (config.command == "decompose") detail::cmd_decompose(config, out);
        else if (config.command == "petersson") detail::cmd_petersson(config, out);
        else if (config.command == "scan") detail::cmd_scan(config, out);
        else if (config.command == "verify") {
            VerificationContext ctx;
            ctx.quadrature.nodes = config.params.at("nodes").get<int>();
            ctx.cli = run_captured;
            const auto ids = config.params.at("criteria").get<std::vector<int>>();
            for (int id : ids)
                if (id < 1 || id > kCriterionCount) throw UsageError("verify: --criterion must be in 1..11");
            const auto results = run_all_criteria(ctx, ids);
            bool all = true;
            if (config.output == "json") {
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& r : results) {
                    rows.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
                    all = all && r.passed;
                }
                out << detail::dump({{"config", config.echo()}, {"criteria", rows}, {"passed", all}}) << '\n';
            } else {
                out << "# config: " << detail::dump(config.echo()) << '\n';
                for (const auto& r : results) {
                    out << std::setw(3) << r.id << "  " << (r.passed ? "PASS" : "FAIL") << "  " << std::fixed
                        << std::setprecision(2) << std::setw(7) << r.seconds << "s  " << r.title << '\n'
                        << "               " << r.detail << '\n';
                    out.unsetf(std::ios::floatfield);
                    all = all && r.passed;
                }
                out << (all ? "all criteria PASS" : "some criteria FAIL") << '\n';
            }
            return all ? kOk : kVerifyFailed;
        } else {
            throw UsageError("unknown command '" + config.command + "'");
        }
        return kOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kUsage;
    } catch (const ComputationError& e) {
        err << "computation failed: " << e.what() << '\n';
        return kComputation;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kComputation;
    } catch (const nlohmann::json::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }
}

/// Parses argv-style arguments (without the program name) into a RunConfig.
/// Returns nullopt with an exit code when parsing ends the run (errors or --help).
inline std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                                           int& exit_code) {
    CLI::App app{"Serre derivative, its Petersson adjoint and shifted L-series"};
    app.name("serre_cli");
    app.require_subcommand(1, 1);

    std::string form, f_form, g_form, space, kind, output, tol_text = "1e-10";
    std::optional<int> k, nodes_opt;
    std::optional<std::int64_t> level, m, m_max;
    std::optional<double> s;
    std::optional<std::size_t> prec;
    double y_cutoff = 6.0;
    std::vector<int> criteria;

    auto* qexp = app.add_subcommand("qexp", "print a q-expansion");
    qexp->add_option("--form", form, "form expression")->required();
    qexp->add_option("--prec", prec, "number of coefficients (default 20)");
    qexp->add_option("--output", output, "text | json | csv (default text)");

    auto* lvalue = app.add_subcommand("lvalue", "shifted L-series L_{f,m}(s)");
    lvalue->add_option("--form", form, "form expression")->required();
    lvalue->add_option("--m", m, "shift m >= 1")->required();
    lvalue->add_option("--s", s, "evaluation point (default k+1)");
    lvalue->add_option("--k", k, "ambient weight k, the form has weight k+2 (default weight-2)");
    lvalue->add_option("--tol", tol_text, "absolute tolerance (default 1e-10)");
    lvalue->add_option("--output", output, "json");

    auto* adjoint = app.add_subcommand("adjoint", "coefficients of theta_k^* f");
    adjoint->add_option("--form", form, "form expression")->required();
    adjoint->add_option("--k", k, "k, the form has weight k+2 (default weight-2)");
    adjoint->add_option("--level", level, "group level N (default: form level)");
    adjoint->add_option("--mmax", m_max, "largest m")->required();
    adjoint->add_option("--tol", tol_text, "absolute tolerance on the L-values (default 1e-10)");
    adjoint->add_option("--output", output, "json (JSON Lines)");

    auto* dec = app.add_subcommand("decompose", "exact coordinates in a cusp-form basis");
    dec->add_option("--form", form, "form expression")->required();
    dec->add_option("--space", space, "k,N (default: form weight and level)");
    dec->add_option("--prec", prec, "coefficients compared (default 200)");
    dec->add_option("--output", output, "text | json (default text)");

    auto* pet = app.add_subcommand("petersson", "Petersson inner product by quadrature");
    pet->add_option("--f", f_form, "first form")->required();
    pet->add_option("--g", g_form, "second form (default f)");
    pet->add_option("--k", k, "weight (default weight of f)");
    pet->add_option("--level", level, "1 or 2 (default lcm of the form levels)");
    pet->add_option("--nodes", nodes_opt, "Gauss-Legendre nodes per dimension (default 64)");
    pet->add_option("--y-cutoff", y_cutoff, "truncation height (default 6)");
    pet->add_option("--output", output, "json");

    auto* scan = app.add_subcommand("scan", "scans over m: bound | sign | deligne");
    scan->add_option("--kind", kind, "bound | sign | deligne")->required()->check(CLI::IsMember({"bound", "sign", "deligne"}));
    scan->add_option("--mmax", m_max, "largest m (or n for deligne)")->required();
    scan->add_option("--form", form, "form for --kind deligne (default delta)");
    scan->add_option("--output", output, "csv | json (default csv)");

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    verify->add_option("--criterion", criteria, "criterion ids to run (default all)");
    verify->add_option("--nodes", nodes_opt, "quadrature nodes (default 64)");
    verify->add_option("--output", output, "text | json (default text)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        exit_code = app.exit(e, out, err);
        if (exit_code != 0) exit_code = kUsage;
        return std::nullopt;
    }

    RunConfig c;
    c.command = app.get_subcommands().front()->get_name();
    auto& p = c.params;
    auto parse_tol = [&]() {
        try {
            std::size_t used = 0;
            const double t = std::stod(tol_text, &used);
            if (used != tol_text.size()) throw std::invalid_argument("trailing");
            return t;
        } catch (const std::logic_error&) {
            throw UsageError("--tol must be a number");
        }
    };

    try {
        if (c.command == "qexp") {
            c.output = output.empty() ? "text" : output;
            detail::require_output("qexp", c.output, {"text", "json", "csv"});
            p["form"] = form;
            p["prec"] = prec.value_or(20);
        } else if (c.command == "lvalue" || c.command == "adjoint") {
            c.output = output.empty() ? "json" : output;
            detail::require_output(c.command, c.output, {"json"});
            const auto spec = parse_form(form);
            const int kk = k.value_or(spec.weight() - 2);
            p["form"] = form;
            p["k"] = kk;
            p["tol"] = parse_tol();
            if (c.command == "lvalue") {
                p["m"] = *m;
                p["s"] = s.value_or(kk + 1.0);
            } else {
                p["level"] = level.value_or(spec.level());
                p["mmax"] = *m_max;
            }
        } else if (c.command == "decompose") {
            c.output = output.empty() ? "text" : output;
            detail::require_output("decompose", c.output, {"text", "json"});
            const auto spec = parse_form(form);
            p["form"] = form;
            p["space"] = space.empty() ? std::to_string(spec.weight()) + "," + std::to_string(spec.level()) : space;
            p["prec"] = prec.value_or(200);
        } else if (c.command == "petersson") {
            c.output = output.empty() ? "json" : output;
            detail::require_output("petersson", c.output, {"json"});
            const auto fs = parse_form(f_form);
            const auto gs = parse_form(g_form.empty() ? f_form : g_form);
            p["f"] = f_form;
            p["g"] = g_form.empty() ? f_form : g_form;
            p["k"] = k.value_or(fs.weight());
            p["level"] = level.value_or(std::lcm(fs.level(), gs.level()));
            p["nodes"] = nodes_opt.value_or(64);
            p["y_cutoff"] = y_cutoff;
        } else if (c.command == "scan") {
            c.output = output.empty() ? "csv" : output;
            detail::require_output("scan", c.output, {"csv", "json"});
            p["kind"] = kind;
            p["mmax"] = *m_max;
            if (kind == "deligne") p["form"] = form.empty() ? "delta" : form;
        } else if (c.command == "verify") {
            c.output = output.empty() ? "text" : output;
            detail::require_output("verify", c.output, {"text", "json"});
            p["criteria"] = criteria;
            p["nodes"] = nodes_opt.value_or(64);
        }
    } catch (const Error& e) {
        err << "usage error: " << e.what() << '\n';
        exit_code = kUsage;
        return std::nullopt;
    }
    return c;
}

/// Full command line: parse then run.
inline int run_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    int code = kOk;
    const auto config = parse_args(args, out, err, code);
    if (!config) return code;
    return run(*config, out, err);
}

/// In-process run with stdout captured; stderr is discarded.
inline std::pair<int, std::string> run_captured(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_args(args, out, err);
    return {code, out.str()};
}

}  // namespace serre::cli
