#pragma once

// Command-line front end. Kept in a header so tests can drive run() directly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmoment/lmoment.hpp"

namespace lmoment::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "lmoment/1";

enum ExitCode { ok = 0, usage_error = 1, data_error = 2, numerical_error = 3 };

inline json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const MomentReport& r)
{
    json w = json::array();
    for (const auto& x : r.witnesses)
        w.push_back({{"k", x.k}, {"twist_abs", x.twist_abs}, {"dirichlet_abs", x.dirichlet_abs}});
    return {
        {"q", r.q},
        {"moment", to_json(r.moment)},
        {"l_one", r.l_one},
        {"main_term", r.main_term},
        {"ratio", r.ratio},
        {"cross_terms",
         {{"S1S3", to_json(r.cross_terms.S1S3)},
          {"S1S4", to_json(r.cross_terms.S1S4)},
          {"S2S3", to_json(r.cross_terms.S2S3)},
          {"S2S4", to_json(r.cross_terms.S2S4)}}},
        {"characters", r.characters},
        {"twist_cutoff", r.twist_cutoff},
        {"dirichlet_cutoff", r.dirichlet_cutoff},
        {"witness_threshold", r.witness_threshold},
        {"witnesses", w},
    };
}

inline json to_json(const VoronoiCheck& c)
{
    return {{"q", c.q},
            {"d", c.d},
            {"N", c.N},
            {"lhs", to_json(c.lhs)},
            {"rhs", to_json(c.rhs)},
            {"rhs_truncation", c.rhs_truncation},
            {"residual", c.residual},
            {"status", c.negative_control ? "negative-control" : "identity-check"}};
}

/// Median of |ratio - 1| and ratio range per dyadic block [2^j, 2^{j+1}).
struct BlockStats {
    std::int64_t lo = 0, hi = 0;  // primes in [lo, hi)
    std::size_t count = 0;
    double median_deviation = 0.0;
    double min_ratio = 0.0, max_ratio = 0.0;
};

inline double median(std::vector<double> v)
{
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::vector<BlockStats> dyadic_blocks(const std::vector<MomentReport>& reports)
{
    std::vector<BlockStats> out;
    for (const auto& r : reports) {
        std::int64_t lo = 1;
        while (lo * 2 <= r.q) lo *= 2;
        if (out.empty() || out.back().lo != lo) out.push_back({lo, lo * 2, 0, 0.0, r.ratio, r.ratio});
        auto& b = out.back();
        ++b.count;
        b.min_ratio = std::min(b.min_ratio, r.ratio);
        b.max_ratio = std::max(b.max_ratio, r.ratio);
    }
    for (auto& b : out) {
        std::vector<double> dev;
        for (const auto& r : reports)
            if (r.q >= b.lo && r.q < b.hi) dev.push_back(std::abs(r.ratio - 1.0));
        b.median_deviation = median(dev);
    }
    return out;
}

// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_number(double x)
{
    std::ostringstream ss;
    ss.precision(17);
    ss << x;
    return ss.str();
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const
    {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += csv_field(cells[i]);
            }
            out += "\r\n";
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }
};

struct Options {
    std::string data;
    std::string out;
    std::string format = "json";
    int workers = 1;
    std::optional<double> tol;
    bool mock = false;
    std::uint64_t seed = 1;
    bool no_timing = false;

    std::int64_t q = 0, k = 0, d = 0, N = 0, qmin = 0, qmax = 0;
    bool twist = false;
    double threshold = 1e-6;
};

struct Result {
    json inputs;
    json outputs;
    json certificates;
    std::optional<Table> table;  // CSV projection, when the command has one
};

inline HeckeSystem load_system(const Options& o)
{
    if (o.mock) return HeckeSystem::mock(o.seed);
    if (o.data.empty()) throw InvalidArgument("--data is required (or --mock)");
    return HeckeSystem::load_file(o.data);
}

inline json system_inputs(const Options& o)
{
    if (o.mock) return {{"data", nullptr}, {"mock", true}, {"seed", o.seed}};
    return {{"data", o.data}, {"mock", false}};
}

inline Result cmd_chars(const Options& o)
{
    const auto mod = build_modulus(o.q);
    Result r;
    r.inputs = {{"q", o.q}};
    std::int64_t even = 0, odd = 0, prim = 0, even_prim = 0;
    for (std::int64_t k = 0; k < mod.group_order(); ++k) {
        const auto chi = mod.character(k);
        (chi.is_even() ? even : odd) += 1;
        if (chi.is_primitive()) {
            ++prim;
            if (chi.is_even()) ++even_prim;
        }
    }
    const std::int64_t m = std::min<std::int64_t>(8, o.q - 1);
    json matrix = json::array();
    double worst = 0.0;
    for (std::int64_t a = 1; a <= m; ++a) {
        json row = json::array();
        for (std::int64_t b = 1; b <= m; ++b) {
            const cplx s = primitive_pair_sum(mod, a, b);
            const double expect = a == b ? static_cast<double>(o.q - 2) : -1.0;
            worst = std::max(worst, std::abs(s - cplx(expect, 0.0)));
            row.push_back(static_cast<std::int64_t>(std::llround(s.real())));
        }
        matrix.push_back(row);
    }
    r.outputs = {{"primitive_root", mod.primitive_root()},
                 {"characters", mod.group_order()},
                 {"even", even},
                 {"odd", odd},
                 {"primitive", prim},
                 {"even_primitive", even_prim},
                 {"quadratic_parity", mod.character(mod.group_order() / 2).is_even() ? "even" : "odd"},
                 {"orthogonality_matrix", matrix}};
    r.certificates = {{"orthogonality_max_deviation", worst}};
    return r;
}

inline Result cmd_gauss(const Options& o)
{
    const auto mod = build_modulus(o.q);
    const double tol = o.tol.value_or(1e-10);
    const auto bulk = gauss_sums_bulk(mod);
    Result r;
    r.inputs = {{"q", o.q}};
    json sums = json::array();
    Table t{{"k", "re", "im", "abs2_residual", "product_residual"}, {}};
    double worst_abs = 0.0, worst_prod = 0.0, worst_bulk = 0.0;
    const double qd = static_cast<double>(o.q);
    for (std::int64_t k = 1; k < mod.group_order(); ++k) {
        const auto chi = mod.character(k);
        const cplx tau = gauss_sum(chi);
        const cplx tau_bar = gauss_sum(chi.conj());
        const double abs2 = std::abs(std::norm(tau) - qd);
        const double prod = std::abs(tau * tau_bar - static_cast<double>(chi.parity()) * qd);
        worst_abs = std::max(worst_abs, abs2);
        worst_prod = std::max(worst_prod, prod);
        worst_bulk = std::max(worst_bulk, std::abs(bulk[k] - tau));
        sums.push_back({{"k", k}, {"tau", to_json(tau)}, {"abs2_residual", abs2}, {"product_residual", prod}});
        t.rows.push_back({std::to_string(k), csv_number(tau.real()), csv_number(tau.imag()), csv_number(abs2),
                          csv_number(prod)});
    }
    r.outputs = {{"gauss_sums", sums}};
    r.certificates = {{"abs2_max_residual", worst_abs},
                      {"product_max_residual", worst_prod},
                      {"bulk_vs_direct_max", worst_bulk},
                      {"tolerance", tol},
                      {"pass", worst_abs <= tol && worst_prod <= tol}};
    r.table = std::move(t);
    return r;
}

inline Result cmd_kloosterman(const Options& o)
{
    const auto mod = build_modulus(o.q);
    const double weil = 2.0 * std::sqrt(static_cast<double>(o.q));
    Result r;
    r.inputs = {{"q", o.q}};
    json rows = json::array();
    Table t{{"a", "b", "S", "margin"}, {}};
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::int64_t a = 0; a < o.q; ++a)
        for (std::int64_t b = 0; b < o.q; ++b) {
            const double s = kloosterman(a, b, mod);
            const double margin = weil - std::abs(s);
            if (a != 0 || b != 0) min_margin = std::min(min_margin, margin);  // (0,0) sums q-1 ones
            rows.push_back(json::array({a, b, s, margin}));
            t.rows.push_back({std::to_string(a), std::to_string(b), csv_number(s), csv_number(margin)});
        }
    r.outputs = {{"columns", json::array({"a", "b", "S", "margin"})}, {"rows", rows}};
    r.certificates = {{"weil_bound", weil},
                      {"min_margin", min_margin},
                      {"degenerate_pair_excluded", json::array({0, 0})},
                      {"pass", min_margin >= -1e-9}};
    r.table = std::move(t);
    return r;
}

inline Result cmd_lvalue(const Options& o)
{
    const auto mod = build_modulus(o.q);
    const auto chi = mod.character(o.k);
    Result r;
    if (!o.twist) {
        r.inputs = {{"q", o.q}, {"k", o.k}, {"twist", false}};
        const auto afe = dirichlet_central_afe(chi);
        const auto oracle = dirichlet_central_oracle(chi);
        const double diff = std::abs(afe.value - std::conj(oracle.value));
        r.outputs = {{"L_half_chi", to_json(oracle.value)},
                     {"afe_L_half_conj_chi", to_json(afe.value)},
                     {"afe_branches", {to_json(afe.first_branch), to_json(afe.second_branch)}},
                     {"cutoff", afe.cutoff}};
        r.certificates = {{"afe_err_estimate", afe.err_estimate},
                          {"oracle_err_estimate", oracle.err_estimate},
                          {"method_difference", diff},
                          {"pass", diff <= 1e-8}};
        return r;
    }
    const auto f = load_system(o);
    r.inputs = {{"q", o.q}, {"k", o.k}, {"twist", true}, {"system", system_inputs(o)}};
    const auto v = twist_central_afe(f, chi);
    const auto v2 = twist_central_afe(f, chi, 2 * v.cutoff);
    const auto vbar = twist_central_afe(f, chi.conj());
    const double robust = std::abs(v2.value - v.value);
    const double conj_diff = std::abs(vbar.value - std::conj(v.value));
    r.outputs = {{"L_half_f_chi", to_json(v.value)},
                 {"afe_branches", {to_json(v.first_branch), to_json(v.second_branch)}},
                 {"cutoff", v.cutoff}};
    r.certificates = {{"err_estimate", v.err_estimate},
                      {"double_cutoff_change", robust},
                      {"conjugate_character_difference", conj_diff},
                      {"pass", robust <= 1e-8 && conj_diff <= 1e-8}};
    return r;
}

inline Result cmd_moment(const Options& o)
{
    const auto f = load_system(o);
    MomentOptions mo;
    mo.workers = o.workers;
    mo.witness_threshold = o.threshold;
    const auto rep = twisted_moment(f, o.q, mo);
    Result r;
    r.inputs = {{"q", o.q}, {"threshold", o.threshold}, {"system", system_inputs(o)}};
    r.outputs = to_json(rep);
    const double decomp = std::abs(rep.cross_terms.total() - rep.moment) / std::max(std::abs(rep.moment), 1e-300);
    const double imag = std::abs(rep.moment.imag()) / (1.0 + std::abs(rep.moment));
    r.certificates = {{"err_estimate", rep.err_estimate},
                      {"decomposition_relative", decomp},
                      {"imaginary_relative", imag},
                      {"pass", decomp <= 1e-9 && imag <= 1e-9}};
    return r;
}

inline Result cmd_scan(const Options& o)
{
    if (o.qmax < o.qmin) throw InvalidArgument("--qmax must be at least --qmin");
    const auto f = load_system(o);
    MomentOptions mo;
    mo.workers = o.workers;
    mo.witness_threshold = o.threshold;
    const auto reports = prime_scan(f, o.qmin, o.qmax, mo);
    Result r;
    r.inputs = {{"qmin", o.qmin}, {"qmax", o.qmax}, {"threshold", o.threshold}, {"system", system_inputs(o)}};
    json rows = json::array();
    Table t{{"q", "moment_re", "moment_im", "main_term", "ratio", "witnesses", "twist_cutoff", "dirichlet_cutoff"}, {}};
    double worst_decomp = 0.0, worst_imag = 0.0;
    for (const auto& rep : reports) {
        json row = to_json(rep);
        row.erase("witnesses");
        row["witness_count"] = rep.witnesses.size();
        if (!rep.witnesses.empty()) row["best_witness"] = rep.witnesses.front().k;
        rows.push_back(row);
        t.rows.push_back({std::to_string(rep.q), csv_number(rep.moment.real()), csv_number(rep.moment.imag()),
                          csv_number(rep.main_term), csv_number(rep.ratio), std::to_string(rep.witnesses.size()),
                          std::to_string(rep.twist_cutoff), std::to_string(rep.dirichlet_cutoff)});
        worst_decomp = std::max(worst_decomp, std::abs(rep.cross_terms.total() - rep.moment) / std::abs(rep.moment));
        worst_imag = std::max(worst_imag, std::abs(rep.moment.imag()) / (1.0 + std::abs(rep.moment)));
    }
    json blocks = json::array();
    bool nonincreasing = true, in_band = true;
    const auto stats = dyadic_blocks(reports);
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& b = stats[i];
        blocks.push_back({{"lo", b.lo},
                          {"hi", b.hi},
                          {"count", b.count},
                          {"median_abs_ratio_minus_one", b.median_deviation},
                          {"min_ratio", b.min_ratio},
                          {"max_ratio", b.max_ratio}});
        if (i > 0 && b.median_deviation > stats[i - 1].median_deviation) nonincreasing = false;
        if (b.min_ratio < 0.3 || b.max_ratio > 1.7) in_band = false;
    }
    r.outputs = {{"reports", rows}, {"dyadic_blocks", blocks}};
    r.certificates = {{"median_nonincreasing", nonincreasing},
                      {"ratios_in_band", in_band},
                      {"decomposition_relative_max", worst_decomp},
                      {"imaginary_relative_max", worst_imag}};
    r.table = std::move(t);
    return r;
}

inline Result cmd_voronoi(const Options& o)
{
    const auto f = load_system(o);
    const auto mod = build_modulus(o.q);
    const auto psi = TestFunction::bump();
    Result r;
    r.inputs = {{"q", o.q}, {"d", o.d}, {"N", o.N}, {"system", system_inputs(o)}};
    VoronoiCheck c;
    c.q = o.q;
    c.d = o.d;
    c.N = o.N;
    c.lhs = voronoi_lhs(f, o.d, mod, o.N, psi);
    const auto rhs = voronoi_rhs_certified(f, o.d, mod, o.N, psi, o.tol.value_or(1e-9));
    c.rhs = rhs.value;
    c.rhs_truncation = rhs.truncation;
    c.residual = std::abs(c.lhs - c.rhs) / (1.0 + std::abs(c.lhs));
    c.negative_control = f.is_mock();
    r.outputs = to_json(c);
    r.certificates = {{"tail_bound", rhs.tail_bound},
                      {"decay_exponent", rhs.decay_exponent},
                      {"kernel_error", rhs.kernel_error},
                      {"data_precision", f.precision()},
                      {"pass", c.negative_control ? c.residual > 1e-3 : c.residual <= 1e-3}};
    return r;
}

inline Result cmd_check_data(const Options& o)
{
    const auto f = load_system(o);
    Result r;
    r.inputs = {{"system", system_inputs(o)}};
    const auto avg = average_bound_report(f, {100, 1000, 10000});
    json rows = json::array();
    for (const auto& row : avg.rows)
        rows.push_back({{"x", row.x}, {"mean_abs", row.mean_abs}, {"mean_square", row.mean_square}});
    const auto l1 = l_one(f);
    r.outputs = {{"T_f", f.T_f()},
                 {"pmax", f.pmax()},
                 {"primes", f.primes().size()},
                 {"precision", f.precision()},
                 {"dense_reach", f.dense_reach()},
                 {"average_bounds", rows},
                 {"l_one", l1.value}};
    r.certificates = {{"bound_check", "kim-sarnak"},
                      {"average_bound_flagged", avg.flagged},
                      {"l_one_cutoff_disagreement", l1.disagreement}};
    return r;
}

inline int exit_code_for(const Error& e)
{
    switch (e.error_class()) {
    case ErrorClass::usage: return usage_error;
    case ErrorClass::data: return data_error;
    case ErrorClass::numerical: return numerical_error;
    }
    return usage_error;
}

/// Runs one command. Reports go to --out (or `out`), diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Twisted moments of GL(2) x GL(1) central L-values"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--data", o.data, "eigenvalue file");
        sub->add_option("--out", o.out, "output path (default stdout)");
        sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--tol", o.tol, "tolerance override")->check(CLI::PositiveNumber);
        sub->add_flag("--mock", o.mock, "use the seeded mock Hecke system");
        sub->add_option("--seed", o.seed, "mock seed");
        sub->add_flag("--no-timing", o.no_timing, "write runtime_ms as 0");
    };

    auto* chars = app.add_subcommand("chars", "character census");
    chars->add_option("--q", o.q)->required();
    auto* gauss = app.add_subcommand("gauss", "Gauss sums");
    gauss->add_option("--q", o.q)->required();
    auto* kloost = app.add_subcommand("kloosterman", "Kloosterman table");
    kloost->add_option("--q", o.q)->required();
    auto* lvalue = app.add_subcommand("lvalue", "one central value");
    lvalue->add_option("--q", o.q)->required();
    lvalue->add_option("--k", o.k)->required();
    lvalue->add_flag("--twist", o.twist);
    auto* moment = app.add_subcommand("moment", "twisted moment at one modulus");
    moment->add_option("--q", o.q)->required();
    moment->add_option("--threshold", o.threshold)->check(CLI::NonNegativeNumber);
    auto* scan = app.add_subcommand("scan", "prime sweep");
    scan->add_option("--qmin", o.qmin)->required();
    scan->add_option("--qmax", o.qmax)->required();
    scan->add_option("--threshold", o.threshold)->check(CLI::NonNegativeNumber);
    auto* voronoi = app.add_subcommand("voronoi", "Voronoi identity check");
    voronoi->add_option("--q", o.q)->required();
    voronoi->add_option("--d", o.d)->required();
    voronoi->add_option("--N", o.N)->required();
    auto* check = app.add_subcommand("check-data", "validate eigenvalue data");
    for (auto* s : {chars, gauss, kloost, lvalue, moment, scan, voronoi, check}) common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage_error;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    const auto start = std::chrono::steady_clock::now();
    try {
        Result r;
        if (command == "chars") r = cmd_chars(o);
        else if (command == "gauss") r = cmd_gauss(o);
        else if (command == "kloosterman") r = cmd_kloosterman(o);
        else if (command == "lvalue") r = cmd_lvalue(o);
        else if (command == "moment") r = cmd_moment(o);
        else if (command == "scan") r = cmd_scan(o);
        else if (command == "voronoi") r = cmd_voronoi(o);
        else r = cmd_check_data(o);

        std::string payload;
        if (o.format == "csv") {
            if (!r.table) throw InvalidArgument("csv output is not available for " + command);
            payload = r.table->str();
        } else {
            const double ms =
                o.no_timing ? 0.0
                            : std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            json doc = {{"schema_version", schema_version},
                        {"command", command},
                        {"inputs", r.inputs},
                        {"outputs", r.outputs},
                        {"certificates", r.certificates},
                        {"runtime_ms", ms}};
            payload = doc.dump(2) + "\n";
        }
        if (o.out.empty()) {
            out << payload;
        } else {
            std::ofstream f(o.out, std::ios::binary);
            if (!f) throw InvalidArgument("cannot write " + o.out);
            f << payload;
        }
        const auto pass = r.certificates.find("pass");
        if (pass != r.certificates.end() && !pass->get<bool>()) {
            err << "error: certificate check failed\n";
            return numerical_error;
        }
        return ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    }
}

}  // namespace lmoment::cli
