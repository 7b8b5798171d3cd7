// Command-line front end: every library operation as a subcommand, output as
// JSON or CSV on stdout (or --out), run metadata on stderr.

#include <CLI11.hpp>

#include <cantorquant/cantorquant.hpp>
#include <cantorquant/io.hpp>

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace cq = cantorquant;
using cq::Family;
using cq::IFSParams;
using cq::Rational;
using cq::Real;
using nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_numeric = 3;
constexpr int exit_range = 4;

struct RunConfig {
    int digits = 35;
    std::string tol_text = "1e-12";
    bool tol_given = false;
    std::string format;
    std::string out;
    unsigned jobs = 1;

    std::string format_or(const std::string& fallback) const {
        return format.empty() ? fallback : format;
    }
};

void validate(const RunConfig& cfg) {
    if (cfg.digits < 20 || cfg.digits > 45) {
        throw cq::InputError("--precision must lie in [20, 45]");
    }
    const Real tol = cq::parse_real(cfg.tol_text);
    if (!(tol > 0)) throw cq::InputError("--tol must be positive");
    if (tol < cq::ipow(Real("0.1"), static_cast<unsigned>(cfg.digits - 5))) {
        throw cq::InputError("--tol is below what --precision " + std::to_string(cfg.digits) +
                             " can resolve");
    }
    if (cfg.jobs == 0) throw cq::InputError("--jobs must be at least 1");
}

void emit(const RunConfig& cfg, std::string text) {
    if (text.empty() || text.back() != '\n') text.push_back('\n');
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw cq::InputError("cannot open '" + cfg.out + "' for writing");
    file << text;
}

void emit_json(const RunConfig& cfg, const ordered_json& j) { emit(cfg, j.dump(2)); }

std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line;
}

/// A header plus rows of already formatted cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const {
        std::string text = csv_join(header) + "\n";
        for (const auto& row : rows) text += csv_join(row) + "\n";
        return text;
    }

    ordered_json json() const {
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json obj;
            for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
            arr.push_back(std::move(obj));
        }
        return arr;
    }
};

void emit_table(const RunConfig& cfg, const Table& table, const std::string& default_format) {
    if (cfg.format_or(default_format) == "json") {
        emit_json(cfg, table.json());
    } else {
        emit(cfg, table.csv());
    }
}

/// Evaluates make(i) for i in [0, count) on a pool of `jobs` threads. Results
/// come back in index order; the lowest-index failure is rethrown.
template <class F>
auto parallel_map(std::size_t count, unsigned jobs, F make) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<std::optional<R>> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i].emplace(make(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::vector<R> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*results[i]));
    }
    return out;
}

/// Runs f with IFSParams<Rational> for "p/q" input and IFSParams<Real> otherwise.
template <class F>
decltype(auto) with_params(const std::string& r_text, F&& f) {
    auto parsed = cq::parse_number(r_text);
    return std::visit([&](const auto& r) { return f(IFSParams<std::decay_t<decltype(r)>>(r)); },
                      parsed);
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (!part.empty()) out.push_back(part);
        }
    }
    return out;
}

/// "a:b:step" -> exact grid a, a+step, ... <= b.
std::vector<Rational> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw cq::InputError("--r-grid expects lo:hi:step");
    const Rational lo = cq::parse_as<Rational>(parts[0]);
    const Rational hi = cq::parse_as<Rational>(parts[1]);
    const Rational step = cq::parse_as<Rational>(parts[2]);
    if (!(step > 0) || hi < lo) throw cq::InputError("--r-grid needs lo <= hi and step > 0");
    std::vector<Rational> grid;
    for (Rational x = lo; x <= hi; x += step) grid.push_back(x);
    return grid;
}

template <class T>
T config_tol(const RunConfig& cfg) {
    return cq::parse_as<T>(cfg.tol_text);
}

template <class T>
void put_value(ordered_json& j, const std::string& key, const T& x, int digits) {
    cq::io::put_number(j, key, x, digits);
}

template <class T>
std::string exact_or_empty(const T& x) {
    if constexpr (cq::is_exact_v<T>) {
        return cq::format_fraction(x);
    } else {
        return "";
    }
}

// ---- subcommands ---------------------------------------------------------

struct ConstructArgs {
    std::string family;
    std::size_t n = 2;
    std::string r;
    std::vector<std::string> index;
};

int cmd_construct(const RunConfig& cfg, const ConstructArgs& a) {
    const Family family = cq::parse_family(a.family);
    return with_params(a.r, [&](const auto& params) {
        cq::IndexPolicy policy;
        const auto words = split_list(a.index);
        if (!words.empty()) {
            std::vector<cq::Word> parsed;
            for (const auto& w : words) parsed.push_back(cq::Word::parse(w));
            policy = cq::IndexPolicy::explicit_words(std::move(parsed));
        }
        const auto q = family == Family::kappa && a.n == 2 ? cq::midpoint_split(params)
                                                            : cq::build(family, a.n, params, policy);
        if (cfg.format_or("json") == "csv") {
            Table t{{"point", "cell"}, {}};
            for (const auto& e : q.entries) {
                t.rows.push_back({cq::format_decimal(e.point, cfg.digits),
                                  e.cell.empty() ? "" : cq::join_words(e.cell, " ")});
            }
            emit(cfg, t.csv());
        } else {
            emit_json(cfg, cq::io::to_json(q, cfg.digits));
        }
        return exit_ok;
    });
}

struct DistortionArgs {
    std::string r;
    std::vector<std::string> points;
    std::string family;
    std::size_t n = 0;
    std::string input;
};

ordered_json read_json_input(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        std::ifstream file(path);
        if (!file) throw cq::InputError("cannot read '" + path + "'");
        text.assign(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>());
    }
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw cq::InputError(std::string("invalid JSON input: ") + e.what());
    }
}

template <class T>
void emit_distortion(const RunConfig& cfg, const IFSParams<T>& params, const T& value,
                     const std::string& method) {
    if (cfg.format_or("json") == "csv") {
        emit(cfg, "r,method,value,value_exact\n" + cq::format_decimal(params.r(), cfg.digits) + "," +
                      method + "," + cq::format_decimal(value, cfg.digits) + "," +
                      exact_or_empty(value));
        return;
    }
    ordered_json j;
    put_value(j, "r", params.r(), cfg.digits);
    j["method"] = method;
    put_value(j, "value", value, cfg.digits);
    emit_json(cfg, j);
}

int cmd_distortion(const RunConfig& cfg, const DistortionArgs& a) {
    const int sources = !a.points.empty() + !a.family.empty() + !a.input.empty();
    if (sources != 1) {
        throw cq::InputError("distortion needs exactly one of --points, --family/--n, --input");
    }
    if (!a.input.empty()) {
        const auto j = read_json_input(a.input);
        const std::string r_text =
            j.contains("r_exact") ? j.at("r_exact").get<std::string>() : j.at("r").get<std::string>();
        return with_params(r_text, [&](const auto& params) {
            using T = typename std::decay_t<decltype(params)>::value_type;
            const auto q = cq::io::quantizer_from_json<T>(j);
            if (q.cylinder_cells) {
                emit_distortion(cfg, params, cq::cells_distortion(params, q), "cells");
            } else {
                emit_distortion(cfg, params,
                                cq::quantizer_distortion(params, q.points(), config_tol<T>(cfg)),
                                "integral");
            }
            return exit_ok;
        });
    }
    if (a.r.empty()) throw cq::InputError("--r is required");
    return with_params(a.r, [&](const auto& params) {
        using T = typename std::decay_t<decltype(params)>::value_type;
        if (!a.family.empty()) {
            if (a.n == 0) throw cq::InputError("--n is required with --family");
            const Family family = cq::parse_family(a.family);
            if (family == Family::kappa) {
                if (a.n != 2) throw cq::InputError("kappa supports n=2 only");
                emit_distortion(cfg, params, cq::midpoint_split_value(params), "closed_form");
            } else {
                const auto q = cq::build(family, a.n, params);
                emit_distortion(cfg, params, cq::cells_distortion(params, q), "cells");
            }
            return exit_ok;
        }
        std::vector<T> pts;
        for (const auto& p : split_list(a.points)) pts.push_back(cq::parse_as<T>(p));
        emit_distortion(cfg, params, cq::quantizer_distortion(params, pts, config_tol<T>(cfg)),
                        "integral");
        return exit_ok;
    });
}

struct VnArgs {
    std::string family;
    std::size_t n = 2;
    std::string r;
};

int cmd_vn(const RunConfig& cfg, const VnArgs& a) {
    return with_params(a.r, [&](const auto& params) {
        using T = typename std::decay_t<decltype(params)>::value_type;
        T value;
        Family family;
        std::optional<Family> tie;
        if (a.family.empty()) {
            const auto opt = cq::optimal_vn(a.n, params);
            value = opt.value;
            family = opt.family;
            tie = opt.tie;
        } else {
            family = cq::parse_family(a.family);
            if (family == Family::kappa) {
                if (a.n != 2) throw cq::InputError("kappa supports n=2 only");
                value = cq::midpoint_split_value(params);
            } else {
                value = cq::vn_formula(family, a.n, params);
            }
        }
        if (cfg.format_or("json") == "csv") {
            emit(cfg, "n,r,family,V_n,V_n_exact\n" + std::to_string(a.n) + "," +
                          cq::format_decimal(params.r(), cfg.digits) + "," +
                          std::string(cq::to_string(family)) + "," +
                          cq::format_decimal(value, cfg.digits) + "," + exact_or_empty(value));
            return exit_ok;
        }
        ordered_json j;
        j["n"] = a.n;
        put_value(j, "r", params.r(), cfg.digits);
        j["family"] = std::string(cq::to_string(family));
        if (tie) j["tie"] = std::string(cq::to_string(*tie));
        put_value(j, "value", value, cfg.digits);
        emit_json(cfg, j);
        return exit_ok;
    });
}

struct CvtArgs {
    std::string family;
    std::string r;
};

int cmd_cvt(const RunConfig& cfg, const CvtArgs& a) {
    const Family family = cq::parse_family(a.family);
    return with_params(a.r, [&](const auto& params) {
        const auto report = cq::cvt_inequalities(family, params);
        if (cfg.format_or("json") == "csv") {
            Table t{{"inequality", "left", "middle", "right", "holds"}, {}};
            for (const auto& row : report.rows) {
                t.rows.push_back({"\"" + row.label + "\"", cq::format_decimal(row.left, cfg.digits),
                                  cq::format_decimal(row.middle, cfg.digits),
                                  cq::format_decimal(row.right, cfg.digits),
                                  row.holds ? "true" : "false"});
            }
            emit(cfg, t.csv());
        } else {
            emit_json(cfg, cq::io::to_json(report, cfg.digits));
        }
        return exit_ok;
    });
}

int cmd_cvt_range(const RunConfig& cfg, const std::string& family_name) {
    const Family family = cq::parse_family(family_name);
    const Real tol = cq::parse_real(cfg.tol_text);
    const int places = cq::io::places_for(tol);
    const auto range = cq::cvt_range(family, tol / 1000);
    if (cfg.format_or("json") == "csv") {
        Table t{{"lo", "hi", "lo_open", "hi_open"}, {}};
        for (const auto& c : range.components) {
            t.rows.push_back({cq::format_fixed(c.lo, places), cq::format_fixed(c.hi, places),
                              c.lo_open ? "true" : "false", c.hi_open ? "true" : "false"});
        }
        emit(cfg, t.csv());
    } else {
        auto j = cq::io::range_json(range, places);
        j["digits"] = places;
        emit_json(cfg, j);
    }
    return exit_ok;
}

int cmd_thresholds(const RunConfig& cfg) {
    const Real tol = cq::parse_real(cfg.tol_given ? cfg.tol_text : std::string("1e-10"));
    const int places = cq::io::places_for(tol);
    const auto t = cq::thresholds(tol);
    if (cfg.format_or("json") == "csv") {
        emit(cfg, cq::io::thresholds_csv_header() + "\n" + cq::io::thresholds_csv_row(t, places));
    } else {
        emit_json(cfg, cq::io::to_json(t, places));
    }
    return exit_ok;
}

Real oracle_match_tol(const RunConfig& cfg) { return cq::parse_real(cfg.tol_text); }

struct OracleArgs {
    std::size_t n = 2;
    std::string r;
    std::optional<unsigned> depth;
};

cq::OracleReport run_oracle(const RunConfig& cfg, std::size_t n, const std::string& r_text,
                            std::optional<unsigned> depth) {
    const IFSParams<Real> params(cq::parse_real(r_text));
    const unsigned k = depth.value_or(cq::default_oracle_depth(n));
    return cq::verify_optimality(n, params, k, cq::convert<long double>(oracle_match_tol(cfg)));
}

int cmd_oracle(const RunConfig& cfg, const OracleArgs& a) {
    const auto rep = run_oracle(cfg, a.n, a.r, a.depth);
    if (cfg.format_or("json") == "csv") {
        emit(cfg, cq::io::oracle_csv_header() + "\n" + cq::io::csv_row(rep, cfg.digits));
    } else {
        emit_json(cfg, cq::io::to_json(rep, cfg.digits));
    }
    return exit_ok;
}

struct VerifyArgs {
    std::size_t n_max = 9;
    std::vector<std::string> r;
    std::optional<unsigned> depth;
};

int cmd_verify(const RunConfig& cfg, const VerifyArgs& a) {
    const auto rs = split_list(a.r);
    if (rs.empty()) throw cq::InputError("--r is required");
    if (a.n_max < 2) throw cq::InputError("--n-max must be at least 2");
    for (const auto& r : rs) IFSParams<Real> check(cq::parse_real(r));
    const std::size_t per_r = a.n_max - 1;
    const auto reports = parallel_map(rs.size() * per_r, cfg.jobs, [&](std::size_t i) {
        return run_oracle(cfg, 2 + i % per_r, rs[i / per_r], a.depth);
    });
    if (cfg.format_or("csv") == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& rep : reports) arr.push_back(cq::io::to_json(rep, cfg.digits));
        emit_json(cfg, arr);
    } else {
        std::string text = cq::io::oracle_csv_header() + "\n";
        for (const auto& rep : reports) text += cq::io::csv_row(rep, cfg.digits) + "\n";
        emit(cfg, text);
    }
    return exit_ok;
}

struct SweepArgs {
    std::string quantity;
    std::vector<std::string> r;
    std::string r_grid;
    std::size_t n_max = 27;
};

std::vector<std::string> sweep_rs(const SweepArgs& a) {
    if (!a.r.empty() && !a.r_grid.empty()) throw cq::InputError("use either --r or --r-grid");
    if (!a.r_grid.empty()) {
        std::vector<std::string> out;
        for (const auto& x : parse_grid(a.r_grid)) out.push_back(cq::format_fraction(x));
        return out;
    }
    auto out = split_list(a.r);
    if (out.empty()) throw cq::InputError("--r or --r-grid is required");
    return out;
}

// Grid points travel as exact fractions but are evaluated in extended precision.
std::string sweep_r_text(const std::string& r, bool from_grid) {
    if (!from_grid) return r;
    return cq::format_decimal(cq::parse_as<Rational>(r), 40);
}

int cmd_sweep(const RunConfig& cfg, const SweepArgs& a) {
    const bool grid = !a.r_grid.empty();
    const auto rs = sweep_rs(a);
    const int d = cfg.digits;

    if (a.quantity == "families") {
        Table t{{"r", "beta2", "gamma2", "delta2", "kappa", "best"}, {}};
        t.rows = parallel_map(rs.size(), cfg.jobs, [&](std::size_t i) {
            return with_params(sweep_r_text(rs[i], grid), [&](const auto& p) {
                const auto best = cq::best_family(p);
                std::string label(cq::to_string(best.family));
                for (auto f : best.ties) label += "|" + std::string(cq::to_string(f));
                return std::vector<std::string>{
                    cq::format_decimal(p.r(), d),
                    cq::format_decimal(cq::two_point_value(Family::beta, p), d),
                    cq::format_decimal(cq::two_point_value(Family::gamma, p), d),
                    cq::format_decimal(cq::two_point_value(Family::delta, p), d),
                    cq::format_decimal(cq::midpoint_split_value(p), d), label};
            });
        });
        emit_table(cfg, t, "csv");
        return exit_ok;
    }

    if (a.n_max < 2) throw cq::InputError("--n-max must be at least 2");

    if (a.quantity == "vn") {
        Table t{{"n", "r", "family", "V_n", "V_n_exact"}, {}};
        const std::size_t per_r = a.n_max - 1;
        t.rows = parallel_map(rs.size() * per_r, cfg.jobs, [&](std::size_t i) {
            const std::size_t n = 2 + i % per_r;
            return with_params(sweep_r_text(rs[i / per_r], grid), [&](const auto& p) {
                const auto opt = cq::optimal_vn(n, p);
                return std::vector<std::string>{std::to_string(n), cq::format_decimal(p.r(), d),
                                                std::string(cq::to_string(opt.family)),
                                                cq::format_decimal(opt.value, d),
                                                exact_or_empty(opt.value)};
            });
        });
        emit_table(cfg, t, "csv");
        return exit_ok;
    }

    if (a.quantity == "coeff") {
        if (a.n_max < 9) throw cq::InputError("--n-max must be at least 9 for coeff");
        const auto series = parallel_map(rs.size(), cfg.jobs, [&](std::size_t i) {
            return with_params(sweep_r_text(rs[i], grid),
                               [&](const auto& p) { return cq::coefficient_sequence(p, a.n_max); });
        });
        if (cfg.format_or("csv") == "json") {
            ordered_json arr = ordered_json::array();
            for (const auto& s : series) {
                ordered_json j;
                j["r"] = cq::format_decimal(s.r, d);
                j["beta_dim"] = cq::format_decimal(s.beta_dim, d);
                j["family"] = std::string(cq::to_string(s.family));
                j["limit_lo"] = cq::format_decimal(s.limit_lo, d);
                j["limit_hi"] = cq::format_decimal(s.limit_hi, d);
                ordered_json terms = ordered_json::array();
                for (const auto& term : s.terms) {
                    terms.push_back({{"n", term.n},
                                     {"V_n", cq::format_decimal(term.vn, d)},
                                     {"scaled_term", cq::format_decimal(term.scaled, d)},
                                     {"subsequence_tag", std::string(cq::to_string(term.tag))}});
                }
                j["terms"] = std::move(terms);
                arr.push_back(std::move(j));
            }
            emit_json(cfg, arr);
            return exit_ok;
        }
        const bool with_r = series.size() > 1;
        std::string text = (with_r ? "r," : "") + cq::io::coefficient_csv_header() + "\n";
        for (const auto& s : series) {
            for (const auto& term : s.terms) {
                if (with_r) text += cq::format_decimal(s.r, d) + ",";
                text += cq::io::csv_row(term, d) + "\n";
            }
            std::cerr << "r=" << cq::format_decimal(s.r, 12)
                      << " limit_lo=" << cq::format_decimal(s.limit_lo, 12)
                      << " limit_hi=" << cq::format_decimal(s.limit_hi, 12) << "\n";
        }
        emit(cfg, text);
        return exit_ok;
    }
    throw cq::InputError("--quantity must be vn, coeff or families");
}

int cmd_dimension(const RunConfig& cfg, const std::vector<std::string>& r_items) {
    const auto rs = split_list(r_items);
    if (rs.empty()) throw cq::InputError("--r is required");
    Table t{{"r", "dimension"}, {}};
    for (const auto& r_text : rs) {
        const Real r = cq::parse_real(r_text);
        t.rows.push_back({cq::format_decimal(r, cfg.digits),
                          cq::format_decimal(cq::quantization_dimension(r), cfg.digits)});
    }
    if (cfg.format_or("json") == "csv") {
        emit(cfg, t.csv());
    } else if (t.rows.size() == 1) {
        emit_json(cfg, t.json().front());
    } else {
        emit_json(cfg, t.json());
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal quantizers for triadic uniform Cantor distributions"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    app.add_option("--precision", cfg.digits, "Significant digits in printed numbers (20..45)")
        ->default_val(35);
    app.add_option_function<std::string>(
           "--tol",
           [&](const std::string& t) {
               cfg.tol_text = t;
               cfg.tol_given = true;
           },
           "Numeric tolerance (default 1e-12; thresholds defaults to 1e-10)");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", cfg.out, "Write output to this file instead of stdout");
    app.add_option("--jobs", cfg.jobs, "Worker threads for sweeps")->default_val(1);

    std::function<int()> action;

    ConstructArgs construct;
    auto* c = app.add_subcommand("construct", "Build a beta/gamma/delta/kappa quantizer");
    c->add_option("--family", construct.family)->required();
    c->add_option("--n", construct.n)->required();
    c->add_option("--r", construct.r, "Contraction ratio; p/q selects exact mode")->required();
    c->add_option("--index", construct.index, "Explicit index set, comma separated words")
        ->delimiter(',');
    c->callback([&] { action = [&] { return cmd_construct(cfg, construct); }; });

    DistortionArgs distortion;
    auto* ds = app.add_subcommand("distortion", "Quantization error of a point set or construction");
    ds->add_option("--r", distortion.r);
    ds->add_option("--points", distortion.points)->delimiter(',');
    ds->add_option("--family", distortion.family);
    ds->add_option("--n", distortion.n);
    ds->add_option("--input", distortion.input, "Quantizer JSON file, - for stdin");
    ds->callback([&] { action = [&] { return cmd_distortion(cfg, distortion); }; });

    VnArgs vn;
    auto* v = app.add_subcommand("vn", "V_n from the closed forms (optimal family by default)");
    v->add_option("--family", vn.family);
    v->add_option("--n", vn.n)->required();
    v->add_option("--r", vn.r)->required();
    v->callback([&] { action = [&] { return cmd_vn(cfg, vn); }; });

    CvtArgs cvt;
    auto* cv = app.add_subcommand("cvt", "Evaluate the CVT inequality chains");
    cv->add_option("--family", cvt.family)->required();
    cv->add_option("--r", cvt.r)->required();
    cv->callback([&] { action = [&] { return cmd_cvt(cfg, cvt); }; });

    std::string range_family;
    auto* cr = app.add_subcommand("cvt-range", "Range of r where a family is a CVT");
    cr->add_option("--family", range_family)->required();
    cr->callback([&] { action = [&] { return cmd_cvt_range(cfg, range_family); }; });

    auto* th = app.add_subcommand("thresholds", "r0, r1, CVT ranges and the beta/delta crossing");
    th->callback([&] { action = [&] { return cmd_thresholds(cfg); }; });

    OracleArgs oracle;
    unsigned oracle_depth = 0;
    auto* o = app.add_subcommand("oracle", "Exact DP k-means on a discretized measure");
    o->add_option("--n", oracle.n)->required();
    o->add_option("--r", oracle.r)->required();
    o->add_option("--depth", oracle_depth, "Discretization depth (default l(n)+3)");
    o->callback([&] {
        if (oracle_depth) oracle.depth = oracle_depth;
        action = [&] { return cmd_oracle(cfg, oracle); };
    });

    VerifyArgs verify;
    unsigned verify_depth = 0;
    auto* vf = app.add_subcommand("verify", "Oracle sweep over n = 2..n_max and a list of r");
    vf->add_option("--n-max", verify.n_max)->required();
    vf->add_option("--r", verify.r)->required()->delimiter(',');
    vf->add_option("--depth", verify_depth, "Fixed depth instead of l(n)+3");
    vf->callback([&] {
        if (verify_depth) verify.depth = verify_depth;
        action = [&] { return cmd_verify(cfg, verify); };
    });

    SweepArgs sweep;
    auto* sw = app.add_subcommand("sweep", "Plot data: vn, coeff or families");
    sw->add_option("--quantity", sweep.quantity)
        ->required()
        ->check(CLI::IsMember({"vn", "coeff", "families"}));
    sw->add_option("--r", sweep.r)->delimiter(',');
    sw->add_option("--r-grid", sweep.r_grid, "lo:hi:step");
    sw->add_option("--n-max", sweep.n_max)->default_val(27);
    sw->callback([&] { action = [&] { return cmd_sweep(cfg, sweep); }; });

    std::vector<std::string> dim_r;
    auto* dm = app.add_subcommand("dimension", "Quantization dimension -log 3 / log r");
    dm->add_option("--r", dim_r)->required()->delimiter(',');
    dm->callback([&] { action = [&] { return cmd_dimension(cfg, dim_r); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }

    const auto start = std::chrono::steady_clock::now();
    int code = exit_ok;
    try {
        validate(cfg);
        code = action();
    } catch (const cq::UnsupportedRange& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_range;
    } catch (const cq::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const cq::NumericError& e) {
        std::cerr << "error: " << e.what() << " (achieved bound " << e.achieved_bound() << ")\n";
        return exit_numeric;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << "cantorquant " << app.get_subcommands().front()->get_name() << ": "
              << elapsed.count() << " s, precision " << cfg.digits << ", tol " << cfg.tol_text
              << "\n";
    return code;
}
