#pragma once

/**
 * JSON and CSV encodings. Numbers always travel as decimal strings (plus an
 * exact "p/q" companion in exact mode), never as binary floats, so output is
 * byte-stable across platforms.
 */

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "constructions.hpp"
#include "cvt_analysis.hpp"
#include "numeric.hpp"
#include "oracle.hpp"
#include "word.hpp"

namespace cantorquant::io {

using nlohmann::ordered_json;

inline constexpr int default_digits = 35;

template <class T>
void put_number(ordered_json& j, const std::string& key, const T& x, int digits) {
    j[key] = format_decimal(x, digits);
    if constexpr (is_exact_v<T>) j[key + "_exact"] = format_fraction(x);
}

inline ordered_json words_json(const std::vector<Word>& words) {
    ordered_json arr = ordered_json::array();
    for (const auto& w : words) arr.push_back(w.json_string());
    return arr;
}

template <class T>
ordered_json to_json(const Quantizer<T>& q, int digits = default_digits) {
    ordered_json j;
    put_number(j, "r", q.r, digits);
    j["family"] = std::string(to_string(q.family));
    j["n"] = q.n;
    ordered_json entries = ordered_json::array();
    for (const auto& e : q.entries) {
        ordered_json ej;
        put_number(ej, "point", e.point, digits);
        ej["cell"] = words_json(e.cell);
        if (e.region) {
            ej["region"] = {format_decimal(e.region->lo, digits), format_decimal(e.region->hi, digits)};
        }
        entries.push_back(std::move(ej));
    }
    j["entries"] = std::move(entries);
    j["index_set"] = words_json(q.index_set);
    put_number(j, "value", q.value, digits);
    if (!q.cylinder_cells) j["cylinder_cells"] = false;
    return j;
}

namespace detail {

template <class T>
T read_number(const ordered_json& j, const std::string& key) {
    if (is_exact_v<T> && j.contains(key + "_exact")) {
        return parse_as<T>(j.at(key + "_exact").get<std::string>());
    }
    return parse_as<T>(j.at(key).get<std::string>());
}

inline std::vector<Word> read_words(const ordered_json& arr) {
    std::vector<Word> out;
    for (const auto& w : arr) out.push_back(Word::parse(w.get<std::string>()));
    return out;
}

} // namespace detail

template <class T>
Quantizer<T> quantizer_from_json(const ordered_json& j) {
    Quantizer<T> q;
    q.r = detail::read_number<T>(j, "r");
    q.family = parse_family(j.at("family").get<std::string>());
    q.n = j.at("n").get<std::size_t>();
    for (const auto& ej : j.at("entries")) {
        QuantizerEntry<T> e{detail::read_number<T>(ej, "point"), detail::read_words(ej.at("cell")),
                            std::nullopt};
        if (ej.contains("region")) {
            e.region = Interval<T>{parse_as<T>(ej["region"][0].get<std::string>()),
                                   parse_as<T>(ej["region"][1].get<std::string>())};
        }
        q.entries.push_back(std::move(e));
    }
    q.index_set = detail::read_words(j.at("index_set"));
    q.value = detail::read_number<T>(j, "value");
    q.cylinder_cells = j.value("cylinder_cells", true);
    return q;
}

inline ordered_json range_json(const CvtRange& range, int places) {
    ordered_json j;
    j["family"] = std::string(to_string(range.family));
    ordered_json comps = ordered_json::array();
    for (const auto& c : range.components) {
        comps.push_back({{"lo", format_fixed(c.lo, places)},
                         {"hi", format_fixed(c.hi, places)},
                         {"lo_open", c.lo_open},
                         {"hi_open", c.hi_open}});
    }
    j["components"] = std::move(comps);
    ordered_json bounds = ordered_json::array();
    for (const auto& b : range.bounds) {
        bounds.push_back({{"inequality", b.label},
                          {"side", b.lower_side ? "lower" : "upper"},
                          {"root", format_fixed(b.root, places)}});
    }
    j["bounds"] = std::move(bounds);
    return j;
}

/// Decimal places implied by a tolerance: 1e-10 -> 10.
inline int places_for(const Real& tol) {
    int places = 0;
    Real t = tol;
    while (t < 1 && places < real_digits) {
        t *= 10;
        ++places;
    }
    return t > 1 ? places - 1 : places;
}

inline ordered_json to_json(const Thresholds& t, int places) {
    ordered_json j;
    j["r0"] = format_fixed(t.r0, places);
    j["r1"] = format_fixed(t.r1, places);
    j["beta_delta_crossing"] = format_fixed(t.beta_delta_crossing, places);
    j["beta_cvt"] = range_json(t.beta_cvt, places);
    j["gamma_cvt"] = range_json(t.gamma_cvt, places);
    j["delta_cvt"] = range_json(t.delta_cvt, places);
    j["digits"] = places;
    return j;
}

inline std::string thresholds_csv_header() {
    return "r0,r1,beta_lo,beta_hi,gamma_lo,gamma_hi,delta_lo,delta_hi,beta_delta_cross";
}

inline std::string thresholds_csv_row(const Thresholds& t, int places) {
    auto range = [&](const CvtRange& r) {
        if (r.components.empty()) return std::string(",");
        const auto& c = r.components.front();
        return format_fixed(c.lo, places) + "," + format_fixed(c.hi, places);
    };
    return format_fixed(t.r0, places) + "," + format_fixed(t.r1, places) + "," +
           range(t.beta_cvt) + "," + range(t.gamma_cvt) + "," + range(t.delta_cvt) + "," +
           format_fixed(t.beta_delta_crossing, places);
}

template <class T>
ordered_json to_json(const InequalityReport<T>& rep, int digits) {
    ordered_json j;
    j["family"] = std::string(to_string(rep.family));
    put_number(j, "r", rep.r, digits);
    ordered_json rows = ordered_json::array();
    for (const auto& row : rep.rows) {
        ordered_json rj;
        rj["inequality"] = row.label;
        put_number(rj, "left", row.left, digits);
        put_number(rj, "middle", row.middle, digits);
        put_number(rj, "right", row.right, digits);
        rj["holds"] = row.holds;
        rows.push_back(std::move(rj));
    }
    j["rows"] = std::move(rows);
    j["all_hold"] = rep.all_hold();
    j["flags"] = rep.flags;
    return j;
}

inline std::string family_list(const std::vector<Family>& fams) {
    std::string out;
    for (std::size_t i = 0; i < fams.size(); ++i) {
        if (i) out += "|";
        out += to_string(fams[i]);
    }
    return out;
}

/// "beta", "beta|gamma" for several exact matches, "mixed:beta+gamma" when
/// groups follow different families, "none" otherwise.
inline std::string matched_label(const FamilyMatch& m) {
    if (!m.families.empty()) return family_list(m.families);
    if (m.cylinder_aligned && !m.pattern_families.empty()) {
        std::string out = "mixed:";
        for (std::size_t i = 0; i < m.pattern_families.size(); ++i) {
            if (i) out += "+";
            out += to_string(m.pattern_families[i]);
        }
        return out;
    }
    return "none";
}

inline ordered_json to_json(const OracleReport& rep, int digits) {
    ordered_json j;
    j["n"] = rep.n;
    j["r"] = format_decimal(rep.r, digits);
    j["depth"] = rep.depth;
    j["dp_cost"] = format_decimal(rep.dp_cost, 18);
    j["corrected_cost"] = format_decimal(rep.corrected_cost, 18);
    j["formula_cost"] = format_decimal(rep.formula_cost, digits);
    j["formula_family"] = std::string(to_string(rep.formula_family));
    if (rep.formula_tie) j["formula_tie"] = std::string(to_string(*rep.formula_tie));
    j["abs_gap"] = format_decimal(rep.abs_gap, 6);
    ordered_json pts = ordered_json::array();
    for (auto p : rep.dp_points) pts.push_back(format_decimal(p, 18));
    j["dp_points"] = std::move(pts);
    if (rep.reflected_points) {
        ordered_json refl = ordered_json::array();
        for (auto p : *rep.reflected_points) refl.push_back(format_decimal(p, 18));
        j["reflected_points"] = std::move(refl);
    }
    j["matched_family"] = matched_label(rep.match);
    return j;
}

inline std::string oracle_csv_header() {
    return "n,r,depth,dp_cost,corrected_cost,formula_cost,abs_gap,matched_family";
}

inline std::string csv_row(const OracleReport& rep, int digits) {
    std::ostringstream os;
    os << rep.n << ',' << format_decimal(rep.r, digits) << ',' << rep.depth << ','
       << format_decimal(rep.dp_cost, 18) << ',' << format_decimal(rep.corrected_cost, 18) << ','
       << format_decimal(rep.formula_cost, digits) << ',' << format_decimal(rep.abs_gap, 6) << ','
       << matched_label(rep.match);
    return os.str();
}

inline std::string coefficient_csv_header() { return "n,V_n,scaled_term,subsequence_tag"; }

inline std::string csv_row(const CoefficientTerm& t, int digits) {
    return std::to_string(t.n) + "," + format_decimal(t.vn, digits) + "," +
           format_decimal(t.scaled, digits) + "," + std::string(to_string(t.tag));
}

} // namespace cantorquant::io
