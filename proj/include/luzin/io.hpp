#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrector.hpp"

namespace luzin {

using json = nlohmann::ordered_json;

// Runs of equal bits in node order (base-major), starting with a run of `first`.
inline json rle_encode(const NodeMask& m) {
    const auto& s = *m.space();
    json runs = json::array();
    const auto& b = m.bits();
    std::size_t k = 0;
    while (k < b.size()) {
        std::size_t e = k;
        while (e < b.size() && b[e] == b[k]) ++e;
        runs.push_back(e - k);
        k = e;
    }
    return {{"layout", "base-major"},
            {"n_base", s.n_base()},
            {"n_t", s.n_t()},
            {"first", b.empty() ? 0 : static_cast<int>(b[0])},
            {"count", m.count()},
            {"measure", m.measure()},
            {"runs", runs}};
}

inline NodeMask rle_decode(const json& j, SpaceHandle space) {
    require(j.at("n_base").get<std::size_t>() == space->n_base() && j.at("n_t").get<std::size_t>() == space->n_t(), Errc::invalid_input,
            "mask shape does not match the space");
    NodeMask m(space, false);
    bool v = j.at("first").get<int>() != 0;
    std::size_t k = 0;
    for (const auto& r : j.at("runs")) {
        const auto n = r.get<std::size_t>();
        require(k + n <= m.size(), Errc::invalid_input, "mask runs overflow the grid");
        for (std::size_t q = 0; q < n; ++q) m.set(k + q, v);
        k += n;
        v = !v;
    }
    require(k == m.size(), Errc::invalid_input, "mask runs do not cover the grid");
    return m;
}

// NaN and infinities have no JSON spelling.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const Error& e) { return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"achieved", number(e.achieved())}}; }

template <std::size_t N>
json statements_json(const std::array<bool, N>& s) {
    json a = json::array();
    for (bool b : s) a.push_back(b);
    return a;
}

inline json to_json(const StepCorrection& r) {
    return {{"eps", r.eps},
            {"delta", r.delta},
            {"n_start", r.n_start},
            {"n_end", r.n_end},
            {"terms", r.Q.terms().size()},
            {"nu0", r.nu0},
            {"bumps", r.bumps},
            {"max_s0", r.max_s0},
            {"cell_eps", r.cell_eps},
            {"f_norm1", r.f1},
            {"g_norm1", r.g1},
            {"lambda_error", r.lambda_error},
            {"E_measure", r.E_measure},
            {"g_minus_Q_norm1", r.g_minus_q1},
            {"envelope", r.envelope},
            {"bumps_hold", r.bumps_hold},
            {"statements", statements_json(r.statements)},
            {"warnings", r.warnings}};
}

inline json to_json(const TailCheck& t) { return {{"r", t.r}, {"m", t.m}, {"norm", t.norm}, {"bound", t.bound}, {"holds", t.holds}}; }

inline json to_json(const CorrectionCertificate& c) {
    json tails = json::array();
    for (const auto& t : c.tails) tails.push_back(to_json(t));
    return {{"eps", c.eps},
            {"delta", c.delta},
            {"eps0", c.eps0},
            {"f_norm1", c.f1},
            {"g_norm1", c.g1},
            {"f_minus_g_norm1", c.f_minus_g_1},
            {"f_minus_g_bound", c.f_minus_g_bound},
            {"E_measure", c.E_measure},
            {"sup_partial_norm1", c.sup_partial_1},
            {"sup_argmax", c.sup_argmax},
            {"min_f1_g1", c.min_f1_g1},
            {"ratio", c.ratio},
            {"within_seven_32", c.within_seven_32},
            {"norm_relation", c.norm_relation},
            {"nu_exceeds_s", c.nu_exceeds_s},
            {"greedy_holds", c.greedy_holds},
            {"k", c.k},
            {"nu", c.nu},
            {"s_max", c.s_max},
            {"n_end", c.n_end},
            {"tails", tails},
            {"statements", statements_json(c.statements)},
            {"warnings", c.warnings}};
}

inline json to_json(const UniversalSetBundle& u) {
    json recs = json::array();
    for (const auto& r : u.records)
        recs.push_back({{"k", r.k},
                        {"N_prev", r.n_prev},
                        {"N", r.n_next},
                        {"R_terms", r.R.terms().size()},
                        {"R_norm1", r.r1},
                        {"eps", r.eps},
                        {"delta", r.delta},
                        {"E_measure", r.E.measure()},
                        {"statements", statements_json(r.statements)}});
    return {{"depth", u.depth()},
            {"eps0_floor", u.eps0_floor},
            {"delta", u.delta},
            {"E_measure", u.E.measure()},
            {"records", recs},
            {"warnings", u.warnings}};
}

inline void write_tails_csv(std::ostream& os, const std::vector<TailCheck>& tails) {
    os.precision(17);
    os << "r,m,norm,bound,holds\n";
    for (const auto& t : tails) os << t.r << ',' << t.m << ',' << t.norm << ',' << t.bound << ',' << (t.holds ? 1 : 0) << '\n';
}

inline void write_envelope_csv(std::ostream& os, const std::vector<std::pair<std::size_t, double>>& trace) {
    os.precision(17);
    os << "m,norm\n";
    for (const auto& [m, v] : trace) os << m << ',' << v << '\n';
}

}  // namespace luzin
