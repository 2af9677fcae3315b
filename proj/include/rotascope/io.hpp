#pragma once

// JSON encodings of lifts and results.

#include <cmath>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rotascope/circle_map.hpp"
#include "rotascope/cont_frac.hpp"
#include "rotascope/denjoy.hpp"
#include "rotascope/derivative_probe.hpp"
#include "rotascope/errors.hpp"
#include "rotascope/measure_conj.hpp"
#include "rotascope/rotation.hpp"
#include "rotascope/staircase.hpp"

namespace rotascope {

using json = nlohmann::ordered_json;

/// {"family", "coefficients": {"sin", "cos"}, "precision"}; "K" is added for the standard map.
inline json lift_to_json(const LiftDescriptor& lift) {
    json j;
    j["family"] = lift.family();
    j["coefficients"] = {{"sin", lift.sin_coeffs()}, {"cos", lift.cos_coeffs()}};
    j["precision"] = lift.precision();
    if (!std::isnan(lift.arnold_K())) j["K"] = lift.arnold_K();
    return j;
}

inline LiftDescriptor lift_from_json(const json& j) {
    try {
        const std::string family = j.value("family", std::string("harmonic"));
        const int precision = j.value("precision", 15);
        if (family == "identity") return LiftDescriptor::identity(precision);
        if (family == "arnold") {
            if (!j.contains("K")) throw DomainError("lift JSON: arnold family requires K");
            return LiftDescriptor::arnold(j.at("K").get<double>(), precision);
        }
        std::vector<double> s, c;
        if (j.contains("coefficients")) {
            const json& co = j.at("coefficients");
            if (co.contains("sin")) s = co.at("sin").get<std::vector<double>>();
            if (co.contains("cos")) c = co.at("cos").get<std::vector<double>>();
        }
        return LiftDescriptor::harmonic(std::move(s), std::move(c), family, precision);
    } catch (const json::exception& e) {
        throw DomainError(std::string("lift JSON: ") + e.what());
    }
}

inline json to_json(const Rational& r) { return r.str(); }

inline json to_json(const RotationEstimate& e) {
    json j;
    j["value"] = e.value;
    j["radius"] = e.radius;
    j["method"] = to_string(e.method);
    j["n_used"] = e.n_used;
    j["locked"] = e.locked ? json(e.locked->str()) : json(nullptr);
    if (e.method == Method::farey) {
        j["lower"] = e.lower.str();
        j["upper"] = e.upper.str();
        j["resolved"] = e.resolved;
    }
    return j;
}

inline json to_json(const ContinuedFraction& cf) {
    json conv = json::array();
    for (const auto& c : cf.convergents) conv.push_back(c.str());
    return {{"a", cf.a}, {"convergents", conv}, {"exact", cf.exact}};
}

inline json to_json(const Plateau& p) {
    return {{"p", p.pq.p}, {"q", p.pq.q}, {"t_left", p.t_left}, {"t_right", p.t_right},
            {"width", p.width()}, {"tol", p.tol},     {"verified", p.verified}};
}

inline json to_json(const InverseResult& r) {
    return {{"t", r.t}, {"lo", r.lo}, {"hi", r.hi}, {"uncertainty", r.uncertainty()},
            {"resolution_limited", r.resolution_limited}};
}

inline json to_json(const JdMeasurement& m) {
    return {{"pq", m.pq.str()},         {"d", m.d},          {"measure", m.measure},
            {"bound", m.bound},         {"uncertainty", m.uncertainty},
            {"t_minus", m.t_minus},     {"t_plus", m.t_plus}, {"plateau", to_json(m.plateau)},
            {"M", m.M},                 {"holds", m.holds}};
}

inline json to_json(const DynInterval& i) {
    return {{"left", i.left}, {"right", i.right}, {"length", i.length()}};
}

inline json to_json(const HatEllCheck& h) {
    const ReturnPartition& rp = h.partition;
    const DenjoyFrame& fr = rp.frame;
    const double tol = 1e-12;
    json j;
    j["alpha"] = fr.reflected ? -fr.alpha : fr.alpha;
    j["alpha_radius"] = fr.alpha_radius;
    j["convergent"] = Rational{fr.reflected ? -fr.conv.p : fr.conv.p, fr.conv.q}.str();
    j["previous"] = Rational{fr.reflected ? -fr.prev.p : fr.prev.p, fr.prev.q}.str();
    j["a_next"] = fr.a_next;
    j["reflected"] = fr.reflected;
    j["note"] = fr.reflected ? "intervals are in the frame x -> -x" : "";
    j["intervals"] = {{"L", to_json(rp.L)}, {"K", to_json(rp.K)}, {"hatL", to_json(h.chain.hatL)}};
    j["margins"] = {{"L_images_disjoint", rp.margin_L_disjoint},
                    {"K_images_disjoint", rp.margin_K_disjoint},
                    {"K_images_abutment_error", rp.abut_K_error},
                    {"run_inside_K", rp.margin_run_in_K},
                    {"chain_inside_fqL", h.chain.containment_margin}};
    j["constants"] = {{"M", h.M}, {"N", h.N}, {"t", h.chain.t}, {"t_plateau", fr.reflected ? -h.t_left : h.t_left}};
    j["hat_ell"] = h.hat_ell;
    j["hat_ell_x"] = h.hat_ell_x;
    j["quotient"] = h.quotient;
    j["uncertainty"] = h.uncertainty;
    j["bound"] = h.bound;
    j["bound_eM"] = h.bound_eM;
    j["run_hat_ell"] = h.run_hat_ell;
    j["checks"] = {{"L_images_disjoint", rp.margin_L_disjoint > tol},
                   {"K_images_disjoint", rp.margin_K_disjoint > tol && rp.abut_K_error <= tol},
                   {"run_inside_K", rp.margin_run_in_K > tol},
                   {"telescoping", h.chain.telescoping_error <= 1e-10},
                   {"chain_abuts", h.chain.abut_error <= 1e-12},
                   {"tau_distortion", h.tau_ok},
                   {"refined_bound", h.holds},
                   {"run_sum_at_most_1", h.run_sum_ok},
                   {"comparison_e^N", h.comparison_ok},
                   {"a_next_hat_ell_e^N", h.scaled_ok}};
    return j;
}

inline bool certificate_passes(const json& cert) {
    for (const auto& [k, v] : cert.at("checks").items())
        if (!v.get<bool>()) return false;
    return true;
}

inline json to_json(const DistortionRatio& r) {
    return {{"max_ratio", r.max_ratio}, {"bound", r.bound}, {"total_length", r.total_length},
            {"margin", r.margin},       {"holds", r.holds}};
}

inline json to_json(const QuotientRecord& r) {
    json j{{"k", r.k},
           {"convergent", r.convergent.str()},
           {"t_prime", r.t_prime},
           {"quotient", r.quotient},
           {"uncertainty", r.uncertainty},
           {"bound_eM", r.bound_eM},
           {"bound_e55", r.bound_e55 ? json(*r.bound_e55) : json(nullptr)},
           {"hat_ell", r.hat_ell ? json(*r.hat_ell) : json(nullptr)},
           {"running_max", r.running_max},
           {"tie", r.tie}};
    if (r.skipped) j["skipped"] = r.skip_reason;
    return j;
}

inline json to_json(const BlowupProbe& b) {
    return {{"pq", b.pq.str()},           {"side", to_string(b.side)},
            {"t_boundary", b.t_boundary}, {"offsets", b.offsets},
            {"quotients", b.quotients},   {"uncertainties", b.uncertainties},
            {"loglog_slope", b.loglog_slope}, {"strictly_increasing", b.strictly_increasing()}};
}

inline json to_json(const InvariantAverage& a) {
    return {{"observable", a.observable_tag}, {"value", a.value}, {"n", a.n}, {"x0", a.x0}};
}

}  // namespace rotascope
