#include "cma/factors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <stdexcept>

#include "json.hpp"

namespace cma {

namespace {

constexpr double kDistTol = 1e-12;

// constexpr so factor construction is safe from any static initializer
constexpr const char* kFsCodes[]{"N", "ELASAP", "ELPract"};
constexpr const char* kMhCodes[]{"NF", "SF", "JF"};
constexpr const char* kMmCodes[]{"MM0", "MM1"};
constexpr const char* kBhCodes[]{"G", "M", "P"};
constexpr const char* kRmCodes[]{"RM0", "RM1"};

void check_distribution(const FactorTable& t, const std::string& key) {
    const auto& dist = t.cpt.at(key);
    double sum = 0.0;
    for (const auto& [value, p] : dist) {
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("factor '" + t.child + "', assignment '" + key +
                                        "': probability out of [0,1] for value '" + value + "'");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kDistTol)
        throw std::invalid_argument("factor '" + t.child + "', assignment '" + key +
                                    "': distribution sums to " + std::to_string(sum));
}

}  // namespace

std::string assignment_key(const std::vector<std::string>& parent_values) {
    std::string key;
    for (std::size_t i = 0; i < parent_values.size(); ++i) {
        if (i) key += '|';
        key += parent_values[i];
    }
    return key;
}

const std::map<std::string, double>& FactorTable::row(const std::string& assignment) const {
    auto it = cpt.find(assignment);
    if (it == cpt.end())
        throw std::out_of_range("factor '" + child + "': missing assignment '" + assignment + "'");
    return it->second;
}

double FactorTable::prob(const std::string& assignment, const std::string& value) const {
    const auto& dist = row(assignment);
    auto it = dist.find(value);
    return it == dist.end() ? 0.0 : it->second;
}

ModelSpec default_model_spec() {
    ModelSpec spec;

    // FS: actions are commands. NoOp/Terminate preserve flight status,
    // LandASAP forces ELASAP (also from ELPract), LandPract forces ELPract.
    spec.flight_status.child = "fs";
    spec.flight_status.parents = {"fs", "action"};
    for (const auto& fs : kFsCodes) {
        spec.flight_status.cpt[assignment_key({fs, "NoOp"})] = {{fs, 1.0}};
        spec.flight_status.cpt[assignment_key({fs, "Terminate"})] = {{fs, 1.0}};
        spec.flight_status.cpt[assignment_key({fs, "LandASAP"})] = {{"ELASAP", 1.0}};
        spec.flight_status.cpt[assignment_key({fs, "LandPract"})] = {{"ELPract", 1.0}};
    }

    // MH: fixed per-step degradation chain NF -> SF -> JF.
    spec.motor_health.child = "mh";
    spec.motor_health.parents = {"mh"};
    spec.motor_health.cpt["NF"] = {{"NF", 0.9999525}, {"SF", 0.0000475}};
    spec.motor_health.cpt["SF"] = {{"SF", 0.997191}, {"JF", 0.002809}};
    spec.motor_health.cpt["JF"] = {{"JF", 1.0}};

    // MM: the NoOp/Terminate columns are the tabulated motor-margin rows.
    // Emergency landings shorten the executing plan, which lifts a depleted
    // spall margin back above zero with high probability; a jammed motor
    // stays at MM0 regardless.
    spec.motor_margin.child = "mm";
    spec.motor_margin.parents = {"mm", "mh", "action"};
    auto mm_row = [&](const char* mm, const char* mh, const char* act, double p_mm0) {
        std::map<std::string, double> d;
        if (p_mm0 > 0.0) d["MM0"] = p_mm0;
        if (p_mm0 < 1.0) d["MM1"] = 1.0 - p_mm0;
        spec.motor_margin.cpt[assignment_key({mm, mh, act})] = d;
    };
    for (const char* act : {"NoOp", "Terminate"}) {
        mm_row("MM0", "NF", act, 0.0);
        mm_row("MM0", "SF", act, 0.995);
        mm_row("MM0", "JF", act, 1.0);
        mm_row("MM1", "NF", act, 0.0);
        mm_row("MM1", "SF", act, 0.002809);
        mm_row("MM1", "JF", act, 1.0);
    }
    for (const char* act : {"LandASAP", "LandPract"}) {
        mm_row("MM0", "NF", act, 0.0);
        mm_row("MM0", "SF", act, 0.1);  // shortened plan restores margin w.p. 0.9
        mm_row("MM0", "JF", act, 1.0);
        mm_row("MM1", "NF", act, 0.0);
        mm_row("MM1", "SF", act, 0.002809);
        mm_row("MM1", "JF", act, 1.0);
    }

    // BH is constant within a flight.
    spec.battery_health.child = "bh";
    spec.battery_health.parents = {"bh"};
    for (const auto& bh : kBhCodes) spec.battery_health.cpt[bh] = {{bh, 1.0}};

    // RM: under NoOp the margin erodes at a battery-health-graded rate and a
    // depleted margin stays depleted. LandASAP plans within the reachable
    // footprint, so it restores a depleted margin w.p. 0.9 for any battery.
    // LandPract reuses pre-planned sites that a poor battery often cannot
    // reach, so its restore probability collapses for BH=P.
    spec.reach_margin.child = "rm";
    spec.reach_margin.parents = {"bh", "rm", "action"};
    const std::map<std::string, double> decay{{"G", 0.0001}, {"M", 0.00015}, {"P", 0.0002}};
    const std::map<std::string, double> pract_restore{{"G", 0.9}, {"M", 0.9}, {"P", 0.05}};
    auto rm_row = [&](const std::string& bh, const char* rm, const char* act, double p_rm1) {
        std::map<std::string, double> d;
        if (p_rm1 < 1.0) d["RM0"] = 1.0 - p_rm1;
        if (p_rm1 > 0.0) d["RM1"] = p_rm1;
        spec.reach_margin.cpt[assignment_key({bh, rm, act})] = d;
    };
    for (const auto& bh : kBhCodes) {
        for (const char* act : {"NoOp", "Terminate"}) {
            rm_row(bh, "RM1", act, 1.0 - decay.at(bh));
            rm_row(bh, "RM0", act, 0.0);
        }
        rm_row(bh, "RM1", "LandASAP", 1.0);
        rm_row(bh, "RM0", "LandASAP", 0.9);
        rm_row(bh, "RM1", "LandPract", 1.0);
        rm_row(bh, "RM0", "LandPract", pract_restore.at(bh));
    }

    // Completion: geometric with the executing plan's length; impossible when
    // the battery cannot reach the site (RM0).
    spec.complete.child = "complete";
    spec.complete.parents = {"fs", "rm"};
    const std::map<std::string, double> complete_rate{{"N", 0.006}, {"ELASAP", 0.10}, {"ELPract", 0.05}};
    for (const auto& fs : kFsCodes) {
        spec.complete.cpt[assignment_key({fs, "RM1"})] = {{"true", complete_rate.at(fs)},
                                                          {"false", 1.0 - complete_rate.at(fs)}};
        spec.complete.cpt[assignment_key({fs, "RM0"})] = {{"false", 1.0}};
    }

    // Failure: insufficient battery energy (RM0), plus instability risk while
    // flying on a margin-depleted faulted motor (spall past margin or jam).
    spec.failure.child = "failure";
    spec.failure.parents = {"mh", "mm", "rm"};
    for (const auto& mh : kMhCodes) {
        for (const auto& mm : kMmCodes) {
            for (const auto& rm : kRmCodes) {
                double p = 0.0;
                if (std::string_view(rm) == "RM0") p += 0.05;
                if (std::string_view(mm) == "MM0" && std::string_view(mh) != "NF") p += 0.05;
                std::map<std::string, double> d;
                if (p > 0.0) d["true"] = p;
                d["false"] = 1.0 - p;
                spec.failure.cpt[assignment_key({mh, mm, rm})] = d;
            }
        }
    }

    return spec;
}

namespace {

using nlohmann::json;

json factor_to_json(const FactorTable& t) {
    json j;
    j["child"] = t.child;
    j["parents"] = t.parents;
    json cpt = json::object();
    for (const auto& [key, dist] : t.cpt) {
        json d = json::object();
        for (const auto& [value, p] : dist) d[value] = p;
        cpt[key] = d;
    }
    j["cpt"] = cpt;
    return j;
}

FactorTable factor_from_json(const json& j, const std::string& name) {
    if (!j.is_object() || !j.contains("child") || !j.contains("parents") || !j.contains("cpt"))
        throw std::invalid_argument("model file: factor '" + name +
                                    "' must have child/parents/cpt");
    FactorTable t;
    t.child = j.at("child").get<std::string>();
    t.parents = j.at("parents").get<std::vector<std::string>>();
    for (const auto& [key, dist] : j.at("cpt").items()) {
        for (const auto& [value, p] : dist.items()) {
            if (!p.is_number())
                throw std::invalid_argument("model file: factor '" + name + "', assignment '" +
                                            key + "', value '" + value + "' is not a number");
            t.cpt[key][value] = p.get<double>();
        }
        check_distribution(t, key);
    }
    return t;
}

}  // namespace

std::string to_json(const ModelSpec& spec) {
    json j;
    j["schema_version"] = spec.schema_version;
    json factors;
    factors["flight_status"] = factor_to_json(spec.flight_status);
    factors["motor_health"] = factor_to_json(spec.motor_health);
    factors["motor_margin"] = factor_to_json(spec.motor_margin);
    factors["battery_health"] = factor_to_json(spec.battery_health);
    factors["reach_margin"] = factor_to_json(spec.reach_margin);
    factors["complete"] = factor_to_json(spec.complete);
    factors["failure"] = factor_to_json(spec.failure);
    j["factors"] = factors;
    json w;
    w["w_e"] = {{"C", spec.weights.w_absorbing[0]},
                {"T", spec.weights.w_absorbing[1]},
                {"FL", spec.weights.w_absorbing[2]},
                {"E", spec.weights.w_absorbing[3]}};
    w["w_s"] = spec.weights.w_state;
    w["w_a"] = {{"NoOp", spec.weights.w_action[0]},
                {"Terminate", spec.weights.w_action[1]},
                {"LandASAP", spec.weights.w_action[2]},
                {"LandPract", spec.weights.w_action[3]}};
    j["weights"] = w;
    return j.dump(2) + "\n";
}

ModelSpec model_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model file: JSON parse error: ") + e.what());
    }
    ModelSpec spec;
    if (j.contains("schema_version")) spec.schema_version = j.at("schema_version").get<int>();
    if (!j.contains("factors")) throw std::invalid_argument("model file: missing 'factors'");
    const json& f = j.at("factors");
    auto get = [&](const char* name) -> FactorTable {
        if (!f.contains(name))
            throw std::invalid_argument(std::string("model file: missing factor '") + name + "'");
        return factor_from_json(f.at(name), name);
    };
    spec.flight_status = get("flight_status");
    spec.motor_health = get("motor_health");
    spec.motor_margin = get("motor_margin");
    spec.battery_health = get("battery_health");
    spec.reach_margin = get("reach_margin");
    spec.complete = get("complete");
    spec.failure = get("failure");
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        if (w.contains("w_e")) {
            spec.weights.w_absorbing[0] = w.at("w_e").at("C").get<double>();
            spec.weights.w_absorbing[1] = w.at("w_e").at("T").get<double>();
            spec.weights.w_absorbing[2] = w.at("w_e").at("FL").get<double>();
            spec.weights.w_absorbing[3] = w.at("w_e").at("E").get<double>();
        }
        if (w.contains("w_s")) {
            auto v = w.at("w_s").get<std::vector<double>>();
            if (v.size() != 5) throw std::invalid_argument("model file: weights.w_s must have 5 entries");
            std::copy(v.begin(), v.end(), spec.weights.w_state.begin());
        }
        if (w.contains("w_a")) {
            spec.weights.w_action[0] = w.at("w_a").at("NoOp").get<double>();
            spec.weights.w_action[1] = w.at("w_a").at("Terminate").get<double>();
            spec.weights.w_action[2] = w.at("w_a").at("LandASAP").get<double>();
            spec.weights.w_action[3] = w.at("w_a").at("LandPract").get<double>();
        }
    }
    return spec;
}

ModelSpec load_model_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("model file: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_spec_from_json(ss.str());
}

void save_model_spec(const ModelSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << to_json(spec);
}

}  // namespace cma
