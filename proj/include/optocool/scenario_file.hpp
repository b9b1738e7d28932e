#pragma once

// Scenario file format (strict JSON). Every quantity carries a unit suffix; unknown keys are
// rejected. Example:
//
//   {
//     "mirror":  {"nu_hz": 32000, "mass_kg": 6.671808e-12, "quality": 1.5e6},
//     "probe":   {"wavelength_nm": 780, "power_mw": 10, "gamma_over_nu": 1e-4, "Gamma_over_nu": 0.2999},
//     "control": {"wavelength_nm": 780, "power_mw": 10, "gamma_over_nu": 1e-4, "Gamma_over_nu": 0.2999},
//     "cloud":   {"n_atoms": 10000, "delta_over_nu": 7, "placement": {"strategy": "tms", "index": 0}},
//     "environment": {"temperature_mk": 10}
//   }
//
// Drives take exactly one of wavelength_nm / omega0_rad_s and one of power_mw / rabi_over_nu.
// Placement is either {strategy, index} or {xbar_m, phase_rad}. "overrides" {eta_plus, eta_minus}
// (each [re, im]) replaces the atomic model, in which case cloud.n_atoms and cloud.delta_over_nu
// must be absent. "environment" is optional.

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

#include "optocool/cooling.hpp"
#include "optocool/errors.hpp"
#include "optocool/params.hpp"
#include "optocool/scenario.hpp"

namespace optocool {

struct MirrorSection {
    double nu_hz = 0.0;
    double mass_kg = 0.0;
    double quality = 0.0;
};

struct DriveSection {
    std::optional<double> wavelength_nm;
    std::optional<double> omega0_rad_s;
    std::optional<double> power_mw;
    std::optional<double> rabi_over_nu;
    double gamma_over_nu = 0.0;
    double Gamma_over_nu = 0.0;
};

struct PlacementSection {
    std::optional<std::string> strategy;
    std::optional<std::int64_t> index;
    std::optional<double> xbar_m;
    std::optional<double> phase_rad;
};

struct CloudSection {
    std::optional<std::int64_t> n_atoms;
    std::optional<double> delta_over_nu;
    PlacementSection placement;
};

struct EnvironmentSection {
    double temperature_mk = 0.0;
};

struct OverridesSection {
    std::complex<double> eta_plus{};
    std::complex<double> eta_minus{};
};

struct ScenarioFile {
    MirrorSection mirror;
    DriveSection probe;
    DriveSection control;
    CloudSection cloud;
    std::optional<EnvironmentSection> environment;
    std::optional<OverridesSection> overrides;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw InputError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw InputError(where + ": unknown key '" + key + "'");
    }
}

inline const json& required(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(where + ": missing key '" + key + "'");
    return *it;
}

inline double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw InputError(where + ": expected a number");
    return v.get<double>();
}

inline std::int64_t as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw InputError(where + ": expected an integer");
    return v.get<std::int64_t>();
}

inline std::optional<double> opt_number(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    return as_number(*it, where + "." + key);
}

inline std::complex<double> as_complex(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw InputError(where + ": expected [re, im]");
    return {as_number(v[0], where + "[0]"), as_number(v[1], where + "[1]")};
}

inline DriveSection parse_drive(const json& j, const std::string& where) {
    check_keys(j, where,
               {"wavelength_nm", "omega0_rad_s", "power_mw", "rabi_over_nu", "gamma_over_nu", "Gamma_over_nu"});
    DriveSection d;
    d.wavelength_nm = opt_number(j, where, "wavelength_nm");
    d.omega0_rad_s = opt_number(j, where, "omega0_rad_s");
    d.power_mw = opt_number(j, where, "power_mw");
    d.rabi_over_nu = opt_number(j, where, "rabi_over_nu");
    d.gamma_over_nu = as_number(required(j, where, "gamma_over_nu"), where + ".gamma_over_nu");
    d.Gamma_over_nu = as_number(required(j, where, "Gamma_over_nu"), where + ".Gamma_over_nu");
    return d;
}

inline json drive_to_json(const DriveSection& d) {
    json j = json::object();
    if (d.wavelength_nm) j["wavelength_nm"] = *d.wavelength_nm;
    if (d.omega0_rad_s) j["omega0_rad_s"] = *d.omega0_rad_s;
    if (d.power_mw) j["power_mw"] = *d.power_mw;
    if (d.rabi_over_nu) j["rabi_over_nu"] = *d.rabi_over_nu;
    j["gamma_over_nu"] = d.gamma_over_nu;
    j["Gamma_over_nu"] = d.Gamma_over_nu;
    return j;
}

inline std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Syntax and schema check (keys, types). Semantic checks happen in to_scenario.
inline ScenarioFile parse_scenario(const nlohmann::json& j) {
    using namespace detail;
    check_keys(j, "scenario", {"mirror", "probe", "control", "cloud", "environment", "overrides"});
    ScenarioFile f;

    const json& m = required(j, "scenario", "mirror");
    check_keys(m, "mirror", {"nu_hz", "mass_kg", "quality"});
    f.mirror.nu_hz = as_number(required(m, "mirror", "nu_hz"), "mirror.nu_hz");
    f.mirror.mass_kg = as_number(required(m, "mirror", "mass_kg"), "mirror.mass_kg");
    f.mirror.quality = as_number(required(m, "mirror", "quality"), "mirror.quality");

    f.probe = parse_drive(required(j, "scenario", "probe"), "probe");
    f.control = parse_drive(required(j, "scenario", "control"), "control");

    const json& c = required(j, "scenario", "cloud");
    check_keys(c, "cloud", {"n_atoms", "delta_over_nu", "placement"});
    if (auto it = c.find("n_atoms"); it != c.end()) f.cloud.n_atoms = as_integer(*it, "cloud.n_atoms");
    f.cloud.delta_over_nu = opt_number(c, "cloud", "delta_over_nu");
    const json& p = required(c, "cloud", "placement");
    check_keys(p, "cloud.placement", {"strategy", "index", "xbar_m", "phase_rad"});
    if (auto it = p.find("strategy"); it != p.end()) {
        if (!it->is_string()) throw InputError("cloud.placement.strategy: expected a string");
        f.cloud.placement.strategy = it->get<std::string>();
    }
    if (auto it = p.find("index"); it != p.end()) f.cloud.placement.index = as_integer(*it, "cloud.placement.index");
    f.cloud.placement.xbar_m = opt_number(p, "cloud.placement", "xbar_m");
    f.cloud.placement.phase_rad = opt_number(p, "cloud.placement", "phase_rad");

    if (auto it = j.find("environment"); it != j.end()) {
        check_keys(*it, "environment", {"temperature_mk"});
        f.environment = EnvironmentSection{
            as_number(required(*it, "environment", "temperature_mk"), "environment.temperature_mk")};
    }
    if (auto it = j.find("overrides"); it != j.end()) {
        check_keys(*it, "overrides", {"eta_plus", "eta_minus"});
        f.overrides = OverridesSection{as_complex(required(*it, "overrides", "eta_plus"), "overrides.eta_plus"),
                                       as_complex(required(*it, "overrides", "eta_minus"), "overrides.eta_minus")};
    }
    return f;
}

inline ScenarioFile parse_scenario_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("scenario: JSON syntax error at " + detail::line_col(text, e.byte) + ": " + e.what());
    }
    return parse_scenario(j);
}

inline ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

/// Echo of a parsed scenario with the same keys it was read from.
inline nlohmann::json to_json(const ScenarioFile& f) {
    using nlohmann::json;
    json j;
    j["mirror"] = {{"nu_hz", f.mirror.nu_hz}, {"mass_kg", f.mirror.mass_kg}, {"quality", f.mirror.quality}};
    j["probe"] = detail::drive_to_json(f.probe);
    j["control"] = detail::drive_to_json(f.control);
    json cloud = json::object();
    if (f.cloud.n_atoms) cloud["n_atoms"] = *f.cloud.n_atoms;
    if (f.cloud.delta_over_nu) cloud["delta_over_nu"] = *f.cloud.delta_over_nu;
    json p = json::object();
    if (f.cloud.placement.strategy) p["strategy"] = *f.cloud.placement.strategy;
    if (f.cloud.placement.index) p["index"] = *f.cloud.placement.index;
    if (f.cloud.placement.xbar_m) p["xbar_m"] = *f.cloud.placement.xbar_m;
    if (f.cloud.placement.phase_rad) p["phase_rad"] = *f.cloud.placement.phase_rad;
    cloud["placement"] = p;
    j["cloud"] = cloud;
    if (f.environment) j["environment"] = {{"temperature_mk", f.environment->temperature_mk}};
    if (f.overrides) {
        j["overrides"] = {{"eta_plus", {f.overrides->eta_plus.real(), f.overrides->eta_plus.imag()}},
                          {"eta_minus", {f.overrides->eta_minus.real(), f.overrides->eta_minus.imag()}}};
    }
    return j;
}

namespace detail {

inline DriveSpec drive_from_section(const DriveSection& d, double nu, const std::string& where) {
    if (d.wavelength_nm.has_value() == d.omega0_rad_s.has_value())
        throw InputError(where + ": exactly one of wavelength_nm, omega0_rad_s is required");
    if (d.power_mw.has_value() == d.rabi_over_nu.has_value())
        throw InputError(where + ": exactly one of power_mw, rabi_over_nu is required");
    double omega0 = 0.0;
    if (d.wavelength_nm) {
        require(finite_pos(*d.wavelength_nm), where + ".wavelength_nm: must be positive");
        omega0 = 2.0 * kPi * PhysicalConstants::c / (*d.wavelength_nm * 1e-9);
    } else {
        require(finite_pos(*d.omega0_rad_s), where + ".omega0_rad_s: must be positive");
        omega0 = *d.omega0_rad_s;
    }
    require(finite_nonneg(d.gamma_over_nu), where + ".gamma_over_nu: must be non-negative");
    require(finite_nonneg(d.Gamma_over_nu), where + ".Gamma_over_nu: must be non-negative");
    const double gamma = d.gamma_over_nu * nu;
    const double Gamma = d.Gamma_over_nu * nu;
    if (d.power_mw) {
        require(finite_nonneg(*d.power_mw), where + ".power_mw: must be non-negative");
        return DriveSpec::from_power(omega0, *d.power_mw * 1e-3, gamma, Gamma);
    }
    require(finite_nonneg(*d.rabi_over_nu), where + ".rabi_over_nu: must be non-negative");
    if (!(gamma > 0.0)) throw InputError(where + ": rabi_over_nu requires gamma_over_nu > 0");
    return DriveSpec::from_amplitude(omega0, amplitude_for_rabi(*d.rabi_over_nu * nu, gamma), gamma, Gamma);
}

}  // namespace detail

/// Full semantic validation and conversion to SI.
inline Scenario to_scenario(const ScenarioFile& f) {
    using detail::require;
    require(detail::finite_pos(f.mirror.nu_hz), "mirror.nu_hz: must be positive");
    const double nu = 2.0 * kPi * f.mirror.nu_hz;
    const MirrorSpec mirror(nu, f.mirror.mass_kg, f.mirror.quality);
    const DriveSpec probe = detail::drive_from_section(f.probe, nu, "probe");
    const DriveSpec control = detail::drive_from_section(f.control, nu, "control");

    if (f.overrides) {
        if (f.cloud.n_atoms || f.cloud.delta_over_nu)
            throw InputError("cloud: n_atoms and delta_over_nu must be absent when overrides are given");
        const auto finite = [](std::complex<double> z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
        require(finite(f.overrides->eta_plus) && finite(f.overrides->eta_minus), "overrides: values must be finite");
    } else {
        if (!f.cloud.n_atoms) throw InputError("cloud: missing key 'n_atoms'");
        if (!f.cloud.delta_over_nu) throw InputError("cloud: missing key 'delta_over_nu'");
        require(*f.cloud.n_atoms >= 0, "cloud.n_atoms: must be non-negative");
        require(std::isfinite(*f.cloud.delta_over_nu), "cloud.delta_over_nu: must be finite");
    }

    const PlacementSection& p = f.cloud.placement;
    std::optional<StrategyChoice> strategy;
    double xbar = 0.0;
    std::complex<double> phase{1.0, 0.0};
    if (p.strategy) {
        if (p.xbar_m || p.phase_rad)
            throw InputError("cloud.placement: use either {strategy, index} or {xbar_m, phase_rad}");
        StrategyChoice choice{strategy_from_string(*p.strategy), p.index.value_or(0)};
        require(choice.placement_index >= 0, "cloud.placement.index: must be non-negative");
        const Placement placed = design_position(choice.kind, nu, choice.placement_index);
        xbar = placed.xbar;
        phase = placed.phase;
        strategy = choice;
    } else {
        if (p.index) throw InputError("cloud.placement: index requires strategy");
        if (!p.xbar_m || !p.phase_rad)
            throw InputError("cloud.placement: expected {strategy, index} or {xbar_m, phase_rad}");
        require(detail::finite_nonneg(*p.xbar_m), "cloud.placement.xbar_m: must be non-negative");
        require(std::isfinite(*p.phase_rad), "cloud.placement.phase_rad: must be finite");
        phase = std::polar(1.0, *p.phase_rad);
        xbar = *p.xbar_m;
    }

    const std::int64_t n_atoms = f.overrides ? 0 : *f.cloud.n_atoms;
    const double delta = f.overrides ? 0.0 : *f.cloud.delta_over_nu * nu;
    Scenario s{mirror, probe, control, AtomCloudSpec(n_atoms, xbar, delta, phase), std::nullopt, strategy, std::nullopt};
    if (f.environment) {
        require(detail::finite_nonneg(f.environment->temperature_mk), "environment.temperature_mk: must be non-negative");
        s.environment = EnvironmentSpec(f.environment->temperature_mk * 1e-3);
    }
    if (f.overrides) s.overrides = EtaOverrides{f.overrides->eta_plus, f.overrides->eta_minus};
    return s;
}

}  // namespace optocool
