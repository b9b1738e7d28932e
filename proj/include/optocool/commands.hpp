#pragma once

// Subcommand implementations behind the optocool executable. Each returns a table and an exit code;
// library exceptions propagate and are mapped by exit_code_for.

#include <charconv>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "optocool/atom.hpp"
#include "optocool/cooling.hpp"
#include "optocool/errors.hpp"
#include "optocool/scenario.hpp"
#include "optocool/scenario_file.hpp"
#include "optocool/sweep.hpp"
#include "optocool/table.hpp"

namespace optocool {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDivergent = 3;
inline constexpr int kExitNumerical = 4;

struct CommandOutput {
    Table table;
    int exit_code = kExitOk;
    std::vector<std::string> warnings;
};

/// Maps an in-flight exception to the exit-code contract.
inline int exit_code_for(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const DivergenceError&) {
        return kExitDivergent;
    } catch (const NumericalError&) {
        return kExitNumerical;
    } catch (const std::invalid_argument&) {
        return kExitInput;
    } catch (const std::domain_error&) {
        return kExitInput;
    } catch (...) {
        return kExitNumerical;
    }
}

namespace detail {

inline std::optional<double> to_number(const std::string& s) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return x;
}

inline AxisValue to_axis_value(const std::string& s) {
    if (auto x = to_number(s)) return *x;
    return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) return out;
        start = pos + 1;
    }
}

inline std::pair<std::string, std::string> split_assignment(const std::string& spec, const char* usage) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        throw InputError("malformed spec '" + spec + "'; usage: " + usage);
    return {spec.substr(0, eq), spec.substr(eq + 1)};
}

inline constexpr const char* kAxisUsage = "PATH=LO:HI:N or PATH=V1,V2,...";
inline constexpr const char* kFreeUsage = "PATH=LO:HI or PATH=V1,V2,...";

inline std::vector<AxisValue> value_list(const std::string& spec, const std::string& rhs, const char* usage) {
    std::vector<AxisValue> values;
    for (const std::string& item : split(rhs, ',')) {
        if (item.empty()) throw InputError("malformed spec '" + spec + "'; usage: " + usage);
        values.push_back(to_axis_value(item));
    }
    return values;
}

}  // namespace detail

/// "path=lo:hi:n" (inclusive linear grid) or "path=v1,v2,..." (explicit values).
inline Axis parse_axis_spec(const std::string& spec) {
    const auto [path, rhs] = detail::split_assignment(spec, detail::kAxisUsage);
    Axis axis{path, {}};
    if (rhs.find(':') != std::string::npos) {
        const auto parts = detail::split(rhs, ':');
        const auto lo = parts.size() == 3 ? detail::to_number(parts[0]) : std::nullopt;
        const auto hi = parts.size() == 3 ? detail::to_number(parts[1]) : std::nullopt;
        const auto n = parts.size() == 3 ? detail::to_number(parts[2]) : std::nullopt;
        if (!lo || !hi || !n || !(*n >= 1.0) || std::nearbyint(*n) != *n || !std::isfinite(*lo) || !std::isfinite(*hi))
            throw InputError("malformed axis spec '" + spec + "'; usage: " + detail::kAxisUsage);
        axis.values = numeric_values(linspace(*lo, *hi, static_cast<std::size_t>(*n)));
    } else {
        axis.values = detail::value_list(spec, rhs, detail::kAxisUsage);
    }
    return axis;
}

/// "path=lo:hi" (continuous) or "path=v1,v2,..." (discrete choices).
inline FreeParameter parse_free_spec(const std::string& spec) {
    const auto [path, rhs] = detail::split_assignment(spec, detail::kFreeUsage);
    FreeParameter fp;
    fp.path = path;
    if (rhs.find(':') != std::string::npos) {
        const auto parts = detail::split(rhs, ':');
        const auto lo = parts.size() == 2 ? detail::to_number(parts[0]) : std::nullopt;
        const auto hi = parts.size() == 2 ? detail::to_number(parts[1]) : std::nullopt;
        if (!lo || !hi || !std::isfinite(*lo) || !std::isfinite(*hi) || *lo > *hi)
            throw InputError("malformed free-parameter spec '" + spec + "'; usage: " + detail::kFreeUsage);
        fp.lo = *lo;
        fp.hi = *hi;
    } else {
        fp.choices = detail::value_list(spec, rhs, detail::kFreeUsage);
    }
    return fp;
}

enum class Normalization { plus, minus, none };

inline Normalization normalization_from_string(const std::string& s) {
    if (s == "plus") return Normalization::plus;
    if (s == "minus") return Normalization::minus;
    if (s == "none") return Normalization::none;
    throw InputError("unknown normalization '" + s + "' (expected plus, minus or none)");
}

/// J(ω) on ω/ν ∈ [omega_min, omega_max].
inline CommandOutput cmd_spectrum(const ScenarioFile& file, double omega_min, double omega_max, std::size_t points,
                                  Normalization norm = Normalization::plus) {
    detail::require(points >= 2, "spectrum: need at least 2 points");
    detail::require(std::isfinite(omega_min) && std::isfinite(omega_max) && omega_min < omega_max,
                    "spectrum: omega range must be finite and increasing");
    const Scenario s = to_scenario(file);
    const AtomParams atom = s.atom();
    if (!(atom.rabi_sq_sum() > 0.0)) throw InputError("spectrum: both Rabi frequencies vanish");
    const double nu = s.mirror.nu();
    double scale = 1.0;
    if (norm != Normalization::none) scale = std::abs(spectral_factor(norm == Normalization::plus ? nu : -nu, atom).value);

    CommandOutput out;
    out.table.columns = {"omega_over_nu", "re_J", "im_J", "abs_J"};
    for (double x : linspace(omega_min, omega_max, points)) {
        const cplx J = spectral_factor(x * nu, atom).value / scale;
        out.table.add_row({x, J.real(), J.imag(), std::abs(J)});
    }
    return out;
}

inline std::vector<std::string> record_columns() {
    return {"status",      "N0",          "Lambda_plus", "Lambda_minus", "net_rate",     "env_rate",
            "n_thermal",   "abs_J_plus",  "abs_J_minus", "eta_plus_re",  "eta_plus_im",  "eta_minus_re",
            "eta_minus_im", "n_ss",       "dark_residual"};
}

inline std::vector<Cell> record_cells(PointStatus status, const std::optional<PointEvaluation>& e) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (!e) {
        std::vector<Cell> row(record_columns().size(), Cell{nan});
        row[0] = to_string(status);
        return row;
    }
    const CoolingRates& r = e->rates;
    return {to_string(status),     r.N0,
            r.LambdaPlus,          r.LambdaMinus,
            r.net(),               e->include_env ? r.env_rate : 0.0,
            e->include_env ? r.n_thermal : nan,
            std::abs(e->J_plus),   std::abs(e->J_minus),
            e->eta_plus.real(),    e->eta_plus.imag(),
            e->eta_minus.real(),   e->eta_minus.imag(),
            e->n_ss.value_or_inf(), e->dark_residual};
}

/// Single steady-state record; exit 3 when no steady state exists.
inline CommandOutput cmd_steady(const ScenarioFile& file) {
    const Scenario s = to_scenario(file);
    const PointEvaluation e = evaluate(s);
    CommandOutput out;
    out.table.columns = record_columns();
    const PointStatus status = e.n_ss.is_finite() ? PointStatus::ok : PointStatus::divergent;
    out.table.add_row(record_cells(status, e));
    out.exit_code = status == PointStatus::ok ? kExitOk : kExitDivergent;
    return out;
}

/// n(t) from n0 (default: thermal occupation of the environment) over [0, t_max].
inline CommandOutput cmd_evolve(const ScenarioFile& file, std::optional<double> n0, double t_max, std::size_t points) {
    detail::require(std::isfinite(t_max) && t_max >= 0.0, "evolve: t-max must be non-negative");
    detail::require(points >= 1, "evolve: need at least 1 point");
    const Scenario s = to_scenario(file);
    const PointEvaluation e = evaluate(s);
    if (!n0) {
        if (!s.environment) throw InputError("evolve: --n0 is required when the scenario has no environment");
        n0 = e.rates.n_thermal;
    }
    const auto grid = t_max == 0.0 ? std::vector<double>{0.0} : linspace(0.0, t_max, points);
    const Trajectory traj = evolve_occupation(*n0, e.rates, grid, e.include_env);
    CommandOutput out;
    out.table.columns = {"t_s", "n"};
    for (std::size_t k = 0; k < traj.t.size(); ++k) out.table.add_row({traj.t[k], traj.n[k]});
    if (traj.growing) out.warnings.push_back("no steady state: occupation grows without bound");
    return out;
}

inline Table sweep_table(const SweepResult& r) {
    Table t;
    t.columns = r.axes;
    for (const auto& c : record_columns()) t.columns.push_back(c);
    t.columns.push_back("message");
    for (const SweepRecord& rec : r.records) {
        std::vector<Cell> row;
        for (const AxisValue& v : rec.point) {
            if (const double* d = std::get_if<double>(&v)) {
                row.emplace_back(*d);
            } else {
                row.emplace_back(std::get<std::string>(v));
            }
        }
        for (Cell& c : record_cells(rec.status, rec.eval)) row.push_back(std::move(c));
        row.emplace_back(rec.message);
        t.add_row(std::move(row));
    }
    return t;
}

inline CommandOutput cmd_sweep(const ScenarioFile& file, const std::vector<Axis>& axes, SweepOptions options = {}) {
    to_scenario(file);
    CommandOutput out;
    out.table = sweep_table(run_sweep(file, axes, options));
    return out;
}

inline CommandOutput cmd_optimize(const ScenarioFile& file, const std::vector<FreeParameter>& free,
                                  OptimizeOptions options = {}) {
    to_scenario(file);
    const OptimumResult opt = minimize_nss(file, free, options);
    SweepResult as_sweep;
    as_sweep.axes = opt.paths;
    as_sweep.records.push_back(SweepRecord{opt.values, PointStatus::ok, "", opt.eval});
    CommandOutput out;
    out.table = sweep_table(as_sweep);
    out.table.columns.push_back("evaluations");
    out.table.rows.front().emplace_back(static_cast<double>(opt.evaluations));
    return out;
}

/// Designed detuning and placement for a strategy, with the rates they produce.
inline CommandOutput cmd_design(const ScenarioFile& file, std::optional<StrategyKind> kind, std::int64_t index) {
    const Scenario base = to_scenario(file);
    if (!kind) {
        if (!base.strategy) throw InputError("design: give --strategy or a placement strategy in the scenario");
        kind = base.strategy->kind;
    }
    detail::require(index >= 0, "design: placement index must be non-negative");
    const double nu = base.mirror.nu();
    const AtomParams atom = base.atom();
    const double delta = design_detuning(*kind, atom.Omega_p, atom.Omega_c, nu);
    const Placement placed = design_position(*kind, nu, index);

    ScenarioFile designed = file;
    if (!designed.overrides) designed.cloud.delta_over_nu = delta / nu;
    designed.cloud.placement = PlacementSection{to_string(*kind), index, std::nullopt, std::nullopt};
    const Scenario s = to_scenario(designed);
    const PointEvaluation e = evaluate(s);
    const PointStatus status = e.n_ss.is_finite() ? PointStatus::ok : PointStatus::divergent;

    const cplx mm = std::conj(e.mu_p) * e.mu_c;
    const double ideal = mm.real() > 0.0 ? ideal_occupation(*kind, e.mu_p, e.mu_c) : std::numeric_limits<double>::quiet_NaN();

    CommandOutput out;
    out.table.columns = {"strategy", "placement_index", "delta_over_nu", "xbar_m", "tau_s", "phase", "warning"};
    for (const auto& c : record_columns()) out.table.columns.push_back(c);
    out.table.columns.push_back("n_ss_ideal");
    std::vector<Cell> row{to_string(*kind), static_cast<double>(index), delta / nu, placed.xbar, placed.tau,
                          placed.phase.real(), placed.warning.value_or("")};
    for (Cell& c : record_cells(status, e)) row.push_back(std::move(c));
    row.emplace_back(ideal);
    out.table.add_row(std::move(row));
    if (placed.warning) out.warnings.push_back(*placed.warning);
    return out;
}

}  // namespace optocool
