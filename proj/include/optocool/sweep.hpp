#pragma once

// Grid sweeps and n_ss minimisation over scenario-file parameters.
//
// Parameters are addressed by their dotted file keys, e.g. "cloud.delta_over_nu",
// "probe.power_mw", "cloud.placement.strategy". The "drives." prefix sets probe and control together.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "optocool/errors.hpp"
#include "optocool/scenario.hpp"
#include "optocool/scenario_file.hpp"

namespace optocool {

using AxisValue = std::variant<double, std::string>;

struct Axis {
    std::string path;
    std::vector<AxisValue> values;
};

namespace detail {

using Setter = std::function<void(ScenarioFile&, const AxisValue&)>;

inline double numeric(const AxisValue& v, const std::string& path) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw InputError("parameter '" + path + "' takes numeric values");
}

inline std::int64_t integral(const AxisValue& v, const std::string& path) {
    const double d = numeric(v, path);
    if (!(std::nearbyint(d) == d) || std::abs(d) > 9.0e15)
        throw InputError("parameter '" + path + "' takes integer values");
    return static_cast<std::int64_t>(d);
}

inline void add_drive_paths(std::map<std::string, Setter>& m, const std::string& prefix,
                            std::vector<DriveSection ScenarioFile::*> targets) {
    auto each = [targets](ScenarioFile& f, auto&& fn) {
        for (auto t : targets) fn(f.*t);
    };
    m[prefix + ".wavelength_nm"] = [each, prefix](ScenarioFile& f, const AxisValue& v) {
        const double x = numeric(v, prefix + ".wavelength_nm");
        each(f, [x](DriveSection& d) { d.wavelength_nm = x; d.omega0_rad_s.reset(); });
    };
    m[prefix + ".omega0_rad_s"] = [each, prefix](ScenarioFile& f, const AxisValue& v) {
        const double x = numeric(v, prefix + ".omega0_rad_s");
        each(f, [x](DriveSection& d) { d.omega0_rad_s = x; d.wavelength_nm.reset(); });
    };
    m[prefix + ".power_mw"] = [each, prefix](ScenarioFile& f, const AxisValue& v) {
        const double x = numeric(v, prefix + ".power_mw");
        each(f, [x](DriveSection& d) { d.power_mw = x; d.rabi_over_nu.reset(); });
    };
    m[prefix + ".rabi_over_nu"] = [each, prefix](ScenarioFile& f, const AxisValue& v) {
        const double x = numeric(v, prefix + ".rabi_over_nu");
        each(f, [x](DriveSection& d) { d.rabi_over_nu = x; d.power_mw.reset(); });
    };
    m[prefix + ".gamma_over_nu"] = [each, prefix](ScenarioFile& f, const AxisValue& v) {
        const double x = numeric(v, prefix + ".gamma_over_nu");
        each(f, [x](DriveSection& d) { d.gamma_over_nu = x; });
    };
    m[prefix + ".Gamma_over_nu"] = [each, prefix](ScenarioFile& f, const AxisValue& v) {
        const double x = numeric(v, prefix + ".Gamma_over_nu");
        each(f, [x](DriveSection& d) { d.Gamma_over_nu = x; });
    };
}

inline OverridesSection& ensure_overrides(ScenarioFile& f) {
    if (!f.overrides) f.overrides = OverridesSection{};
    return *f.overrides;
}

inline const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        m["mirror.nu_hz"] = [](ScenarioFile& f, const AxisValue& v) { f.mirror.nu_hz = numeric(v, "mirror.nu_hz"); };
        m["mirror.mass_kg"] = [](ScenarioFile& f, const AxisValue& v) {
            f.mirror.mass_kg = numeric(v, "mirror.mass_kg");
        };
        m["mirror.quality"] = [](ScenarioFile& f, const AxisValue& v) {
            f.mirror.quality = numeric(v, "mirror.quality");
        };
        add_drive_paths(m, "probe", {&ScenarioFile::probe});
        add_drive_paths(m, "control", {&ScenarioFile::control});
        add_drive_paths(m, "drives", {&ScenarioFile::probe, &ScenarioFile::control});
        m["cloud.n_atoms"] = [](ScenarioFile& f, const AxisValue& v) {
            f.cloud.n_atoms = integral(v, "cloud.n_atoms");
        };
        m["cloud.delta_over_nu"] = [](ScenarioFile& f, const AxisValue& v) {
            f.cloud.delta_over_nu = numeric(v, "cloud.delta_over_nu");
        };
        m["cloud.placement.strategy"] = [](ScenarioFile& f, const AxisValue& v) {
            const std::string* s = std::get_if<std::string>(&v);
            if (!s) throw InputError("parameter 'cloud.placement.strategy' takes the values bs, tms");
            f.cloud.placement.strategy = *s;
            f.cloud.placement.xbar_m.reset();
            f.cloud.placement.phase_rad.reset();
        };
        m["cloud.placement.index"] = [](ScenarioFile& f, const AxisValue& v) {
            f.cloud.placement.index = integral(v, "cloud.placement.index");
            f.cloud.placement.xbar_m.reset();
            f.cloud.placement.phase_rad.reset();
        };
        m["cloud.placement.xbar_m"] = [](ScenarioFile& f, const AxisValue& v) {
            f.cloud.placement.xbar_m = numeric(v, "cloud.placement.xbar_m");
            if (!f.cloud.placement.phase_rad) f.cloud.placement.phase_rad = 0.0;
            f.cloud.placement.strategy.reset();
            f.cloud.placement.index.reset();
        };
        m["cloud.placement.phase_rad"] = [](ScenarioFile& f, const AxisValue& v) {
            f.cloud.placement.phase_rad = numeric(v, "cloud.placement.phase_rad");
            if (!f.cloud.placement.xbar_m) f.cloud.placement.xbar_m = 0.0;
            f.cloud.placement.strategy.reset();
            f.cloud.placement.index.reset();
        };
        m["environment.temperature_mk"] = [](ScenarioFile& f, const AxisValue& v) {
            f.environment = EnvironmentSection{numeric(v, "environment.temperature_mk")};
        };
        m["overrides.eta_plus.re"] = [](ScenarioFile& f, const AxisValue& v) {
            auto& o = ensure_overrides(f);
            o.eta_plus.real(numeric(v, "overrides.eta_plus.re"));
        };
        m["overrides.eta_plus.im"] = [](ScenarioFile& f, const AxisValue& v) {
            auto& o = ensure_overrides(f);
            o.eta_plus.imag(numeric(v, "overrides.eta_plus.im"));
        };
        m["overrides.eta_minus.re"] = [](ScenarioFile& f, const AxisValue& v) {
            auto& o = ensure_overrides(f);
            o.eta_minus.real(numeric(v, "overrides.eta_minus.re"));
        };
        m["overrides.eta_minus.im"] = [](ScenarioFile& f, const AxisValue& v) {
            auto& o = ensure_overrides(f);
            o.eta_minus.imag(numeric(v, "overrides.eta_minus.im"));
        };
        return m;
    }();
    return table;
}

inline const Setter& setter_for(const std::string& path) {
    const auto& table = setters();
    auto it = table.find(path);
    if (it == table.end()) throw InputError("unknown parameter path '" + path + "'");
    return it->second;
}

}  // namespace detail

inline std::vector<std::string> parameter_paths() {
    std::vector<std::string> out;
    for (const auto& [path, fn] : detail::setters()) out.push_back(path);
    return out;
}

inline void apply_parameter(ScenarioFile& f, const std::string& path, const AxisValue& value) {
    detail::setter_for(path)(f, value);
}

/// n points from lo to hi inclusive; endpoints and 0 are exact.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    detail::require(std::isfinite(lo) && std::isfinite(hi), "linspace: bounds must be finite");
    detail::require(n >= 1, "linspace: need at least one point");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n - 1);
        out[k] = lo * (1.0 - t) + hi * t;
    }
    out.back() = hi;
    return out;
}

inline std::vector<AxisValue> numeric_values(const std::vector<double>& xs) {
    return {xs.begin(), xs.end()};
}

enum class PointStatus { ok, divergent, input_error, numerical_error };

inline std::string to_string(PointStatus s) {
    switch (s) {
        case PointStatus::ok: return "ok";
        case PointStatus::divergent: return "divergent";
        case PointStatus::input_error: return "input_error";
        case PointStatus::numerical_error: return "numerical_error";
    }
    return "unknown";
}

struct SweepRecord {
    std::vector<AxisValue> point;
    PointStatus status = PointStatus::ok;
    std::string message;
    std::optional<PointEvaluation> eval;
};

struct SweepResult {
    std::vector<std::string> axes;
    std::vector<SweepRecord> records;
};

struct SweepOptions {
    std::size_t threads = 0;  // 0: hardware concurrency capped by OPTOCOOL_THREADS
    std::size_t max_points = 10'000'000;
};

/// Worker count: requested (or hardware) concurrency, capped by OPTOCOOL_THREADS when set.
inline std::size_t resolve_threads(std::size_t requested) {
    std::size_t n = requested > 0 ? requested : std::max<unsigned>(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("OPTOCOOL_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return n;
}

/// One point: apply overrides to a copy of the base file, validate, evaluate. Never throws.
inline SweepRecord evaluate_point(const ScenarioFile& base, const std::vector<std::string>& paths,
                                  const std::vector<AxisValue>& point) {
    SweepRecord rec;
    rec.point = point;
    try {
        ScenarioFile f = base;
        for (std::size_t a = 0; a < paths.size(); ++a) apply_parameter(f, paths[a], point[a]);
        rec.eval = evaluate(to_scenario(f));
        rec.status = rec.eval->n_ss.is_finite() ? PointStatus::ok : PointStatus::divergent;
    } catch (const InputError& e) {
        rec.status = PointStatus::input_error;
        rec.message = e.what();
    } catch (const std::invalid_argument& e) {
        rec.status = PointStatus::input_error;
        rec.message = e.what();
    } catch (const std::domain_error& e) {
        rec.status = PointStatus::input_error;
        rec.message = e.what();
    } catch (const std::exception& e) {
        rec.status = PointStatus::numerical_error;
        rec.message = e.what();
    }
    return rec;
}

/// Cartesian sweep, last axis varying fastest. Per-point failures are recorded, not thrown.
inline SweepResult run_sweep(const ScenarioFile& base, const std::vector<Axis>& axes, SweepOptions options = {}) {
    std::size_t count = 1;
    for (const Axis& ax : axes) {
        detail::setter_for(ax.path);
        if (ax.values.empty()) throw InputError("axis '" + ax.path + "' has no values");
        if (count > options.max_points / ax.values.size())
            throw InputError("sweep grid exceeds the limit of " + std::to_string(options.max_points) + " points");
        count *= ax.values.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a)
        for (std::size_t b = a + 1; b < axes.size(); ++b)
            if (axes[a].path == axes[b].path) throw InputError("axis '" + axes[a].path + "' given twice");

    SweepResult out;
    for (const Axis& ax : axes) out.axes.push_back(ax.path);
    out.records.resize(count);

    auto point_at = [&axes](std::size_t flat) {
        std::vector<AxisValue> p(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            const std::size_t len = axes[a].values.size();
            p[a] = axes[a].values[flat % len];
            flat /= len;
        }
        return p;
    };

    const std::size_t workers = std::min(resolve_threads(options.threads), count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < count; k = next++) out.records[k] = evaluate_point(base, out.axes, point_at(k));
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

struct FreeParameter {
    std::string path;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<AxisValue> choices;  // non-empty: discrete parameter, bounds ignored

    bool discrete() const noexcept { return !choices.empty(); }
};

struct OptimizeOptions {
    std::size_t coarse_points_1d = 101;
    std::size_t coarse_points_2d = 21;
    double param_rel_tol = 1e-6;
    double objective_rel_tol = 1e-10;
    int max_sweeps = 50;
};

struct OptimumResult {
    std::vector<std::string> paths;
    std::vector<AxisValue> values;
    double n_ss = std::numeric_limits<double>::infinity();
    PointEvaluation eval;
    std::size_t evaluations = 0;
};

namespace detail {

class Objective {
public:
    Objective(const ScenarioFile& base, std::vector<std::string> paths) : base_(base), paths_(std::move(paths)) {}

    double operator()(const std::vector<AxisValue>& point) {
        ++count_;
        const SweepRecord rec = evaluate_point(base_, paths_, point);
        if (rec.status == PointStatus::input_error) throw InputError(rec.message);
        if (rec.status != PointStatus::ok) return std::numeric_limits<double>::infinity();
        return rec.eval->n_ss.value_or_inf();
    }

    std::size_t count() const noexcept { return count_; }

private:
    const ScenarioFile& base_;
    std::vector<std::string> paths_;
    std::size_t count_ = 0;
};

/// Minimise f over [lo, hi]: coarse grid, then golden section inside the best bracket.
inline std::pair<double, double> minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                                             std::size_t grid, double xtol) {
    if (lo == hi) return {lo, f(lo)};
    const std::vector<double> xs = linspace(lo, hi, std::max<std::size_t>(grid, 3));
    std::vector<double> fs(xs.size());
    std::size_t best = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        fs[k] = f(xs[k]);
        if (fs[k] < fs[best]) best = k;
    }
    if (!std::isfinite(fs[best])) return {xs[best], fs[best]};

    double a = xs[best == 0 ? 0 : best - 1];
    double b = xs[std::min(best + 1, xs.size() - 1)];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    std::pair<double, double> result = fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
    if (fs[best] < result.second) result = {xs[best], fs[best]};
    return result;
}

}  // namespace detail

/// Derivative-free minimisation of n_ss over one or two continuous parameters (plus any discrete ones,
/// which are enumerated). Divergent points count as +inf.
inline OptimumResult minimize_nss(const ScenarioFile& base, const std::vector<FreeParameter>& free,
                                  OptimizeOptions options = {}) {
    std::vector<std::size_t> cont, disc;
    for (std::size_t k = 0; k < free.size(); ++k) {
        detail::setter_for(free[k].path);
        if (free[k].discrete()) {
            disc.push_back(k);
        } else {
            detail::require(std::isfinite(free[k].lo) && std::isfinite(free[k].hi),
                            "minimize_nss: bounds of '" + free[k].path + "' must be finite");
            detail::require(free[k].lo <= free[k].hi, "minimize_nss: lower bound exceeds upper bound for '" +
                                                          free[k].path + "'");
            cont.push_back(k);
        }
    }
    if (free.empty()) throw InputError("minimize_nss: no free parameters");
    if (cont.size() > 2) throw InputError("minimize_nss: at most two continuous free parameters");

    std::vector<std::string> paths;
    for (const auto& p : free) paths.push_back(p.path);
    detail::Objective objective(base, paths);

    OptimumResult best;
    best.paths = paths;
    std::vector<AxisValue> point(free.size(), AxisValue{0.0});
    for (std::size_t k : cont) point[k] = free[k].lo;

    auto try_point = [&](const std::vector<AxisValue>& p, double value) {
        if (value < best.n_ss) {
            best.n_ss = value;
            best.values = p;
        }
    };

    // Enumerate discrete combinations, last varying fastest.
    std::size_t combos = 1;
    for (std::size_t k : disc) combos *= free[k].choices.size();
    for (std::size_t combo = 0; combo < combos; ++combo) {
        std::size_t rest = combo;
        for (std::size_t j = disc.size(); j-- > 0;) {
            const auto& ch = free[disc[j]].choices;
            point[disc[j]] = ch[rest % ch.size()];
            rest /= ch.size();
        }

        if (cont.empty()) {
            try_point(point, objective(point));
            continue;
        }

        auto along = [&](std::size_t which, std::vector<AxisValue> p) {
            return [&objective, which, p](double x) mutable {
                p[which] = x;
                return objective(p);
            };
        };

        if (cont.size() == 1) {
            const FreeParameter& fp = free[cont[0]];
            const double tol = options.param_rel_tol * (fp.hi - fp.lo);
            auto [x, fx] = detail::minimize_1d(along(cont[0], point), fp.lo, fp.hi, options.coarse_points_1d, tol);
            point[cont[0]] = x;
            try_point(point, fx);
            continue;
        }

        // Two continuous parameters: coarse 2D grid, then coordinate descent with golden-section lines.
        const FreeParameter& p0 = free[cont[0]];
        const FreeParameter& p1 = free[cont[1]];
        const auto g0 = linspace(p0.lo, p0.hi, p0.lo == p0.hi ? 1 : options.coarse_points_2d);
        const auto g1 = linspace(p1.lo, p1.hi, p1.lo == p1.hi ? 1 : options.coarse_points_2d);
        double fbest = std::numeric_limits<double>::infinity();
        std::vector<AxisValue> pbest = point;
        for (double x0 : g0) {
            for (double x1 : g1) {
                point[cont[0]] = x0;
                point[cont[1]] = x1;
                const double v = objective(point);
                if (v < fbest) {
                    fbest = v;
                    pbest = point;
                }
            }
        }
        point = pbest;
        if (std::isfinite(fbest)) {
            for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
                const double before = fbest;
                for (std::size_t j : {cont[0], cont[1]}) {
                    const double tol = options.param_rel_tol * (free[j].hi - free[j].lo);
                    auto [x, fx] = detail::minimize_1d(along(j, point), free[j].lo, free[j].hi,
                                                       options.coarse_points_2d, tol);
                    if (fx < fbest) {
                        fbest = fx;
                        point[j] = x;
                    }
                }
                if (!(before - fbest > options.objective_rel_tol * std::abs(fbest))) break;
            }
        }
        try_point(point, fbest);
    }

    best.evaluations = objective.count();
    if (!std::isfinite(best.n_ss))
        throw DivergenceError("minimize_nss: n_ss diverges everywhere in the search box");
    best.eval = *evaluate_point(base, paths, best.values).eval;
    return best;
}

}  // namespace optocool
