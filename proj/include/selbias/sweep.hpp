#pragma once

// Declarative parameter grids and the presets that reproduce the standard
// exhibits: the figure panels (gamma_v x confounder/interaction x exposure
// axis), the two relative-risk tables and the 5-level categorical ladder.
//
// A grid is the Cartesian product of its axes; within one axis several
// parameter paths can be assigned together ("zipped"), which is how the
// table column blocks and the categorical coefficient ladder are expressed.
// Rows are a pure function of the spec: intercepts are recalibrated at
// every grid point and output ordering is fixed regardless of execution
// order.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "selbias/exact.hpp"
#include "selbias/scm.hpp"

namespace selbias {

/// One sweep axis.  paths.size() == 1 for an ordinary axis; a multi-path
/// axis assigns one tuple of values per step (tuple[k] goes to paths[k]).
struct SweepAxis {
    std::vector<std::string> paths;
    std::vector<std::vector<double>> values;
};

struct SweepSpec {
    std::string name;
    StructuralParams base;  // pre-calibration; intercepts are recomputed
    std::vector<SweepAxis> axes;
    // Advisory list of measures for in-memory consumers; the CSV schema is
    // fixed and does not depend on it.
    std::vector<std::string> outputs = {"log_cor_xr",   "log_cor_xf",
                                        "log_or_xr_a1", "log_crr_xr",
                                        "log_crr_xf",   "rr_paper_f1"};
};

/// One output record: grid point x stratum x non-reference exposure level.
/// alpha_x/alpha_xw/beta_xv are the row level's own coefficients.  flag is
/// "ok" on success; on a failed measure it names the error and the affected
/// numbers are left non-finite (the CSV writer blanks them).
struct SweepRow {
    std::string scenario;
    int level = 1;
    int w = 0;
    double alpha_x = 0.0;
    double gamma_v = 0.0;
    double alpha_w = 0.0;
    double alpha_xw = 0.0;
    double beta_xv = 0.0;
    double log_cor_xr = 0.0;
    double log_cor_xf = 0.0;
    double log_or_xr_a1 = 0.0;
    double log_crr_xr = 0.0;
    double log_crr_xf = 0.0;
    double rr_paper_f1 = 1.0;
    double p_v = 0.0;  // P(V=1) at this grid point
    double p_f = 0.0;  // P(F=1)
    double p_a = 0.0;  // P(A=1)
    std::string flag = "ok";
};

/// Assign one parameter by path.  Scalar paths: p_w, nu, alpha_w, beta_v,
/// beta_w, beta_vw, gamma_f, gamma_v, gamma_w, gamma_fv, gamma_fw,
/// gamma_vw.  Vector paths take a level subscript, e.g. alpha_x[1]; the
/// reference level 0 is not assignable.
inline void apply_path(StructuralParams& p, const std::string& path, double value) {
    auto fail = [&path]() {
        throw std::invalid_argument("unknown parameter path: " + path);
    };
    const auto bracket = path.find('[');
    if (bracket == std::string::npos) {
        double* slot = nullptr;
        if (path == "p_w") slot = &p.p_w;
        else if (path == "nu") slot = &p.nu;
        else if (path == "alpha_w") slot = &p.alpha_w;
        else if (path == "beta_v") slot = &p.beta_v;
        else if (path == "beta_w") slot = &p.beta_w;
        else if (path == "beta_vw") slot = &p.beta_vw;
        else if (path == "gamma_f") slot = &p.gamma_f;
        else if (path == "gamma_v") slot = &p.gamma_v;
        else if (path == "gamma_w") slot = &p.gamma_w;
        else if (path == "gamma_fv") slot = &p.gamma_fv;
        else if (path == "gamma_fw") slot = &p.gamma_fw;
        else if (path == "gamma_vw") slot = &p.gamma_vw;
        if (!slot) fail();
        *slot = value;
        return;
    }
    if (path.back() != ']') fail();
    const std::string stem = path.substr(0, bracket);
    const std::string idx_text = path.substr(bracket + 1, path.size() - bracket - 2);
    std::size_t pos = 0;
    int level = -1;
    try {
        level = std::stoi(idx_text, &pos);
    } catch (const std::exception&) {
        fail();
    }
    if (pos != idx_text.size()) fail();

    std::vector<double>* vec = nullptr;
    if (stem == "alpha_x") vec = &p.alpha_x;
    else if (stem == "alpha_xw") vec = &p.alpha_xw;
    else if (stem == "beta_x") vec = &p.beta_x;
    else if (stem == "beta_xv") vec = &p.beta_xv;
    else if (stem == "beta_xw") vec = &p.beta_xw;
    if (!vec) fail();
    if (level < 1 || level >= p.n_levels()) {
        throw std::invalid_argument("level subscript out of range in path: " + path);
    }
    (*vec)[static_cast<std::size_t>(level)] = value;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    }
    return out;
}

namespace detail {

inline SweepAxis plain_axis(std::string path, std::vector<double> values) {
    SweepAxis a;
    a.paths.push_back(std::move(path));
    for (double v : values) a.values.push_back({v});
    return a;
}

// Baseline binary model shared by the figure/table presets: exposure and
// confounder both fair coins, unit main effects on fault and speed-of-
// confounder channels, gamma_f = 4, gamma_v = 3 until an axis overrides it.
inline StructuralParams binary_base() {
    StructuralParams p = StructuralParams::zeros(2);
    p.alpha_x[1] = 1.0;
    p.beta_x[1] = 1.0;
    p.beta_v = 1.0;
    p.beta_w = 1.0;
    p.gamma_f = 4.0;
    p.gamma_v = 3.0;
    p.gamma_w = 1.0;
    return p;
}

// 5-level exposure with the blood-alcohol-style ladders: speed effects
// scale as (1, 0.8, 0.25, 0.2) of the level-1 coefficient, fault effects
// are fixed at (1, 2.5, 3.5, 3.4).
inline StructuralParams categorical_base() {
    StructuralParams p = StructuralParams::zeros(5);
    const double alpha1 = 1.0;
    p.alpha_x = {0.0, alpha1, 0.80 * alpha1, 0.25 * alpha1, 0.20 * alpha1};
    p.beta_x = {0.0, 1.0, 2.5, 3.5, 3.4};
    p.beta_v = 1.0;
    p.beta_w = 1.0;
    p.gamma_f = 4.0;
    p.gamma_v = 3.0;
    p.gamma_w = 1.0;
    return p;
}

inline SweepAxis alpha_ladder_axis(const std::vector<double>& alpha1_values) {
    SweepAxis a;
    a.paths = {"alpha_x[1]", "alpha_x[2]", "alpha_x[3]", "alpha_x[4]"};
    for (double t : alpha1_values) {
        a.values.push_back({t, 0.80 * t, 0.25 * t, 0.20 * t});
    }
    return a;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
    return {"fig2", "fig3", "fig4",      "fig5",  "fig6_app",
            "fig7_app", "table1", "table3", "app3_bac"};
}

/// Grid behind one exhibit.  Axis declaration order fixes row order:
/// earlier axes vary slowest.
inline SweepSpec preset(const std::string& name) {
    const std::vector<double> gamma_v_grid = {0.0, 1.5, 3.0};

    SweepSpec s;
    s.name = name;
    if (name == "fig2" || name == "fig3") {
        s.base = detail::binary_base();
        const bool positive = name == "fig2";
        s.base.alpha_x[1] = positive ? 0.0 : -3.0;
        s.axes.push_back(detail::plain_axis("gamma_v", gamma_v_grid));
        s.axes.push_back(detail::plain_axis("alpha_w", {0.0, 1.0, 2.0, 3.0}));
        s.axes.push_back(detail::plain_axis(
            "alpha_x[1]", positive ? linspace(0.0, 3.0, 61) : linspace(-3.0, 0.0, 61)));
    } else if (name == "fig4" || name == "fig5") {
        s.base = detail::binary_base();
        s.base.alpha_w = 2.0;
        const bool positive = name == "fig4";
        s.base.alpha_x[1] = positive ? 0.0 : -3.0;
        s.axes.push_back(detail::plain_axis("gamma_v", gamma_v_grid));
        s.axes.push_back(detail::plain_axis(
            "alpha_xw[1]", positive ? std::vector<double>{0.0, 1.0, 2.0, 3.0}
                                    : std::vector<double>{-1.0, 0.0, 1.0, 2.0}));
        s.axes.push_back(detail::plain_axis(
            "alpha_x[1]", positive ? linspace(0.0, 3.0, 61) : linspace(-3.0, 0.0, 61)));
    } else if (name == "fig6_app" || name == "fig7_app") {
        s.base = detail::binary_base();
        s.base.alpha_w = 2.0;
        const bool positive = name == "fig6_app";
        s.base.alpha_x[1] = positive ? 0.0 : -3.0;
        s.axes.push_back(detail::plain_axis("gamma_v", gamma_v_grid));
        s.axes.push_back(detail::plain_axis("beta_xv[1]", {0.0, 1.0, 2.0, 3.0}));
        s.axes.push_back(detail::plain_axis(
            "alpha_x[1]", positive ? linspace(0.0, 3.0, 61) : linspace(-3.0, 0.0, 61)));
    } else if (name == "table1") {
        // Three column blocks: alpha_w sweep, then alpha_xw and beta_xv
        // sweeps at alpha_w = 2.  One zipped axis, 12 columns.
        s.base = detail::binary_base();
        SweepAxis a;
        a.paths = {"alpha_w", "alpha_xw[1]", "beta_xv[1]"};
        a.values = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0},
                    {2, 0, 0}, {2, 1, 0}, {2, 2, 0}, {2, 3, 0},
                    {2, 0, 0}, {2, 0, 1}, {2, 0, 2}, {2, 0, 3}};
        s.axes.push_back(std::move(a));
    } else if (name == "table3") {
        s.base = detail::binary_base();
        s.base.alpha_x[1] = -1.0;
        s.base.alpha_w = 2.0;
        SweepAxis a;
        a.paths = {"alpha_xw[1]", "beta_xv[1]"};
        a.values = {{-1, 0}, {0, 0}, {1, 0}, {2, 0},
                    {0, 0},  {0, 1}, {0, 2}, {0, 3}};
        s.axes.push_back(std::move(a));
    } else if (name == "app3_bac") {
        s.base = detail::categorical_base();
        s.axes.push_back(detail::plain_axis("gamma_v", gamma_v_grid));
        s.axes.push_back(detail::alpha_ladder_axis(linspace(0.0, 3.0, 61)));
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return s;
}

/// Evaluate the grid.  Output order: Cartesian product of the axes with the
/// first-declared axis varying slowest, then level j = 1..J, then stratum
/// w = 0,1.  Degenerate grid points produce marker rows, never abort the
/// grid.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (spec.axes.empty()) {
        throw std::invalid_argument("sweep spec needs at least one axis");
    }
    for (const auto& axis : spec.axes) {
        if (axis.paths.empty() || axis.values.empty()) {
            throw std::invalid_argument("sweep axis must have paths and values");
        }
        for (const auto& tuple : axis.values) {
            if (tuple.size() != axis.paths.size()) {
                throw std::invalid_argument(
                    "sweep axis tuple width must match its path count");
            }
            for (double v : tuple) {
                if (!std::isfinite(v)) {
                    throw std::invalid_argument("sweep axis values must be finite");
                }
            }
        }
        // paths must resolve; probe on a scratch copy before running
        StructuralParams probe = spec.base;
        for (std::size_t k = 0; k < axis.paths.size(); ++k) {
            apply_path(probe, axis.paths[k], axis.values[0][k]);
        }
    }

    std::vector<SweepRow> rows;
    std::vector<std::size_t> odo(spec.axes.size(), 0);
    bool done = false;
    while (!done) {
        StructuralParams point = spec.base;
        for (std::size_t i = 0; i < spec.axes.size(); ++i) {
            const auto& axis = spec.axes[i];
            const auto& tuple = axis.values[odo[i]];
            for (std::size_t k = 0; k < axis.paths.size(); ++k) {
                apply_path(point, axis.paths[k], tuple[k]);
            }
        }
        point = calibrate(point);
        const JointTable joint = build_joint(point);
        const double prev_v = joint.prevalence_v();
        const double prev_f = joint.prevalence_f();
        const double prev_a = joint.prevalence_a();

        for (int j = 1; j < point.n_levels(); ++j) {
            for (int w = 0; w < 2; ++w) {
                SweepRow row;
                row.scenario = spec.name;
                row.level = j;
                row.w = w;
                row.alpha_x = point.alpha_x[static_cast<std::size_t>(j)];
                row.gamma_v = point.gamma_v;
                row.alpha_w = point.alpha_w;
                row.alpha_xw = point.alpha_xw[static_cast<std::size_t>(j)];
                row.beta_xv = point.beta_xv[static_cast<std::size_t>(j)];
                row.p_v = prev_v;
                row.p_f = prev_f;
                row.p_a = prev_a;
                const double bad = std::nan("");
                try {
                    const EffectCell cell = effect_cell(point, j, w);
                    row.log_cor_xr = cell.log_cor_xr;
                    row.log_cor_xf = cell.log_cor_xf;
                    row.log_or_xr_a1 = cell.log_or_xr_a1;
                    row.log_crr_xr = cell.log_crr_xr;
                    row.log_crr_xf = cell.log_crr_xf;
                } catch (const DegenerateStratum&) {
                    row.flag = "degenerate_stratum";
                    row.log_cor_xr = row.log_cor_xf = row.log_or_xr_a1 = bad;
                    row.log_crr_xr = row.log_crr_xf = bad;
                } catch (const OddsUndefined&) {
                    row.flag = "odds_undefined";
                    row.log_cor_xr = row.log_cor_xf = row.log_or_xr_a1 = bad;
                    row.log_crr_xr = row.log_crr_xf = bad;
                }
                row.rr_paper_f1 = relative_risk_paper(point, j, 0, 1, w);
                if (row.flag == "ok" && !std::isfinite(row.rr_paper_f1)) {
                    row.flag = "nonfinite";
                }
                rows.push_back(std::move(row));
            }
        }

        // advance odometer, last axis fastest
        done = true;
        for (std::size_t i = spec.axes.size(); i-- > 0;) {
            if (++odo[i] < spec.axes[i].values.size()) {
                done = false;
                break;
            }
            odo[i] = 0;
        }
    }
    return rows;
}

}  // namespace selbias
