// selbias command-line front end.
//
// Verbs:
//   effects    effect measures and diagnostics for one scenario
//   sweep      run a parameter grid (preset or scenario axes), emit CSV
//   validate   sampling-oracle check of the exact joint distribution
//   calibrate  intercept calibration report
//   presets    list built-in grid presets
//
// Exit codes: 0 success, 2 parse/usage error, 3 degenerate stratum,
// 4 I/O error, 5 validation flags.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selbias/csv.hpp"
#include "selbias/exact.hpp"
#include "selbias/oracle.hpp"
#include "selbias/scenario.hpp"
#include "selbias/scm.hpp"
#include "selbias/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitIo = 4;
constexpr int kExitFlagged = 5;

struct ModelSource {
    std::string scenario_path;
    std::string preset_name;
};

// Scenario file or preset base; exactly one must be given.
selbias::ScenarioFile resolve_model(const ModelSource& src) {
    if (src.scenario_path.empty() == src.preset_name.empty()) {
        throw selbias::ScenarioError(
            "exactly one of --scenario and --preset is required");
    }
    if (!src.scenario_path.empty()) {
        return selbias::load_scenario(src.scenario_path);
    }
    const selbias::SweepSpec spec = selbias::preset(src.preset_name);
    selbias::ScenarioFile sc;
    sc.name = spec.name;
    sc.params = selbias::calibrate(spec.base);
    sc.axes = spec.axes;
    return sc;
}

std::string fmt(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

std::string fmt_short(double value) {
    std::string out;
    selbias::detail::append_number(out, value);
    return out.empty() ? "nan" : out;
}

int cmd_effects(const ModelSource& src, std::optional<int> precision_flag) {
    const selbias::ScenarioFile sc = resolve_model(src);
    const selbias::StructuralParams& p = sc.params;
    const int prec = precision_flag.value_or(sc.precision);

    const selbias::JointTable joint = selbias::build_joint(p);
    const selbias::EffectEstimates est = selbias::effects(p);

    std::cout << "scenario: " << sc.name << "\n";
    std::cout << "n_levels: " << p.n_levels() << "\n";
    std::cout << "calibrated: alpha_0=" << fmt_short(p.alpha_0)
              << " beta_0=" << fmt_short(p.beta_0)
              << " gamma_0=" << fmt_short(p.gamma_0) << "\n";
    std::cout << "prevalence: p_V=" << fmt_short(joint.prevalence_v())
              << " p_F=" << fmt_short(joint.prevalence_f())
              << " p_A=" << fmt_short(joint.prevalence_a()) << "\n";

    auto selected = [&sc](const char* measure) {
        for (const auto& m : sc.measures) {
            if (m == measure) return true;
        }
        return false;
    };

    for (int j = 1; j < p.n_levels(); ++j) {
        const selbias::RelativeRiskReport rr = selbias::relative_risk_report(joint, j, 0);
        for (int w = 0; w < 2; ++w) {
            const selbias::EffectCell& c = est.at(j, w);
            std::cout << "level=" << j << " w=" << w << "\n";
            if (selected("cor_xr")) {
                std::cout << "  cor_xr   = " << fmt(c.cor_xr, prec)
                          << "   log = " << fmt(c.log_cor_xr, prec) << "\n";
            }
            if (selected("cor_xf")) {
                std::cout << "  cor_xf   = " << fmt(c.cor_xf, prec)
                          << "   log = " << fmt(c.log_cor_xf, prec) << "\n";
            }
            if (selected("or_xr_a1")) {
                std::cout << "  or_xr_a1 = " << fmt(c.or_xr_a1, prec)
                          << "   log = " << fmt(c.log_or_xr_a1, prec) << "\n";
            }
            if (selected("crr_xr")) {
                std::cout << "  crr_xr   = " << fmt(c.crr_xr, prec)
                          << "   log = " << fmt(c.log_crr_xr, prec) << "\n";
            }
            if (selected("crr_xf")) {
                std::cout << "  crr_xf   = " << fmt(c.crr_xf, prec)
                          << "   log = " << fmt(c.log_crr_xf, prec) << "\n";
            }
            std::cout << "  rr_paper_f1 = " << fmt(rr.paper[1][w], prec)
                      << "   rr_exact_f1 = " << fmt(rr.exact[1][w], prec)
                      << "\n";
            const bool reversed = (c.log_cor_xr < 0.0 && c.log_or_xr_a1 > 0.0) ||
                                  (c.log_cor_xr > 0.0 && c.log_or_xr_a1 < 0.0);
            if (reversed) {
                std::cout << "  SIGN-REVERSAL: log_cor_xr="
                          << fmt(c.log_cor_xr, prec)
                          << " log_or_xr_a1=" << fmt(c.log_or_xr_a1, prec)
                          << "\n";
            }
        }
    }
    return kExitOk;
}

int cmd_sweep(const ModelSource& src, const std::string& out_path) {
    std::vector<selbias::SweepRow> rows;
    if (!src.preset_name.empty() && src.scenario_path.empty()) {
        rows = selbias::run_sweep(selbias::preset(src.preset_name));
    } else if (!src.scenario_path.empty() && src.preset_name.empty()) {
        const selbias::ScenarioFile sc = selbias::load_scenario(src.scenario_path);
        rows = selbias::run_sweep(selbias::scenario_sweep(sc));
    } else {
        throw selbias::ScenarioError(
            "exactly one of --scenario and --preset is required");
    }
    const std::string csv = selbias::to_csv(rows);
    if (out_path == "-") {
        std::cout << csv;
        if (!std::cout) {
            std::cerr << "error: writing to stdout failed\n";
            return kExitIo;
        }
        return kExitOk;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file: " << out_path << "\n";
        return kExitIo;
    }
    out << csv;
    out.flush();
    if (!out) {
        std::cerr << "error: writing " << out_path << " failed\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_validate(const ModelSource& src, std::int64_t n, std::uint64_t seed) {
    const selbias::ScenarioFile sc = resolve_model(src);
    if (n < 1) {
        throw selbias::ScenarioError("--n must be >= 1");
    }
    const selbias::JointTable joint = selbias::build_joint(sc.params);
    const selbias::SampleBatch batch = selbias::sample(sc.params, n, seed);
    const selbias::CompareReport rep = selbias::compare(batch, joint);

    std::cout << "scenario: " << sc.name << "\n";
    std::cout << "rng: " << rep.rng_algorithm << " seed: " << rep.seed
              << " n: " << rep.n << "\n";
    std::cout << "cells: " << rep.cells.size()
              << " max|z|: " << fmt_short(rep.max_abs_z)
              << " flagged: " << rep.flagged << "\n";
    for (const auto& c : rep.cells) {
        if (std::abs(c.z) > 5.0) {
            std::cout << "  FLAG w=" << c.cell.w << " x=" << c.cell.x
                      << " v=" << c.cell.v << " f=" << c.cell.f
                      << " a=" << c.cell.a << " expected=" << fmt_short(c.expected)
                      << " observed=" << c.observed << " z=" << fmt_short(c.z)
                      << "\n";
        }
    }
    return rep.flagged == 0 ? kExitOk : kExitFlagged;
}

int cmd_calibrate(const ModelSource& src) {
    const selbias::ScenarioFile sc = resolve_model(src);
    const selbias::StructuralParams& p = sc.params;
    const selbias::JointTable joint = selbias::build_joint(p);

    std::cout << "scenario: " << sc.name << "\n";
    std::cout << "alpha_0 = " << fmt_short(p.alpha_0) << "\n";
    std::cout << "beta_0 = " << fmt_short(p.beta_0) << "\n";
    std::cout << "gamma_0 = " << fmt_short(p.gamma_0) << "\n";
    std::cout << "alpha_x[1.." << p.n_levels() - 1 << "] =";
    for (int j = 1; j < p.n_levels(); ++j) {
        std::cout << (j > 1 ? ", " : " ") << fmt_short(p.alpha_x[j]);
    }
    std::cout << "\n";
    const double prev_v = joint.prevalence_v();
    std::cout << "P(V=1) = " << fmt_short(prev_v) << "\n";
    std::cout << "P(F=1) = " << fmt_short(joint.prevalence_f()) << "\n";
    std::cout << "P(A=1) = " << fmt_short(joint.prevalence_a()) << "\n";
    if (std::abs(prev_v - 0.5) > 0.05) {
        std::cerr << "warning: P(V=1) = " << fmt_short(prev_v)
                  << " deviates from 0.5 by more than 0.05\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact selection-bias effect measures for road-accident "
                 "responsibility analyses"};
    app.require_subcommand(1);

    ModelSource src;
    std::string out_path = "-";
    std::int64_t n = 1000000;
    std::uint64_t seed = 42;
    std::optional<int> precision;

    auto add_model_flags = [&src](CLI::App* cmd) {
        cmd->add_option("--scenario", src.scenario_path, "scenario file path");
        cmd->add_option("--preset", src.preset_name, "built-in preset name");
    };

    CLI::App* effects = app.add_subcommand("effects",
                                           "effect measures for one scenario");
    add_model_flags(effects);
    effects->add_option("--precision", precision, "decimal places in report");

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
    add_model_flags(sweep);
    sweep->add_option("--out", out_path, "output CSV path, or - for stdout");

    CLI::App* validate =
        app.add_subcommand("validate", "sampling check of the exact joint");
    add_model_flags(validate);
    validate->add_option("--n", n, "number of draws");
    validate->add_option("--seed", seed, "rng seed");

    CLI::App* calibrate_cmd =
        app.add_subcommand("calibrate", "intercept calibration report");
    add_model_flags(calibrate_cmd);

    CLI::App* presets_cmd = app.add_subcommand("presets", "list preset names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (effects->parsed()) return cmd_effects(src, precision);
        if (sweep->parsed()) return cmd_sweep(src, out_path);
        if (validate->parsed()) return cmd_validate(src, n, seed);
        if (calibrate_cmd->parsed()) return cmd_calibrate(src);
        if (presets_cmd->parsed()) {
            for (const auto& name : selbias::preset_names()) {
                std::cout << name << "\n";
            }
            return kExitOk;
        }
    } catch (const selbias::DegenerateStratum& e) {
        std::cerr << "error: degenerate stratum: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const selbias::OddsUndefined& e) {
        std::cerr << "error: odds undefined: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const selbias::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
