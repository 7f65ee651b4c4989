#pragma once

// Test-only oracles, kept independent of the closed forms they check.
//
// The counterfactual enumerators intervene on the exposure (its structural
// assignment is replaced by the constant x) and then marginalize the
// remaining equations by brute force over (v, f, a).  The conditional
// enumerator reads P(F=1 | X, W, A=1) off a joint table by summation.

#include <random>

#include "selbias/exact.hpp"
#include "selbias/scm.hpp"

namespace testing_oracles {

// P(R_x = 1 | W = w) by truncated-factorization enumeration.
inline double enum_cf_prob_r(const selbias::StructuralParams& p, int x, int w) {
    double total = 0.0;
    for (int v = 0; v < 2; ++v) {
        const double pv = v ? p.p_v(x, w) : 1.0 - p.p_v(x, w);
        for (int f = 0; f < 2; ++f) {
            const double pf = f ? p.p_f(x, v, w) : 1.0 - p.p_f(x, v, w);
            for (int a = 0; a < 2; ++a) {
                const double pa = a ? p.p_a(f, v, w) : 1.0 - p.p_a(f, v, w);
                if ((f & a) == 1) total += pv * pf * pa;
            }
        }
    }
    return total;
}

// P(F_x = 1 | W = w), same scheme.
inline double enum_cf_prob_f(const selbias::StructuralParams& p, int x, int w) {
    double total = 0.0;
    for (int v = 0; v < 2; ++v) {
        const double pv = v ? p.p_v(x, w) : 1.0 - p.p_v(x, w);
        for (int f = 0; f < 2; ++f) {
            const double pf = f ? p.p_f(x, v, w) : 1.0 - p.p_f(x, v, w);
            if (f == 1) total += pv * pf;
        }
    }
    return total;
}

// P(F = 1 | X = x, W = w, A = 1) by direct conditioning on the joint table.
inline double enum_prob_f_given_a1(const selbias::JointTable& t, int x, int w) {
    double num = 0.0, den = 0.0;
    for (int v = 0; v < 2; ++v) {
        for (int f = 0; f < 2; ++f) {
            const double pr = t.prob({w, x, v, f, 1});
            den += pr;
            if (f == 1) num += pr;
        }
    }
    return num / den;
}

struct RandomParamsOptions {
    int n_levels = 2;
    bool disconnect_exposure = false;   // zero every X coefficient
    bool zero_speed_to_accident = false;  // gamma_v = gamma_fv = gamma_vw = 0
};

// Random coefficient draw in the ranges the grids use; calibrated.
inline selbias::StructuralParams random_params(std::mt19937& gen,
                                               const RandomParamsOptions& opt) {
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_real_distribution<double> inter(-1.0, 1.0);
    selbias::StructuralParams p = selbias::StructuralParams::zeros(opt.n_levels);
    for (int j = 1; j < opt.n_levels; ++j) {
        p.alpha_x[j] = coef(gen);
        p.beta_x[j] = coef(gen);
        p.alpha_xw[j] = inter(gen);
        p.beta_xv[j] = inter(gen);
        p.beta_xw[j] = inter(gen);
    }
    p.alpha_w = coef(gen);
    p.beta_v = coef(gen);
    p.beta_w = coef(gen);
    p.beta_vw = inter(gen);
    p.gamma_f = coef(gen);
    p.gamma_v = coef(gen);
    p.gamma_w = coef(gen);
    p.gamma_fv = inter(gen);
    p.gamma_fw = inter(gen);
    p.gamma_vw = inter(gen);
    if (opt.disconnect_exposure) {
        for (int j = 0; j < opt.n_levels; ++j) {
            p.alpha_x[j] = p.beta_x[j] = 0.0;
            p.alpha_xw[j] = p.beta_xv[j] = p.beta_xw[j] = 0.0;
        }
    }
    if (opt.zero_speed_to_accident) {
        p.gamma_v = p.gamma_fv = p.gamma_vw = 0.0;
    }
    return selbias::calibrate(p);
}

}  // namespace testing_oracles
