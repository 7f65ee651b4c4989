#pragma once

// Discrete structural causal model of severe road accidents.
//
// Observed variables: a binary confounder W, an exposure X with n_levels
// categories (binary when n_levels == 2), high speed V, driving fault F and
// severe accident A, all binary.  V, F and A follow logistic structural
// equations; responsibility is the derived product R = F * A.  Datasets in
// this field are selected on A = 1, which is what makes the naive odds
// ratio a biased estimate of the causal one.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace selbias {

/// Numerically stable logistic 1/(1+exp(-z)).  No overflow for large |z|;
/// saturates to 0 or 1 in floating point beyond |z| ~ 37.
inline double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// One configuration of the observed variables.  Responsibility r is
/// derived, never stored: r = 1 iff f = 1 and a = 1.
struct NodeAssignment {
    int w = 0;  // confounder, {0,1}
    int x = 0;  // exposure level, 0..J (0 is the reference level)
    int v = 0;  // high speed, {0,1}
    int f = 0;  // driving fault, {0,1}
    int a = 0;  // severe accident, {0,1}

    int r() const { return f & a; }

    bool operator==(const NodeAssignment&) const = default;
};

/// Full parameterization of the model: exposure/confounder prevalences and
/// the coefficient blocks of the three logistic equations.  Exposure levels
/// are dummy-coded: per-level coefficient vectors with entry 0 pinned to 0,
/// which makes the binary model the n_levels == 2 special case of the
/// categorical one.
///
/// Immutable by convention: every operation in this library takes params by
/// const reference or value and never mutates shared state, so instances
/// can be used concurrently without synchronization.
struct StructuralParams {
    double p_w = 0.5;           // P(W=1)
    std::vector<double> p_x;    // P(X=x_j), length n_levels, sums to 1

    // speed equation  V ~ X, W
    double alpha_0 = 0.0;
    std::vector<double> alpha_x;
    double alpha_w = 0.0;
    std::vector<double> alpha_xw;

    // fault equation  F ~ X, V, W
    double beta_0 = 0.0;
    std::vector<double> beta_x;
    double beta_v = 0.0;
    double beta_w = 0.0;
    std::vector<double> beta_xv;
    std::vector<double> beta_xw;
    double beta_vw = 0.0;

    // accident equation  A ~ F, V, W
    double gamma_0 = 0.0;
    double gamma_f = 0.0;
    double gamma_v = 0.0;
    double gamma_w = 0.0;
    double gamma_fv = 0.0;
    double gamma_fw = 0.0;
    double gamma_vw = 0.0;

    // Rarity offset: calibrate() shifts the F and A intercepts by -nu/2 so
    // faults and severe accidents stay rare while P(V=1) is centered at 0.5.
    double nu = 13.0;

    int n_levels() const { return static_cast<int>(p_x.size()); }

    /// All-zero coefficients, uniform exposure, p_w = 0.5.
    static StructuralParams zeros(int n_levels) {
        if (n_levels < 2) {
            throw std::invalid_argument("n_levels must be >= 2");
        }
        StructuralParams p;
        p.p_x.assign(n_levels, 1.0 / n_levels);
        p.alpha_x.assign(n_levels, 0.0);
        p.alpha_xw.assign(n_levels, 0.0);
        p.beta_x.assign(n_levels, 0.0);
        p.beta_xv.assign(n_levels, 0.0);
        p.beta_xw.assign(n_levels, 0.0);
        return p;
    }

    // Linear predictors, exposed so callers can form exact complements via
    // logistic(-z) without cancellation.
    double v_logit(int x, int w) const {
        return alpha_0 + alpha_x[x] + alpha_w * w + alpha_xw[x] * w;
    }
    double f_logit(int x, int v, int w) const {
        return beta_0 + beta_x[x] + beta_v * v + beta_w * w + beta_xv[x] * v +
               beta_xw[x] * w + beta_vw * v * w;
    }
    double a_logit(int f, int v, int w) const {
        return gamma_0 + gamma_f * f + gamma_v * v + gamma_w * w +
               gamma_fv * f * v + gamma_fw * f * w + gamma_vw * v * w;
    }

    double p_v(int x, int w) const { return logistic(v_logit(x, w)); }
    double p_f(int x, int v, int w) const { return logistic(f_logit(x, v, w)); }
    double p_a(int f, int v, int w) const { return logistic(a_logit(f, v, w)); }

    /// Structural invariants; throws std::invalid_argument on violation.
    void validate() const {
        const std::size_t n = p_x.size();
        if (n < 2) {
            throw std::invalid_argument("p_x must have at least 2 levels");
        }
        auto check_len = [n](const std::vector<double>& v, const char* name) {
            if (v.size() != n) {
                throw std::invalid_argument(std::string(name) +
                                            " length must equal n_levels");
            }
        };
        check_len(alpha_x, "alpha_x");
        check_len(alpha_xw, "alpha_xw");
        check_len(beta_x, "beta_x");
        check_len(beta_xv, "beta_xv");
        check_len(beta_xw, "beta_xw");

        if (!(p_w >= 0.0 && p_w <= 1.0)) {
            throw std::invalid_argument("p_w must lie in [0,1]");
        }
        double sum = 0.0;
        for (double q : p_x) {
            if (!(q >= 0.0 && q <= 1.0)) {
                throw std::invalid_argument("p_x entries must lie in [0,1]");
            }
            sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("p_x must sum to 1");
        }
        for (const auto* ref : {&alpha_x, &alpha_xw, &beta_x, &beta_xv, &beta_xw}) {
            if ((*ref)[0] != 0.0) {
                throw std::invalid_argument(
                    "reference-level coefficients (index 0) must be 0");
            }
        }
        auto finite = [](double d) { return std::isfinite(d); };
        bool ok = finite(p_w) && finite(alpha_0) && finite(alpha_w) &&
                  finite(beta_0) && finite(beta_v) && finite(beta_w) &&
                  finite(beta_vw) && finite(gamma_0) && finite(gamma_f) &&
                  finite(gamma_v) && finite(gamma_w) && finite(gamma_fv) &&
                  finite(gamma_fw) && finite(gamma_vw) && finite(nu);
        for (const auto* ref :
             {&p_x, &alpha_x, &alpha_xw, &beta_x, &beta_xv, &beta_xw}) {
            for (double d : *ref) ok = ok && finite(d);
        }
        if (!ok) {
            throw std::invalid_argument("all parameters must be finite");
        }
    }
};

/// Fill the three intercepts so that the non-intercept part of each linear
/// predictor is centered at the design means (exposure dummies at p_x[j],
/// V and F at 1/2, W at p_w) and the F/A predictors are shifted down by an
/// additional nu/2.  With the defaults this puts P(V=1) at exactly 0.5 and
/// keeps faults and accidents rare.  Works for any n_levels >= 2; for 2 and
/// 5 levels it reduces to the usual closed forms.
inline StructuralParams calibrate(StructuralParams p) {
    p.validate();

    const double mw = p.p_w;  // design mean of W
    const double mv = 0.5;    // design mean of V (the centering target)
    const double mf = 0.5;    // design mean of F in the accident predictor

    double ax = 0.0, axw = 0.0, bx = 0.0, bxv = 0.0, bxw = 0.0;
    for (int j = 0; j < p.n_levels(); ++j) {
        ax += p.p_x[j] * p.alpha_x[j];
        axw += p.p_x[j] * p.alpha_xw[j];
        bx += p.p_x[j] * p.beta_x[j];
        bxv += p.p_x[j] * p.beta_xv[j];
        bxw += p.p_x[j] * p.beta_xw[j];
    }

    p.alpha_0 = -(ax + p.alpha_w * mw + axw * mw);
    p.beta_0 = -(bx + p.beta_v * mv + p.beta_w * mw + bxv * mv + bxw * mw +
                 p.beta_vw * mv * mw + p.nu / 2.0);
    p.gamma_0 = -(p.gamma_f * mf + p.gamma_v * mv + p.gamma_w * mw +
                  p.gamma_fv * mf * mv + p.gamma_fw * mf * mw +
                  p.gamma_vw * mv * mw + p.nu / 2.0);
    return p;
}

/// Canonical enumeration of the 2 * n_levels * 8 assignments.  The joint
/// table and the sampling oracle index their cells identically through
/// these two functions.
inline std::size_t cell_count(const StructuralParams& p) {
    return static_cast<std::size_t>(2 * p.n_levels() * 8);
}

inline std::size_t cell_index(const StructuralParams& p, const NodeAssignment& c) {
    const std::size_t n = static_cast<std::size_t>(p.n_levels());
    return ((((static_cast<std::size_t>(c.w) * n + c.x) * 2 + c.v) * 2 + c.f) * 2 + c.a);
}

inline NodeAssignment cell_at(const StructuralParams& p, std::size_t idx) {
    NodeAssignment c;
    c.a = static_cast<int>(idx & 1);
    idx >>= 1;
    c.f = static_cast<int>(idx & 1);
    idx >>= 1;
    c.v = static_cast<int>(idx & 1);
    idx >>= 1;
    c.x = static_cast<int>(idx % p.n_levels());
    c.w = static_cast<int>(idx / p.n_levels());
    return c;
}

}  // namespace selbias
