#pragma once

// Exact inference over the model: full joint enumeration, counterfactual
// outcome probabilities in closed form, and every effect measure compared
// in a bias analysis (causal odds ratios, the selection-conditioned odds
// ratio, causal risk ratios, the two relative-risk diagnostics).
//
// Probabilities here can be as small as 1e-9, so odds are formed from
// numerator/complement pairs accumulated as sums of positive terms and the
// ratios are taken in log space.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "selbias/scm.hpp"

namespace selbias {

/// Conditioning event has (numerically) zero mass.
class DegenerateStratum : public std::runtime_error {
  public:
    explicit DegenerateStratum(const std::string& what)
        : std::runtime_error(what) {}
};

/// A probability hit 0 or 1 exactly, so its odds do not exist.
class OddsUndefined : public std::runtime_error {
  public:
    explicit OddsUndefined(const std::string& what)
        : std::runtime_error(what) {}
};

// Mass below this is treated as an empty conditioning event.
inline constexpr double kDegenerateMass = 1e-300;

/// Exact joint distribution of (W, X, V, F, A), one cell per assignment,
/// factorized along the graph: P(W) P(X) P(V|X,W) P(F|X,V,W) P(A|F,V,W).
struct JointTable {
    StructuralParams params;
    std::vector<double> cells;  // indexed by cell_index(params, .)

    double prob(const NodeAssignment& c) const {
        return cells[cell_index(params, c)];
    }

    template <class Pred>
    double sum_where(Pred&& pred) const {
        double s = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (pred(cell_at(params, i))) s += cells[i];
        }
        return s;
    }

    double prevalence_v() const {
        return sum_where([](const NodeAssignment& c) { return c.v == 1; });
    }
    double prevalence_f() const {
        return sum_where([](const NodeAssignment& c) { return c.f == 1; });
    }
    double prevalence_a() const {
        return sum_where([](const NodeAssignment& c) { return c.a == 1; });
    }
};

inline JointTable build_joint(const StructuralParams& p) {
    p.validate();
    JointTable t;
    t.params = p;
    t.cells.resize(cell_count(p));
    for (int w = 0; w < 2; ++w) {
        const double pw = w ? p.p_w : 1.0 - p.p_w;
        for (int x = 0; x < p.n_levels(); ++x) {
            const double zv = p.v_logit(x, w);
            for (int v = 0; v < 2; ++v) {
                const double pv = logistic(v ? zv : -zv);
                const double zf = p.f_logit(x, v, w);
                for (int f = 0; f < 2; ++f) {
                    const double pf = logistic(f ? zf : -zf);
                    const double za = p.a_logit(f, v, w);
                    for (int a = 0; a < 2; ++a) {
                        const double pa = logistic(a ? za : -za);
                        const NodeAssignment c{w, x, v, f, a};
                        t.cells[cell_index(p, c)] = pw * p.p_x[x] * pv * pf * pa;
                    }
                }
            }
        }
    }
    return t;
}

namespace detail {

// A probability together with its complement, both accumulated as sums of
// positive terms so neither side loses precision near 0 or 1.
struct ProbPair {
    double p = 0.0;
    double comp = 0.0;
};

// P(R_x=1 | W=w) under do(X=x):
//   sum_v p_A(1,v,w) p_F(x,v,w) P(V=v|x,w).
// Complement uses 1 - ab = (1-a) + a(1-b) per speed value.
inline ProbPair cf_r_pair(const StructuralParams& m, int x, int w) {
    const double zv = m.v_logit(x, w);
    ProbPair out;
    for (int v = 0; v < 2; ++v) {
        const double qv = logistic(v ? zv : -zv);
        const double za = m.a_logit(1, v, w);
        const double zf = m.f_logit(x, v, w);
        const double a = logistic(za), ac = logistic(-za);
        const double f = logistic(zf), fc = logistic(-zf);
        out.p += a * f * qv;
        out.comp += (ac + a * fc) * qv;
    }
    return out;
}

// P(F_x=1 | W=w): same mixture without the accident factor.
inline ProbPair cf_f_pair(const StructuralParams& m, int x, int w) {
    const double zv = m.v_logit(x, w);
    ProbPair out;
    for (int v = 0; v < 2; ++v) {
        const double qv = logistic(v ? zv : -zv);
        const double zf = m.f_logit(x, v, w);
        out.p += logistic(zf) * qv;
        out.comp += logistic(-zf) * qv;
    }
    return out;
}

// P(R=1 | X=x, W=w, A=1) as numerator/rest of the selected stratum.  Both
// parts are sums over v of p_A(.,v,w) times a fault factor times P(V=v).
inline ProbPair r_given_a1_parts(const StructuralParams& m, int x, int w) {
    const double zv = m.v_logit(x, w);
    ProbPair out;  // p: A=1,F=1 mass; comp: A=1,F=0 mass (unnormalized)
    for (int v = 0; v < 2; ++v) {
        const double qv = logistic(v ? zv : -zv);
        const double zf = m.f_logit(x, v, w);
        out.p += logistic(m.a_logit(1, v, w)) * logistic(zf) * qv;
        out.comp += logistic(m.a_logit(0, v, w)) * logistic(-zf) * qv;
    }
    return out;
}

inline double log_odds(const ProbPair& pr, const char* what, int x, int w) {
    if (!(pr.p > 0.0) || !(pr.comp > 0.0)) {
        throw OddsUndefined(std::string(what) + " is exactly 0 or 1 at x=" +
                            std::to_string(x) + " w=" + std::to_string(w));
    }
    return std::log(pr.p) - std::log(pr.comp);
}

}  // namespace detail

/// Counterfactual probability P(R_x = 1 | W = w).
inline double cf_prob_r(const StructuralParams& p, int x, int w) {
    return detail::cf_r_pair(p, x, w).p;
}

/// Counterfactual probability P(F_x = 1 | W = w).
inline double cf_prob_f(const StructuralParams& p, int x, int w) {
    return detail::cf_f_pair(p, x, w).p;
}

/// Observable P(R = 1 | X = x, W = w, A = 1), the quantity a responsibility
/// analysis actually estimates.  Throws DegenerateStratum if the selected
/// stratum has no mass.
inline double prob_r_given_a1(const StructuralParams& p, int x, int w) {
    const auto parts = detail::r_given_a1_parts(p, x, w);
    const double den = parts.p + parts.comp;
    if (den < kDegenerateMass) {
        throw DegenerateStratum("P(A=1, X=x, W=w) underflows at x=" +
                                std::to_string(x) + " w=" + std::to_string(w));
    }
    return parts.p / den;
}

/// All five effect measures for one (exposure level, stratum) pair.
struct EffectCell {
    double cor_xr = 1.0;     // causal odds ratio of X on R
    double cor_xf = 1.0;     // causal odds ratio of X on F
    double or_xr_a1 = 1.0;   // odds ratio among the crash-involved
    double crr_xr = 1.0;     // causal risk ratio of X on R
    double crr_xf = 1.0;     // causal risk ratio of X on F
    double log_cor_xr = 0.0;
    double log_cor_xf = 0.0;
    double log_or_xr_a1 = 0.0;
    double log_crr_xr = 0.0;
    double log_crr_xf = 0.0;
};

/// Effect measures for every non-reference level j >= 1 and stratum w.
struct EffectEstimates {
    int n_levels = 2;
    std::vector<std::array<EffectCell, 2>> by_level;  // [j-1][w]

    const EffectCell& at(int level, int w) const {
        if (level < 1 || level >= n_levels || w < 0 || w > 1) {
            throw std::out_of_range("effect cell index");
        }
        return by_level[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(w)];
    }
};

/// One (level, stratum) cell; level 0 is the reference for every contrast.
inline EffectCell effect_cell(const StructuralParams& p, int level, int w) {
    const auto r1 = detail::cf_r_pair(p, level, w);
    const auto r0 = detail::cf_r_pair(p, 0, w);
    const auto f1 = detail::cf_f_pair(p, level, w);
    const auto f0 = detail::cf_f_pair(p, 0, w);
    const auto s1 = detail::r_given_a1_parts(p, level, w);
    const auto s0 = detail::r_given_a1_parts(p, 0, w);

    for (const auto* s : {&s1, &s0}) {
        if (s->p + s->comp < kDegenerateMass) {
            throw DegenerateStratum("P(A=1, W=w) underflows at w=" +
                                    std::to_string(w));
        }
    }
    for (const auto* pr : {&r1, &r0, &f1, &f0}) {
        if (!(pr->p > 0.0)) {
            throw OddsUndefined("counterfactual probability is exactly 0");
        }
    }

    EffectCell c;
    c.log_cor_xr = detail::log_odds(r1, "P(R_x=1|W=w)", level, w) -
                   detail::log_odds(r0, "P(R_x=1|W=w)", 0, w);
    c.log_cor_xf = detail::log_odds(f1, "P(F_x=1|W=w)", level, w) -
                   detail::log_odds(f0, "P(F_x=1|W=w)", 0, w);
    c.log_or_xr_a1 = detail::log_odds(s1, "P(R=1|X,W,A=1)", level, w) -
                     detail::log_odds(s0, "P(R=1|X,W,A=1)", 0, w);
    c.log_crr_xr = std::log(r1.p) - std::log(r0.p);
    c.log_crr_xf = std::log(f1.p) - std::log(f0.p);
    c.cor_xr = std::exp(c.log_cor_xr);
    c.cor_xf = std::exp(c.log_cor_xf);
    c.or_xr_a1 = std::exp(c.log_or_xr_a1);
    c.crr_xr = std::exp(c.log_crr_xr);
    c.crr_xf = std::exp(c.log_crr_xf);
    return c;
}

inline EffectEstimates effects(const StructuralParams& p) {
    p.validate();
    EffectEstimates e;
    e.n_levels = p.n_levels();
    e.by_level.resize(static_cast<std::size_t>(e.n_levels - 1));
    for (int j = 1; j < e.n_levels; ++j) {
        for (int w = 0; w < 2; ++w) {
            e.by_level[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(w)] =
                effect_cell(p, j, w);
        }
    }
    return e;
}

/// Relative-risk diagnostic in its closed approximate form: the speed
/// mixture is weighted by P(V|X,W), not by P(V|X,F,W):
///   [p_A(f,1,w) p_V(x1,w) + p_A(f,0,w) (1-p_V(x1,w))] / [same at x0].
/// Exact only when F carries no information about V; see
/// relative_risk_exact for the honest conditional.
inline double relative_risk_paper(const StructuralParams& p, int x1, int x0,
                                  int f, int w) {
    auto mix = [&](int x) {
        const double zv = p.v_logit(x, w);
        return p.p_a(f, 1, w) * logistic(zv) + p.p_a(f, 0, w) * logistic(-zv);
    };
    return mix(x1) / mix(x0);
}

/// Exact P(A=1|X=x1,F=f,W=w) / P(A=1|X=x0,F=f,W=w) by direct conditioning
/// on the joint table.
inline double relative_risk_exact(const JointTable& t, int x1, int x0, int f,
                                  int w) {
    auto cond_a1 = [&](int x) {
        double mass = 0.0, joint_a1 = 0.0;
        for (int v = 0; v < 2; ++v) {
            for (int a = 0; a < 2; ++a) {
                const double pr = t.prob({w, x, v, f, a});
                mass += pr;
                if (a == 1) joint_a1 += pr;
            }
        }
        if (mass < kDegenerateMass) {
            throw DegenerateStratum("P(X=x, F=f, W=w) underflows at x=" +
                                    std::to_string(x));
        }
        return joint_a1 / mass;
    };
    const double num = cond_a1(x1);
    const double den = cond_a1(x0);
    if (den < kDegenerateMass) {
        throw DegenerateStratum("P(A=1|X=x0,F=f,W=w) underflows");
    }
    return num / den;
}

inline double relative_risk_exact(const StructuralParams& p, int x1, int x0,
                                  int f, int w) {
    return relative_risk_exact(build_joint(p), x1, x0, f, w);
}

/// Both relative-risk variants for one exposure contrast, per fault level
/// and stratum.
struct RelativeRiskReport {
    int x1 = 1;
    int x0 = 0;
    double paper[2][2];  // [f][w]
    double exact[2][2];
};

inline RelativeRiskReport relative_risk_report(const JointTable& t, int x1,
                                               int x0) {
    RelativeRiskReport rep;
    rep.x1 = x1;
    rep.x0 = x0;
    for (int f = 0; f < 2; ++f) {
        for (int w = 0; w < 2; ++w) {
            rep.paper[f][w] = relative_risk_paper(t.params, x1, x0, f, w);
            rep.exact[f][w] = relative_risk_exact(t, x1, x0, f, w);
        }
    }
    return rep;
}

}  // namespace selbias
