#pragma once

// Ancestral forward sampler over the model, used as an independent
// stochastic check of the exact engine.  Draws are made with a self-
// contained xoshiro256++ generator (seeded through splitmix64) so batches
// are reproducible byte for byte across platforms; the standard library
// distributions have implementation-defined streams and are avoided.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "selbias/exact.hpp"
#include "selbias/scm.hpp"

namespace selbias {

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman & Vigna).  Substreams for sharded sampling are
/// derived deterministically from (seed, stream).
class Xoshiro256PlusPlus {
  public:
    static constexpr const char* algorithm = "xoshiro256++/splitmix64-seeded";

    explicit Xoshiro256PlusPlus(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t sm = seed ^ (0xd2b74407b1ce6e93ull * (stream + 1));
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace rng

/// Counts of sampled assignments, indexed like the joint table's cells.
struct SampleBatch {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::optional<int> intervention;  // do(X = level), if set
    int n_levels = 2;
    std::string rng_algorithm;
    std::vector<std::uint64_t> counts;

    std::uint64_t count(const StructuralParams& p, const NodeAssignment& c) const {
        return counts[cell_index(p, c)];
    }
};

/// Draw n assignments ancestrally: W, then X (or the intervened level),
/// then V, F, A from their structural equations.  Deterministic given
/// (params, n, seed, intervention).
inline SampleBatch sample(const StructuralParams& p, std::int64_t n,
                          std::uint64_t seed,
                          std::optional<int> intervention = std::nullopt) {
    p.validate();
    if (n < 1) {
        throw std::invalid_argument("sample: n must be >= 1");
    }
    if (intervention && (*intervention < 0 || *intervention >= p.n_levels())) {
        throw std::invalid_argument("sample: intervention level out of range");
    }

    const int levels = p.n_levels();

    // Cumulative exposure distribution and per-configuration probabilities,
    // precomputed so the hot loop is uniform draws and lookups only.
    std::vector<double> x_cum(levels);
    double acc = 0.0;
    for (int j = 0; j < levels; ++j) {
        acc += p.p_x[j];
        x_cum[j] = acc;
    }
    std::vector<double> pv(static_cast<std::size_t>(levels) * 2);
    std::vector<double> pf(static_cast<std::size_t>(levels) * 4);
    double pa[8];
    for (int x = 0; x < levels; ++x) {
        for (int w = 0; w < 2; ++w) {
            pv[static_cast<std::size_t>(x) * 2 + w] = p.p_v(x, w);
            for (int v = 0; v < 2; ++v) {
                pf[(static_cast<std::size_t>(x) * 2 + v) * 2 + w] = p.p_f(x, v, w);
            }
        }
    }
    for (int f = 0; f < 2; ++f) {
        for (int v = 0; v < 2; ++v) {
            for (int w = 0; w < 2; ++w) pa[(f * 2 + v) * 2 + w] = p.p_a(f, v, w);
        }
    }

    SampleBatch batch;
    batch.n = n;
    batch.seed = seed;
    batch.intervention = intervention;
    batch.n_levels = levels;
    batch.rng_algorithm = rng::Xoshiro256PlusPlus::algorithm;
    batch.counts.assign(cell_count(p), 0);

    rng::Xoshiro256PlusPlus gen(seed);
    for (std::int64_t i = 0; i < n; ++i) {
        NodeAssignment c;
        c.w = gen.uniform01() < p.p_w ? 1 : 0;
        if (intervention) {
            c.x = *intervention;
        } else {
            const double u = gen.uniform01();
            c.x = levels - 1;
            for (int j = 0; j < levels; ++j) {
                if (u < x_cum[j]) {
                    c.x = j;
                    break;
                }
            }
        }
        c.v = gen.uniform01() < pv[static_cast<std::size_t>(c.x) * 2 + c.w] ? 1 : 0;
        c.f = gen.uniform01() < pf[(static_cast<std::size_t>(c.x) * 2 + c.v) * 2 + c.w] ? 1 : 0;
        c.a = gen.uniform01() < pa[(c.f * 2 + c.v) * 2 + c.w] ? 1 : 0;
        ++batch.counts[cell_index(p, c)];
    }
    return batch;
}

struct CellCheck {
    NodeAssignment cell;
    double expected;        // exact cell probability
    std::uint64_t observed; // sampled count
    double z;               // (observed - n p) / sqrt(n p (1-p))
};

struct CompareReport {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::string rng_algorithm;
    double max_abs_z = 0.0;
    int flagged = 0;  // cells with |z| > 5
    std::vector<CellCheck> cells;
};

/// Per-cell z-scores of empirical vs exact probabilities.  Flags any cell
/// with |z| > 5.  The batch must be unintervened and drawn from the same
/// parameters as the table.
inline CompareReport compare(const SampleBatch& batch, const JointTable& table) {
    if (batch.intervention) {
        throw std::invalid_argument("compare: batch must be unintervened");
    }
    if (batch.counts.size() != table.cells.size()) {
        throw std::invalid_argument("compare: batch and table shapes differ");
    }
    CompareReport rep;
    rep.n = batch.n;
    rep.seed = batch.seed;
    rep.rng_algorithm = batch.rng_algorithm;
    rep.cells.reserve(batch.counts.size());
    const double n = static_cast<double>(batch.n);
    for (std::size_t i = 0; i < batch.counts.size(); ++i) {
        CellCheck c;
        c.cell = cell_at(table.params, i);
        c.expected = table.cells[i];
        c.observed = batch.counts[i];
        const double sigma = std::sqrt(n * c.expected * (1.0 - c.expected));
        if (sigma > 0.0) {
            c.z = (static_cast<double>(c.observed) - n * c.expected) / sigma;
        } else {
            // zero-probability cell: any observation is an immediate flag
            c.z = c.observed > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
        if (std::abs(c.z) > 5.0) ++rep.flagged;
        if (std::abs(c.z) > rep.max_abs_z) rep.max_abs_z = std::abs(c.z);
        rep.cells.push_back(c);
    }
    return rep;
}

}  // namespace selbias
