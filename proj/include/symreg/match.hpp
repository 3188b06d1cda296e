#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "symreg/canonical.hpp"
#include "symreg/dataset.hpp"

namespace symreg {

// Probe specification for symbolic-equivalence testing: the training
// ranges per variable. The probe grid spans twice the training range
// (same center) with roughly 1e4 points.
struct ProbeSpec {
    std::vector<std::pair<double, double>> ranges;
    std::uint64_t seed = 0x9d2c5680u;

    static ProbeSpec from_dataset(const Dataset& ds) {
        ProbeSpec p;
        for (int v = 0; v < ds.dim(); ++v) p.ranges.push_back(ds.range(v));
        return p;
    }
};

namespace detail {

inline std::vector<std::vector<double>> probe_columns(const ProbeSpec& spec, bool widened) {
    int d = static_cast<int>(spec.ranges.size());
    std::vector<std::pair<double, double>> r = spec.ranges;
    if (widened) {
        for (auto& [lo, hi] : r) {
            double c = (lo + hi) / 2.0, half = (hi - lo) / 2.0;
            lo = c - 2.0 * half;
            hi = c + 2.0 * half;
        }
    }
    std::vector<std::vector<double>> cols(static_cast<size_t>(d));
    if (d == 1) {
        const int n = 10001;
        for (int i = 0; i < n; ++i)
            cols[0].push_back(r[0].first + (r[0].second - r[0].first) * i / double(n - 1));
    } else if (d == 2) {
        const int n = 101;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cols[0].push_back(r[0].first + (r[0].second - r[0].first) * i / double(n - 1));
                cols[1].push_back(r[1].first + (r[1].second - r[1].first) * j / double(n - 1));
            }
    } else {
        std::mt19937_64 rng(spec.seed);
        for (int k = 0; k < 10000; ++k)
            for (int v = 0; v < d; ++v) {
                std::uniform_real_distribution<double> u(r[static_cast<size_t>(v)].first,
                                                         r[static_cast<size_t>(v)].second);
                cols[static_cast<size_t>(v)].push_back(u(rng));
            }
    }
    return cols;
}

inline std::vector<double> tree_literals(const ExprTree& t) {
    std::vector<double> out;
    for (const auto& nd : t.nodes())
        if (nd.tok.op == Op::lit) out.push_back(nd.tok.value);
    return out;
}

inline bool probe_agrees(const ExprTree& candidate, const ExprTree& target,
                         const std::vector<std::vector<double>>& cols, double tol,
                         size_t min_points, size_t& compared) {
    std::vector<double> yt = target.evaluate(cols, {});
    std::vector<double> yc = candidate.evaluate(cols, {});
    compared = 0;
    for (size_t i = 0; i < yt.size(); ++i) {
        if (!std::isfinite(yt[i])) continue;  // outside the target's domain
        ++compared;
        if (!std::isfinite(yc[i])) return false;
        if (std::abs(yc[i] - yt[i]) >= tol) return false;
    }
    return compared >= min_points;
}

}  // namespace detail

// True iff the candidate is symbolically the target: identical canonical
// forms, or numerically indistinguishable (deviation < 1e-10) on a dense
// probe spanning twice the training range with every fitted parameter
// rounding to one of the target's constants (or to a small integer)
// within 1e-4 relative error.
inline bool exact_match(const ExprTree& candidate, const std::vector<double>& fitted_params,
                        const ExprTree& target, const ProbeSpec& probe) {
    auto cc = canonicalize(candidate);
    auto ct = canonicalize(target);
    if (cc && ct && canonical_equal(*cc, *ct)) return true;

    size_t compared = 0;
    auto widened = detail::probe_columns(probe, true);
    bool ok = detail::probe_agrees(candidate, target, widened, 1e-10, 100, compared);
    if (!ok && compared < 100) {
        // Target domain too narrow for the widened grid; fall back to
        // the training range itself.
        auto narrow = detail::probe_columns(probe, false);
        ok = detail::probe_agrees(candidate, target, narrow, 1e-10, 10, compared);
    }
    if (!ok) return false;

    std::vector<double> consts = detail::tree_literals(target);
    for (double p : fitted_params) {
        bool matched = false;
        for (double t : consts) {
            if (std::abs(p - t) <= 1e-4 * std::max(1.0, std::abs(t))) { matched = true; break; }
        }
        if (!matched) {
            double r = std::round(p);
            matched = std::abs(p - r) <= 1e-4 * std::max(1.0, std::abs(r));
        }
        if (!matched) return false;
    }
    return true;
}

}  // namespace symreg
