#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "symreg/dataset.hpp"

namespace symreg {

// Natural cubic spline (zero second derivative at the ends). Outside the
// knot range the end segments extend as cubics, which is exactly the
// extrapolation behaviour the generalization baseline measures.
class CubicSpline {
public:
    // Requires at least 4 distinct abscissae; duplicates are averaged.
    static std::optional<CubicSpline> fit(std::vector<double> x, std::vector<double> y) {
        if (x.size() != y.size()) throw std::invalid_argument("spline: size mismatch");
        std::vector<size_t> idx(x.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
        std::vector<double> xs, ys;
        for (size_t i = 0; i < idx.size();) {
            size_t j = i;
            double sum = 0.0;
            while (j < idx.size() && x[idx[j]] == x[idx[i]]) sum += y[idx[j++]];
            xs.push_back(x[idx[i]]);
            ys.push_back(sum / static_cast<double>(j - i));
            i = j;
        }
        if (xs.size() < 4) return std::nullopt;

        size_t n = xs.size();
        std::vector<double> h(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) h[i] = xs[i + 1] - xs[i];
        // Tridiagonal system for interior second derivatives.
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0), m(n, 0.0);
        b[0] = b[n - 1] = 1.0;
        for (size_t i = 1; i + 1 < n; ++i) {
            a[i] = h[i - 1];
            b[i] = 2.0 * (h[i - 1] + h[i]);
            c[i] = h[i];
            d[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        for (size_t i = 1; i < n; ++i) {
            double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        m[n - 1] = d[n - 1] / b[n - 1];
        for (size_t i = n - 1; i-- > 0;) m[i] = (d[i] - c[i] * m[i + 1]) / b[i];

        CubicSpline s;
        s.x_ = std::move(xs);
        s.y_ = std::move(ys);
        s.m_ = std::move(m);
        return s;
    }

    double operator()(double t) const {
        size_t n = x_.size();
        size_t seg;
        if (t <= x_[0]) seg = 0;
        else if (t >= x_[n - 1]) seg = n - 2;
        else seg = static_cast<size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
        double h = x_[seg + 1] - x_[seg];
        double A = (x_[seg + 1] - t) / h;
        double B = (t - x_[seg]) / h;
        return A * y_[seg] + B * y_[seg + 1] +
               ((A * A * A - A) * m_[seg] + (B * B * B - B) * m_[seg + 1]) * h * h / 6.0;
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;
};

// Interpolant of y against one input variable, other variables kept at
// their observed pairing. nullopt when fewer than 4 distinct points
// exist (parity then stays undetermined).
inline std::optional<CubicSpline> spline_fit(const Dataset& data, int var) {
    return CubicSpline::fit(data.x[static_cast<size_t>(var)], data.y);
}

struct ParityReport {
    std::vector<Parity> parity;     // per input variable
    std::vector<double> sym_error;  // max |y(-x) -/+ y(x)| for the detected symmetry

    Parity primary() const { return parity.empty() ? Parity::none : parity[0]; }
};

// Spline-based even/odd detection: probe y(x) against y(-x) on the
// sign-symmetric part of the sampled range. Even wins ties (constant
// functions are both).
inline ParityReport detect_parity(const Dataset& data, double e_sym) {
    ParityReport rep;
    for (int v = 0; v < data.dim(); ++v) {
        auto [lo, hi] = data.range(v);
        if (!(lo < 0.0 && hi > 0.0)) {  // one-signed data: undetectable
            rep.parity.push_back(Parity::none);
            rep.sym_error.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        std::optional<CubicSpline> s = spline_fit(data, v);
        if (!s) {
            rep.parity.push_back(Parity::none);
            rep.sym_error.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        double m = std::min(-lo, hi);
        double err_even = 0.0, err_odd = 0.0;
        const int kProbe = 101;
        for (int i = 0; i < kProbe; ++i) {
            double t = m * static_cast<double>(i) / (kProbe - 1);
            double yp = (*s)(t), ym = (*s)(-t);
            err_even = std::max(err_even, std::abs(ym - yp));
            err_odd = std::max(err_odd, std::abs(ym + yp));
        }
        if (err_even < e_sym) {
            rep.parity.push_back(Parity::even);
            rep.sym_error.push_back(err_even);
        } else if (err_odd < e_sym) {
            rep.parity.push_back(Parity::odd);
            rep.sym_error.push_back(err_odd);
        } else {
            rep.parity.push_back(Parity::none);
            rep.sym_error.push_back(std::min(err_even, err_odd));
        }
    }
    return rep;
}

// Folds a one-variable dataset onto x >= 0: |x| for even targets, |x|
// with the response negated on formerly-negative rows for odd ones. The
// search then runs on the folded data while predictions symmetrize
// through the form's parity flag.
inline Dataset fold_data(const Dataset& data, const ParityReport& rep) {
    if (rep.primary() == Parity::none)
        throw std::invalid_argument("fold_data requires detected parity");
    if (data.dim() != 1)
        throw std::invalid_argument("fold_data applies to one-variable datasets");
    Dataset out = data;
    for (size_t r = 0; r < out.size(); ++r) {
        double& xv = out.x[0][r];
        if (xv < 0.0) {
            xv = -xv;
            if (rep.primary() == Parity::odd) out.y[r] = -out.y[r];
        }
    }
    return out;
}

}  // namespace symreg
