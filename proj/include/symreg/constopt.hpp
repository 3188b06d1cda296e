#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "symreg/config.hpp"
#include "symreg/dataset.hpp"
#include "symreg/form.hpp"

namespace symreg {

struct FitResult {
    std::vector<double> params;
    double error_sq_sum = std::numeric_limits<double>::infinity();
    double rmse = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool valid = false;  // a finite objective was reached
};

// Per-restart (initial, final) objective values, for diagnostics.
struct FitTrace {
    std::vector<std::pair<double, double>> restarts;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Central differences with the step scaled to the parameter magnitude.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            const std::vector<double>& x, double fx) {
    std::vector<double> g(x.size(), 0.0);
    std::vector<double> p = x;
    for (size_t i = 0; i < x.size(); ++i) {
        double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        p[i] = x[i] + h;
        double fp = f(p);
        p[i] = x[i] - h;
        double fm = f(p);
        p[i] = x[i];
        if (std::isfinite(fp) && std::isfinite(fm)) g[i] = (fp - fm) / (2.0 * h);
        else if (std::isfinite(fp)) g[i] = (fp - fx) / h;
        else if (std::isfinite(fm)) g[i] = (fx - fm) / h;
        else g[i] = 0.0;
    }
    return g;
}

struct MinimizeResult {
    std::vector<double> x;
    double f = kInf;
    bool converged = false;
};

// Dense BFGS with backtracking Armijo line search. Problems here are
// tiny (at most c_max parameters), so naive matrix handling is fine.
inline MinimizeResult bfgs_minimize(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x, int max_iter = 200,
                                    double gtol = 1e-8) {
    const size_t n = x.size();
    MinimizeResult res;
    double fx = f(x);
    if (!std::isfinite(fx)) {
        res.x = x;
        res.f = fx;
        return res;
    }
    std::vector<double> H(n * n, 0.0);  // inverse Hessian approximation
    for (size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
    std::vector<double> g = numeric_gradient(f, x, fx);

    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        if (inf_norm(g) < gtol) {
            res.converged = true;
            break;
        }
        std::vector<double> d(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) d[i] -= H[i * n + j] * g[j];
        double gd = 0.0;
        for (size_t i = 0; i < n; ++i) gd += g[i] * d[i];
        if (!(gd < 0.0)) {  // not a descent direction; reset to steepest
            for (size_t i = 0; i < n; ++i) d[i] = -g[i];
            gd = 0.0;
            for (size_t i = 0; i < n; ++i) gd += g[i] * d[i];
            if (!(gd < 0.0)) break;
        }
        double step = 1.0;
        double fnew = kInf;
        std::vector<double> xnew(n);
        bool ok = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (size_t i = 0; i < n; ++i) xnew[i] = x[i] + step * d[i];
            fnew = f(xnew);
            if (std::isfinite(fnew) && fnew <= fx + 1e-4 * step * gd) {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) break;
        std::vector<double> gnew = numeric_gradient(f, xnew, fnew);
        std::vector<double> s(n), yv(n);
        for (size_t i = 0; i < n; ++i) {
            s[i] = xnew[i] - x[i];
            yv[i] = gnew[i] - g[i];
        }
        double ys = 0.0;
        for (size_t i = 0; i < n; ++i) ys += yv[i] * s[i];
        if (ys > 1e-12) {
            double rho = 1.0 / ys;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            std::vector<double> Hy(n, 0.0);
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * yv[j];
            double yHy = 0.0;
            for (size_t i = 0; i < n; ++i) yHy += yv[i] * Hy[i];
            for (size_t i = 0; i < n; ++i) {
                for (size_t j = 0; j < n; ++j) {
                    H[i * n + j] += -rho * (s[i] * Hy[j] + Hy[i] * s[j]) +
                                    rho * rho * yHy * s[i] * s[j] + rho * s[i] * s[j];
                }
            }
        }
        x = xnew;
        fx = fnew;
        g = std::move(gnew);
        if (inf_norm(s) < 1e-14) break;
    }
    res.x = x;
    res.f = fx;
    return res;
}

}  // namespace detail

// Sum of squared residuals of the wrapped prediction; +inf when any row
// evaluates non-finite (invalid rows poison the whole candidate).
inline double fit_objective(const ExprTree& tree, const Dataset& data, const ExprForm& form,
                            const std::vector<double>& params) {
    std::vector<double> yhat = apply_form(form, tree, data.x, params);
    double sse = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        double r = data.y[i] - yhat[i];
        if (!std::isfinite(r)) return detail::kInf;
        sse += r * r;
    }
    return sse;
}

// Fits constant placeholders by quasi-Newton minimization of the squared
// error, restarting from Gaussian(mean 1, variance 1) initial points and
// keeping the best restart.
template <typename Rng>
inline FitResult fit_params(const ExprTree& tree, const Dataset& data, const ExprForm& form,
                            int restarts, Rng& rng, FitTrace* trace = nullptr) {
    FitResult out;
    int p = tree.param_count();
    if (p == 0) {
        double sse = fit_objective(tree, data, form, {});
        if (std::isfinite(sse)) {
            out.params = {};
            out.error_sq_sum = sse;
            out.rmse = std::sqrt(sse / static_cast<double>(data.size()));
            out.converged = true;
            out.valid = true;
        }
        return out;
    }
    auto obj = [&](const std::vector<double>& th) { return fit_objective(tree, data, form, th); };
    std::normal_distribution<double> init(1.0, 1.0);
    for (int r = 0; r < std::max(1, restarts); ++r) {
        std::vector<double> x0(static_cast<size_t>(p));
        for (double& v : x0) v = init(rng);
        double f0 = obj(x0);
        detail::MinimizeResult m = detail::bfgs_minimize(obj, x0);
        if (trace) trace->restarts.emplace_back(f0, m.f);
        if (std::isfinite(m.f) && m.f < out.error_sq_sum) {
            out.params = m.x;
            out.error_sq_sum = m.f;
            out.converged = m.converged;
            out.valid = true;
        }
    }
    if (out.valid)
        out.rmse = std::sqrt(out.error_sq_sum / static_cast<double>(data.size()));
    return out;
}

// Search reward: eta^l shrinks with expression length, the denominator
// with the fit error. Wrapper nodes are excluded from l by the callers.
inline double reward(int tree_length, const FitResult& fit, double eta,
                     const std::string& norm = "sum", size_t n_rows = 0) {
    if (!fit.valid || !std::isfinite(fit.error_sq_sum)) return 0.0;
    double err = fit.error_sq_sum;
    if (norm == "mean") {
        if (n_rows == 0) return 0.0;
        err = fit.error_sq_sum / static_cast<double>(n_rows);
    }
    return std::pow(eta, tree_length) / (1.0 + std::sqrt(err));
}

}  // namespace symreg
