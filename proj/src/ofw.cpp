#include "fctm/ofw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fctm/errors.hpp"
#include "fctm/rng.hpp"

namespace fctm {

namespace {

void check_cfg(std::size_t k, const OfwConfig& cfg) {
    if (k < 2) throw InvalidArgument("solver needs K >= 2");
    if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0 / static_cast<double>(k))
        throw InvalidArgument("epsilon must lie in (0, 1/K)");
    if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
    if (!(cfg.rel_tol > 0.0)) throw InvalidArgument("rel_tol must be > 0");
}

Vec uniform_theta(std::size_t k) {
    return Vec(k, 1.0 / static_cast<double>(k));
}

// Renormalizes against floating-point drift and wraps as a ThetaMixture.
ThetaMixture finish_theta(Vec theta, double eps) {
    double sum = 0.0;
    for (double v : theta) sum += v;
    for (double& v : theta) v /= sum;
    return ThetaMixture{std::move(theta), eps};
}

bool stalled(const Vec& best_history, double rel_tol) {
    const std::size_t n = best_history.size();
    if (n <= kStallWindow) return false;
    const double now = best_history[n - 1];
    const double then = best_history[n - 1 - kStallWindow];
    return now - then < rel_tol * std::max(1.0, std::abs(now));
}

bool feasible(const ThetaMixture& t, double eps) {
    double sum = 0.0;
    for (double v : t.theta) {
        if (v < eps * (1.0 - 1e-9)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= 1e-9;
}

}  // namespace

TwoPartObjective map_parts(const Document& d, const CtmModel& m) {
    const double eps = 1e-10;
    TwoPartObjective parts;
    parts.value0 = [&d, &m, eps](const Vec& th) {
        return likelihood_value(ThetaMixture{th, eps}, d, m.beta);
    };
    parts.value1 = [&m, eps](const Vec& th) {
        return ln_value(ThetaMixture{th, eps}, m.prior);
    };
    parts.grad0 = [&d, &m, eps](const Vec& th) {
        return likelihood_gradient(ThetaMixture{th, eps}, d, m.beta);
    };
    parts.grad1 = [&m, eps](const Vec& th) {
        return ln_gradient(ThetaMixture{th, eps}, m.prior);
    };
    return parts;
}

OfwTrace ofw_maximize(const TwoPartObjective& f, std::size_t k, const OfwConfig& cfg,
                      const Vec* init) {
    check_cfg(k, cfg);
    Rng rng(cfg.seed);
    const double eps = cfg.epsilon;

    Vec theta = init ? *init : uniform_theta(k);
    OfwTrace trace;
    trace.best_theta = finish_theta(theta, eps);
    trace.best_value = f.value(theta);
    trace.best_history.push_back(trace.best_value);

    std::size_t c0 = 0;
    std::size_t c1 = 0;
    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
        if (rng.uniform() < 0.5)
            ++c0;
        else
            ++c1;

        // Gradient of the running average (c0 * f0 + c1 * f1) / iter; past
        // draws enter through their counts, never by re-evaluation.
        const double w0 = static_cast<double>(c0) / static_cast<double>(iter);
        const double w1 = static_cast<double>(c1) / static_cast<double>(iter);
        Vec g(k, 0.0);
        if (c0 > 0) {
            const Vec g0 = f.grad0(theta);
            for (std::size_t i = 0; i < k; ++i) g[i] += w0 * g0[i];
        }
        if (c1 > 0) {
            const Vec g1 = f.grad1(theta);
            for (std::size_t i = 0; i < k; ++i) g[i] += w1 * g1[i];
        }

        std::size_t best_i = 0;
        for (std::size_t i = 1; i < k; ++i)
            if (g[i] > g[best_i]) best_i = i;

        // Step toward the interior vertex v of the feasible simplex: v has
        // 1 - (K-1) eps at best_i and eps elsewhere.
        const double alpha = 2.0 / (static_cast<double>(iter) + 2.0);
        const double vertex_top = 1.0 - (static_cast<double>(k) - 1.0) * eps;
        for (std::size_t i = 0; i < k; ++i) {
            const double v = (i == best_i) ? vertex_top : eps;
            theta[i] = alpha * v + (1.0 - alpha) * theta[i];
        }

        const double val = f.value(theta);
        if (val > trace.best_value) {
            trace.best_value = val;
            trace.best_theta = finish_theta(theta, eps);
        }
        trace.best_history.push_back(trace.best_value);
        trace.iterations_run = iter;
        trace.part_draw_counts = {c0, c1};
        if (stalled(trace.best_history, cfg.rel_tol)) break;
    }
    return trace;
}

OfwTrace pga_maximize(const TwoPartObjective& f, std::size_t k, const OfwConfig& cfg,
                      const Vec* init) {
    check_cfg(k, cfg);
    const double eps = cfg.epsilon;

    Vec theta = init ? *init : uniform_theta(k);
    double current = f.value(theta);
    OfwTrace trace;
    trace.best_theta = finish_theta(theta, eps);
    trace.best_value = current;
    trace.best_history.push_back(current);

    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
        trace.iterations_run = iter;
        Vec g0 = f.grad0(theta);
        const Vec g1 = f.grad1(theta);
        for (std::size_t i = 0; i < k; ++i) g0[i] += g1[i];

        double step = 1.0;
        bool improved = false;
        for (int h = 0; h < 30; ++h) {
            Vec cand(k);
            for (std::size_t i = 0; i < k; ++i) cand[i] = theta[i] + step * g0[i];
            cand = project_to_eps_simplex(std::move(cand), eps);
            const double val = f.value(cand);
            if (val > current) {
                theta = std::move(cand);
                current = val;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;  // stationary within line-search resolution

        if (current > trace.best_value) {
            trace.best_value = current;
            trace.best_theta = finish_theta(theta, eps);
        }
        trace.best_history.push_back(trace.best_value);
        if (stalled(trace.best_history, cfg.rel_tol)) break;
    }
    return trace;
}

OfwTrace ofw_infer(const Document& d, const CtmModel& m, const OfwConfig& cfg) {
    return ofw_maximize(map_parts(d, m), m.beta.k, cfg);
}

OfwTrace pga_infer(const Document& d, const CtmModel& m, const OfwConfig& cfg) {
    return pga_maximize(map_parts(d, m), m.beta.k, cfg);
}

Vec project_to_eps_simplex(Vec y, double eps) {
    const std::size_t k = y.size();
    if (k == 0) throw InvalidArgument("cannot project an empty vector");
    const double mass = 1.0 - static_cast<double>(k) * eps;
    if (mass <= 0.0) throw InvalidArgument("epsilon too large for the dimension");

    // Sort-based projection of (y - eps) onto the simplex of the remaining mass.
    Vec u(k);
    for (std::size_t i = 0; i < k; ++i) u[i] = y[i] - eps;
    Vec sorted = u;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cum = 0.0;
    double tau = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        cum += sorted[i];
        const double t = (cum - mass) / static_cast<double>(i + 1);
        if (sorted[i] - t > 0.0) tau = t;
    }
    for (std::size_t i = 0; i < k; ++i) u[i] = std::max(u[i] - tau, 0.0) + eps;
    return u;
}

RaceResult race(const std::vector<Document>& instances, const CtmModel& m,
                const OfwConfig& cfg) {
    if (instances.empty()) throw InvalidArgument("race needs at least one instance");
    RaceResult out;
    out.rows.reserve(instances.size());
    using clock = std::chrono::steady_clock;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        OfwConfig per = cfg;
        per.seed = derive_seed(cfg.seed, i);

        const auto t0 = clock::now();
        const OfwTrace ofw = ofw_infer(instances[i], m, per);
        const auto t1 = clock::now();
        const OfwTrace pga = pga_infer(instances[i], m, per);
        const auto t2 = clock::now();

        RaceRow row;
        row.ofw_value = ofw.best_value;
        row.pga_value = pga.best_value;
        row.ofw_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.pga_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
        row.ofw_feasible = feasible(ofw.best_theta, cfg.epsilon);
        row.pga_feasible = feasible(pga.best_theta, cfg.epsilon);
        out.rows.push_back(row);

        const double delta = ofw.best_value - pga.best_value;
        const double band =
            1e-6 * std::max({1.0, std::abs(ofw.best_value), std::abs(pga.best_value)});
        if (std::abs(delta) <= band)
            ++out.ties;
        else if (delta > 0.0)
            ++out.wins;
        else
            ++out.losses;
    }
    return out;
}

}  // namespace fctm
