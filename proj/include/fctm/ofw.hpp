#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fctm/map_objective.hpp"

namespace fctm {

struct OfwConfig {
    double epsilon = 1e-10;     // interior margin of the feasible simplex
    std::size_t max_iters = 100;
    double rel_tol = 1e-6;      // relative-improvement stopping threshold
    std::uint64_t seed = 0;
};

// The stochastic solver may stall the running best for a few draws even far
// from the optimum, so "no relative improvement" only counts as converged
// after a full window of iterations without one. A small simplex coordinate
// t is revisited only every ~(1-t)/t steps, so the window has to cover the
// longest such cycle we expect to refine (t around 0.02).
inline constexpr std::size_t kStallWindow = 50;

struct OfwTrace {
    std::size_t iterations_run = 0;
    double best_value = 0.0;
    ThetaMixture best_theta;
    std::pair<std::size_t, std::size_t> part_draw_counts{0, 0};
    Vec best_history;  // running best after the start point and each iteration
};

// An objective split into two parts whose sum is the full function.
struct TwoPartObjective {
    std::function<double(const Vec&)> value0;
    std::function<double(const Vec&)> value1;
    std::function<Vec(const Vec&)> grad0;
    std::function<Vec(const Vec&)> grad1;

    double value(const Vec& theta) const { return value0(theta) + value1(theta); }
};

// The document's likelihood part and the prior's logistic-normal part.
TwoPartObjective map_parts(const Document& d, const CtmModel& m);

// Stochastic conditional-gradient ascent over the epsilon-interior simplex:
// start at the uniform mixture (or *init), draw one part per iteration,
// follow the argmax coordinate of the averaged gradient toward the matching
// interior vertex with step 2/(iter+2), and return the best full-objective
// iterate seen.
OfwTrace ofw_maximize(const TwoPartObjective& f, std::size_t k, const OfwConfig& cfg,
                      const Vec* init = nullptr);

// Deterministic baseline: projected gradient ascent with backtracking line
// search (start 1.0, halve, at most 30 halvings); terminates on line-search
// failure, the stall window, or the iteration cap.
OfwTrace pga_maximize(const TwoPartObjective& f, std::size_t k, const OfwConfig& cfg,
                      const Vec* init = nullptr);

OfwTrace ofw_infer(const Document& d, const CtmModel& m, const OfwConfig& cfg);
OfwTrace pga_infer(const Document& d, const CtmModel& m, const OfwConfig& cfg);

// Euclidean projection onto {theta : theta_k >= eps, sum theta = 1}: project
// y - eps*1 onto the simplex of mass 1 - K*eps, then shift back.
Vec project_to_eps_simplex(Vec y, double eps);

struct RaceRow {
    double ofw_value;
    double pga_value;
    double ofw_ms;
    double pga_ms;
    bool ofw_feasible;
    bool pga_feasible;
};

struct RaceResult {
    std::vector<RaceRow> rows;
    std::size_t wins = 0;    // ofw strictly better than the tie band
    std::size_t ties = 0;    // |delta| <= 1e-6 * max(1, |f|)
    std::size_t losses = 0;
};

// Runs both solvers per document; per-document seeds derive from cfg.seed.
RaceResult race(const std::vector<Document>& instances, const CtmModel& m,
                const OfwConfig& cfg);

}  // namespace fctm
