#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fctm/corpus.hpp"
#include "fctm/map_objective.hpp"
#include "fctm/ofw.hpp"

namespace fctm {

struct LearnConfig {
    std::size_t k = 2;
    double alpha = 1.0;            // covariance regularizer
    double learn_rel_tol = 1e-3;   // relative improvement threshold on L
    std::size_t max_em_iters = 100;
    OfwConfig ofw;
    double beta_floor = 1e-12;     // keeps every topic entry strictly positive
    std::uint64_t master_seed = 0;
    bool warm_start = false;       // reuse previous mixtures as start points
    std::size_t threads = 1;

    void validate(std::size_t v) const;
};

struct LearnState {
    CtmModel model;
    std::vector<ThetaMixture> thetas;  // one per document
    Vec objective_history;             // L after each full iteration
    std::size_t uniform_reset_rows = 0;  // topics that never received mass
};

// L = sum_d [likelihood + quadratic prior term] - (M/2) log det Sigma
//   - (M/2) alpha tr(Sigma^-1); the theta-only additive term is dropped
//   since the parameter updates never see it.
double regularized_objective(const LearnState& state, const Corpus& c,
                             const LearnConfig& cfg);

// One inference run per document; the per-document seed depends only on
// (master_seed, doc index), never on execution order.
std::vector<ThetaMixture> e_step(const Corpus& c, const CtmModel& model,
                                 const LearnConfig& cfg,
                                 const std::vector<ThetaMixture>* warm = nullptr);

// Closed-form parameter updates given fixed mixtures. A topic row that
// received no mass anywhere is reset to uniform; the count of such rows is
// reported through *uniform_rows when given.
CtmModel m_step(const Corpus& c, const std::vector<ThetaMixture>& thetas,
                const LearnConfig& cfg, std::size_t* uniform_rows = nullptr);

// Deterministic starting point: normalized positive random topic rows under
// master_seed, mu = 0, sigma = I.
CtmModel init_model(std::size_t v, const LearnConfig& cfg);

// Alternates e_step and m_step until the relative improvement of L drops
// below learn_rel_tol or max_em_iters is reached.
LearnState fit(const Corpus& c, const LearnConfig& cfg,
               const CtmModel* init = nullptr);

// Versioned JSON container: K, V, alpha, beta (row-major), mu, sigma, and
// the vocabulary hash. Doubles round-trip exactly.
void save_model(const CtmModel& m, double alpha, std::uint64_t vocab_hash,
                const std::string& path);

struct LoadedModel {
    CtmModel model;
    double alpha;
    std::uint64_t vocab_hash;
};

LoadedModel load_model(const std::string& path);

}  // namespace fctm
