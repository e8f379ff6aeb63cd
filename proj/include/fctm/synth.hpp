#pragma once

#include <cstdint>
#include <vector>

#include "fctm/corpus.hpp"
#include "fctm/map_objective.hpp"
#include "fctm/rng.hpp"

namespace fctm {

struct WordsPerDoc {
    enum class Kind { fixed, poisson };
    Kind kind = Kind::fixed;
    double mean = 1.0;  // exact count when fixed; must be >= 1 either way

    void validate() const;
};

struct GenConfig {
    CtmModel model;
    std::size_t docs = 1;
    WordsPerDoc words_per_doc;
    std::uint64_t seed = 0;
};

// theta_k = exp(x_k) / sum_l exp(x_l), clamped into the epsilon-interior
// simplex and renormalized.
ThetaMixture softmax_natural(const Vec& x, double epsilon = 1e-10);

// g ~ N(mu, sigma) by Cholesky, theta = softmax of (g, 0); the last natural
// coordinate is pinned at zero so log_tilde(theta) = g exactly (up to the
// epsilon clamp).
ThetaMixture sample_theta(const GaussianPrior& prior, Rng& rng);

// Mean >= 1 keeps Knuth's product method cheap here; documents redraw zero
// counts anyway.
std::size_t sample_poisson(double mean, Rng& rng);

// "w" plus the zero-padded term index.
Vocabulary synthetic_vocabulary(std::size_t v);

struct SampledCorpus {
    Corpus corpus;
    std::vector<ThetaMixture> planted;  // the theta that generated each document
};

// Per document: theta from the prior, a word count draw (redrawn while zero
// so no document is empty), then count draws of topic ~ theta, word ~
// beta_topic, aggregated into counts. Each document consumes its own seed
// stream derived from (cfg.seed, doc index).
SampledCorpus sample_corpus(const GenConfig& cfg);

// Demo model with block-structured, well-separated topics: topic k puts 90%
// of its mass on its own contiguous slice of the vocabulary. mu = 0,
// sigma = I.
CtmModel planted_model(std::size_t k, std::size_t v);

}  // namespace fctm
