#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fctm/corpus.hpp"
#include "fctm/map_objective.hpp"

namespace fctm {

struct GraphNode {
    std::size_t topic;
    std::vector<std::size_t> label_terms;  // top term ids, probability descending
    std::vector<std::string> label_words;  // resolved names when a vocabulary is given
};

struct GraphEdge {
    std::size_t a;  // a < b, no self-edges
    std::size_t b;
    double correlation;  // in [-1, 1], |correlation| >= the build threshold
    bool positive;
};

struct CorrelationGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    double threshold = 0.0;
    // true: correlations among the K-1 log-ratio coordinates (reference
    // topic excluded from the graph). false: Monte-Carlo correlations of the
    // K topic proportions themselves.
    bool log_ratio_mode = true;
};

// Pairwise correlations R_ij = sigma_ij / sqrt(sigma_ii sigma_jj) over the
// prior's K-1 log-ratio coordinates; an edge is emitted where R_ij >=
// threshold (positive) or R_ij <= -threshold (negative). The reference
// topic has no log-ratio coordinate and does not appear.
CorrelationGraph correlation_graph(const CtmModel& m, double threshold,
                                   std::size_t label_terms,
                                   const Vocabulary* vocab = nullptr);

// Same edge rule on empirical correlations of the K topic proportions under
// the prior, estimated from n_samples seeded draws; covers all K topics.
CorrelationGraph correlation_graph_mc(const CtmModel& m, double threshold,
                                      std::size_t label_terms, std::size_t n_samples,
                                      std::uint64_t seed,
                                      const Vocabulary* vocab = nullptr);

enum class SignFilter { positive, negative, both };

// Undirected DOT text with deterministic node and edge order; negative
// edges are dashed and every edge is labeled with its correlation.
std::string to_dot(const CorrelationGraph& g, SignFilter filter);

}  // namespace fctm
