#pragma once

#include <cstddef>
#include <vector>

#include "fctm/corpus.hpp"
#include "fctm/map_objective.hpp"
#include "fctm/ofw.hpp"

namespace fctm {

struct HeldoutResult {
    double mean = 0.0;
    Vec per_doc;  // per-word MAP joint value, one per document
};

// Inference on each document followed by the MAP joint value divided by the
// document's word count, so documents of different lengths are comparable.
// This is the MAP joint objective, not a marginal likelihood.
HeldoutResult heldout_objective(const Corpus& c, const CtmModel& m, const OfwConfig& cfg);

// Top-t term ids of one topic row: probability descending, ties by
// ascending id. t is clamped to the row length.
std::vector<std::size_t> top_terms_for_topic(const Vec& row, std::size_t t);

struct CoherenceResult {
    Vec per_topic;
    double mean = 0.0;
    std::vector<std::vector<std::size_t>> top_terms;  // K ordered lists
    std::size_t skipped_terms = 0;  // selected terms absent from the corpus
};

// C(k) = sum_{m=2..t} sum_{l<m} log((codf(v_m, v_l) + 1) / df(v_l)) over the
// topic's top-t terms ordered by descending probability. Document
// frequencies come from c (conventionally the training split). A selected
// term with df = 0 would divide by zero and is skipped (and counted).
CoherenceResult coherence(const Corpus& c, const CtmModel& m, std::size_t t);

struct EvalReport {
    double mean_map_objective = 0.0;
    Vec per_doc_values;
    Vec coherence_per_topic;
    double mean_coherence = 0.0;
    std::vector<std::vector<std::size_t>> top_terms;
    std::size_t skipped_terms = 0;
};

// Held-out objective on `test`, coherence against `reference`.
EvalReport evaluate(const Corpus& test, const Corpus& reference, const CtmModel& m,
                    const OfwConfig& cfg, std::size_t t);

}  // namespace fctm
