#include "fctm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fctm/errors.hpp"

namespace fctm {

HeldoutResult heldout_objective(const Corpus& c, const CtmModel& m, const OfwConfig& cfg) {
    if (c.num_docs() == 0) throw InvalidArgument("heldout_objective: empty corpus");
    if (m.beta.v != c.num_terms())
        throw InvalidArgument("heldout_objective: model vocabulary size does not match corpus");
    HeldoutResult r;
    r.per_doc.reserve(c.num_docs());
    for (std::size_t i = 0; i < c.num_docs(); ++i) {
        const Document& d = c.docs[i];
        if (!(d.total_count > 0.0))
            throw InvalidArgument("heldout_objective: document " + std::to_string(i) +
                                  " has no words");
        OfwConfig oc = cfg;
        oc.seed = derive_seed(cfg.seed, i);
        const OfwTrace tr = ofw_infer(d, m, oc);
        r.per_doc.push_back(map_value(tr.best_theta, d, m) / d.total_count);
    }
    r.mean = std::accumulate(r.per_doc.begin(), r.per_doc.end(), 0.0) /
             static_cast<double>(r.per_doc.size());
    return r;
}

std::vector<std::size_t> top_terms_for_topic(const Vec& row, std::size_t t) {
    std::vector<std::size_t> ids(row.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::sort(ids.begin(), ids.end(), [&row](std::size_t a, std::size_t b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return a < b;
    });
    ids.resize(std::min(t, ids.size()));
    return ids;
}

CoherenceResult coherence(const Corpus& c, const CtmModel& m, std::size_t t) {
    if (t < 2) throw InvalidArgument("coherence: need at least two top terms");
    if (m.beta.v != c.num_terms())
        throw InvalidArgument("coherence: model vocabulary size does not match corpus");

    CoherenceResult r;
    r.top_terms.reserve(m.beta.k);
    std::vector<std::size_t> candidates;
    for (const auto& row : m.beta.rows) {
        r.top_terms.push_back(top_terms_for_topic(row, t));
        candidates.insert(candidates.end(), r.top_terms.back().begin(),
                          r.top_terms.back().end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    const DocFreqTable table = doc_freq_table(c, candidates);

    r.per_topic.reserve(m.beta.k);
    for (const auto& selected : r.top_terms) {
        // terms the corpus never saw would put a zero in the denominator
        std::vector<std::size_t> kept;
        for (std::size_t v : selected) {
            if (table.df[v] >= 1) {
                kept.push_back(v);
            } else {
                ++r.skipped_terms;
            }
        }
        double ck = 0.0;
        for (std::size_t mi = 1; mi < kept.size(); ++mi) {
            for (std::size_t li = 0; li < mi; ++li) {
                const double co = static_cast<double>(table.co(kept[mi], kept[li]));
                const double df = static_cast<double>(table.df[kept[li]]);
                ck += std::log((co + 1.0) / df);
            }
        }
        r.per_topic.push_back(ck);
    }
    r.mean = std::accumulate(r.per_topic.begin(), r.per_topic.end(), 0.0) /
             static_cast<double>(r.per_topic.size());
    return r;
}

EvalReport evaluate(const Corpus& test, const Corpus& reference, const CtmModel& m,
                    const OfwConfig& cfg, std::size_t t) {
    const HeldoutResult h = heldout_objective(test, m, cfg);
    const CoherenceResult co = coherence(reference, m, t);
    EvalReport rep;
    rep.mean_map_objective = h.mean;
    rep.per_doc_values = h.per_doc;
    rep.coherence_per_topic = co.per_topic;
    rep.mean_coherence = co.mean;
    rep.top_terms = co.top_terms;
    rep.skipped_terms = co.skipped_terms;
    return rep;
}

}  // namespace fctm
