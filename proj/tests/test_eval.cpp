#include <cmath>

#include "doctest.h"
#include "fctm/errors.hpp"
#include "fctm/eval.hpp"
#include "fctm/synth.hpp"
#include "oracles.hpp"

using namespace fctm;
using testutil::rel_err;

namespace {

Corpus corpus_from(std::size_t v, const std::vector<std::vector<std::size_t>>& doc_terms) {
    Corpus c;
    c.vocab = synthetic_vocabulary(v);
    for (const auto& terms : doc_terms) {
        Document d;
        for (std::size_t t : terms) {
            d.entries.push_back({t, 1.0});
            d.total_count += 1.0;
        }
        c.docs.push_back(std::move(d));
    }
    return c;
}

TopicMatrix beta_from(std::initializer_list<std::initializer_list<double>> rows) {
    TopicMatrix b;
    b.k = rows.size();
    for (const auto& row : rows) {
        b.rows.emplace_back(row);
        b.v = b.rows.back().size();
    }
    return b;
}

CtmModel toy_model(TopicMatrix beta) {
    const std::size_t km1 = beta.k - 1;
    return CtmModel{std::move(beta),
                    GaussianPrior(Vec(km1, 0.0), SymMatrix::identity(km1))};
}

}  // namespace

TEST_CASE("top term selection orders by probability then id") {
    const Vec row{0.1, 0.4, 0.1, 0.25, 0.15};
    const auto top = top_terms_for_topic(row, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0] == 1);
    CHECK(top[1] == 3);
    CHECK(top[2] == 4);

    // Ties resolve toward the smaller id.
    const Vec tied{0.25, 0.25, 0.25, 0.25};
    const auto t2 = top_terms_for_topic(tied, 2);
    CHECK(t2[0] == 0);
    CHECK(t2[1] == 1);

    // Requests beyond the row length are clamped.
    CHECK(top_terms_for_topic(row, 50).size() == row.size());
}

TEST_CASE("heldout objective on a single document") {
    const CtmModel m = planted_model(2, 6);
    Corpus c = corpus_from(6, {{0, 1, 3}});
    OfwConfig cfg;
    cfg.seed = 11;
    const HeldoutResult r = heldout_objective(c, m, cfg);
    REQUIRE(r.per_doc.size() == 1);
    CHECK(r.mean == r.per_doc[0]);

    // Same seed derivation as a direct inference call.
    OfwConfig oc = cfg;
    oc.seed = derive_seed(cfg.seed, 0);
    const OfwTrace tr = ofw_infer(c.docs[0], m, oc);
    CHECK(r.per_doc[0] ==
          doctest::Approx(map_value(tr.best_theta, c.docs[0], m) / 3.0).epsilon(1e-15));
}

TEST_CASE("heldout objective rejects unusable inputs") {
    const CtmModel m = planted_model(2, 6);
    OfwConfig cfg;
    Corpus empty;
    empty.vocab = synthetic_vocabulary(6);
    CHECK_THROWS_AS(heldout_objective(empty, m, cfg), InvalidArgument);

    Corpus wrong = corpus_from(5, {{0}});
    CHECK_THROWS_AS(heldout_objective(wrong, m, cfg), InvalidArgument);
}

TEST_CASE("heldout value stays under the split optima") {
    // The joint optimum cannot beat maximizing each term separately.
    Rng rng(503);
    for (int rep = 0; rep < 10; ++rep) {
        TopicMatrix beta;
        beta.k = 2;
        beta.v = 4;
        for (std::size_t i = 0; i < 2; ++i) {
            Vec row(4);
            double s = 0.0;
            for (double& x : row) {
                x = 0.05 + rng.uniform();
                s += x;
            }
            for (double& x : row) x /= s;
            beta.rows.push_back(std::move(row));
        }
        const CtmModel m{beta, GaussianPrior(Vec{0.3}, SymMatrix::diagonal(Vec{0.5}))};

        Corpus c = corpus_from(4, {{0, 1, 2}, {1, 3}, {2}});
        OfwConfig cfg;
        cfg.seed = 100 + rep;
        const HeldoutResult r = heldout_objective(c, m, cfg);
        for (std::size_t i = 0; i < c.num_docs(); ++i) {
            const Document& d = c.docs[i];
            const double lik_max = testutil::grid_max_k2(
                [&](const Vec& th) {
                    return likelihood_value(ThetaMixture{th, 1e-10}, d, m.beta);
                },
                1e-6, 4000);
            const double prior_max = testutil::grid_max_k2(
                [&](const Vec& th) { return ln_value(ThetaMixture{th, 1e-10}, m.prior); },
                1e-6, 4000);
            CHECK(r.per_doc[i] * d.total_count <= lik_max + prior_max + 1e-6);
        }
    }
}

TEST_CASE("doubling counts doubles only the likelihood part") {
    Rng rng(509);
    const CtmModel m = planted_model(3, 8);
    Document d;
    d.entries = {{1, 2.0}, {4, 1.0}, {6, 3.0}};
    d.total_count = 6.0;
    Document d2;
    for (const DocEntry& e : d.entries) d2.entries.push_back({e.term, 2.0 * e.count});
    d2.total_count = 2.0 * d.total_count;

    for (int rep = 0; rep < 10; ++rep) {
        const ThetaMixture t = testutil::random_theta(3, rng);
        const double prior = ln_value(t, m.prior);
        const double single = map_value(t, d, m) - prior;
        const double doubled = map_value(t, d2, m) - prior;
        CHECK(rel_err(doubled, 2.0 * single) <= 1e-12);
    }
}

TEST_CASE("coherence single-pair hand value") {
    // Term 0 appears in four documents, term 1 in two of those, so the only
    // pair contributes log((2+1)/4).
    Corpus c = corpus_from(3, {{0, 1}, {0, 1, 2}, {0}, {0, 2}, {2}});
    const CtmModel m = toy_model(beta_from({{0.6, 0.3, 0.1}, {0.1, 0.3, 0.6}}));

    const CoherenceResult r = coherence(c, m, 2);
    REQUIRE(r.per_topic.size() == 2);
    REQUIRE(r.top_terms[0] == std::vector<std::size_t>{0, 1});
    CHECK(r.per_topic[0] == doctest::Approx(std::log(0.75)).epsilon(1e-15));

    // Topic 1 selects (2, 1): df(2) = 3, co(1, 2) = 1.
    REQUIRE(r.top_terms[1] == std::vector<std::size_t>{2, 1});
    CHECK(r.per_topic[1] == doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-15));
    CHECK(r.mean ==
          doctest::Approx(0.5 * (r.per_topic[0] + r.per_topic[1])).epsilon(1e-15));
    CHECK(r.skipped_terms == 0);
}

TEST_CASE("coherence is positive when top terms always co-occur") {
    Corpus c = corpus_from(4, {{0, 1}, {0, 1}, {0, 1, 3}});
    const CtmModel m = toy_model(beta_from({{0.5, 0.4, 0.05, 0.05},
                                            {0.05, 0.05, 0.5, 0.4}}));
    const CoherenceResult r = coherence(c, m, 2);
    // df(0) = co(0,1) = 3: the summand is log(4/3) > 0.
    CHECK(r.per_topic[0] == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-15));
    CHECK(r.per_topic[0] > 0.0);
}

TEST_CASE("coherence skips terms the corpus never saw") {
    // Term 3 has probability mass but zero document frequency.
    Corpus c = corpus_from(4, {{0, 1}, {0, 1}, {0}});
    const CtmModel m = toy_model(beta_from({{0.4, 0.3, 0.05, 0.25},
                                            {0.25, 0.3, 0.05, 0.4}}));
    const CoherenceResult r = coherence(c, m, 3);
    CHECK(r.skipped_terms == 2);  // both topics select term 3
    // Remaining pair for topic 0 is (0, 1): log((2+1)/3).
    CHECK(r.per_topic[0] == doctest::Approx(std::log(1.0)).epsilon(1e-15));

    CHECK_THROWS_AS(coherence(c, m, 1), InvalidArgument);
}

TEST_CASE("coherence depends only on the ordered top lists") {
    Corpus c = corpus_from(5, {{0, 1, 2}, {1, 2, 3}, {0, 2, 4}, {3, 4}});
    const CtmModel a = toy_model(beta_from({{0.4, 0.3, 0.2, 0.06, 0.04},
                                            {0.04, 0.06, 0.2, 0.3, 0.4}}));
    // Different values, identical orderings.
    const CtmModel b = toy_model(beta_from({{0.5, 0.2, 0.15, 0.1, 0.05},
                                            {0.05, 0.1, 0.15, 0.2, 0.5}}));
    const CoherenceResult ra = coherence(c, a, 3);
    const CoherenceResult rb = coherence(c, b, 3);
    REQUIRE(ra.top_terms == rb.top_terms);
    for (std::size_t k = 0; k < 2; ++k) CHECK(ra.per_topic[k] == rb.per_topic[k]);
}

TEST_CASE("evaluate aggregates both measures consistently") {
    const CtmModel m = planted_model(2, 8);
    const SampledCorpus s = [&] {
        GenConfig cfg{m, 12, WordsPerDoc{}, 19};
        cfg.words_per_doc.kind = WordsPerDoc::Kind::fixed;
        cfg.words_per_doc.mean = 30.0;
        return sample_corpus(cfg);
    }();
    const auto [train, test] = split_corpus(s.corpus, 0.75, 3);

    OfwConfig cfg;
    cfg.seed = 23;
    const EvalReport rep = evaluate(test, train, m, cfg, 3);

    REQUIRE(rep.per_doc_values.size() == test.num_docs());
    double acc = 0.0;
    for (double v : rep.per_doc_values) acc += v;
    CHECK(rel_err(rep.mean_map_objective, acc / static_cast<double>(test.num_docs())) <=
          1e-12);

    REQUIRE(rep.coherence_per_topic.size() == 2);
    double cacc = 0.0;
    for (double v : rep.coherence_per_topic) cacc += v;
    CHECK(rel_err(rep.mean_coherence, cacc / 2.0) <= 1e-12);
    REQUIRE(rep.top_terms.size() == 2);
    for (const auto& list : rep.top_terms) CHECK(list.size() == 3);

    // Deterministic under identical flags.
    const EvalReport again = evaluate(test, train, m, cfg, 3);
    CHECK(again.mean_map_objective == rep.mean_map_objective);
    CHECK(again.mean_coherence == rep.mean_coherence);
}
