#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <utility>

#include "fctm/corpus.hpp"
#include "fctm/errors.hpp"
#include "fctm/eval.hpp"
#include "fctm/export_graph.hpp"
#include "fctm/learner.hpp"
#include "fctm/logistic_normal.hpp"
#include "fctm/ofw.hpp"
#include "fctm/synth.hpp"
#include "fctm/version.hpp"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> matrix_2d(const std::vector<fctm::Vec>& rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.front().size();
    py::array_t<double> out({n, m});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) buf(i, j) = rows[i][j];
    return out;
}

py::array_t<double> sym_2d(const fctm::SymMatrix& a) {
    const std::size_t n = a.dim();
    py::array_t<double> out({n, n});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) buf(i, j) = a(i, j);
    return out;
}

py::array_t<double> vec_1d(const fctm::Vec& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    auto buf = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.size(); ++i) buf(static_cast<py::ssize_t>(i)) = v[i];
    return out;
}

py::array_t<double> thetas_2d(const std::vector<fctm::ThetaMixture>& ts) {
    const std::size_t n = ts.size();
    const std::size_t k = n == 0 ? 0 : ts.front().k();
    py::array_t<double> out({n, k});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) buf(i, j) = ts[i].theta[j];
    return out;
}

fctm::Vec vec_from(const DoubleArray& a, const char* what) {
    if (a.ndim() != 1) throw fctm::InvalidArgument(std::string(what) + ": expected a 1-d array");
    const auto r = a.unchecked<1>();
    fctm::Vec v(static_cast<std::size_t>(r.shape(0)));
    for (py::ssize_t i = 0; i < r.shape(0); ++i) v[static_cast<std::size_t>(i)] = r(i);
    return v;
}

fctm::SymMatrix sym_from(const DoubleArray& a, const char* what) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1))
        throw fctm::InvalidArgument(std::string(what) + ": expected a square 2-d array");
    const auto r = a.unchecked<2>();
    const std::size_t n = static_cast<std::size_t>(r.shape(0));
    fctm::SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double hi = r(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
            const double lo = r(static_cast<py::ssize_t>(j), static_cast<py::ssize_t>(i));
            if (hi != lo) throw fctm::InvalidArgument(std::string(what) + ": not symmetric");
            s.set(i, j, hi);
        }
    }
    return s;
}

fctm::GaussianPrior prior_from(const DoubleArray& sigma, const py::object& mu) {
    fctm::SymMatrix s = sym_from(sigma, "sigma");
    fctm::Vec m(s.dim(), 0.0);
    if (!mu.is_none()) {
        m = vec_from(mu.cast<DoubleArray>(), "mu");
        if (m.size() != s.dim()) throw fctm::InvalidArgument("mu/sigma dimension mismatch");
    }
    return fctm::GaussianPrior(std::move(m), std::move(s));
}

py::dict certificate_dict(const fctm::ConcavityCertificate& c) {
    py::dict d;
    d["lambda_min_inv"] = c.lambda_min_inv;
    d["sigma_max_diag"] = c.sigma_max_diag;
    d["k"] = c.k;
    d["applicable"] = c.applicable;
    d["p_bound"] = c.p_bound;
    d["vacuous"] = c.vacuous();
    return d;
}

fctm::OfwConfig ofw_config(std::size_t iters, double tol, double eps, std::uint64_t seed) {
    fctm::OfwConfig c;
    c.max_iters = iters;
    c.rel_tol = tol;
    c.epsilon = eps;
    c.seed = seed;
    return c;
}

}  // namespace

PYBIND11_MODULE(_fctm_cpp, m) {
    m.doc() = "correlated topic models via alternating MAP inference";
    m.attr("__version__") = fctm::kVersion;

    py::class_<fctm::Corpus>(m, "Corpus", "bag-of-words corpus with its vocabulary")
        .def_property_readonly("num_docs", &fctm::Corpus::num_docs)
        .def_property_readonly("num_terms", &fctm::Corpus::num_terms)
        .def_property_readonly("terms",
                               [](const fctm::Corpus& c) { return c.vocab.terms; })
        .def_property_readonly("vocab_hash",
                               [](const fctm::Corpus& c) { return c.vocab.hash(); })
        .def(
            "counts",
            [](const fctm::Corpus& c, std::size_t doc) {
                if (doc >= c.num_docs()) throw fctm::InvalidArgument("document id out of range");
                std::vector<std::pair<std::size_t, double>> out;
                for (const auto& e : c.docs[doc].entries) out.emplace_back(e.term, e.count);
                return out;
            },
            py::arg("doc"), "list of (term id, count) pairs of one document");

    py::class_<fctm::CtmModel>(m, "Model", "topic matrix plus the log-ratio Gaussian prior")
        .def_property_readonly("k", [](const fctm::CtmModel& m_) { return m_.beta.k; })
        .def_property_readonly("v", [](const fctm::CtmModel& m_) { return m_.beta.v; })
        .def_property_readonly("beta",
                               [](const fctm::CtmModel& m_) { return matrix_2d(m_.beta.rows); })
        .def_property_readonly("mu",
                               [](const fctm::CtmModel& m_) { return vec_1d(m_.prior.mu()); })
        .def_property_readonly(
            "sigma", [](const fctm::CtmModel& m_) { return sym_2d(m_.prior.sigma()); });

    m.def(
        "load_corpus",
        [](const std::string& docword, const std::string& vocab) {
            fctm::LoadReport rep = fctm::load_uci_bow_files(docword, vocab);
            return py::make_tuple(std::move(rep.corpus), rep.dropped_empty_docs);
        },
        py::arg("docword"), py::arg("vocab"),
        "load a UCI bag-of-words corpus; returns (corpus, dropped_empty_docs)");

    m.def(
        "save_corpus",
        [](const fctm::Corpus& c, const std::string& docword, const std::string& vocab) {
            fctm::save_uci_bow_files(c, docword, vocab);
        },
        py::arg("corpus"), py::arg("docword"), py::arg("vocab"));

    m.def(
        "split_corpus",
        [](const fctm::Corpus& c, double train_fraction, std::uint64_t seed) {
            auto [train, test] = fctm::split_corpus(c, train_fraction, seed);
            return py::make_tuple(std::move(train), std::move(test));
        },
        py::arg("corpus"), py::arg("train_fraction"), py::arg("seed") = 0);

    m.def(
        "synth_corpus",
        [](std::size_t topics, std::size_t vocab_size, std::size_t docs, std::size_t words,
           double poisson_mean, std::uint64_t seed) {
            fctm::GenConfig cfg{fctm::planted_model(topics, vocab_size), docs,
                                fctm::WordsPerDoc{}, seed};
            if (poisson_mean > 0.0) {
                cfg.words_per_doc = {fctm::WordsPerDoc::Kind::poisson, poisson_mean};
            } else {
                cfg.words_per_doc = {fctm::WordsPerDoc::Kind::fixed,
                                     static_cast<double>(words)};
            }
            fctm::SampledCorpus s = fctm::sample_corpus(cfg);
            return py::make_tuple(std::move(s.corpus), thetas_2d(s.planted));
        },
        py::arg("topics") = 3, py::arg("vocab_size") = 20, py::arg("docs") = 100,
        py::arg("words") = 100, py::arg("poisson_mean") = 0.0, py::arg("seed") = 0,
        "sample a corpus from a planted block-topic model; returns (corpus, planted thetas)");

    m.def(
        "fit",
        [](const fctm::Corpus& c, std::size_t topics, double alpha, std::size_t em_iters,
           double rel_tol, std::uint64_t seed, std::size_t ofw_iters, double ofw_tol,
           double interior_eps, std::size_t threads, bool warm_start) {
            fctm::LearnConfig cfg;
            cfg.k = topics;
            cfg.alpha = alpha;
            cfg.max_em_iters = em_iters;
            cfg.learn_rel_tol = rel_tol;
            cfg.master_seed = seed;
            cfg.threads = threads;
            cfg.warm_start = warm_start;
            cfg.ofw = ofw_config(ofw_iters, ofw_tol, interior_eps, seed);
            fctm::LearnState state = [&] {
                py::gil_scoped_release release;
                return fctm::fit(c, cfg);
            }();
            py::dict d;
            d["model"] = std::move(state.model);
            d["thetas"] = thetas_2d(state.thetas);
            d["history"] = state.objective_history;
            d["uniform_reset_rows"] = state.uniform_reset_rows;
            return d;
        },
        py::arg("corpus"), py::arg("topics"), py::arg("alpha") = 1.0,
        py::arg("em_iters") = 100, py::arg("rel_tol") = 1e-3, py::arg("seed") = 0,
        py::arg("ofw_iters") = 100, py::arg("ofw_tol") = 1e-6,
        py::arg("interior_eps") = 1e-10, py::arg("threads") = 1,
        py::arg("warm_start") = false,
        "alternate per-document inference with closed-form parameter updates");

    m.def(
        "infer",
        [](const fctm::CtmModel& model, const fctm::Corpus& c, std::uint64_t seed,
           std::size_t ofw_iters, double ofw_tol, double interior_eps) {
            const fctm::OfwConfig base = ofw_config(ofw_iters, ofw_tol, interior_eps, seed);
            std::vector<fctm::ThetaMixture> thetas;
            {
                py::gil_scoped_release release;
                thetas.reserve(c.num_docs());
                for (std::size_t i = 0; i < c.num_docs(); ++i) {
                    fctm::OfwConfig oc = base;
                    oc.seed = fctm::derive_seed(seed, i);
                    thetas.push_back(fctm::ofw_infer(c.docs[i], model, oc).best_theta);
                }
            }
            return thetas_2d(thetas);
        },
        py::arg("model"), py::arg("corpus"), py::arg("seed") = 0, py::arg("ofw_iters") = 100,
        py::arg("ofw_tol") = 1e-6, py::arg("interior_eps") = 1e-10,
        "MAP topic mixture per document, one row each");

    m.def(
        "certificate",
        [](const fctm::CtmModel& model) { return certificate_dict(fctm::certificate(model.prior)); },
        py::arg("model"),
        "probability bound that the MAP objective is concave everywhere on the simplex");

    m.def(
        "prior_certificate",
        [](const DoubleArray& sigma, const py::object& mu) {
            return certificate_dict(fctm::certificate(prior_from(sigma, mu)));
        },
        py::arg("sigma"), py::arg("mu") = py::none(),
        "certificate for an explicit covariance over the log-ratio coordinates");

    m.def(
        "mc_concavity_rate",
        [](const DoubleArray& sigma, const py::object& mu, std::size_t samples,
           std::uint64_t seed) {
            const fctm::ConcavityRates r =
                fctm::mc_concavity_rate(prior_from(sigma, mu), samples, seed);
            py::dict d;
            d["hessian_nsd_rate"] = r.hessian_nsd_rate;
            d["lemma_rate"] = r.lemma_rate;
            return d;
        },
        py::arg("sigma"), py::arg("mu") = py::none(), py::arg("samples") = 10000,
        py::arg("seed") = 0, "point-wise concavity rates under the prior");

    m.def(
        "evaluate",
        [](const fctm::Corpus& test, const fctm::Corpus& reference,
           const fctm::CtmModel& model, std::size_t top_terms, std::uint64_t seed,
           std::size_t ofw_iters, double ofw_tol) {
            const fctm::EvalReport rep = fctm::evaluate(
                test, reference, model, ofw_config(ofw_iters, ofw_tol, 1e-10, seed), top_terms);
            py::dict d;
            d["mean_map_objective"] = rep.mean_map_objective;
            d["per_doc_values"] = vec_1d(rep.per_doc_values);
            d["coherence_per_topic"] = vec_1d(rep.coherence_per_topic);
            d["mean_coherence"] = rep.mean_coherence;
            d["top_terms"] = rep.top_terms;
            d["skipped_terms"] = rep.skipped_terms;
            return d;
        },
        py::arg("test"), py::arg("reference"), py::arg("model"), py::arg("top_terms") = 20,
        py::arg("seed") = 0, py::arg("ofw_iters") = 100, py::arg("ofw_tol") = 1e-6,
        "per-word MAP objective on test plus coherence against reference");

    m.def(
        "race",
        [](const fctm::CtmModel& model, const fctm::Corpus& c, std::uint64_t seed,
           std::size_t ofw_iters, double ofw_tol) {
            const fctm::RaceResult r = [&] {
                py::gil_scoped_release release;
                return fctm::race(c.docs, model, ofw_config(ofw_iters, ofw_tol, 1e-10, seed));
            }();
            py::dict d;
            d["wins"] = r.wins;
            d["ties"] = r.ties;
            d["losses"] = r.losses;
            fctm::Vec ofw_values, pga_values;
            for (const auto& row : r.rows) {
                ofw_values.push_back(row.ofw_value);
                pga_values.push_back(row.pga_value);
            }
            d["ofw_values"] = vec_1d(ofw_values);
            d["pga_values"] = vec_1d(pga_values);
            return d;
        },
        py::arg("model"), py::arg("corpus"), py::arg("seed") = 0, py::arg("ofw_iters") = 100,
        py::arg("ofw_tol") = 1e-6, "both solvers on every document, objective comparison");

    m.def(
        "graph_dot",
        [](const fctm::CtmModel& model, double threshold, std::size_t label_terms,
           const std::string& sign, bool mc, std::size_t samples, std::uint64_t seed,
           const py::object& corpus) {
            const fctm::Vocabulary* vocab = nullptr;
            if (!corpus.is_none()) vocab = &corpus.cast<const fctm::Corpus&>().vocab;
            const fctm::CorrelationGraph g =
                mc ? fctm::correlation_graph_mc(model, threshold, label_terms, samples, seed,
                                                vocab)
                   : fctm::correlation_graph(model, threshold, label_terms, vocab);
            const fctm::SignFilter filter = sign == "positive" ? fctm::SignFilter::positive
                                            : sign == "negative" ? fctm::SignFilter::negative
                                                                 : fctm::SignFilter::both;
            return fctm::to_dot(g, filter);
        },
        py::arg("model"), py::arg("threshold") = 0.3, py::arg("label_terms") = 3,
        py::arg("sign") = "both", py::arg("mc") = false, py::arg("samples") = 10000,
        py::arg("seed") = 0, py::arg("corpus") = py::none(),
        "topic correlation graph as DOT text");

    m.def(
        "save_model",
        [](const fctm::CtmModel& model, double alpha, std::uint64_t vocab_hash,
           const std::string& path) { fctm::save_model(model, alpha, vocab_hash, path); },
        py::arg("model"), py::arg("alpha"), py::arg("vocab_hash"), py::arg("path"));

    m.def(
        "load_model",
        [](const std::string& path) {
            fctm::LoadedModel lm = fctm::load_model(path);
            return py::make_tuple(std::move(lm.model), lm.alpha, lm.vocab_hash);
        },
        py::arg("path"), "returns (model, alpha, vocab_hash)");
}
