// Command-line front end: train / infer / eval / certify / mc / synth /
// race / graph. Exit codes: 0 success, 2 usage error, 3 numeric or model
// error. Every file-writing run also emits <out>.manifest.json with the
// resolved flags and input hashes; manifests carry the only timing fields,
// so the primary outputs are byte-stable under fixed flags and seeds.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fctm/corpus.hpp"
#include "fctm/errors.hpp"
#include "fctm/eval.hpp"
#include "fctm/export_graph.hpp"
#include "fctm/learner.hpp"
#include "fctm/logistic_normal.hpp"
#include "fctm/ofw.hpp"
#include "fctm/synth.hpp"
#include "fctm/version.hpp"

namespace {

using nlohmann::ordered_json;

std::uint64_t fnv64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fctm::InvalidArgument("cannot open input: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    for (;;) {
        in.read(buf, sizeof buf);
        const std::streamsize n = in.gcount();
        if (n <= 0) break;
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class Manifest {
public:
    explicit Manifest(std::string command) : start_(std::chrono::steady_clock::now()) {
        j_["format"] = "run-manifest";
        j_["toolkit_version"] = fctm::kVersion;
        j_["command"] = std::move(command);
        j_["flags"] = ordered_json::object();
        j_["inputs"] = ordered_json::object();
    }

    template <class T>
    void flag(const char* name, const T& value) {
        j_["flags"][name] = value;
    }

    void input(const char* name, const std::string& path) {
        ordered_json e;
        e["path"] = path;
        e["fnv64"] = hex64(fnv64_file(path));
        j_["inputs"][name] = e;
    }

    // writes next to the primary output it describes
    void write(const std::string& primary_output) {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        j_["wall_ms"] =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed)
                .count();
        const std::string path = primary_output + ".manifest.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw fctm::InvalidArgument("cannot write manifest: " + path);
        out << j_.dump(2) << '\n';
    }

private:
    ordered_json j_;
    std::chrono::steady_clock::time_point start_;
};

fctm::Corpus load_corpus_cli(const std::string& docword, const std::string& vocab) {
    fctm::LoadReport rep = fctm::load_uci_bow_files(docword, vocab);
    if (rep.dropped_empty_docs > 0)
        std::cerr << "note: dropped " << rep.dropped_empty_docs << " empty document(s)\n";
    return std::move(rep.corpus);
}

fctm::LoadedModel load_model_checked(const std::string& path, const fctm::Corpus& c) {
    fctm::LoadedModel lm = fctm::load_model(path);
    if (lm.vocab_hash != c.vocab.hash())
        throw fctm::ModelFormatError(
            "model vocabulary hash does not match the given vocabulary");
    return lm;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fctm::InvalidArgument("cannot write: " + path);
    out << text;
    if (!out) throw fctm::InvalidArgument("write failed: " + path);
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string theta_csv(const std::vector<fctm::ThetaMixture>& thetas) {
    if (thetas.empty()) return "doc_id\n";
    std::string out = "doc_id";
    for (std::size_t k = 0; k < thetas.front().k(); ++k)
        out += ",theta_" + std::to_string(k);
    out += '\n';
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        out += std::to_string(i);
        for (double v : thetas[i].theta) {
            out += ',';
            out += format_g17(v);
        }
        out += '\n';
    }
    return out;
}

ordered_json certificate_json(const fctm::ConcavityCertificate& cert) {
    ordered_json j;
    j["lambda_min_inv"] = cert.lambda_min_inv;
    j["sigma_max_diag"] = cert.sigma_max_diag;
    j["k"] = cert.k;
    j["applicable"] = cert.applicable;
    j["p_bound"] = cert.p_bound;
    j["vacuous"] = cert.vacuous();
    return j;
}

void print_certificate(const fctm::ConcavityCertificate& cert) {
    std::printf("certificate: lambda_min(Sigma^-1) = %.6g, max diag(Sigma^-1) = %.6g, K = %zu\n",
                cert.lambda_min_inv, cert.sigma_max_diag, cert.k);
    if (!cert.applicable) {
        std::printf("  not applicable: requires lambda_min(Sigma^-1) >= 1\n");
        return;
    }
    std::printf("  Pr(MAP objective concave on the simplex) >= %.6g%s\n", cert.p_bound,
                cert.vacuous() ? " (vacuous)" : "");
}

// {"sigma": [[...]], "mu": [...optional...]}
fctm::GaussianPrior prior_from_sigma_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fctm::InvalidArgument("cannot open sigma file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw fctm::InvalidArgument(std::string("sigma file is not valid JSON: ") + e.what());
    }
    const auto rows = j.at("sigma").get<std::vector<fctm::Vec>>();
    const std::size_t n = rows.size();
    if (n == 0) throw fctm::InvalidArgument("sigma file: empty matrix");
    fctm::SymMatrix sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw fctm::InvalidArgument("sigma file: matrix not square");
        for (std::size_t c = i; c < n; ++c) {
            if (rows[c][i] != rows[i][c])
                throw fctm::InvalidArgument("sigma file: matrix not symmetric");
            sigma.set(i, c, rows[i][c]);
        }
    }
    fctm::Vec mu(n, 0.0);
    if (j.contains("mu")) {
        mu = j.at("mu").get<fctm::Vec>();
        if (mu.size() != n) throw fctm::InvalidArgument("sigma file: mu length mismatch");
    }
    return fctm::GaussianPrior(std::move(mu), std::move(sigma));
}

struct OfwFlags {
    std::size_t iters = 100;
    double tol = 1e-6;
    double eps = 1e-10;

    fctm::OfwConfig to_config(std::uint64_t seed) const {
        fctm::OfwConfig c;
        c.max_iters = iters;
        c.rel_tol = tol;
        c.epsilon = eps;
        c.seed = seed;
        return c;
    }
};

void add_ofw_flags(CLI::App* sub, OfwFlags& f) {
    sub->add_option("--ofw-iters", f.iters, "inference iteration cap (default 100)");
    sub->add_option("--ofw-tol", f.tol, "inference stopping tolerance (default 1e-6)");
    sub->add_option("--interior-eps", f.eps,
                    "interior margin of the feasible simplex (default 1e-10)");
}

void record_ofw_flags(Manifest& man, const OfwFlags& f) {
    man.flag("ofw_iters", f.iters);
    man.flag("ofw_tol", f.tol);
    man.flag("interior_eps", f.eps);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlated topic models learned by alternating MAP inference"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fctm::kVersion);

    // train ---------------------------------------------------------------
    auto* train = app.add_subcommand("train", "fit a model on a bag-of-words corpus");
    struct {
        std::string corpus, vocab, out;
        std::size_t topics = 2;
        double alpha = 1.0;
        std::size_t em_iters = 100;
        double rel_tol = 1e-3;
        double beta_floor = 1e-12;
        std::uint64_t seed = 0;
        bool warm_start = false;
        std::size_t threads = 0;
        OfwFlags ofw;
    } tr;
    train->add_option("--corpus", tr.corpus, "docword file (UCI bag-of-words)")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--vocab", tr.vocab, "vocabulary file, one term per line")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--topics", tr.topics, "number of topics K")
        ->required()
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    train->add_option("--alpha", tr.alpha, "covariance regularizer (default 1)")
        ->check(CLI::PositiveNumber);
    train->add_option("--em-iters", tr.em_iters, "iteration cap (default 100)");
    train->add_option("--rel-tol", tr.rel_tol, "objective stopping tolerance (default 1e-3)");
    train->add_option("--beta-floor", tr.beta_floor,
                      "minimum topic-word probability (default 1e-12)");
    train->add_option("--seed", tr.seed, "master seed (default 0)");
    train->add_flag("--warm-start", tr.warm_start,
                    "reuse each document's previous mixture as the next start point");
    train->add_option("--threads", tr.threads, "worker cap (default: available parallelism)");
    train->add_option("--out", tr.out, "model output path")->required();
    add_ofw_flags(train, tr.ofw);
    train->callback([&tr] {
        Manifest man("train");
        man.input("corpus", tr.corpus);
        man.input("vocab", tr.vocab);
        man.flag("topics", tr.topics);
        man.flag("alpha", tr.alpha);
        man.flag("em_iters", tr.em_iters);
        man.flag("rel_tol", tr.rel_tol);
        man.flag("beta_floor", tr.beta_floor);
        man.flag("seed", tr.seed);
        man.flag("warm_start", tr.warm_start);
        man.flag("threads", tr.threads);
        man.flag("out", tr.out);
        record_ofw_flags(man, tr.ofw);

        const fctm::Corpus corpus = load_corpus_cli(tr.corpus, tr.vocab);
        fctm::LearnConfig cfg;
        cfg.k = tr.topics;
        cfg.alpha = tr.alpha;
        cfg.learn_rel_tol = tr.rel_tol;
        cfg.max_em_iters = tr.em_iters;
        cfg.beta_floor = tr.beta_floor;
        cfg.master_seed = tr.seed;
        cfg.warm_start = tr.warm_start;
        cfg.threads = tr.threads != 0 ? tr.threads
                                      : std::max(1u, std::thread::hardware_concurrency());
        cfg.ofw = tr.ofw.to_config(tr.seed);

        const fctm::LearnState state = fctm::fit(corpus, cfg);
        if (state.uniform_reset_rows > 0)
            std::cerr << "note: " << state.uniform_reset_rows
                      << " topic row(s) received no mass and were reset to uniform\n";

        fctm::save_model(state.model, cfg.alpha, corpus.vocab.hash(), tr.out);

        std::string hist = "iter,objective\n";
        for (std::size_t i = 0; i < state.objective_history.size(); ++i)
            hist += std::to_string(i + 1) + "," + format_g17(state.objective_history[i]) + "\n";
        write_text_file(tr.out + ".history.csv", hist);

        std::printf("documents: %zu, vocabulary: %zu\n", corpus.num_docs(), corpus.num_terms());
        std::printf("iterations: %zu, final objective: %.10g\n",
                    state.objective_history.size(),
                    state.objective_history.empty() ? 0.0 : state.objective_history.back());
        print_certificate(fctm::certificate(state.model.prior));
        std::printf("model written: %s\n", tr.out.c_str());
        man.write(tr.out);
    });

    // infer ---------------------------------------------------------------
    auto* infer = app.add_subcommand("infer", "MAP topic mixtures for each document");
    struct {
        std::string model, corpus, vocab, out;
        std::uint64_t seed = 0;
        OfwFlags ofw;
    } inf;
    infer->add_option("--model", inf.model, "model file")->required()->check(CLI::ExistingFile);
    infer->add_option("--corpus", inf.corpus, "docword file")
        ->required()
        ->check(CLI::ExistingFile);
    infer->add_option("--vocab", inf.vocab, "vocabulary file")
        ->required()
        ->check(CLI::ExistingFile);
    infer->add_option("--out", inf.out, "theta CSV output path")->required();
    infer->add_option("--seed", inf.seed, "seed (default 0)");
    add_ofw_flags(infer, inf.ofw);
    infer->callback([&inf] {
        Manifest man("infer");
        man.input("model", inf.model);
        man.input("corpus", inf.corpus);
        man.input("vocab", inf.vocab);
        man.flag("seed", inf.seed);
        man.flag("out", inf.out);
        record_ofw_flags(man, inf.ofw);

        const fctm::Corpus corpus = load_corpus_cli(inf.corpus, inf.vocab);
        const fctm::LoadedModel lm = load_model_checked(inf.model, corpus);
        const fctm::OfwConfig base = inf.ofw.to_config(inf.seed);
        std::vector<fctm::ThetaMixture> thetas;
        thetas.reserve(corpus.num_docs());
        for (std::size_t i = 0; i < corpus.num_docs(); ++i) {
            fctm::OfwConfig oc = base;
            oc.seed = fctm::derive_seed(inf.seed, i);
            thetas.push_back(fctm::ofw_infer(corpus.docs[i], lm.model, oc).best_theta);
        }
        write_text_file(inf.out, theta_csv(thetas));
        std::printf("wrote %zu mixture row(s): %s\n", thetas.size(), inf.out.c_str());
        man.write(inf.out);
    });

    // eval ----------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "held-out objective and topic coherence");
    struct {
        std::string model, corpus, vocab, ref_corpus, ref_vocab, out;
        std::size_t top_terms = 20;
        std::uint64_t seed = 0;
        OfwFlags ofw;
    } ev;
    eval->add_option("--model", ev.model, "model file")->required()->check(CLI::ExistingFile);
    eval->add_option("--corpus", ev.corpus, "held-out docword file")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--vocab", ev.vocab, "vocabulary file")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--ref-corpus", ev.ref_corpus,
                     "corpus supplying coherence document frequencies (default: --corpus)")
        ->check(CLI::ExistingFile);
    eval->add_option("--ref-vocab", ev.ref_vocab, "vocabulary of --ref-corpus")
        ->check(CLI::ExistingFile);
    eval->add_option("--top-terms", ev.top_terms, "terms per topic for coherence (default 20)")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    eval->add_option("--seed", ev.seed, "seed (default 0)");
    eval->add_option("--out", ev.out, "optional JSON report path");
    add_ofw_flags(eval, ev.ofw);
    eval->callback([&ev] {
        if (ev.ref_corpus.empty() != ev.ref_vocab.empty())
            throw CLI::ValidationError("eval",
                                       "--ref-corpus and --ref-vocab must be given together");
        Manifest man("eval");
        man.input("model", ev.model);
        man.input("corpus", ev.corpus);
        man.input("vocab", ev.vocab);
        man.flag("top_terms", ev.top_terms);
        man.flag("seed", ev.seed);
        record_ofw_flags(man, ev.ofw);

        const fctm::Corpus corpus = load_corpus_cli(ev.corpus, ev.vocab);
        const fctm::LoadedModel lm = load_model_checked(ev.model, corpus);
        fctm::Corpus ref;
        if (!ev.ref_corpus.empty()) {
            man.input("ref_corpus", ev.ref_corpus);
            man.input("ref_vocab", ev.ref_vocab);
            ref = load_corpus_cli(ev.ref_corpus, ev.ref_vocab);
            if (ref.vocab.hash() != corpus.vocab.hash())
                throw fctm::ModelFormatError("reference corpus uses a different vocabulary");
        }
        const fctm::Corpus& reference = ev.ref_corpus.empty() ? corpus : ref;

        const fctm::EvalReport rep = fctm::evaluate(corpus, reference, lm.model,
                                                    ev.ofw.to_config(ev.seed), ev.top_terms);
        if (rep.skipped_terms > 0)
            std::cerr << "note: " << rep.skipped_terms
                      << " top term(s) never occur in the reference corpus and were skipped\n";

        std::printf("mean per-word MAP objective: %.6f over %zu document(s)\n",
                    rep.mean_map_objective, rep.per_doc_values.size());
        std::printf("%-6s %12s  %s\n", "topic", "coherence", "top terms");
        for (std::size_t k = 0; k < rep.coherence_per_topic.size(); ++k) {
            std::string terms;
            for (std::size_t t : rep.top_terms[k]) {
                if (!terms.empty()) terms += ' ';
                terms += corpus.vocab.terms[t];
            }
            std::printf("%-6zu %12.4f  %s\n", k, rep.coherence_per_topic[k], terms.c_str());
        }
        std::printf("mean coherence: %.4f\n", rep.mean_coherence);

        if (!ev.out.empty()) {
            ordered_json j;
            j["format"] = "eval-report";
            j["toolkit_version"] = fctm::kVersion;
            j["mean_map_objective"] = rep.mean_map_objective;
            j["per_doc_values"] = rep.per_doc_values;
            j["coherence_per_topic"] = rep.coherence_per_topic;
            j["mean_coherence"] = rep.mean_coherence;
            j["top_terms"] = rep.top_terms;
            std::vector<std::vector<std::string>> words;
            for (const auto& ids : rep.top_terms) {
                words.emplace_back();
                for (std::size_t t : ids) words.back().push_back(corpus.vocab.terms[t]);
            }
            j["top_term_words"] = words;
            j["skipped_terms"] = rep.skipped_terms;
            write_text_file(ev.out, j.dump(2) + "\n");
            man.flag("out", ev.out);
            man.write(ev.out);
        }
    });

    // certify ---------------------------------------------------------------
    auto* certify = app.add_subcommand(
        "certify", "probability bound that the MAP objective is concave everywhere");
    struct {
        std::string model, sigma_file, out;
    } ce;
    auto* ce_model =
        certify->add_option("--model", ce.model, "model file")->check(CLI::ExistingFile);
    auto* ce_sigma = certify
                         ->add_option("--sigma-file", ce.sigma_file,
                                      "JSON {\"sigma\": [[...]], \"mu\": [...]} (mu optional)")
                         ->check(CLI::ExistingFile);
    ce_model->excludes(ce_sigma);
    certify->add_option("--out", ce.out, "optional JSON report path");
    certify->callback([&ce] {
        if (ce.model.empty() == ce.sigma_file.empty())
            throw CLI::ValidationError("certify",
                                       "exactly one of --model, --sigma-file is required");
        Manifest man("certify");
        fctm::ConcavityCertificate cert{0, 0, 0, false, 0};
        if (!ce.model.empty()) {
            man.input("model", ce.model);
            cert = fctm::certificate(fctm::load_model(ce.model).model.prior);
        } else {
            man.input("sigma_file", ce.sigma_file);
            cert = fctm::certificate(prior_from_sigma_file(ce.sigma_file));
        }
        const ordered_json j = certificate_json(cert);
        std::printf("%s\n", j.dump(2).c_str());
        if (!ce.out.empty()) {
            write_text_file(ce.out, j.dump(2) + "\n");
            man.flag("out", ce.out);
            man.write(ce.out);
        }
    });

    // mc --------------------------------------------------------------------
    auto* mc = app.add_subcommand(
        "mc", "Monte-Carlo checks: point-wise concavity rates or the tail bound");
    struct {
        std::string model, sigma_file, out;
        std::size_t samples = 10000;
        std::uint64_t seed = 0;
        bool thm45 = false;
        std::size_t dim = 4;
        double s_scale = 5.0;
    } mcf;
    auto* mc_model = mc->add_option("--model", mcf.model, "model file")->check(CLI::ExistingFile);
    auto* mc_sigma =
        mc->add_option("--sigma-file", mcf.sigma_file, "JSON prior instead of a model")
            ->check(CLI::ExistingFile);
    auto* mc_thm = mc->add_flag(
        "--tail-bound", mcf.thm45,
        "validate the random-matrix tail bound with S = s-scale * I, A = I instead");
    mc_model->excludes(mc_sigma)->excludes(mc_thm);
    mc_sigma->excludes(mc_thm);
    mc->add_option("--samples", mcf.samples, "sample count (default 10000)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
    mc->add_option("--seed", mcf.seed, "seed (default 0)");
    mc->add_option("--dim", mcf.dim, "tail-bound matrix dimension (default 4)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{10000}));
    mc->add_option("--s-scale", mcf.s_scale, "tail-bound S = s-scale * I (default 5)");
    mc->add_option("--out", mcf.out, "optional JSON output path");
    mc->callback([&mcf] {
        if (!mcf.thm45 && mcf.model.empty() && mcf.sigma_file.empty())
            throw CLI::ValidationError(
                "mc", "one of --model, --sigma-file, --tail-bound is required");
        Manifest man("mc");
        man.flag("samples", mcf.samples);
        man.flag("seed", mcf.seed);
        ordered_json j;
        j["toolkit_version"] = fctm::kVersion;
        if (mcf.thm45) {
            man.flag("dim", mcf.dim);
            man.flag("s_scale", mcf.s_scale);
            fctm::RandomMatrixExperiment exp;
            exp.s_mat = fctm::SymMatrix::diagonal(fctm::Vec(mcf.dim, mcf.s_scale));
            exp.cov_a = fctm::SymMatrix::identity(mcf.dim);
            exp.n_samples = mcf.samples;
            exp.seed = mcf.seed;
            const fctm::TailValidation res = fctm::mc_validate_thm45(exp);
            j["mode"] = "tail-bound";
            j["dim"] = mcf.dim;
            j["s_scale"] = mcf.s_scale;
            j["samples"] = mcf.samples;
            j["seed"] = mcf.seed;
            j["empirical_conditional_rate"] = res.empirical_conditional_rate;
            j["bound"] = res.bound;
            j["n_conditioned"] = res.n_conditioned;
        } else {
            fctm::GaussianPrior prior = [&mcf] {
                if (!mcf.model.empty()) return fctm::load_model(mcf.model).model.prior;
                return prior_from_sigma_file(mcf.sigma_file);
            }();
            if (!mcf.model.empty()) man.input("model", mcf.model);
            if (!mcf.sigma_file.empty()) man.input("sigma_file", mcf.sigma_file);
            const fctm::ConcavityRates rates =
                fctm::mc_concavity_rate(prior, mcf.samples, mcf.seed);
            j["mode"] = "concavity-rate";
            j["k"] = prior.dim_k();
            j["samples"] = mcf.samples;
            j["seed"] = mcf.seed;
            j["hessian_nsd_rate"] = rates.hessian_nsd_rate;
            j["lemma_rate"] = rates.lemma_rate;
        }
        std::printf("%s\n", j.dump(2).c_str());
        if (!mcf.out.empty()) {
            write_text_file(mcf.out, j.dump(2) + "\n");
            man.flag("out", mcf.out);
            man.write(mcf.out);
        }
    });

    // synth -------------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "sample a corpus from the generative process");
    struct {
        std::size_t topics = 3;
        std::size_t vocab_size = 20;
        std::size_t docs = 100;
        std::size_t words = 100;
        double poisson_mean = 0.0;
        std::uint64_t seed = 0;
        std::string model, out;
    } sy;
    synth->add_option("--topics", sy.topics, "topics of the planted model (default 3)")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    synth->add_option("--vocab-size", sy.vocab_size, "vocabulary size (default 20)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{10000000}));
    synth->add_option("--docs", sy.docs, "documents to sample (default 100)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    auto* sy_words =
        synth->add_option("--words", sy.words, "words per document, fixed (default 100)")
            ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    auto* sy_poisson =
        synth
            ->add_option("--poisson-mean", sy.poisson_mean,
                         "Poisson words per document with this mean instead of --words")
            ->check(CLI::PositiveNumber);
    sy_words->excludes(sy_poisson);
    auto* sy_model =
        synth->add_option("--model", sy.model, "sample from this model instead of a planted one")
            ->check(CLI::ExistingFile);
    sy_model->excludes(synth->get_option("--topics"))
        ->excludes(synth->get_option("--vocab-size"));
    synth->add_option("--seed", sy.seed, "seed (default 0)");
    synth->add_option("--out", sy.out, "output prefix (writes <out>.docword.txt etc.)")
        ->required();
    synth->callback([&sy] {
        Manifest man("synth");
        man.flag("docs", sy.docs);
        man.flag("seed", sy.seed);
        man.flag("out", sy.out);

        fctm::GenConfig cfg{
            sy.model.empty() ? fctm::planted_model(sy.topics, sy.vocab_size)
                             : fctm::load_model(sy.model).model,
            sy.docs, fctm::WordsPerDoc{}, sy.seed};
        if (sy.model.empty()) {
            man.flag("topics", sy.topics);
            man.flag("vocab_size", sy.vocab_size);
        } else {
            man.input("model", sy.model);
        }
        if (sy.poisson_mean > 0.0) {
            cfg.words_per_doc = {fctm::WordsPerDoc::Kind::poisson, sy.poisson_mean};
            man.flag("poisson_mean", sy.poisson_mean);
        } else {
            cfg.words_per_doc = {fctm::WordsPerDoc::Kind::fixed,
                                 static_cast<double>(sy.words)};
            man.flag("words", sy.words);
        }

        const fctm::SampledCorpus sampled = fctm::sample_corpus(cfg);
        fctm::save_uci_bow_files(sampled.corpus, sy.out + ".docword.txt",
                                 sy.out + ".vocab.txt");
        write_text_file(sy.out + ".theta.csv", theta_csv(sampled.planted));
        std::printf("sampled %zu document(s) over %zu term(s): %s.docword.txt\n",
                    sampled.corpus.num_docs(), sampled.corpus.num_terms(), sy.out.c_str());
        man.write(sy.out);
    });

    // race ---------------------------------------------------------------------
    auto* race_cmd = app.add_subcommand(
        "race", "solve every document with both solvers and compare objectives");
    struct {
        std::string model, corpus, vocab, out;
        std::uint64_t seed = 0;
        OfwFlags ofw;
    } ra;
    race_cmd->add_option("--model", ra.model, "model file")
        ->required()
        ->check(CLI::ExistingFile);
    race_cmd->add_option("--corpus", ra.corpus, "docword file")
        ->required()
        ->check(CLI::ExistingFile);
    race_cmd->add_option("--vocab", ra.vocab, "vocabulary file")
        ->required()
        ->check(CLI::ExistingFile);
    race_cmd->add_option("--seed", ra.seed, "seed (default 0)");
    race_cmd->add_option("--out", ra.out, "optional JSON output path");
    add_ofw_flags(race_cmd, ra.ofw);
    race_cmd->callback([&ra] {
        Manifest man("race");
        man.input("model", ra.model);
        man.input("corpus", ra.corpus);
        man.input("vocab", ra.vocab);
        man.flag("seed", ra.seed);
        record_ofw_flags(man, ra.ofw);

        const fctm::Corpus corpus = load_corpus_cli(ra.corpus, ra.vocab);
        const fctm::LoadedModel lm = load_model_checked(ra.model, corpus);
        const fctm::RaceResult res =
            fctm::race(corpus.docs, lm.model, ra.ofw.to_config(ra.seed));

        std::printf("%-6s %16s %16s %10s %10s\n", "doc", "stochastic", "proj-gradient",
                    "st ms", "pg ms");
        for (std::size_t i = 0; i < res.rows.size(); ++i) {
            const auto& r = res.rows[i];
            std::printf("%-6zu %16.6f %16.6f %10.3f %10.3f\n", i, r.ofw_value, r.pga_value,
                        r.ofw_ms, r.pga_ms);
        }
        std::printf("summary: better %zu / tied %zu / worse %zu (of %zu)\n", res.wins,
                    res.ties, res.losses, res.rows.size());

        if (!ra.out.empty()) {
            ordered_json j;
            j["format"] = "race-report";
            j["toolkit_version"] = fctm::kVersion;
            j["wins"] = res.wins;
            j["ties"] = res.ties;
            j["losses"] = res.losses;
            ordered_json rows = ordered_json::array();
            for (const auto& r : res.rows) {
                ordered_json row;
                row["ofw_value"] = r.ofw_value;
                row["pga_value"] = r.pga_value;
                row["ofw_ms"] = r.ofw_ms;
                row["pga_ms"] = r.pga_ms;
                row["ofw_feasible"] = r.ofw_feasible;
                row["pga_feasible"] = r.pga_feasible;
                rows.push_back(row);
            }
            j["rows"] = rows;
            write_text_file(ra.out, j.dump(2) + "\n");
            man.flag("out", ra.out);
            man.write(ra.out);
        }
    });

    // graph ----------------------------------------------------------------------
    auto* graph = app.add_subcommand("graph", "topic correlation graph in DOT format");
    struct {
        std::string model, vocab, sign = "both", out;
        double threshold = 0.3;
        std::size_t label_terms = 3;
        bool mc_mode = false;
        std::size_t samples = 10000;
        std::uint64_t seed = 0;
    } gr;
    graph->add_option("--model", gr.model, "model file")->required()->check(CLI::ExistingFile);
    graph->add_option("--vocab", gr.vocab, "vocabulary file for node labels")
        ->check(CLI::ExistingFile);
    graph->add_option("--threshold", gr.threshold, "minimum |correlation| (default 0.3)");
    graph->add_option("--sign", gr.sign, "positive, negative, or both (default both)")
        ->check(CLI::IsMember({"positive", "negative", "both"}));
    graph->add_option("--label-terms", gr.label_terms, "terms per node label (default 3)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
    graph->add_flag("--mc", gr.mc_mode,
                    "estimate correlations of the topic proportions themselves by sampling");
    graph->add_option("--samples", gr.samples, "samples for --mc (default 10000)")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000000000}));
    graph->add_option("--seed", gr.seed, "seed for --mc (default 0)");
    graph->add_option("--out", gr.out, "DOT output path (default: stdout)");
    graph->callback([&gr] {
        if (!(gr.threshold > 0.0) || !(gr.threshold < 1.0))
            throw CLI::ValidationError("graph", "--threshold must lie strictly in (0, 1)");
        Manifest man("graph");
        man.input("model", gr.model);
        man.flag("threshold", gr.threshold);
        man.flag("sign", gr.sign);
        man.flag("label_terms", gr.label_terms);
        man.flag("mc", gr.mc_mode);

        const fctm::LoadedModel lm = fctm::load_model(gr.model);
        fctm::Vocabulary vocab;
        const fctm::Vocabulary* vocab_ptr = nullptr;
        if (!gr.vocab.empty()) {
            man.input("vocab", gr.vocab);
            std::ifstream vin(gr.vocab, std::ios::binary);
            std::vector<std::string> terms;
            std::string line;
            while (std::getline(vin, line)) terms.push_back(line);
            vocab = fctm::Vocabulary::from_terms(std::move(terms));
            if (vocab.hash() != lm.vocab_hash)
                throw fctm::ModelFormatError(
                    "model vocabulary hash does not match the given vocabulary");
            vocab_ptr = &vocab;
        }

        const fctm::CorrelationGraph g =
            gr.mc_mode ? fctm::correlation_graph_mc(lm.model, gr.threshold, gr.label_terms,
                                                    gr.samples, gr.seed, vocab_ptr)
                       : fctm::correlation_graph(lm.model, gr.threshold, gr.label_terms,
                                                 vocab_ptr);
        if (gr.mc_mode) {
            man.flag("samples", gr.samples);
            man.flag("seed", gr.seed);
        }
        const fctm::SignFilter filter = gr.sign == "positive" ? fctm::SignFilter::positive
                                        : gr.sign == "negative" ? fctm::SignFilter::negative
                                                                : fctm::SignFilter::both;
        const std::string dot = fctm::to_dot(g, filter);
        if (gr.out.empty()) {
            std::fputs(dot.c_str(), stdout);
        } else {
            write_text_file(gr.out, dot);
            std::printf("graph written: %s (%zu node(s), %zu edge(s))\n", gr.out.c_str(),
                        g.nodes.size(), g.edges.size());
            man.flag("out", gr.out);
            man.write(gr.out);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
