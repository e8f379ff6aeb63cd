#include "fctm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fctm/errors.hpp"

namespace fctm {

void WordsPerDoc::validate() const {
    if (!(mean >= 1.0) || !std::isfinite(mean))
        throw InvalidArgument("WordsPerDoc: mean must be at least 1");
    if (kind == Kind::fixed && mean != std::floor(mean))
        throw InvalidArgument("WordsPerDoc: fixed count must be an integer");
}

ThetaMixture softmax_natural(const Vec& x, double epsilon) {
    if (x.empty()) throw InvalidArgument("softmax_natural: empty input");
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidArgument("softmax_natural: non-finite input");
    const double shift = *std::max_element(x.begin(), x.end());
    Vec theta(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        theta[i] = std::exp(x[i] - shift);
        total += theta[i];
    }
    for (auto& t : theta) t /= total;
    // clamp into the interior; rescaling only the slack above the floor
    // keeps clamped coordinates at exactly epsilon
    const double target = 1.0 - epsilon * static_cast<double>(theta.size());
    if (!(target > 0.0)) throw InvalidArgument("softmax_natural: epsilon too large");
    double slack = 0.0;
    for (auto& t : theta) {
        t = std::max(t, epsilon);
        slack += t - epsilon;
    }
    for (auto& t : theta) t = epsilon + (t - epsilon) * (target / slack);
    return ThetaMixture{std::move(theta), epsilon};
}

ThetaMixture sample_theta(const GaussianPrior& prior, Rng& rng) {
    const std::size_t km1 = prior.dim_k() - 1;
    Vec z(km1);
    for (auto& v : z) v = rng.normal();
    Vec g = prior.sigma_chol().multiply(z);
    for (std::size_t i = 0; i < km1; ++i) g[i] += prior.mu()[i];
    g.push_back(0.0);
    return softmax_natural(g, 1e-10);
}

std::size_t sample_poisson(double mean, Rng& rng) {
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw InvalidArgument("sample_poisson: mean must be positive");
    if (mean > 700.0)
        throw InvalidArgument("sample_poisson: mean too large for the product method");
    const double limit = std::exp(-mean);
    std::size_t n = 0;
    double p = 1.0;
    for (;;) {
        p *= rng.uniform();
        if (p <= limit) return n;
        ++n;
    }
}

Vocabulary synthetic_vocabulary(std::size_t v) {
    if (v == 0) throw InvalidArgument("synthetic_vocabulary: need at least one term");
    std::size_t width = 1;
    for (std::size_t top = v - 1; top >= 10; top /= 10) ++width;
    std::vector<std::string> terms;
    terms.reserve(v);
    for (std::size_t i = 0; i < v; ++i) {
        std::string digits = std::to_string(i);
        terms.push_back("w" + std::string(width - digits.size(), '0') + digits);
    }
    return Vocabulary::from_terms(std::move(terms));
}

namespace {

// index of the first cumulative bucket exceeding r; cum is nondecreasing
// ending at ~1
std::size_t pick(const Vec& cum, double r) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), r);
    if (it == cum.end()) return cum.size() - 1;
    return static_cast<std::size_t>(it - cum.begin());
}

Vec cumulative(const Vec& p) {
    Vec cum(p.size());
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += p[i];
        cum[i] = s;
    }
    return cum;
}

}  // namespace

SampledCorpus sample_corpus(const GenConfig& cfg) {
    if (cfg.docs == 0) throw InvalidArgument("sample_corpus: need at least one document");
    cfg.words_per_doc.validate();
    cfg.model.beta.validate(0.0);
    const std::size_t k = cfg.model.beta.k;
    const std::size_t v = cfg.model.beta.v;
    if (cfg.model.prior.dim_k() != k)
        throw InvalidArgument("sample_corpus: prior dimension does not match beta");

    std::vector<Vec> beta_cum;
    beta_cum.reserve(k);
    for (const auto& row : cfg.model.beta.rows) beta_cum.push_back(cumulative(row));

    SampledCorpus out;
    out.corpus.vocab = synthetic_vocabulary(v);
    out.corpus.docs.reserve(cfg.docs);
    out.planted.reserve(cfg.docs);

    for (std::size_t d = 0; d < cfg.docs; ++d) {
        Rng rng(derive_seed(cfg.seed, d));
        ThetaMixture theta = sample_theta(cfg.model.prior, rng);
        const Vec theta_cum = cumulative(theta.theta);

        std::size_t n;
        if (cfg.words_per_doc.kind == WordsPerDoc::Kind::fixed) {
            n = static_cast<std::size_t>(cfg.words_per_doc.mean);
        } else {
            do {
                n = sample_poisson(cfg.words_per_doc.mean, rng);
            } while (n == 0);
        }

        std::map<std::size_t, double> counts;
        for (std::size_t w = 0; w < n; ++w) {
            const std::size_t topic = pick(theta_cum, rng.uniform());
            const std::size_t term = pick(beta_cum[topic], rng.uniform());
            counts[term] += 1.0;
        }
        Document doc;
        doc.entries.reserve(counts.size());
        for (const auto& [term, count] : counts) {
            doc.entries.push_back(DocEntry{term, count});
            doc.total_count += count;
        }
        out.corpus.docs.push_back(std::move(doc));
        out.planted.push_back(std::move(theta));
    }
    return out;
}

CtmModel planted_model(std::size_t k, std::size_t v) {
    if (k < 2) throw InvalidArgument("planted_model: need at least two topics");
    if (v < k) throw InvalidArgument("planted_model: need at least one term per topic");
    TopicMatrix beta;
    beta.k = k;
    beta.v = v;
    beta.rows.assign(k, Vec(v, 0.0));
    // contiguous slices of near-equal size; 90% of the mass inside the slice
    const std::size_t base = v / k;
    const std::size_t extra = v % k;
    std::size_t start = 0;
    for (std::size_t kk = 0; kk < k; ++kk) {
        const std::size_t len = base + (kk < extra ? 1 : 0);
        const double inside = 0.9 / static_cast<double>(len);
        const double outside = 0.1 / static_cast<double>(v - len);
        for (std::size_t j = 0; j < v; ++j)
            beta.rows[kk][j] = (j >= start && j < start + len) ? inside : outside;
        start += len;
    }
    beta.validate(0.0);
    // a wide prior concentrates sampled mixtures near single topics, which is
    // what makes the planted structure recoverable from the documents
    return CtmModel{std::move(beta),
                    GaussianPrior(Vec(k - 1, 0.0), SymMatrix::diagonal(Vec(k - 1, 256.0)))};
}

}  // namespace fctm
