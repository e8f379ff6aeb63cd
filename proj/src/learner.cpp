#include "fctm/learner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "fctm/errors.hpp"
#include "fctm/rng.hpp"
#include "json.hpp"

namespace fctm {

namespace {

// Seed stream for model initialization. Document streams are the document
// indices, so this stays clear of any realistic corpus size.
constexpr std::uint64_t kInitStream = 0x696e6974ULL;

// Raises every entry of a positive-sum row to at least `floor` while keeping
// it a probability vector: low entries are pinned at the floor, the rest
// rescaled to the remaining mass. Rescaling can push further entries under
// the floor, so the low set grows until stable (at most a handful of passes;
// usually zero or one).
void floor_and_normalize(Vec& row, double floor) {
    const std::size_t v = row.size();
    double s = 0.0;
    for (double x : row) s += x;
    for (auto& x : row) x /= s;
    std::vector<char> low(v, 0);
    for (;;) {
        double high_mass = 0.0;
        std::size_t n_low = 0;
        for (std::size_t i = 0; i < v; ++i) {
            if (low[i]) {
                ++n_low;
            } else {
                high_mass += row[i];
            }
        }
        if (n_low == v || !(high_mass > 0.0)) {
            // only reachable for floors close to 1/V; uniform satisfies both invariants
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(v));
            return;
        }
        const double target = 1.0 - static_cast<double>(n_low) * floor;
        const double scale = target / high_mass;
        bool changed = false;
        for (std::size_t i = 0; i < v; ++i) {
            if (!low[i] && row[i] * scale < floor) {
                low[i] = 1;
                changed = true;
            }
        }
        if (changed) continue;
        for (std::size_t i = 0; i < v; ++i) row[i] = low[i] ? floor : row[i] * scale;
        return;
    }
}

double objective_of(const CtmModel& model, const std::vector<ThetaMixture>& thetas,
                    const Corpus& c, double alpha) {
    const std::size_t m = c.num_docs();
    const auto& prior = model.prior;
    const std::size_t km1 = prior.dim_k() - 1;
    double total = 0.0;
    for (std::size_t d = 0; d < m; ++d) {
        total += likelihood_value(thetas[d], c.docs[d], model.beta);
        Vec q = log_tilde(thetas[d]);
        for (std::size_t i = 0; i < km1; ++i) q[i] -= prior.mu()[i];
        total -= 0.5 * prior.sigma_inv().quad_form(q);
    }
    const double md = static_cast<double>(m);
    total -= 0.5 * md * prior.log_det_sigma();
    total -= 0.5 * md * alpha * prior.sigma_inv().trace();
    return total;
}

}  // namespace

void LearnConfig::validate(std::size_t v) const {
    if (k < 2) throw InvalidArgument("LearnConfig: k must be at least 2");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw InvalidArgument("LearnConfig: alpha must be positive and finite");
    if (!(learn_rel_tol > 0.0) || !std::isfinite(learn_rel_tol))
        throw InvalidArgument("LearnConfig: learn_rel_tol must be positive");
    if (max_em_iters == 0) throw InvalidArgument("LearnConfig: max_em_iters must be positive");
    if (v == 0) throw InvalidArgument("LearnConfig: vocabulary is empty");
    if (!(beta_floor > 0.0) || !(beta_floor < 1.0 / static_cast<double>(v)))
        throw InvalidArgument("LearnConfig: beta_floor must lie in (0, 1/V)");
    if (threads == 0) throw InvalidArgument("LearnConfig: threads must be positive");
}

double regularized_objective(const LearnState& state, const Corpus& c,
                             const LearnConfig& cfg) {
    if (state.thetas.size() != c.num_docs())
        throw InvalidArgument("regularized_objective: thetas/corpus size mismatch");
    return objective_of(state.model, state.thetas, c, cfg.alpha);
}

std::vector<ThetaMixture> e_step(const Corpus& c, const CtmModel& model,
                                 const LearnConfig& cfg,
                                 const std::vector<ThetaMixture>* warm) {
    const std::size_t m = c.num_docs();
    if (model.beta.v != c.num_terms())
        throw InvalidArgument("e_step: model vocabulary size does not match corpus");
    if (warm && warm->size() != m)
        throw InvalidArgument("e_step: warm-start mixture count does not match corpus");

    std::vector<ThetaMixture> out(m);
    std::atomic<std::size_t> next{0};
    std::mutex err_lock;
    std::size_t err_doc = std::numeric_limits<std::size_t>::max();
    std::string err_msg;

    auto run_doc = [&](std::size_t i) {
        const TwoPartObjective parts = map_parts(c.docs[i], model);
        OfwConfig oc = cfg.ofw;
        oc.seed = derive_seed(cfg.master_seed, i);
        const Vec* init = warm ? &(*warm)[i].theta : nullptr;
        OfwTrace tr = ofw_maximize(parts, model.beta.k, oc, init);
        out[i] = std::move(tr.best_theta);
    };

    const std::size_t n_threads =
        std::min(std::max<std::size_t>(cfg.threads, 1), std::max<std::size_t>(m, 1));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < m; ++i) {
            try {
                run_doc(i);
            } catch (const std::exception& e) {
                throw std::runtime_error("e_step: document " + std::to_string(i) + ": " + e.what());
            }
        }
        return out;
    }

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= m) return;
            try {
                run_doc(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> g(err_lock);
                if (i < err_doc) {
                    err_doc = i;
                    err_msg = e.what();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err_doc != std::numeric_limits<std::size_t>::max())
        throw std::runtime_error("e_step: document " + std::to_string(err_doc) + ": " + err_msg);
    return out;
}

CtmModel m_step(const Corpus& c, const std::vector<ThetaMixture>& thetas,
                const LearnConfig& cfg, std::size_t* uniform_rows) {
    const std::size_t m = c.num_docs();
    if (m == 0) throw InvalidArgument("m_step: empty corpus");
    if (thetas.size() != m) throw InvalidArgument("m_step: thetas/corpus size mismatch");
    const std::size_t v = c.num_terms();
    cfg.validate(v);
    const std::size_t k = cfg.k;
    for (const auto& t : thetas)
        if (t.k() != k) throw InvalidArgument("m_step: mixture dimension does not match cfg.k");

    // topic rows: beta_kj from sum_d d_j theta_dk, then floored probability rows
    TopicMatrix beta;
    beta.k = k;
    beta.v = v;
    beta.rows.assign(k, Vec(v, 0.0));
    for (std::size_t d = 0; d < m; ++d) {
        for (const auto& e : c.docs[d].entries) {
            for (std::size_t kk = 0; kk < k; ++kk)
                beta.rows[kk][e.term] += e.count * thetas[d].theta[kk];
        }
    }
    std::size_t resets = 0;
    for (auto& row : beta.rows) {
        double s = 0.0;
        for (double x : row) s += x;
        if (!(s > 0.0) || !std::isfinite(s)) {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(v));
            ++resets;
            continue;
        }
        floor_and_normalize(row, cfg.beta_floor);
    }
    beta.validate(cfg.beta_floor);

    // prior mean: average log-ratio vector
    const std::size_t km1 = k - 1;
    std::vector<Vec> lt(m);
    Vec mu(km1, 0.0);
    for (std::size_t d = 0; d < m; ++d) {
        lt[d] = log_tilde(thetas[d]);
        for (std::size_t i = 0; i < km1; ++i) mu[i] += lt[d][i];
    }
    for (auto& x : mu) x /= static_cast<double>(m);

    // covariance: alpha I plus the centered scatter / M; SPD by construction
    SymMatrix sigma(km1);
    for (std::size_t d = 0; d < m; ++d) {
        Vec q = lt[d];
        for (std::size_t i = 0; i < km1; ++i) q[i] -= mu[i];
        for (std::size_t i = 0; i < km1; ++i)
            for (std::size_t j = i; j < km1; ++j) sigma.add(i, j, q[i] * q[j]);
    }
    for (std::size_t i = 0; i < km1; ++i)
        for (std::size_t j = i; j < km1; ++j)
            sigma.set(i, j, sigma(i, j) / static_cast<double>(m) + (i == j ? cfg.alpha : 0.0));

    if (uniform_rows) *uniform_rows = resets;
    return CtmModel{std::move(beta), GaussianPrior(std::move(mu), std::move(sigma))};
}

CtmModel init_model(std::size_t v, const LearnConfig& cfg) {
    cfg.validate(v);
    Rng rng(derive_seed(cfg.master_seed, kInitStream));
    TopicMatrix beta;
    beta.k = cfg.k;
    beta.v = v;
    beta.rows.assign(cfg.k, Vec(v, 0.0));
    for (auto& row : beta.rows) {
        // normalized unit exponentials: a flat Dirichlet draw
        for (auto& x : row) x = -std::log1p(-rng.uniform());
        floor_and_normalize(row, cfg.beta_floor);
    }
    beta.validate(cfg.beta_floor);
    Vec mu(cfg.k - 1, 0.0);
    return CtmModel{std::move(beta), GaussianPrior(std::move(mu), SymMatrix::identity(cfg.k - 1))};
}

LearnState fit(const Corpus& c, const LearnConfig& cfg, const CtmModel* init) {
    if (c.num_docs() == 0) throw InvalidArgument("fit: empty corpus");
    cfg.validate(c.num_terms());
    CtmModel model = init ? *init : init_model(c.num_terms(), cfg);
    if (model.beta.k != cfg.k || model.beta.v != c.num_terms())
        throw InvalidArgument("fit: initial model shape does not match corpus/cfg");

    std::vector<ThetaMixture> thetas;
    Vec history;
    std::size_t last_resets = 0;
    double prev = 0.0;
    for (std::size_t iter = 0; iter < cfg.max_em_iters; ++iter) {
        const std::vector<ThetaMixture>* warm =
            (cfg.warm_start && !thetas.empty()) ? &thetas : nullptr;
        thetas = e_step(c, model, cfg, warm);
        model = m_step(c, thetas, cfg, &last_resets);
        const double value = objective_of(model, thetas, c, cfg.alpha);
        if (!std::isfinite(value))
            throw DegenerateMixture("fit: objective is not finite");
        history.push_back(value);
        if (iter > 0) {
            const double rel = std::abs(value - prev) /
                               std::max(std::abs(prev), std::numeric_limits<double>::min());
            if (rel < cfg.learn_rel_tol) break;
        }
        prev = value;
    }
    return LearnState{std::move(model), std::move(thetas), std::move(history), last_resets};
}

void save_model(const CtmModel& m, double alpha, std::uint64_t vocab_hash,
                const std::string& path) {
    nlohmann::ordered_json j;
    j["format"] = "ctm-model";
    j["version"] = 1;
    j["k"] = m.beta.k;
    j["v"] = m.beta.v;
    j["alpha"] = alpha;
    j["vocab_hash"] = vocab_hash;
    j["beta"] = m.beta.rows;
    j["mu"] = m.prior.mu();
    const std::size_t km1 = m.prior.dim_k() - 1;
    std::vector<Vec> sig(km1, Vec(km1, 0.0));
    for (std::size_t i = 0; i < km1; ++i)
        for (std::size_t jj = 0; jj < km1; ++jj) sig[i][jj] = m.prior.sigma()(i, jj);
    j["sigma"] = sig;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelFormatError("cannot open model file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw ModelFormatError("write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelFormatError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "ctm-model")
            throw ModelFormatError("not a model file (unexpected format tag)");
        if (j.at("version").get<int>() != 1)
            throw ModelFormatError("unsupported model file version");
        const auto k = j.at("k").get<std::size_t>();
        const auto v = j.at("v").get<std::size_t>();
        if (k < 2 || v == 0) throw ModelFormatError("model dimensions out of range");

        TopicMatrix beta;
        beta.k = k;
        beta.v = v;
        beta.rows = j.at("beta").get<std::vector<Vec>>();
        if (beta.rows.size() != k) throw ModelFormatError("beta row count mismatch");
        for (const auto& row : beta.rows)
            if (row.size() != v) throw ModelFormatError("beta row length mismatch");
        beta.validate(0.0);

        Vec mu = j.at("mu").get<Vec>();
        if (mu.size() != k - 1) throw ModelFormatError("mu length mismatch");
        const auto sig_rows = j.at("sigma").get<std::vector<Vec>>();
        if (sig_rows.size() != k - 1) throw ModelFormatError("sigma row count mismatch");
        SymMatrix sigma(k - 1);
        for (std::size_t i = 0; i < k - 1; ++i) {
            if (sig_rows[i].size() != k - 1) throw ModelFormatError("sigma row length mismatch");
            for (std::size_t jj = i; jj < k - 1; ++jj) {
                if (sig_rows[jj][i] != sig_rows[i][jj])
                    throw ModelFormatError("sigma is not symmetric");
                sigma.set(i, jj, sig_rows[i][jj]);
            }
        }
        LoadedModel out{CtmModel{std::move(beta), GaussianPrior(std::move(mu), std::move(sigma))},
                        j.at("alpha").get<double>(), j.at("vocab_hash").get<std::uint64_t>()};
        if (!(out.alpha > 0.0)) throw ModelFormatError("alpha out of range");
        return out;
    } catch (const ModelFormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw ModelFormatError(std::string("corrupt model file: ") + e.what());
    }
}

}  // namespace fctm
