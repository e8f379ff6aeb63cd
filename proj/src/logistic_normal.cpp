#include "fctm/logistic_normal.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fctm/errors.hpp"

namespace fctm {

void ThetaMixture::validate() const {
    const std::size_t kk = theta.size();
    if (kk < 2) throw InvalidArgument("mixture needs K >= 2 components");
    if (!(epsilon > 0.0) || epsilon >= 1.0 / static_cast<double>(kk))
        throw InvalidArgument("epsilon must lie in (0, 1/K)");
    double sum = 0.0;
    for (double v : theta) {
        if (!std::isfinite(v)) throw InvalidArgument("mixture has a non-finite component");
        if (v < epsilon)
            throw InvalidArgument("mixture component below the interior margin");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw InvalidArgument("mixture does not sum to 1 (off by " +
                              std::to_string(sum - 1.0) + ")");
}

ThetaMixture make_theta(Vec theta, double epsilon) {
    ThetaMixture t{std::move(theta), epsilon};
    t.validate();
    return t;
}

ThetaMixture theta_from_log_ratios(const Vec& g, double epsilon) {
    Vec x(g);
    x.push_back(0.0);
    double m = x[0];
    for (double v : x) m = std::max(m, v);
    double sum = 0.0;
    for (double& v : x) {
        v = std::exp(v - m);
        sum += v;
    }
    bool clamped = false;
    for (double& v : x) {
        v /= sum;
        if (v < epsilon) {
            v = epsilon;
            clamped = true;
        }
    }
    if (clamped) {
        double s2 = 0.0;
        for (double v : x) s2 += v;
        for (double& v : x) v /= s2;
    } else {
        // Exact renormalization keeps the 1e-12 sum invariant.
        double s2 = 0.0;
        for (double v : x) s2 += v;
        if (s2 != 1.0)
            for (double& v : x) v /= s2;
    }
    return ThetaMixture{std::move(x), epsilon};
}

GaussianPrior::GaussianPrior(Vec mu, SymMatrix sigma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
    if (mu_.empty()) throw InvalidArgument("prior needs K >= 2 (mu of length K-1)");
    if (sigma_.dim() != mu_.size())
        throw InvalidArgument("sigma dimension does not match mu");
    for (double v : mu_)
        if (!std::isfinite(v)) throw InvalidArgument("mu has a non-finite entry");
    sigma_chol_ = cholesky_spd(sigma_);  // validates SPD
    SpdInverse inv = inverse_spd(sigma_);
    sigma_inv_ = std::move(inv.inverse);
    log_det_sigma_ = inv.log_det;
    spectrum_inv_ = eig_sym(sigma_inv_);
}

double GaussianPrior::sigma_max_diag() const {
    double m = sigma_inv_(0, 0);
    for (std::size_t i = 1; i < sigma_inv_.dim(); ++i) m = std::max(m, sigma_inv_(i, i));
    return m;
}

Vec log_tilde(const ThetaMixture& t) {
    const std::size_t k = t.k();
    Vec g(k - 1);
    const double log_last = std::log(t.theta[k - 1]);
    for (std::size_t i = 0; i + 1 < k; ++i) g[i] = std::log(t.theta[i]) - log_last;
    return g;
}

namespace {

void check_dims(const ThetaMixture& t, const GaussianPrior& prior, const char* where) {
    if (t.k() != prior.dim_k())
        throw InvalidArgument(std::string(where) + ": mixture has " + std::to_string(t.k()) +
                              " components, prior expects " + std::to_string(prior.dim_k()));
}

// q = log t~ - mu and z = Sinv q, shared by the value/gradient/Hessian paths.
std::pair<Vec, Vec> q_and_z(const ThetaMixture& t, const GaussianPrior& prior) {
    Vec q = log_tilde(t);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= prior.mu()[i];
    Vec z = prior.sigma_inv().multiply(q);
    return {std::move(q), std::move(z)};
}

}  // namespace

double ln_value(const ThetaMixture& t, const GaussianPrior& prior) {
    check_dims(t, prior, "ln_value");
    const auto [q, z] = q_and_z(t, prior);
    double quad = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) quad += q[i] * z[i];
    double log_sum = 0.0;
    for (double v : t.theta) log_sum += std::log(v);
    return -0.5 * quad - log_sum;
}

Vec ln_gradient(const ThetaMixture& t, const GaussianPrior& prior) {
    check_dims(t, prior, "ln_gradient");
    const std::size_t k = t.k();
    const auto [q, z] = q_and_z(t, prior);
    Vec g(k);
    double z_sum = 0.0;
    for (double v : z) z_sum += v;
    for (std::size_t i = 0; i + 1 < k; ++i) g[i] = -(z[i] + 1.0) / t.theta[i];
    g[k - 1] = (z_sum - 1.0) / t.theta[k - 1];
    return g;
}

LnHessianParts ln_hessian(const ThetaMixture& t, const GaussianPrior& prior) {
    check_dims(t, prior, "ln_hessian");
    const std::size_t k = t.k();
    const std::size_t m = k - 1;
    const SymMatrix& sinv = prior.sigma_inv();
    auto [q, z] = q_and_z(t, prior);

    LnHessianParts parts;
    parts.z = std::move(z);

    // Bordered matrix S; its last row/column holds the negated row sums of
    // Sinv, the corner the total sum.
    parts.s_mat = SymMatrix(k);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j >= i) parts.s_mat.set(i, j, sinv(i, j));
            row_sum += sinv(i, j);
        }
        parts.s_mat.set(i, m, -row_sum);
        total += row_sum;
    }
    parts.s_mat.set(m, m, total);

    parts.u_mat = Matrix(k, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) parts.u_mat(i, j) = sinv(i, j);
    for (std::size_t j = 0; j < m; ++j) parts.u_mat(m, j) = parts.s_mat(m, j);

    // U q equals (z_1, ..., z_{K-1}, -sum z).
    const Vec uq = parts.u_mat.multiply(q);

    parts.middle = SymMatrix(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            const double id = (i == j) ? 1.0 : 0.0;
            const double diag = (i == j) ? uq[i] : 0.0;
            parts.middle.set(i, j, id - parts.s_mat(i, j) + diag);
        }

    parts.hessian = SymMatrix(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j)
            parts.hessian.set(i, j, parts.middle(i, j) / (t.theta[i] * t.theta[j]));
    return parts;
}

LemmaCheck lemma_nsd_conditions(const LnHessianParts& parts, const GaussianPrior& prior,
                                double tol) {
    double z_sum = 0.0;
    for (double v : parts.z) z_sum += v;

    const std::size_t m = parts.z.size();
    SymMatrix block(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double id = (i == j) ? 1.0 : 0.0;
            const double diag = (i == j) ? parts.z[i] : 0.0;
            block.set(i, j, id - prior.sigma_inv()(i, j) + diag);
        }
    return {z_sum >= 1.0, is_nsd(block, tol)};
}

bool hessian_nsd_on_simplex(const SymMatrix& hessian, double tol) {
    const Vec ones(hessian.dim(), 1.0);
    return is_nsd_restricted(hessian, ones, tol);
}

ConcavityCertificate certificate(const GaussianPrior& prior) {
    ConcavityCertificate cert;
    cert.lambda_min_inv = prior.lambda_min_inv();
    cert.sigma_max_diag = prior.sigma_max_diag();
    cert.k = prior.dim_k();
    cert.applicable = cert.lambda_min_inv >= 1.0;
    const double lm1 = cert.lambda_min_inv - 1.0;
    cert.p_bound = 1.0 - std::exp(2.0 * std::log(static_cast<double>(cert.k - 1)) -
                                  0.5 * lm1 * lm1 / cert.sigma_max_diag);
    return cert;
}

double diagonal_certificate_bound(double s, std::size_t k) {
    if (!(s > 0.0)) throw InvalidArgument("diagonal certificate needs s > 0");
    return 1.0 - std::exp(2.0 * std::log(static_cast<double>(k - 1)) - 0.5 * s -
                          0.5 / s + 1.0);
}

TailValidation mc_validate_thm45(const RandomMatrixExperiment& exp) {
    const std::size_t m = exp.s_mat.dim();
    if (m < 1) throw InvalidArgument("experiment needs a non-empty S");
    if (exp.cov_a.dim() != m) throw InvalidArgument("S and A dimensions differ");
    if (exp.n_samples < 1) throw InvalidArgument("need at least one sample");

    const double lambda_min_s = eig_sym(exp.s_mat).eigenvalues.back();
    if (lambda_min_s < 1.0)
        throw CertificateNotApplicable(
            "tail bound requires the smallest eigenvalue of S to be >= 1, got " +
            std::to_string(lambda_min_s));

    const Matrix chol_a = cholesky_spd(exp.cov_a);
    double sigma = exp.cov_a(0, 0);
    for (std::size_t i = 1; i < m; ++i) sigma = std::max(sigma, exp.cov_a(i, i));

    const double one_minus_lambda = 1.0 - lambda_min_s;
    const double bound = std::exp(2.0 * std::log(static_cast<double>(m)) -
                                  0.5 * one_minus_lambda * one_minus_lambda / sigma);

    Rng rng(exp.seed);
    Vec n(m);
    Vec z(m);
    std::size_t conditioned = 0;
    std::size_t hits = 0;
    for (std::size_t s = 0; s < exp.n_samples; ++s) {
        for (double& v : n) v = rng.normal();
        double z_sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += chol_a(i, j) * n[j];
            z[i] = acc;
            z_sum += acc;
        }
        if (z_sum < 1.0) continue;
        ++conditioned;
        SymMatrix b(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                const double id = (i == j) ? 1.0 : 0.0;
                const double diag = (i == j) ? z[i] : 0.0;
                b.set(i, j, id - exp.s_mat(i, j) + diag);
            }
        if (eig_sym(b).eigenvalues.front() >= 0.0) ++hits;
    }

    TailValidation out;
    out.n_conditioned = conditioned;
    out.bound = bound;
    out.empirical_conditional_rate =
        conditioned == 0 ? std::nan("")
                         : static_cast<double>(hits) / static_cast<double>(conditioned);
    return out;
}

ConcavityRates mc_concavity_rate(const GaussianPrior& prior, std::size_t n_samples,
                                 std::uint64_t seed) {
    if (n_samples < 1) throw InvalidArgument("need at least one sample");
    const std::size_t m = prior.dim_k() - 1;
    Rng rng(seed);
    Vec n(m);
    Vec g(m);
    std::size_t nsd_hits = 0;
    std::size_t lemma_hits = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (double& v : n) v = rng.normal();
        for (std::size_t i = 0; i < m; ++i) {
            double acc = prior.mu()[i];
            for (std::size_t j = 0; j <= i; ++j) acc += prior.sigma_chol()(i, j) * n[j];
            g[i] = acc;
        }
        const ThetaMixture t = theta_from_log_ratios(g, 1e-10);
        const LnHessianParts parts = ln_hessian(t, prior);
        if (hessian_nsd_on_simplex(parts.hessian)) ++nsd_hits;
        const LemmaCheck lc = lemma_nsd_conditions(parts, prior);
        if (lc.sum_ok && lc.block_ok) ++lemma_hits;
    }
    const auto dn = static_cast<double>(n_samples);
    return {static_cast<double>(nsd_hits) / dn, static_cast<double>(lemma_hits) / dn};
}

}  // namespace fctm
