#pragma once

#include <cstdint>
#include <vector>

#include "fctm/matrix.hpp"
#include "fctm/rng.hpp"

namespace fctm {

// Default relative tolerance of all semidefiniteness verdicts.
inline constexpr double kNsdTol = 1e-9;

// A point of the epsilon-interior simplex: theta_k >= epsilon and
// sum(theta) = 1 within 1e-12.
struct ThetaMixture {
    Vec theta;
    double epsilon = 1e-10;

    std::size_t k() const { return theta.size(); }
    void validate() const;  // throws InvalidArgument on an invariant breach
};

ThetaMixture make_theta(Vec theta, double epsilon);

// Inverse of log_tilde: theta with log(theta_k / theta_K) = g_k, clamped
// into the epsilon-interior and renormalized.
ThetaMixture theta_from_log_ratios(const Vec& g, double epsilon);

// Gaussian over the (K-1)-dimensional log-ratio space. Immutable; the
// inverse, log-determinant, spectrum of the inverse and the Cholesky factor
// are cached at construction, so sigma must be SPD.
class GaussianPrior {
public:
    GaussianPrior(Vec mu, SymMatrix sigma);

    std::size_t dim_k() const { return mu_.size() + 1; }  // K
    const Vec& mu() const { return mu_; }
    const SymMatrix& sigma() const { return sigma_; }
    const SymMatrix& sigma_inv() const { return sigma_inv_; }
    double log_det_sigma() const { return log_det_sigma_; }
    const SpectralData& spectrum_inv() const { return spectrum_inv_; }
    const Matrix& sigma_chol() const { return sigma_chol_; }

    double lambda_min_inv() const { return spectrum_inv_.eigenvalues.back(); }
    double sigma_max_diag() const;  // max_i of the inverse's diagonal

private:
    Vec mu_;
    SymMatrix sigma_;
    SymMatrix sigma_inv_;
    double log_det_sigma_;
    SpectralData spectrum_inv_;
    Matrix sigma_chol_;
};

// Component k of the log-ratio transform: log(theta_k / theta_K).
Vec log_tilde(const ThetaMixture& t);

// -(1/2)(log t~ - mu)' Sinv (log t~ - mu) - sum_k log theta_k.
double ln_value(const ThetaMixture& t, const GaussianPrior& prior);

// Length-K gradient of ln_value in the ambient coordinates.
Vec ln_gradient(const ThetaMixture& t, const GaussianPrior& prior);

struct LnHessianParts {
    Vec z;             // Sinv (log t~ - mu), length K-1
    SymMatrix s_mat;   // K x K bordered matrix: [[Sinv, s_K'], [s_K, s_KK]]
    Matrix u_mat;      // K x (K-1): Sinv stacked on s_K
    SymMatrix middle;  // I_K - S + diag(U (log t~ - mu))
    SymMatrix hessian; // diag(1/theta) * middle * diag(1/theta)
};

LnHessianParts ln_hessian(const ThetaMixture& t, const GaussianPrior& prior);

struct LemmaCheck {
    bool sum_ok;    // z_1 + ... + z_{K-1} >= 1
    bool block_ok;  // I_{K-1} - Sinv + diag(z) is NSD
};

// The two sufficient (not necessary) conditions for concavity at a point.
LemmaCheck lemma_nsd_conditions(const LnHessianParts& parts, const GaussianPrior& prior,
                                double tol = kNsdTol);

// Concavity verdict for a Hessian of a function on the simplex: NSD of the
// form restricted to the tangent space {w : sum_k w_k = 0}. The ambient
// K x K form always has a positive radial direction (moving mass uniformly
// off the simplex), so the unrestricted test would reject every point.
bool hessian_nsd_on_simplex(const SymMatrix& hessian, double tol = kNsdTol);

struct ConcavityCertificate {
    double lambda_min_inv;  // smallest eigenvalue of the prior's inverse
    double sigma_max_diag;  // largest diagonal entry of the inverse
    std::size_t k;
    bool applicable;  // lambda_min_inv >= 1
    double p_bound;   // 1 - exp(2 log(K-1) - 0.5 (lambda-1)^2 / sigma)

    bool vacuous() const { return p_bound <= 0.0; }
};

ConcavityCertificate certificate(const GaussianPrior& prior);

// Closed form of the diagonal-inverse special case, used as a cross-check:
// 1 - exp(2 log(K-1) - 0.5 s - 0.5 / s + 1) for sigma_inv = s I.
double diagonal_certificate_bound(double s, std::size_t k);

struct RandomMatrixExperiment {
    SymMatrix s_mat;   // fixed SPD S
    SymMatrix cov_a;   // covariance A of the Gaussian perturbation z
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct TailValidation {
    double empirical_conditional_rate;  // NaN when n_conditioned == 0
    double bound;
    std::size_t n_conditioned;
};

// Samples z ~ N(0, A) and, among samples with sum(z) >= 1, measures how often
// I - S + diag(z) has a non-negative top eigenvalue; the analytic tail bound
// exp(2 log(m) - 0.5 (1 - lambda_min(S))^2 / max_i A_ii) with m = dim(S) is
// returned for comparison. Requires lambda_min(S) >= 1.
TailValidation mc_validate_thm45(const RandomMatrixExperiment& exp);

struct ConcavityRates {
    double hessian_nsd_rate;  // fraction with the Hessian NSD on the simplex
    double lemma_rate;        // fraction satisfying both sufficient conditions
};

// Samples log-ratios from the prior and reports point-wise concavity rates.
ConcavityRates mc_concavity_rate(const GaussianPrior& prior, std::size_t n_samples,
                                 std::uint64_t seed);

}  // namespace fctm
