#include <cmath>

#include "doctest.h"
#include "fctm/errors.hpp"
#include "fctm/logistic_normal.hpp"
#include "fctm/matrix.hpp"
#include "fctm/rng.hpp"
#include "fctm/synth.hpp"
#include "oracles.hpp"

using namespace fctm;
using testutil::rel_err;

namespace {

GaussianPrior iso_prior(std::size_t km1, double sigma_scale) {
    return GaussianPrior(Vec(km1, 0.0), SymMatrix::diagonal(Vec(km1, sigma_scale)));
}

// Prior whose inverse covariance is exactly s * I.
GaussianPrior inv_scale_prior(std::size_t km1, double s) {
    return iso_prior(km1, 1.0 / s);
}

ThetaMixture uniform_theta(std::size_t k) {
    return ThetaMixture{Vec(k, 1.0 / static_cast<double>(k)), 1e-10};
}

}  // namespace

TEST_CASE("log_tilde maps the uniform mixture to zero") {
    for (std::size_t k : {2u, 3u, 7u}) {
        const Vec g = log_tilde(uniform_theta(k));
        REQUIRE(g.size() == k - 1);
        for (double v : g) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("log_tilde hand values") {
    const double e = std::exp(1.0);
    const ThetaMixture t2{Vec{e / (1.0 + e), 1.0 / (1.0 + e)}, 1e-10};
    const Vec g2 = log_tilde(t2);
    REQUIRE(g2.size() == 1);
    CHECK(g2[0] == doctest::Approx(1.0).epsilon(1e-12));

    const ThetaMixture t3{Vec{0.5, 0.25, 0.25}, 1e-10};
    const Vec g3 = log_tilde(t3);
    REQUIRE(g3.size() == 2);
    CHECK(g3[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(g3[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("theta_from_log_ratios inverts log_tilde") {
    const Vec g{std::log(3.0)};
    const ThetaMixture t = theta_from_log_ratios(g, 1e-10);
    CHECK(t.theta[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(t.theta[1] == doctest::Approx(0.25).epsilon(1e-12));

    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        Vec raw(5);
        for (double& v : raw) v = 3.0 * (rng.uniform() - 0.5);
        const ThetaMixture round = theta_from_log_ratios(raw, 1e-10);
        round.validate();
        const Vec back = log_tilde(round);
        for (std::size_t i = 0; i < raw.size(); ++i)
            CHECK(back[i] == doctest::Approx(raw[i]).epsilon(1e-10));
    }
}

TEST_CASE("theta mixture validation rejects bad points") {
    CHECK_THROWS_AS(make_theta(Vec{1.0}, 1e-10), InvalidArgument);
    CHECK_THROWS_AS(make_theta(Vec{0.7, 0.2}, 1e-10), InvalidArgument);
    CHECK_THROWS_AS(make_theta(Vec{0.5, 0.5}, 0.6), InvalidArgument);
    CHECK_THROWS_AS(make_theta(Vec{1.0 - 1e-12, 1e-12}, 1e-10), InvalidArgument);
    CHECK_NOTHROW(make_theta(Vec{0.5, 0.5}, 1e-10));
}

TEST_CASE("gaussian prior caches a consistent inverse") {
    Rng rng(21);
    for (std::size_t n : {1u, 3u, 6u}) {
        const SymMatrix sigma = testutil::random_spd(n, rng, 0.5);
        const GaussianPrior p(Vec(n, 0.0), sigma);

        const SpectralData es = eig_sym(sigma);
        const double cond = es.eigenvalues.front() / es.eigenvalues.back();
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t l = 0; l < n; ++l) acc += sigma(i, l) * p.sigma_inv()(l, j);
                worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
            }
        CHECK(worst <= 1e-8 * cond);

        double log_det = 0.0;
        for (double ev : es.eigenvalues) log_det += std::log(ev);
        CHECK(rel_err(p.log_det_sigma(), log_det) <= 1e-9);
        CHECK(p.dim_k() == n + 1);
    }
}

TEST_CASE("gaussian prior rejects non-spd sigma") {
    SymMatrix bad(2);
    bad.set(0, 0, 1.0);
    bad.set(1, 1, -1.0);
    CHECK_THROWS_AS(GaussianPrior(Vec(2, 0.0), bad), NotPositiveDefinite);
    CHECK_THROWS_AS(GaussianPrior(Vec{}, SymMatrix(0)), InvalidArgument);
    CHECK_THROWS_AS(GaussianPrior(Vec(3, 0.0), SymMatrix::identity(2)), InvalidArgument);
}

TEST_CASE("ln_value hand cases") {
    // Uniform K=2 under a standard prior: the quadratic term vanishes.
    const GaussianPrior p1(Vec{0.0}, SymMatrix::identity(1));
    CHECK(ln_value(uniform_theta(2), p1) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

    // At log ratios equal to mu only the -sum log theta part remains.
    Rng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        Vec mu(3);
        for (double& v : mu) v = 2.0 * (rng.uniform() - 0.5);
        const GaussianPrior p(mu, testutil::random_spd(3, rng, 0.5));
        const ThetaMixture t = theta_from_log_ratios(mu, 1e-10);
        double want = 0.0;
        for (double v : t.theta) want -= std::log(v);
        CHECK(rel_err(ln_value(t, p), want) <= 1e-10);
    }

    // K=2 at log ratio 1: quadratic term is -1/2.
    const double e = std::exp(1.0);
    const ThetaMixture t{Vec{e / (1.0 + e), 1.0 / (1.0 + e)}, 1e-10};
    const double want = -0.5 - std::log(e / (1.0 + e)) - std::log(1.0 / (1.0 + e));
    CHECK(ln_value(t, p1) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("ln_gradient hand cases") {
    const GaussianPrior p2(Vec{0.0}, SymMatrix::identity(1));
    const Vec g2 = ln_gradient(uniform_theta(2), p2);
    CHECK(g2[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(g2[1] == doctest::Approx(-2.0).epsilon(1e-12));

    const GaussianPrior p3(Vec(2, 0.0), SymMatrix::identity(2));
    const Vec g3 = ln_gradient(uniform_theta(3), p3);
    for (double v : g3) CHECK(v == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("ln_gradient matches finite differences") {
    Rng rng(31);
    for (std::size_t k : {2u, 3u, 5u}) {
        for (int rep = 0; rep < 10; ++rep) {
            Vec mu(k - 1);
            for (double& v : mu) v = rng.normal() * 0.3;
            const GaussianPrior p(mu, testutil::random_spd(k - 1, rng, 0.5));
            const ThetaMixture t = testutil::random_theta(k, rng);
            const Vec grad = ln_gradient(t, p);
            auto f = [&](const Vec& x) { return ln_value(ThetaMixture{x, t.epsilon}, p); };

            // Componentwise against axis perturbations (the density is defined
            // off the simplex), then along mass-moving pair directions.
            const Vec fd = testutil::fd_gradient(f, t.theta, 1e-6);
            for (std::size_t i = 0; i < k; ++i) CHECK(rel_err(grad[i], fd[i]) <= 1e-5);
            for (std::size_t i = 0; i + 1 < k; ++i) {
                const double want = testutil::fd_pair_directional(f, t.theta, i, k - 1, 1e-6);
                CHECK(rel_err(grad[i] - grad[k - 1], want) <= 1e-5);
            }
        }
    }
}

TEST_CASE("ln_hessian factor shapes for K=2") {
    const double s = 9.0;
    const GaussianPrior p = inv_scale_prior(1, s);
    const LnHessianParts parts = ln_hessian(uniform_theta(2), p);

    REQUIRE(parts.s_mat.dim() == 2);
    CHECK(parts.s_mat(0, 0) == doctest::Approx(s).epsilon(1e-12));
    CHECK(parts.s_mat(0, 1) == doctest::Approx(-s).epsilon(1e-12));
    CHECK(parts.s_mat(1, 1) == doctest::Approx(s).epsilon(1e-12));
    REQUIRE(parts.u_mat.rows() == 2);
    REQUIRE(parts.u_mat.cols() == 1);
    CHECK(parts.u_mat(0, 0) == doctest::Approx(s).epsilon(1e-12));
    CHECK(parts.u_mat(1, 0) == doctest::Approx(-s).epsilon(1e-12));
}

TEST_CASE("ln_hessian bordered matrix bookkeeping") {
    Rng rng(41);
    const std::size_t k = 5;
    const GaussianPrior p(Vec(k - 1, 0.0), testutil::random_spd(k - 1, rng, 0.5));
    const ThetaMixture t = testutil::random_theta(k, rng);
    const LnHessianParts parts = ln_hessian(t, p);
    const SymMatrix& si = p.sigma_inv();

    double total = 0.0;
    for (std::size_t i = 0; i < k - 1; ++i) {
        double row = 0.0;
        double col = 0.0;
        for (std::size_t j = 0; j < k - 1; ++j) {
            CHECK(parts.s_mat(i, j) == si(i, j));
            CHECK(parts.u_mat(i, j) == si(i, j));
            row += si(i, j);
            col += si(j, i);
        }
        total += row;
        CHECK(std::abs(parts.s_mat(i, k - 1) + row) <= 1e-12);
        CHECK(std::abs(parts.u_mat(k - 1, i) + col) <= 1e-12);
    }
    CHECK(std::abs(parts.s_mat(k - 1, k - 1) - total) <= 1e-12);

    // Rows of S and the diagonal correction both cancel against the border,
    // so the middle matrix always has row-sum-like mass K along the diagonal
    // direction: 1' middle 1 = K. That is the radial direction the simplex
    // restriction removes.
    double ones_quad = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) ones_quad += parts.middle(i, j);
    CHECK(ones_quad == doctest::Approx(static_cast<double>(k)).epsilon(1e-9));
}

TEST_CASE("ln_hessian middle reduces to I - S at the prior mean") {
    Rng rng(43);
    const std::size_t k = 4;
    Vec mu(k - 1);
    for (double& v : mu) v = rng.normal() * 0.5;
    const GaussianPrior p(mu, testutil::random_spd(k - 1, rng, 0.5));
    const ThetaMixture t = theta_from_log_ratios(mu, 1e-10);
    const LnHessianParts parts = ln_hessian(t, p);
    for (double zi : parts.z) CHECK(std::abs(zi) <= 1e-9);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            const double want = (i == j ? 1.0 : 0.0) - parts.s_mat(i, j);
            CHECK(std::abs(parts.middle(i, j) - want) <= 1e-8);
        }
}

TEST_CASE("ln_hessian matches the entrywise second partials") {
    Rng rng(47);
    for (std::size_t k : {2u, 3u, 5u, 8u}) {
        for (int rep = 0; rep < 25; ++rep) {
            Vec mu(k - 1);
            for (double& v : mu) v = rng.normal() * 0.4;
            const GaussianPrior p(mu, testutil::random_spd(k - 1, rng, 0.3));
            const ThetaMixture t = testutil::random_theta(k, rng);
            const SymMatrix got = ln_hessian(t, p).hessian;
            const SymMatrix want = testutil::entrywise_ln_hessian(t, p);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i; j < k; ++j)
                    CHECK(rel_err(got(i, j), want(i, j)) <= 1e-9);
        }
    }
}

TEST_CASE("ln_hessian matches finite differences") {
    Rng rng(53);
    for (std::size_t k : {2u, 3u, 5u}) {
        for (int rep = 0; rep < 6; ++rep) {
            Vec mu(k - 1);
            for (double& v : mu) v = rng.normal() * 0.3;
            const GaussianPrior p(mu, testutil::random_spd(k - 1, rng, 0.5));
            const ThetaMixture t = testutil::random_theta(k, rng);
            const SymMatrix got = ln_hessian(t, p).hessian;
            auto f = [&](const Vec& x) { return ln_value(ThetaMixture{x, t.epsilon}, p); };

            const SymMatrix fd = testutil::fd_hessian_scaled(f, t.theta);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i; j < k; ++j)
                    CHECK(rel_err(got(i, j), fd(i, j)) <= 1e-5);

            // Bilinear forms along in-simplex pair directions.
            for (std::size_t i = 0; i + 1 < k; ++i) {
                Vec d1(k, 0.0);
                d1[i] = 1.0;
                d1[k - 1] = -1.0;
                double form = 0.0;
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b) form += d1[a] * got(a, b) * d1[b];
                const double want = testutil::fd_bilinear(f, t.theta, d1, d1, 1e-5);
                CHECK(rel_err(form, want) <= 1e-5);
            }
        }
    }
}

TEST_CASE("hessian and middle share their ambient verdict") {
    // diag(1/theta) congruence preserves semidefiniteness, so the two
    // verdicts must always agree (both are in fact negative along theta
    // itself, which is why the restricted test exists).
    Rng rng(59);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t k = 2 + rep % 4;
        const GaussianPrior p(Vec(k - 1, 0.0), testutil::random_spd(k - 1, rng, 0.5));
        const ThetaMixture t = testutil::random_theta(k, rng);
        const LnHessianParts parts = ln_hessian(t, p);
        CHECK(is_nsd(parts.hessian, kNsdTol) == is_nsd(parts.middle, kNsdTol));

        double radial = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                radial += t.theta[i] * parts.hessian(i, j) * t.theta[j];
        CHECK(radial > 0.0);
        CHECK_FALSE(is_nsd(parts.hessian, kNsdTol));
    }
}

TEST_CASE("simplex-restricted verdict matches the K=2 scalar condition") {
    Rng rng(61);
    for (int rep = 0; rep < 50; ++rep) {
        const double scale = 0.05 + 2.0 * rng.uniform();
        const GaussianPrior p = iso_prior(1, scale);
        const ThetaMixture t = testutil::random_theta(2, rng);
        const SymMatrix h = ln_hessian(t, p).hessian;
        // Tangent space of the 1-simplex is spanned by (1, -1).
        const double form = h(0, 0) - 2.0 * h(0, 1) + h(1, 1);
        const double tol_scale = std::max(1.0, h.max_abs());
        const bool want = form <= kNsdTol * tol_scale;
        CHECK(hessian_nsd_on_simplex(h) == want);
    }
}

TEST_CASE("lemma conditions at the prior mean") {
    // z = 0 there: the coordinate sum fails, the matrix block passes
    // whenever the inverse dominates the identity.
    const GaussianPrior p = inv_scale_prior(4, 5.0);
    const ThetaMixture t = theta_from_log_ratios(p.mu(), 1e-10);
    const LnHessianParts parts = ln_hessian(t, p);
    const LemmaCheck lc = lemma_nsd_conditions(parts, p);
    CHECK_FALSE(lc.sum_ok);
    CHECK(lc.block_ok);
}

TEST_CASE("lemma conditions on a hand-built point") {
    // Inverse covariance 5I over four coordinates, z = (1.2, 0.3, 0.1, 0.2):
    // the sum is 1.8 and the block is diag(z) - 4I, so both conditions hold.
    const double s = 5.0;
    const GaussianPrior p = inv_scale_prior(4, s);
    const Vec z{1.2, 0.3, 0.1, 0.2};
    Vec g(4);
    for (std::size_t i = 0; i < 4; ++i) g[i] = z[i] / s;  // log ratios: sigma * z
    const ThetaMixture t = theta_from_log_ratios(g, 1e-10);
    const LnHessianParts parts = ln_hessian(t, p);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(parts.z[i] == doctest::Approx(z[i]).epsilon(1e-9));
    const LemmaCheck lc = lemma_nsd_conditions(parts, p);
    CHECK(lc.sum_ok);
    CHECK(lc.block_ok);
    CHECK(hessian_nsd_on_simplex(parts.hessian));
}

TEST_CASE("lemma conditions imply the restricted concavity verdict") {
    Rng rng(67);
    const std::size_t k = 4;
    const SymMatrix si = testutil::random_spd(k - 1, rng, 1.0);  // eigenvalues >= 1
    const GaussianPrior p(Vec(k - 1, 0.0), inverse_spd(si).inverse);
    Rng sampler(97);
    std::size_t both = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const ThetaMixture t = sample_theta(p, sampler);
        const LnHessianParts parts = ln_hessian(t, p);
        const LemmaCheck lc = lemma_nsd_conditions(parts, p);
        if (lc.sum_ok && lc.block_ok) {
            ++both;
            CHECK(hessian_nsd_on_simplex(parts.hessian));
        }
    }
    CHECK(both > 0);  // the sweep must actually exercise the implication
}

TEST_CASE("certificate hand values") {
    // K=2 with inverse covariance 9: both spectral quantities are 9 and the
    // bound is 1 - exp(-32/9).
    const GaussianPrior p = inv_scale_prior(1, 9.0);
    const ConcavityCertificate cert = certificate(p);
    CHECK(cert.k == 2);
    CHECK(cert.applicable);
    CHECK(cert.lambda_min_inv == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(cert.sigma_max_diag == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(rel_err(cert.p_bound, 1.0 - std::exp(-32.0 / 9.0)) <= 1e-12);
    CHECK(cert.p_bound == doctest::Approx(0.97149).epsilon(1e-4));
    CHECK_FALSE(cert.vacuous());
}

TEST_CASE("certificate boundary and inapplicable cases") {
    const ConcavityCertificate at_one = certificate(iso_prior(1, 1.0));
    CHECK(at_one.applicable);
    CHECK(at_one.p_bound == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(at_one.vacuous());

    // Large sigma means a small inverse: below the spectral threshold.
    const ConcavityCertificate weak = certificate(iso_prior(3, 4.0));
    CHECK_FALSE(weak.applicable);
}

TEST_CASE("certificate agrees with the diagonal closed form") {
    for (double s : {1.0, 4.0, 9.0, 25.0}) {
        for (std::size_t k : {3u, 10u, 100u}) {
            const GaussianPrior p = inv_scale_prior(k - 1, s);
            const ConcavityCertificate cert = certificate(p);
            CHECK(cert.applicable);
            const double want = diagonal_certificate_bound(s, k);
            CHECK(rel_err(cert.p_bound, want) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(diagonal_certificate_bound(0.0, 3), InvalidArgument);
}

TEST_CASE("certificate strengthens with the spectral gap") {
    Vec bounds;
    for (double lam : {1.0, 2.0, 4.0, 8.0, 16.0})
        bounds.push_back(certificate(inv_scale_prior(4, lam)).p_bound);
    for (std::size_t i = 1; i < bounds.size(); ++i) CHECK(bounds[i] > bounds[i - 1]);

    // Far into the gap regime the bound is effectively one.
    for (std::size_t k : {10u, 50u, 100u}) {
        const double lam = 100.0 * std::log(static_cast<double>(k));
        const ConcavityCertificate cert = certificate(inv_scale_prior(k - 1, lam));
        CHECK(cert.p_bound > 0.99);
    }
}

TEST_CASE("tail validation reports the analytic bound") {
    RandomMatrixExperiment exp;
    exp.s_mat = SymMatrix::diagonal(Vec(4, 5.0));
    exp.cov_a = SymMatrix::identity(4);
    exp.n_samples = 50000;
    exp.seed = 7;
    const TailValidation tv = mc_validate_thm45(exp);
    CHECK(rel_err(tv.bound, 16.0 * std::exp(-8.0)) <= 1e-12);
    REQUIRE(tv.n_conditioned > 10000u);
    const double rate = tv.empirical_conditional_rate;
    const double se = std::sqrt(std::max(rate, 1.0 / tv.n_conditioned) *
                                (1.0 - rate) / tv.n_conditioned);
    CHECK(rate <= tv.bound + 3.0 * se);
}

TEST_CASE("tail validation degenerates gracefully at the boundary") {
    RandomMatrixExperiment exp;
    exp.s_mat = SymMatrix::identity(4);
    exp.cov_a = SymMatrix::identity(4);
    exp.n_samples = 2000;
    exp.seed = 9;
    const TailValidation tv = mc_validate_thm45(exp);
    // Gap of zero: the bound collapses to m^2, valid but vacuous.
    CHECK(tv.bound == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(tv.empirical_conditional_rate <= 1.0);
}

TEST_CASE("tail validation bound moves with the experiment scales") {
    auto bound_of = [](double s_scale, double a_scale) {
        RandomMatrixExperiment exp;
        exp.s_mat = SymMatrix::diagonal(Vec(4, s_scale));
        exp.cov_a = SymMatrix::diagonal(Vec(4, a_scale));
        exp.n_samples = 1;
        exp.seed = 1;
        return mc_validate_thm45(exp).bound;
    };
    CHECK(bound_of(6.0, 1.0) < bound_of(5.0, 1.0));   // wider gap, tighter bound
    CHECK(bound_of(5.0, 2.0) > bound_of(5.0, 1.0));   // noisier perturbation, looser
}

TEST_CASE("tail validation input checks") {
    RandomMatrixExperiment exp;
    exp.s_mat = SymMatrix::diagonal(Vec(3, 0.5));  // smallest eigenvalue below 1
    exp.cov_a = SymMatrix::identity(3);
    exp.n_samples = 10;
    CHECK_THROWS_AS(mc_validate_thm45(exp), CertificateNotApplicable);

    exp.s_mat = SymMatrix::diagonal(Vec(3, 5.0));
    exp.n_samples = 0;
    CHECK_THROWS_AS(mc_validate_thm45(exp), InvalidArgument);

    exp.n_samples = 10;
    exp.cov_a = SymMatrix::identity(2);
    CHECK_THROWS_AS(mc_validate_thm45(exp), InvalidArgument);
}

TEST_CASE("concavity rate bounds and ordering") {
    Rng rng(71);
    const std::size_t km1 = 3;
    const SymMatrix si = testutil::random_spd(km1, rng, 1.0);
    const GaussianPrior p(Vec(km1, 0.0), inverse_spd(si).inverse);
    const ConcavityRates rates = mc_concavity_rate(p, 2000, 13);
    CHECK(rates.lemma_rate >= 0.0);
    CHECK(rates.lemma_rate <= rates.hessian_nsd_rate);
    CHECK(rates.hessian_nsd_rate <= 1.0);

    // Strongly concentrated prior: nearly every sample is a concave point.
    const ConcavityRates tight = mc_concavity_rate(inv_scale_prior(4, 25.0), 2000, 13);
    CHECK(tight.hessian_nsd_rate > 0.99);
    const ConcavityRates loose = mc_concavity_rate(inv_scale_prior(4, 1.0), 2000, 13);
    CHECK(tight.hessian_nsd_rate > loose.hessian_nsd_rate);

    CHECK_THROWS_AS(mc_concavity_rate(p, 0, 13), InvalidArgument);
}

TEST_CASE("concavity rate is reproducible under the seed") {
    const GaussianPrior p = inv_scale_prior(3, 4.0);
    const ConcavityRates a = mc_concavity_rate(p, 500, 99);
    const ConcavityRates b = mc_concavity_rate(p, 500, 99);
    CHECK(a.hessian_nsd_rate == b.hessian_nsd_rate);
    CHECK(a.lemma_rate == b.lemma_rate);
}
