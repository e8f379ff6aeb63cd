#pragma once

#include <vector>

#include "fctm/corpus.hpp"
#include "fctm/logistic_normal.hpp"
#include "fctm/matrix.hpp"

namespace fctm {

// K distributions over V terms, one row per topic.
struct TopicMatrix {
    std::size_t k = 0;
    std::size_t v = 0;
    std::vector<Vec> rows;

    // Checks row sums (1e-10) and the entrywise floor.
    void validate(double floor = 0.0) const;
};

struct CtmModel {
    TopicMatrix beta;
    GaussianPrior prior;  // over the K-1 log-ratio coordinates
};

// sum_j d_j log(sum_k theta_k beta_kj), summed over the sparse support of d.
// A term with positive count but zero mixture probability raises
// DegenerateMixture.
double likelihood_value(const ThetaMixture& t, const Document& d, const TopicMatrix& beta);

// Component k: sum_j d_j beta_kj / (sum_l theta_l beta_lj).
Vec likelihood_gradient(const ThetaMixture& t, const Document& d, const TopicMatrix& beta);

// Entry (k, k'): -sum_j d_j beta_kj beta_k'j / (sum_l theta_l beta_lj)^2.
// Always NSD: it is a nonnegative combination of negated rank-1 products.
SymMatrix likelihood_hessian(const ThetaMixture& t, const Document& d,
                             const TopicMatrix& beta);

double map_value(const ThetaMixture& t, const Document& d, const CtmModel& m);
Vec map_gradient(const ThetaMixture& t, const Document& d, const CtmModel& m);
SymMatrix map_hessian(const ThetaMixture& t, const Document& d, const CtmModel& m);

// Concavity verdict at theta: the full Hessian restricted to the simplex
// tangent space (see hessian_nsd_on_simplex).
bool map_hessian_nsd(const ThetaMixture& t, const Document& d, const CtmModel& m,
                     double tol = kNsdTol);

}  // namespace fctm
