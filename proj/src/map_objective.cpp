#include "fctm/map_objective.hpp"

#include <cmath>
#include <string>

#include "fctm/errors.hpp"

namespace fctm {

void TopicMatrix::validate(double floor) const {
    if (k < 2) throw InvalidArgument("topic matrix needs K >= 2 rows");
    if (v < 1) throw InvalidArgument("topic matrix needs V >= 1 columns");
    if (rows.size() != k) throw InvalidArgument("topic matrix row count mismatch");
    for (std::size_t r = 0; r < k; ++r) {
        if (rows[r].size() != v)
            throw InvalidArgument("topic row " + std::to_string(r) + " has wrong length");
        double sum = 0.0;
        for (double p : rows[r]) {
            if (!std::isfinite(p) || p < floor)
                throw InvalidArgument("topic row " + std::to_string(r) +
                                      " breaks the entry floor");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-10)
            throw InvalidArgument("topic row " + std::to_string(r) + " does not sum to 1");
    }
}

namespace {

void check_dims(const ThetaMixture& t, const TopicMatrix& beta, const char* where) {
    if (t.k() != beta.k)
        throw InvalidArgument(std::string(where) + ": mixture K " + std::to_string(t.k()) +
                              " != topic rows " + std::to_string(beta.k));
}

// Mixture probability of term j under theta.
double mix_prob(const ThetaMixture& t, const TopicMatrix& beta, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < beta.k; ++k) s += t.theta[k] * beta.rows[k][j];
    return s;
}

[[noreturn]] void degenerate(std::size_t term) {
    throw DegenerateMixture("term " + std::to_string(term) +
                            " has positive count but zero mixture probability");
}

}  // namespace

double likelihood_value(const ThetaMixture& t, const Document& d, const TopicMatrix& beta) {
    check_dims(t, beta, "likelihood_value");
    double acc = 0.0;
    for (const DocEntry& e : d.entries) {
        if (e.term >= beta.v)
            throw InvalidArgument("document references term " + std::to_string(e.term) +
                                  " outside the topic matrix");
        const double s = mix_prob(t, beta, e.term);
        if (s <= 0.0) degenerate(e.term);
        acc += e.count * std::log(s);
    }
    return acc;
}

Vec likelihood_gradient(const ThetaMixture& t, const Document& d, const TopicMatrix& beta) {
    check_dims(t, beta, "likelihood_gradient");
    Vec g(beta.k, 0.0);
    for (const DocEntry& e : d.entries) {
        const double s = mix_prob(t, beta, e.term);
        if (s <= 0.0) degenerate(e.term);
        const double w = e.count / s;
        for (std::size_t k = 0; k < beta.k; ++k) g[k] += w * beta.rows[k][e.term];
    }
    return g;
}

SymMatrix likelihood_hessian(const ThetaMixture& t, const Document& d,
                             const TopicMatrix& beta) {
    check_dims(t, beta, "likelihood_hessian");
    SymMatrix h(beta.k);
    for (const DocEntry& e : d.entries) {
        const double s = mix_prob(t, beta, e.term);
        if (s <= 0.0) degenerate(e.term);
        const double w = e.count / (s * s);
        for (std::size_t a = 0; a < beta.k; ++a) {
            const double ba = beta.rows[a][e.term];
            if (ba == 0.0) continue;
            for (std::size_t b = a; b < beta.k; ++b)
                h.add(a, b, -w * ba * beta.rows[b][e.term]);
        }
    }
    return h;
}

double map_value(const ThetaMixture& t, const Document& d, const CtmModel& m) {
    return likelihood_value(t, d, m.beta) + ln_value(t, m.prior);
}

Vec map_gradient(const ThetaMixture& t, const Document& d, const CtmModel& m) {
    Vec g = likelihood_gradient(t, d, m.beta);
    const Vec p = ln_gradient(t, m.prior);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += p[i];
    return g;
}

SymMatrix map_hessian(const ThetaMixture& t, const Document& d, const CtmModel& m) {
    SymMatrix h = likelihood_hessian(t, d, m.beta);
    const LnHessianParts parts = ln_hessian(t, m.prior);
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = i; j < h.dim(); ++j) h.add(i, j, parts.hessian(i, j));
    return h;
}

bool map_hessian_nsd(const ThetaMixture& t, const Document& d, const CtmModel& m,
                     double tol) {
    return hessian_nsd_on_simplex(map_hessian(t, d, m), tol);
}

}  // namespace fctm
