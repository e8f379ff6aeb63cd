#include "fctm/export_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fctm/errors.hpp"
#include "fctm/eval.hpp"
#include "fctm/synth.hpp"

namespace fctm {

namespace {

void check_graph_args(double threshold, std::size_t label_terms) {
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw InvalidArgument("correlation_graph: threshold must lie in (0, 1)");
    if (label_terms == 0)
        throw InvalidArgument("correlation_graph: need at least one label term");
}

GraphNode make_node(std::size_t topic, const CtmModel& m, std::size_t label_terms,
                    const Vocabulary* vocab) {
    GraphNode n;
    n.topic = topic;
    n.label_terms = top_terms_for_topic(m.beta.rows[topic], label_terms);
    if (vocab) {
        n.label_words.reserve(n.label_terms.size());
        for (std::size_t t : n.label_terms) n.label_words.push_back(vocab->terms[t]);
    }
    return n;
}

void add_edges(CorrelationGraph& g, const std::vector<Vec>& corr, double threshold) {
    const std::size_t n = corr.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = std::clamp(corr[i][j], -1.0, 1.0);
            if (r >= threshold) {
                g.edges.push_back(GraphEdge{i, j, r, true});
            } else if (r <= -threshold) {
                g.edges.push_back(GraphEdge{i, j, r, false});
            }
        }
    }
}

std::string escape_dot(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string format_corr(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r);
    return buf;
}

}  // namespace

CorrelationGraph correlation_graph(const CtmModel& m, double threshold,
                                   std::size_t label_terms, const Vocabulary* vocab) {
    check_graph_args(threshold, label_terms);
    const std::size_t km1 = m.prior.dim_k() - 1;
    CorrelationGraph g;
    g.threshold = threshold;
    g.log_ratio_mode = true;
    for (std::size_t i = 0; i < km1; ++i) g.nodes.push_back(make_node(i, m, label_terms, vocab));

    const SymMatrix& s = m.prior.sigma();
    std::vector<Vec> corr(km1, Vec(km1, 0.0));
    for (std::size_t i = 0; i < km1; ++i)
        for (std::size_t j = 0; j < km1; ++j)
            corr[i][j] = s(i, j) / std::sqrt(s(i, i) * s(j, j));
    add_edges(g, corr, threshold);
    return g;
}

CorrelationGraph correlation_graph_mc(const CtmModel& m, double threshold,
                                      std::size_t label_terms, std::size_t n_samples,
                                      std::uint64_t seed, const Vocabulary* vocab) {
    check_graph_args(threshold, label_terms);
    if (n_samples < 2)
        throw InvalidArgument("correlation_graph_mc: need at least two samples");
    const std::size_t k = m.prior.dim_k();
    CorrelationGraph g;
    g.threshold = threshold;
    g.log_ratio_mode = false;
    for (std::size_t i = 0; i < k; ++i) g.nodes.push_back(make_node(i, m, label_terms, vocab));

    Rng rng(seed);
    Vec mean(k, 0.0);
    std::vector<Vec> second(k, Vec(k, 0.0));
    for (std::size_t s = 0; s < n_samples; ++s) {
        const ThetaMixture t = sample_theta(m.prior, rng);
        for (std::size_t i = 0; i < k; ++i) {
            mean[i] += t.theta[i];
            for (std::size_t j = i; j < k; ++j) second[i][j] += t.theta[i] * t.theta[j];
        }
    }
    const double n = static_cast<double>(n_samples);
    std::vector<Vec> corr(k, Vec(k, 0.0));
    Vec var(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        mean[i] /= n;
        var[i] = second[i][i] / n - mean[i] * mean[i];
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            const double cov = second[i][j] / n - mean[i] * mean[j];
            const double denom = std::sqrt(var[i] * var[j]);
            const double r = denom > 0.0 ? cov / denom : 0.0;
            corr[i][j] = r;
            corr[j][i] = r;
        }
    }
    add_edges(g, corr, threshold);
    return g;
}

std::string to_dot(const CorrelationGraph& g, SignFilter filter) {
    if (g.nodes.empty() && g.edges.empty()) return "graph ctm { }\n";

    std::ostringstream out;
    out << "graph ctm {\n";
    if (g.log_ratio_mode) {
        out << "  // correlations among the K-1 log-ratio coordinates;"
               " the reference topic carries no coordinate and is omitted\n";
    } else {
        out << "  // Monte-Carlo correlations of the topic proportions themselves\n";
    }
    out << "  // |correlation| >= " << format_corr(g.threshold) << "\n";
    out << "  node [shape=box];\n";
    for (const auto& node : g.nodes) {
        out << "  t" << node.topic << " [label=\"topic " << node.topic;
        const std::size_t n_labels =
            node.label_words.empty() ? node.label_terms.size() : node.label_words.size();
        for (std::size_t i = 0; i < n_labels; ++i) {
            out << (i == 0 ? "\\n" : " ");
            if (node.label_words.empty()) {
                out << "#" << node.label_terms[i];
            } else {
                out << escape_dot(node.label_words[i]);
            }
        }
        out << "\"];\n";
    }
    for (const auto& e : g.edges) {
        if (filter == SignFilter::positive && !e.positive) continue;
        if (filter == SignFilter::negative && e.positive) continue;
        out << "  t" << e.a << " -- t" << e.b << " [label=\"" << format_corr(e.correlation)
            << "\"";
        if (!e.positive) out << ", style=dashed";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace fctm
