#include "fctm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fctm/errors.hpp"
#include "fctm/rng.hpp"

namespace fctm {

Vocabulary Vocabulary::from_terms(std::vector<std::string> terms) {
    if (terms.empty()) throw InvalidArgument("vocabulary must hold at least one term");
    Vocabulary v;
    v.terms = std::move(terms);
    v.index.reserve(v.terms.size());
    for (std::size_t j = 0; j < v.terms.size(); ++j) {
        if (v.terms[j].empty())
            throw InvalidArgument("vocabulary term " + std::to_string(j) + " is empty");
        if (!v.index.emplace(v.terms[j], j).second)
            throw InvalidArgument("duplicate vocabulary term: " + v.terms[j]);
    }
    return v;
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 1099511628211ULL;
    };
    for (const std::string& t : terms) {
        for (char c : t) mix(static_cast<unsigned char>(c));
        mix('\n');
    }
    return h;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

long long parse_ll(const std::string& tok, const char* what, long line) {
    long long v = 0;
    const auto* b = tok.data();
    const auto* e = tok.data() + tok.size();
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e)
        throw ParseError(std::string("expected integer ") + what + ", got '" + tok + "'", line);
    return v;
}

double parse_count(const std::string& tok, long line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size() || !std::isfinite(v))
            throw ParseError("bad count '" + tok + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("bad count '" + tok + "'", line);
    }
}

// Counts are usually integers; print them as such so that a save/load
// round-trip is byte-stable, and fall back to full precision otherwise.
void print_count(std::ostream& os, double c) {
    if (c == std::floor(c) && std::abs(c) < 9.007199254740992e15) {
        os << static_cast<long long>(c);
    } else {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", c);
        os << buf;
    }
}

}  // namespace

LoadReport load_uci_bow(std::istream& docword, std::istream& vocab) {
    long line_no = 0;
    std::string line;

    // Header: three integers D, W, NNZ; one per line in the canonical layout,
    // but tokens are accepted wherever line breaks fall.
    std::vector<long long> header;
    while (header.size() < 3 && std::getline(docword, line)) {
        ++line_no;
        for (const std::string& tok : split_ws(line)) {
            if (header.size() == 3)
                throw ParseError("unexpected token '" + tok + "' after header", line_no);
            header.push_back(parse_ll(tok, "in header", line_no));
        }
    }
    if (header.size() < 3) throw ParseError("truncated header, need D W NNZ", line_no);
    const long long d_docs = header[0];
    const long long w_terms = header[1];
    const long long nnz = header[2];
    if (d_docs < 1 || w_terms < 1 || nnz < 0)
        throw ParseError("header out of range (D, W must be >= 1, NNZ >= 0)", line_no);

    std::vector<std::map<std::size_t, double>> counts(static_cast<std::size_t>(d_docs));
    long long seen = 0;
    while (std::getline(docword, line)) {
        ++line_no;
        const std::vector<std::string> toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 3)
            throw ParseError("expected 'docID wordID count', got " +
                                 std::to_string(toks.size()) + " tokens",
                             line_no);
        if (seen == nnz) throw ParseError("more records than the NNZ header announced", line_no);
        const long long doc = parse_ll(toks[0], "docID", line_no);
        const long long word = parse_ll(toks[1], "wordID", line_no);
        const double count = parse_count(toks[2], line_no);
        if (doc < 1 || doc > d_docs)
            throw ParseError("docID " + std::to_string(doc) + " out of range [1, " +
                                 std::to_string(d_docs) + "]",
                             line_no);
        if (word < 1 || word > w_terms)
            throw ParseError("wordID " + std::to_string(word) + " out of range [1, " +
                                 std::to_string(w_terms) + "]",
                             line_no);
        if (count <= 0.0) throw ParseError("count must be positive", line_no);
        counts[static_cast<std::size_t>(doc - 1)][static_cast<std::size_t>(word - 1)] += count;
        ++seen;
    }
    if (seen != nnz)
        throw ParseError("NNZ header announced " + std::to_string(nnz) + " records, found " +
                             std::to_string(seen),
                         line_no);

    std::vector<std::string> terms;
    terms.reserve(static_cast<std::size_t>(w_terms));
    long vline_no = 0;
    while (static_cast<long long>(terms.size()) < w_terms && std::getline(vocab, line)) {
        ++vline_no;
        const std::string t = trim(line);
        if (t.empty()) throw ParseError("empty vocabulary term", vline_no);
        terms.push_back(t);
    }
    if (static_cast<long long>(terms.size()) < w_terms)
        throw ParseError("vocabulary has fewer than W = " + std::to_string(w_terms) + " terms",
                         vline_no);

    LoadReport report;
    try {
        report.corpus.vocab = Vocabulary::from_terms(std::move(terms));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), vline_no);
    }
    for (auto& doc_counts : counts) {
        if (doc_counts.empty()) {
            ++report.dropped_empty_docs;
            continue;
        }
        Document doc;
        doc.entries.reserve(doc_counts.size());
        for (const auto& [term, count] : doc_counts) {
            doc.entries.push_back({term, count});
            doc.total_count += count;
        }
        report.corpus.docs.push_back(std::move(doc));
    }
    if (report.corpus.docs.empty())
        throw ParseError("corpus has no non-empty documents", line_no);
    return report;
}

LoadReport load_uci_bow_files(const std::string& docword_path, const std::string& vocab_path) {
    std::ifstream dw(docword_path);
    if (!dw) throw InvalidArgument("cannot open " + docword_path);
    std::ifstream vo(vocab_path);
    if (!vo) throw InvalidArgument("cannot open " + vocab_path);
    return load_uci_bow(dw, vo);
}

void save_uci_bow(const Corpus& c, std::ostream& docword, std::ostream& vocab) {
    std::size_t nnz = 0;
    for (const Document& d : c.docs) nnz += d.entries.size();
    docword << c.num_docs() << "\n" << c.num_terms() << "\n" << nnz << "\n";
    for (std::size_t i = 0; i < c.docs.size(); ++i) {
        for (const DocEntry& e : c.docs[i].entries) {
            docword << (i + 1) << " " << (e.term + 1) << " ";
            print_count(docword, e.count);
            docword << "\n";
        }
    }
    for (const std::string& t : c.vocab.terms) vocab << t << "\n";
}

void save_uci_bow_files(const Corpus& c, const std::string& docword_path,
                        const std::string& vocab_path) {
    std::ofstream dw(docword_path);
    if (!dw) throw InvalidArgument("cannot open " + docword_path + " for writing");
    std::ofstream vo(vocab_path);
    if (!vo) throw InvalidArgument("cannot open " + vocab_path + " for writing");
    save_uci_bow(c, dw, vo);
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& c, double train_fraction,
                                       std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InvalidArgument("train_fraction must lie in (0, 1)");
    const std::size_t m = c.num_docs();
    if (m < 2) throw InvalidArgument("split needs at least 2 documents");

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    const auto n_train = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(m)));
    Corpus train;
    Corpus test;
    train.vocab = c.vocab;
    test.vocab = c.vocab;
    for (std::size_t i = 0; i < m; ++i) {
        (i < n_train ? train : test).docs.push_back(c.docs[order[i]]);
    }
    return {std::move(train), std::move(test)};
}

std::size_t DocFreqTable::co(std::size_t u, std::size_t v) const {
    if (u > v) std::swap(u, v);
    const auto it = codf.find({u, v});
    return it == codf.end() ? 0 : it->second;
}

DocFreqTable doc_freq_table(const Corpus& c, const std::vector<std::size_t>& candidate_terms) {
    DocFreqTable table;
    table.df.assign(c.num_terms(), 0);
    std::vector<char> is_candidate(c.num_terms(), 0);
    for (std::size_t t : candidate_terms) {
        if (t >= c.num_terms())
            throw InvalidArgument("candidate term id " + std::to_string(t) + " out of range");
        is_candidate[t] = 1;
    }

    std::vector<std::size_t> present;
    for (const Document& doc : c.docs) {
        present.clear();
        for (const DocEntry& e : doc.entries) {
            if (e.count <= 0.0) continue;
            ++table.df[e.term];
            if (is_candidate[e.term]) present.push_back(e.term);
        }
        for (std::size_t a = 0; a < present.size(); ++a)
            for (std::size_t b = a + 1; b < present.size(); ++b) {
                std::size_t u = present[a];
                std::size_t v = present[b];
                if (u > v) std::swap(u, v);
                ++table.codf[{u, v}];
            }
    }
    return table;
}

}  // namespace fctm
