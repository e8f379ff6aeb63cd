#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fctm {

struct Vocabulary {
    std::vector<std::string> terms;
    std::unordered_map<std::string, std::size_t> index;

    // Validates that terms are non-empty and distinct.
    static Vocabulary from_terms(std::vector<std::string> terms);

    std::size_t size() const { return terms.size(); }

    // Order-sensitive FNV-1a over the term list; stored in model files so a
    // model is never silently applied to a different vocabulary.
    std::uint64_t hash() const;
};

struct DocEntry {
    std::size_t term;  // 0-based, < V
    double count;      // > 0
};

struct Document {
    std::vector<DocEntry> entries;  // term ids strictly increasing
    double total_count = 0.0;
};

struct Corpus {
    Vocabulary vocab;
    std::vector<Document> docs;

    std::size_t num_docs() const { return docs.size(); }
    std::size_t num_terms() const { return vocab.size(); }
};

struct LoadReport {
    Corpus corpus;
    std::size_t dropped_empty_docs = 0;
};

// UCI bag-of-words layout: docword holds three integer header lines
// D, W, NNZ followed by NNZ "docID wordID count" lines with 1-based ids;
// vocab holds W terms, one per line. Documents that end up with no terms
// are dropped and counted in the report. Malformed input raises ParseError
// with the offending line number.
LoadReport load_uci_bow(std::istream& docword, std::istream& vocab);
LoadReport load_uci_bow_files(const std::string& docword_path, const std::string& vocab_path);

// Exact inverse of load_uci_bow: reloading the emitted streams yields an
// identical corpus (counts are printed in full precision).
void save_uci_bow(const Corpus& c, std::ostream& docword, std::ostream& vocab);
void save_uci_bow_files(const Corpus& c, const std::string& docword_path,
                        const std::string& vocab_path);

// Deterministic shuffle under the seed, then the first ceil(fraction * M)
// documents form the train split. Both splits share the vocabulary.
std::pair<Corpus, Corpus> split_corpus(const Corpus& c, double train_fraction,
                                       std::uint64_t seed);

struct DocFreqTable {
    std::vector<std::size_t> df;                                // per term id
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> codf;  // key u < v

    // Symmetric lookup; pairs never recorded count as 0.
    std::size_t co(std::size_t u, std::size_t v) const;
};

// df counts documents where the term has positive count; codf is restricted
// to pairs within candidate_terms.
DocFreqTable doc_freq_table(const Corpus& c, const std::vector<std::size_t>& candidate_terms);

}  // namespace fctm
