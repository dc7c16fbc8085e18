#include "segbench/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "segbench/rng.hpp"

namespace fs = std::filesystem;

namespace segbench {

namespace {

constexpr const char* kSeparator = "==========";

std::string rstrip(const std::string& s) {
    auto end = s.find_last_not_of(" \t\r");
    return end == std::string::npos ? std::string() : s.substr(0, end + 1);
}

// Reads one pool file: sentence per line, blank line ends a paragraph.
SourceDocument read_document(const std::string& path, const std::string& doc_id,
                             const std::string& category) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open pool document: " + path);

    SourceDocument doc;
    doc.doc_id = doc_id;
    doc.category = category;
    int para_start = 0;
    std::string line;
    while (std::getline(in, line)) {
        line = rstrip(line);
        if (line.empty()) {
            if (doc.sentence_count() > para_start) {
                doc.paragraphs.emplace_back(para_start, doc.sentence_count());
                para_start = doc.sentence_count();
            }
            continue;
        }
        doc.sentences.push_back(line);
    }
    if (doc.sentence_count() > para_start)
        doc.paragraphs.emplace_back(para_start, doc.sentence_count());
    if (doc.sentences.empty())
        throw std::runtime_error("pool document has no sentences: " + path);
    return doc;
}

std::string category_from_id(const std::string& doc_id) {
    std::string prefix;
    for (char c : doc_id) {
        if (!std::isalpha(static_cast<unsigned char>(c)))
            break;
        prefix.push_back(c);
    }
    return prefix.empty() ? doc_id : prefix;
}

std::vector<SourceDocument> load_from_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open manifest: " + path);
    const fs::path base = fs::path(path).parent_path();

    std::vector<SourceDocument> pool;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = rstrip(line);
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            std::size_t tab = line.find('\t', pos);
            cols.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
            if (tab == std::string::npos)
                break;
            pos = tab + 1;
        }
        if (cols.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": manifest rows need doc_id<TAB>category<TAB>path");
        pool.push_back(read_document((base / cols[2]).string(), cols[0], cols[1]));
    }
    return pool;
}

std::vector<SourceDocument> load_from_directory(const std::string& path) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<SourceDocument> pool;
    for (const auto& f : files) {
        const std::string id = f.stem().string();
        pool.push_back(read_document(f.string(), id, category_from_id(id)));
    }
    return pool;
}

} // namespace

std::vector<SourceDocument> load_pool(const std::string& path) {
    if (!fs::exists(path))
        throw std::runtime_error("pool path does not exist: " + path);

    std::vector<SourceDocument> pool = fs::is_directory(path)
                                           ? load_from_directory(path)
                                           : load_from_manifest(path);
    if (pool.empty())
        throw std::runtime_error("empty pool: " + path);

    std::set<std::string> seen;
    for (const auto& doc : pool) {
        if (!seen.insert(doc.doc_id).second)
            throw std::runtime_error("duplicate doc_id in pool: " + doc.doc_id);
    }
    return pool;
}

Sample generate_length_sample(const std::vector<SourceDocument>& pool,
                              int min_len, int max_len, int segment_count,
                              std::uint64_t seed) {
    if (pool.empty())
        throw std::runtime_error("generate_length_sample: empty pool");
    if (min_len < 1 || max_len < min_len)
        throw std::runtime_error("generate_length_sample: need 1 <= min_len <= max_len");
    if (segment_count < 1)
        throw std::runtime_error("generate_length_sample: segment_count must be >= 1");
    for (const auto& doc : pool) {
        if (doc.sentence_count() < min_len)
            throw std::runtime_error("generate_length_sample: document " + doc.doc_id +
                                     " has fewer than " + std::to_string(min_len) +
                                     " sentences");
    }

    Sample sample;
    sample.seed = seed;
    for (int i = 0; i < segment_count; ++i) {
        Rng rng(derive_stream(seed, static_cast<std::uint64_t>(i)));
        const auto& doc = pool[rng.next_in(0, pool.size() - 1)];
        const int n = static_cast<int>(rng.next_in(min_len, max_len));
        const int take = std::min(n, doc.sentence_count());
        sample.provenance.push_back({doc.doc_id, 0, take});
        sample.sentences.insert(sample.sentences.end(), doc.sentences.begin(),
                                doc.sentences.begin() + take);
        if (i + 1 < segment_count)
            sample.reference.boundaries.push_back(static_cast<int>(sample.sentences.size()));
    }
    sample.reference.total_units = static_cast<int>(sample.sentences.size());
    sample.reference.validate("generated sample");
    return sample;
}

Sample generate_paragraph_sample(const std::vector<SourceDocument>& pool,
                                 int segment_count, std::uint64_t seed) {
    if (pool.empty())
        throw std::runtime_error("generate_paragraph_sample: empty pool");
    if (segment_count < 1)
        throw std::runtime_error("generate_paragraph_sample: segment_count must be >= 1");

    // Group by author; authors sorted by name so draws do not depend on
    // pool file order.
    std::map<std::string, std::vector<const SourceDocument*>> by_author;
    for (const auto& doc : pool)
        by_author[doc.category].push_back(&doc);
    std::vector<std::string> authors;
    for (const auto& [name, docs] : by_author)
        authors.push_back(name);

    Sample sample;
    sample.seed = seed;
    for (int i = 0; i < segment_count; ++i) {
        Rng rng(derive_stream(seed, static_cast<std::uint64_t>(i)));
        bool drawn = false;
        for (int attempt = 0; attempt < 100 && !drawn; ++attempt) {
            const auto& docs = by_author[authors[rng.next_in(0, authors.size() - 1)]];
            const SourceDocument& doc = *docs[rng.next_in(0, docs.size() - 1)];
            const int z = doc.paragraph_count();
            if (z < 3)
                continue;
            // l strictly between 1 and Z, then a start m strictly between 1
            // and Z - l (both 1-based).  Some (doc, l) draws admit no m; the
            // whole draw is then repeated.
            const int l = static_cast<int>(rng.next_in(2, z - 1));
            if (z - l - 1 < 2)
                continue;
            const int m = static_cast<int>(rng.next_in(2, z - l - 1));
            const int first = doc.paragraphs[m - 1].first;
            const int last = doc.paragraphs[m + l - 1].second;
            sample.provenance.push_back({doc.doc_id, first, last});
            sample.sentences.insert(sample.sentences.end(),
                                    doc.sentences.begin() + first,
                                    doc.sentences.begin() + last);
            drawn = true;
        }
        if (!drawn)
            throw std::runtime_error(
                "generate_paragraph_sample: no drawable document after 100 attempts "
                "(documents need at least 5 paragraphs)");
        if (i + 1 < segment_count)
            sample.reference.boundaries.push_back(static_cast<int>(sample.sentences.size()));
    }
    sample.reference.total_units = static_cast<int>(sample.sentences.size());
    sample.reference.validate("generated sample");
    return sample;
}

void write_sample_file(const Sample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write sample file: " + path);
    const auto& b = sample.reference.boundaries;
    std::size_t next_boundary = 0;
    out << kSeparator << "\n";
    for (int i = 0; i < static_cast<int>(sample.sentences.size()); ++i) {
        if (next_boundary < b.size() && b[next_boundary] == i) {
            out << kSeparator << "\n";
            ++next_boundary;
        }
        out << sample.sentences[i] << "\n";
    }
    out << kSeparator << "\n";
}

Sample read_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open sample file: " + path);

    Sample sample;
    sample.sample_id = fs::path(path).stem().string();

    std::string line;
    bool saw_separator = false;
    int since_separator = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = rstrip(line);
        if (line == kSeparator) {
            if (!saw_separator) {
                saw_separator = true;
            } else {
                if (since_separator == 0)
                    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                             ": empty segment");
                sample.reference.boundaries.push_back(
                    static_cast<int>(sample.sentences.size()));
                since_separator = 0;
            }
            continue;
        }
        if (line.empty())
            continue;
        if (!saw_separator)
            throw std::runtime_error(path + ":1: sample files must start with " +
                                     std::string(kSeparator));
        sample.sentences.push_back(line);
        ++since_separator;
    }
    if (sample.sentences.empty())
        throw std::runtime_error(path + ": no sentences");
    // The final separator closes the last segment rather than opening a
    // boundary; drop the trailing entry it produced.
    if (!sample.reference.boundaries.empty() &&
        sample.reference.boundaries.back() == static_cast<int>(sample.sentences.size()))
        sample.reference.boundaries.pop_back();
    else if (since_separator != 0)
        throw std::runtime_error(path + ": missing final separator line");
    sample.reference.total_units = static_cast<int>(sample.sentences.size());
    sample.reference.validate(path);
    return sample;
}

} // namespace segbench
