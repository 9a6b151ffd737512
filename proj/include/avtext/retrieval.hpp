#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "avtext/errors.hpp"
#include "avtext/llm_client.hpp"
#include "avtext/prompt.hpp"
#include "avtext/strings.hpp"

// Knowledge-base construction and retrieval: greedy 500-token chunking,
// an embedding-provider contract, and an exact cosine top-k store with
// binary persistence. Desk scale needs no approximate index; exact flat
// search is what the brute-force oracle property checks against.
//
// Concurrency: queries are const and may run concurrently; upserts need
// exclusive access (single-writer, multi-reader contract). persist() is
// atomic via write-to-temp-then-rename.

namespace avtext {

struct Chunk {
    std::string doc_id;
    std::uint32_t seq = 0;          // contiguous from 0 within a document
    std::string text;
    std::uint32_t token_count = 0;

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct EmbeddingVector {
    std::vector<double> values;  // stored unit-normalized

    std::size_t dim() const { return values.size(); }

    // L2-normalizes in place; zero vectors are rejected.
    void normalize() {
        double sq = 0;
        for (double v : values) sq += v * v;
        if (sq <= 0) throw InvalidVectorError("zero vector");
        double inv = 1.0 / std::sqrt(sq);
        for (double& v : values) v *= inv;
    }

    bool is_unit(double tol = 1e-6) const {
        double sq = 0;
        for (double v : values) sq += v * v;
        return std::abs(std::sqrt(sq) - 1.0) <= tol;
    }

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

inline double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

struct RetrievalHit {
    Chunk chunk;
    double score = 0;  // cosine similarity, in [-1, 1]
};

// ---- chunking ----

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

inline std::vector<std::string> whitespace_tokenize(std::string_view text) {
    return split_any(text, " \t\r\n\f\v");
}

// Greedy partition of the token stream into runs of at most `limit` tokens.
// With overlap 0 (the default) concatenating the chunks' token sequences
// reproduces the document's token sequence exactly, and every chunk but the
// last carries exactly `limit` tokens. Chunk text re-joins tokens with
// single spaces, so the guarantee is at token granularity.
inline std::vector<Chunk> chunk_document(std::string_view doc_id, std::string_view text,
                                         std::size_t limit = 500, std::size_t overlap = 0,
                                         const Tokenizer& tokenizer = {}) {
    if (limit < 1) throw Error("chunk limit must be >= 1");
    if (overlap >= limit) throw Error("chunk overlap must be < limit");
    std::vector<std::string> tokens =
        tokenizer ? tokenizer(text) : whitespace_tokenize(text);
    if (tokens.empty()) throw EmptyDocumentError(std::string(doc_id));

    std::vector<Chunk> chunks;
    std::size_t step = limit - overlap;
    for (std::size_t start = 0; start < tokens.size(); start += step) {
        std::size_t len = std::min(limit, tokens.size() - start);
        Chunk chunk;
        chunk.doc_id = std::string(doc_id);
        chunk.seq = static_cast<std::uint32_t>(chunks.size());
        chunk.token_count = static_cast<std::uint32_t>(len);
        chunk.text = join(std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                                   tokens.begin() + static_cast<std::ptrdiff_t>(start + len)),
                          " ");
        chunks.push_back(std::move(chunk));
        if (start + len >= tokens.size()) break;
    }
    return chunks;
}

// ---- embedding providers ----

class Embedder {
public:
    virtual ~Embedder() = default;
    // One unit vector per text, order preserved.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// HTTP contract: POST {"model", "input": [str]} -> {"data": [{"embedding":
// [float]}]} (order-preserving). Vectors are normalized on receipt.
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(EndpointConfig config) : config_(std::move(config)) {
        detail::parse_base_url(config_.base_url);
    }

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        if (texts.empty()) return {};
        nlohmann::json body;
        body["model"] = config_.model_id;
        body["input"] = texts;
        nlohmann::json response =
            detail::post_json_with_retries(config_, "/v1/embeddings", body);
        std::vector<EmbeddingVector> out;
        try {
            const auto& data = response.at("data");
            if (data.size() != texts.size())
                throw MalformedResponseError("embedding count does not match input count");
            for (const auto& item : data) {
                EmbeddingVector v;
                v.values = item.at("embedding").get<std::vector<double>>();
                v.normalize();
                out.push_back(std::move(v));
            }
        } catch (const nlohmann::json::exception& e) {
            throw MalformedResponseError(e.what());
        }
        return out;
    }

private:
    EndpointConfig config_;
};

// Deterministic bag-of-words hash embedder used as the scripted provider:
// every token bumps a hashed bucket, then the vector is unit-normalized.
// Not a semantic model; it exists so retrieval is testable offline.
class HashEmbedder : public Embedder {
public:
    explicit HashEmbedder(std::size_t dim = 64) : dim_(dim) {
        if (dim_ < 1) throw Error("embedder dim must be >= 1");
    }

    std::size_t dim() const { return dim_; }

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const std::string& text : texts) {
            EmbeddingVector v;
            v.values.assign(dim_, 0.0);
            for (const std::string& token : whitespace_tokenize(to_lower(text))) {
                std::uint64_t h = fnv1a64(token);
                v.values[h % dim_] += 1.0 + static_cast<double>((h >> 32) & 0xff) / 256.0;
            }
            v.normalize();  // throws on token-free input
            out.push_back(std::move(v));
        }
        return out;
    }

private:
    std::size_t dim_;
};

// ---- vector store ----

class VectorStore {
public:
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t dim() const { return dim_; }  // 0 until the first insert

    // Re-inserting the same (doc_id, seq) replaces the prior entry. The
    // first insert fixes the store dimension.
    void upsert(const Chunk& chunk, const EmbeddingVector& vector) {
        if (vector.values.empty()) throw InvalidVectorError("empty vector");
        if (!vector.is_unit()) throw InvalidVectorError("vector is not unit-normalized");
        if (dim_ == 0)
            dim_ = vector.dim();
        else if (vector.dim() != dim_)
            throw DimensionMismatchError(dim_, vector.dim());
        entries_[{chunk.doc_id, chunk.seq}] = Entry{chunk, vector};
    }

    // Exact cosine top-k: score = dot of unit vectors, hits sorted by
    // descending score with ties broken by (doc_id, seq) ascending.
    std::vector<RetrievalHit> query(const EmbeddingVector& vector, std::size_t k = 5) const {
        if (entries_.empty()) throw EmptyStoreError();
        if (vector.dim() != dim_) throw DimensionMismatchError(dim_, vector.dim());
        if (k < 1) throw Error("k must be >= 1");

        std::vector<RetrievalHit> hits;
        hits.reserve(entries_.size());
        for (const auto& [key, entry] : entries_) {
            double score = std::clamp(dot(vector, entry.vector), -1.0, 1.0);
            hits.push_back(RetrievalHit{entry.chunk, score});
        }
        std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.chunk.doc_id != b.chunk.doc_id) return a.chunk.doc_id < b.chunk.doc_id;
            return a.chunk.seq < b.chunk.seq;
        });
        if (hits.size() > k) hits.resize(k);
        return hits;
    }

    // Binary layout: magic "AVKB", u32 version, u32 dim, u64 count, then
    // per record: doc_id (u32 len + bytes), u32 seq, u32 token_count,
    // text (u32 len + bytes), dim f64 values. Little-endian.
    void persist(const std::filesystem::path& path) const {
        std::filesystem::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot write " + tmp.string());
            out.write(kMagic, 4);
            write_u32(out, kVersion);
            write_u32(out, static_cast<std::uint32_t>(dim_));
            write_u64(out, entries_.size());
            for (const auto& [key, entry] : entries_) {
                write_str(out, entry.chunk.doc_id);
                write_u32(out, entry.chunk.seq);
                write_u32(out, entry.chunk.token_count);
                write_str(out, entry.chunk.text);
                out.write(reinterpret_cast<const char*>(entry.vector.values.data()),
                          static_cast<std::streamsize>(sizeof(double) * dim_));
            }
            out.flush();
            if (!out) throw IoError("short write to " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) throw IoError("rename failed: " + ec.message());
    }

    static VectorStore load(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path)) throw FileNotFoundError(path.string());
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open " + path.string());

        char magic[4];
        in.read(magic, 4);
        if (!in || std::string_view(magic, 4) != kMagic)
            throw CorruptStoreError("bad magic");
        if (read_u32(in) != kVersion) throw CorruptStoreError("unsupported version");

        VectorStore store;
        store.dim_ = read_u32(in);
        std::uint64_t count = read_u64(in);
        if (!in) throw CorruptStoreError("truncated header");
        for (std::uint64_t i = 0; i < count; ++i) {
            Entry entry;
            entry.chunk.doc_id = read_str(in);
            entry.chunk.seq = read_u32(in);
            entry.chunk.token_count = read_u32(in);
            entry.chunk.text = read_str(in);
            entry.vector.values.resize(store.dim_);
            in.read(reinterpret_cast<char*>(entry.vector.values.data()),
                    static_cast<std::streamsize>(sizeof(double) * store.dim_));
            if (!in) throw CorruptStoreError("truncated record " + std::to_string(i));
            store.entries_[{entry.chunk.doc_id, entry.chunk.seq}] = std::move(entry);
        }
        if (in.peek() != std::char_traits<char>::eof())
            throw CorruptStoreError("trailing bytes after last record");
        return store;
    }

private:
    struct Entry {
        Chunk chunk;
        EmbeddingVector vector;
    };

    static constexpr const char* kMagic = "AVKB";
    static constexpr std::uint32_t kVersion = 1;

    static void write_u32(std::ostream& out, std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    static void write_u64(std::ostream& out, std::uint64_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    static void write_str(std::ostream& out, const std::string& s) {
        write_u32(out, static_cast<std::uint32_t>(s.size()));
        out.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    static std::uint32_t read_u32(std::istream& in) {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }
    static std::uint64_t read_u64(std::istream& in) {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }
    static std::string read_str(std::istream& in) {
        std::uint32_t len = read_u32(in);
        if (!in) throw CorruptStoreError("truncated string length");
        if (len > (1u << 28)) throw CorruptStoreError("implausible string length");
        std::string s(len, '\0');
        in.read(s.data(), static_cast<std::streamsize>(len));
        if (!in) throw CorruptStoreError("truncated string");
        return s;
    }

    std::map<std::pair<std::string, std::uint32_t>, Entry> entries_;
    std::size_t dim_ = 0;
};

// ---- RAG prompt assembly ----

// Template input = one "[doc_id#seq] chunk text" line per hit (in hit
// order) followed by a blank line and "Question: ...".
inline RenderedPrompt assemble_rag_prompt(std::string_view question,
                                          const std::vector<RetrievalHit>& hits,
                                          const PromptTemplate& tmpl) {
    if (hits.empty()) throw NoContextError();
    std::string input;
    for (const RetrievalHit& hit : hits) {
        input += "[" + hit.chunk.doc_id + "#" + std::to_string(hit.chunk.seq) + "] " +
                 hit.chunk.text + "\n";
    }
    input += "\nQuestion: " + std::string(question);
    return render(tmpl, input);
}

}  // namespace avtext
