#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace isic {

class Taxonomy;

using Vec = std::vector<double>;

// dot(u,v) / (|u| |v|), clamped to [-1, 1] against rounding.
// Throws InvalidArgument on dimension mismatch or a zero-norm input.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// Behavioral contract for embedding sources. Implementations must be
// deterministic (same text, same vector) and never return an all-zero vector
// for non-empty input. `embed_batch` validates inputs and outputs around the
// backend call: texts must be non-empty after trimming, results must be
// finite, of the declared dimension, nonzero, and in request order.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    const std::string& id() const { return id_; }
    std::size_t dim() const { return dim_; }

    std::vector<Vec> embed_batch(const std::vector<std::string>& texts);
    Vec embed(const std::string& text);

protected:
    EmbeddingProvider(std::string id, std::size_t dim);

    virtual std::vector<Vec> do_embed(const std::vector<std::string>& texts) = 0;

private:
    std::string id_;
    std::size_t dim_;
};

// Deterministic, dependency-free reference provider. Scheme: split the text
// on non-alphanumeric boundaries, lowercase each token, and add 1.0 to bucket
// fnv1a64(token) % dim. A text with no alphanumeric characters falls back to
// the single empty-string token so the vector is never all-zero.
class HashingProvider final : public EmbeddingProvider {
public:
    explicit HashingProvider(std::size_t dim);

protected:
    std::vector<Vec> do_embed(const std::vector<std::string>& texts) override;
};

// Client for the HTTP embedding protocol: POST {base_url}/v1/embed with
// {"texts": [...]}, expecting {"provider_id", "dim", "vectors"} in request
// order. The constructor probes the endpoint once to learn the dimension and
// to verify the server identifies as `id`. Any transport or non-2xx failure
// is reported as a provider error carrying the provider id.
class RemoteProvider final : public EmbeddingProvider {
public:
    RemoteProvider(const std::string& id, const std::string& base_url);
    ~RemoteProvider() override;

protected:
    std::vector<Vec> do_embed(const std::vector<std::string>& texts) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Write-through cache around another provider. Cache records are JSON Lines
// of {"provider_id", "dim", "text_sha256", "values"}; lookups key on
// (provider_id, text_sha256). Cached and uncached paths return identical
// vectors. Writes are serialized; a hit is visible to every later lookup.
class CachingProvider final : public EmbeddingProvider {
public:
    CachingProvider(std::unique_ptr<EmbeddingProvider> inner, std::string cache_path);

    std::size_t hit_count() const { return hits_; }
    std::size_t miss_count() const { return misses_; }

protected:
    std::vector<Vec> do_embed(const std::vector<std::string>& texts) override;

private:
    std::unique_ptr<EmbeddingProvider> inner_;
    std::string cache_path_;
    std::unordered_map<std::string, Vec> by_sha_;
    std::mutex mutex_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

// Parses "hashing:<dim>" or "<id>@<http url>" into a live provider.
std::unique_ptr<EmbeddingProvider> make_provider(const std::string& descriptor);

// Per-category embedding store for the similarity phase: one vector per
// target label, embedded from the label's taxonomy description.
struct CategoryRepository {
    std::string provider_id;
    std::size_t dim = 0;
    std::vector<std::pair<std::string, Vec>> entries;  // ascending code order
};

// Embeds describe(label) for every target label. Labels must be unique and
// present in the taxonomy; an empty label set is an error.
CategoryRepository build_category_repository(const Taxonomy& taxonomy,
                                             const std::vector<std::string>& labels,
                                             EmbeddingProvider& provider);

// Label maximizing cosine similarity to the query; ties break toward the
// lexicographically smaller code. Exhaustive scan, exact at these sizes.
std::pair<std::string, double> nearest_category(const CategoryRepository& repository,
                                                std::span<const double> query);

}  // namespace isic
