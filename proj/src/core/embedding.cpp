#include "core/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/hash.hpp"
#include "core/taxonomy.hpp"

namespace isic {

using nlohmann::json;

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorCode::InvalidArgument, "cosine: dimension mismatch (" + std::to_string(u.size()) +
                                                    " vs " + std::to_string(v.size()) + ")");
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "cosine: zero-norm input");
    }
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

EmbeddingProvider::EmbeddingProvider(std::string id, std::size_t dim) : id_(std::move(id)), dim_(dim) {
    if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "provider dimension must be >= 1");
}

std::vector<Vec> EmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
    for (const std::string& text : texts) {
        if (trim(text).empty()) {
            throw Error(ErrorCode::InvalidArgument, "cannot embed empty text");
        }
    }
    if (texts.empty()) return {};
    std::vector<Vec> vectors = do_embed(texts);
    if (vectors.size() != texts.size()) {
        throw Error(ErrorCode::Provider,
                    "provider '" + id_ + "' returned " + std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");
    }
    for (const Vec& v : vectors) {
        if (v.size() != dim_) {
            throw Error(ErrorCode::Provider, "provider '" + id_ + "' returned a vector of dimension " +
                                                 std::to_string(v.size()) + ", expected " + std::to_string(dim_));
        }
        bool nonzero = false;
        for (double x : v) {
            if (!std::isfinite(x)) {
                throw Error(ErrorCode::Provider, "provider '" + id_ + "' returned a non-finite value");
            }
            if (x != 0.0) nonzero = true;
        }
        if (!nonzero) {
            throw Error(ErrorCode::Provider, "provider '" + id_ + "' returned an all-zero vector");
        }
    }
    return vectors;
}

Vec EmbeddingProvider::embed(const std::string& text) { return embed_batch({text})[0]; }

HashingProvider::HashingProvider(std::size_t dim)
    : EmbeddingProvider("hashing:" + std::to_string(dim), dim) {}

std::vector<Vec> HashingProvider::do_embed(const std::vector<std::string>& texts) {
    std::vector<Vec> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        Vec v(dim(), 0.0);
        std::string token;
        bool any_token = false;
        auto flush = [&] {
            if (token.empty()) return;
            v[fnv1a64(token) % dim()] += 1.0;
            any_token = true;
            token.clear();
        };
        for (unsigned char c : text) {
            if (std::isalnum(c)) {
                token += static_cast<char>(std::tolower(c));
            } else {
                flush();
            }
        }
        flush();
        if (!any_token) {
            v[fnv1a64("") % dim()] += 1.0;
        }
        out.push_back(std::move(v));
    }
    return out;
}

struct RemoteProvider::Impl {
    std::string base_url;
    httplib::Client client;
    std::mutex mutex;  // httplib clients are not thread-safe

    explicit Impl(const std::string& url) : base_url(url), client(url) {}
};

namespace {

// One wire round-trip; shared by the constructor probe and do_embed.
std::vector<Vec> remote_request(httplib::Client& client, const std::string& provider_id,
                                const std::vector<std::string>& texts, std::string* seen_id,
                                std::size_t* seen_dim) {
    json body = {{"texts", texts}};
    httplib::Result res = client.Post("/v1/embed", body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorCode::Provider, "provider '" + provider_id +
                                             "': transport failure (" + httplib::to_string(res.error()) + ")");
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::Provider,
                    "provider '" + provider_id + "': HTTP " + std::to_string(res->status));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("provider_id") || !parsed.contains("dim") ||
        !parsed.contains("vectors")) {
        throw Error(ErrorCode::Provider, "provider '" + provider_id + "': malformed response body");
    }
    *seen_id = parsed["provider_id"].get<std::string>();
    *seen_dim = parsed["dim"].get<std::size_t>();
    std::vector<Vec> vectors;
    for (const json& row : parsed["vectors"]) {
        vectors.push_back(row.get<Vec>());
    }
    return vectors;
}

std::size_t probe_dimension(httplib::Client& client, const std::string& id) {
    std::string seen_id;
    std::size_t seen_dim = 0;
    remote_request(client, id, {"dimension probe"}, &seen_id, &seen_dim);
    if (seen_id != id) {
        throw Error(ErrorCode::Provider,
                    "provider '" + id + "': endpoint identifies as '" + seen_id + "'");
    }
    if (seen_dim == 0) {
        throw Error(ErrorCode::Provider, "provider '" + id + "': endpoint reports dimension 0");
    }
    return seen_dim;
}

}  // namespace

RemoteProvider::RemoteProvider(const std::string& id, const std::string& base_url)
    : EmbeddingProvider(id, [&] {
          httplib::Client probe(base_url);
          probe.set_connection_timeout(5, 0);
          return probe_dimension(probe, id);
      }()),
      impl_(std::make_unique<Impl>(base_url)) {}

RemoteProvider::~RemoteProvider() = default;

std::vector<Vec> RemoteProvider::do_embed(const std::vector<std::string>& texts) {
    std::scoped_lock lock(impl_->mutex);
    std::string seen_id;
    std::size_t seen_dim = 0;
    std::vector<Vec> vectors = remote_request(impl_->client, id(), texts, &seen_id, &seen_dim);
    if (seen_id != id() || seen_dim != dim()) {
        throw Error(ErrorCode::Provider, "provider '" + id() + "': endpoint changed identity mid-session");
    }
    return vectors;
}

CachingProvider::CachingProvider(std::unique_ptr<EmbeddingProvider> inner, std::string cache_path)
    : EmbeddingProvider(inner->id(), inner->dim()),
      inner_(std::move(inner)),
      cache_path_(std::move(cache_path)) {
    std::ifstream in(cache_path_);
    if (!in) return;  // nothing cached yet
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("provider_id") || !rec.contains("dim") ||
            !rec.contains("text_sha256") || !rec.contains("values")) {
            throw Error(ErrorCode::Parse,
                        "embedding cache '" + cache_path_ + "' line " + std::to_string(lineno) + ": bad record");
        }
        if (rec["provider_id"].get<std::string>() != id()) continue;
        if (rec["dim"].get<std::size_t>() != dim()) {
            throw Error(ErrorCode::Parse, "embedding cache '" + cache_path_ + "' line " +
                                              std::to_string(lineno) + ": dimension mismatch for provider '" +
                                              id() + "'");
        }
        by_sha_[rec["text_sha256"].get<std::string>()] = rec["values"].get<Vec>();
    }
}

std::vector<Vec> CachingProvider::do_embed(const std::vector<std::string>& texts) {
    std::scoped_lock lock(mutex_);
    std::vector<std::string> shas(texts.size());
    std::vector<std::string> missing_texts;
    std::vector<std::string> missing_shas;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        shas[i] = sha256_hex(texts[i]);
        if (!by_sha_.count(shas[i])) {
            // duplicates within the batch fetch once
            bool queued = std::find(missing_shas.begin(), missing_shas.end(), shas[i]) != missing_shas.end();
            if (!queued) {
                missing_texts.push_back(texts[i]);
                missing_shas.push_back(shas[i]);
            }
            ++misses_;
        } else {
            ++hits_;
        }
    }
    if (!missing_texts.empty()) {
        std::vector<Vec> fetched = inner_->embed_batch(missing_texts);
        std::ofstream out(cache_path_, std::ios::app);
        if (!out) throw Error(ErrorCode::Io, "cannot append to embedding cache '" + cache_path_ + "'");
        for (std::size_t i = 0; i < fetched.size(); ++i) {
            by_sha_[missing_shas[i]] = fetched[i];
            json rec = {{"provider_id", id()},
                        {"dim", dim()},
                        {"text_sha256", missing_shas[i]},
                        {"values", fetched[i]}};
            out << rec.dump() << '\n';
        }
    }
    std::vector<Vec> out;
    out.reserve(texts.size());
    for (const std::string& sha : shas) out.push_back(by_sha_.at(sha));
    return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& descriptor) {
    if (descriptor.rfind("hashing:", 0) == 0) {
        std::string dim_text = descriptor.substr(8);
        std::size_t dim = 0;
        try {
            dim = std::stoul(dim_text);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "bad provider descriptor '" + descriptor + "'");
        }
        if (dim == 0 || std::to_string(dim) != dim_text) {
            throw Error(ErrorCode::InvalidArgument, "bad provider descriptor '" + descriptor + "'");
        }
        return std::make_unique<HashingProvider>(dim);
    }
    std::size_t at = descriptor.find('@');
    if (at != std::string::npos && at > 0 && at + 1 < descriptor.size()) {
        return std::make_unique<RemoteProvider>(descriptor.substr(0, at), descriptor.substr(at + 1));
    }
    throw Error(ErrorCode::InvalidArgument, "bad provider descriptor '" + descriptor +
                                                "' (expected 'hashing:<dim>' or '<id>@<url>')");
}

CategoryRepository build_category_repository(const Taxonomy& taxonomy,
                                             const std::vector<std::string>& labels,
                                             EmbeddingProvider& provider) {
    if (labels.empty()) throw Error(ErrorCode::InvalidArgument, "empty target label set");
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::InvalidArgument, "duplicate label in target label set");
    }
    std::vector<std::string> texts;
    texts.reserve(sorted.size());
    for (const std::string& label : sorted) {
        texts.push_back(taxonomy.describe(label));  // throws NotFound for unknown labels
    }
    std::vector<Vec> vectors = provider.embed_batch(texts);
    CategoryRepository repo;
    repo.provider_id = provider.id();
    repo.dim = provider.dim();
    repo.entries.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        repo.entries.emplace_back(sorted[i], std::move(vectors[i]));
    }
    return repo;
}

std::pair<std::string, double> nearest_category(const CategoryRepository& repository,
                                                std::span<const double> query) {
    if (repository.entries.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty category repository");
    }
    if (query.size() != repository.dim) {
        throw Error(ErrorCode::InvalidArgument, "query dimension " + std::to_string(query.size()) +
                                                    " does not match repository dimension " +
                                                    std::to_string(repository.dim));
    }
    const std::string* best_label = nullptr;
    double best_score = 0.0;
    for (const auto& [label, vec] : repository.entries) {
        double score = cosine_similarity(query, vec);
        // strict > keeps the lexicographically smaller code on ties
        if (!best_label || score > best_score) {
            best_label = &label;
            best_score = score;
        }
    }
    return {*best_label, best_score};
}

}  // namespace isic
