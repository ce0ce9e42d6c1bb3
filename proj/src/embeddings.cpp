#include "cvxga/embeddings.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cvxga/errors.hpp"

namespace cvxga::embeddings {

namespace {

struct ParsedUrl {
    std::string base; // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ParameterError("fetch_embeddings: endpoint must include a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// One batch with retry/backoff; returns the embedding rows.
std::vector<std::vector<double>> post_batch(httplib::Client& client, const std::string& path,
                                            const std::string& api_key,
                                            const EmbeddingFetchConfig& cfg,
                                            const std::vector<std::string>& batch) {
    nlohmann::json body;
    body["model"] = cfg.model;
    body["input"] = batch;
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    int backoff = cfg.backoff_ms;
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw FetchError("fetch_embeddings: HTTP " + std::to_string(res->status) + ": " +
                             res->body);
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(res->body);
        } catch (const std::exception& e) {
            throw FetchError(std::string("fetch_embeddings: bad JSON response: ") + e.what());
        }
        const nlohmann::json& data = j.contains("data") ? j["data"] : j;
        if (!data.is_array() || data.size() != batch.size()) {
            throw FetchError("fetch_embeddings: response count mismatch");
        }
        std::vector<std::vector<double>> rows;
        rows.reserve(batch.size());
        for (const auto& item : data) {
            if (!item.contains("embedding") || !item["embedding"].is_array()) {
                throw FetchError("fetch_embeddings: missing embedding array");
            }
            rows.push_back(item["embedding"].get<std::vector<double>>());
        }
        return rows;
    }
    throw FetchError("fetch_embeddings: failed after " + std::to_string(cfg.retries + 1) +
                     " attempts (" + last_error + ")");
}

} // namespace

Eigen::MatrixXd fetch_embeddings(const std::vector<std::string>& texts,
                                 const EmbeddingFetchConfig& cfg) {
    if (texts.empty()) throw ParameterError("fetch_embeddings: empty input");
    if (cfg.batch_size < 1) throw ParameterError("fetch_embeddings: batch size must be >= 1");

    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ParameterError("fetch_embeddings: environment variable " + cfg.api_key_env +
                             " is not set");
    }

    const ParsedUrl url = parse_url(cfg.endpoint);
    httplib::Client client(url.base);
    client.set_connection_timeout(cfg.timeout_seconds);
    client.set_read_timeout(cfg.timeout_seconds);

    std::vector<std::vector<double>> all;
    all.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t end = std::min(texts.size(), start + static_cast<std::size_t>(cfg.batch_size));
        const std::vector<std::string> batch(texts.begin() + static_cast<long>(start),
                                             texts.begin() + static_cast<long>(end));
        auto rows = post_batch(client, url.path, key, cfg, batch);
        for (auto& r : rows) all.push_back(std::move(r));
    }

    const std::size_t dim = all.front().size();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].size() != dim) {
            throw FetchError("fetch_embeddings: inconsistent embedding dimension at row " +
                             std::to_string(i));
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(all.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = 0; j < dim; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = all[i][j];
    }
    return out;
}

} // namespace cvxga::embeddings
