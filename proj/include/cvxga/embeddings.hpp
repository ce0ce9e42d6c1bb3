#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvxga::embeddings {

// Generic JSON embeddings endpoint. The API key is read from the named
// environment variable, never passed as a flag.
struct EmbeddingFetchConfig {
    std::string endpoint = "http://localhost:8080/v1/embeddings";
    std::string model = "text-embedding-3-small";
    std::string api_key_env = "EMBEDDINGS_API_KEY";
    int batch_size = 64;
    int timeout_seconds = 30;
    int retries = 3;
    int backoff_ms = 250; // doubled per retry
};

// Batched POST of {"model": ..., "input": [...]}; expects a response whose
// "data" array holds {"embedding": [...]} objects in input order. Retries
// with exponential backoff on 429/5xx. Returns an n x d matrix in input
// order; throws FetchError / ParameterError.
Eigen::MatrixXd fetch_embeddings(const std::vector<std::string>& texts,
                                 const EmbeddingFetchConfig& cfg);

} // namespace cvxga::embeddings
