#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msift/types.hpp"

namespace msift {

struct EmbedConfig {
  std::string endpoint;                // e.g. http://host:port/v1/embeddings
  std::optional<std::string> api_key;  // sent as a bearer token when set
  std::size_t batch_size = 64;
  int max_retries = 3;
  double timeout_s = 30.0;
  double backoff_base_s = 0.5;  // full-jitter exponential backoff
  int workers = 1;              // parallel in-flight batches
};

/// Fetches one embedding per text, in input order, splitting the list into
/// ceil(n / batch_size) requests. Wire format: POST {"input": [str, ...]} ->
/// {"data": [{"index": int, "embedding": [number, ...]}, ...]}; replies are
/// re-ordered by their index field. Transient failures (HTTP 429/5xx,
/// timeouts, connection errors) are retried with exponential backoff up to
/// max_retries; any other 4xx or exhausted retries raise RemoteError.
std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts,
                                             const EmbedConfig& config);

/// Fills in embeddings for every record that lacks one. Records already
/// embedded are left untouched (a fully embedded dataset makes no network
/// calls). All embeddings, pre-existing and fetched, must agree on one
/// dimension. Returns the number of embeddings fetched.
std::size_t attach_embeddings(std::vector<InstructionRecord>& records, const EmbedConfig& config);

}  // namespace msift
