#include "msift/embed_client.hpp"

#include <httplib.h>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "msift/util.hpp"

namespace msift {
namespace {

using nlohmann::json;

struct ParsedEndpoint {
  std::string host;
  int port = 80;
  std::string path = "/";
};

ParsedEndpoint parse_endpoint(const std::string& url) {
  static constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0) {
    throw ValidationError("embed endpoint must start with http:// : '" + url + "'");
  }
  ParsedEndpoint out;
  const std::string rest = url.substr(kScheme.size());
  const auto slash = rest.find('/');
  const std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
  if (slash != std::string::npos) out.path = rest.substr(slash);
  const auto colon = hostport.rfind(':');
  if (colon == std::string::npos) {
    out.host = hostport;
  } else {
    out.host = hostport.substr(0, colon);
    try {
      out.port = std::stoi(hostport.substr(colon + 1));
    } catch (const std::exception&) {
      out.port = -1;
    }
  }
  if (out.host.empty() || out.port <= 0 || out.port > 65535) {
    throw ValidationError("embed endpoint '" + url + "' is not of the form http://host[:port][/path]");
  }
  return out;
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

void backoff_sleep(int attempt, double base_s) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const double cap = base_s * std::pow(2.0, attempt);
  const double delay = cap * uniform_real01(rng);  // full jitter
  if (delay > 0) std::this_thread::sleep_for(std::chrono::duration<double>(delay));
}

std::vector<std::vector<double>> parse_reply(const std::string& body, std::size_t expected,
                                             const std::string& endpoint) {
  json reply = json::parse(body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("data") ||
      !reply["data"].is_array()) {
    throw RemoteError("embed endpoint '" + endpoint + "' returned a malformed reply");
  }
  const json& data = reply["data"];
  if (data.size() != expected) {
    throw RemoteError("embed endpoint '" + endpoint + "' returned " + std::to_string(data.size()) +
                      " embeddings for " + std::to_string(expected) + " inputs");
  }
  std::vector<std::vector<double>> out(expected);
  std::vector<bool> seen(expected, false);
  for (const json& item : data) {
    if (!item.is_object() || !item.contains("index") || !item["index"].is_number_integer() ||
        !item.contains("embedding") || !item["embedding"].is_array()) {
      throw RemoteError("embed endpoint '" + endpoint + "' returned a malformed data entry");
    }
    const auto index = item["index"].get<long long>();
    if (index < 0 || static_cast<std::size_t>(index) >= expected || seen[index]) {
      throw RemoteError("embed endpoint '" + endpoint + "' returned a bad or duplicate index " +
                        std::to_string(index));
    }
    seen[index] = true;
    std::vector<double>& vec = out[index];
    vec.reserve(item["embedding"].size());
    for (const json& v : item["embedding"]) {
      if (!v.is_number()) {
        throw RemoteError("embed endpoint '" + endpoint + "' returned a non-numeric embedding");
      }
      vec.push_back(v.get<double>());
    }
    if (vec.empty()) {
      throw RemoteError("embed endpoint '" + endpoint + "' returned an empty embedding");
    }
  }
  return out;
}

std::vector<std::vector<double>> request_batch(std::span<const std::string> texts,
                                               const ParsedEndpoint& where,
                                               const EmbedConfig& config) {
  json payload;
  payload["input"] = json::array();
  for (const std::string& t : texts) payload["input"].push_back(t);
  const std::string body = payload.dump();

  httplib::Headers headers;
  if (config.api_key) headers.emplace("Authorization", "Bearer " + *config.api_key);

  const auto timeout =
      std::chrono::milliseconds(static_cast<long long>(config.timeout_s * 1000.0));
  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) backoff_sleep(attempt - 1, config.backoff_base_s);
    httplib::Client client(where.host, where.port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Result res = client.Post(where.path, headers, body, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return parse_reply(res->body, texts.size(), config.endpoint);
    if (retryable_status(res->status)) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    throw RemoteError("embed endpoint '" + config.endpoint + "' rejected the request with HTTP " +
                      std::to_string(res->status));
  }
  throw RemoteError("embed endpoint '" + config.endpoint + "' failed after " +
                    std::to_string(config.max_retries + 1) + " attempts (last: " + last_failure +
                    ")");
}

}  // namespace

std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts,
                                             const EmbedConfig& config) {
  if (config.batch_size == 0) throw ValidationError("embed batch size must be positive");
  if (config.max_retries < 0) throw ValidationError("embed max retries must be non-negative");
  const ParsedEndpoint where = parse_endpoint(config.endpoint);
  if (texts.empty()) return {};

  const std::size_t batches = (texts.size() + config.batch_size - 1) / config.batch_size;
  std::vector<std::vector<std::vector<double>>> slots(batches);
  const std::size_t workers =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::max(1, config.workers)));
  parallel_for(batches, workers, [&](std::size_t b) {
    const std::size_t begin = b * config.batch_size;
    const std::size_t end = std::min(texts.size(), begin + config.batch_size);
    slots[b] = request_batch(texts.subspan(begin, end - begin), where, config);
  });

  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (auto& slot : slots) {
    for (auto& vec : slot) out.push_back(std::move(vec));
  }
  for (const auto& vec : out) {
    if (vec.size() != out.front().size()) {
      throw RemoteError("embed endpoint '" + config.endpoint +
                        "' returned embeddings of mixed dimension");
    }
  }
  return out;
}

std::size_t attach_embeddings(std::vector<InstructionRecord>& records, const EmbedConfig& config) {
  std::size_t existing_dim = 0;
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].embedding) {
      existing_dim = records[i].embedding->size();
    } else {
      missing.push_back(i);
    }
  }
  if (missing.empty()) return 0;

  std::vector<std::string> texts;
  texts.reserve(missing.size());
  for (std::size_t i : missing) texts.push_back(records[i].instruction);
  std::vector<std::vector<double>> fetched = embed_batch(texts, config);

  if (existing_dim != 0 && fetched.front().size() != existing_dim) {
    throw ValidationError("fetched embeddings have dimension " +
                          std::to_string(fetched.front().size()) +
                          " but the dataset already holds dimension " +
                          std::to_string(existing_dim));
  }
  for (std::size_t j = 0; j < missing.size(); ++j) {
    records[missing[j]].embedding = std::move(fetched[j]);
  }
  return missing.size();
}

}  // namespace msift
