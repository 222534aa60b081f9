#pragma once

#include <unistd.h>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "msift/types.hpp"

namespace msift::test {

// Nineteen generators across six families, every family rankable.
inline ModelCatalog make_test_catalog() {
  return ModelCatalog{{
      {"qwen2-1.5b", "qwen2", 1.5},
      {"qwen2-7b", "qwen2", 7},
      {"qwen2-72b", "qwen2", 72},
      {"qwen2.5-3b-instruct", "qwen2.5", 3},
      {"qwen2.5-7b", "qwen2.5", 7},
      {"qwen2.5-14b", "qwen2.5", 14},
      {"qwen2.5-32b", "qwen2.5", 32},
      {"qwen2.5-72b", "qwen2.5", 72},
      {"llama3-8b", "llama3", 8},
      {"llama3-70b", "llama3", 70},
      {"llama3.1-8b", "llama3.1", 8},
      {"llama3.1-70b", "llama3.1", 70},
      {"llama3.1-405b", "llama3.1", 405},
      {"gemma2-2b", "gemma2", 2},
      {"gemma2-9b", "gemma2", 9},
      {"gemma2-27b", "gemma2", 27},
      {"phi3-mini", "phi3", 3.8},
      {"phi3-small", "phi3", 7},
      {"phi3-medium", "phi3", 14},
  }};
}

inline InstructionRecord make_record(std::string id, std::string instruction,
                                     std::vector<std::pair<std::string, double>> model_rewards,
                                     const std::string& reward_key = "rm") {
  InstructionRecord rec;
  rec.id = std::move(id);
  rec.instruction = std::move(instruction);
  for (auto& [model, reward] : model_rewards) {
    ResponseEntry r;
    r.model_id = model;
    r.text = "reply from " + model;
    r.rewards[reward_key] = reward;
    rec.responses.push_back(std::move(r));
  }
  return rec;
}

class TempDir {
 public:
  TempDir() {
    static std::size_t counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("msift_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string write(const std::string& name, const std::string& contents) const {
    const std::filesystem::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    out << contents;
    return p.string();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  std::filesystem::path dir_;
};

// Quadratic tie-averaged rank reference: rank = 1 + #better + #tied_others / 2.
inline std::vector<double> rank_oracle(const std::vector<double>& values, bool higher_is_better) {
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t better = 0, tied = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j == i) continue;
      const bool j_better = higher_is_better ? values[j] > values[i] : values[j] < values[i];
      if (j_better) {
        ++better;
      } else if (values[j] == values[i]) {
        ++tied;
      }
    }
    ranks[i] = 1.0 + static_cast<double>(better) + static_cast<double>(tied) / 2.0;
  }
  return ranks;
}

// Pearson correlation evaluated directly from its definition.
inline double pearson_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

}  // namespace msift::test
