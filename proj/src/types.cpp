#include "msift/types.hpp"

namespace msift {

ModelCatalog::ModelCatalog(std::vector<ModelInfo> models) : models_(std::move(models)) {
  if (models_.empty()) throw ValidationError("catalog: no models");
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const ModelInfo& m = models_[i];
    if (m.id.empty()) {
      throw ValidationError("catalog model #" + std::to_string(i) + ": empty id");
    }
    if (!(m.params_b > 0.0)) {
      throw ValidationError("catalog model '" + m.id + "': params_b must be positive");
    }
    if (!by_id_.emplace(m.id, i).second) {
      throw ValidationError("catalog model '" + m.id + "': duplicate id");
    }
    families_[m.family].push_back(m);
  }
}

std::string reward_keys_of(const ResponseEntry& response) {
  std::string out;
  for (const auto& [key, value] : response.rewards) {
    if (!out.empty()) out += ", ";
    out += key;
  }
  return out;
}

const ModelInfo* ModelCatalog::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &models_[it->second];
}

std::size_t ModelCatalog::rankable_family_count() const {
  std::size_t count = 0;
  for (const auto& [name, members] : families_) {
    if (members.size() >= 2) ++count;
  }
  return count;
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::kDifficulty: return "difficulty";
    case Metric::kSeparability: return "separability";
    case Metric::kStability: return "stability";
    case Metric::kMulti: return "multi";
    case Metric::kRandom: return "random";
    case Metric::kLength: return "length";
  }
  return "?";
}

std::string to_string(Direction d) {
  return d == Direction::kTop ? "top" : "bottom";
}

std::string to_string(ResponseStrategy s) {
  switch (s) {
    case ResponseStrategy::kBest: return "best";
    case ResponseStrategy::kRandom: return "random";
    case ResponseStrategy::kTop5Random: return "top5_random";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  if (s == "difficulty") return Metric::kDifficulty;
  if (s == "separability") return Metric::kSeparability;
  if (s == "stability") return Metric::kStability;
  if (s == "multi") return Metric::kMulti;
  if (s == "random") return Metric::kRandom;
  if (s == "length") return Metric::kLength;
  throw ValidationError("unknown metric '" + s + "'");
}

Direction direction_from_string(const std::string& s) {
  if (s == "top") return Direction::kTop;
  if (s == "bottom") return Direction::kBottom;
  throw ValidationError("unknown direction '" + s + "' (expected top or bottom)");
}

ResponseStrategy strategy_from_string(const std::string& s) {
  if (s == "best") return ResponseStrategy::kBest;
  if (s == "random") return ResponseStrategy::kRandom;
  if (s == "top5_random") return ResponseStrategy::kTop5Random;
  throw ValidationError("unknown response strategy '" + s + "'");
}

}  // namespace msift
