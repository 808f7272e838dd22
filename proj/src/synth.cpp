#include "rekom/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "rekom/error.hpp"
#include "rekom/random.hpp"

namespace rekom {

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  c.counts = {{"user", 500}, {"database", 80}, {"curated-source", 70},
              {"table", 600}, {"workflow", 350}, {"workbook", 400}};
  c.lineage = {{"database", "table", "lineage", 4.0},
               {"curated-source", "table", "lineage", 3.0},
               {"table", "workflow", "lineage", 1.5},
               {"workflow", "workbook", "lineage", 2.0}};
  return c;
}

SynthConfig SynthConfig::scaled(double factor) const {
  SynthConfig c = *this;
  for (auto& [type, count] : c.counts) count = static_cast<int>(std::ceil(count * factor));
  return c;
}

const std::vector<std::pair<std::string, std::string>>& allowed_edge_schema() {
  static const std::vector<std::pair<std::string, std::string>> schema = {
      {"database", "table"}, {"curated-source", "table"}, {"table", "workflow"},
      {"workflow", "workbook"}, {"user", "workbook"}, {"user", "table"}};
  return schema;
}

void SynthConfig::validate(const AssetTypeRegistry& registry) const {
  long long total = 0;
  for (const auto& [type, count] : counts) {
    if (!registry.find(type)) throw ValidationError("unknown asset type in counts: " + type);
    if (count < 0) throw ValidationError("negative node count for " + type);
    total += count;
  }
  if (total == 0) throw ValidationError("synthetic graph needs at least one node");
  const auto& schema = allowed_edge_schema();
  for (const auto& rule : lineage) {
    if (!(rule.mean_fanout >= 0.0)) throw ValidationError("fan-out must be >= 0");
    if (std::find(schema.begin(), schema.end(), std::pair{rule.src_type, rule.dst_type}) == schema.end()) {
      throw ValidationError("edge " + rule.src_type + " -> " + rule.dst_type + " is outside the lineage schema");
    }
  }
  if (!(owns_per_user >= 0.0) || !(views_per_user >= 0.0)) throw ValidationError("per-user rates must be >= 0");
  if (!(popularity_sigma >= 0.0) || !std::isfinite(popularity_sigma)) {
    throw ValidationError("popularity_sigma must be a finite number >= 0");
  }
}

namespace {

std::string id_prefix(const std::string& type) {
  static const std::map<std::string, std::string> prefixes = {
      {"user", "user"},    {"database", "db"}, {"table", "tbl"},
      {"workflow", "wf"},  {"workbook", "wb"}, {"curated-source", "cs"}};
  auto it = prefixes.find(type);
  return it == prefixes.end() ? type : it->second;
}

std::string display_name(const std::string& type, int n) {
  std::string name = type;
  std::replace(name.begin(), name.end(), '-', ' ');
  if (!name.empty()) name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  return name + " " + std::to_string(n);
}

/// Draws candidates with probability proportional to their weight.
class WeightedPicker {
 public:
  WeightedPicker(std::vector<std::size_t> candidates, const std::vector<double>& weight)
      : candidates_(std::move(candidates)) {
    cumulative_.reserve(candidates_.size());
    double total = 0.0;
    for (std::size_t c : candidates_) cumulative_.push_back(total += weight[c]);
  }
  bool empty() const { return candidates_.empty(); }
  std::size_t size() const { return candidates_.size(); }
  std::size_t draw(std::mt19937_64& rng) const {
    const double r = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return candidates_[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), candidates_.size() - 1)];
  }

 private:
  std::vector<std::size_t> candidates_;
  std::vector<double> cumulative_;
};

}  // namespace

SynthGraph generate_graph(const SynthConfig& config, const AssetTypeRegistry& registry) {
  config.validate(registry);
  std::mt19937_64 rng(derive_seed(config.seed, 7));

  SynthGraph out;
  std::map<std::string, std::vector<std::size_t>> by_type;
  for (const auto& type : registry.types()) {
    auto it = config.counts.find(type.name);
    const int count = it == config.counts.end() ? 0 : it->second;
    for (int k = 1; k <= count; ++k) {
      std::uniform_int_distribution<int> day(0, 3 * 365 - 1);
      const int d = day(rng);
      char created[16];
      std::snprintf(created, sizeof created, "%04d-%02d-%02d", 2021 + d / 365, 1 + (d % 365) / 31 % 12,
                    1 + d % 28);
      by_type[type.name].push_back(out.nodes.size());
      NodeRecord rec;
      rec.id = id_prefix(type.name) + "-" + std::to_string(k);
      rec.asset_type = type;
      rec.label = display_name(type.name, k);
      rec.meta = {{"created", created}};
      rec.meta_json = std::string("{\"created\":\"") + created + "\"}";
      out.nodes.push_back(std::move(rec));
    }
  }

  std::vector<double> popularity(out.nodes.size(), 1.0);
  if (config.popularity_sigma > 0.0) {
    std::lognormal_distribution<double> spread(0.0, config.popularity_sigma);
    for (double& w : popularity) w = spread(rng);
  }

  std::unordered_set<std::uint64_t> seen;
  auto add_edge = [&](std::size_t a, std::size_t b, const std::string& relation) {
    const std::uint64_t key = (std::uint64_t{std::min(a, b)} << 32) | std::max(a, b);
    if (a == b || !seen.insert(key).second) return false;
    out.edges.push_back({out.nodes[a].id, out.nodes[b].id, relation});
    return true;
  };

  // Each source emits Poisson(mean * relative popularity) distinct targets.
  auto connect = [&](const std::vector<std::size_t>& sources, const WeightedPicker& targets, double mean,
                     const std::string& relation) {
    if (sources.empty() || targets.empty() || mean <= 0.0) return;
    double mean_popularity = 0.0;
    for (std::size_t src : sources) mean_popularity += popularity[src];
    mean_popularity /= static_cast<double>(sources.size());
    for (std::size_t src : sources) {
      std::poisson_distribution<int> fanout(mean * popularity[src] / mean_popularity);
      const int k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(fanout(rng)), targets.size()));
      for (int e = 0, tries = 0; e < k && tries < 8 * k; ++tries) {
        if (add_edge(src, targets.draw(rng), relation)) ++e;
      }
    }
  };

  for (const auto& rule : config.lineage) {
    connect(by_type[rule.src_type], WeightedPicker(by_type[rule.dst_type], popularity), rule.mean_fanout,
            rule.relation);
  }

  std::vector<std::size_t> content = by_type["workbook"];
  content.insert(content.end(), by_type["table"].begin(), by_type["table"].end());
  const WeightedPicker content_picker(content, popularity);
  connect(by_type["user"], content_picker, config.owns_per_user, "owns");
  connect(by_type["user"], content_picker, config.views_per_user, "views");
  return out;
}

}  // namespace rekom
