#include "claimnet/analytics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "claimnet/error.hpp"

namespace claimnet {

namespace {

void require_same_ids(const Partition& partition, const ClaimTable& claims) {
  std::vector<std::string> mismatch;
  for (const auto& c : claims) {
    if (!partition.contains(c.id)) mismatch.push_back("claims_only:" + c.id);
  }
  for (const auto& [id, _] : partition.assignment()) {
    if (!claims.contains(id)) mismatch.push_back("partition_only:" + id);
  }
  if (!mismatch.empty()) {
    const std::string message = std::to_string(mismatch.size()) +
                                " ids differ between partition and claims (first: " +
                                mismatch.front() + ")";
    throw Error(ErrorKind::IdSetMismatch, message, std::move(mismatch));
  }
}

}  // namespace

PartitionStats partition_stats(const Partition& partition, const ClaimTable& claims) {
  require_same_ids(partition, claims);
  PartitionStats s;
  s.n_clusters = partition.cluster_count();
  s.n_claims = partition.size();
  for (const auto& [_, members] : partition.clusters()) {
    s.max_cluster_size = std::max(s.max_cluster_size, members.size());
  }
  s.avg_cluster_size =
      s.n_clusters == 0 ? 0.0 : static_cast<double>(s.n_claims) / static_cast<double>(s.n_clusters);
  std::set<std::string_view> languages;
  for (const auto& c : claims) languages.insert(c.language);
  s.n_languages = languages.size();
  return s;
}

MultilingualStats multilingual_stats(const Partition& partition, const ClaimTable& claims) {
  require_same_ids(partition, claims);
  MultilingualStats s;
  std::size_t language_total = 0;
  for (const auto& [_, members] : partition.clusters()) {
    std::set<std::string_view> languages;
    for (const auto& id : members) languages.insert(claims.at(id).language);
    if (languages.size() >= 2) {
      ++s.n_multilingual;
      language_total += languages.size();
    } else {
      ++s.n_monolingual;
    }
  }
  if (s.n_multilingual > 0) {
    s.avg_defined = true;
    s.avg_unique_languages_in_multilingual =
        static_cast<double>(language_total) / static_cast<double>(s.n_multilingual);
  }
  return s;
}

std::vector<std::pair<std::string, std::size_t>> language_counts(const ClaimTable& claims) {
  std::map<std::string, std::size_t> counts;
  for (const auto& c : claims) ++counts[c.language];
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::int64_t lower_quantile(const std::vector<std::int64_t>& sorted, double q) {
  if (sorted.empty()) throw Error(ErrorKind::EmptyInput, "quantile of an empty sequence");
  const auto pos = static_cast<std::size_t>(std::floor(q * static_cast<double>(sorted.size() - 1)));
  return sorted[std::min(pos, sorted.size() - 1)];
}

TemporalRepetition temporal_repetition(const Partition& partition, const ClaimTable& claims) {
  require_same_ids(partition, claims);
  TemporalRepetition out;
  for (const auto& [_, members] : partition.clusters()) {
    std::vector<std::int64_t> days;
    for (const auto& id : members) {
      const Claim& claim = claims.at(id);
      const auto date = claim.published_at ? parse_iso_date(*claim.published_at) : std::nullopt;
      if (!date) {
        ++out.undated_claims;
        continue;
      }
      days.push_back(std::chrono::sys_days{*date}.time_since_epoch().count());
    }
    if (days.size() < 2) continue;
    ++out.contributing_clusters;
    std::sort(days.begin(), days.end());
    for (std::size_t i = 1; i < days.size(); ++i) out.offsets.push_back(days[i] - days.front());
  }
  std::sort(out.offsets.begin(), out.offsets.end());
  for (auto d : out.offsets) {
    if (d < static_cast<std::int64_t>(TemporalRepetition::kHistogramDays)) {
      ++out.histogram[static_cast<std::size_t>(d)];
    }
  }
  if (!out.offsets.empty()) {
    out.p50 = lower_quantile(out.offsets, 0.50);
    out.p75 = lower_quantile(out.offsets, 0.75);
  }
  return out;
}

std::string to_json(const PartitionStats& stats, const MultilingualStats& m) {
  nlohmann::ordered_json j;
  j["n_clusters"] = stats.n_clusters;
  j["n_claims"] = stats.n_claims;
  j["avg_cluster_size"] = stats.avg_cluster_size;
  j["max_cluster_size"] = stats.max_cluster_size;
  j["n_languages"] = stats.n_languages;
  j["n_monolingual"] = m.n_monolingual;
  j["n_multilingual"] = m.n_multilingual;
  j["avg_unique_languages_in_multilingual"] = m.avg_unique_languages_in_multilingual;
  j["avg_unique_languages_defined"] = m.avg_defined;
  return j.dump(2) + "\n";
}

std::string to_json(const TemporalRepetition& t) {
  nlohmann::ordered_json j;
  j["repeated_claims"] = t.offsets.size();
  j["contributing_clusters"] = t.contributing_clusters;
  j["undated_claims"] = t.undated_claims;
  j["quantile_method"] = "lower";
  j["p50_days"] = t.p50 ? nlohmann::ordered_json(*t.p50) : nlohmann::ordered_json(nullptr);
  j["p75_days"] = t.p75 ? nlohmann::ordered_json(*t.p75) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string stats_table(const std::string& dataset, const PartitionStats& s,
                        const MultilingualStats& m) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %10s %10s %16s %16s %11s\n", "Dataset", "#Clusters",
                "#Claims", "Avg.ClusterSize", "Max.ClusterSize", "#Language");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-16s %10zu %10zu %16.2f %16zu %11zu\n", dataset.c_str(),
                s.n_clusters, s.n_claims, s.avg_cluster_size, s.max_cluster_size, s.n_languages);
  out << buf << '\n';
  std::snprintf(buf, sizeof buf, "%-16s %22s %30s\n", "Dataset", "Monolingual/Multilingual",
                "Avg.UniqueLangs(Multilingual)");
  out << buf;
  const std::string ratio = std::to_string(m.n_monolingual) + "/" + std::to_string(m.n_multilingual);
  std::snprintf(buf, sizeof buf, "%-16s %22s %30.1f\n", dataset.c_str(), ratio.c_str(),
                m.avg_unique_languages_in_multilingual);
  out << buf;
  return out.str();
}

std::string histogram_csv(const TemporalRepetition& t) {
  std::ostringstream out;
  out << "day,count\n";
  for (std::size_t d = 0; d < t.histogram.size(); ++d) out << d << ',' << t.histogram[d] << '\n';
  return out.str();
}

std::string language_csv(const std::vector<std::pair<std::string, std::size_t>>& counts) {
  std::ostringstream out;
  out << "language,count\n";
  for (const auto& [lang, n] : counts) out << lang << ',' << n << '\n';
  return out.str();
}

}  // namespace claimnet
