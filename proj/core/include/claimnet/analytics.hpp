#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "claimnet/model.hpp"

namespace claimnet {

struct PartitionStats {
  std::size_t n_clusters = 0;
  std::size_t n_claims = 0;
  double avg_cluster_size = 0.0;
  std::size_t max_cluster_size = 0;
  std::size_t n_languages = 0;
};

struct MultilingualStats {
  std::size_t n_monolingual = 0;
  std::size_t n_multilingual = 0;
  // Mean distinct-language count over multilingual clusters; 0 when there
  // are none, with avg_defined = false.
  double avg_unique_languages_in_multilingual = 0.0;
  bool avg_defined = false;
};

// Both throw IdSetMismatch unless the partition covers exactly the claims.
PartitionStats partition_stats(const Partition& partition, const ClaimTable& claims);
MultilingualStats multilingual_stats(const Partition& partition, const ClaimTable& claims);

// Claim count per language, descending by count then ascending by code.
std::vector<std::pair<std::string, std::size_t>> language_counts(const ClaimTable& claims);

struct TemporalRepetition {
  static constexpr std::size_t kHistogramDays = 100;

  std::vector<std::int64_t> offsets;  // days, ascending
  std::size_t contributing_clusters = 0;
  std::size_t undated_claims = 0;     // skipped
  // Lower-interpolation quantiles; absent when there are no offsets.
  std::optional<std::int64_t> p50;
  std::optional<std::int64_t> p75;
  // histogram[d] = offsets equal to d, for d < kHistogramDays.
  std::array<std::size_t, kHistogramDays> histogram{};
};

// Day offset of every non-first dated claim from its cluster's earliest
// date, over clusters with at least two dated claims.
// Throws IdSetMismatch, UnknownClaimId.
TemporalRepetition temporal_repetition(const Partition& partition, const ClaimTable& claims);

// sorted[floor(q * (n - 1))]; requires a non-empty ascending sequence.
std::int64_t lower_quantile(const std::vector<std::int64_t>& sorted, double q);

std::string to_json(const PartitionStats& stats, const MultilingualStats& multilingual);
std::string to_json(const TemporalRepetition& temporal);
// Two aligned text blocks: size statistics, then language mix.
std::string stats_table(const std::string& dataset, const PartitionStats& stats,
                        const MultilingualStats& multilingual);
// "day,count" rows for days 0..99.
std::string histogram_csv(const TemporalRepetition& temporal);
std::string language_csv(const std::vector<std::pair<std::string, std::size_t>>& counts);

}  // namespace claimnet
