#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace claimnet {

using ClaimId = std::string;
using ClusterId = std::string;

struct Claim {
  ClaimId id;
  std::string text;
  std::optional<std::string> text_en;
  std::string language;
  // Raw "YYYY-MM-DD"; see parse_iso_date.
  std::optional<std::string> published_at;
  std::optional<std::string> source;

  bool operator==(const Claim&) const = default;
};

// English translation when present, otherwise the original text.
const std::string& english_or_original(const Claim& claim) noexcept;

std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view s);

// Unordered claim pair stored as (min, max) under byte-wise order.
struct PairKey {
  ClaimId first;
  ClaimId second;

  auto operator<=>(const PairKey&) const = default;
  bool operator==(const PairKey&) const = default;
};

// Throws Error{IdenticalIds} when a == b.
PairKey canonical_pair_key(std::string_view a, std::string_view b);

std::string to_string(const PairKey& key);

enum class Label { Similar, Dissimilar };
enum class Provenance { AutoExact, Consensus, Oracle };
enum class ConsensusPolicy { Unanimous, Majority };

std::string_view to_string(Label label) noexcept;
std::string_view to_string(Provenance provenance) noexcept;
std::string_view to_string(ConsensusPolicy policy) noexcept;
std::optional<Label> parse_label(std::string_view s) noexcept;
std::optional<Provenance> parse_provenance(std::string_view s) noexcept;
std::optional<ConsensusPolicy> parse_policy(std::string_view s) noexcept;

struct Verdict {
  PairKey pair;
  std::string annotator;
  Label label = Label::Dissimilar;

  bool operator==(const Verdict&) const = default;
};

struct LabeledPair {
  PairKey pair;
  Label label = Label::Dissimilar;
  Provenance provenance = Provenance::Consensus;

  bool operator==(const LabeledPair&) const = default;
};

// Total assignment of claim ids to clusters. Always held in canonical form:
// a cluster's id is its lexicographically smallest member.
class Partition {
 public:
  Partition() = default;

  // Canonicalizes arbitrary cluster labels.
  explicit Partition(const std::map<ClaimId, std::string>& labels);

  // Each inner vector is one cluster. Throws DuplicateId if an id repeats
  // and InvalidArgument for an empty group.
  static Partition from_groups(const std::vector<std::vector<ClaimId>>& groups);

  // Every id in its own cluster.
  static Partition singletons(std::span<const ClaimId> ids);

  const std::map<ClaimId, ClusterId>& assignment() const noexcept {
    return assignment_;
  }
  const std::map<ClusterId, std::vector<ClaimId>>& clusters() const noexcept {
    return clusters_;
  }

  std::size_t size() const noexcept { return assignment_.size(); }
  std::size_t cluster_count() const noexcept { return clusters_.size(); }
  bool empty() const noexcept { return assignment_.empty(); }
  bool contains(const ClaimId& id) const { return assignment_.contains(id); }

  // Throws Error{UnknownClaimId}.
  const ClusterId& cluster_of(const ClaimId& id) const;
  // Throws Error{UnknownClusterId}.
  const std::vector<ClaimId>& members(const ClusterId& cluster) const;

  std::vector<ClaimId> ids() const;

  bool operator==(const Partition& other) const {
    return assignment_ == other.assignment_;
  }

 private:
  std::map<ClaimId, ClusterId> assignment_;
  std::map<ClusterId, std::vector<ClaimId>> clusters_;
};

// Id-keyed view over a claim collection with unique ids.
class ClaimTable {
 public:
  ClaimTable() = default;
  // Throws Error{DuplicateId}.
  explicit ClaimTable(std::vector<Claim> claims);

  const Claim& at(std::string_view id) const;
  const Claim* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  std::size_t size() const noexcept { return claims_.size(); }
  bool empty() const noexcept { return claims_.empty(); }
  const std::vector<Claim>& claims() const noexcept { return claims_; }
  std::vector<ClaimId> ids() const;

  auto begin() const noexcept { return claims_.begin(); }
  auto end() const noexcept { return claims_.end(); }

 private:
  std::vector<Claim> claims_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

struct PipelineParams {
  std::size_t knn_candidates = 1;
  std::size_t merge_top_k = 20;
  double merge_sim_threshold = 0.75;
  ConsensusPolicy consensus = ConsensusPolicy::Unanimous;
  std::size_t merge_passes = 1;

  // Throws Error{InvalidArgument}.
  void validate() const;

  bool operator==(const PipelineParams&) const = default;
};

enum class ViolationKind {
  DuplicateId,
  EmptyId,
  EmptyText,
  BadLanguage,
  BadDate,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::size_t index;  // position in the input sequence
  ClaimId claim_id;
  std::string message;
};

struct ValidationReport {
  std::size_t claims_checked = 0;
  std::vector<Violation> violations;

  bool valid() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const noexcept;
};

ValidationReport validate_dataset(std::span<const Claim> claims);

bool is_valid_language_code(std::string_view code) noexcept;

}  // namespace claimnet
