#include "claimnet/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "claimnet/error.hpp"

namespace claimnet {

const std::string& english_or_original(const Claim& claim) noexcept {
  return claim.text_en ? *claim.text_en : claim.text;
}

std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t from, std::size_t len) -> std::optional<int> {
    int value = 0;
    for (std::size_t i = from; i < from + len; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
      value = value * 10 + (s[i] - '0');
    }
    return value;
  };
  auto y = digits(0, 4);
  auto m = digits(5, 2);
  auto d = digits(8, 2);
  if (!y || !m || !d) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y},
                                  std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

PairKey canonical_pair_key(std::string_view a, std::string_view b) {
  if (a == b) {
    throw Error(ErrorKind::IdenticalIds,
                "a pair needs two distinct claims, got '" + std::string(a) +
                    "' twice",
                {std::string(a)});
  }
  if (b < a) std::swap(a, b);
  return PairKey{std::string(a), std::string(b)};
}

std::string to_string(const PairKey& key) {
  return "(" + key.first + ", " + key.second + ")";
}

std::string_view to_string(Label label) noexcept {
  return label == Label::Similar ? "similar" : "dissimilar";
}

std::string_view to_string(Provenance provenance) noexcept {
  switch (provenance) {
    case Provenance::AutoExact: return "auto_exact";
    case Provenance::Consensus: return "consensus";
    case Provenance::Oracle: return "oracle";
  }
  return "consensus";
}

std::string_view to_string(ConsensusPolicy policy) noexcept {
  return policy == ConsensusPolicy::Unanimous ? "unanimous" : "majority";
}

std::optional<Label> parse_label(std::string_view s) noexcept {
  if (s == "similar") return Label::Similar;
  if (s == "dissimilar") return Label::Dissimilar;
  return std::nullopt;
}

std::optional<Provenance> parse_provenance(std::string_view s) noexcept {
  if (s == "auto_exact") return Provenance::AutoExact;
  if (s == "consensus") return Provenance::Consensus;
  if (s == "oracle") return Provenance::Oracle;
  return std::nullopt;
}

std::optional<ConsensusPolicy> parse_policy(std::string_view s) noexcept {
  if (s == "unanimous") return ConsensusPolicy::Unanimous;
  if (s == "majority") return ConsensusPolicy::Majority;
  return std::nullopt;
}

// --- Partition --------------------------------------------------------------

Partition::Partition(const std::map<ClaimId, std::string>& labels) {
  std::map<std::string, std::vector<ClaimId>> groups;
  for (const auto& [id, label] : labels) groups[label].push_back(id);
  for (auto& [label, members] : groups) {
    // Iteration over `labels` is in id order, so members[0] is the minimum.
    const ClusterId cid = members.front();
    for (const auto& id : members) assignment_.emplace(id, cid);
    clusters_.emplace(cid, std::move(members));
  }
}

Partition Partition::from_groups(const std::vector<std::vector<ClaimId>>& groups) {
  std::map<ClaimId, std::string> labels;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) {
      throw Error(ErrorKind::InvalidArgument, "cluster " + std::to_string(g) +
                                                  " has no members");
    }
    for (const auto& id : groups[g]) {
      if (!labels.emplace(id, std::to_string(g)).second) {
        throw Error(ErrorKind::DuplicateId,
                    "claim '" + id + "' appears in more than one cluster", {id});
      }
    }
  }
  return Partition(labels);
}

Partition Partition::singletons(std::span<const ClaimId> ids) {
  std::map<ClaimId, std::string> labels;
  for (const auto& id : ids) {
    if (!labels.emplace(id, id).second) {
      throw Error(ErrorKind::DuplicateId, "duplicate claim id '" + id + "'", {id});
    }
  }
  return Partition(labels);
}

const ClusterId& Partition::cluster_of(const ClaimId& id) const {
  auto it = assignment_.find(id);
  if (it == assignment_.end()) {
    throw Error(ErrorKind::UnknownClaimId, "claim '" + id + "' is not in the partition",
                {id});
  }
  return it->second;
}

const std::vector<ClaimId>& Partition::members(const ClusterId& cluster) const {
  auto it = clusters_.find(cluster);
  if (it == clusters_.end()) {
    throw Error(ErrorKind::UnknownClusterId,
                "cluster '" + cluster + "' is not in the partition", {cluster});
  }
  return it->second;
}

std::vector<ClaimId> Partition::ids() const {
  std::vector<ClaimId> out;
  out.reserve(assignment_.size());
  for (const auto& [id, _] : assignment_) out.push_back(id);
  return out;
}

// --- ClaimTable -------------------------------------------------------------

ClaimTable::ClaimTable(std::vector<Claim> claims) : claims_(std::move(claims)) {
  for (std::size_t i = 0; i < claims_.size(); ++i) {
    if (!by_id_.emplace(claims_[i].id, i).second) {
      throw Error(ErrorKind::DuplicateId,
                  "duplicate claim id '" + claims_[i].id + "'", {claims_[i].id});
    }
  }
}

const Claim* ClaimTable::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &claims_[it->second];
}

const Claim& ClaimTable::at(std::string_view id) const {
  if (const Claim* c = find(id)) return *c;
  throw Error(ErrorKind::UnknownClaimId, "unknown claim id '" + std::string(id) + "'",
              {std::string(id)});
}

std::vector<ClaimId> ClaimTable::ids() const {
  std::vector<ClaimId> out;
  out.reserve(claims_.size());
  for (const auto& c : claims_) out.push_back(c.id);
  return out;
}

// --- PipelineParams ---------------------------------------------------------

void PipelineParams::validate() const {
  if (knn_candidates < 1) {
    throw Error(ErrorKind::InvalidArgument, "knn_candidates must be >= 1");
  }
  if (merge_top_k < 1) {
    throw Error(ErrorKind::InvalidArgument, "merge_top_k must be >= 1");
  }
  if (!(merge_sim_threshold >= 0.0 && merge_sim_threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "merge_sim_threshold must lie in [0, 1]");
  }
}

// --- validation -------------------------------------------------------------

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::DuplicateId: return "duplicate_id";
    case ViolationKind::EmptyId: return "empty_id";
    case ViolationKind::EmptyText: return "empty_text";
    case ViolationKind::BadLanguage: return "bad_language";
    case ViolationKind::BadDate: return "bad_date";
  }
  return "unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(),
      [kind](const Violation& v) { return v.kind == kind; }));
}

bool is_valid_language_code(std::string_view code) noexcept {
  if (code.empty() || !(code.front() >= 'a' && code.front() <= 'z')) return false;
  return std::all_of(code.begin(), code.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '-';
  });
}

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
}

}  // namespace

ValidationReport validate_dataset(std::span<const Claim> claims) {
  ValidationReport report;
  report.claims_checked = claims.size();
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    const Claim& c = claims[i];
    auto add = [&](ViolationKind kind, std::string message) {
      report.violations.push_back(Violation{kind, i, c.id, std::move(message)});
    };
    if (blank(c.id)) {
      add(ViolationKind::EmptyId, "claim id is empty");
    } else if (!seen.insert(c.id).second) {
      add(ViolationKind::DuplicateId, "claim id '" + c.id + "' already used");
    }
    if (blank(c.text)) add(ViolationKind::EmptyText, "claim text is empty");
    if (!is_valid_language_code(c.language)) {
      add(ViolationKind::BadLanguage,
          "language '" + c.language + "' is not a lowercase ASCII code");
    }
    if (c.published_at && !parse_iso_date(*c.published_at)) {
      add(ViolationKind::BadDate,
          "published_at '" + *c.published_at + "' is not a valid YYYY-MM-DD date");
    }
  }
  return report;
}

}  // namespace claimnet
