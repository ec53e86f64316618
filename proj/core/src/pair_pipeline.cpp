#include "claimnet/pair_pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "claimnet/error.hpp"
#include "claimnet/parallel.hpp"
#include "claimnet/text.hpp"

namespace claimnet {

std::vector<PairKey> generate_candidate_pairs(const EmbeddingSet& embeddings,
                                              const HnswIndex& index, std::size_t k,
                                              unsigned threads) {
  if (index.empty()) throw Error(ErrorKind::EmptyIndex, "candidate generation needs a built index");
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (index.size() != embeddings.size() || index.dim() != embeddings.dim()) {
    throw Error(ErrorKind::IdSetMismatch,
                "index holds " + std::to_string(index.size()) + " vectors, embeddings " +
                    std::to_string(embeddings.size()));
  }

  std::vector<std::vector<Neighbor>> neighbors(embeddings.size());
  parallel_for(embeddings.size(), threads, [&](std::size_t i) {
    neighbors[i] = index.query_knn(embeddings.row(i), k, embeddings.id(i));
  });

  std::set<PairKey> unique;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    for (const auto& nb : neighbors[i]) {
      if (!embeddings.contains(nb.id)) {
        throw Error(ErrorKind::IdSetMismatch,
                    "index returned '" + nb.id + "' which has no embedding", {nb.id});
      }
      unique.insert(canonical_pair_key(embeddings.id(i), nb.id));
    }
  }
  return {unique.begin(), unique.end()};
}

bool texts_match_exactly(const Claim& a, const Claim& b) {
  return normalize_text(english_or_original(a)) == normalize_text(english_or_original(b));
}

AutoLabelResult auto_label_exact_duplicates(std::span<const PairKey> pairs,
                                            const ClaimTable& claims) {
  AutoLabelResult result;
  std::map<std::string_view, std::string> normalized;
  auto comparison_text = [&](const ClaimId& id) -> const std::string& {
    const Claim& claim = claims.at(id);
    auto it = normalized.find(claim.id);
    if (it == normalized.end()) {
      it = normalized.emplace(claim.id, normalize_text(english_or_original(claim))).first;
    }
    return it->second;
  };
  for (const auto& pair : pairs) {
    if (comparison_text(pair.first) == comparison_text(pair.second)) {
      result.labeled.push_back(LabeledPair{pair, Label::Similar, Provenance::AutoExact});
    } else {
      result.remaining.push_back(pair);
    }
  }
  return result;
}

namespace {

std::vector<LabeledPair> aggregate(std::span<const Verdict> verdicts, ConsensusPolicy policy,
                                   const std::set<std::string>& roster) {
  std::map<PairKey, std::map<std::string, Label>> by_pair;
  for (const auto& v : verdicts) {
    if (!roster.contains(v.annotator)) {
      throw Error(ErrorKind::MalformedVerdict,
                  "verdict from unknown annotator '" + v.annotator + "'", {v.annotator});
    }
    if (!by_pair[v.pair].emplace(v.annotator, v.label).second) {
      throw Error(ErrorKind::MalformedVerdict,
                  "annotator '" + v.annotator + "' judged " + to_string(v.pair) + " twice",
                  {v.pair.first, v.pair.second, v.annotator});
    }
  }
  std::vector<LabeledPair> out;
  out.reserve(by_pair.size());
  for (const auto& [pair, labels] : by_pair) {
    if (labels.size() != roster.size()) {
      std::vector<std::string> missing;
      for (const auto& name : roster) {
        if (!labels.contains(name)) missing.push_back(name);
      }
      std::string names;
      for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
      throw Error(ErrorKind::IncompleteVerdicts,
                  to_string(pair) + " lacks verdicts from: " + names, missing);
    }
    std::size_t similar = 0;
    for (const auto& [name, label] : labels) similar += label == Label::Similar ? 1 : 0;
    const bool accepted = policy == ConsensusPolicy::Unanimous
                              ? similar == labels.size()
                              : 2 * similar > labels.size();
    out.push_back(LabeledPair{pair, accepted ? Label::Similar : Label::Dissimilar,
                              Provenance::Consensus});
  }
  return out;
}

}  // namespace

std::vector<LabeledPair> aggregate_consensus(std::span<const Verdict> verdicts,
                                             ConsensusPolicy policy) {
  std::set<std::string> roster;
  for (const auto& v : verdicts) roster.insert(v.annotator);
  return aggregate(verdicts, policy, roster);
}

std::vector<LabeledPair> aggregate_consensus(std::span<const Verdict> verdicts,
                                             ConsensusPolicy policy,
                                             std::span<const std::string> annotators) {
  if (annotators.empty()) {
    throw Error(ErrorKind::InvalidArgument, "consensus needs at least one annotator");
  }
  std::set<std::string> roster(annotators.begin(), annotators.end());
  return aggregate(verdicts, policy, roster);
}

std::vector<PairwiseAgreement> pairwise_agreement(std::span<const Verdict> verdicts) {
  std::map<std::string, std::map<PairKey, Label>> by_annotator;
  for (const auto& v : verdicts) by_annotator[v.annotator][v.pair] = v.label;
  std::vector<PairwiseAgreement> out;
  for (auto a = by_annotator.begin(); a != by_annotator.end(); ++a) {
    for (auto b = std::next(a); b != by_annotator.end(); ++b) {
      PairwiseAgreement agreement{a->first, b->first};
      for (const auto& [pair, label] : a->second) {
        auto it = b->second.find(pair);
        if (it == b->second.end()) continue;
        ++agreement.shared_pairs;
        if (it->second == label) ++agreement.agreed;
      }
      out.push_back(agreement);
    }
  }
  return out;
}

}  // namespace claimnet
