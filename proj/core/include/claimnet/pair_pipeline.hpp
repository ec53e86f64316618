#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "claimnet/ann_index.hpp"
#include "claimnet/embedding_set.hpp"
#include "claimnet/model.hpp"

namespace claimnet {

// Answers SIMILAR iff both claims normalize to the same text.
struct ExactDuplicateAnnotator {};

// Answers SIMILAR iff both claims share a cluster of `reference`.
struct OracleAnnotator {
  Partition reference;
};

// Batch-file annotator: a request file is written for an outside process,
// which answers with a response file. See external_batch_files().
struct ExternalAnnotator {
  std::string path_prefix;
};

struct AnnotatorSpec {
  std::string name;
  std::variant<ExactDuplicateAnnotator, OracleAnnotator, ExternalAnnotator> kind;
};

// For each claim, its top-k neighbors (self excluded) become pairs. Mutual
// neighbors collapse to one canonical pair; the result is sorted.
// Throws EmptyIndex, IdSetMismatch when the index and embeddings disagree.
std::vector<PairKey> generate_candidate_pairs(const EmbeddingSet& embeddings,
                                              const HnswIndex& index, std::size_t k = 1,
                                              unsigned threads = 1);

// True when the two claims' comparison texts (English translation, falling
// back to the original, per claim) normalize to the same string.
bool texts_match_exactly(const Claim& a, const Claim& b);

struct AutoLabelResult {
  std::vector<LabeledPair> labeled;  // SIMILAR / AutoExact
  std::vector<PairKey> remaining;
};

// Throws UnknownClaimId.
AutoLabelResult auto_label_exact_duplicates(std::span<const PairKey> pairs,
                                            const ClaimTable& claims);

struct ExternalBatchFiles {
  std::filesystem::path requests;
  std::filesystem::path responses;
};

// "<prefix>.<stage>.requests.jsonl" and "<prefix>.<stage>.responses.jsonl".
ExternalBatchFiles external_batch_files(const ExternalAnnotator& annotator,
                                        std::string_view stage);

// Writes the request file of every EXTERNAL annotator for `stage`.
void write_external_requests(std::span<const PairKey> pairs,
                             std::span<const AnnotatorSpec> annotators,
                             const ClaimTable& claims, std::string_view stage);

// One verdict per (pair, annotator), ordered by annotator then pair.
// EXTERNAL annotators get a request file written (if not already present
// with the same content) and their response file read back.
// Throws MissingVerdict, MalformedVerdict, UnknownClaimId, InvalidArgument.
std::vector<Verdict> collect_verdicts(std::span<const PairKey> pairs,
                                      std::span<const AnnotatorSpec> annotators,
                                      const ClaimTable& claims,
                                      std::string_view stage = "pairs");

// Consensus over the annotators named in `verdicts`. Every pair must carry a
// verdict from each of them. Throws IncompleteVerdicts, MalformedVerdict.
std::vector<LabeledPair> aggregate_consensus(std::span<const Verdict> verdicts,
                                             ConsensusPolicy policy);

// As above with the run's annotator roster given explicitly.
std::vector<LabeledPair> aggregate_consensus(std::span<const Verdict> verdicts,
                                             ConsensusPolicy policy,
                                             std::span<const std::string> annotators);

struct PairwiseAgreement {
  std::string annotator_a;
  std::string annotator_b;
  std::size_t shared_pairs = 0;
  std::size_t agreed = 0;
  double rate() const noexcept {
    return shared_pairs == 0 ? 0.0 : static_cast<double>(agreed) / static_cast<double>(shared_pairs);
  }
};

// Label agreement of every annotator pair over the pairs both judged.
std::vector<PairwiseAgreement> pairwise_agreement(std::span<const Verdict> verdicts);

}  // namespace claimnet
