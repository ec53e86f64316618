#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "claimnet/embedding_set.hpp"
#include "claimnet/model.hpp"

// Readers and writers for every on-disk format. Parsers report the 1-based
// line number of the first bad line (ParseError) and never skip input.
// JSON-lines output always ends with a newline.
namespace claimnet::io {

using std::filesystem::path;

// Claims: {"id","text","text_en"|null,"language","published_at"|null,"source"|null}
std::vector<Claim> parse_claims(std::istream& in, const std::string& source = "<claims>");
void write_claims(std::ostream& out, std::span<const Claim> claims);
std::vector<Claim> read_claims(const path& file);
void write_claims(const path& file, std::span<const Claim> claims);

// Embeddings: first line {"dim": D}, then {"id", "vector": [D reals]}.
EmbeddingSet parse_embeddings(std::istream& in, const std::string& source = "<embeddings>");
void write_embeddings(std::ostream& out, const EmbeddingSet& embeddings);
EmbeddingSet read_embeddings(const path& file);
void write_embeddings(const path& file, const EmbeddingSet& embeddings);

// Partition TSV with header "claim_id\tcluster_id", rows by claim id.
Partition parse_partition(std::istream& in, const std::string& source = "<partition>");
void write_partition(std::ostream& out, const Partition& partition);
Partition read_partition(const path& file);
void write_partition(const path& file, const Partition& partition);

// Verdicts: {"pair_a","pair_b","annotator","label"}.
std::vector<Verdict> parse_verdicts(std::istream& in, const std::string& source = "<verdicts>");
void write_verdicts(std::ostream& out, std::span<const Verdict> verdicts);
std::vector<Verdict> read_verdicts(const path& file);
void write_verdicts(const path& file, std::span<const Verdict> verdicts);

// Candidate pairs: {"pair_a","pair_b"}.
std::vector<PairKey> parse_pairs(std::istream& in, const std::string& source = "<pairs>");
void write_pairs(std::ostream& out, std::span<const PairKey> pairs);
std::vector<PairKey> read_pairs(const path& file);
void write_pairs(const path& file, std::span<const PairKey> pairs);

// Labeled pairs: {"pair_a","pair_b","label","provenance"}.
std::vector<LabeledPair> parse_labeled_pairs(std::istream& in,
                                             const std::string& source = "<labeled>");
void write_labeled_pairs(std::ostream& out, std::span<const LabeledPair> pairs);
std::vector<LabeledPair> read_labeled_pairs(const path& file);
void write_labeled_pairs(const path& file, std::span<const LabeledPair> pairs);

// External annotator requests: {"pair_a","pair_b","text_a","text_b"} with
// English translations where available.
void write_annotation_requests(std::ostream& out, std::span<const PairKey> pairs,
                               const ClaimTable& claims);
void write_annotation_requests(const path& file, std::span<const PairKey> pairs,
                               const ClaimTable& claims);

// External annotator responses: {"pair_a","pair_b","label"}. Labels other
// than "similar"/"dissimilar", repeated pairs, and pairs that were not
// requested are MalformedVerdict; a requested pair without a line is
// MissingVerdict. Output follows the order of `requested`.
std::vector<Verdict> parse_annotation_responses(std::istream& in,
                                                std::span<const PairKey> requested,
                                                const std::string& annotator,
                                                const std::string& source = "<responses>");
std::vector<Verdict> read_annotation_responses(const path& file,
                                               std::span<const PairKey> requested,
                                               const std::string& annotator);

// Merge decisions TSV: header "cluster_a\tcluster_b".
std::vector<std::pair<ClusterId, ClusterId>> parse_merge_decisions(
    std::istream& in, const std::string& source = "<decisions>");
std::vector<std::pair<ClusterId, ClusterId>> read_merge_decisions(const path& file);
void write_merge_decisions(const path& file,
                           std::span<const std::pair<ClusterId, ClusterId>> decisions);

// Whole-file helpers.
std::string read_text(const path& file);
void write_text(const path& file, std::string_view content);

// Replaces tab, CR and LF with a space so free text fits in a TSV cell.
std::string tsv_cell(std::string_view text);

}  // namespace claimnet::io
