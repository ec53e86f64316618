#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "claimnet/ann_index.hpp"
#include "claimnet/baselines.hpp"
#include "claimnet/error.hpp"
#include "claimnet/model.hpp"
#include "claimnet/pair_pipeline.hpp"

namespace claimnet {

// Annotator entry of a run config. kind is "oracle" (needs `partition`),
// "external" (needs `prefix`) or "exact_dup".
struct AnnotatorConfig {
  std::string name;
  std::string kind;
  std::filesystem::path partition;
  std::string prefix;
};

struct RunConfig {
  std::filesystem::path claims;
  std::filesystem::path embeddings;
  std::filesystem::path out_dir = "out";
  PipelineParams params{};
  HnswParams hnsw{};
  std::size_t ann_cluster_threshold = 5000;
  std::vector<AnnotatorConfig> annotators;
  AgglomerativeConfig agglomerative{};
  AffinityPropagationConfig affinity{};
  std::uint64_t seed = 42;
  unsigned threads = 0;  // 0: one per logical core
  bool reuse_index_cache = true;
};

// Relative paths in the JSON are resolved against `base_dir`. Unknown keys
// are rejected. Throws ParseError (kind Validation) on bad values.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           const std::string& source = "<config>");
RunConfig read_run_config(const std::filesystem::path& file);
// Full config as pretty JSON; parse_run_config(to_json(c), "") == c for
// absolute paths.
std::string to_json(const RunConfig& config);

// Counts recorded per stage. pairs_labeled <= pairs_generated and
// clusters_after_merge <= clusters_before always hold.
struct StageCounts {
  std::size_t claims = 0;
  std::size_t pairs_generated = 0;
  std::size_t pairs_auto_labeled = 0;
  std::size_t pairs_annotated = 0;
  std::size_t pairs_labeled = 0;
  std::size_t pairs_similar = 0;
  std::size_t clusters_before = 0;
  std::vector<std::size_t> merge_candidates;  // per pass
  std::vector<std::size_t> merges_accepted;   // per pass
  std::size_t clusters_after_merge = 0;
};

// An error raised inside a named stage. kind() is the original kind.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineResult {
  Partition partition;
  StageCounts counts;
  std::filesystem::path partition_file;
  std::filesystem::path manifest_file;
};

using StageLog = std::function<void(std::string_view stage, std::string_view message)>;

// Loaded, cross-checked inputs of a run. Throws Error(Validation) for dataset
// violations or zero claims, ParseError for malformed files, Error(Io) for
// missing ones.
struct RunInputs {
  std::vector<Claim> claim_list;
  ClaimTable claims;
  EmbeddingSet embeddings;  // restricted to claims, in claim file order
  std::vector<AnnotatorSpec> annotators;
};
RunInputs load_run_inputs(const RunConfig& config);

// Runs every stage, writing each stage's output into config.out_dir as it
// completes, and finally partition.tsv plus manifest.json. A failing stage
// throws StageError after recording it in the manifest.
PipelineResult run_pipeline(const RunConfig& config, const StageLog& log = {});

std::vector<AnnotatorSpec> make_annotators(std::span<const AnnotatorConfig> configs);

}  // namespace claimnet
