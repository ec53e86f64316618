#include <set>
#include <sstream>

#include "claimnet/error.hpp"
#include "claimnet/io.hpp"
#include "claimnet/pair_pipeline.hpp"

namespace claimnet {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_roster(std::span<const AnnotatorSpec> annotators) {
  if (annotators.empty()) {
    throw Error(ErrorKind::InvalidArgument, "at least one annotator is required");
  }
  std::set<std::string_view> names;
  for (const auto& a : annotators) {
    if (a.name.empty()) throw Error(ErrorKind::InvalidArgument, "annotator name is empty");
    if (!names.insert(a.name).second) {
      throw Error(ErrorKind::InvalidArgument, "annotator name '" + a.name + "' used twice",
                  {a.name});
    }
  }
}

void write_requests_if_changed(const std::filesystem::path& file,
                               std::span<const PairKey> pairs, const ClaimTable& claims) {
  std::ostringstream content;
  io::write_annotation_requests(content, pairs, claims);
  const std::string text = content.str();
  std::error_code ec;
  if (std::filesystem::exists(file, ec) && io::read_text(file) == text) return;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  io::write_text(file, text);
}

}  // namespace

ExternalBatchFiles external_batch_files(const ExternalAnnotator& annotator,
                                        std::string_view stage) {
  const std::string base = annotator.path_prefix + "." + std::string(stage);
  return {base + ".requests.jsonl", base + ".responses.jsonl"};
}

void write_external_requests(std::span<const PairKey> pairs,
                             std::span<const AnnotatorSpec> annotators,
                             const ClaimTable& claims, std::string_view stage) {
  for (const auto& a : annotators) {
    if (const auto* ext = std::get_if<ExternalAnnotator>(&a.kind)) {
      write_requests_if_changed(external_batch_files(*ext, stage).requests, pairs, claims);
    }
  }
}

std::vector<Verdict> collect_verdicts(std::span<const PairKey> pairs,
                                      std::span<const AnnotatorSpec> annotators,
                                      const ClaimTable& claims, std::string_view stage) {
  require_roster(annotators);
  for (const auto& p : pairs) {
    claims.at(p.first);
    claims.at(p.second);
  }

  std::vector<Verdict> out;
  out.reserve(pairs.size() * annotators.size());
  for (const auto& annotator : annotators) {
    std::visit(
        overloaded{
            [&](const ExactDuplicateAnnotator&) {
              for (const auto& p : pairs) {
                const bool same = texts_match_exactly(claims.at(p.first), claims.at(p.second));
                out.push_back({p, annotator.name, same ? Label::Similar : Label::Dissimilar});
              }
            },
            [&](const OracleAnnotator& oracle) {
              for (const auto& p : pairs) {
                const bool same = oracle.reference.cluster_of(p.first) ==
                                  oracle.reference.cluster_of(p.second);
                out.push_back({p, annotator.name, same ? Label::Similar : Label::Dissimilar});
              }
            },
            [&](const ExternalAnnotator& ext) {
              const auto files = external_batch_files(ext, stage);
              write_requests_if_changed(files.requests, pairs, claims);
              std::error_code ec;
              if (!std::filesystem::exists(files.responses, ec)) {
                throw Error(ErrorKind::MissingVerdict,
                            "annotator '" + annotator.name + "' has no response file " +
                                files.responses.string() + " (requests written to " +
                                files.requests.string() + ")",
                            {files.responses.string()});
              }
              auto verdicts = io::read_annotation_responses(files.responses, pairs, annotator.name);
              out.insert(out.end(), std::make_move_iterator(verdicts.begin()),
                         std::make_move_iterator(verdicts.end()));
            },
        },
        annotator.kind);
  }
  return out;
}

}  // namespace claimnet
