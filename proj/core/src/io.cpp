#include "claimnet/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "claimnet/error.hpp"

namespace claimnet::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::ifstream open_in(const path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + file.string() + " for reading");
  return in;
}

// Invokes fn(line, line_number) for every line, CR stripped.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line, number);
  }
}

json parse_object(const std::string& line, const std::string& source, std::size_t number) {
  if (line.empty()) throw ParseError(source, number, "empty line");
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, number, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(source, number, "expected a JSON object");
  return j;
}

std::string required_string(const json& j, const char* key, const std::string& source,
                            std::size_t number) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ParseError(source, number, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> nullable_string(const json& j, const char* key,
                                           const std::string& source, std::size_t number) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ParseError(source, number, std::string("field '") + key + "' must be a string or null");
  }
  return it->get<std::string>();
}

PairKey required_pair(const json& j, const std::string& source, std::size_t number) {
  const auto a = required_string(j, "pair_a", source, number);
  const auto b = required_string(j, "pair_b", source, number);
  if (a == b) throw ParseError(source, number, "pair_a and pair_b are both '" + a + "'");
  return canonical_pair_key(a, b);
}

Label required_label(const json& j, const std::string& source, std::size_t number) {
  auto it = j.find("label");
  if (it == j.end() || !it->is_string()) {
    throw ParseError(source, number, "field 'label' must be a string", ErrorKind::MalformedVerdict);
  }
  const auto text = it->get<std::string>();
  auto label = parse_label(text);
  if (!label) {
    throw ParseError(source, number,
                     "label '" + text + "' is neither \"similar\" nor \"dissimilar\"",
                     ErrorKind::MalformedVerdict);
  }
  return *label;
}

std::string dump_line(const ordered_json& j) {
  try {
    return j.dump() + "\n";
  } catch (const json::type_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("cannot serialize: ") + e.what());
  }
}

void require_tsv_safe(const std::string& value) {
  if (value.find_first_of("\t\r\n") != std::string::npos) {
    throw Error(ErrorKind::InvalidArgument,
                "id '" + value + "' contains a tab or newline and cannot be written as TSV",
                {value});
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

template <typename T, typename Parse>
T read_with(const path& file, Parse&& parse) {
  auto in = open_in(file);
  return parse(in, file.string());
}

template <typename Write>
void write_with(const path& file, Write&& write) {
  std::ostringstream out;
  write(out);
  write_text(file, out.str());
}

}  // namespace

// --- whole files ------------------------------------------------------------

std::string read_text(const path& file) {
  auto in = open_in(file);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const path& file, std::string_view content) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot move " + tmp.string() + " to " + file.string());
}

std::string tsv_cell(std::string_view text) {
  std::string out(text);
  for (char& ch : out) {
    if (ch == '\t' || ch == '\n' || ch == '\r') ch = ' ';
  }
  return out;
}

// --- claims -----------------------------------------------------------------

std::vector<Claim> parse_claims(std::istream& in, const std::string& source) {
  std::vector<Claim> claims;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    const json j = parse_object(line, source, number);
    Claim c;
    c.id = required_string(j, "id", source, number);
    c.text = required_string(j, "text", source, number);
    c.text_en = nullable_string(j, "text_en", source, number);
    c.language = required_string(j, "language", source, number);
    c.published_at = nullable_string(j, "published_at", source, number);
    c.source = nullable_string(j, "source", source, number);
    claims.push_back(std::move(c));
  });
  return claims;
}

void write_claims(std::ostream& out, std::span<const Claim> claims) {
  for (const auto& c : claims) {
    ordered_json j;
    j["id"] = c.id;
    j["text"] = c.text;
    j["text_en"] = c.text_en ? ordered_json(*c.text_en) : ordered_json(nullptr);
    j["language"] = c.language;
    j["published_at"] = c.published_at ? ordered_json(*c.published_at) : ordered_json(nullptr);
    j["source"] = c.source ? ordered_json(*c.source) : ordered_json(nullptr);
    out << dump_line(j);
  }
}

std::vector<Claim> read_claims(const path& file) {
  return read_with<std::vector<Claim>>(
      file, [](std::istream& in, const std::string& src) { return parse_claims(in, src); });
}

void write_claims(const path& file, std::span<const Claim> claims) {
  write_with(file, [&](std::ostream& out) { write_claims(out, claims); });
}

// --- embeddings -------------------------------------------------------------

EmbeddingSet parse_embeddings(std::istream& in, const std::string& source) {
  std::optional<EmbeddingSet> set;
  std::vector<float> buffer;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    const json j = parse_object(line, source, number);
    if (!set) {
      auto it = j.find("dim");
      if (it == j.end() || !it->is_number_unsigned() || it->get<std::size_t>() == 0) {
        throw ParseError(source, number, "first line must be {\"dim\": <positive integer>}");
      }
      set.emplace(it->get<std::size_t>());
      return;
    }
    const auto id = required_string(j, "id", source, number);
    auto it = j.find("vector");
    if (it == j.end() || !it->is_array()) {
      throw ParseError(source, number, "field 'vector' must be an array");
    }
    if (it->size() != set->dim()) {
      throw ParseError(source, number,
                       "vector for '" + id + "' has " + std::to_string(it->size()) +
                           " components, expected " + std::to_string(set->dim()),
                       ErrorKind::DimensionMismatch);
    }
    buffer.clear();
    for (const auto& x : *it) {
      if (!x.is_number()) throw ParseError(source, number, "vector components must be numbers");
      buffer.push_back(static_cast<float>(x.get<double>()));
    }
    try {
      set->add(id, buffer);
    } catch (const Error& e) {
      throw ParseError(source, number, e.what(), e.kind());
    }
  });
  if (!set) throw ParseError(source, 1, "missing {\"dim\": D} header line");
  return std::move(*set);
}

void write_embeddings(std::ostream& out, const EmbeddingSet& embeddings) {
  out << "{\"dim\":" << embeddings.dim() << "}\n";
  char buf[32];
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    out << "{\"id\":" << json(embeddings.id(i)).dump() << ",\"vector\":[";
    const auto row = embeddings.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      // Shortest decimal form that round-trips the float.
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, row[c]);
      if (c) out << ',';
      out.write(buf, end - buf);
    }
    out << "]}\n";
  }
}

EmbeddingSet read_embeddings(const path& file) {
  return read_with<EmbeddingSet>(
      file, [](std::istream& in, const std::string& src) { return parse_embeddings(in, src); });
}

void write_embeddings(const path& file, const EmbeddingSet& embeddings) {
  write_with(file, [&](std::ostream& out) { write_embeddings(out, embeddings); });
}

// --- partitions -------------------------------------------------------------

Partition parse_partition(std::istream& in, const std::string& source) {
  std::map<ClaimId, std::string> labels;
  bool header = false;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    if (!header) {
      if (line != "claim_id\tcluster_id") {
        throw ParseError(source, number, "expected header \"claim_id<TAB>cluster_id\"");
      }
      header = true;
      return;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(source, number, "expected two non-empty tab-separated fields");
    }
    if (!labels.emplace(fields[0], fields[1]).second) {
      throw ParseError(source, number, "claim '" + fields[0] + "' assigned twice",
                       ErrorKind::DuplicateId);
    }
  });
  if (!header) throw ParseError(source, 1, "missing header line");
  return Partition(labels);
}

void write_partition(std::ostream& out, const Partition& partition) {
  out << "claim_id\tcluster_id\n";
  for (const auto& [id, cluster] : partition.assignment()) {
    require_tsv_safe(id);
    out << id << '\t' << cluster << '\n';
  }
}

Partition read_partition(const path& file) {
  return read_with<Partition>(
      file, [](std::istream& in, const std::string& src) { return parse_partition(in, src); });
}

void write_partition(const path& file, const Partition& partition) {
  write_with(file, [&](std::ostream& out) { write_partition(out, partition); });
}

// --- verdicts ---------------------------------------------------------------

std::vector<Verdict> parse_verdicts(std::istream& in, const std::string& source) {
  std::vector<Verdict> verdicts;
  std::set<std::pair<PairKey, std::string>> seen;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    const json j = parse_object(line, source, number);
    Verdict v;
    v.pair = required_pair(j, source, number);
    v.annotator = required_string(j, "annotator", source, number);
    v.label = required_label(j, source, number);
    if (!seen.emplace(v.pair, v.annotator).second) {
      throw ParseError(source, number,
                       "second verdict by '" + v.annotator + "' for " + to_string(v.pair),
                       ErrorKind::MalformedVerdict);
    }
    verdicts.push_back(std::move(v));
  });
  return verdicts;
}

void write_verdicts(std::ostream& out, std::span<const Verdict> verdicts) {
  for (const auto& v : verdicts) {
    ordered_json j;
    j["pair_a"] = v.pair.first;
    j["pair_b"] = v.pair.second;
    j["annotator"] = v.annotator;
    j["label"] = to_string(v.label);
    out << dump_line(j);
  }
}

std::vector<Verdict> read_verdicts(const path& file) {
  return read_with<std::vector<Verdict>>(
      file, [](std::istream& in, const std::string& src) { return parse_verdicts(in, src); });
}

void write_verdicts(const path& file, std::span<const Verdict> verdicts) {
  write_with(file, [&](std::ostream& out) { write_verdicts(out, verdicts); });
}

// --- candidate and labeled pairs --------------------------------------------

std::vector<PairKey> parse_pairs(std::istream& in, const std::string& source) {
  std::vector<PairKey> pairs;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    pairs.push_back(required_pair(parse_object(line, source, number), source, number));
  });
  return pairs;
}

void write_pairs(std::ostream& out, std::span<const PairKey> pairs) {
  for (const auto& p : pairs) {
    ordered_json j;
    j["pair_a"] = p.first;
    j["pair_b"] = p.second;
    out << dump_line(j);
  }
}

std::vector<PairKey> read_pairs(const path& file) {
  return read_with<std::vector<PairKey>>(
      file, [](std::istream& in, const std::string& src) { return parse_pairs(in, src); });
}

void write_pairs(const path& file, std::span<const PairKey> pairs) {
  write_with(file, [&](std::ostream& out) { write_pairs(out, pairs); });
}

std::vector<LabeledPair> parse_labeled_pairs(std::istream& in, const std::string& source) {
  std::vector<LabeledPair> pairs;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    const json j = parse_object(line, source, number);
    LabeledPair p;
    p.pair = required_pair(j, source, number);
    p.label = required_label(j, source, number);
    const auto provenance = required_string(j, "provenance", source, number);
    auto parsed = parse_provenance(provenance);
    if (!parsed) throw ParseError(source, number, "unknown provenance '" + provenance + "'");
    p.provenance = *parsed;
    pairs.push_back(std::move(p));
  });
  return pairs;
}

void write_labeled_pairs(std::ostream& out, std::span<const LabeledPair> pairs) {
  for (const auto& p : pairs) {
    ordered_json j;
    j["pair_a"] = p.pair.first;
    j["pair_b"] = p.pair.second;
    j["label"] = to_string(p.label);
    j["provenance"] = to_string(p.provenance);
    out << dump_line(j);
  }
}

std::vector<LabeledPair> read_labeled_pairs(const path& file) {
  return read_with<std::vector<LabeledPair>>(file, [](std::istream& in, const std::string& src) {
    return parse_labeled_pairs(in, src);
  });
}

void write_labeled_pairs(const path& file, std::span<const LabeledPair> pairs) {
  write_with(file, [&](std::ostream& out) { write_labeled_pairs(out, pairs); });
}

// --- external annotator protocol --------------------------------------------

void write_annotation_requests(std::ostream& out, std::span<const PairKey> pairs,
                               const ClaimTable& claims) {
  for (const auto& p : pairs) {
    ordered_json j;
    j["pair_a"] = p.first;
    j["pair_b"] = p.second;
    j["text_a"] = english_or_original(claims.at(p.first));
    j["text_b"] = english_or_original(claims.at(p.second));
    out << dump_line(j);
  }
}

void write_annotation_requests(const path& file, std::span<const PairKey> pairs,
                               const ClaimTable& claims) {
  write_with(file, [&](std::ostream& out) { write_annotation_requests(out, pairs, claims); });
}

std::vector<Verdict> parse_annotation_responses(std::istream& in,
                                                std::span<const PairKey> requested,
                                                const std::string& annotator,
                                                const std::string& source) {
  std::set<PairKey> wanted(requested.begin(), requested.end());
  std::map<PairKey, Label> answers;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    const json j = parse_object(line, source, number);
    PairKey key = required_pair(j, source, number);
    const Label label = required_label(j, source, number);
    if (!wanted.contains(key)) {
      throw ParseError(source, number, "response for unrequested pair " + to_string(key),
                       ErrorKind::MalformedVerdict);
    }
    if (!answers.emplace(key, label).second) {
      throw ParseError(source, number, "second response for " + to_string(key),
                       ErrorKind::MalformedVerdict);
    }
  });

  std::vector<Verdict> out;
  out.reserve(requested.size());
  std::vector<std::string> missing;
  for (const auto& key : requested) {
    auto it = answers.find(key);
    if (it == answers.end()) {
      missing.push_back(key.first + "\t" + key.second);
      continue;
    }
    out.push_back(Verdict{key, annotator, it->second});
  }
  if (!missing.empty()) {
    const auto tab = missing.front().find('\t');
    std::string message = source + ": annotator '" + annotator + "' gave no verdict for (" +
                          missing.front().substr(0, tab) + ", " +
                          missing.front().substr(tab + 1) + ")";
    if (missing.size() > 1) {
      message += " and " + std::to_string(missing.size() - 1) + " more pairs";
    }
    throw Error(ErrorKind::MissingVerdict, message, std::move(missing));
  }
  return out;
}

std::vector<Verdict> read_annotation_responses(const path& file,
                                               std::span<const PairKey> requested,
                                               const std::string& annotator) {
  auto in = open_in(file);
  return parse_annotation_responses(in, requested, annotator, file.string());
}

// --- merge decisions --------------------------------------------------------

std::vector<std::pair<ClusterId, ClusterId>> parse_merge_decisions(std::istream& in,
                                                                   const std::string& source) {
  std::vector<std::pair<ClusterId, ClusterId>> decisions;
  bool header = false;
  for_each_line(in, [&](const std::string& line, std::size_t number) {
    if (!header) {
      if (line != "cluster_a\tcluster_b") {
        throw ParseError(source, number, "expected header \"cluster_a<TAB>cluster_b\"");
      }
      header = true;
      return;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(source, number, "expected two non-empty tab-separated fields");
    }
    decisions.emplace_back(fields[0], fields[1]);
  });
  if (!header) throw ParseError(source, 1, "missing header line");
  return decisions;
}

std::vector<std::pair<ClusterId, ClusterId>> read_merge_decisions(const path& file) {
  auto in = open_in(file);
  return parse_merge_decisions(in, file.string());
}

void write_merge_decisions(const path& file,
                           std::span<const std::pair<ClusterId, ClusterId>> decisions) {
  write_with(file, [&](std::ostream& out) {
    out << "cluster_a\tcluster_b\n";
    for (const auto& [a, b] : decisions) {
      require_tsv_safe(a);
      require_tsv_safe(b);
      out << a << '\t' << b << '\n';
    }
  });
}

}  // namespace claimnet::io
