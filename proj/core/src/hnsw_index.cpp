#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <queue>

#include "claimnet/ann_index.hpp"
#include "claimnet/error.hpp"
#include "claimnet/vecmath.hpp"

namespace claimnet {

namespace {

constexpr char kMagic[8] = {'C', 'N', 'H', 'N', 'S', 'W', '0', '1'};

// Per-thread visited marks; an epoch bump clears them in O(1).
class VisitedSet {
 public:
  void reset(std::size_t n) {
    if (marks_.size() < n) marks_.resize(n, 0);
    if (++epoch_ == 0) {
      std::fill(marks_.begin(), marks_.end(), 0);
      epoch_ = 1;
    }
  }
  // Returns true when `i` was not yet visited.
  bool insert(std::uint32_t i) {
    if (marks_[i] == epoch_) return false;
    marks_[i] = epoch_;
    return true;
  }

 private:
  std::vector<std::uint32_t> marks_;
  std::uint32_t epoch_ = 0;
};

VisitedSet& visited_set() {
  thread_local VisitedSet set;
  return set;
}

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
bool read_pod(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof value));
}

}  // namespace

void HnswParams::validate() const {
  if (M < 2) throw Error(ErrorKind::InvalidArgument, "HNSW M must be >= 2");
  if (ef_construction < 1 || ef_search < 1) {
    throw Error(ErrorKind::InvalidArgument, "HNSW ef parameters must be >= 1");
  }
}

HnswIndex::HnswIndex(std::size_t dim, HnswParams params)
    : params_(params),
      level_multiplier_(0.0),
      rng_(params.seed),
      points_(dim) {
  params_.validate();
  level_multiplier_ = 1.0 / std::log(static_cast<double>(params_.M));
}

HnswIndex HnswIndex::build(const EmbeddingSet& embeddings, HnswParams params) {
  if (embeddings.empty()) {
    throw Error(ErrorKind::EmptyInput, "cannot build an index over zero vectors");
  }
  HnswIndex index(embeddings.dim(), params);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    index.add(embeddings.id(i), embeddings.row(i));
  }
  return index;
}

int HnswIndex::draw_level() {
  // u in (0, 1], 53 random bits.
  const double u = static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
  return static_cast<int>(std::floor(-std::log(u) * level_multiplier_));
}

double HnswIndex::similarity(const Query& query, std::uint32_t row) const {
  return detail::similarity_to_unit(query.vector, query.norm, points_.row(row));
}

std::optional<ClaimId> HnswIndex::entry_point() const {
  if (max_level_ < 0) return std::nullopt;
  return points_.id(entry_);
}

std::span<const std::uint32_t> HnswIndex::links(std::size_t row, int level) const {
  const auto& levels = links_.at(row);
  if (level < 0 || static_cast<std::size_t>(level) >= levels.size()) return {};
  return levels[static_cast<std::size_t>(level)];
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(
    const Query& query, std::span<const Candidate> entries, std::size_t ef,
    int level) const {
  auto better = [](const Candidate& a, const Candidate& b) {
    return a.similarity > b.similarity ||
           (a.similarity == b.similarity && a.row < b.row);
  };
  auto worse = [&](const Candidate& a, const Candidate& b) { return better(b, a); };
  // `frontier` pops the best candidate, `found` pops the worst result.
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> frontier(worse);
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(better)> found(better);

  VisitedSet& visited = visited_set();
  visited.reset(points_.size());
  for (const auto& e : entries) {
    if (!visited.insert(e.row)) continue;
    frontier.push(e);
    found.push(e);
    if (found.size() > ef) found.pop();
  }

  const auto lvl = static_cast<std::size_t>(level);
  while (!frontier.empty()) {
    const Candidate current = frontier.top();
    if (current.similarity < found.top().similarity) break;
    frontier.pop();
    const auto& adjacency = links_[current.row];
    if (lvl >= adjacency.size()) continue;
    for (std::uint32_t next : adjacency[lvl]) {
      if (!visited.insert(next)) continue;
      const Candidate cand{similarity(query, next), next};
      if (found.size() < ef || better(cand, found.top())) {
        frontier.push(cand);
        found.push(cand);
        if (found.size() > ef) found.pop();
      }
    }
  }

  std::vector<Candidate> out;
  out.reserve(found.size());
  while (!found.empty()) {
    out.push_back(found.top());
    found.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::uint32_t> HnswIndex::select_neighbors(std::vector<Candidate> candidates,
                                                       std::size_t m) const {
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.similarity > b.similarity || (a.similarity == b.similarity && a.row < b.row);
  });
  std::vector<std::uint32_t> selected;
  if (candidates.size() <= m) {
    for (const auto& c : candidates) selected.push_back(c.row);
    return selected;
  }
  // Keep a candidate only if it is closer to the base than to every
  // neighbor already kept.
  for (const auto& c : candidates) {
    if (selected.size() >= m) break;
    const Query as_query{points_.row(c.row), norms_[c.row]};
    bool diverse = true;
    for (std::uint32_t kept : selected) {
      if (similarity(as_query, kept) > c.similarity) {
        diverse = false;
        break;
      }
    }
    if (diverse) selected.push_back(c.row);
  }
  return selected;
}

void HnswIndex::add(const ClaimId& id, std::span<const float> vector) {
  if (points_.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::InvalidArgument, "HNSW index is full");
  }
  points_.add(id, vector);
  const auto row = static_cast<std::uint32_t>(points_.size() - 1);
  norms_.push_back(l2_norm(points_.row(row)));
  const int level = draw_level();
  links_.emplace_back(static_cast<std::size_t>(level) + 1);

  if (max_level_ < 0) {
    entry_ = row;
    max_level_ = level;
    return;
  }

  const Query query{points_.row(row), norms_[row]};
  std::vector<Candidate> entries{{similarity(query, entry_), entry_}};
  for (int lc = max_level_; lc > level; --lc) {
    entries = search_layer(query, entries, 1, lc);
  }
  for (int lc = std::min(level, max_level_); lc >= 0; --lc) {
    auto found = search_layer(query, entries, params_.ef_construction, lc);
    const auto lvl = static_cast<std::size_t>(lc);
    links_[row][lvl] = select_neighbors(found, params_.M);
    for (std::uint32_t peer : links_[row][lvl]) {
      auto& peer_links = links_[peer][lvl];
      peer_links.push_back(row);
      if (peer_links.size() > max_links(lc)) {
        const Query peer_query{points_.row(peer), norms_[peer]};
        std::vector<Candidate> pool;
        pool.reserve(peer_links.size());
        for (std::uint32_t x : peer_links) pool.push_back({similarity(peer_query, x), x});
        peer_links = select_neighbors(std::move(pool), max_links(lc));
      }
    }
    entries = std::move(found);
  }
  if (level > max_level_) {
    entry_ = row;
    max_level_ = level;
  }
}

std::vector<Neighbor> HnswIndex::query_knn(std::span<const float> query, std::size_t k,
                                           std::optional<std::string_view> exclude,
                                           std::optional<std::size_t> ef) const {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (query.size() != dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "query has " + std::to_string(query.size()) + " components, index has " +
                    std::to_string(dim()));
  }
  if (empty()) throw Error(ErrorKind::EmptyIndex, "query against an empty index");
  const double norm = l2_norm(query);
  if (norm == 0.0) throw Error(ErrorKind::ZeroVector, "query vector is all zeros");

  const Query q{query, norm};
  std::vector<Candidate> entries{{similarity(q, entry_), entry_}};
  for (int lc = max_level_; lc > 0; --lc) entries = search_layer(q, entries, 1, lc);

  const std::size_t beam =
      std::max(ef.value_or(params_.ef_search), k + (exclude ? 1 : 0));
  const auto found = search_layer(q, entries, beam, 0);

  std::vector<Neighbor> out;
  out.reserve(found.size());
  for (const auto& c : found) {
    const ClaimId& id = points_.id(c.row);
    if (exclude && id == *exclude) continue;
    out.push_back(Neighbor{id, c.similarity});
  }
  detail::sort_neighbors(out);
  if (out.size() > k) out.resize(k);
  return out;
}

void HnswIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write index cache " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_pod(out, points_.digest());
  write_pod(out, static_cast<std::uint64_t>(params_.M));
  write_pod(out, static_cast<std::uint64_t>(params_.ef_construction));
  write_pod(out, static_cast<std::uint64_t>(params_.ef_search));
  write_pod(out, params_.seed);
  write_pod(out, static_cast<std::uint64_t>(points_.dim()));
  write_pod(out, static_cast<std::uint64_t>(points_.size()));
  write_pod(out, entry_);
  write_pod(out, static_cast<std::int32_t>(max_level_));
  for (const auto& levels : links_) {
    write_pod(out, static_cast<std::uint32_t>(levels.size()));
    for (const auto& adjacency : levels) {
      write_pod(out, static_cast<std::uint32_t>(adjacency.size()));
      out.write(reinterpret_cast<const char*>(adjacency.data()),
                static_cast<std::streamsize>(adjacency.size() * sizeof(std::uint32_t)));
    }
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing index cache " + path.string());
}

std::optional<HnswIndex> HnswIndex::load(const std::filesystem::path& path,
                                         const EmbeddingSet& embeddings,
                                         const HnswParams& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in || embeddings.empty()) return std::nullopt;
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
    return std::nullopt;
  }
  std::uint64_t digest = 0, m = 0, efc = 0, efs = 0, seed = 0, dim = 0, n = 0;
  std::uint32_t entry = 0;
  std::int32_t max_level = 0;
  if (!read_pod(in, digest) || !read_pod(in, m) || !read_pod(in, efc) ||
      !read_pod(in, efs) || !read_pod(in, seed) || !read_pod(in, dim) ||
      !read_pod(in, n) || !read_pod(in, entry) || !read_pod(in, max_level)) {
    return std::nullopt;
  }
  if (digest != embeddings.digest() || m != params.M || efc != params.ef_construction ||
      efs != params.ef_search || seed != params.seed || dim != embeddings.dim() ||
      n != embeddings.size() || entry >= n) {
    return std::nullopt;
  }

  HnswIndex index(embeddings.dim(), params);
  index.points_ = embeddings;
  index.links_.resize(n);
  index.norms_.reserve(n);
  for (std::size_t row = 0; row < n; ++row) {
    index.norms_.push_back(l2_norm(embeddings.row(row)));
    std::uint32_t levels = 0;
    // Replaying the level draws keeps the generator in step for later add().
    if (!read_pod(in, levels) || levels != static_cast<std::uint32_t>(index.draw_level()) + 1) {
      return std::nullopt;
    }
    index.links_[row].resize(levels);
    for (auto& adjacency : index.links_[row]) {
      std::uint32_t count = 0;
      if (!read_pod(in, count) || count > 2 * params.M) return std::nullopt;
      adjacency.resize(count);
      if (!in.read(reinterpret_cast<char*>(adjacency.data()),
                   static_cast<std::streamsize>(count * sizeof(std::uint32_t)))) {
        return std::nullopt;
      }
      for (auto x : adjacency) {
        if (x >= n) return std::nullopt;
      }
    }
  }
  index.entry_ = entry;
  index.max_level_ = max_level;
  return index;
}

}  // namespace claimnet
