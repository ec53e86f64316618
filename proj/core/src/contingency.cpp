#include <algorithm>
#include <map>

#include "claimnet/error.hpp"
#include "claimnet/metrics.hpp"

namespace claimnet {

ContingencyTable::ContingencyTable(const Partition& pred, const Partition& truth) {
  std::vector<std::string> mismatch;
  {
    auto p = pred.assignment().begin();
    auto t = truth.assignment().begin();
    const auto pe = pred.assignment().end();
    const auto te = truth.assignment().end();
    while (p != pe || t != te) {
      if (t == te || (p != pe && p->first < t->first)) {
        mismatch.push_back("pred_only:" + p->first);
        ++p;
      } else if (p == pe || t->first < p->first) {
        mismatch.push_back("truth_only:" + t->first);
        ++t;
      } else {
        ++p;
        ++t;
      }
    }
  }
  if (!mismatch.empty()) {
    std::string listed;
    for (std::size_t i = 0; i < mismatch.size() && i < 10; ++i) {
      listed += (i ? ", " : "") + mismatch[i];
    }
    if (mismatch.size() > 10) listed += ", ...";
    throw Error(ErrorKind::IdSetMismatch,
                std::to_string(mismatch.size()) + " ids differ between partitions: " + listed,
                std::move(mismatch));
  }

  std::map<ClusterId, std::size_t> row_of;
  for (const auto& [cluster, _] : pred.clusters()) row_of.emplace(cluster, row_of.size());
  std::map<ClusterId, std::size_t> col_of;
  for (const auto& [cluster, _] : truth.clusters()) col_of.emplace(cluster, col_of.size());

  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> counts;
  auto t = truth.assignment().begin();
  for (const auto& [id, cluster] : pred.assignment()) {
    ++counts[{row_of.at(cluster), col_of.at(t->second)}];
    ++t;
  }
  rows_.assign(row_of.size(), 0);
  cols_.assign(col_of.size(), 0);
  for (const auto& [rc, count] : counts) cells_.push_back({rc.first, rc.second, count});
  finish();
}

ContingencyTable ContingencyTable::from_labels(const std::vector<std::size_t>& pred,
                                               const std::vector<std::size_t>& truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorKind::IdSetMismatch, "label vectors differ in length");
  }
  std::map<std::size_t, std::size_t> row_of;
  std::map<std::size_t, std::size_t> col_of;
  for (auto p : pred) row_of.emplace(p, 0);
  for (auto c : truth) col_of.emplace(c, 0);
  std::size_t i = 0;
  for (auto& [_, idx] : row_of) idx = i++;
  i = 0;
  for (auto& [_, idx] : col_of) idx = i++;

  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> counts;
  for (std::size_t k = 0; k < pred.size(); ++k) ++counts[{row_of[pred[k]], col_of[truth[k]]}];

  ContingencyTable table;
  table.rows_.assign(row_of.size(), 0);
  table.cols_.assign(col_of.size(), 0);
  for (const auto& [rc, count] : counts) table.cells_.push_back({rc.first, rc.second, count});
  table.finish();
  return table;
}

void ContingencyTable::finish() {
  n_ = 0;
  for (const auto& c : cells_) {
    rows_[c.row] += c.count;
    cols_[c.col] += c.count;
    n_ += c.count;
  }
}

std::uint64_t ContingencyTable::at(std::size_t row, std::size_t col) const noexcept {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), std::pair{row, col},
                             [](const Cell& c, const std::pair<std::size_t, std::size_t>& key) {
                               return std::pair{c.row, c.col} < key;
                             });
  return (it != cells_.end() && it->row == row && it->col == col) ? it->count : 0;
}

bool ContingencyTable::is_permutation() const noexcept {
  return rows_.size() == cols_.size() && cells_.size() == rows_.size();
}

ContingencyTable contingency(const Partition& pred, const Partition& truth) {
  return ContingencyTable(pred, truth);
}

}  // namespace claimnet
