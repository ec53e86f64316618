#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "claimnet/model.hpp"

namespace claimnet {

// Sparse cluster-overlap counts between a predicted and a true partition.
// Rows are predicted clusters, columns true clusters, both in cluster-id order.
class ContingencyTable {
 public:
  struct Cell {
    std::size_t row;
    std::size_t col;
    std::uint64_t count;
  };

  // Throws IdSetMismatch with the symmetric difference in details()
  // (entries prefixed "pred_only:" or "truth_only:").
  ContingencyTable(const Partition& pred, const Partition& truth);

  // Builds directly from label vectors of equal length.
  static ContingencyTable from_labels(const std::vector<std::size_t>& pred,
                                      const std::vector<std::size_t>& truth);

  std::uint64_t n() const noexcept { return n_; }
  const std::vector<std::uint64_t>& row_sums() const noexcept { return rows_; }
  const std::vector<std::uint64_t>& col_sums() const noexcept { return cols_; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }  // non-zero only

  std::uint64_t at(std::size_t row, std::size_t col) const noexcept;

  // Every row and every column holds exactly one non-zero cell.
  bool is_permutation() const noexcept;

 private:
  ContingencyTable() = default;
  void finish();

  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<std::uint64_t> cols_;
  std::vector<Cell> cells_;
};

ContingencyTable contingency(const Partition& pred, const Partition& truth);

// Throws TooFewItems when n < 2.
double adjusted_rand_index(const ContingencyTable& table);

// Arithmetic-mean normalization, natural logarithms, exact hypergeometric
// expected mutual information.
double adjusted_mutual_info(const ContingencyTable& table);

double mutual_information(const ContingencyTable& table);
double expected_mutual_information(const ContingencyTable& table);
double entropy_of_rows(const ContingencyTable& table);
double entropy_of_cols(const ContingencyTable& table);

struct HomogeneityCompleteness {
  double homogeneity;
  double completeness;
  double v_measure;
};

HomogeneityCompleteness homogeneity_completeness_v(const ContingencyTable& table);

double purity(const ContingencyTable& table);

struct MetricReport {
  std::string algorithm;
  std::size_t n_clusters = 0;  // predicted
  double ari = 0.0;
  double ami = 0.0;
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
  double purity = 0.0;
  std::string ami_normalization = "arithmetic";

  bool operator==(const MetricReport&) const = default;
};

MetricReport evaluate(const Partition& pred, const Partition& truth,
                      const std::string& algorithm = "");

std::string to_json(const MetricReport& report);
// Throws Parse.
MetricReport metric_report_from_json(const std::string& json);

// "algorithm | n_clusters | ARI | AMI | HMG | CMP | V | Purity" with 3 decimals.
std::string table_header();
std::string table_row(const MetricReport& report);

}  // namespace claimnet
