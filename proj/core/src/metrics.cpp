#include "claimnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "claimnet/error.hpp"

namespace claimnet {

namespace {

__extension__ typedef __int128 wide;

wide choose2(std::uint64_t x) {
  return static_cast<wide>(x) * static_cast<wide>(x - (x > 0 ? 1 : 0)) / 2;
}

double entropy(const std::vector<std::uint64_t>& sums, std::uint64_t n) {
  if (n == 0) return 0.0;
  const double total = static_cast<double>(n);
  double h = 0.0;
  for (auto s : sums) {
    if (s == 0) continue;
    const double p = static_cast<double>(s) / total;
    h -= p * std::log(p);
  }
  return h;
}

// Treated as zero when judging degenerate normalizers.
constexpr double kDegenerate = 1e-12;

}  // namespace

double adjusted_rand_index(const ContingencyTable& table) {
  const std::uint64_t n = table.n();
  if (n < 2) {
    throw Error(ErrorKind::TooFewItems, "ARI needs at least two items, got " + std::to_string(n));
  }
  wide index = 0;
  for (const auto& c : table.cells()) index += choose2(c.count);
  wide sum_rows = 0;
  for (auto a : table.row_sums()) sum_rows += choose2(a);
  wide sum_cols = 0;
  for (auto b : table.col_sums()) sum_cols += choose2(b);
  const wide pairs = choose2(n);

  // (index - expected) / (max - expected), scaled by 2 * C(n,2) to stay integral.
  const wide numerator = 2 * (index * pairs - sum_rows * sum_cols);
  const wide denominator = (sum_rows + sum_cols) * pairs - 2 * sum_rows * sum_cols;
  if (denominator == 0) return table.is_permutation() ? 1.0 : 0.0;
  return static_cast<double>(static_cast<long double>(numerator) /
                             static_cast<long double>(denominator));
}

double entropy_of_rows(const ContingencyTable& table) {
  return entropy(table.row_sums(), table.n());
}

double entropy_of_cols(const ContingencyTable& table) {
  return entropy(table.col_sums(), table.n());
}

double mutual_information(const ContingencyTable& table) {
  const double n = static_cast<double>(table.n());
  if (table.n() == 0) return 0.0;
  const double log_n = std::log(n);
  double mi = 0.0;
  for (const auto& c : table.cells()) {
    const double nij = static_cast<double>(c.count);
    const double a = static_cast<double>(table.row_sums()[c.row]);
    const double b = static_cast<double>(table.col_sums()[c.col]);
    mi += (nij / n) * (std::log(nij) + log_n - std::log(a) - std::log(b));
  }
  return std::max(0.0, mi);
}

double expected_mutual_information(const ContingencyTable& table) {
  const std::uint64_t N = table.n();
  if (N == 0) return 0.0;
  // log k! for k in [0, N].
  std::vector<double> log_fact(N + 1);
  for (std::uint64_t k = 0; k <= N; ++k) log_fact[k] = std::lgamma(static_cast<double>(k) + 1.0);

  // Rows (and columns) with equal marginals contribute identical terms.
  std::map<std::uint64_t, std::uint64_t> row_sizes;
  for (auto a : table.row_sums()) ++row_sizes[a];
  std::map<std::uint64_t, std::uint64_t> col_sizes;
  for (auto b : table.col_sums()) ++col_sizes[b];

  const double n = static_cast<double>(N);
  const double log_n = std::log(n);
  double emi = 0.0;
  for (const auto& [a, a_mult] : row_sizes) {
    for (const auto& [b, b_mult] : col_sizes) {
      const double log_a = std::log(static_cast<double>(a));
      const double log_b = std::log(static_cast<double>(b));
      const double fixed = log_fact[a] + log_fact[b] + log_fact[N - a] + log_fact[N - b] -
                           log_fact[N];
      const std::uint64_t lo = (a + b > N) ? std::max<std::uint64_t>(1, a + b - N) : 1;
      const std::uint64_t hi = std::min(a, b);
      double inner = 0.0;
      for (std::uint64_t nij = lo; nij <= hi; ++nij) {
        const double x = static_cast<double>(nij);
        const double log_prob = fixed - log_fact[nij] - log_fact[a - nij] - log_fact[b - nij] -
                                log_fact[N - a - b + nij];
        inner += (x / n) * (std::log(x) + log_n - log_a - log_b) * std::exp(log_prob);
      }
      emi += static_cast<double>(a_mult) * static_cast<double>(b_mult) * inner;
    }
  }
  return emi;
}

double adjusted_mutual_info(const ContingencyTable& table) {
  const double h_pred = entropy_of_rows(table);
  const double h_true = entropy_of_cols(table);
  const double mi = mutual_information(table);
  const double emi = expected_mutual_information(table);
  const double normalizer = 0.5 * (h_pred + h_true);
  const double denominator = normalizer - emi;
  if (std::abs(denominator) <= kDegenerate * std::max(1.0, normalizer)) {
    return table.is_permutation() ? 1.0 : 0.0;
  }
  return (mi - emi) / denominator;
}

HomogeneityCompleteness homogeneity_completeness_v(const ContingencyTable& table) {
  const double n = static_cast<double>(table.n());
  const double h_true = entropy_of_cols(table);
  const double h_pred = entropy_of_rows(table);
  // H(truth | pred) and H(pred | truth) from the cells.
  double h_true_given_pred = 0.0;
  double h_pred_given_true = 0.0;
  for (const auto& c : table.cells()) {
    const double nij = static_cast<double>(c.count);
    const double a = static_cast<double>(table.row_sums()[c.row]);
    const double b = static_cast<double>(table.col_sums()[c.col]);
    h_true_given_pred -= (nij / n) * std::log(nij / a);
    h_pred_given_true -= (nij / n) * std::log(nij / b);
  }
  HomogeneityCompleteness out{};
  out.homogeneity = h_true == 0.0 ? 1.0 : std::clamp(1.0 - h_true_given_pred / h_true, 0.0, 1.0);
  out.completeness = h_pred == 0.0 ? 1.0 : std::clamp(1.0 - h_pred_given_true / h_pred, 0.0, 1.0);
  const double sum = out.homogeneity + out.completeness;
  out.v_measure = sum == 0.0 ? 0.0 : 2.0 * out.homogeneity * out.completeness / sum;
  return out;
}

double purity(const ContingencyTable& table) {
  if (table.n() == 0) return 0.0;
  std::vector<std::uint64_t> best(table.row_sums().size(), 0);
  for (const auto& c : table.cells()) best[c.row] = std::max(best[c.row], c.count);
  std::uint64_t total = 0;
  for (auto b : best) total += b;
  return static_cast<double>(total) / static_cast<double>(table.n());
}

MetricReport evaluate(const Partition& pred, const Partition& truth,
                      const std::string& algorithm) {
  const ContingencyTable table(pred, truth);
  MetricReport report;
  report.algorithm = algorithm;
  report.n_clusters = pred.cluster_count();
  report.ari = adjusted_rand_index(table);
  report.ami = adjusted_mutual_info(table);
  const auto hcv = homogeneity_completeness_v(table);
  report.homogeneity = hcv.homogeneity;
  report.completeness = hcv.completeness;
  report.v_measure = hcv.v_measure;
  report.purity = purity(table);
  return report;
}

std::string to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["algorithm"] = report.algorithm;
  j["n_clusters"] = report.n_clusters;
  j["ari"] = report.ari;
  j["ami"] = report.ami;
  j["homogeneity"] = report.homogeneity;
  j["completeness"] = report.completeness;
  j["v_measure"] = report.v_measure;
  j["purity"] = report.purity;
  j["ami_normalization"] = report.ami_normalization;
  return j.dump(2) + "\n";
}

MetricReport metric_report_from_json(const std::string& json) {
  try {
    const auto j = nlohmann::json::parse(json);
    MetricReport r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.n_clusters = j.at("n_clusters").get<std::size_t>();
    r.ari = j.at("ari").get<double>();
    r.ami = j.at("ami").get<double>();
    r.homogeneity = j.at("homogeneity").get<double>();
    r.completeness = j.at("completeness").get<double>();
    r.v_measure = j.at("v_measure").get<double>();
    r.purity = j.at("purity").get<double>();
    r.ami_normalization = j.value("ami_normalization", std::string("arithmetic"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("metric report: ") + e.what());
  }
}

std::string table_header() {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %10s %7s %7s %7s %7s %9s %7s", "Algorithm", "#Clusters",
                "ARI", "AMI", "HMG", "CMP", "V-Measure", "Purity");
  return buf;
}

std::string table_row(const MetricReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %10zu %7.3f %7.3f %7.3f %7.3f %9.3f %7.3f",
                r.algorithm.c_str(), r.n_clusters, r.ari, r.ami, r.homogeneity, r.completeness,
                r.v_measure, r.purity);
  return buf;
}

}  // namespace claimnet
