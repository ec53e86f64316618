#include <doctest.h>

#include <algorithm>
#include <random>

#include "claimnet/analytics.hpp"
#include "claimnet/error.hpp"
#include "fixtures.hpp"

using namespace claimnet;

namespace {

Claim claim(const std::string& id, const std::string& lang,
            std::optional<std::string> date = std::nullopt) {
  Claim c;
  c.id = id;
  c.text = "t " + id;
  c.language = lang;
  c.published_at = std::move(date);
  return c;
}

}  // namespace

TEST_CASE("table fixture statistics") {
  auto f = fixtures::table_fixture();
  ClaimTable claims(f.claims);
  auto s = partition_stats(f.partition, claims);
  CHECK(s.n_clusters == 197);
  CHECK(s.n_claims == 1187);
  CHECK(s.avg_cluster_size == doctest::Approx(6.03).epsilon(0.01 / 6.03));
  CHECK(s.max_cluster_size == 28);
  CHECK(s.n_languages == 22);
  auto m = multilingual_stats(f.partition, claims);
  CHECK(m.n_monolingual == 55);
  CHECK(m.n_multilingual == 142);
  CHECK(m.avg_defined);
  CHECK(m.avg_unique_languages_in_multilingual == doctest::Approx(3.2).epsilon(0.05 / 3.2));
  auto table = stats_table("fixture", s, m);
  CHECK(table.find("197") != std::string::npos);
}

TEST_CASE("small partitions") {
  ClaimTable claims({claim("a", "en"), claim("b", "es"), claim("c", "en")});
  auto one = Partition::from_groups({{"a", "b", "c"}});
  auto s = partition_stats(one, claims);
  CHECK(s.n_clusters == 1);
  CHECK(s.avg_cluster_size == 3.0);
  CHECK(s.max_cluster_size == 3);
  CHECK(s.n_languages == 2);
  auto m = multilingual_stats(Partition::from_groups({{"a", "b"}, {"c"}}), claims);
  CHECK(m.n_monolingual == 1);
  CHECK(m.n_multilingual == 1);
  CHECK(m.avg_unique_languages_in_multilingual == 2.0);

  ClaimTable mono({claim("a", "en"), claim("b", "en")});
  auto mm = multilingual_stats(Partition::from_groups({{"a", "b"}}), mono);
  CHECK(mm.n_multilingual == 0);
  CHECK_FALSE(mm.avg_defined);
  CHECK(mm.avg_unique_languages_in_multilingual == 0.0);

  auto counts = language_counts(claims);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0] == std::pair<std::string, std::size_t>{"en", 2});
  CHECK(language_csv(counts).find("en,2") != std::string::npos);
}

TEST_CASE("coverage mismatch") {
  ClaimTable claims({claim("a", "en"), claim("b", "es")});
  auto p = Partition::from_groups({{"a"}, {"z"}});
  try {
    partition_stats(p, claims);
    FAIL("expected IdSetMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IdSetMismatch);
  }
  CHECK_THROWS_AS(multilingual_stats(p, claims), Error);
  CHECK_THROWS_AS(temporal_repetition(p, claims), Error);
}

TEST_CASE("temporal repetition") {
  ClaimTable claims({claim("a", "en", "2021-03-01"), claim("b", "en", "2021-03-03"),
                     claim("c", "en", "2021-03-11"), claim("d", "en", "2021-01-01"),
                     claim("e", "en"), claim("f", "en", "2020-12-31")});
  auto p = Partition::from_groups({{"a", "b", "c"}, {"d", "e"}, {"f"}});
  auto t = temporal_repetition(p, claims);
  CHECK(t.offsets == std::vector<std::int64_t>{2, 10});
  CHECK(t.contributing_clusters == 1);
  CHECK(t.undated_claims == 1);
  CHECK(t.p50 == 2);
  CHECK(t.p75 == 2);
  CHECK(t.histogram[2] == 1);
  CHECK(t.histogram[10] == 1);
  auto csv = histogram_csv(t);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 100);

  auto singles = temporal_repetition(Partition::from_groups({{"a"}, {"b"}, {"c"}, {"d"}, {"e"}, {"f"}}), claims);
  CHECK(singles.offsets.empty());
  CHECK_FALSE(singles.p50.has_value());
  CHECK(to_json(singles).find("null") != std::string::npos);
}

TEST_CASE("property: quantiles match the sorted-index rule") {
  std::mt19937_64 rng(77);
  std::vector<Claim> cs;
  std::vector<std::vector<ClaimId>> groups;
  std::vector<std::int64_t> expected;
  for (std::size_t g = 0; g < 1000; ++g) {
    const std::size_t size = 1 + rng() % 4;
    std::vector<ClaimId> members;
    for (std::size_t m = 0; m < size; ++m) {
      const int offset = m == 0 ? 0 : static_cast<int>(rng() % 400);
      const auto day = std::chrono::sys_days{std::chrono::year{2020} / 1 / 1} +
                       std::chrono::days{offset};
      const std::chrono::year_month_day ymd{day};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                    unsigned(ymd.day()));
      auto c = claim(fixtures::id("q", cs.size(), 5), "en", std::string(buf));
      members.push_back(c.id);
      cs.push_back(c);
      if (m > 0) expected.push_back(offset);
    }
    groups.push_back(members);
  }
  std::sort(expected.begin(), expected.end());
  auto t = temporal_repetition(Partition::from_groups(groups), ClaimTable(cs));
  CHECK(t.offsets == expected);
  REQUIRE(!expected.empty());
  CHECK(*t.p50 == expected[(expected.size() - 1) / 2]);
  CHECK(*t.p75 == expected[static_cast<std::size_t>(0.75 * double(expected.size() - 1))]);
  std::size_t in_range = 0;
  for (auto h : t.histogram) in_range += h;
  CHECK(in_range == static_cast<std::size_t>(std::count_if(
                        expected.begin(), expected.end(), [](auto d) { return d < 100; })));
}

TEST_CASE("lower quantile") {
  std::vector<std::int64_t> v{1, 2, 3, 4};
  CHECK(lower_quantile(v, 0.5) == 2);
  CHECK(lower_quantile(v, 0.75) == 3);
  CHECK(lower_quantile(v, 1.0) == 4);
  CHECK(lower_quantile({9}, 0.5) == 9);
  CHECK_THROWS_AS(lower_quantile({}, 0.5), Error);
}
