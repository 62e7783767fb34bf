#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "minoria/report.hpp"
#include "oracles.hpp"

using namespace minoria;

namespace {

Dataset labeled(std::vector<std::vector<double>> rows, std::vector<int> label,
                std::vector<int> pred) {
  Dataset ds = oracle::make_dataset(std::move(rows));
  ds.label = std::move(label);
  ds.prediction = std::move(pred);
  return ds;
}

std::vector<int> all_rows(const Dataset& ds) {
  std::vector<int> subset(ds.n());
  std::iota(subset.begin(), subset.end(), 0);
  return subset;
}

}  // namespace

TEST_CASE("binary metrics") {
  Dataset perfect = labeled({{0, 1}, {1, 0}, {2, 2}, {3, 1}},
                            {1, 0, 1, 0}, {1, 0, 1, 0});
  const Metrics m = metrics(perfect, all_rows(perfect));
  CHECK(m.accuracy == doctest::Approx(1.0));
  CHECK(m.f1 == doctest::Approx(1.0));

  // One of each cell: TP, FP, FN, TN.
  Dataset mixed = labeled({{0, 1}, {1, 0}, {2, 2}, {3, 1}},
                          {1, 0, 1, 0}, {1, 1, 0, 0});
  const Metrics mm = metrics(mixed, all_rows(mixed));
  CHECK(mm.accuracy == doctest::Approx(0.5));
  CHECK(mm.f1 == doctest::Approx(0.5));

  // Degenerate: the positive class never predicted nor present.
  Dataset none = labeled({{0, 1}, {1, 0}}, {0, 0}, {0, 0});
  const Metrics mn = metrics(none, all_rows(none));
  CHECK(mn.accuracy == doctest::Approx(1.0));
  CHECK(mn.f1 == doctest::Approx(0.0));

  // positive_class selects which label is scored.
  const Metrics flipped = metrics(mixed, all_rows(mixed), 0);
  CHECK(flipped.accuracy == doctest::Approx(0.5));
  CHECK(flipped.f1 == doctest::Approx(0.5));

  // Subsets are respected: rows 0 and 3 are both correct.
  const Metrics sub = metrics(mixed, {0, 3});
  CHECK(sub.accuracy == doctest::Approx(1.0));
}

TEST_CASE("macro F1 beyond two classes") {
  Dataset ds = labeled({{0, 1}, {1, 0}, {2, 2}, {3, 1}},
                       {0, 1, 2, 1}, {0, 2, 2, 1});
  const Metrics m = metrics(ds, all_rows(ds));
  CHECK(m.accuracy == doctest::Approx(0.75));
  // Per class: c0 perfect (1), c1 precision 1 recall 1/2 (f1 2/3),
  // c2 precision 1/2 recall 1 (f1 2/3) -> macro 7/9.
  CHECK(m.f1 == doctest::Approx(7.0 / 9.0).epsilon(1e-12));

  // A subset averages only over the classes it mentions: rows {1,3} have
  // labels {1,1} and predictions {2,1}, so classes 1 (f1 2/3) and 2 (f1 0).
  const Metrics sub = metrics(ds, {1, 3});
  CHECK(sub.accuracy == doctest::Approx(0.5));
  CHECK(sub.f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("metrics input validation") {
  Dataset ds = labeled({{0, 1}, {1, 0}}, {0, 1}, {0, 1});
  CHECK_THROWS_AS(metrics(ds, {}), std::invalid_argument);
  Dataset bare = oracle::make_dataset({{0, 1}, {1, 0}});
  CHECK_THROWS_AS(metrics(bare, {0}), std::runtime_error);
}

TEST_CASE("tail_report walks nested tails") {
  // Projection on the x axis orders rows 0..5; loss/quality degrade with x.
  Dataset ds = labeled({{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}},
                       {1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 0, 0});
  ds.group = std::vector<int>{0, 0, 0, 0, 1, 1};

  const Direction x = Direction::axis(2, 0);
  const auto rows = tail_report(ds, x, {0.5, 1.0, 1.0 / 3.0});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].percentile == doctest::Approx(1.0));
  CHECK(rows[1].percentile == doctest::Approx(0.5));
  CHECK(rows[2].percentile == doctest::Approx(1.0 / 3.0));

  CHECK(rows[0].tail_size == 6);
  CHECK(rows[1].tail_size == 3);
  CHECK(rows[2].tail_size == 2);

  CHECK(rows[0].accuracy == doctest::Approx(4.0 / 6.0));
  // x-tail at p=0.5 holds rows {3,4,5}: two of three predictions wrong.
  CHECK(rows[1].accuracy == doctest::Approx(1.0 / 3.0));
  CHECK(rows[2].accuracy == doctest::Approx(0.0));

  REQUIRE(rows[0].group_ratio.has_value());
  CHECK(*rows[0].group_ratio == doctest::Approx(0.5));     // 2 minor / 4 major
  CHECK(*rows[1].group_ratio == doctest::Approx(2.0));     // 2 / 1
  CHECK(std::isinf(*rows[2].group_ratio));                 // 2 / 0

  // Percentiles are deduplicated and sorted; a sub-1/n percentile still
  // reports the single worst row.
  const auto tiny = tail_report(ds, x, {0.01, 0.01, 1.0});
  REQUIRE(tiny.size() == 2);
  CHECK(tiny[1].tail_size == 1);

  Dataset no_group = labeled({{1, 0}, {2, 0}}, {1, 1}, {1, 0});
  const auto bare = tail_report(no_group, x, {1.0});
  CHECK(!bare[0].group_ratio.has_value());

  CHECK_THROWS_AS(tail_report(ds, x, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(tail_report(ds, x, {1.5}), std::invalid_argument);
  CHECK_THROWS_AS(tail_report(ds, x, {}), std::invalid_argument);
}

TEST_CASE("report CSV layout") {
  std::vector<TailReport> rows = {
      {1.0, 0.75, 0.6, 0.5, 8},
      {0.25, 0.5, 0.4, std::nullopt, 2},
  };
  std::ostringstream out;
  write_report_csv(rows, out);
  const std::string text = out.str();
  const std::string expected_header = "percentile,accuracy,f1,group_ratio,tail_size\n";
  CHECK(text.substr(0, expected_header.size()) == expected_header);
  CHECK(text.find("1,0.75,0.6,0.5,8\n") != std::string::npos);
  CHECK(text.find("0.25,0.5,0.4,,2\n") != std::string::npos);
}

TEST_CASE("candidate JSON document") {
  Dataset ds = labeled({{0.5, 1.5}, {1.0, 0.75}, {2.0, 1.0}},
                       {1, 1, 0}, {1, 0, 0});
  ds.group = std::vector<int>{0, 1, 1};

  std::vector<MiningCandidate> cands;
  Eigen::Vector2d v(3.0, 2.0);
  cands.push_back({Direction{v}, 2.1213203435596437, {2}, 2.0 / 3.0, true,
                   "warmup"});

  ReportOptions opts;
  opts.ratio_mode = RatioMode::kMinorOverTotal;
  const std::string doc = candidates_to_json(
      cands, ds, "{\"command\": \"mine2d\", \"seed\": 4}", opts);

  const auto parsed = nlohmann::ordered_json::parse(doc);
  REQUIRE(parsed.contains("provenance"));
  CHECK(parsed["provenance"]["command"] == "mine2d");
  CHECK(parsed["provenance"]["seed"] == 4);
  REQUIRE(parsed["candidates"].size() == 1);
  const auto& c = parsed["candidates"][0];
  CHECK(c["heuristic"] == "warmup");
  CHECK(c["skew"].get<double>() == doctest::Approx(2.1213203435596437));
  CHECK(c["tail_indices"] == nlohmann::ordered_json::array({2}));
  CHECK(c["tail_size"] == 1);
  CHECK(c["disparity"].get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(c["accepted"] == true);
  REQUIRE(c.contains("metrics"));
  CHECK(c["metrics"]["accuracy"].get<double>() == doctest::Approx(1.0));
  REQUIRE(c["metrics"].contains("group_ratio"));
  CHECK(c["metrics"]["group_ratio"].get<double>() == doctest::Approx(1.0));

  // Canonical form: parsing and re-dumping reproduces the exact bytes.
  CHECK(parsed.dump(2) + "\n" == doc);

  // Round trip through the parser recovers the candidate fields.
  const auto back = candidates_from_json(doc);
  REQUIRE(back.size() == 1);
  CHECK(cosine(back[0].direction, cands[0].direction) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(back[0].skew == doctest::Approx(cands[0].skew).epsilon(1e-15));
  CHECK(back[0].tail == cands[0].tail);
  CHECK(back[0].disparity == doctest::Approx(cands[0].disparity));
  CHECK(back[0].accepted == cands[0].accepted);
  CHECK(back[0].heuristic == cands[0].heuristic);
}

TEST_CASE("candidate JSON omits what the dataset cannot support") {
  Dataset bare = oracle::make_dataset({{0.5, 1.5}, {1.0, 0.75}, {2.0, 1.0}});
  std::vector<MiningCandidate> cands;
  Eigen::Vector2d v(1.0, 0.0);
  cands.push_back({Direction{v}, 1.0, {0, 1}, 0.25, true, "grid"});

  const std::string doc = candidates_to_json(cands, bare, "");
  const auto parsed = nlohmann::ordered_json::parse(doc);
  CHECK(parsed["provenance"].is_object());
  CHECK(parsed["provenance"].empty());
  CHECK(!parsed["candidates"][0].contains("metrics"));

  // Empty candidate list still yields a valid, stable document.
  const std::string empty_doc = candidates_to_json({}, bare, "{}");
  const auto eparsed = nlohmann::ordered_json::parse(empty_doc);
  CHECK(eparsed["candidates"].is_array());
  CHECK(eparsed["candidates"].empty());
  CHECK(candidates_from_json(empty_doc).empty());
}
