#include "khh/table.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace khh;

namespace {

DimensionTable sample() {
  DimensionTable t("HH", {{"n", 0, 2}, {"w", -1, 3}});
  t.set_meta("algebra", "cusp");
  t.set_meta("convention", "standard");
  for (int n = 0; n <= 2; ++n)
    for (int w = -1; w <= 3; ++w) t.set({n, w}, n * 10 + w);
  return t;
}

}  // namespace

TEST(Table, JsonRoundTripIsExact) {
  auto t = sample();
  auto back = DimensionTable::from_json(nlohmann::json::parse(t.dump()));
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.dump(), t.dump());
}

TEST(Table, RandomRoundTrips) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int arity = 1 + static_cast<int>(rng() % 3);
    std::vector<Axis> axes;
    for (int a = 0; a < arity; ++a) {
      int lo = static_cast<int>(rng() % 5) - 2;
      axes.push_back({"a" + std::to_string(a), lo, lo + static_cast<int>(rng() % 4)});
    }
    DimensionTable t("T", axes);
    for (const auto& k : t.rectangle())
      if (rng() % 3) t.set(k, static_cast<long long>(rng() % 1000) - 500);
    auto back = DimensionTable::from_json(nlohmann::json::parse(t.dump()));
    EXPECT_EQ(back, t);
    EXPECT_EQ(back.dump(), t.dump());
  }
}

TEST(Table, JsonKeysAreSorted) {
  const std::string s = sample().dump();
  EXPECT_LT(s.find("\"axes\""), s.find("\"cells\""));
  EXPECT_LT(s.find("\"cells\""), s.find("\"label\""));
  EXPECT_LT(s.find("\"label\""), s.find("\"metadata\""));
  EXPECT_LT(s.find("\"algebra\""), s.find("\"convention\""));
}

TEST(Table, Completeness) {
  DimensionTable t("T", {{"n", 0, 1}, {"w", 0, 2}});
  EXPECT_EQ(t.rectangle().size(), 6u);
  EXPECT_FALSE(t.complete());
  t.set({0, 0}, 1);
  t.set({1, 2}, 4);
  EXPECT_EQ(t.missing().size(), 4u);
  t.fill();
  EXPECT_TRUE(t.complete());
  EXPECT_EQ(t.at({0, 0}), 1);
  EXPECT_EQ(t.at({1, 1}), 0);
  EXPECT_EQ(t.total(), 5);
  EXPECT_FALSE(t.all_zero());
  t.add({1, 2}, -4);
  t.add({0, 0}, -1);
  EXPECT_TRUE(t.all_zero());
}

TEST(Table, RejectsKeysOutsideTheRectangle) {
  DimensionTable t("T", {{"n", 0, 1}, {"w", 0, 2}});
  EXPECT_THROW(t.set({2, 0}, 1), Error);
  EXPECT_THROW(t.set({0, -1}, 1), Error);
  EXPECT_THROW(t.set({0}, 1), Error);
  EXPECT_THROW(t.at({0, 0}), Error);
  EXPECT_EQ(t.get({0, 0}, 9), 9);
}

TEST(Table, MalformedJsonIsAParseError) {
  auto bad = nlohmann::json::parse(R"({"label":"T","axes":[{"name":"n","lo":0,"hi":1}],"cells":[[0,1,2]],"metadata":{}})");
  try {
    DimensionTable::from_json(bad);
    FAIL() << "accepted a row of the wrong arity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
  EXPECT_THROW(DimensionTable::from_json(nlohmann::json::parse(R"({"label":"T"})")), Error);
}

TEST(Table, CsvRowsFollowCellOrder) {
  DimensionTable t("T", {{"n", 0, 1}, {"w", 0, 1}});
  t.set({1, 0}, 3);
  t.set({0, 1}, 2);
  EXPECT_EQ(t.to_csv(), "n,w,value\n0,1,2\n1,0,3\n");
}

TEST(Table, TextGridMarksMissingCells) {
  DimensionTable t("T", {{"n", 0, 1}, {"w", 0, 1}});
  t.set({0, 0}, 1);
  t.set({1, 1}, 12);
  const std::string s = t.to_text();
  EXPECT_NE(s.find("n\\w"), std::string::npos);
  EXPECT_NE(s.find('.'), std::string::npos);
  EXPECT_NE(s.find("12"), std::string::npos);
}

TEST(Report, RoundTripAndChecks) {
  Report r;
  r.command = "hh";
  r.metadata["algebra"] = "cusp";
  r.tables.push_back(sample());
  r.findings.push_back("something noteworthy");
  r.checks["a"] = true;
  EXPECT_TRUE(r.passed());
  r.checks["b"] = false;
  EXPECT_FALSE(r.passed());
  auto back = Report::from_json(nlohmann::json::parse(r.dump()));
  EXPECT_EQ(back, r);
  EXPECT_EQ(back.dump(), r.dump());
  const std::string text = r.to_text();
  EXPECT_NE(text.find("PASS a"), std::string::npos);
  EXPECT_NE(text.find("FAIL b"), std::string::npos);
  EXPECT_NE(r.to_csv().find("# HH"), std::string::npos);
}
