#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using namespace conformal;
namespace fs = std::filesystem;

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "conformal_io_test";
  fs::create_directories(dir);
  return dir;
}

CurveSamples small_string() { return sample_string(Modulus({5, 9}, {1, 9}), 64); }

TEST(Format, DoublesRoundTripAtSeventeenDigits) {
  conformal::testing::Generator g(81);
  for (int i = 0; i < 1000; ++i) {
    const double x = g.uniform(-1, 1) * std::pow(10.0, g.uniform(-200, 200));
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_THROW(parse_double("1.5x"), ParseError);
  EXPECT_THROW(parse_double(""), ParseError);
}

TEST(Format, Names) {
  EXPECT_EQ(parse_format("csv"), PolylineFormat::csv);
  EXPECT_EQ(parse_format("json"), PolylineFormat::json);
  EXPECT_EQ(parse_format("obj"), PolylineFormat::obj);
  EXPECT_THROW(parse_format("ply"), ParseError);
}

TEST(Csv, RoundTrip) {
  const auto s = small_string();
  std::stringstream buffer;
  write_csv(buffer, s);
  EXPECT_EQ(buffer.str().substr(0, 8), "t,x,y,z\n");
  const auto back = read_csv(buffer);
  EXPECT_EQ(back.ts, s.ts);
  EXPECT_EQ(back.points, s.points);
}

TEST(Csv, RejectsMalformedInput) {
  std::stringstream no_header("1,2,3,4\n");
  EXPECT_THROW(read_csv(no_header), ParseError);
  std::stringstream short_row("t,x,y,z\n1,2,3\n");
  EXPECT_THROW(read_csv(short_row), ParseError);
}

TEST(Obj, RoundTrip) {
  const auto s = small_string();
  std::stringstream buffer;
  write_obj(buffer, s);
  const auto back = read_obj(buffer);
  EXPECT_EQ(back.points, s.points);
  EXPECT_TRUE(back.meta.closed);
  auto open = s;
  open.meta.closed = false;
  std::stringstream b2;
  write_obj(b2, open);
  EXPECT_FALSE(read_obj(b2).meta.closed);
}

TEST(Json, RecordRoundTrip) {
  InversionCache cache;
  const Modulus q({5, 9}, {1, 3});
  const auto record = make_string_record(q, cache, true, 256);
  EXPECT_EQ(record.quantum, (QuantumNumbers{9, 5, 3}));
  EXPECT_EQ(record.order, 9);
  EXPECT_EQ(record.clifford_order, 3);
  ASSERT_TRUE(record.closure.has_value());
  EXPECT_LT(*record.closure, 1e-6);
  ASSERT_TRUE(record.linking.has_value());
  EXPECT_NEAR(record.linking->lk_clifford, 5.0, 1e-3);
  EXPECT_NEAR(record.linking->lk_axis, 3.0, 1e-3);

  const auto s = sample_string(q, Parameters(record.a, record.b), 64);
  std::stringstream buffer;
  write_json(buffer, record, s);
  const auto j = ordered_json::parse(buffer.str());
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["modulus"]["q2"], "1/3");
  EXPECT_EQ(j["quantum"]["l1"], 5);
  EXPECT_TRUE(j["diagnostics"].contains("order"));
  EXPECT_EQ(j["samples"].size(), s.size());

  const auto back = read_json(buffer);
  EXPECT_EQ(back.record.a, record.a);
  EXPECT_EQ(back.record.b, record.b);
  EXPECT_EQ(back.record.omega, record.omega);
  EXPECT_EQ(back.record.modulus, q);
  EXPECT_EQ(*back.record.closure, *record.closure);
  EXPECT_EQ(back.record.linking->lk_axis, record.linking->lk_axis);
  EXPECT_EQ(back.samples.points, s.points);
  EXPECT_EQ(back.samples.ts, s.ts);
}

TEST(Json, RecordWithoutGeometry) {
  InversionCache cache;
  const auto record = make_string_record(Modulus({2, 3}, {1, 9}), cache, false);
  const auto j = record_to_json(record);
  EXPECT_TRUE(j["diagnostics"]["closure"].is_null());
  const auto back = record_from_json(j);
  EXPECT_FALSE(back.closure.has_value());
  EXPECT_FALSE(back.linking.has_value());
}

TEST(Json, RejectsInconsistentRecords) {
  InversionCache cache;
  auto j = record_to_json(make_string_record(Modulus({2, 3}, {1, 9}), cache, false));
  auto wrong = j;
  wrong["quantum"]["l2"] = 2;
  EXPECT_THROW(record_from_json(wrong), ParseError);
  auto schema = j;
  schema["schema"] = 7;
  EXPECT_THROW(record_from_json(schema), ParseError);
  auto missing = j;
  missing.erase("params");
  EXPECT_THROW(record_from_json(missing), ParseError);
  std::stringstream garbage("{not json");
  EXPECT_THROW(read_json(garbage), ParseError);
}

TEST(Json, OutputIsDeterministic) {
  InversionCache c1, c2;
  const Modulus q({5, 9}, {2, 9});
  std::stringstream a, b;
  const auto s = sample_string(q, 64);
  write_json(a, make_string_record(q, c1, true, 64), s);
  write_json(b, make_string_record(q, c2, true, 64), s);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Cache, SaveAndLoad) {
  const auto path = scratch_dir() / "cache.json";
  fs::remove(path);
  InversionCache cold;
  for (const auto& q : enumerate_moduli(9)) invert_cached(q, cold);
  save_cache(path, cold);
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
  InversionCache warm;
  load_cache(path, warm);
  EXPECT_EQ(warm.snapshot(), cold.snapshot());
  const auto j = ordered_json::parse(std::ifstream(path));
  EXPECT_TRUE(j["entries"].contains("5/9,3/9"));
}

TEST(Cache, MissingFileIsEmpty) {
  InversionCache cache;
  load_cache(scratch_dir() / "does_not_exist.json", cache);
  EXPECT_EQ(cache.size(), 0u);
}

TEST(Cache, CorruptFileIsAParseError) {
  const auto path = scratch_dir() / "corrupt.json";
  std::ofstream(path) << "{\"schema\": 1, \"entries\": {\"5/9,1/9\": {\"a\": 1}}}";
  InversionCache cache;
  EXPECT_THROW(load_cache(path, cache), ParseError);
}

TEST(Cache, WarmRecordsEqualColdRecords) {
  const auto path = scratch_dir() / "warm.json";
  fs::remove(path);
  InversionCache cold;
  std::vector<std::string> cold_text;
  for (const auto& q : enumerate_moduli(9)) cold_text.push_back(record_to_json(make_string_record(q, cold, true, 256)).dump());
  save_cache(path, cold);
  InversionCache warm;
  load_cache(path, warm);
  std::size_t i = 0;
  for (const auto& q : enumerate_moduli(9))
    EXPECT_EQ(record_to_json(make_string_record(q, warm, true, 256)).dump(), cold_text[i++]);
}

}  // namespace
