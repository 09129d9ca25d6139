#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "entmono/io.hpp"

using namespace entmono;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("entmono_io_" + name)).string();
}

}  // namespace

TEST(FormatNumber, NineSignificantDigits) {
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.1234567891234), "0.123456789");
  EXPECT_EQ(format_number(-2.5e-12), "-2.5e-12");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(json_number(0.1234567891234).get<double>(), 0.123456789);
  EXPECT_TRUE(json_number(std::numeric_limits<double>::infinity()).is_string());
}

TEST(StateJson, RoundTripPureAndMixed) {
  const QuantumState pure = haar_random_pure(Dims{2, 3}, 4);
  const QuantumState back = state_from_json(state_to_json(pure));
  EXPECT_EQ(back.kind(), StateKind::pure);
  EXPECT_EQ(back.dims(), pure.dims());
  EXPECT_LE(max_abs_diff(back.vector(), pure.vector()), 0.0);

  const QuantumState mixed = QuantumState::mixed({2, 2}, induced_mixed(4, 3, 2).density());
  const std::string path = temp_path("mixed.json");
  write_state_file(path, mixed);
  const QuantumState read = read_state_file(path);
  EXPECT_EQ(read.kind(), StateKind::mixed);
  EXPECT_LE(max_abs_diff(read.density(), mixed.density()), 0.0);
  std::filesystem::remove(path);
}

TEST(StateJson, SchemaLayout) {
  const Json j = state_to_json(max_entangled(2));
  EXPECT_EQ(j["kind"], "pure");
  EXPECT_EQ(j["dims"], Json::array({2, 2}));
  ASSERT_EQ(j["data"].size(), 4u);
  EXPECT_NEAR(j["data"][3][0].get<double>(), 1.0 / std::sqrt(2.0), 1e-16);
  EXPECT_EQ(j["data"][3][1].get<double>(), 0.0);
}

TEST(StateJson, Errors) {
  auto code = [](const std::string& text) {
    try {
      state_from_json(Json::parse(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  EXPECT_EQ(code(R"({"dims":[2],"kind":"pure"})"), ErrorCode::parse_error);
  EXPECT_EQ(code(R"({"dims":[2],"kind":"weird","data":[[1,0],[0,0]]})"), ErrorCode::parse_error);
  EXPECT_EQ(code(R"({"dims":[2],"kind":"pure","data":[[1,0,0],[0,0]]})"), ErrorCode::parse_error);
  EXPECT_EQ(code(R"({"dims":[2],"kind":"pure","data":[[1,0],[1,0]]})"), ErrorCode::not_normalized);
  EXPECT_EQ(code(R"({"dims":[2],"kind":"mixed","data":[[1,0],[0,0],[0,0],[-0.5,0]]})"), ErrorCode::not_psd);
  EXPECT_EQ(code(R"([1,2])"), ErrorCode::parse_error);
  const std::string bad = temp_path("bad.json");
  write_text_file(bad, "{not json");
  try {
    read_state_file(bad);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
  }
  std::filesystem::remove(bad);
  try {
    read_state_file(temp_path("missing.json"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
}

TEST(Reports, CsvAndJson) {
  const ScanReport r = scan_ckw(3, 1);
  const std::string csv = scan_csv(r);
  EXPECT_EQ(csv.rfind("sample_index,e_ab,e_ac,e_abc,slack\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const Json j = scan_report_to_json(r);
  EXPECT_EQ(j["samples"].size(), 3u);
  EXPECT_EQ(j["violations"], 0);
  EXPECT_EQ(j["slack_kind"], "ckw");
  EXPECT_TRUE(j["alpha_star"].is_null());
  EXPECT_EQ(j["master_seed"], 1);
  const std::string table = region_csv(region_table(r));
  EXPECT_EQ(table.rfind("sample_index,e_ab,e_ac,e_abc,x,y\n", 0), 0u);
}

TEST(Reports, TranscriptAndMeasureJson) {
  const Transcript t = teleport_branch(Vector::basis(2, 1), 2);
  const Json j = transcript_to_json(t);
  ASSERT_EQ(j["steps"].size(), 4u);
  EXPECT_EQ(j["steps"][2]["outcome"], "10");
  EXPECT_EQ(j["steps"][3]["actor"], "B");
  EXPECT_EQ(j["final_state"]["kind"], "pure");
  MeasureResult m;
  m.value = 0.5;
  m.method = Method::convex_roof;
  m.iterations = 3;
  const Json mj = measure_result_to_json(m);
  EXPECT_EQ(mj["method"], "convex_roof");
  EXPECT_EQ(mj["iterations"], 3);
}
