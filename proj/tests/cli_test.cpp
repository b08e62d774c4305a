#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hodgekit/cli.hpp"

using namespace hodgekit;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("hodgekit_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                                  ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Cli, Examples) {
  auto a = execute_command({"correlator", "--g", "1", "--d", "1"});
  EXPECT_EQ(a.exit_code(), 0);
  EXPECT_EQ(a.payload, nlohmann::json::parse(R"({"g":1,"d":[1],"v":"1/24"})"));
  EXPECT_EQ(a.output, "{\"d\":[1],\"g\":1,\"v\":\"1/24\"}\n");
  EXPECT_EQ(execute_command({"hurwitz", "single", "--g", "0", "--alpha", "1,1,1"}).output, "{\"H\":\"24/1\"}\n");
  EXPECT_EQ(execute_command({"tft", "closed", "--g", "1", "--deltas", "1,4"}).output, "{\"Z\":\"2/1\"}\n");
  EXPECT_EQ(execute_command({"hurwitz", "double", "--g", "1", "--d", "2", "--beta", "2"}).output, "{\"H\":\"1/2\"}\n");
}

TEST(Cli, InvalidInputs) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"correlator", "--g", "1"},
           {"correlator", "--g", "0", "--d", "0"},
           {"correlator", "--g", "1", "--d", "1", "--format", "xml"},
           {"hurwitz", "double", "--g", "0", "--d", "4", "--beta", "1,1"},
           {"tft", "closed", "--g", "1", "--deltas", "1,0"},
           {"elsv", "fit", "--g", "1", "--n", "2", "--max-part", "2"},
           {"kp-check", "--input", "/nonexistent/file.json"}}) {
    auto r = execute_command(args);
    EXPECT_EQ(r.exit_code(), 2) << (args.empty() ? "" : args[0]);
    EXPECT_FALSE(r.diagnostics.empty());
  }
  EXPECT_NE(execute_command({"frobnicate"}).diagnostics.find("Usage"), std::string::npos);
}

TEST(Cli, ResourceLimit) {
  auto r = execute_command({"--budget", "0.000001", "virasoro-check", "--nmax", "3", "--K", "6", "--D", "6"});
  EXPECT_EQ(r.exit_code(), 3);
}

TEST(Cli, CheckCommandsPass) {
  auto kdv = execute_command({"kdv-check", "--K", "6", "--D", "6", "--gmax", "2"});
  EXPECT_EQ(kdv.exit_code(), 0);
  EXPECT_TRUE(kdv.payload["ok"].get<bool>());
  auto vir = execute_command({"virasoro-check", "--nmax", "2", "--K", "5", "--D", "6"});
  EXPECT_EQ(vir.exit_code(), 0);
  EXPECT_EQ(vir.payload["passing_ranges"], nlohmann::json({"from_zero"}));
  auto dh = execute_command({"dh", "fit", "--g", "0", "--n", "3", "--max-d", "6"});
  EXPECT_EQ(dh.exit_code(), 0);
  EXPECT_EQ(dh.payload["conjecture_form"], "GJV-3.5");
  auto lg = execute_command({"elsv", "lambda-g", "--g", "1", "--n", "2"});
  EXPECT_EQ(lg.exit_code(), 0);
  EXPECT_EQ(lg.payload["c_g"], "1/24");
}

TEST(Cli, KpCheckFromFile) {
  TempDir dir;
  TruncatedSeries sq(VariableFamily::P, TruncationSpec{5, 8, 0, 0});
  sq.set(0, {2, 0, 0, 0, 0}, 1);
  write_file(dir / "sq.json", to_json(sq).dump());
  write_file(dir / "log.json", to_json(log_one_plus_p1(5, 8)).dump());
  EXPECT_EQ(execute_command({"kp-check", "--input", (dir / "log.json").string()}).exit_code(), 0);
  auto bad = execute_command({"kp-check", "--input", (dir / "sq.json").string()});
  EXPECT_EQ(bad.exit_code(), 1);
  EXPECT_FALSE(bad.payload["ok"].get<bool>());
  write_file(dir / "broken.json", "{\"family\":");
  EXPECT_EQ(execute_command({"kp-check", "--input", (dir / "broken.json").string()}).exit_code(), 2);
}

TEST(Cli, TftEvalFromFile) {
  TempDir dir;
  write_file(dir / "cob.json", R"({"components":[{"g":0,"in":["a","b"],"out":["c"]},{"g":1,"in":[],"out":[]}],"inputs":["a","b"],"outputs":["c"]})");
  auto r = execute_command({"tft", "eval", "--file", (dir / "cob.json").string(), "--deltas", "1,4"});
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_TRUE(r.payload["pants_agree"].get<bool>());
  EXPECT_EQ(r.payload["scalar"], "2/1");
  EXPECT_EQ(r.payload["blocks"][0]["entries"][1]["factor"], "1/2");
}

TEST(Cli, CsvFormat) {
  auto r = execute_command({"--format", "csv", "correlator", "--g", "1", "--d", "1"});
  EXPECT_EQ(r.output, "field,value\nd[0],1\ng,1\nv,1/24\n");
}

TEST(Cli, ColdAndWarmCacheAreByteIdentical) {
  TempDir dir;
  const std::string cache = (dir / "cache.jsonl").string();
  const std::vector<std::vector<std::string>> commands{
      {"correlator", "--g", "2", "--d", "2,3"},
      {"kdv-check", "--K", "6", "--D", "6", "--gmax", "2"},
      {"hurwitz", "single", "--g", "1", "--alpha", "2,1"},
      {"elsv", "fit", "--g", "1", "--n", "1", "--max-part", "7"},
      {"dh", "fit", "--g", "1", "--n", "1", "--max-d", "6"}};
  for (const auto& cmd : commands) {
    std::vector<std::string> with_cache{"--cache", cache};
    with_cache.insert(with_cache.end(), cmd.begin(), cmd.end());
    auto plain = execute_command(cmd);
    auto cold = execute_command(with_cache);
    auto warm = execute_command(with_cache);
    EXPECT_EQ(cold.exit_code(), 0);
    EXPECT_EQ(cold.output, plain.output);
    EXPECT_EQ(warm.output, cold.output);
  }
  auto records = read_cache_file(cache);
  EXPECT_GT(records.size(), 10u);
  const std::string text = read_file(cache);
  EXPECT_NE(text.find(R"({"key":"g=1;d=1","kind":"correlator","tool_version":"0.1.0","value":"1/24"})"), std::string::npos);
}

TEST(Cli, CorruptCacheIsRejected) {
  TempDir dir;
  const fs::path cache = dir / "cache.jsonl";
  write_file(cache, "{\"key\":\"g=1;d=1\",\"kind\":\"correlator\",\"tool_version\":\"0.1.0\",\"value\":\"1/24\"}\n{\"key\":");
  auto r = execute_command({"--cache", cache.string(), "correlator", "--g", "1", "--d", "1"});
  EXPECT_EQ(r.exit_code(), 2);
  EXPECT_NE(r.diagnostics.find("cache line 2"), std::string::npos);
}

TEST(Cache, Roundtrip) {
  TempDir dir;
  EXPECT_TRUE(cache_roundtrip(dir / "empty.jsonl", {}).empty());
  std::vector<CacheRecord> one{{"correlator", "g=1;d=1", make_rational(1, 24), kToolVersion}};
  EXPECT_EQ(cache_roundtrip(dir / "one.jsonl", one), one);
  std::vector<CacheRecord> many{{"hurwitz", "single;g=0;alpha=1,1,1", Rational(24), kToolVersion},
                                {"hodge", "g=1;n=1;a=0;k=1", make_rational(1, 24), kToolVersion},
                                {"dh", "g=1;n=1;a=2;k=0", make_rational(-7, 3), kToolVersion}};
  EXPECT_EQ(cache_roundtrip(dir / "many.jsonl", many), many);
  EXPECT_FALSE(fs::exists(dir / "many.jsonl.tmp"));
}

TEST(Cache, IntegrityErrorsNameTheLine) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_cache_records(in);
    } catch (const CacheIntegrity& e) {
      return e.line();
    }
    return 0;
  };
  const std::string good = "{\"key\":\"g=1;d=1\",\"kind\":\"correlator\",\"tool_version\":\"0.1.0\",\"value\":\"1/24\"}\n";
  EXPECT_EQ(line_of(good), 0u);
  EXPECT_EQ(line_of(good + good.substr(0, 20)), 2u);                        // truncated final line
  EXPECT_EQ(line_of(good + good.substr(0, good.size() - 1)), 2u);           // missing newline
  EXPECT_EQ(line_of(good + good + "not json\n"), 3u);
  EXPECT_EQ(line_of("{\"key\":\"k\",\"kind\":\"weird\",\"tool_version\":\"0.1.0\",\"value\":\"1/2\"}\n"), 1u);
  EXPECT_EQ(line_of("{\"key\":\"k\",\"kind\":\"hodge\",\"tool_version\":\"0.1.0\",\"value\":\"2/4\"}\n"), 1u);
}

TEST(Cache, ConflictingValueIsIntegrityError) {
  Cache c;
  c.put("hurwitz", "x", Rational(1));
  c.put("hurwitz", "x", Rational(1));
  EXPECT_THROW(c.put("hurwitz", "x", Rational(2)), IntegrityError);
}
