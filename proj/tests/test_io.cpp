#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "vibron/io/config.hpp"
#include "vibron/io/csv.hpp"

using namespace vibron::io;

TEST(Csv, FormatsSeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-20), "-2.4999999999999999e-20");
  EXPECT_EQ(std::stod(format_double(1.0 / 3)), 1.0 / 3);
  CsvWriter w({"a", "b", "c"});
  w.row(1, 0.5, std::string("x,y"));
  EXPECT_EQ(w.str(), "a,b,c\n1,0.5,\"x,y\"\n");
  EXPECT_THROW(w.row(1, 2), std::invalid_argument);
}

TEST(Csv, AtomicCommit) {
  const auto dir = std::filesystem::temp_directory_path() / "vibron_csv_test";
  std::filesystem::remove_all(dir);
  CsvWriter w({"t"});
  w.row(0.25);
  w.commit(dir / "out.csv");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.csv.tmp"));
  std::ifstream f(dir / "out.csv");
  std::string s((std::istreambuf_iterator<char>(f)), {});
  EXPECT_EQ(s, "t\n0.25\n");
  std::filesystem::remove_all(dir);
}

TEST(Config, ParseAndRoundTrip) {
  const std::string text =
      "# comment\n"
      "out = results\n"
      "\n"
      "[quench]\n"
      "N = 50,90,130\n"
      "xi = 0.6:0.8   \n"
      "[table1]\n"
      "N=150\n";
  const ConfigFile a = parse_config(text, "x.ini");
  ASSERT_EQ(a.entries.size(), 4u);
  EXPECT_EQ(a.entries[0].section, "");
  EXPECT_EQ(a.entries[2].value, "0.6:0.8");
  EXPECT_EQ(a.entries[2].line, 6);
  const ConfigFile b = parse_config(serialize_config(a));
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_EQ(serialize_config(b), serialize_config(a));
}

TEST(Config, LineDiagnostics) {
  try {
    parse_config("[a]\nx = 1\nnot a pair\n", "bad.ini");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.ini:3"), std::string::npos);
  }
  EXPECT_THROW(parse_config("[a\n"), ConfigError);
  EXPECT_THROW(parse_config("[a]\nx=1\nx=2\n"), ConfigError);
  EXPECT_THROW(parse_config("bad key = 1\n"), ConfigError);
}
