#include "wkbgo/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

using namespace wkbgo;

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("double formatting round trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_double(1e-300)) == 1e-300);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(json_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(json_number(2.5) == 2.5);
}

TEST_CASE("report hash ignores nothing but itself") {
  const auto a = make_report("closure", "abc", {{"x", 1}}, {{"y", 2}});
  const auto b = make_report("closure", "abc", {{"x", 1}}, {{"y", 2}});
  const auto c = make_report("closure", "abc", {{"x", 1}}, {{"y", 3}});
  CHECK(a == b);
  CHECK(a["content_sha256"] != c["content_sha256"]);
  auto stripped = a;
  stripped.erase("content_sha256");
  CHECK(a["content_sha256"] == sha256_hex(stripped.dump()));
}

TEST_CASE("csv quoting") {
  CsvTable t({"a", "b"});
  t.row({"1", "x,y"}).row({"say \"hi\"", "2"});
  CHECK(t.str() == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",2\n");
  CHECK_THROWS(t.row({"only one"}));
}

TEST_CASE("atomic write leaves no temporary") {
  const auto dir = std::filesystem::temp_directory_path() / "wkbgo_report_test";
  std::filesystem::remove_all(dir);
  write_file_atomic(dir / "sub" / "f.txt", "hello");
  std::ifstream is(dir / "sub" / "f.txt");
  std::string s;
  std::getline(is, s);
  CHECK(s == "hello");
  CHECK_FALSE(std::filesystem::exists(dir / "sub" / "f.txt.tmp"));
  std::filesystem::remove_all(dir);
}
