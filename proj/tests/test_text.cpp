#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>

#include "rkwave/errors.hpp"
#include "rkwave/text.hpp"

using namespace rkwave;

TEST_CASE("shortest round-trip formatting") {
  CHECK(text::format_double(0.1) == "0.1");
  CHECK(text::format_double(1e-300) == "1e-300");
  CHECK(text::format_double(-2.5) == "-2.5");
  CHECK(text::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(text::format_double(std::nan("")) == "nan");
  for (double x : {1.0 / 3, std::numbers::pi, 6.02e23, 4.9e-324}) {
    CHECK(text::parse_double(text::format_double(x)) == x);
  }
}

TEST_CASE("strict number parsing") {
  CHECK(text::parse_double("+1.5") == 1.5);
  CHECK_THROWS_AS(text::parse_double("1.5x"), ParseError);
  CHECK_THROWS_AS(text::parse_double(""), ParseError);
  CHECK(text::parse_int("-12") == -12);
  CHECK_THROWS_AS(text::parse_int("3.0"), ParseError);
}

TEST_CASE("scalar expressions") {
  const double pi = std::numbers::pi;
  CHECK(text::parse_scalar("0.5") == 0.5);
  CHECK(text::parse_scalar("-0.25") == -0.25);
  CHECK(text::parse_scalar("3/4") == 0.75);
  CHECK(text::parse_scalar("-1/2") == -0.5);
  CHECK(text::parse_scalar("pi") == pi);
  CHECK(text::parse_scalar("-pi") == -pi);
  CHECK(text::parse_scalar("pi/6") == pi / 6);
  CHECK(text::parse_scalar("-pi/6") == -pi / 6);
  CHECK(text::parse_scalar("2*pi/3") == 2 * pi / 3);
  CHECK_THROWS_AS(text::parse_scalar("1/0"), ParseError);
  CHECK_THROWS_AS(text::parse_scalar("tau"), ParseError);
}

TEST_CASE("lists and config files") {
  CHECK(text::split_list("RK4, LDDRK46 ,Opt6") == std::vector<std::string>{"RK4", "LDDRK46", "Opt6"});
  CHECK(text::split_list("  ").empty());
  CHECK_THROWS_AS(text::split_list("a,,b"), ParseError);

  const auto kv = text::parse_config("a = 1 # note\n\n  b=two words\n");
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b") == "two words");
  CHECK_THROWS_AS(text::parse_config("a = 1\na = 2\n"), ParseError);
  CHECK_THROWS_AS(text::parse_config("novalue\n"), ParseError);
  CHECK_THROWS_AS(text::parse_config("a =\n"), ParseError);
}

TEST_CASE("tokenizer and key=value tokens") {
  const auto lines = text::tokenize("scheme A stages=4  # comment\n\n  end\n");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].number == 1);
  CHECK(lines[1].number == 3);
  CHECK(lines[0].tokens.size() == 3);
  const auto kv = text::key_values(lines[0], 2);
  CHECK(kv.at("stages") == "4");
  CHECK_THROWS_AS(text::key_values(text::tokenize("x a=1 a=2")[0], 1), ParseError);
}

TEST_CASE("atomic file writing") {
  const auto dir = std::filesystem::temp_directory_path() / "rkwave_text_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.txt").string();
  text::write_file_atomic(path, "hello\n");
  CHECK(text::read_file(path) == "hello\n");
  text::write_file_atomic(path, "again\n");
  CHECK(text::read_file(path) == "again\n");
  CHECK_THROWS_AS(text::read_file((dir / "missing.txt").string()), IoError);
  std::filesystem::remove_all(dir);
}
