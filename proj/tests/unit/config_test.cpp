#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hyperorder/config.hpp"
#include "hyperorder/error.hpp"

using hyperorder::FormatError;
using hyperorder::KeyValueConfig;

TEST(Config, ParsesValuesAndComments) {
  const auto c = KeyValueConfig::parse("# top\nepochs = 12\n lr=0.5  # inline\n\nalg = sift\nepochs = 30\n");
  EXPECT_EQ(c.get_int("epochs", 0), 30);
  EXPECT_DOUBLE_EQ(c.get_double("lr", 0.0), 0.5);
  EXPECT_EQ(c.get("alg", ""), "sift");
  EXPECT_EQ(c.get("missing", "dflt"), "dflt");
  EXPECT_EQ(c.get_int("missing", 7), 7);
  EXPECT_FALSE(c.has("missing"));
  EXPECT_EQ(c.unknown_keys({"epochs", "alg"}), std::vector<std::string>{"lr"});
}

TEST(Config, RejectsMalformed) {
  EXPECT_THROW(KeyValueConfig::parse("just a line\n"), FormatError);
  EXPECT_THROW(KeyValueConfig::parse("= 3\n"), FormatError);
  const auto c = KeyValueConfig::parse("n = abc\nx = 1.5\n");
  EXPECT_THROW(c.get_int("n", 0), FormatError);
  EXPECT_THROW(c.get_int("x", 0), FormatError);
  EXPECT_THROW(c.get_double("n", 0), FormatError);
  EXPECT_THROW(KeyValueConfig::load("/nonexistent/hyperorder.cfg"), hyperorder::Error);
}

TEST(Config, LoadsFile) {
  const auto path = std::filesystem::temp_directory_path() / "hyperorder_config_test.cfg";
  std::ofstream(path) << "seed = 9\n";
  auto c = KeyValueConfig::load(path.string());
  EXPECT_EQ(c.get_int("seed", 0), 9);
  c.set("seed", "10");
  EXPECT_EQ(c.get_int("seed", 0), 10);
  std::filesystem::remove(path);
}
