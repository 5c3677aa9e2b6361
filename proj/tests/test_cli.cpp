#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "qst/cli.hpp"
#include "qst/tensor.hpp"

using namespace qst;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;

  size_t col(const std::string& name) const {
    for (size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw std::runtime_error("no column " + name);
  }
  double num(size_t row, const std::string& name) const { return std::stod(rows[row][col(name)]); }
  const std::string& text(size_t row, const std::string& name) const { return rows[row][col(name)]; }
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) {
      csv.comments.push_back(line);
    } else if (first) {
      csv.header = split(line, ',');
      first = false;
    } else {
      csv.rows.push_back(split(line, ','));
    }
  }
  return csv;
}

}  // namespace

TEST(Formatting, Numbers) {
  EXPECT_EQ(cli::format_number(2.0), "2");
  EXPECT_EQ(cli::format_number(std::sqrt(2.0)), "1.41421356237");
  EXPECT_EQ(cli::format_number(HUGE_VAL), "inf");
  EXPECT_EQ(cli::format_number(NAN), "na");
  EXPECT_EQ(cli::p_cell(SchattenP::infinity()).text, "inf");
  EXPECT_FALSE(cli::p_cell(SchattenP::infinity()).number);
}

TEST(Formatting, Fnv1a) {
  EXPECT_EQ(cli::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Formatting, PListSortedAndDeduplicated) {
  const auto ps = cli::parse_p_list("inf,2,1,2,4");
  ASSERT_EQ(ps.size(), 4u);
  EXPECT_EQ(ps[0], SchattenP(1));
  EXPECT_TRUE(ps[3].is_infinite());
  EXPECT_THROW(cli::parse_p_list(""), std::invalid_argument);
  EXPECT_THROW(cli::parse_p_list("0.5"), std::domain_error);
}

TEST(Analyze, SaturatingZero) {
  const auto r = run_cli({"analyze", "--protocol", "saturating", "--L", "4", "--subspace", "zero", "--p", "2,inf"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"protocol", "L", "D", "declared_dim", "computed_dim", "p",
                                                   "actual_norm", "bound", "gap", "transfer_pass"}));
  ASSERT_EQ(csv.rows.size(), 2u);
  for (size_t k = 0; k < 2; ++k) {
    EXPECT_LE(std::abs(csv.num(k, "gap")), 1e-9);
    EXPECT_EQ(csv.text(k, "transfer_pass"), "true");
    EXPECT_EQ(csv.text(k, "computed_dim"), "2");
  }
  EXPECT_EQ(csv.text(1, "p"), "inf");
}

TEST(Analyze, Swap) {
  const auto r = run_cli({"analyze", "--protocol", "swap", "--L", "2", "--p", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.text(0, "computed_dim"), "2");
  EXPECT_EQ(csv.text(0, "bound"), "2");
  EXPECT_NEAR(csv.num(0, "actual_norm"), 2.0, 1e-12);
}

TEST(Analyze, FastGhzTenSites) {
  const auto r = run_cli({"analyze", "--protocol", "fast-ghz", "--L", "10", "--p", "1,2,4,inf"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 4u);
  for (size_t k = 0; k < 4; ++k) EXPECT_GE(csv.num(k, "actual_norm"), csv.num(k, "bound") - 1e-9);
}

TEST(Analyze, QutritSaturating) {
  const auto r = run_cli({"analyze", "--protocol", "qudit-saturating", "--L", "3", "--D", "3", "--p", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_LE(std::abs(csv.num(0, "gap")), 1e-9);
  EXPECT_EQ(csv.text(0, "D"), "3");
}

TEST(Analyze, RandomSubspaceIsSeedFree) {
  const std::vector<std::string> args = {"analyze", "--protocol", "saturating", "--L", "4",
                                         "--subspace", "random:2", "--p", "1,2"};
  const auto a = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, run_cli(args).out);
  const auto csv = parse_csv(a.out);
  EXPECT_EQ(csv.text(0, "computed_dim"), "4");
}

TEST(ExitCodes, Validation) {
  EXPECT_EQ(run_cli({"analyze", "--protocol", "bogus", "--L", "4"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"analyze", "--protocol", "fast-ghz", "--L", "4", "--subspace", "zero"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"analyze", "--protocol", "fast-ghz", "--L", "5"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"analyze", "--protocol", "fast-ghz", "--L", "4", "--D", "3"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"analyze", "--protocol", "swap", "--L", "2", "--p", "0.5"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"analyze", "--protocol", "saturating", "--L", "4", "--subspace", "random:9"}).code,
            cli::kValidation);
  EXPECT_EQ(run_cli({"analyze", "--L", "4"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"surface", "--grid", "1"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"bounds", "--L", "10", "--k", "10", "--alpha", "2"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"bounds", "--L", "10", "--k", "0", "--alpha", "0.5"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({"bounds", "--L", "10", "--k", "0", "--alpha", "2", "--m-list", "2,x"}).code,
            cli::kValidation);
  EXPECT_EQ(run_cli({"--format", "xml", "surface"}).code, cli::kValidation);
  EXPECT_EQ(run_cli({}).code, cli::kValidation);
}

TEST(ExitCodes, Capacity) {
  EXPECT_EQ(run_cli({"analyze", "--protocol", "swap", "--L", "13"}).code, cli::kCapacity);
  EXPECT_EQ(run_cli({"--max-dim", "16", "analyze", "--protocol", "swap", "--L", "5"}).code, cli::kCapacity);
  // The cap does not leak into later runs.
  EXPECT_EQ(max_dense_dim(), 4096);
  EXPECT_EQ(run_cli({"--max-dim", "8192", "analyze", "--protocol", "swap", "--L", "2", "--p", "2"}).code, cli::kOk);
}

TEST(Output, TrailingMetadataAndDeterminism) {
  const std::vector<std::string> args = {"surface", "--L", "4", "--grid", "3"};
  const auto a = run_cli(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, run_cli(args).out);
  const auto csv = parse_csv(a.out);
  ASSERT_GE(csv.comments.size(), 2u);
  EXPECT_EQ(csv.comments[csv.comments.size() - 2], std::string("#tool-version=") + cli::kToolVersion);
  EXPECT_TRUE(csv.comments.back().starts_with("#config-hash="));
  const auto b = parse_csv(run_cli({"surface", "--L", "5", "--grid", "3"}).out);
  EXPECT_NE(csv.comments.back(), b.comments.back());
}

TEST(Output, FileOutput) {
  const auto path = std::filesystem::temp_directory_path() / "qst_cli_test_surface.csv";
  const auto r = run_cli({"-o", path.string(), "surface", "--L", "3", "--grid", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), run_cli({"surface", "--L", "3", "--grid", "2"}).out);
  std::filesystem::remove(path);
}

TEST(Output, Json) {
  const auto r = run_cli({"--format", "json", "analyze", "--protocol", "swap", "--L", "2", "--p", "2,inf"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["columns"].size(), 10u);
  ASSERT_EQ(doc["rows"].size(), 2u);
  EXPECT_EQ(doc["rows"][1]["p"], "inf");
  EXPECT_DOUBLE_EQ(doc["rows"][0]["p"].get<double>(), 2.0);
  EXPECT_EQ(doc["rows"][0]["transfer_pass"], "true");
  EXPECT_EQ(doc["tool_version"], cli::kToolVersion);
  EXPECT_EQ(doc["config_hash"].get<std::string>().size(), 16u);
}

TEST(Surface, Pinning) {
  const auto r = run_cli({"surface", "--L", "10", "--grid", "21"});
  ASSERT_EQ(r.code, 0);
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"frac", "inv_p", "bound"}));
  ASSERT_EQ(csv.rows.size(), 21u * 21u);
  int frac_one = 0, inv_zero = 0, p_one = 0;
  for (size_t k = 0; k < csv.rows.size(); ++k) {
    const double frac = csv.num(k, "frac");
    const double inv_p = csv.num(k, "inv_p");
    EXPECT_GE(frac, std::pow(2.0, -9.0) * (1 - 1e-12));
    if (csv.text(k, "frac") == "1") {
      EXPECT_EQ(csv.text(k, "bound"), "2");
      ++frac_one;
    }
    if (csv.text(k, "inv_p") == "0") {
      EXPECT_EQ(csv.text(k, "bound"), "2");
      ++inv_zero;
    }
    if (inv_p == 1.0) {
      // CSV cells carry 12 significant digits.
      EXPECT_NEAR(csv.num(k, "bound"), 2.0 * frac, 1e-11);
      ++p_one;
    }
  }
  EXPECT_EQ(frac_one, 21);
  EXPECT_EQ(inv_zero, 21);
  EXPECT_EQ(p_one, 21);
  EXPECT_EQ(csv.text(0, "frac"), cli::format_number(std::pow(2.0, -9.0)));

  const auto json = run_cli({"--format", "json", "surface", "--L", "10", "--grid", "21"});
  ASSERT_EQ(json.code, 0);
  const auto doc = nlohmann::json::parse(json.out);
  int checked = 0;
  for (const auto& row : doc["rows"]) {
    if (!row["inv_p"].is_number() || !row["frac"].is_number() || row["inv_p"].get<double>() != 1.0) continue;
    EXPECT_NEAR(row["bound"].get<double>(), 2.0 * row["frac"].get<double>(), 1e-12);
    ++checked;
  }
  EXPECT_EQ(checked, 21);
}

TEST(Surface, HalfFractionAtPOne) {
  const auto t = cli::surface_table(2, 2);
  bool found = false;
  for (const auto& row : t.rows) {
    if (row[0].text == "0.5" && row[1].text == "1") {
      EXPECT_EQ(row[2].text, "1");
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Bounds, FullRobustness) {
  const auto r = run_cli({"bounds", "--L", "100", "--k", "99", "--alpha", "1.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_EQ(csv.text(0, "p_star"), "2");
  EXPECT_EQ(csv.text(0, "t_pnorm"), "na");
  EXPECT_EQ(csv.header.size(), 13u);
  EXPECT_EQ(csv.text(0, "C_frob"), "1");
}

TEST(Bounds, NoRobustness) {
  const auto r = run_cli({"bounds", "--L", "100", "--k", "0", "--alpha", "2.0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_NEAR(csv.num(0, "p_star"), 137.25, 0.01);
  EXPECT_NEAR(csv.num(0, "p_star"), 2.0 * std::log(2.0) * 99.0, 1e-9);
  EXPECT_EQ(csv.text(0, "t_op"), "na");
  bool noted = false;
  for (const auto& c : csv.comments) noted = noted || c.starts_with("#note=");
  EXPECT_TRUE(noted);
}

TEST(Bounds, MeasurementFactors) {
  const auto r = run_cli({"bounds", "--L", "10", "--k", "3", "--alpha", "1.75", "--p", "2", "--reg-dim", "4",
                          "--m-list", "2,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  EXPECT_NEAR(csv.num(0, "qubit_bound"), 2.0 * std::pow(2.0, -6.0 / 2.0), 1e-12);
  EXPECT_NEAR(csv.num(0, "reg_factor"), 0.5, 1e-12);
  EXPECT_NEAR(csv.num(0, "channel_bound"), 0.125, 1e-12);
  EXPECT_NEAR(csv.num(0, "measurement_factor"), 2.0, 1e-12);
  EXPECT_NEAR(csv.num(0, "measurement_bound"), 0.25, 1e-12);
  EXPECT_EQ(csv.text(0, "bound_p"), "2");
}

TEST(Sweep, RandomUnitaries) {
  const auto r = run_cli({"sweep", "--L", "3", "--count", "3", "--seed", "5", "--p", "1,2,inf"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 9u);
  for (size_t k = 0; k < csv.rows.size(); ++k) {
    EXPECT_LE(csv.num(k, "lemma_s1_deviation"), 1e-10);
    EXPECT_NEAR(csv.num(k, "phase_norm"), csv.num(k, "actual_norm"), 1e-9);
    if (csv.text(k, "bound") != "na") EXPECT_EQ(csv.text(k, "bound_holds"), "true");
  }
  EXPECT_NE(r.out, run_cli({"sweep", "--L", "3", "--count", "3", "--seed", "6", "--p", "1,2,inf"}).out);
}
