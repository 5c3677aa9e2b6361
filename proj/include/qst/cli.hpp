#pragma once

// Command-line front end. `run` is the whole program minus argv handling so tests can drive it.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qst/tensor.hpp"

namespace qst::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kValidation = 2, kCapacity = 3, kNumerical = 4 };

struct Cell {
  std::string text;
  std::optional<double> number;  // set for finite numeric cells
};

Cell num(double v);
Cell num(std::int64_t v);
Cell str(std::string s);
Cell flag(bool b);
Cell p_cell(const SchattenP& p);
Cell missing();

// %.12g, with "inf" for +infinity and "na" for NaN.
std::string format_number(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
};

// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(const std::string& text);

void write_csv(const Table& t, const std::string& config, std::ostream& out);
void write_json(const Table& t, const std::string& config, std::ostream& out);

std::vector<SchattenP> parse_p_list(const std::string& text);

// Table builders behind the subcommands.
Table analyze_table(const std::string& protocol, int sites, int local_dim,
                    const std::string& subspace, const std::vector<SchattenP>& ps);
Table sweep_table(int sites, int count, std::uint64_t seed, const std::vector<SchattenP>& ps);
Table surface_table(int sites, int grid_n);
Table endmatter_table(const std::vector<SchattenP>& ps);

struct BoundsOptions {
  int sites = 0;
  int k = 0;
  double alpha = 0.0;
  double distance = 0.0;
  double c_pnorm = 1.0;
  double c_op = 1.0;
  double v = 1.0;
  double beta_op = 1.0;
  double c_frob = 1.0;
  std::optional<SchattenP> p;
  std::optional<double> reg_dim;
  std::vector<std::int64_t> m_list;
};
Table bounds_table(const BoundsOptions& opt);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qst::cli
