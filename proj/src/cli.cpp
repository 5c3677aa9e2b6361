#include "qst/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qst/errors.hpp"
#include "qst/operators.hpp"
#include "qst/protocols.hpp"
#include "qst/robustness.hpp"
#include "qst/runtime_bounds.hpp"

namespace qst::cli {

namespace {

constexpr std::uint64_t kRandomSubspaceSeed = 20240607;

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t k = 0; k < parts.size(); ++k) {
    if (k) out += sep;
    out += parts[k];
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string p_list_text(const std::vector<SchattenP>& ps) {
  std::vector<std::string> parts;
  for (const auto& p : ps) parts.push_back(p.to_string());
  return join(parts, ",");
}

SubspaceBasis random_subspace(int n_sites, int local_dim, int count) {
  const Index dim = register_dim(n_sites, local_dim);
  if (count < 1 || count > dim) {
    throw ValidationError("random subspace size must lie in [1, " + std::to_string(dim) + "]");
  }
  std::mt19937_64 rng(kRandomSubspaceSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> vecs;
  for (int k = 0; k < count; ++k) {
    Vector v(dim);
    for (Index j = 0; j < dim; ++j) v(j) = Complex(normal(rng), normal(rng));
    vecs.push_back(v);
  }
  auto basis = projector_span(vecs);
  if (basis.dim() != count) throw NumericalError("random subspace came out rank deficient");
  return basis;
}

// zero | full | random:N on the middle register.
SubspaceBasis parse_subspace(const std::string& spec, int n_sites, int local_dim) {
  if (spec == "zero") {
    return n_sites == 0 ? SubspaceBasis::trivial() : projector_all_zero(n_sites, local_dim);
  }
  if (spec == "full") return projector_full(n_sites, local_dim);
  if (spec.rfind("random:", 0) == 0) {
    const std::string count = spec.substr(7);
    size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != count.size()) throw ValidationError("bad subspace size in '" + spec + "'");
    return random_subspace(n_sites, local_dim, n);
  }
  throw ValidationError("unknown subspace '" + spec + "' (expected zero, full or random:N)");
}

ProtocolInstance build_protocol(const std::string& name, int sites, int local_dim,
                                const std::string& subspace) {
  const auto cfg = LatticeConfig::chain(sites, local_dim);
  cfg.validate();
  if (name == "saturating" || name == "qudit-saturating") {
    const auto s_prime = parse_subspace(subspace, sites - 2, local_dim);
    return name == "saturating" ? build_saturating(cfg, s_prime) : build_qudit_saturating(cfg, s_prime);
  }
  if (name == "fast-ghz") return build_fast_ghz(cfg);
  if (name == "symmetrized") return build_symmetrized(cfg);
  if (name == "swap") return build_swap(cfg);
  throw ValidationError("unknown protocol '" + name + "'");
}

int log2_exact(Index n) {
  int k = 0;
  while ((Index{1} << k) < n) ++k;
  return (Index{1} << k) == n ? k : -1;
}

nlohmann::json cell_json(const Cell& c) {
  if (c.number) return *c.number;
  return c.text;
}

}  // namespace

// ---- cells and output -------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "na";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Cell num(double v) {
  Cell c{format_number(v), std::nullopt};
  if (std::isfinite(v)) c.number = v;
  return c;
}

Cell num(std::int64_t v) { return {std::to_string(v), static_cast<double>(v)}; }
Cell str(std::string s) { return {std::move(s), std::nullopt}; }
Cell flag(bool b) { return {b ? "true" : "false", std::nullopt}; }
Cell p_cell(const SchattenP& p) { return p.is_infinite() ? str("inf") : num(p.value()); }
Cell missing() { return str("na"); }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_csv(const Table& t, const std::string& config, std::ostream& out) {
  out << join(t.columns, ",") << '\n';
  for (const auto& row : t.rows) {
    for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k].text;
    out << '\n';
  }
  for (const auto& note : t.notes) out << "#note=" << note << '\n';
  out << "#tool-version=" << kToolVersion << '\n';
  out << "#config-hash=" << fnv1a_hex(config) << '\n';
}

void write_json(const Table& t, const std::string& config, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (size_t k = 0; k < row.size(); ++k) obj[t.columns[k]] = cell_json(row[k]);
    rows.push_back(std::move(obj));
  }
  nlohmann::ordered_json doc;
  doc["columns"] = t.columns;
  doc["rows"] = rows;
  doc["notes"] = t.notes;
  doc["tool_version"] = kToolVersion;
  doc["config_hash"] = fnv1a_hex(config);
  out << doc.dump(2) << '\n';
}

std::vector<SchattenP> parse_p_list(const std::string& text) {
  std::vector<SchattenP> ps;
  for (const auto& part : split(text, ',')) ps.push_back(SchattenP::parse(part));
  if (ps.empty()) throw ValidationError("empty p list");
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

// ---- tables -----------------------------------------------------------------

Table analyze_table(const std::string& protocol, int sites, int local_dim,
                    const std::string& subspace, const std::vector<SchattenP>& ps) {
  const auto inst = build_protocol(protocol, sites, local_dim, subspace);
  const auto& cfg = inst.cfg;
  const auto computed = robustness_subspace(inst.unitary, cfg);
  const bool transfer =
      inst.declared_subspace.dim() > 0 &&
      verify_transfer(inst.unitary, AncillaState::uniform_mixture(inst.declared_subspace), cfg, 1e-9)
          .pass;
  const auto actual = commutator_norms(inst.unitary, cfg, ps);

  Table t;
  t.columns = {"protocol", "L",    "D",   "declared_dim", "computed_dim",
               "p",        "actual_norm", "bound", "gap",  "transfer_pass"};
  for (size_t j = 0; j < ps.size(); ++j) {
    std::vector<Cell> row{str(inst.name),
                          num(std::int64_t{sites}),
                          num(std::int64_t{local_dim}),
                          num(std::int64_t{inst.declared_subspace.dim()}),
                          num(std::int64_t{computed.dim()}),
                          p_cell(ps[j]),
                          num(actual[j])};
    if (computed.dim() >= 1) {
      BoundQuery q;
      q.sites = sites;
      q.local_dim = local_dim;
      q.dim_s = static_cast<double>(computed.dim());
      q.p = ps[j];
      q.variant = default_variant(local_dim);
      const double bound = theorem1_bound(q);
      row.push_back(num(bound));
      row.push_back(num(actual[j] - bound));
    } else {
      row.push_back(missing());
      row.push_back(missing());
    }
    row.push_back(flag(transfer));
    t.rows.push_back(std::move(row));
  }
  if (computed.dim() == 0) t.notes.push_back("no robust ancilla subspace; bound not applicable");
  return t;
}

Table sweep_table(int sites, int count, std::uint64_t seed, const std::vector<SchattenP>& ps) {
  const auto cfg = LatticeConfig::chain(sites, 2);
  cfg.validate();
  if (count < 1) throw ValidationError("sweep: count must be >= 1");
  Table t;
  t.columns = {"sample", "L", "p", "lemma_s1_deviation", "actual_norm", "phase_norm",
               "computed_dim", "bound", "bound_holds"};
  std::mt19937_64 seeder(seed);
  for (int s = 0; s < count; ++s) {
    const auto u = random_unitary(cfg.total_dim(), seeder());
    const double dev = lemma_s1_check(u, cfg);
    const auto actual = commutator_norms(u, cfg, ps);
    const auto pair = extract_stabilizers(u, cfg);
    const auto phases = v_phases(pair);
    const auto dim = robustness_subspace(u, cfg).dim();
    for (size_t j = 0; j < ps.size(); ++j) {
      std::vector<Cell> row{num(std::int64_t{s}),  num(std::int64_t{sites}), p_cell(ps[j]),
                            num(dev),               num(actual[j]),
                            num(commutator_norm_from_phases(phases, ps[j])),
                            num(std::int64_t{dim})};
      if (dim >= 1) {
        BoundQuery q;
        q.sites = sites;
        q.dim_s = static_cast<double>(dim);
        q.p = ps[j];
        const double bound = theorem1_bound(q);
        row.push_back(num(bound));
        row.push_back(flag(actual[j] >= bound - 1e-9));
      } else {
        row.push_back(missing());
        row.push_back(missing());
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table surface_table(int sites, int grid_n) {
  if (sites < 2) throw ValidationError("surface: L must be >= 2");
  if (grid_n < 2) throw ValidationError("surface: grid must have at least 2 points");
  Table t;
  t.columns = {"frac", "inv_p", "bound"};
  const double n1 = grid_n - 1;
  for (int a = 0; a < grid_n; ++a) {
    // Log-spaced from 2^(1-L) up to exactly 1.
    const double frac = std::exp2((1.0 - sites) * (n1 - a) / n1);
    for (int b = 0; b < grid_n; ++b) {
      const double inv_p = b / n1;
      t.rows.push_back({num(frac), num(inv_p), num(2.0 * std::pow(frac, inv_p))});
    }
  }
  return t;
}

Table endmatter_table(const std::vector<SchattenP>& ps) {
  constexpr int kSites = 10;
  const auto cfg = LatticeConfig::chain(kSites, 2);
  Table t;
  t.columns = {"protocol", "L", "k", "declared_dim", "computed_dim", "p",
               "inv_p", "actual_norm", "bound", "gap"};
  for (const auto& inst : {build_fast_ghz(cfg), build_symmetrized(cfg)}) {
    const int k = log2_exact(inst.declared_subspace.dim());
    const auto computed = robustness_subspace(inst.unitary, cfg).dim();
    const auto actual = commutator_norms(inst.unitary, cfg, ps);
    for (size_t j = 0; j < ps.size(); ++j) {
      BoundQuery q;
      q.sites = kSites;
      q.dim_s = std::exp2(k);
      q.p = ps[j];
      const double bound = theorem1_bound(q);
      t.rows.push_back({str(inst.name), num(std::int64_t{kSites}), num(std::int64_t{k}),
                        num(std::int64_t{inst.declared_subspace.dim()}),
                        num(std::int64_t{computed}), p_cell(ps[j]), num(ps[j].inverse()),
                        num(actual[j]), num(bound), num(actual[j] - bound)});
    }
  }
  return t;
}

Table bounds_table(const BoundsOptions& opt) {
  RuntimeQuery q;
  q.sites = opt.sites;
  q.k = opt.k;
  q.alpha = opt.alpha;
  q.distance = opt.distance;
  q.constants = {opt.c_pnorm, opt.c_op, opt.v, opt.beta_op, opt.c_frob};
  q.validate();

  std::optional<BoundQuery> channel;
  std::optional<BoundQuery> measurement;
  if (opt.reg_dim || !opt.m_list.empty()) {
    BoundQuery b;
    b.sites = opt.sites;
    b.dim_s = std::exp2(opt.k);
    b.reg_dim = opt.reg_dim.value_or(1.0);
    b.variant = BoundVariant::channel;
    b.validate();
    channel = b;
    if (!opt.m_list.empty()) {
      b.variant = BoundVariant::measurement;
      b.m_list = opt.m_list;
      b.validate();
      measurement = b;
    }
  }

  const auto rb = runtime_lower_bound(q);
  Table t;
  t.columns = {"L", "k", "alpha", "p_star", "t_pnorm", "t_op", "t_frob", "best",
               "C_pnorm", "C_op", "v", "beta_op", "C_frob"};
  auto opt_cell = [](const std::optional<double>& v) { return v ? num(*v) : missing(); };
  std::vector<Cell> row{num(std::int64_t{opt.sites}), num(std::int64_t{opt.k}), num(opt.alpha),
                        num(rb.p_star), opt_cell(rb.t_pnorm),
                        rb.t_op ? num(rb.t_op->time) : missing(), opt_cell(rb.t_frob),
                        num(rb.best), num(opt.c_pnorm), num(opt.c_op), num(opt.v),
                        num(opt.beta_op), num(opt.c_frob)};
  t.notes = rb.notes;
  if (rb.t_op && rb.t_op->asymptotic) t.notes.push_back("t_op is the asymptotic linear-cone value r/v");
  if (!rb.closed_form_p) t.notes.push_back("p_star from grid search");

  if (channel) {
    const SchattenP p = opt.p.value_or(SchattenP(rb.p_star));
    channel->p = p;
    const auto cf = theorem1_bound_factors(*channel);
    for (const char* c : {"bound_p", "qubit_bound", "reg_factor", "channel_bound"}) t.columns.push_back(c);
    row.push_back(p_cell(p));
    row.push_back(num(cf.base));
    row.push_back(num(cf.reg_factor));
    row.push_back(num(cf.value));
    if (measurement) {
      measurement->p = p;
      const auto mf = theorem1_bound_factors(*measurement);
      t.columns.push_back("measurement_factor");
      t.columns.push_back("measurement_bound");
      row.push_back(num(mf.measurement_factor));
      row.push_back(num(mf.value));
    }
  }
  t.rows.push_back(std::move(row));
  return t;
}

// ---- driver -----------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust state-transfer bounds lab"};
  app.name("qst");
  app.require_subcommand(1);

  std::string format = "csv";
  std::string output;
  std::int64_t max_dim = 0;
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--output", output, "output file (default stdout)");
  app.add_option("--max-dim", max_dim, "dense dimension cap (default QST_MAX_DIM or 4096)");

  std::string protocol;
  int sites = 0;
  int local_dim = 2;
  std::string subspace = "zero";
  std::string p_text = "1,2,4,inf";
  auto* analyze = app.add_subcommand("analyze", "norms and bounds for one protocol");
  analyze->add_option("--protocol", protocol)->required()->check(
      CLI::IsMember({"saturating", "fast-ghz", "symmetrized", "qudit-saturating", "swap"}));
  analyze->add_option("--L", sites)->required();
  analyze->add_option("--D", local_dim);
  auto* subspace_opt = analyze->add_option("--subspace", subspace, "zero, full or random:N");
  analyze->add_option("--p", p_text);

  int count = 5;
  std::uint64_t seed = 1;
  auto* sweep = app.add_subcommand("sweep", "random unitaries: identity and bound checks");
  sweep->add_option("--L", sites)->required();
  sweep->add_option("--count", count);
  sweep->add_option("--seed", seed);
  sweep->add_option("--p", p_text);

  int grid_n = 11;
  auto* surface = app.add_subcommand("surface", "bound over (|S| fraction, 1/p)");
  surface->add_option("--L", sites)->default_val(10);
  surface->add_option("--grid", grid_n);

  std::string endmatter_p = "1,1.5,2,3,4,6,8,16,32,inf";
  auto* endmatter = app.add_subcommand("reproduce-endmatter", "L = 10 GHZ protocol comparison");
  endmatter->add_option("--p", endmatter_p);

  BoundsOptions bopt;
  std::string bound_p;
  std::string m_text;
  double reg_dim = 0.0;
  auto* bounds = app.add_subcommand("bounds", "runtime lower bounds");
  bounds->add_option("--L", bopt.sites)->required();
  bounds->add_option("--k", bopt.k)->required();
  bounds->add_option("--alpha", bopt.alpha)->required();
  bounds->add_option("--r", bopt.distance, "distance (default L)");
  bounds->add_option("--C-pnorm", bopt.c_pnorm);
  bounds->add_option("--C-op", bopt.c_op);
  bounds->add_option("--v", bopt.v);
  bounds->add_option("--beta-op", bopt.beta_op);
  bounds->add_option("--C-frob", bopt.c_frob);
  bounds->add_option("--p", bound_p, "Schatten p for the channel columns (default p_star)");
  auto* reg_opt = bounds->add_option("--reg-dim", reg_dim);
  bounds->add_option("--m-list", m_text);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  // The cap is process-wide; put it back so repeated in-process runs start clean.
  struct CapGuard {
    std::int64_t saved = max_dense_dim();
    ~CapGuard() { set_max_dense_dim(saved); }
  } cap_guard;

  try {
    if (max_dim > 0) {
      set_max_dense_dim(max_dim);
    } else if (const char* env = std::getenv("QST_MAX_DIM")) {
      const long long v = std::atoll(env);
      if (v < 1) throw ValidationError("QST_MAX_DIM must be a positive integer");
      set_max_dense_dim(v);
    }

    Table table;
    std::string config;
    if (analyze->parsed()) {
      const auto ps = parse_p_list(p_text);
      const bool saturating = protocol == "saturating" || protocol == "qudit-saturating";
      if (subspace_opt->count() > 0 && !saturating) {
        throw ValidationError("--subspace applies only to the saturating protocols");
      }
      if (protocol != "qudit-saturating" && protocol != "swap" && local_dim != 2) {
        throw ValidationError("protocol '" + protocol + "' is defined for qubits only");
      }
      LatticeConfig::chain(sites, local_dim).validate();
      config = "analyze;protocol=" + protocol + ";L=" + std::to_string(sites) +
               ";D=" + std::to_string(local_dim) + ";subspace=" + (saturating ? subspace : "-") +
               ";p=" + p_list_text(ps);
      table = analyze_table(protocol, sites, local_dim, subspace, ps);
    } else if (sweep->parsed()) {
      const auto ps = parse_p_list(p_text);
      LatticeConfig::chain(sites, 2).validate();
      config = "sweep;L=" + std::to_string(sites) + ";count=" + std::to_string(count) +
               ";seed=" + std::to_string(seed) + ";p=" + p_list_text(ps);
      table = sweep_table(sites, count, seed, ps);
    } else if (surface->parsed()) {
      config = "surface;L=" + std::to_string(sites) + ";grid=" + std::to_string(grid_n);
      table = surface_table(sites, grid_n);
    } else if (endmatter->parsed()) {
      const auto ps = parse_p_list(endmatter_p);
      LatticeConfig::chain(10, 2).validate();
      config = "reproduce-endmatter;p=" + p_list_text(ps);
      table = endmatter_table(ps);
    } else if (bounds->parsed()) {
      if (!bound_p.empty()) bopt.p = SchattenP::parse(bound_p);
      if (reg_opt->count() > 0) bopt.reg_dim = reg_dim;
      for (const auto& m : split(m_text, ',')) {
        size_t used = 0;
        long long v = 0;
        try {
          v = std::stoll(m, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != m.size()) throw ValidationError("bad --m-list entry '" + m + "'");
        bopt.m_list.push_back(v);
      }
      std::ostringstream cfg;
      cfg << "bounds;L=" << bopt.sites << ";k=" << bopt.k << ";alpha=" << format_number(bopt.alpha)
          << ";r=" << format_number(bopt.distance) << ";C=" << format_number(bopt.c_pnorm) << ","
          << format_number(bopt.c_op) << "," << format_number(bopt.v) << ","
          << format_number(bopt.beta_op) << "," << format_number(bopt.c_frob)
          << ";p=" << (bopt.p ? bopt.p->to_string() : "-")
          << ";reg=" << (bopt.reg_dim ? format_number(*bopt.reg_dim) : "-") << ";m=" << m_text;
      config = cfg.str();
      table = bounds_table(bopt);
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!output.empty()) {
      file.open(output);
      if (!file) throw ValidationError("cannot open output file '" + output + "'");
      sink = &file;
    }
    if (format == "json") {
      write_json(table, config, *sink);
    } else {
      write_csv(table, config, *sink);
    }
    return kOk;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kCapacity;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace qst::cli
