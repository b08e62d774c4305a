#pragma once

// Command-line surface. execute_command maps argv to a module operation and
// returns the canonical JSON payload together with the process exit status.

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hodgekit/budget.hpp"
#include "hodgekit/cache.hpp"
#include "hodgekit/checks.hpp"
#include "hodgekit/dhstruct.hpp"
#include "hodgekit/elsv.hpp"
#include "hodgekit/hurwitz.hpp"
#include "hodgekit/tft.hpp"
#include "hodgekit/witten.hpp"

namespace hodgekit {

struct CommandResult {
  enum class Status { Ok = 0, CheckFailed = 1, InvalidInput = 2, ResourceLimit = 3 };
  Status status = Status::Ok;
  nlohmann::json payload;
  std::string output;       ///< rendered payload for standard output
  std::string diagnostics;  ///< text for standard error
  double milliseconds = 0;

  int exit_code() const { return static_cast<int>(status); }
};

namespace cli {

inline std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::string correlator_cache_key(const CorrelatorKey& k) { return "g=" + std::to_string(k.g) + ";d=" + join(k.d); }

inline CorrelatorKey parse_correlator_cache_key(const std::string& key) {
  const auto semi = key.find(";d=");
  if (key.rfind("g=", 0) != 0 || semi == std::string::npos) throw InvalidInput("bad correlator cache key '" + key + "'");
  std::vector<int> d;
  std::stringstream ss(key.substr(semi + 3));
  for (std::string part; std::getline(ss, part, ',');) d.push_back(std::stoi(part));
  return CorrelatorKey(std::stoi(key.substr(2, semi - 2)), d);
}

inline std::string single_key(int g, const Partition& alpha) { return "single;g=" + std::to_string(g) + ";alpha=" + join(alpha.parts()); }

inline std::string double_key(int g, const Partition& beta) {
  return "double;g=" + std::to_string(g) + ";d=" + std::to_string(beta.weight()) + ";beta=" + join(beta.parts());
}

inline std::string table_key(int g, int n, const std::vector<int>& a, int k) {
  return "g=" + std::to_string(g) + ";n=" + std::to_string(n) + ";a=" + join(a) + ";k=" + std::to_string(k);
}

inline std::vector<Rational> parse_deltas(const std::vector<std::string>& items) {
  std::vector<Rational> out;
  for (const auto& s : items) out.push_back(parse_rational(s));
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

/// One "path,value" row per leaf, in document order.
inline void flatten(const nlohmann::json& j, const std::string& path, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
  } else if (j.is_array()) {
    if (j.empty()) out += csv_field(path) + ",\n";
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out += csv_field(path) + "," + csv_field(j.is_string() ? j.get<std::string>() : j.dump()) + "\n";
  }
}

inline std::string render(const nlohmann::json& payload, const std::string& format) {
  if (format == "csv") {
    std::string out = "field,value\n";
    flatten(payload, "", out);
    return out;
  }
  return payload.dump() + "\n";
}

struct Options {
  std::string cache_path;
  std::string format = "json";
  std::optional<double> budget;

  int g = 0;
  int n = 0;
  int d = 0;
  std::vector<int> indices;
  std::optional<int> kdv_n;
  int K = 6;
  int D = 6;
  int gmax = 2;
  int nmax = 2;
  std::vector<int> parts;
  int max_part = 0;
  int max_d = 0;
  std::string file;
  std::vector<std::string> deltas;
};

struct Context {
  Options opt;
  Cache cache;
  IntersectionNumbers numbers;
  HurwitzEngine engine;
  bool check_failed = false;

  Rational cached_single(int g, const Partition& alpha) {
    const std::string key = single_key(g, alpha);
    if (auto v = cache.get("hurwitz", key)) return *v;
    Rational h = single_hurwitz(g, alpha, engine);
    cache.put("hurwitz", key, h);
    return h;
  }

  Rational cached_double(int g, const Partition& beta) {
    const std::string key = double_key(g, beta);
    if (auto v = cache.get("hurwitz", key)) return *v;
    Rational h = double_hurwitz_one_part(g, beta.weight(), beta, engine);
    cache.put("hurwitz", key, h);
    return h;
  }
};

inline nlohmann::json run_correlator(Context& ctx) {
  CorrelatorKey key(ctx.opt.g, ctx.opt.indices);
  key.validate();
  Rational v = ctx.numbers.correlator(key);
  return {{"g", key.g}, {"d", key.d}, {"v", to_string(v)}};
}

inline nlohmann::json run_kdv(Context& ctx) {
  std::vector<int> ns;
  if (ctx.opt.kdv_n) {
    ns.push_back(*ctx.opt.kdv_n);
  } else {
    for (int n = 1; n <= std::min(3, ctx.opt.K); ++n) ns.push_back(n);
  }
  auto results = kdv_check(ctx.opt.K, ctx.opt.D, ctx.opt.gmax, ns, ctx.numbers);
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : results) {
    rows.push_back(summary_json(r));
    ok = ok && r.ok();
  }
  ctx.check_failed = !ok;
  return {{"K", ctx.opt.K}, {"D", ctx.opt.D}, {"gmax", ctx.opt.gmax}, {"residuals", rows}, {"ok", ok}};
}

inline nlohmann::json run_virasoro(Context& ctx) {
  nlohmann::json ranges = nlohmann::json::array();
  std::vector<std::string> passing;
  for (auto range : {QuadraticRange::FromZero, QuadraticRange::FromOne}) {
    auto report = virasoro_check(ctx.opt.nmax, ctx.opt.K, ctx.opt.D, ctx.opt.gmax, range);
    ranges.push_back(virasoro_report_json(report));
    if (report.passes()) passing.push_back(range_name(range));
  }
  const bool ok = passing == std::vector<std::string>{"from_zero"};
  ctx.check_failed = !ok;
  return {{"nmax", ctx.opt.nmax}, {"K", ctx.opt.K}, {"D", ctx.opt.D}, {"gmax", ctx.opt.gmax},
          {"ranges", ranges}, {"passing_ranges", passing}, {"ok", ok}};
}

inline nlohmann::json run_hurwitz_single(Context& ctx) {
  return {{"H", to_string(ctx.cached_single(ctx.opt.g, Partition(ctx.opt.parts)))}};
}

inline nlohmann::json run_hurwitz_double(Context& ctx) {
  Partition beta(ctx.opt.parts);
  if (beta.weight() != ctx.opt.d) throw InvalidInput("beta must be a partition of d");
  return {{"H", to_string(ctx.cached_double(ctx.opt.g, beta))}};
}

inline void record_table(Context& ctx, const std::string& kind, int g, int n,
                         const std::map<std::pair<std::vector<int>, int>, Rational>& entries) {
  for (const auto& [key, v] : entries) ctx.cache.put(kind, table_key(g, n, key.first, key.second), v);
}

inline nlohmann::json run_elsv_fit(Context& ctx) {
  const int g = ctx.opt.g, n = ctx.opt.n;
  auto grid = elsv_grid(n, ctx.opt.max_part);
  for (const auto& alpha : grid) ctx.cached_single(g, alpha);
  auto table = extract_hodge_integrals(interpolate_hurwitz_polynomial(g, n, grid, ctx.engine), g, n);
  auto lg = check_lambda_g(table);
  const bool psi_ok = witten_mismatches(table, ctx.numbers).empty();
  record_table(ctx, "hodge", g, n, table.entries);
  ctx.check_failed = !lg.all_match || !psi_ok;
  auto j = elsv_report_json(table, lg);
  j["psi_entries_match_correlators"] = psi_ok;
  return j;
}

/// Smallest max part whose grid determines the fit.
inline std::pair<HodgeIntegralTable, int> fit_smallest_grid(Context& ctx, int g, int n) {
  require_stable(g, n);
  for (int m = 1; m <= 12; ++m) {
    try {
      auto grid = elsv_grid(n, m);
      return {extract_hodge_integrals(interpolate_hurwitz_polynomial(g, n, grid, ctx.engine), g, n), m};
    } catch (const DegenerateGrid&) {
    }
  }
  throw InvalidInput("no grid with parts <= 12 determines (g,n)");
}

inline nlohmann::json run_elsv_lambda_g(Context& ctx) {
  auto [table, m] = fit_smallest_grid(ctx, ctx.opt.g, ctx.opt.n);
  auto report = check_lambda_g(table);
  record_table(ctx, "hodge", table.g, table.n, table.entries);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"b", e.b}, {"v", to_string(e.value)}, {"multinomial", to_string(e.multinomial)}, {"match", e.match}});
  }
  ctx.check_failed = !report.all_match;
  return {{"g", report.g}, {"n", report.n}, {"max_part", m}, {"c_g", to_string(report.c_g)},
          {"all_match", report.all_match}, {"entries", entries}};
}

inline nlohmann::json run_dh_fit(Context& ctx) {
  const int g = ctx.opt.g, n = ctx.opt.n;
  auto grid = dh_grid(n, ctx.opt.max_d);
  for (const auto& beta : grid) ctx.cached_double(g, beta);
  auto table = dh_fit(g, n, grid, ctx.engine);
  std::optional<DoubleHurwitzTable> companion;
  try {
    companion = dh_fit(g, n + 1, dh_grid(n + 1, ctx.opt.max_d + 1), ctx.engine);
  } catch (const DegenerateGrid&) {
  }
  auto report = dh_structure(table, companion);
  record_table(ctx, "dh", g, n, table.entries);
  ctx.check_failed = !report.parity_ok || !report.string.ok() || !report.dilaton.ok();
  return dh_report_json(report);
}

inline nlohmann::json run_kp(Context& ctx) {
  std::ifstream in(ctx.opt.file);
  if (!in) throw InvalidInput("cannot read " + ctx.opt.file);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  auto results = kp_check(series_from_json(doc));
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : results) {
    rows.push_back(summary_json(r));
    ok = ok && r.ok();
  }
  ctx.check_failed = !ok;
  return {{"residuals", rows}, {"ok", ok}};
}

inline nlohmann::json run_tft_eval(Context& ctx) {
  std::ifstream in(ctx.opt.file);
  if (!in) throw InvalidInput("cannot read " + ctx.opt.file);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  FrobeniusData frob{parse_deltas(ctx.opt.deltas)};
  frob.validate();
  Cobordism cob = cobordism_from_json(doc);
  BlockDiagonalMap map = evaluate_full(cob, frob);
  const DenseFrobenius dense = DenseFrobenius::from_canonical(frob);
  bool agree = true;
  for (const auto& c : cob.components) {
    const int p = static_cast<int>(c.in.size()), q = static_cast<int>(c.out.size());
    if (DenseMap::power(frob.dimension(), p + q) > 4096) continue;
    DenseMap m = pants_evaluate(dense, c.g, p, q);
    if (p + q == 0) {
      agree = agree && m.at(0, 0) == closed_partition_function(c.g, frob);
    } else {
      agree = agree && dense_matches_block(m, component_entries(frob, c.euler_characteristic()), frob);
    }
  }
  ctx.check_failed = !agree;
  auto j = map_to_json(map);
  j["pants_agree"] = agree;
  return j;
}

inline nlohmann::json run_tft_closed(Context& ctx) {
  FrobeniusData frob{parse_deltas(ctx.opt.deltas)};
  return {{"Z", to_string(closed_partition_function(ctx.opt.g, frob))}};
}

}  // namespace cli

inline CommandResult execute_command(const std::vector<std::string>& args) {
  using Status = CommandResult::Status;
  const auto start = std::chrono::steady_clock::now();
  CommandResult result;
  cli::Context ctx;
  auto& o = ctx.opt;

  CLI::App app{"hodgekit: exact intersection numbers, Hurwitz numbers and their identities", "hodgekit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--cache", o.cache_path, "JSON-lines cache file");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--budget", o.budget, "time budget in seconds")->check(CLI::PositiveNumber);

  auto* correlator = app.add_subcommand("correlator", "intersection number <tau_d1 ... tau_dn>_g");
  correlator->add_option("--g", o.g)->required();
  correlator->add_option("--d", o.indices)->required()->delimiter(',');

  auto* kdv = app.add_subcommand("kdv-check", "KdV residuals of the truncated free energy");
  kdv->add_option("--n", o.kdv_n);
  kdv->add_option("--K", o.K);
  kdv->add_option("--D", o.D);
  kdv->add_option("--gmax", o.gmax);

  auto* vir = app.add_subcommand("virasoro-check", "L_n tau = 0 and the commutator identity under both quadratic ranges");
  vir->add_option("--nmax", o.nmax);
  vir->add_option("--K", o.K);
  vir->add_option("--D", o.D);
  vir->add_option("--gmax", o.gmax);

  auto* hurwitz = app.add_subcommand("hurwitz", "single and one-part double Hurwitz numbers");
  hurwitz->require_subcommand(1);
  auto* hs = hurwitz->add_subcommand("single");
  hs->add_option("--g", o.g)->required();
  hs->add_option("--alpha", o.parts)->required()->delimiter(',');
  auto* hd = hurwitz->add_subcommand("double");
  hd->add_option("--g", o.g)->required();
  hd->add_option("--d", o.d)->required();
  hd->add_option("--beta", o.parts)->required()->delimiter(',');

  auto* elsv = app.add_subcommand("elsv", "Hodge integrals from single Hurwitz numbers");
  elsv->require_subcommand(1);
  auto* ef = elsv->add_subcommand("fit");
  ef->add_option("--g", o.g)->required();
  ef->add_option("--n", o.n)->required();
  ef->add_option("--max-part", o.max_part)->required();
  auto* el = elsv->add_subcommand("lambda-g");
  el->add_option("--g", o.g)->required();
  el->add_option("--n", o.n)->required();

  auto* dh = app.add_subcommand("dh", "structure of one-part double Hurwitz numbers");
  dh->require_subcommand(1);
  auto* dhf = dh->add_subcommand("fit");
  dhf->add_option("--g", o.g)->required();
  dhf->add_option("--n", o.n)->required();
  dhf->add_option("--max-d", o.max_d)->required();

  auto* kp = app.add_subcommand("kp-check", "residuals of the first three KP equations");
  kp->add_option("--input", o.file)->required();

  auto* tft = app.add_subcommand("tft", "semisimple 2d TFT evaluation");
  tft->require_subcommand(1);
  auto* te = tft->add_subcommand("eval");
  te->add_option("--file", o.file)->required();
  te->add_option("--deltas", o.deltas)->required()->delimiter(',');
  auto* tc = tft->add_subcommand("closed");
  tc->add_option("--g", o.g)->required();
  tc->add_option("--deltas", o.deltas)->required()->delimiter(',');

  auto fail = [&](Status s, const std::string& message, bool usage) {
    result.status = s;
    result.payload = {{"error", message}};
    result.output = s == Status::CheckFailed ? cli::render(result.payload, o.format) : std::string();
    result.diagnostics = "error: " + message + "\n" + (usage ? app.help() : "");
  };

  std::vector<std::string> argv_store{"hodgekit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    result.output = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    fail(Status::InvalidInput, e.what(), true);
    return result;
  }

  try {
    budget::Scope scope(o.budget);
    if (!o.cache_path.empty()) {
      ctx.cache = Cache::open(o.cache_path);
      for (const auto& r : ctx.cache.records()) {
        if (r.kind == "correlator") ctx.numbers.store().insert(cli::parse_correlator_cache_key(r.key), r.value, "cache");
      }
    }
    nlohmann::json payload;
    if (correlator->parsed()) payload = cli::run_correlator(ctx);
    else if (kdv->parsed()) payload = cli::run_kdv(ctx);
    else if (vir->parsed()) payload = cli::run_virasoro(ctx);
    else if (hs->parsed()) payload = cli::run_hurwitz_single(ctx);
    else if (hd->parsed()) payload = cli::run_hurwitz_double(ctx);
    else if (ef->parsed()) payload = cli::run_elsv_fit(ctx);
    else if (el->parsed()) payload = cli::run_elsv_lambda_g(ctx);
    else if (dhf->parsed()) payload = cli::run_dh_fit(ctx);
    else if (kp->parsed()) payload = cli::run_kp(ctx);
    else if (te->parsed()) payload = cli::run_tft_eval(ctx);
    else if (tc->parsed()) payload = cli::run_tft_closed(ctx);
    if (!o.cache_path.empty()) {
      for (const auto& [key, entry] : ctx.numbers.store().snapshot()) {
        ctx.cache.put("correlator", cli::correlator_cache_key(key), entry.value);
      }
      ctx.cache.save();
    }
    result.payload = payload;
    result.status = ctx.check_failed ? Status::CheckFailed : Status::Ok;
    result.output = cli::render(payload, o.format);
  } catch (const ResourceLimit& e) {
    fail(Status::ResourceLimit, e.what(), false);
  } catch (const PolynomialityViolation& e) {
    fail(Status::CheckFailed, e.what(), false);
  } catch (const StructureViolation& e) {
    fail(Status::CheckFailed, e.what(), false);
  } catch (const Error& e) {
    fail(Status::InvalidInput, e.what(), false);
  } catch (const std::exception& e) {
    fail(Status::InvalidInput, e.what(), false);
  }
  result.milliseconds = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace hodgekit
