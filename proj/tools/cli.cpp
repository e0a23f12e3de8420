#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sai/driver.hpp"
#include "sai/errors.hpp"
#include "sai/matching.hpp"
#include "sai/matrix_market.hpp"
#include "sai/report.hpp"
#include "sai/splitting.hpp"

namespace sai::cli {
namespace {

using nlohmann::json;

struct RunSpec {
  std::string input;
  std::string method = "psai";
  double delta = 0.4;
  std::size_t mn = 5;
  std::optional<std::size_t> l_max;
  double eps = 1e-8;
  std::size_t max_iter = 500;
  double factor = 10.0;
  std::string strategy = "nearest";
  std::optional<std::size_t> p_kept;
  std::string c_policy = "fixed:1";
  std::string permute = "auto";
  std::string tol = "adaptive";
  std::string rhs = "ones";
  std::string output;
  std::string report;
  std::string precond_file;
  std::string target = "split";
  bool standard = false;
  bool include_solution = false;
  std::size_t mem_guard = std::size_t{2} << 30;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::vector<std::string> variants{"S-SPAI", "N-SPAI", "S-PSAI", "N-PSAI"};
  std::string format = "json";
  // generate
  std::string kind = "dominant-row";
  std::size_t n = 100;
  double density = 0.02;
  std::size_t dense_cols = 1;
};

double parse_after_colon(const std::string& text, const std::string& prefix) {
  try {
    std::size_t used = 0;
    double v = std::stod(text.substr(prefix.size()), &used);
    if (used != text.size() - prefix.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw DomainError("cannot parse '" + text + "'");
  }
}

DriverConfig make_config(const RunSpec& spec) {
  DriverConfig cfg;
  cfg.epsilon = spec.eps;
  cfg.max_iter = spec.max_iter;
  cfg.method = parse_method(spec.method);
  cfg.permute = parse_permute_policy(spec.permute);
  cfg.threads = spec.threads;
  cfg.split.factor = spec.factor;
  cfg.split.strategy = parse_strategy(spec.strategy);
  cfg.split.p_kept = spec.p_kept;

  if (spec.c_policy == "posthoc") {
    cfg.c_policy = CPolicy::posthoc;
  } else if (spec.c_policy.rfind("fixed:", 0) == 0) {
    cfg.c_policy = CPolicy::fixed;
    cfg.c_value = parse_after_colon(spec.c_policy, "fixed:");
  } else {
    throw DomainError("--c-policy must be fixed:<c> or posthoc");
  }

  cfg.spai.delta = spec.delta;
  cfg.spai.mn = spec.mn;
  cfg.spai.l_max = spec.l_max.value_or(20);
  cfg.spai.workspace_limit_bytes = spec.mem_guard;

  cfg.psai.delta = spec.delta;
  cfg.psai.l_max = spec.l_max.value_or(10);
  cfg.psai.workspace_limit_bytes = spec.mem_guard;
  if (spec.tol == "adaptive") {
    cfg.psai.tol_policy = TolPolicy::adaptive;
  } else if (spec.tol.rfind("fixed:", 0) == 0) {
    cfg.psai.tol_policy = TolPolicy::fixed;
    cfg.psai.fixed_tol = parse_after_colon(spec.tol, "fixed:");
  } else {
    throw DomainError("--tol must be adaptive or fixed:<value>");
  }
  cfg.validate();
  return cfg;
}

std::vector<double> read_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  bool mm = false, size_seen = false;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line.rfind("%%MatrixMarket", 0) == 0) {
      mm = true;
      continue;
    }
    if (line[first] == '%') continue;
    if (mm && !size_seen) {
      size_seen = true;
      continue;
    }
    std::istringstream ls(line);
    double v;
    while (ls >> v) out.push_back(v);
    if (!ls.eof()) throw ParseError(path.string() + ": malformed vector entry: " + line);
  }
  return out;
}

std::vector<double> make_rhs(const CscMatrix& a, const RunSpec& spec) {
  if (spec.rhs == "ones") {
    std::vector<double> ones(a.cols(), 1.0);
    return matvec(a, ones);
  }
  auto b = read_vector(spec.rhs);
  if (b.size() != a.rows())
    throw DimensionMismatch("right-hand side has " + std::to_string(b.size()) + " entries, expected " +
                            std::to_string(a.rows()));
  return b;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text << '\n';
}

CscMatrix maybe_permute(const CscMatrix& a, const RunSpec& spec, bool& permuted) {
  const auto policy = parse_permute_policy(spec.permute);
  permuted = false;
  if (policy == PermutePolicy::never) return a;
  if (policy == PermutePolicy::automatic && has_zero_free_diagonal(a)) return a;
  auto perm = zero_free_diagonal_permutation(a);
  if (is_identity_permutation(perm)) return a;
  permuted = true;
  return permute_rows(a, perm);
}

int cmd_analyze(const RunSpec& spec, std::ostream& out) {
  const CscMatrix a = read_matrix_market(spec.input);
  const auto stats = column_stats(a, spec.factor);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "analyze";
  j["matrix"] = spec.input;
  j["n"] = a.rows();
  j["nnz"] = a.nnz();
  j["p"] = stats.p;
  j["p_d"] = stats.p_d;
  j["s"] = stats.s;
  j["factor"] = stats.factor;
  j["irregular_cols"] = stats.irregular_cols;
  j["zero_free_diagonal"] = has_zero_free_diagonal(a);
  if (!a.is_square()) {
    emit(j.dump(2), spec.output, out);
    return kOk;
  }
  bool permuted = false;
  const CscMatrix ap = maybe_permute(a, spec, permuted);
  j["permuted"] = permuted;
  const auto cls = classify(ap);
  j["dominance"] = {{"strict_row_dd", cls.strict_row_dd},
                    {"strict_col_dd", cls.strict_col_dd},
                    {"irreducible", cls.irreducible},
                    {"irreducible_row_dd", cls.irreducible_row_dd},
                    {"irreducible_col_dd", cls.irreducible_col_dd},
                    {"m_matrix", cls.m_matrix},
                    {"m_matrix_checked", cls.m_matrix_checked}};
  if (auto k = condition_number_1(ap)) j["kappa_1"] = *k;
  try {
    SplitOptions so;
    so.factor = spec.factor;
    so.strategy = parse_strategy(spec.strategy);
    so.p_kept = spec.p_kept;
    const auto sys = split(ap, so);
    j["nnz_a_tilde"] = sys.a_tilde.nnz();
    if (auto k = condition_number_1(sys.a_tilde)) j["kappa_1_tilde"] = *k;
  } catch (const DomainError& e) {
    j["split_error"] = e.what();
  }
  emit(j.dump(2), spec.output, out);
  return kOk;
}

int cmd_split(const RunSpec& spec, std::ostream& out) {
  if (spec.output.empty()) throw DomainError("split: --output <prefix> is required");
  const CscMatrix a = read_matrix_market(spec.input);
  bool permuted = false;
  const CscMatrix ap = maybe_permute(a, spec, permuted);
  SplitOptions so;
  so.factor = spec.factor;
  so.strategy = parse_strategy(spec.strategy);
  so.p_kept = spec.p_kept;
  const auto sys = split(ap, so);
  write_matrix_market(spec.output + ".atilde.mtx", sys.a_tilde);
  write_matrix_market(spec.output + ".u.mtx", sys.u);
  json side = split_sidecar(sys);
  side["permuted"] = permuted;
  side["matrix"] = spec.input;
  std::ofstream f(spec.output + ".split.json");
  if (!f) throw Error("cannot write " + spec.output + ".split.json");
  f << side.dump(2) << '\n';
  out << side.dump(2) << '\n';
  return kOk;
}

int cmd_precond(const RunSpec& spec, std::ostream& out) {
  if (spec.output.empty()) throw DomainError("precond: --output <M.mtx> is required");
  const auto cfg = make_config(spec);
  const CscMatrix a = read_matrix_market(spec.input);
  bool permuted = false;
  const CscMatrix ap = maybe_permute(a, spec, permuted);
  CscMatrix target = ap;
  std::size_t s = 0;
  if (spec.target == "split") {
    auto sys = split(ap, cfg.split);
    s = sys.s();
    target = std::move(sys.a_tilde);
  } else if (spec.target != "direct") {
    throw DomainError("--target must be split or direct");
  }
  PreconditionerStats stats;
  const CscMatrix m = build_preconditioner(target, cfg, stats);
  write_matrix_market(spec.output, m);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "precond";
  j["target"] = spec.target;
  j["s"] = s;
  j["permuted"] = permuted;
  j["preconditioner"] = to_json(stats);
  j["timing"] = {{"T_setup", stats.setup_seconds}};
  emit(j.dump(2), spec.report, out);
  return kOk;
}

int cmd_solve(const RunSpec& spec, std::ostream& out) {
  auto cfg = make_config(spec);
  const CscMatrix a = read_matrix_market(spec.input);
  if (!spec.precond_file.empty()) cfg.preconditioner = read_matrix_market(spec.precond_file);
  const auto b = make_rhs(a, spec);
  const auto rep = spec.standard ? solve_standard(a, b, cfg) : solve_irregular(a, b, cfg);
  json j = to_json(rep, spec.include_solution);
  j["command"] = "solve";
  j["path"] = spec.standard ? "standard" : "split";
  j["matrix"] = spec.input;
  emit(j.dump(2), spec.output, out);
  return rep.a < 1.0 ? kOk : kNumericalFailure;
}

int cmd_bench(const RunSpec& spec, std::ostream& out) {
  const auto base = make_config(spec);
  const CscMatrix a = read_matrix_market(spec.input);
  const auto b = make_rhs(a, spec);
  json rows = json::array();
  for (const auto& variant : spec.variants) {
    if (variant.size() < 3 || (variant[0] != 'S' && variant[0] != 'N') || variant[1] != '-')
      throw DomainError("unknown bench variant '" + variant + "'");
    std::string method = variant.substr(2);
    std::transform(method.begin(), method.end(), method.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    DriverConfig cfg = base;
    cfg.method = parse_method(method);
    json row;
    row["variant"] = variant;
    try {
      const auto rep = variant[0] == 'S' ? solve_standard(a, b, cfg) : solve_irregular(a, b, cfg);
      row["status"] = "ok";
      row["T_setup"] = rep.precond.setup_seconds;
      row["T_solve"] = rep.solve_seconds;
      row["spar"] = rep.precond.spar;
      row["nnz_m"] = rep.precond.nnz;
      row["iter"] = rep.max_iter_used;
      row["a"] = rep.a;
      row["s"] = rep.s;
      if (cfg.method == Method::spai)
        row["n_c"] = rep.precond.n_c;
      else
        row["l_m"] = rep.precond.l_m;
    } catch (const WorkspaceGuardError&) {
      row["status"] = "skipped: workspace guard";
    } catch (const Error& e) {
      row["status"] = std::string("error: ") + e.what();
    }
    rows.push_back(row);
  }

  if (spec.format == "csv") {
    std::ostringstream csv;
    csv << "variant,status,T_setup,T_solve,spar,iter,a,n_c,l_m\n";
    auto field = [](const json& r, const char* key) -> std::string {
      if (!r.contains(key)) return "";
      return r[key].dump();
    };
    for (const auto& r : rows) {
      csv << r["variant"].get<std::string>() << ',' << r["status"].get<std::string>() << ','
          << field(r, "T_setup") << ',' << field(r, "T_solve") << ',' << field(r, "spar") << ','
          << field(r, "iter") << ',' << field(r, "a") << ',' << field(r, "n_c") << ','
          << field(r, "l_m") << '\n';
    }
    std::string text = csv.str();
    text.pop_back();
    emit(text, spec.output, out);
  } else if (spec.format == "json") {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "bench";
    j["matrix"] = spec.input;
    j["n"] = a.rows();
    j["nnz"] = a.nnz();
    j["epsilon"] = base.epsilon;
    j["timings_note"] = "T_setup and T_solve are wall-clock and hardware dependent";
    j["rows"] = rows;
    emit(j.dump(2), spec.output, out);
  } else {
    throw DomainError("--format must be json or csv");
  }
  return kOk;
}

int cmd_generate(const RunSpec& spec, std::ostream& out) {
  if (spec.output.empty()) throw DomainError("generate: --output <file.mtx> is required");
  GeneratorSpec g;
  g.kind = parse_matrix_kind(spec.kind);
  g.n = spec.n;
  g.density = spec.density;
  g.planted_dense_cols = spec.dense_cols;
  g.seed = spec.seed;
  const auto a = generate_test_matrix(g);
  write_matrix_market(spec.output, a);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "generate";
  j["kind"] = spec.kind;
  j["n"] = a.rows();
  j["nnz"] = a.nnz();
  j["seed"] = spec.seed;
  j["output"] = spec.output;
  out << j.dump(2) << '\n';
  return kOk;
}

void add_solver_options(CLI::App* app, RunSpec& spec) {
  app->add_option("--method", spec.method, "Preconditioner: spai | psai")
      ->check(CLI::IsMember({"spai", "psai"}));
  app->add_option("--delta", spec.delta, "Column residual tolerance (SPAI -ep)");
  app->add_option("--mn", spec.mn, "SPAI most profitable indices per loop");
  app->add_option("--ns,--lmax", spec.l_max, "Maximum loops (default 20 SPAI, 10 PSAI)");
  app->add_option("--tol", spec.tol, "PSAI dropping: adaptive | fixed:<v>");
  app->add_option("--eps", spec.eps, "Target relative residual");
  app->add_option("--max-iter", spec.max_iter, "BiCGStab iteration cap");
  app->add_option("--c-policy", spec.c_policy, "fixed:<c> | posthoc");
  app->add_option("--rhs", spec.rhs, "ones (b = A*1) or a vector file");
  app->add_option("--threads", spec.threads, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--mem-guard", spec.mem_guard, "Dense workspace guard in bytes");
}

void add_split_options(CLI::App* app, RunSpec& spec) {
  app->add_option("--factor", spec.factor, "Irregularity threshold factor")->check(CLI::PositiveNumber);
  app->add_option("--strategy", spec.strategy, "nearest | largest")
      ->check(CLI::IsMember({"nearest", "largest"}));
  app->add_option("--p-kept", spec.p_kept, "Entries kept per irregular column (default p)");
  app->add_option("--permute", spec.permute, "auto | always | never")
      ->check(CLI::IsMember({"auto", "always", "never"}));
}

std::vector<std::string> rewrite_aliases(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  out.reserve(args.size());
  for (const auto& a : args) {
    if (a == "-ep")
      out.push_back("--delta");
    else if (a == "-mn")
      out.push_back("--mn");
    else if (a == "-ns")
      out.push_back("--ns");
    else
      out.push_back(a);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  CLI::App app{"Sparse approximate inverse preconditioning for irregular sparse systems", "saitool"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Column statistics, dominance flags, conditioning");
  analyze->add_option("matrix", spec.input, "Matrix Market file")->required();
  analyze->add_option("--output", spec.output, "JSON output path (default stdout)");
  add_split_options(analyze, spec);

  auto* split_cmd = app.add_subcommand("split", "Write the regular part, U and a JSON sidecar");
  split_cmd->add_option("matrix", spec.input, "Matrix Market file")->required();
  split_cmd->add_option("--output", spec.output, "Output prefix")->required();
  add_split_options(split_cmd, spec);

  auto* precond = app.add_subcommand("precond", "Build a preconditioner and write it as Matrix Market");
  precond->add_option("matrix", spec.input, "Matrix Market file")->required();
  precond->add_option("--output", spec.output, "Preconditioner output path")->required();
  precond->add_option("--report", spec.report, "JSON report path (default stdout)");
  precond->add_option("--target", spec.target, "split (regular part) | direct (A itself)")
      ->check(CLI::IsMember({"split", "direct"}));
  add_solver_options(precond, spec);
  add_split_options(precond, spec);

  auto* solve = app.add_subcommand("solve", "Solve A x = b and report the achieved accuracy");
  solve->add_option("matrix", spec.input, "Matrix Market file")->required();
  solve->add_option("--output", spec.output, "JSON report path (default stdout)");
  solve->add_option("--precond-file", spec.precond_file, "Reuse a preconditioner written by precond");
  solve->add_flag("--standard", spec.standard, "Precondition A directly instead of splitting");
  solve->add_flag("--solution", spec.include_solution, "Include x_hat in the report");
  add_solver_options(solve, spec);
  add_split_options(solve, spec);

  auto* bench = app.add_subcommand("bench", "Compare S-/N- SPAI and PSAI variants");
  bench->add_option("matrix", spec.input, "Matrix Market file")->required();
  bench->add_option("--output", spec.output, "Report path (default stdout)");
  bench->add_option("--variants", spec.variants, "Subset of S-SPAI N-SPAI S-PSAI N-PSAI")->delimiter(',');
  bench->add_option("--format", spec.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  add_solver_options(bench, spec);
  add_split_options(bench, spec);

  auto* generate = app.add_subcommand("generate", "Write a random test matrix of a given class");
  generate->add_option("--kind", spec.kind, "dominant-row | dominant-col | m-matrix | irreducible-dd");
  generate->add_option("--n", spec.n, "Order");
  generate->add_option("--density", spec.density, "Off-diagonal density");
  generate->add_option("--dense-cols", spec.dense_cols, "Planted dense columns");
  generate->add_option("--seed", spec.seed, "Random seed");
  generate->add_option("--output", spec.output, "Matrix Market output path")->required();

  auto args = rewrite_aliases(raw_args);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(spec, out);
    if (split_cmd->parsed()) return cmd_split(spec, out);
    if (precond->parsed()) return cmd_precond(spec, out);
    if (solve->parsed()) return cmd_solve(spec, out);
    if (bench->parsed()) return cmd_bench(spec, out);
    if (generate->parsed()) return cmd_generate(spec, out);
  } catch (const StructuralSingularityError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const SingularUpdateError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DegeneratePatternError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const WorkspaceGuardError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace sai::cli
