#include "sai/report.hpp"

namespace sai {

nlohmann::json to_json(const PreconditionerStats& stats) {
  nlohmann::json j;
  j["method"] = to_string(stats.method);
  j["nnz"] = stats.nnz;
  j["spar"] = stats.spar;
  j["n_c"] = stats.n_c;
  j["l_m"] = stats.l_m;
  j["max_candidates"] = stats.max_candidates;
  j["max_pattern"] = stats.max_pattern;
  j["checksum"] = stats.checksum;
  j["reused"] = stats.reused;
  return j;
}

nlohmann::json to_json(const SolveReport& rep, bool include_solution) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = rep.n;
  j["nnz_a"] = rep.nnz_a;
  j["nnz_a_tilde"] = rep.nnz_a_tilde;
  j["s"] = rep.s;
  j["irregular_cols"] = rep.irregular_cols;
  j["permuted"] = rep.permuted;
  j["epsilon"] = rep.epsilon;
  j["rr"] = rep.rr;
  j["a"] = rep.a;
  j["tol_y"] = rep.tol_y;
  j["tol_w"] = rep.tol_w;
  j["iter_y"] = rep.iter_y;
  j["iter_w"] = rep.iter_w;
  j["max_iter_used"] = rep.max_iter_used;
  j["flag_y"] = to_string(rep.flag_y);
  std::vector<std::string> flags;
  for (auto f : rep.flag_w) flags.push_back(to_string(f));
  j["flag_w"] = flags;
  j["res_y"] = rep.res_y;
  j["res_w"] = rep.res_w;
  j["subsystems_converged"] = rep.subsystems_converged;
  j["c"] = rep.c;
  j["posthoc_passes"] = rep.posthoc_passes;
  j["small_system_condition"] = rep.small_system_condition;
  j["preconditioner"] = to_json(rep.precond);
  j["timing"] = {{"T_setup", rep.precond.setup_seconds},
                 {"T_solve", rep.solve_seconds},
                 {"note", "wall-clock, hardware dependent"}};
  if (include_solution) j["x_hat"] = rep.x_hat;
  return j;
}

nlohmann::json split_sidecar(const SplitSystem& sys) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = sys.a_tilde.rows();
  j["s"] = sys.s();
  j["irregular_cols"] = sys.irregular_cols;
  j["strategy"] = to_string(sys.strategy);
  j["p_kept"] = sys.p_kept;
  j["factor"] = sys.factor;
  j["p"] = sys.stats.p;
  j["p_d"] = sys.stats.p_d;
  j["nnz_a_tilde"] = sys.a_tilde.nnz();
  j["nnz_u"] = sys.u.nnz();
  return j;
}

}  // namespace sai
