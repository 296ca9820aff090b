// Command-line frontend: load or generate states, compute correlation
// measures, run the optimizers and the verification campaigns, persist
// machine-readable reports.
//
// Exit codes: 0 success, 1 theorem-tier violation, 2 usage error,
// 3 validation or limit error.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qcorr/errors.hpp"
#include "qcorr/json_io.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/optimize.hpp"
#include "qcorr/states_library.hpp"
#include "qcorr/tensor_ops.hpp"
#include "qcorr/verify.hpp"

namespace {

using namespace qcorr;

struct RunConfig {
  ToleranceProfile tol;
  OptimizerConfig opt;
  std::size_t workers = 1;
  std::string out;
  std::string format = "json";
  bool bits = false;
};

Json run_config_to_json(const RunConfig& rc) {
  Json j;
  j["tolerances"] = {{"hermiticity", rc.tol.hermiticity},
                     {"psd", rc.tol.psd},
                     {"trace", rc.tol.trace},
                     {"entropy_log_cutoff", rc.tol.entropy_log_cutoff},
                     {"inequality_slack", rc.tol.inequality_slack}};
  j["optimizer"] = {{"restarts", rc.opt.restarts},
                    {"max_iters", rc.opt.max_iters},
                    {"step_init", rc.opt.step_init},
                    {"tol", rc.opt.tol},
                    {"seed", rc.opt.seed},
                    {"general_povms", rc.opt.general_povms},
                    {"dimension_cap", rc.opt.dimension_cap}};
  j["workers"] = rc.workers;
  j["format"] = rc.format;
  j["bits"] = rc.bits;
  return j;
}

void run_config_from_json(const Json& j, RunConfig& rc) {
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (t.contains("hermiticity")) rc.tol.hermiticity = t["hermiticity"];
    if (t.contains("psd")) rc.tol.psd = t["psd"];
    if (t.contains("trace")) rc.tol.trace = t["trace"];
    if (t.contains("entropy_log_cutoff"))
      rc.tol.entropy_log_cutoff = t["entropy_log_cutoff"];
    if (t.contains("inequality_slack"))
      rc.tol.inequality_slack = t["inequality_slack"];
  }
  if (j.contains("optimizer")) {
    const Json& o = j["optimizer"];
    if (o.contains("restarts")) rc.opt.restarts = o["restarts"];
    if (o.contains("max_iters")) rc.opt.max_iters = o["max_iters"];
    if (o.contains("step_init")) rc.opt.step_init = o["step_init"];
    if (o.contains("tol")) rc.opt.tol = o["tol"];
    if (o.contains("seed")) rc.opt.seed = o["seed"];
    if (o.contains("general_povms")) rc.opt.general_povms = o["general_povms"];
    if (o.contains("dimension_cap")) rc.opt.dimension_cap = o["dimension_cap"];
  }
  if (j.contains("workers")) rc.workers = j["workers"];
  if (j.contains("format")) rc.format = j["format"].get<std::string>();
  if (j.contains("bits")) rc.bits = j["bits"];
}

std::vector<std::vector<std::string>> parse_parts(const std::string& s) {
  std::vector<std::vector<std::string>> parts;
  std::stringstream groups(s);
  std::string group;
  while (std::getline(groups, group, '|')) {
    std::vector<std::string> labels;
    std::stringstream ls(group);
    std::string label;
    while (std::getline(ls, label, ','))
      if (!label.empty()) labels.push_back(label);
    if (!labels.empty()) parts.push_back(std::move(labels));
  }
  if (parts.empty()) throw ParseError("empty partition '" + s + "'");
  return parts;
}

std::vector<PartyPair> parse_pairs(const std::string& s) {
  std::vector<PartyPair> pairs;
  std::stringstream groups(s);
  std::string group;
  while (std::getline(groups, group, '|')) {
    const std::size_t colon = group.find(':');
    if (colon == std::string::npos)
      throw ParseError("pair '" + group + "' needs the form A,B:P,Q");
    PartyPair pair;
    const auto split = [](const std::string& side) {
      std::vector<std::string> labels;
      std::stringstream ls(side);
      std::string label;
      while (std::getline(ls, label, ','))
        if (!label.empty()) labels.push_back(label);
      return labels;
    };
    pair.a = split(group.substr(0, colon));
    pair.prime = split(group.substr(colon + 1));
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) throw ParseError("empty pair list '" + s + "'");
  return pairs;
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoul(tok));
  return out;
}

double display(double nats, bool bits) { return bits ? nats / std::log(2.0) : nats; }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

void emit(const RunConfig& rc, const std::string& command, const Json& args,
          const Json& result) {
  if (rc.out.empty()) return;
  Json envelope;
  envelope["command"] = command;
  envelope["config"] = run_config_to_json(rc);
  envelope["args"] = args;
  envelope["result"] = result;
  save_json(envelope, rc.out);
}

Json povm_to_json(const Povm& p) {
  Json j;
  j["system"] = p.system();
  j["dim"] = p.dim();
  Json effects = Json::array();
  for (const ComplexMatrix& e : p.effects()) effects.push_back(matrix_to_json(e));
  j["effects"] = std::move(effects);
  return j;
}

// ---------------------------------------------------------------------------
// Command payloads (shared between direct execution and replay)
// ---------------------------------------------------------------------------

Json cmd_measures_result(const RunConfig& rc, const std::string& state_uri,
                         const std::string& parts_str) {
  const DensityMatrix rho = state_from_uri(state_uri);
  const std::vector<std::vector<std::string>> parts = parse_parts(parts_str);

  Json result;
  Json entropies = Json::object();
  for (const auto& p : parts) {
    std::string key;
    for (const std::string& l : p) key += (key.empty() ? "" : ",") + l;
    entropies[key] = von_neumann_entropy(partial_trace(rho, p), rc.tol);
  }
  result["entropy_per_part"] = std::move(entropies);
  result["entropy_total"] = von_neumann_entropy(rho, rc.tol);
  result["multipartite_information"] = multipartite_information(rho, parts, rc.tol);
  if (parts.size() >= 2) {
    Json cmis = Json::object();
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = i + 1; j < parts.size(); ++j) {
        std::vector<std::string> rest;
        for (std::size_t k = 0; k < parts.size(); ++k)
          if (k != i && k != j)
            rest.insert(rest.end(), parts[k].begin(), parts[k].end());
        const double v =
            conditional_mutual_information(rho, parts[i], parts[j], rest, rc.tol);
        cmis["I(" + std::to_string(i + 1) + ";" + std::to_string(j + 1) + "|rest)"] = v;
      }
    result["pairwise_cmi"] = std::move(cmis);
  }
  return result;
}

Json cmd_discord_result(const RunConfig& rc, const std::string& state_uri,
                        const std::string& parts_str) {
  const DensityMatrix rho = state_from_uri(state_uri);
  OptimizerConfig cfg = rc.opt;
  cfg.workers = rc.workers;
  const MsqDiscordResult res = msq_discord(rho, parse_parts(parts_str), cfg, {}, rc.tol);
  Json result;
  result["value"] = res.value;
  result["best_classical_information"] = res.best_classical;
  Json povms = Json::array();
  for (const Povm& p : res.best_povms) povms.push_back(povm_to_json(p));
  result["best_povms"] = std::move(povms);
  return result;
}

Json cmd_recover_result(const RunConfig& rc, const std::string& state_uri,
                        const std::string& lost_str, const std::string& anchor_str) {
  const DensityMatrix rho = state_from_uri(state_uri);
  OptimizerConfig cfg = rc.opt;
  const RecoveryResult res = optimize_recovery(rho, parse_parts(lost_str)[0],
                                               parse_parts(anchor_str)[0], cfg, rc.tol);
  Json result;
  result["fidelity"] = res.fid;
  result["neg_log_fidelity"] = -std::log(std::max(res.fid, 1e-300));
  result["t"] = res.t;
  result["channel"] = channel_to_json(res.channel);
  return result;
}

Json cmd_cemi_result(const RunConfig& rc, const std::string& state_uri,
                     const std::string& parts_str, const std::string& ext_dims_str) {
  const DensityMatrix rho = state_from_uri(state_uri);
  OptimizerConfig cfg = rc.opt;
  const CemiSearchResult res = cemi_upper_bound_search(
      rho, parse_parts(parts_str), parse_size_list(ext_dims_str), cfg, rc.tol);
  Json result;
  result["value"] = res.value;
  result["extension"] = state_to_json(res.extension);
  return result;
}

Json cmd_surprisal_result(const RunConfig& rc, const std::string& state_uri,
                          const std::string& parts_str) {
  const DensityMatrix rho = state_from_uri(state_uri);
  OptimizerConfig cfg = rc.opt;
  const SurprisalResult res =
      surprisal_of_measurement_recoverability(rho, parse_parts(parts_str), cfg, rc.tol);
  Json result;
  result["value"] = res.value;
  result["best_fidelity"] = res.best_fidelity;
  return result;
}

Json cmd_psd_rates_result(const RunConfig& rc, const std::string& state_uri,
                          const std::string& pairs_str, const std::string& order_str,
                          bool all_orders) {
  const DensityMatrix rho = state_from_uri(state_uri);
  const std::vector<PartyPair> pairs = parse_pairs(pairs_str);

  // A purification supplies the reference the protocol statement expects;
  // the rates only involve the state on the paired systems.
  const PureState phi = purify(rho, "#R", rc.tol);

  const auto rates_for = [&](const std::vector<std::size_t>& order) {
    const PsdRates rates = psd_rates(phi, pairs, order, rc.tol);
    Json j;
    j["order"] = order;
    j["per_round"] = rates.per_round;
    j["total"] = rates.total;
    j["total_rate"] = rates.total_rate;
    return j;
  };

  Json result;
  if (all_orders) {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    Json all = Json::array();
    do {
      all.push_back(rates_for(order));
    } while (std::next_permutation(order.begin(), order.end()));
    result["orders"] = std::move(all);
  } else {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    if (!order_str.empty()) {
      order = parse_size_list(order_str);
      for (std::size_t& o : order) {
        if (o == 0) throw ParseError("orders are 1-based");
        o -= 1;
      }
    }
    result = rates_for(order);
  }
  return result;
}

Json cmd_extendibility_result(const RunConfig& rc, const std::string& state_uri,
                              const std::string& parts_str, std::size_t k) {
  const DensityMatrix rho = state_from_uri(state_uri);
  OptimizerConfig cfg = rc.opt;
  cfg.workers = rc.workers;
  const FeasibilityCertificate cert =
      dykstra_k_extendibility(rho, parse_parts(parts_str), k, cfg, rc.tol);
  return certificate_to_json(cert);
}

Json cmd_definetti_result(const RunConfig& rc, const std::string& state_uri,
                          const std::string& parts_str, std::size_t k) {
  const DensityMatrix rho = state_from_uri(state_uri);
  const std::vector<std::vector<std::string>> parts = parse_parts(parts_str);
  OptimizerConfig cfg = rc.opt;
  cfg.workers = rc.workers;
  // Extend every part but the first, as in the de Finetti bound.
  std::vector<std::vector<std::string>> to_extend(parts.begin() + 1, parts.end());
  if (to_extend.empty()) throw NotAPartition("need at least two parts");
  OptimizerConfig dyk = cfg;
  dyk.tol = std::max(cfg.tol, 1e-6);
  const FeasibilityCertificate cert = dykstra_k_extendibility(rho, to_extend, k, dyk, rc.tol);
  Json result;
  result["certificate"] = certificate_to_json(cert);
  if (cert.status == FeasibilityStatus::Feasible) {
    const VerificationReport report = check_definetti(cert, cfg, rc.tol);
    result["report"] = report_to_json(report);
  }
  return result;
}

struct VerifyOutcome {
  Json result;
  bool theorem_violation = false;
};

VerifyOutcome cmd_verify_result(const RunConfig& rc, const std::string& check_id,
                                const std::string& ensemble, std::size_t trials) {
  const CheckInfo& info = check_info(check_id);
  OptimizerConfig cfg = rc.opt;
  cfg.workers = rc.workers;
  std::vector<VerificationReport> reports;
  const CampaignSummary summary =
      run_campaign(check_id, ensemble, trials, rc.workers, cfg, rc.tol, &reports);

  VerifyOutcome out;
  out.result["summary"] = summary_to_json(summary);
  out.result["tier"] =
      info.tier == CheckTier::Theorem ? "theorem" : "existential";
  out.theorem_violation =
      info.tier == CheckTier::Theorem && summary.violations > 0;

  if (!rc.out.empty()) {
    write_reports_jsonl(reports, rc.out + ".reports.jsonl");
    out.result["reports_path"] = rc.out + ".reports.jsonl";
    if (rc.format == "csv") {
      write_reports_csv(reports, rc.out + ".reports.csv");
      out.result["csv_path"] = rc.out + ".reports.csv";
    }
  }
  return out;
}

// Recursive numeric comparison for replay, 1e-12 absolute on every leaf.
double max_numeric_deviation(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number())
    return std::abs(a.get<double>() - b.get<double>());
  if (a.is_object() && b.is_object()) {
    double dev = 0.0;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (it.key() == "elapsed_seconds" || it.key() == "reports_path" ||
          it.key() == "csv_path")
        continue;
      if (!b.contains(it.key())) return 1e9;
      dev = std::max(dev, max_numeric_deviation(it.value(), b.at(it.key())));
    }
    return dev;
  }
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) return 1e9;
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      dev = std::max(dev, max_numeric_deviation(a[i], b[i]));
    return dev;
  }
  return a == b ? 0.0 : 1e9;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcorr: multipartite quantum correlation measures and "
               "recoverability-inequality verification"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig rc;
  if (const char* env_workers = std::getenv("QCORR_WORKERS"))
    rc.workers = std::max(1, std::atoi(env_workers));

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags win)");
  auto* opt_seed = app.add_option("--seed", rc.opt.seed, "optimizer / campaign seed");
  auto* opt_workers = app.add_option("--workers", rc.workers, "worker count");
  auto* opt_out = app.add_option("--out", rc.out, "output JSON path");
  auto* opt_format = app.add_option("--format", rc.format, "json or csv");
  auto* opt_bits = app.add_flag("--bits", rc.bits, "display in bits (storage stays in nats)");
  auto* opt_restarts = app.add_option("--restarts", rc.opt.restarts, "optimizer restarts");
  auto* opt_iters = app.add_option("--max-iters", rc.opt.max_iters, "optimizer iterations");
  auto* opt_step = app.add_option("--step", rc.opt.step_init, "optimizer initial step");
  auto* opt_otol = app.add_option("--opt-tol", rc.opt.tol, "optimizer tolerance");
  auto* opt_slack = app.add_option("--tol", rc.tol.inequality_slack, "inequality slack tolerance");
  auto* opt_gen = app.add_flag("--general-povms", rc.opt.general_povms,
                               "search general POVMs via Naimark ancillas");

  std::string state_uri, parts_str, pairs_str, lost_str, anchor_str;
  std::string ext_dims_str = "2,2";
  std::string order_str, ensemble, check_id, replay_path;
  std::size_t k = 2, trials = 100;
  bool all_orders = false;

  CLI::App* c_measures = app.add_subcommand("measures", "entropies and multipartite information");
  c_measures->add_option("--state", state_uri)->required();
  c_measures->add_option("--parts", parts_str)->required();

  CLI::App* c_discord = app.add_subcommand("discord", "MSQ discord (best found)");
  c_discord->add_option("--state", state_uri)->required();
  c_discord->add_option("--parts", parts_str)->required();

  CLI::App* c_recover = app.add_subcommand("recover", "optimized recovery map");
  c_recover->add_option("--state", state_uri)->required();
  c_recover->add_option("--lost", lost_str)->required();
  c_recover->add_option("--anchor", anchor_str)->required();

  CLI::App* c_cemi = app.add_subcommand("cemi-bound", "CEMI upper-bound search");
  c_cemi->add_option("--state", state_uri)->required();
  c_cemi->add_option("--parts", parts_str)->required();
  c_cemi->add_option("--ext-dims", ext_dims_str);

  CLI::App* c_surprisal = app.add_subcommand("surprisal", "surprisal of measurement recoverability");
  c_surprisal->add_option("--state", state_uri)->required();
  c_surprisal->add_option("--parts", parts_str)->required();

  CLI::App* c_rates = app.add_subcommand("psd-rates", "partial state distribution rates");
  c_rates->add_option("--state", state_uri)->required();
  c_rates->add_option("--pairs", pairs_str)->required();
  c_rates->add_option("--order", order_str, "1-based decode order, e.g. 2,1,3");
  c_rates->add_flag("--all-orders", all_orders);

  CLI::App* c_ext = app.add_subcommand("extendibility", "k-extendibility feasibility");
  c_ext->add_option("--state", state_uri)->required();
  c_ext->add_option("--parts", parts_str)->required();
  c_ext->add_option("--k", k);

  CLI::App* c_defi = app.add_subcommand("definetti", "de Finetti bound check");
  c_defi->add_option("--state", state_uri)->required();
  c_defi->add_option("--parts", parts_str)->required();
  c_defi->add_option("--k", k);

  CLI::App* c_verify = app.add_subcommand("verify", "seeded verification campaign");
  c_verify->add_option("check", check_id, "check id")->required();
  c_verify->add_option("--trials", trials);
  c_verify->add_option("--ensemble", ensemble, "instance ensemble URI");

  CLI::App* c_replay = app.add_subcommand("replay", "re-run a saved output and compare");
  c_replay->add_option("file", replay_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      RunConfig from_file = rc;
      run_config_from_json(load_json(config_path), from_file);
      // Explicit flags win over the config file.
      if (opt_seed->count()) from_file.opt.seed = rc.opt.seed;
      if (opt_workers->count()) from_file.workers = rc.workers;
      if (opt_out->count()) from_file.out = rc.out;
      if (opt_format->count()) from_file.format = rc.format;
      if (opt_bits->count()) from_file.bits = rc.bits;
      if (opt_restarts->count()) from_file.opt.restarts = rc.opt.restarts;
      if (opt_iters->count()) from_file.opt.max_iters = rc.opt.max_iters;
      if (opt_step->count()) from_file.opt.step_init = rc.opt.step_init;
      if (opt_otol->count()) from_file.opt.tol = rc.opt.tol;
      if (opt_slack->count()) from_file.tol.inequality_slack = rc.tol.inequality_slack;
      if (opt_gen->count()) from_file.opt.general_povms = rc.opt.general_povms;
      from_file.out = opt_out->count() ? rc.out : from_file.out;
      rc = from_file;
    }

    if (*c_measures) {
      const Json result = cmd_measures_result(rc, state_uri, parts_str);
      std::cout << "H(total) = " << fmt(display(result["entropy_total"], rc.bits)) << "\n";
      for (auto& [key, value] : result["entropy_per_part"].items())
        std::cout << "H(" << key << ") = " << fmt(display(value, rc.bits)) << "\n";
      std::cout << "I = " << fmt(display(result["multipartite_information"], rc.bits))
                << (rc.bits ? " bits" : " nats") << "\n";
      if (result.contains("pairwise_cmi"))
        for (auto& [key, value] : result["pairwise_cmi"].items())
          std::cout << key << " = " << fmt(display(value, rc.bits)) << "\n";
      emit(rc, "measures", {{"state", state_uri}, {"parts", parts_str}}, result);
      return 0;
    }
    if (*c_discord) {
      const Json result = cmd_discord_result(rc, state_uri, parts_str);
      std::cout << "discord (best found) = "
                << fmt(display(result["value"], rc.bits)) << (rc.bits ? " bits" : " nats")
                << "\n";
      emit(rc, "discord", {{"state", state_uri}, {"parts", parts_str}}, result);
      return 0;
    }
    if (*c_recover) {
      const Json result = cmd_recover_result(rc, state_uri, lost_str, anchor_str);
      std::cout << "fidelity = " << fmt(result["fidelity"]) << "\n"
                << "-ln F    = " << fmt(result["neg_log_fidelity"]) << "\n";
      emit(rc, "recover",
           {{"state", state_uri}, {"lost", lost_str}, {"anchor", anchor_str}}, result);
      return 0;
    }
    if (*c_cemi) {
      const Json result = cmd_cemi_result(rc, state_uri, parts_str, ext_dims_str);
      std::cout << "CEMI upper bound (best found) = " << fmt(display(result["value"], rc.bits))
                << (rc.bits ? " bits" : " nats") << "\n";
      emit(rc, "cemi-bound",
           {{"state", state_uri}, {"parts", parts_str}, {"ext_dims", ext_dims_str}},
           result);
      return 0;
    }
    if (*c_surprisal) {
      const Json result = cmd_surprisal_result(rc, state_uri, parts_str);
      std::cout << "surprisal (best found) = " << fmt(display(result["value"], rc.bits))
                << (rc.bits ? " bits" : " nats") << "\n";
      emit(rc, "surprisal", {{"state", state_uri}, {"parts", parts_str}}, result);
      return 0;
    }
    if (*c_rates) {
      const Json result =
          cmd_psd_rates_result(rc, state_uri, pairs_str, order_str, all_orders);
      const auto print_one = [&](const Json& j) {
        std::cout << "order:";
        for (const auto& o : j["order"]) std::cout << " " << (o.get<std::size_t>() + 1);
        std::cout << "\n";
        std::size_t round = 1;
        for (const auto& v : j["per_round"])
          std::cout << "  round " << round++ << ": " << fmt(display(v, rc.bits)) << "\n";
        std::cout << "  total rate: " << fmt(display(j["total_rate"], rc.bits))
                  << (rc.bits ? " qubits (log2)" : " nats/2 units") << "\n";
      };
      if (result.contains("orders"))
        for (const auto& j : result["orders"]) print_one(j);
      else
        print_one(result);
      emit(rc, "psd-rates",
           {{"state", state_uri},
            {"pairs", pairs_str},
            {"order", order_str},
            {"all_orders", all_orders}},
           result);
      return 0;
    }
    if (*c_ext) {
      const Json result = cmd_extendibility_result(rc, state_uri, parts_str, k);
      std::cout << "status = " << result["status"].get<std::string>()
                << " (residual " << fmt(result["residual"]) << ", iterations "
                << result["iterations"] << ")\n";
      emit(rc, "extendibility",
           {{"state", state_uri}, {"parts", parts_str}, {"k", k}}, result);
      return 0;
    }
    if (*c_defi) {
      const Json result = cmd_definetti_result(rc, state_uri, parts_str, k);
      std::cout << "certificate: " << result["certificate"]["status"].get<std::string>()
                << "\n";
      if (result.contains("report")) {
        const Json& r = result["report"];
        std::cout << "bound = " << fmt(r["lhs"]) << ", witness ub = " << fmt(r["rhs"])
                  << ", " << (r["holds"].get<bool>() ? "PASS" : "UNDECIDED") << "\n";
      }
      emit(rc, "definetti", {{"state", state_uri}, {"parts", parts_str}, {"k", k}},
           result);
      return 0;
    }
    if (*c_verify) {
      const VerifyOutcome outcome = cmd_verify_result(rc, check_id, ensemble, trials);
      const Json& s = outcome.result["summary"];
      std::cout << "check " << check_id << ": trials " << s["trials"] << ", violations "
                << s["violations"] << ", min slack " << fmt(s["min_slack"]) << "\n";
      emit(rc, "verify",
           {{"check", check_id}, {"ensemble", ensemble}, {"trials", trials}},
           outcome.result);
      return outcome.theorem_violation ? 1 : 0;
    }
    if (*c_replay) {
      const Json saved = load_json(replay_path);
      RunConfig replay_rc;
      run_config_from_json(saved.at("config"), replay_rc);
      replay_rc.out.clear();  // replay never overwrites outputs
      const std::string command = saved.at("command");
      const Json& args = saved.at("args");
      Json fresh;
      if (command == "measures")
        fresh = cmd_measures_result(replay_rc, args.at("state"), args.at("parts"));
      else if (command == "discord")
        fresh = cmd_discord_result(replay_rc, args.at("state"), args.at("parts"));
      else if (command == "recover")
        fresh = cmd_recover_result(replay_rc, args.at("state"), args.at("lost"),
                                   args.at("anchor"));
      else if (command == "cemi-bound")
        fresh = cmd_cemi_result(replay_rc, args.at("state"), args.at("parts"),
                                args.at("ext_dims"));
      else if (command == "surprisal")
        fresh = cmd_surprisal_result(replay_rc, args.at("state"), args.at("parts"));
      else if (command == "psd-rates")
        fresh = cmd_psd_rates_result(replay_rc, args.at("state"), args.at("pairs"),
                                     args.at("order"), args.at("all_orders"));
      else if (command == "extendibility")
        fresh = cmd_extendibility_result(replay_rc, args.at("state"), args.at("parts"),
                                         args.at("k"));
      else if (command == "definetti")
        fresh = cmd_definetti_result(replay_rc, args.at("state"), args.at("parts"),
                                     args.at("k"));
      else if (command == "verify")
        fresh = cmd_verify_result(replay_rc, args.at("check"), args.at("ensemble"),
                                  args.at("trials"))
                    .result;
      else
        throw ParseError("cannot replay command '" + command + "'");

      const double dev = max_numeric_deviation(saved.at("result"), fresh);
      std::cout << "replay max deviation = " << fmt(dev) << " -> "
                << (dev <= 1e-12 ? "PASS" : "FAIL") << "\n";
      return dev <= 1e-12 ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownCheck& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownName& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
