#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "qcorr/json_io.hpp"
#include "qcorr/states_library.hpp"

using namespace qcorr;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string stdout_text;
};

CommandResult run_cli(const std::string& args) {
  const std::string out_path = "/tmp/qcorr_cli_stdout.txt";
  const std::string cmd =
      std::string(QCORR_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CommandResult res;
  res.exit_code = WEXITSTATUS(raw);
  std::ifstream f(out_path);
  std::stringstream ss;
  ss << f.rdbuf();
  res.stdout_text = ss.str();
  return res;
}

}  // namespace

TEST_CASE("measures on GHZ prints 3 ln 2") {
  const CommandResult res =
      run_cli("measures --state builtin:ghz?n=3 --parts 'A1|A2|A3'");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("2.07944154") != std::string::npos);
}

TEST_CASE("measures on the Bell state prints 2 ln 2") {
  const CommandResult res = run_cli("measures --state builtin:bell --parts 'A|B'");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("1.38629436") != std::string::npos);
}

TEST_CASE("measures on a product state file prints zero information") {
  CounterRng rng(1);
  const DensityMatrix a = random_density(SystemLayout::single("A", 2), 0, rng);
  DensityMatrix joint = a;
  {
    const DensityMatrix b = random_density(SystemLayout::single("B", 2), 0, rng);
    joint = tensor(a, b);
  }
  save_state_json(joint, "/tmp/qcorr_product.json");
  const CommandResult res = run_cli(
      "measures --state file:/tmp/qcorr_product.json --parts 'A|B' "
      "--out /tmp/qcorr_product_out.json");
  CHECK(res.exit_code == 0);
  const Json out = load_json("/tmp/qcorr_product_out.json");
  CHECK(std::abs(out["result"]["multipartite_information"].get<double>()) <= 1e-9);
}

TEST_CASE("discord of a classical builtin is zero and deterministic") {
  const std::string args =
      "discord --state 'builtin:classical?dims=2,2&probs=0.5,0,0,0.5' "
      "--parts 'A1|A2' --seed 7 --restarts 3 --max-iters 120";
  const CommandResult res = run_cli(args + " --out /tmp/qcorr_discord1.json");
  CHECK(res.exit_code == 0);

  const Json first = load_json("/tmp/qcorr_discord1.json");
  CHECK(std::abs(first["result"]["value"].get<double>()) <= 1e-6);

  run_cli(args + " --out /tmp/qcorr_discord2.json");
  const Json second = load_json("/tmp/qcorr_discord2.json");
  CHECK(first == second);  // identical output files for identical seeds
}

TEST_CASE("psd-rates totals agree for all orders") {
  const CommandResult res = run_cli(
      "psd-rates --state builtin:ghz?n=3 --pairs 'A1:|A2:|A3:' --all-orders");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("1.03972077") != std::string::npos);
}

TEST_CASE("verify with zero trials exits cleanly") {
  const CommandResult res = run_cli("verify esq-cemi --trials 0");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("violations 0") != std::string::npos);
}

TEST_CASE("verify lemma1 small campaign is clean") {
  const CommandResult res =
      run_cli("verify lemma1 --trials 5 --seed 1 --workers 2");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("violations 0") != std::string::npos);
}

TEST_CASE("unknown check exits with the usage code") {
  const CommandResult res = run_cli("verify not-a-check --trials 1");
  CHECK(res.exit_code == 2);
}

TEST_CASE("invalid state JSON exits with the validation code") {
  {
    std::ofstream f("/tmp/qcorr_bad_state.json");
    f << "{\"layout\": [[\"A\",2]], \"re\": [[1.5,0],[0,-0.5]], \"im\": "
         "[[0,0],[0,0]]}\n";
  }
  const CommandResult res =
      run_cli("measures --state file:/tmp/qcorr_bad_state.json --parts A");
  CHECK(res.exit_code == 3);
}

TEST_CASE("extendibility certifies and replays") {
  const CommandResult res = run_cli(
      "extendibility --state 'builtin:werner?p=0.1' --parts B --k 2 "
      "--seed 3 --opt-tol 1e-6 --out /tmp/qcorr_ext.json");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("Feasible") != std::string::npos);

  const CommandResult replay = run_cli("replay /tmp/qcorr_ext.json");
  CHECK(replay.exit_code == 0);
  CHECK(replay.stdout_text.find("PASS") != std::string::npos);
}

TEST_CASE("verify output replays to 1e-12") {
  const CommandResult res = run_cli(
      "verify monotone --trials 4 --seed 11 --out /tmp/qcorr_verify.json");
  CHECK(res.exit_code == 0);
  const CommandResult replay = run_cli("replay /tmp/qcorr_verify.json");
  CHECK(replay.exit_code == 0);
  CHECK(replay.stdout_text.find("PASS") != std::string::npos);
}

TEST_CASE("bits flag only changes the display") {
  const CommandResult res =
      run_cli("measures --state builtin:ghz?n=3 --parts 'A1|A2|A3' --bits "
              "--out /tmp/qcorr_bits.json");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("I = 3 bits") != std::string::npos);
  // Storage stays in nats.
  const Json out = load_json("/tmp/qcorr_bits.json");
  CHECK(out["result"]["multipartite_information"].get<double>() ==
        doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("config file supplies defaults, flags win") {
  {
    std::ofstream f("/tmp/qcorr_cfg.json");
    f << "{\"optimizer\": {\"seed\": 7, \"restarts\": 3, \"max_iters\": 120}}\n";
  }
  const std::string spec =
      "'builtin:classical?dims=2,2&probs=0.5,0,0,0.5' --parts 'A1|A2'";
  run_cli("discord --state " + spec +
          " --config /tmp/qcorr_cfg.json --out /tmp/qcorr_cfg_a.json");
  run_cli("discord --state " + spec +
          " --seed 7 --restarts 3 --max-iters 120 --out /tmp/qcorr_cfg_b.json");
  const Json a = load_json("/tmp/qcorr_cfg_a.json");
  const Json b = load_json("/tmp/qcorr_cfg_b.json");
  CHECK(a["result"] == b["result"]);

  // An explicit flag overrides the config value.
  run_cli("discord --state " + spec +
          " --config /tmp/qcorr_cfg.json --seed 9 --out /tmp/qcorr_cfg_c.json");
  const Json c = load_json("/tmp/qcorr_cfg_c.json");
  CHECK(c["config"]["optimizer"]["seed"].get<std::uint64_t>() == 9);
}

TEST_CASE("bell discord via CLI lands on ln 2") {
  const CommandResult res = run_cli(
      "discord --state builtin:bell --parts 'A|B' --seed 5 --restarts 4 "
      "--max-iters 200");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("0.69314") != std::string::npos);
}
