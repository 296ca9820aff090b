#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcorr/errors.hpp"
#include "qcorr/states_library.hpp"
#include "qcorr/tensor_ops.hpp"
#include "qcorr/verify.hpp"

using namespace qcorr;

namespace {

OptimizerConfig campaign_cfg(std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.seed = seed;
  cfg.restarts = 3;
  cfg.max_iters = 150;
  cfg.tol = 1e-7;
  return cfg;
}

}  // namespace

TEST_CASE("check registry") {
  CHECK(known_checks().size() == 13);
  CHECK(check_info("lemma1").tier == CheckTier::Theorem);
  CHECK(check_info("conjecture").tier == CheckTier::Existential);
  CHECK_THROWS_AS(check_info("nope"), UnknownCheck);
}

TEST_CASE("empty campaigns are empty") {
  const CampaignSummary s = run_campaign("esq-cemi", "", 0, 1, campaign_cfg(1));
  CHECK(s.trials == 0);
  CHECK(s.violations == 0);
  CHECK(s.violation_reports.empty());
}

TEST_CASE("theorem campaigns run clean at tol 1e-7") {
  ToleranceProfile tol;
  tol.inequality_slack = 1e-7;
  for (const std::string id : {"lemma1", "monotone", "dimension-bound", "fannes"}) {
    const CampaignSummary s = run_campaign(id, "", 25, 2, campaign_cfg(11), tol);
    CAPTURE(id);
    CHECK(s.violations == 0);
  }
  const CampaignSummary esq = run_campaign("esq-cemi", "", 40, 2, campaign_cfg(12), tol);
  CHECK(esq.violations == 0);
  CHECK(esq.min_slack >= -1e-7);
}

TEST_CASE("esq-cemi with trivial primes is an equality") {
  CounterRng rng(30);
  const DensityMatrix rho =
      random_density(SystemLayout({{"A1", 2}, {"A2", 2}}), 0, rng);
  const std::vector<PartyPair> pairs{PartyPair{{"A1"}, {}}, PartyPair{{"A2"}, {}}};
  const VerificationReport r = check_esq_le_cemi(rho, pairs);
  CHECK(r.holds);
  CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-9));
  CHECK(r.lhs ==
        doctest::Approx(multipartite_information(rho, {{"A1"}, {"A2"}})).epsilon(1e-9));
}

TEST_CASE("fawzi-renner single instances behave on structured states") {
  // Product A x BC: recovery appends the marginal, both sides ~0.
  CounterRng rng(3);
  const DensityMatrix a = random_density(SystemLayout::single("A", 2), 0, rng);
  const DensityMatrix bc = random_density(SystemLayout({{"B", 2}, {"C", 2}}), 0, rng);
  const VerificationReport product =
      check_fawzi_renner(tensor(a, bc), {"A"}, {"B"}, {"C"}, campaign_cfg(4));
  CHECK(product.holds);
  CHECK(std::abs(product.lhs) <= 1e-8);
  CHECK(product.rhs <= 1e-7);

  // Zero-CMI classical chain: exact recovery.
  const DensityMatrix markov = classical_state(
      {0.5, 0, 0, 0, 0, 0, 0, 0.5}, SystemLayout({{"A", 2}, {"B", 2}, {"C", 2}}));
  const VerificationReport chain =
      check_fawzi_renner(markov, {"A"}, {"B"}, {"C"}, campaign_cfg(5));
  CHECK(chain.holds);
  CHECK(chain.rhs <= 1e-7);
}

TEST_CASE("fawzi-renner campaign reports mostly-held instances") {
  const CampaignSummary s = run_campaign("fr", "", 20, 2, campaign_cfg(6));
  // Soft tier: shortfalls possible but should be rare and tiny.
  CHECK(s.violations <= 2);
  CHECK(s.min_slack > -1e-2);
}

TEST_CASE("remark2 family has 2^l members and a trivial all-zeros case") {
  CounterRng rng(7);
  const DensityMatrix rho = random_density(
      SystemLayout({{"A1", 2}, {"P1", 2}, {"A2", 2}, {"P2", 2}}), 0, rng);
  const std::vector<PartyPair> pairs{PartyPair{{"A1"}, {"P1"}},
                                     PartyPair{{"A2"}, {"P2"}}};
  const std::vector<VerificationReport> family =
      check_remark2_family(rho, pairs, campaign_cfg(8));
  CHECK(family.size() == 4);
  CHECK(family[0].rhs == doctest::Approx(0.0));  // mask 00
  CHECK(family[0].holds);
}

TEST_CASE("local recoverability on flag extensions is exact") {
  CounterRng rng(9);
  std::vector<std::vector<DensityMatrix>> factors;
  for (int z = 0; z < 2; ++z)
    factors.push_back({random_pure_state(SystemLayout::single("A1", 2), rng).density(),
                       random_pure_state(SystemLayout::single("A2", 2), rng).density()});
  const DensityMatrix ext = flag_extension({0.3, 0.7}, factors, {"P1", "P2"});
  const std::vector<PartyPair> pairs{PartyPair{{"A1"}, {"P1"}},
                                     PartyPair{{"A2"}, {"P2"}}};
  const VerificationReport r = check_local_recoverability(ext, pairs, campaign_cfg(10));
  CHECK(std::abs(r.lhs) <= 1e-8);
  CHECK(r.rhs <= 1e-8);

  for (const VerificationReport& m : check_remark2_family(ext, pairs, campaign_cfg(11)))
    CHECK(m.rhs <= 1e-8);
}

TEST_CASE("prop1 forward holds on a small campaign") {
  const CampaignSummary s = run_campaign("prop1-fwd", "", 9, 3, campaign_cfg(12));
  CHECK(s.violations == 0);
}

TEST_CASE("prop1 converse holds on a small campaign") {
  const CampaignSummary s = run_campaign("prop1-conv", "", 6, 2, campaign_cfg(13));
  CHECK(s.violations == 0);
}

TEST_CASE("conjecture explorer: classical ensembles yield no candidates") {
  const CampaignSummary s = explore_conjecture(
      "random:classicalpairs?l=2&da=2&dp=2", 25, campaign_cfg(14));
  CHECK(s.violations == 0);
}

TEST_CASE("conjecture explorer: flag extensions yield no candidates") {
  const CampaignSummary s = explore_conjecture(
      "random:flagext?l=2&d=2&terms=3", 10, campaign_cfg(15));
  CHECK(s.violations == 0);
}

TEST_CASE("prop4 single-letter evaluations complete and are recorded") {
  const CampaignSummary s = run_campaign("prop4-n1", "", 8, 2, campaign_cfg(16));
  CHECK(s.trials == 8);
  CHECK(std::isfinite(s.min_slack));
}

TEST_CASE("definetti campaign passes on separable inputs") {
  const CampaignSummary s = run_campaign("definetti", "", 4, 2, campaign_cfg(17));
  CHECK(s.violations == 0);
}

TEST_CASE("campaigns are deterministic across worker counts") {
  const OptimizerConfig cfg = campaign_cfg(18);
  const CampaignSummary a = run_campaign("lemma1", "", 12, 1, cfg);
  const CampaignSummary b = run_campaign("lemma1", "", 12, 4, cfg);
  CHECK(summaries_equivalent(a, b));

  const CampaignSummary c = run_campaign("conjecture", "", 8, 1, cfg);
  const CampaignSummary d = run_campaign("conjecture", "", 8, 3, cfg);
  CHECK(summaries_equivalent(c, d));
}

TEST_CASE("campaign trials replay to the bit") {
  const OptimizerConfig cfg = campaign_cfg(19);
  std::vector<VerificationReport> reports;
  run_campaign("esq-cemi", "", 5, 2, cfg, ToleranceProfile::standard(), &reports);
  for (const VerificationReport& r : reports) {
    const VerificationReport again =
        run_campaign_trial("esq-cemi", "", cfg.seed, r.trial, cfg);
    CHECK(again.lhs == r.lhs);  // bitwise: same code path, same stream
    CHECK(again.rhs == r.rhs);
  }
}

TEST_CASE("violation reports embed reproduction data") {
  // Force a "violation" by running the conjecture margin at an absurd level:
  // any strictly positive slack becomes a candidate.
  CounterRng rng(20);
  const DensityMatrix rho = random_density(
      SystemLayout({{"A1", 2}, {"P1", 2}, {"A2", 2}, {"P2", 2}}), 0, rng);
  const std::vector<PartyPair> pairs{PartyPair{{"A1"}, {"P1"}},
                                     PartyPair{{"A2"}, {"P2"}}};
  VerificationReport r =
      check_conjecture_instance(rho, pairs, campaign_cfg(21), /*margin=*/-10.0);
  CHECK_FALSE(r.holds);  // margin forces candidacy
}

TEST_CASE("json round trip of reports and summaries") {
  VerificationReport r;
  r.check_id = "lemma1";
  r.lhs = 1.25;
  r.rhs = 1.0;
  r.slack = 0.25;
  r.holds = true;
  r.seed = 42;
  const Json j = report_to_json(r);
  CHECK(j["check_id"] == "lemma1");
  CHECK(j["slack"].get<double>() == doctest::Approx(0.25));

  CampaignSummary s;
  s.check_id = "lemma1";
  s.trials = 3;
  s.min_slack = 0.1;
  const Json sj = summary_to_json(s);
  CHECK(sj["trials"] == 3);
}

TEST_CASE("unknown checks are rejected") {
  CHECK_THROWS_AS(run_campaign("wat", "", 1, 1, campaign_cfg(22)), UnknownCheck);
}
