#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcorr/json_io.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/optimize.hpp"

namespace qcorr {

/// Machine-readable record of one inequality check. Reports are oriented so
/// that the claimed inequality is lhs >= rhs; holds <=> slack >= -tol.
struct VerificationReport {
  std::string check_id;
  std::string instance;  // human-readable instance descriptor
  std::size_t trial = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  bool holds = true;
  Json witnesses = Json::object();
  std::uint64_t seed = 0;
  double elapsed_seconds = 0.0;
};

struct CampaignSummary {
  std::string check_id;
  std::string ensemble;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_slack = 0.0;
  std::vector<VerificationReport> violation_reports;
};

/// Theorem-tier checks hard-fail a campaign; existential ones (the paper
/// only proves existence, or merely asks) report best-found slack.
enum class CheckTier { Theorem, Existential };

struct CheckInfo {
  std::string id;
  CheckTier tier;
  std::string default_ensemble;
  std::string claim;
};

const std::vector<CheckInfo>& known_checks();
const CheckInfo& check_info(const std::string& id);  // throws UnknownCheck

// ---------------------------------------------------------------------------
// Single-instance checkers
// ---------------------------------------------------------------------------

/// I(A;B|C) >= max(-ln F, 1/4 ||rho - R(rho_BC)||_1^2) with the best-found
/// recovery map; shortfalls are reported, never asserted.
VerificationReport check_fawzi_renner(
    const DensityMatrix& rho, const std::vector<std::string>& a,
    const std::vector<std::string>& b, const std::vector<std::string>& c,
    const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// gap >= [ 1/(2l) || rho - (R_1 x...x R_l)(rho_primes) ||_1 ]^2.
VerificationReport check_local_recoverability(
    const DensityMatrix& rho, const std::vector<PartyPair>& pairs,
    const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// All 2^l mask inequalities, one report per mask.
std::vector<VerificationReport> check_remark2_family(
    const DensityMatrix& rho, const std::vector<PartyPair>& pairs,
    const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// gap >= I(A_1:...:A_l | primes): a proved theorem, violations indicate
/// implementation bugs.
VerificationReport check_esq_le_cemi(
    const DensityMatrix& rho_ext, const std::vector<PartyPair>& pairs,
    const ToleranceProfile& tol = ToleranceProfile::standard());

struct EbChannelSpec {
  Povm povm;
  std::vector<DensityMatrix> preps;
};

/// (l+1) h2(eps/2) + eps sum ln|A_i| >= best-found discord, with
/// eps = || rho - (E_1 x...x E_l)(rho) ||_1 for the supplied EB channels.
/// The discord search is warm-started with the channels' own measurements,
/// which is the choice the proof makes.
VerificationReport check_prop1_forward(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const std::vector<EbChannelSpec>& ebs, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// 2 l sqrt(eps) >= || rho - (E_1 x...x E_l)(rho) ||_1 where eps is the
/// best-found discord and the EB channels are built from the proof's
/// reversal-after-recovery composition at the discord-optimal POVMs.
VerificationReport check_prop1_converse(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// (2/k) sum_extended |A_i|^2 >= separable-distance witness ub. When the ub
/// exceeds the bound the outcome is undecided (the witness overestimates),
/// recorded in the instance text.
VerificationReport check_definetti(
    const FeasibilityCertificate& cert, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// gap vs best-found -ln F over product rotated-Petz recoveries; a candidate
/// counterexample needs to survive a tightened re-verification pass.
VerificationReport check_conjecture_instance(
    const DensityMatrix& rho, const std::vector<PartyPair>& pairs,
    const OptimizerConfig& cfg, double margin = 1e-4,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// gap vs min-found D(rho || (R_1 x...x R_l)(rho_primes)) at n = 1
/// (exploratory: the paper's claim is regularized).
VerificationReport check_prop4_single_letter(
    const DensityMatrix& rho_ext, const std::vector<PartyPair>& pairs,
    const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

// ---------------------------------------------------------------------------
// Campaigns
// ---------------------------------------------------------------------------

/// Seeded random campaign over `trials` instances of a known check.
/// Deterministic for a given cfg.seed regardless of `workers`; violation
/// reports embed full reproduction data (state JSON + seed).
CampaignSummary run_campaign(
    const std::string& check_id, const std::string& ensemble, std::size_t trials,
    std::size_t workers, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard(),
    std::vector<VerificationReport>* all_reports = nullptr);

/// The conjecture explorer of the open question, preconfigured ensembles.
CampaignSummary explore_conjecture(
    const std::string& ensemble, std::size_t trials, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard(),
    std::vector<VerificationReport>* all_reports = nullptr);

/// One campaign trial, reproducible from (check, ensemble, seed, trial).
VerificationReport run_campaign_trial(
    const std::string& check_id, const std::string& ensemble,
    std::uint64_t campaign_seed, std::size_t trial, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

Json report_to_json(const VerificationReport& r);
Json summary_to_json(const CampaignSummary& s);
void write_reports_jsonl(const std::vector<VerificationReport>& reports,
                         const std::string& path);
void write_reports_csv(const std::vector<VerificationReport>& reports,
                       const std::string& path);

/// Equality of everything except wall-clock timing.
bool summaries_equivalent(const CampaignSummary& a, const CampaignSummary& b);

Json certificate_to_json(const FeasibilityCertificate& cert);

}  // namespace qcorr
