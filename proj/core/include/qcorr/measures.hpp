#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/channel.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

/// All quantities below are in nats (natural logarithm throughout).

double von_neumann_entropy(const DensityMatrix& rho,
                           const ToleranceProfile& tol = ToleranceProfile::standard());

/// Memoized entropies of label subsets of one state. Subsets are keyed by
/// sorted label set; the empty set has entropy 0.
class SubsetEntropies {
public:
  explicit SubsetEntropies(const DensityMatrix& rho,
                           const ToleranceProfile& tol = ToleranceProfile::standard())
      : rho_(rho), tol_(tol) {}
  double operator()(std::vector<std::string> labels);

private:
  const DensityMatrix& rho_;
  ToleranceProfile tol_;
  std::map<std::vector<std::string>, double> cache_;
};

/// Tr{rho (ln rho - ln sigma)}; +infinity when supp(rho) is not contained
/// in supp(sigma). Layouts must carry the same labels (order is aligned).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        const ToleranceProfile& tol = ToleranceProfile::standard());

/// Uhlmann fidelity || sqrt(omega) sqrt(tau) ||_1^2 in [0, 1].
double fidelity(const DensityMatrix& omega, const DensityMatrix& tau,
                const ToleranceProfile& tol = ToleranceProfile::standard());

double trace_distance(const DensityMatrix& omega, const DensityMatrix& tau);

/// sum_i H(part_i) - H(whole). `parts` must partition the layout labels;
/// empty parts are allowed and contribute zero.
double multipartite_information(const DensityMatrix& rho,
                                const std::vector<std::vector<std::string>>& parts,
                                const ToleranceProfile& tol = ToleranceProfile::standard());

/// I(A;B|C) = H(AC) + H(BC) - H(C) - H(ABC). Labels outside a,b,c are
/// traced out first; c may be empty.
double conditional_mutual_information(
    const DensityMatrix& rho, const std::vector<std::string>& a,
    const std::vector<std::string>& b, const std::vector<std::string>& c,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// sum_i H(A_i|E) - H(A_1...A_l|E).
double conditional_multipartite_information(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const std::vector<std::string>& e,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// One (A_i, A_i') block of an extended state; either side may be empty,
/// but not both.
struct PartyPair {
  std::vector<std::string> a;
  std::vector<std::string> prime;
};

/// I(A_1 A_1' : ... : A_l A_l') - I(A_1' : ... : A_l'). Pairs must cover the
/// layout exactly.
double gap(const DensityMatrix& rho, const std::vector<PartyPair>& pairs,
           const ToleranceProfile& tol = ToleranceProfile::standard());

/// The chain expansion of the gap into per-party conditional mutual
/// informations; the total matches the gap for every decode order.
struct GapExpansion {
  std::vector<std::size_t> order;                    // party indices
  std::vector<std::pair<std::size_t, double>> terms; // (party, CMI in nats)
  double total = 0.0;
};

GapExpansion chain_gap_expansion(
    const DensityMatrix& rho, const std::vector<PartyPair>& pairs,
    const std::vector<std::size_t>& order,
    const ToleranceProfile& tol = ToleranceProfile::standard(),
    SubsetEntropies* cache = nullptr);

/// Per-round quantum communication rates of partial state distribution:
/// the chain terms in decode order, and half their sum as the total rate.
struct PsdRates {
  std::vector<double> per_round;
  double total = 0.0;       // the information gap
  double total_rate = 0.0;  // total / 2
};

PsdRates psd_rates(const PureState& phi, const std::vector<PartyPair>& pairs,
                   const std::vector<std::size_t>& order,
                   const ToleranceProfile& tol = ToleranceProfile::standard());

/// Both sides of the information-drop identity under local measurements:
/// lhs on the measured state, rhs on its isometric extension. Parties with
/// no POVM are left unmeasured. Measured parties must be single-label.
struct DiscordAsCmi {
  double lhs = 0.0;
  double rhs = 0.0;
};

DiscordAsCmi unoptimized_discord_as_cmi(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const std::vector<std::optional<Povm>>& povms,
    const ToleranceProfile& tol = ToleranceProfile::standard());

double binary_entropy(double eps);

/// (l+1) h2(eps/2) + eps * sum_i ln(dim_i)
double msq_discord_upper_bound(double eps, const std::vector<std::size_t>& dims);

/// T ln(d-1) + h2(T)
double fannes_audenaert_bound(double t, std::size_t d);

struct DimensionBoundSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = I(C_1 D_1 : ... : C_l D_l), rhs = I(C_1 : ... : C_l) +
/// 2 sum_i ln|D_i|.
DimensionBoundSides dimension_bound_check(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& c_parts,
    const std::vector<std::vector<std::string>>& d_parts,
    const ToleranceProfile& tol = ToleranceProfile::standard());

}  // namespace qcorr
