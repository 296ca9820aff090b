#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcorr/rng.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

/// Diagonal state with the given joint distribution over the product basis
/// of `layout` (row-major outcome order).
DensityMatrix classical_state(const std::vector<double>& dist,
                              const SystemLayout& layout);

/// sum_z w(z) tau^1_z (x) ... (x) tau^l_z. Every row of `product_factors`
/// holds one state per party, all rows on identical per-party layouts.
DensityMatrix separable_state(
    const std::vector<double>& weights,
    const std::vector<std::vector<DensityMatrix>>& product_factors);

/// The flag extension of the separable state above: the mixture index is
/// recorded in a classical register next to each party,
/// sum_z w(z) tau^1_z (x) |z><z|_{f_1} (x) ... (x) tau^l_z (x) |z><z|_{f_l}.
DensityMatrix flag_extension(
    const std::vector<double>& weights,
    const std::vector<std::vector<DensityMatrix>>& product_factors,
    const std::vector<std::string>& flag_labels);

/// Textbook states: ghz, w, bell (kind=phi+|psi-), werner (p), isotropic
/// (p, d), mixed (dims), classical (dims, probs).
DensityMatrix named_state(const std::string& name,
                          const std::map<std::string, std::string>& params);

enum class Ensemble { HaarPure, TracedPure };

/// Deterministic sampling from unitarily invariant ensembles. For
/// TracedPure, `env_dim` 0 means an environment as large as the system.
DensityMatrix random_state(Ensemble ensemble, const SystemLayout& layout,
                           std::uint64_t seed, std::size_t env_dim = 0);

PureState random_pure_state(const SystemLayout& layout, CounterRng& rng);
DensityMatrix random_density(const SystemLayout& layout, std::size_t env_dim,
                             CounterRng& rng);

std::vector<cplx> random_unit_vector(std::size_t dim, CounterRng& rng);
ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, CounterRng& rng);
/// Haar unitary via Gram-Schmidt of a Ginibre matrix.
ComplexMatrix random_unitary(std::size_t dim, CounterRng& rng);
ComplexMatrix random_hermitian(std::size_t dim, CounterRng& rng);
/// Isometry with cols <= rows, Haar-distributed range.
ComplexMatrix random_isometry(std::size_t rows, std::size_t cols, CounterRng& rng);

/// Orthonormalizes the columns of m in place (modified Gram-Schmidt with one
/// re-orthogonalization pass). Throws DomainError on rank deficiency.
ComplexMatrix orthonormalized_columns(const ComplexMatrix& m);

/// State construction from the CLI URI scheme:
///   builtin:ghz?n=3   builtin:werner?p=0.9   random:traced?dims=2,2&env=4&seed=42
///   file:path.json
DensityMatrix state_from_uri(const std::string& uri);

/// Split "scheme:name?k=v&k2=v2" into its parts. For "file:..." URIs the
/// remainder is kept verbatim in `name`.
struct ParsedUri {
  std::string scheme;
  std::string name;
  std::map<std::string, std::string> params;
};
ParsedUri parse_uri(const std::string& uri);

}  // namespace qcorr
