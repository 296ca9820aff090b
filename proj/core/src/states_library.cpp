#include "qcorr/states_library.hpp"

#include <cmath>
#include <sstream>

#include "qcorr/errors.hpp"
#include "qcorr/json_io.hpp"
#include "qcorr/tensor_ops.hpp"

namespace qcorr {

namespace {

SystemLayout party_layout(const std::vector<std::string>& labels,
                          const std::vector<std::size_t>& dims) {
  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < labels.size(); ++i) subs.push_back({labels[i], dims[i]});
  return SystemLayout(std::move(subs));
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("A" + std::to_string(i + 1));
  return out;
}

void check_distribution(const std::vector<double>& w) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= -1e-15)) throw NotNormalized("negative weight");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw NotNormalized("weights sum to " + std::to_string(total));
}

DensityMatrix pure_from_amplitudes(SystemLayout layout, std::vector<cplx> amps) {
  return PureState::validated(std::move(layout), std::move(amps)).density();
}

double get_param(const std::map<std::string, std::string>& params,
                 const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  return std::stod(it->second);
}

std::vector<std::size_t> parse_dims(const std::string& csv) {
  std::vector<std::size_t> dims;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const long v = std::stol(tok);
    if (v < 1) throw ParseError("dimension must be >= 1, got " + tok);
    dims.push_back(static_cast<std::size_t>(v));
  }
  if (dims.empty()) throw ParseError("empty dims list");
  return dims;
}

std::vector<double> parse_probs(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

DensityMatrix classical_state(const std::vector<double>& dist,
                              const SystemLayout& layout) {
  if (dist.size() != layout.total_dim())
    throw LayoutMismatch("distribution over " + std::to_string(dist.size()) +
                         " outcomes on a " + std::to_string(layout.total_dim()) +
                         "-dimensional layout");
  check_distribution(dist);
  ComplexMatrix m(dist.size(), dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) m(i, i) = std::max(0.0, dist[i]);
  return DensityMatrix::trusted(layout, std::move(m));
}

DensityMatrix separable_state(
    const std::vector<double>& weights,
    const std::vector<std::vector<DensityMatrix>>& product_factors) {
  if (weights.size() != product_factors.size() || weights.empty())
    throw ArityMismatch("one factor row per weight required");
  check_distribution(weights);
  const std::size_t parties = product_factors[0].size();
  for (const auto& row : product_factors) {
    if (row.size() != parties) throw ArityMismatch("ragged factor rows");
    for (std::size_t i = 0; i < parties; ++i)
      if (!(row[i].layout() == product_factors[0][i].layout()))
        throw LayoutMismatch("factor layouts differ across terms");
  }

  DensityMatrix acc;
  bool first = true;
  for (std::size_t z = 0; z < weights.size(); ++z) {
    DensityMatrix term = product_factors[z][0];
    for (std::size_t i = 1; i < parties; ++i) term = tensor(term, product_factors[z][i]);
    ComplexMatrix scaled = term.matrix();
    scaled *= cplx(weights[z], 0.0);
    if (first) {
      acc = DensityMatrix::trusted(term.layout(), std::move(scaled));
      first = false;
    } else {
      ComplexMatrix sum = acc.matrix();
      sum += scaled;
      acc = DensityMatrix::trusted(acc.layout(), std::move(sum));
    }
  }
  return acc;
}

DensityMatrix flag_extension(
    const std::vector<double>& weights,
    const std::vector<std::vector<DensityMatrix>>& product_factors,
    const std::vector<std::string>& flag_labels) {
  if (product_factors.empty()) throw ArityMismatch("no terms");
  const std::size_t parties = product_factors[0].size();
  if (flag_labels.size() != parties)
    throw ArityMismatch("one flag label per party required");
  const std::size_t terms = weights.size();

  // Rebuild each term with |z><z| flags interleaved after each party.
  std::vector<std::vector<DensityMatrix>> extended(terms);
  for (std::size_t z = 0; z < terms; ++z) {
    if (product_factors[z].size() != parties) throw ArityMismatch("ragged factor rows");
    for (std::size_t i = 0; i < parties; ++i) {
      ComplexMatrix flag(terms, terms);
      flag(z, z) = 1.0;
      DensityMatrix flag_state = DensityMatrix::trusted(
          SystemLayout::single(flag_labels[i], terms), std::move(flag));
      extended[z].push_back(product_factors[z][i]);
      extended[z].push_back(std::move(flag_state));
    }
  }
  return separable_state(weights, extended);
}

DensityMatrix named_state(const std::string& name,
                          const std::map<std::string, std::string>& params) {
  if (name == "ghz") {
    const std::size_t n = static_cast<std::size_t>(get_param(params, "n", 3));
    const std::size_t d = static_cast<std::size_t>(get_param(params, "d", 2));
    if (n < 1 || d < 2) throw DomainError("ghz needs n >= 1, d >= 2");
    std::vector<std::size_t> dims(n, d);
    SystemLayout layout = party_layout(default_labels(n), dims);
    std::vector<cplx> amps(layout.total_dim(), 0.0);
    for (std::size_t m = 0; m < d; ++m) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < n; ++i) idx = idx * d + m;
      amps[idx] = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return pure_from_amplitudes(std::move(layout), std::move(amps));
  }
  if (name == "w") {
    const std::size_t n = static_cast<std::size_t>(get_param(params, "n", 3));
    if (n < 2) throw DomainError("w needs n >= 2");
    SystemLayout layout = party_layout(default_labels(n), std::vector<std::size_t>(n, 2));
    std::vector<cplx> amps(layout.total_dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      amps[std::size_t(1) << (n - 1 - i)] = 1.0 / std::sqrt(static_cast<double>(n));
    return pure_from_amplitudes(std::move(layout), std::move(amps));
  }
  if (name == "bell") {
    const std::string kind =
        params.count("kind") ? params.at("kind") : std::string("phi+");
    SystemLayout layout({{"A", 2}, {"B", 2}});
    std::vector<cplx> amps(4, 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    if (kind == "phi+") {
      amps[0] = r;  // |00>
      amps[3] = r;  // |11>
    } else if (kind == "psi-") {
      amps[1] = r;   // |01>
      amps[2] = -r;  // |10>
    } else {
      throw UnknownName("bell kind '" + kind + "'");
    }
    return pure_from_amplitudes(std::move(layout), std::move(amps));
  }
  if (name == "werner") {
    const double p = get_param(params, "p", 0.5);
    if (p < 0.0 || p > 1.0) throw DomainError("werner p out of [0,1]");
    DensityMatrix singlet = named_state("bell", {{"kind", "psi-"}});
    ComplexMatrix m = singlet.matrix();
    m *= cplx(p, 0.0);
    for (std::size_t i = 0; i < 4; ++i) m(i, i) += (1.0 - p) / 4.0;
    return DensityMatrix::trusted(singlet.layout(), std::move(m));
  }
  if (name == "isotropic") {
    const double p = get_param(params, "p", 0.5);
    const std::size_t d = static_cast<std::size_t>(get_param(params, "d", 2));
    if (p < 0.0 || p > 1.0) throw DomainError("isotropic p out of [0,1]");
    SystemLayout layout({{"A", d}, {"B", d}});
    std::vector<cplx> amps(d * d, 0.0);
    for (std::size_t m = 0; m < d; ++m) amps[m * d + m] = 1.0 / std::sqrt(double(d));
    ComplexMatrix mat = pure_from_amplitudes(layout, std::move(amps)).matrix();
    mat *= cplx(p, 0.0);
    for (std::size_t i = 0; i < d * d; ++i)
      mat(i, i) += (1.0 - p) / static_cast<double>(d * d);
    return DensityMatrix::trusted(std::move(layout), std::move(mat));
  }
  if (name == "mixed") {
    const std::vector<std::size_t> dims =
        params.count("dims") ? parse_dims(params.at("dims"))
                             : std::vector<std::size_t>{2};
    SystemLayout layout = party_layout(default_labels(dims.size()), dims);
    ComplexMatrix m(layout.total_dim(), layout.total_dim());
    for (std::size_t i = 0; i < layout.total_dim(); ++i)
      m(i, i) = 1.0 / static_cast<double>(layout.total_dim());
    return DensityMatrix::trusted(std::move(layout), std::move(m));
  }
  if (name == "classical") {
    if (!params.count("dims") || !params.count("probs"))
      throw ParseError("classical needs dims= and probs=");
    const std::vector<std::size_t> dims = parse_dims(params.at("dims"));
    SystemLayout layout = party_layout(default_labels(dims.size()), dims);
    return classical_state(parse_probs(params.at("probs")), layout);
  }
  throw UnknownName("'" + name + "'");
}

std::vector<cplx> random_unit_vector(std::size_t dim, CounterRng& rng) {
  std::vector<cplx> v(dim);
  double norm2 = 0.0;
  for (cplx& a : v) {
    a = cplx(rng.next_gaussian(), rng.next_gaussian());
    norm2 += std::norm(a);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (cplx& a : v) a *= inv;
  return v;
}

ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, CounterRng& rng) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = cplx(rng.next_gaussian(), rng.next_gaussian());
  return m;
}

ComplexMatrix orthonormalized_columns(const ComplexMatrix& m) {
  ComplexMatrix q = m;
  const std::size_t rows = q.rows(), cols = q.cols();
  if (cols > rows) throw DimensionMismatch("more columns than rows");
  for (std::size_t j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx proj = 0.0;
        for (std::size_t i = 0; i < rows; ++i) proj += std::conj(q(i, k)) * q(i, j);
        for (std::size_t i = 0; i < rows; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm2 += std::norm(q(i, j));
    if (norm2 < 1e-24) throw DomainError("rank-deficient column set");
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < rows; ++i) q(i, j) *= inv;
  }
  return q;
}

ComplexMatrix random_unitary(std::size_t dim, CounterRng& rng) {
  return orthonormalized_columns(random_ginibre(dim, dim, rng));
}

ComplexMatrix random_hermitian(std::size_t dim, CounterRng& rng) {
  ComplexMatrix g = random_ginibre(dim, dim, rng);
  return g.symmetrized();
}

ComplexMatrix random_isometry(std::size_t rows, std::size_t cols, CounterRng& rng) {
  return orthonormalized_columns(random_ginibre(rows, cols, rng));
}

PureState random_pure_state(const SystemLayout& layout, CounterRng& rng) {
  return PureState::validated(layout, random_unit_vector(layout.total_dim(), rng));
}

DensityMatrix random_density(const SystemLayout& layout, std::size_t env_dim,
                             CounterRng& rng) {
  const std::size_t n = layout.total_dim();
  if (env_dim == 0) env_dim = n;
  // psi is the amplitude matrix of a pure state on system (x) environment;
  // tracing the environment gives psi psi^dag.
  ComplexMatrix psi = random_ginibre(n, env_dim, rng);
  double norm2 = 0.0;
  for (const cplx& z : psi.entries()) norm2 += std::norm(z);
  psi *= cplx(1.0 / std::sqrt(norm2), 0.0);
  ComplexMatrix rho = psi * psi.adjoint();
  return DensityMatrix::trusted(layout, rho.symmetrized());
}

DensityMatrix random_state(Ensemble ensemble, const SystemLayout& layout,
                           std::uint64_t seed, std::size_t env_dim) {
  CounterRng rng(seed);
  switch (ensemble) {
    case Ensemble::HaarPure:
      return random_pure_state(layout, rng).density();
    case Ensemble::TracedPure:
      return random_density(layout, env_dim, rng);
  }
  throw DomainError("unhandled ensemble");
}

ParsedUri parse_uri(const std::string& uri) {
  ParsedUri out;
  const std::size_t colon = uri.find(':');
  if (colon == std::string::npos) throw ParseError("URI missing scheme: " + uri);
  out.scheme = uri.substr(0, colon);
  std::string rest = uri.substr(colon + 1);
  if (out.scheme == "file") {
    out.name = rest;
    return out;
  }
  const std::size_t qmark = rest.find('?');
  out.name = rest.substr(0, qmark == std::string::npos ? rest.size() : qmark);
  if (qmark != std::string::npos) {
    std::stringstream ss(rest.substr(qmark + 1));
    std::string pair;
    while (std::getline(ss, pair, '&')) {
      const std::size_t eq = pair.find('=');
      if (eq == std::string::npos) throw ParseError("malformed query '" + pair + "'");
      out.params[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
  }
  return out;
}

DensityMatrix state_from_uri(const std::string& uri) {
  const ParsedUri p = parse_uri(uri);
  if (p.scheme == "builtin") return named_state(p.name, p.params);
  if (p.scheme == "random") {
    if (!p.params.count("dims")) throw ParseError("random state needs dims=");
    const std::vector<std::size_t> dims = parse_dims(p.params.at("dims"));
    SystemLayout layout = party_layout(default_labels(dims.size()), dims);
    const std::uint64_t seed =
        p.params.count("seed") ? std::stoull(p.params.at("seed")) : 0;
    if (p.name == "pure" || p.name == "haar")
      return random_state(Ensemble::HaarPure, layout, seed);
    if (p.name == "traced") {
      const std::size_t env = p.params.count("env")
                                  ? std::stoul(p.params.at("env"))
                                  : 0;
      return random_state(Ensemble::TracedPure, layout, seed, env);
    }
    throw UnknownName("random ensemble '" + p.name + "'");
  }
  if (p.scheme == "file") return load_state_json(p.name);
  throw ParseError("unknown URI scheme '" + p.scheme + "'");
}

}  // namespace qcorr
