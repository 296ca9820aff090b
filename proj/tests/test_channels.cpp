#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcorr/errors.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/states_library.hpp"
#include "qcorr/tensor_ops.hpp"

using namespace qcorr;

namespace {

const double kLn2 = std::log(2.0);

DensityMatrix plus_state() {
  SystemLayout layout = SystemLayout::single("A", 2);
  std::vector<cplx> amps{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  return PureState::validated(layout, amps).density();
}

Povm z_povm(const std::string& label) {
  return Povm::projective(label, ComplexMatrix::identity(2));
}

DensityMatrix basis_state(const std::string& label, std::size_t dim, std::size_t x) {
  ComplexMatrix m(dim, dim);
  m(x, x) = 1.0;
  return DensityMatrix::validated(SystemLayout::single(label, dim), std::move(m));
}

}  // namespace

TEST_CASE("identity and depolarizing channels") {
  const DensityMatrix rho = plus_state();
  const Channel id = Channel::identity(rho.layout());
  CHECK((apply_channel(id, rho).matrix() - rho.matrix()).max_abs() < 1e-12);

  const Channel dep = Channel::depolarizing(rho.layout());
  const DensityMatrix out = apply_channel(dep, rho);
  CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.5));
  CHECK(std::abs(out.matrix()(0, 1)) < 1e-12);
}

TEST_CASE("channels are validated as trace preserving") {
  // A lone projector is not a channel.
  ComplexMatrix k(2, 2);
  k(0, 0) = 1.0;
  CHECK_THROWS_AS(Channel(SystemLayout::single("A", 2), SystemLayout::single("A", 2),
                          {k}),
                  LayoutMismatch);
}

TEST_CASE("measurement of |+> in the Z basis is uniform") {
  const DensityMatrix out = apply_channel(measurement_channel(z_povm("A")), plus_state());
  CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.5));
  CHECK(out.matrix()(1, 1).real() == doctest::Approx(0.5));
  CHECK(std::abs(out.matrix()(0, 1)) < 1e-12);
}

TEST_CASE("measuring an already classical state changes nothing") {
  SystemLayout layout = SystemLayout::single("A", 2);
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.3;
  m(1, 1) = 0.7;
  const DensityMatrix rho = DensityMatrix::validated(layout, std::move(m));
  const DensityMatrix out = apply_channel(measurement_channel(z_povm("A")), rho);
  CHECK((out.matrix() - rho.matrix()).max_abs() < 1e-12);
}

TEST_CASE("measuring one side of a Bell state leaves ln 2 of correlation") {
  // Two-outcome joint distribution (1/2, 1/2) on matching outcomes.
  const DensityMatrix measured =
      apply_channel(measurement_channel(z_povm("A")), named_state("bell", {}));
  const double i = multipartite_information(measured, {{"A"}, {"B"}});
  CHECK(i == doctest::Approx(kLn2).epsilon(1e-9));
}

TEST_CASE("the trivial one-effect POVM prepares a point outcome") {
  const Povm trivial("A", 2, {ComplexMatrix::identity(2)});
  const DensityMatrix out = apply_channel(measurement_channel(trivial), plus_state());
  CHECK(out.dim() == 1);
  CHECK(out.matrix()(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("isometric extension of a projective measurement records outcomes") {
  const IsometricExtension ext = isometric_extension(z_povm("A"));
  CHECK(ext.x_dim == 2);
  CHECK(ext.e_dim == 2);  // one spectral component per rank-1 effect
  CHECK(ext.isometry.rows() == 4);
  CHECK((ext.isometry.adjoint() * ext.isometry - ComplexMatrix::identity(2)).max_abs() <
        1e-10);
}

TEST_CASE("tracing the environment of an extension reproduces the measurement") {
  CounterRng rng(3);
  const DensityMatrix rho = random_density(SystemLayout::single("A", 2), 0, rng);

  // Both a projective POVM and the two-effect {I/2, I/2} POVM, whose
  // dilation needs a 4-dimensional environment.
  std::vector<Povm> povms;
  povms.push_back(Povm::projective("A", random_unitary(2, rng)));
  ComplexMatrix half = ComplexMatrix::identity(2);
  half *= cplx(0.5, 0.0);
  povms.emplace_back("A", 2, std::vector<ComplexMatrix>{half, half});

  for (const Povm& povm : povms) {
    const IsometricExtension ext = isometric_extension(povm);
    const DensityMatrix extended = apply_channel(ext.as_channel(), rho);
    const DensityMatrix traced = partial_trace(extended, {ext.x_label});
    const DensityMatrix measured = apply_channel(measurement_channel(povm), rho);
    CHECK((traced.matrix() - measured.matrix()).max_abs() < 1e-9);
  }
}

TEST_CASE("isometries preserve purity") {
  const IsometricExtension ext = isometric_extension(z_povm("A"));
  const DensityMatrix extended = apply_channel(ext.as_channel(), plus_state());
  CHECK(von_neumann_entropy(extended) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("reversal map inverts the extension on its range") {
  CounterRng rng(5);
  const Povm povm = Povm::projective("A", random_unitary(2, rng));
  const IsometricExtension ext = isometric_extension(povm);
  const Channel reversal = reversal_map(ext);

  const DensityMatrix rho = random_density(SystemLayout::single("A", 2), 0, rng);
  const DensityMatrix extended = apply_channel(ext.as_channel(), rho);
  const DensityMatrix back = apply_channel(reversal, extended);
  CHECK((back.matrix() - rho.matrix()).max_abs() < 1e-9);
}

TEST_CASE("reversal map prepares the fill state off the range") {
  const IsometricExtension ext = isometric_extension(z_povm("A"));
  // |0>_X |1>_E is orthogonal to the range of U = sum_x |x>|x><x|.
  SystemLayout xe({{ext.x_label, ext.x_dim}, {ext.e_label, ext.e_dim}});
  ComplexMatrix m(4, 4);
  m(1, 1) = 1.0;
  const DensityMatrix off_range = DensityMatrix::validated(xe, std::move(m));

  const DensityMatrix fill = basis_state("A", 2, 1);
  const Channel reversal = reversal_map(ext, fill);
  const DensityMatrix out = apply_channel(reversal, off_range);
  CHECK((out.matrix() - fill.matrix()).max_abs() < 1e-9);
}

TEST_CASE("petz recovery of a product state appends the marginal") {
  CounterRng rng(7);
  const DensityMatrix a = random_density(SystemLayout::single("A", 2), 0, rng);
  const DensityMatrix c = random_density(SystemLayout::single("C", 2), 0, rng);
  const DensityMatrix joint = tensor(a, c);

  const Channel recovery = petz_recovery(joint, {"C"}, 0.0);
  const DensityMatrix recovered = apply_channel(recovery, c);
  CHECK(fidelity(joint, recovered) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("petz recovery is exact on a classical Markov chain") {
  SystemLayout layout({{"A", 2}, {"B", 2}, {"C", 2}});
  const DensityMatrix rho =
      classical_state({0.5, 0, 0, 0, 0, 0, 0, 0.5},
                      SystemLayout({{"A", 2}, {"B", 2}, {"C", 2}}));
  CHECK(conditional_mutual_information(rho, {"A"}, {"B"}, {"C"}) ==
        doctest::Approx(0.0).epsilon(1e-10));

  const DensityMatrix rho_ac = partial_trace(rho, {"A", "C"});
  const Channel recovery = petz_recovery(rho_ac, {"C"}, 0.0);
  const DensityMatrix rho_bc = partial_trace(rho, {"B", "C"});
  const DensityMatrix recovered = apply_channel(recovery, rho_bc);
  CHECK(fidelity(rho, recovered) >= 1.0 - 1e-8);
}

TEST_CASE("petz recovery keeps the marginal when fed the exact input") {
  CounterRng rng(9);
  for (double t : {0.0, 1.7}) {
    const DensityMatrix rho_ac =
        random_density(SystemLayout({{"A", 2}, {"C", 2}}), 0, rng);
    const Channel recovery = petz_recovery(rho_ac, {"C"}, t);
    const DensityMatrix rho_c = partial_trace(rho_ac, {"C"});
    const DensityMatrix out = apply_channel(recovery, rho_c);
    CHECK((partial_trace(out, {"C"}).matrix() - rho_c.matrix()).max_abs() < 1e-8);
  }
}

TEST_CASE("petz recovery validates inputs") {
  CounterRng rng(11);
  const DensityMatrix rho = random_density(SystemLayout({{"A", 2}, {"C", 2}}), 0, rng);
  CHECK_THROWS_AS(petz_recovery(rho, {"A", "C"}, 0.0), LayoutMismatch);
  CHECK_THROWS_AS(petz_recovery(rho, {"C"}, std::nan("")), DomainError);
}

TEST_CASE("eb channel with basis preps dephases") {
  const std::vector<DensityMatrix> preps{basis_state("A", 2, 0), basis_state("A", 2, 1)};
  const Channel dephase = eb_channel(z_povm("A"), preps);

  // Fixes classical states.
  SystemLayout layout = SystemLayout::single("A", 2);
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.2;
  m(1, 1) = 0.8;
  const DensityMatrix classical = DensityMatrix::validated(layout, std::move(m));
  CHECK((apply_channel(dephase, classical).matrix() - classical.matrix()).max_abs() <
        1e-10);

  // Decohere a Bell state on A.
  const DensityMatrix bell = named_state("bell", {});
  const DensityMatrix out = apply_channel(dephase, bell);
  CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.5));
  CHECK(out.matrix()(3, 3).real() == doctest::Approx(0.5));
  CHECK(std::abs(out.matrix()(0, 3)) < 1e-12);
}

TEST_CASE("eb channel with identical preps is constant") {
  CounterRng rng(13);
  const DensityMatrix target = random_density(SystemLayout::single("A", 2), 0, rng);
  const Channel constant = eb_channel(z_povm("A"), {target, target});
  const DensityMatrix out = apply_channel(constant, plus_state());
  CHECK((out.matrix() - target.matrix()).max_abs() < 1e-10);
}

TEST_CASE("eb channel arity is enforced") {
  CHECK_THROWS_AS(eb_channel(z_povm("A"), {basis_state("A", 2, 0)}), ArityMismatch);
}

TEST_CASE("data processing holds for random channels") {
  CounterRng rng(15);
  SystemLayout in = SystemLayout::single("A", 3);
  for (int rep = 0; rep < 5; ++rep) {
    const DensityMatrix rho = random_density(in, 0, rng);
    const DensityMatrix sigma = random_density(in, 0, rng);
    const Channel n = channel_from_isometry(random_isometry(3 * 2, 3, rng), in,
                                            SystemLayout::single("A", 3), 2);
    const double before = relative_entropy(rho, sigma);
    const double after = relative_entropy(apply_channel(n, rho), apply_channel(n, sigma));
    CHECK(before - after >= -1e-9);

    const double td_before = trace_distance(rho, sigma);
    const double td_after = trace_distance(apply_channel(n, rho), apply_channel(n, sigma));
    CHECK(td_before - td_after >= -1e-9);
  }
}

TEST_CASE("channel application pads untouched subsystems") {
  CounterRng rng(17);
  const DensityMatrix rho = random_density(SystemLayout({{"A", 2}, {"B", 2}}), 0, rng);
  const Channel dep = Channel::depolarizing(SystemLayout::single("A", 2));
  const DensityMatrix out = apply_channel(dep, rho);
  // B marginal untouched, A maximally mixed.
  CHECK((partial_trace(out, {"B"}).matrix() - partial_trace(rho, {"B"}).matrix())
            .max_abs() < 1e-10);
  CHECK(partial_trace(out, {"A"}).matrix()(0, 0).real() == doctest::Approx(0.5));
  CHECK_THROWS_AS(apply_channel(Channel::depolarizing(SystemLayout::single("Z", 2)), rho),
                  LayoutMismatch);
}

TEST_CASE("povm validation") {
  ComplexMatrix not_psd(2, 2);
  not_psd(0, 0) = 1.5;
  not_psd(1, 1) = -0.5;
  ComplexMatrix rest = ComplexMatrix::identity(2) - not_psd;
  CHECK_THROWS_AS(Povm("A", 2, {not_psd, rest}), InvalidPovm);

  ComplexMatrix short_sum(2, 2);
  short_sum(0, 0) = 1.0;
  CHECK_THROWS_AS(Povm("A", 2, {short_sum}), InvalidPovm);
}
