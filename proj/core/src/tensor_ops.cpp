#include "qcorr/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qcorr/eig.hpp"
#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

// Mixed-radix offsets into the full composite index for the subsystems at
// `positions`: offsets[m] = full-index contribution of sub-state m, where m
// runs over the positions' joint basis in the order given.
std::vector<std::size_t> block_offsets(const SystemLayout& layout,
                                       const std::vector<std::size_t>& positions) {
  std::size_t block_dim = 1;
  for (std::size_t p : positions) block_dim *= layout.subsystems()[p].dim;
  std::vector<std::size_t> offsets(block_dim, 0);
  for (std::size_t m = 0; m < block_dim; ++m) {
    std::size_t rest = m;
    for (std::size_t i = positions.size(); i-- > 0;) {
      const std::size_t p = positions[i];
      const std::size_t d = layout.subsystems()[p].dim;
      offsets[m] += (rest % d) * layout.strides()[p];
      rest /= d;
    }
  }
  return offsets;
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::string>& keep) {
  if (keep.empty()) throw UnknownLabel("partial_trace with empty keep set");
  std::set<std::string> keep_set;
  for (const std::string& l : keep) {
    rho.layout().position(l);  // throws UnknownLabel
    if (!keep_set.insert(l).second)
      throw LabelCollision("duplicate keep label '" + l + "'");
  }

  std::vector<std::size_t> kept_pos, traced_pos;
  std::vector<Subsystem> kept_subs;
  for (std::size_t p = 0; p < rho.layout().size(); ++p) {
    const Subsystem& s = rho.layout().subsystems()[p];
    if (keep_set.count(s.label)) {
      kept_pos.push_back(p);
      kept_subs.push_back(s);
    } else {
      traced_pos.push_back(p);
    }
  }
  const std::vector<std::size_t> ko = block_offsets(rho.layout(), kept_pos);
  const std::vector<std::size_t> to = block_offsets(rho.layout(), traced_pos);

  ComplexMatrix out(ko.size(), ko.size());
  const ComplexMatrix& in = rho.matrix();
  for (std::size_t i = 0; i < ko.size(); ++i)
    for (std::size_t j = 0; j < ko.size(); ++j) {
      cplx s = 0.0;
      for (std::size_t t : to) s += in(ko[i] + t, ko[j] + t);
      out(i, j) = s;
    }
  return DensityMatrix::trusted(SystemLayout(std::move(kept_subs)),
                                std::move(out));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::trusted(concat(a.layout(), b.layout()),
                                kron(a.matrix(), b.matrix()));
}

DensityMatrix permute_subsystems(
    const DensityMatrix& rho,
    const std::vector<std::pair<std::string, std::string>>& perm) {
  const SystemLayout& layout = rho.layout();
  std::set<std::string> domain, image;
  for (const auto& [from, to] : perm) {
    layout.position(from);
    layout.position(to);
    if (!domain.insert(from).second)
      throw LabelCollision("label '" + from + "' mapped twice");
    if (!image.insert(to).second)
      throw LabelCollision("label '" + to + "' is the image of two labels");
    if (layout.dim_of(from) != layout.dim_of(to))
      throw DimensionMismatch("permuting '" + from + "' into '" + to +
                              "' with different dimensions");
  }
  if (domain != image)
    throw UnknownLabel("permutation must map a label set onto itself");

  // dest[p] = position receiving the content of position p
  std::vector<std::size_t> dest(layout.size());
  std::iota(dest.begin(), dest.end(), 0);
  for (const auto& [from, to] : perm)
    dest[layout.position(from)] = layout.position(to);

  const std::size_t n = layout.total_dim();
  std::vector<std::size_t> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::size_t> d = layout.digits_of(i);
    std::vector<std::size_t> nd(d.size());
    for (std::size_t p = 0; p < d.size(); ++p) nd[dest[p]] = d[p];
    sigma[i] = layout.index_of(nd);
  }
  ComplexMatrix out(n, n);
  const ComplexMatrix& in = rho.matrix();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(sigma[i], sigma[j]) = in(i, j);
  return DensityMatrix::trusted(layout, std::move(out));
}

DensityMatrix symmetrize_copies(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& groups) {
  std::set<std::string> seen;
  for (const auto& group : groups)
    for (const std::string& l : group)
      if (!seen.insert(l).second)
        throw OverlappingSets("label '" + l + "' appears in two groups");

  DensityMatrix current = rho;
  for (const auto& group : groups) {
    if (group.empty()) continue;
    const std::size_t k = group.size();
    if (k > 6)
      throw DimensionGuard("symmetrize_copies enumerates k! permutations; k=" +
                           std::to_string(k) + " > 6 refused");
    const std::size_t d0 = current.layout().dim_of(group[0]);
    for (const std::string& l : group)
      if (current.layout().dim_of(l) != d0)
        throw DimensionMismatch("group members must share one dimension");
    if (k == 1) continue;

    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    ComplexMatrix acc(current.dim(), current.dim());
    std::size_t count = 0;
    do {
      std::vector<std::pair<std::string, std::string>> perm;
      for (std::size_t i = 0; i < k; ++i) perm.emplace_back(group[i], group[idx[i]]);
      acc += permute_subsystems(current, perm).matrix();
      ++count;
    } while (std::next_permutation(idx.begin(), idx.end()));
    acc *= cplx(1.0 / static_cast<double>(count), 0.0);
    current = DensityMatrix::trusted(current.layout(), std::move(acc));
  }
  return current;
}

PureState purify(const DensityMatrix& rho, const std::string& ref_label,
                 const ToleranceProfile& tol) {
  if (rho.layout().has_label(ref_label))
    throw LabelCollision("reference label '" + ref_label + "' already in layout");
  const HermitianEig eig = hermitian_eig(rho.matrix(), tol.hermiticity);
  const double cutoff = default_support_cutoff(eig.eigenvalues);

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues[i] > cutoff) support.push_back(i);
  if (support.empty()) throw InvalidState("state has empty support");
  const std::size_t rank = support.size();

  const std::size_t n = rho.dim();
  std::vector<cplx> amps(n * rank, cplx(0.0, 0.0));
  double norm2 = 0.0;
  for (std::size_t r = 0; r < rank; ++r) {
    const double w = std::sqrt(eig.eigenvalues[support[r]]);
    for (std::size_t s = 0; s < n; ++s) {
      amps[s * rank + r] = w * eig.eigenvectors(s, support[r]);
      norm2 += std::norm(amps[s * rank + r]);
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (cplx& a : amps) a *= inv;

  return PureState::validated(
      concat(rho.layout(), SystemLayout::single(ref_label, rank)),
      std::move(amps), tol);
}

SystemLayout lifted_layout(const SystemLayout& space,
                           const std::vector<std::string>& in_labels,
                           const SystemLayout& out_subs) {
  std::set<std::string> in_set(in_labels.begin(), in_labels.end());
  if (in_set.size() != in_labels.size())
    throw LabelCollision("duplicate label in channel input");
  for (const std::string& l : in_labels) space.position(l);

  const std::size_t first_pos =
      in_labels.empty() ? space.size() : [&] {
        std::size_t p = space.size();
        for (const std::string& l : in_labels)
          p = std::min(p, space.position(l));
        return p;
      }();

  std::vector<Subsystem> subs;
  for (std::size_t p = 0; p < space.size(); ++p) {
    const Subsystem& s = space.subsystems()[p];
    if (p == first_pos)
      for (const Subsystem& o : out_subs.subsystems()) subs.push_back(o);
    if (!in_set.count(s.label)) {
      for (const Subsystem& o : out_subs.subsystems())
        if (o.label == s.label)
          throw LabelCollision("channel output label '" + o.label +
                               "' collides with untouched subsystem");
      subs.push_back(s);
    }
  }
  if (first_pos == space.size())
    for (const Subsystem& o : out_subs.subsystems()) subs.push_back(o);
  return SystemLayout(std::move(subs));
}

LiftedOperator lift_operator(const ComplexMatrix& op, const SystemLayout& space,
                             const std::vector<std::string>& in_labels,
                             const SystemLayout& out_subs) {
  SystemLayout out_layout = lifted_layout(space, in_labels, out_subs);

  std::size_t in_sub_dim = 1;
  std::vector<std::size_t> in_pos;
  for (const std::string& l : in_labels) {
    in_pos.push_back(space.position(l));
    in_sub_dim *= space.dim_of(l);
  }
  if (op.cols() != in_sub_dim || op.rows() != out_subs.total_dim())
    throw LayoutMismatch("operator block is " + std::to_string(op.rows()) +
                         "x" + std::to_string(op.cols()) + ", expected " +
                         std::to_string(out_subs.total_dim()) + "x" +
                         std::to_string(in_sub_dim));

  std::set<std::string> in_set(in_labels.begin(), in_labels.end());
  std::vector<std::size_t> untouched_pos;
  for (std::size_t p = 0; p < space.size(); ++p)
    if (!in_set.count(space.subsystems()[p].label)) untouched_pos.push_back(p);

  // Per full input index: which operator column and which untouched block.
  const std::size_t in_total = space.total_dim();
  std::vector<std::size_t> in_block = block_offsets(space, in_pos);
  std::vector<std::size_t> un_block_in = block_offsets(space, untouched_pos);

  // Output offsets: out block occupies the positions where out_subs landed;
  // the untouched blocks keep their relative order.
  std::vector<std::size_t> out_sub_pos, un_pos_out;
  for (const Subsystem& o : out_subs.subsystems())
    out_sub_pos.push_back(out_layout.position(o.label));
  for (std::size_t p : untouched_pos)
    un_pos_out.push_back(out_layout.position(space.subsystems()[p].label));
  std::vector<std::size_t> out_block = block_offsets(out_layout, out_sub_pos);
  std::vector<std::size_t> un_block_out = block_offsets(out_layout, un_pos_out);

  ComplexMatrix full(out_layout.total_dim(), in_total);
  // Iterate (in-sub, untouched) pairs, never full x full.
  for (std::size_t isub = 0; isub < in_block.size(); ++isub) {
    for (std::size_t u = 0; u < un_block_in.size(); ++u) {
      const std::size_t col = in_block[isub] + un_block_in[u];
      for (std::size_t osub = 0; osub < out_block.size(); ++osub) {
        const cplx v = op(osub, isub);
        if (v == cplx(0.0, 0.0)) continue;
        full(out_block[osub] + un_block_out[u], col) = v;
      }
    }
  }
  return LiftedOperator{std::move(full), std::move(out_layout)};
}

}  // namespace qcorr
