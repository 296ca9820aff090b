#include "qcorr/layout.hpp"

#include <set>

#include "qcorr/errors.hpp"

namespace qcorr {

SystemLayout::SystemLayout(std::vector<Subsystem> subsystems)
    : subs_(std::move(subsystems)) {
  std::set<std::string> seen;
  for (const Subsystem& s : subs_) {
    if (s.dim == 0) throw DimensionMismatch("subsystem '" + s.label + "' has dimension 0");
    if (!seen.insert(s.label).second)
      throw LabelCollision("duplicate label '" + s.label + "'");
  }
  strides_.assign(subs_.size(), 1);
  total_dim_ = 1;
  for (std::size_t i = subs_.size(); i-- > 0;) {
    strides_[i] = total_dim_;
    total_dim_ *= subs_[i].dim;
  }
}

bool SystemLayout::has_label(const std::string& label) const {
  for (const Subsystem& s : subs_)
    if (s.label == label) return true;
  return false;
}

std::size_t SystemLayout::position(const std::string& label) const {
  for (std::size_t i = 0; i < subs_.size(); ++i)
    if (subs_[i].label == label) return i;
  throw UnknownLabel("'" + label + "' not in layout " + to_string());
}

std::size_t SystemLayout::dim_of(const std::string& label) const {
  return subs_[position(label)].dim;
}

std::vector<std::string> SystemLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(subs_.size());
  for (const Subsystem& s : subs_) out.push_back(s.label);
  return out;
}

std::size_t SystemLayout::index_of(const std::vector<std::size_t>& digits) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < subs_.size(); ++i) idx += digits[i] * strides_[i];
  return idx;
}

std::vector<std::size_t> SystemLayout::digits_of(std::size_t index) const {
  std::vector<std::size_t> digits(subs_.size());
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    digits[i] = (index / strides_[i]) % subs_[i].dim;
  }
  return digits;
}

std::string SystemLayout::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    if (i) s += ",";
    s += subs_[i].label + ":" + std::to_string(subs_[i].dim);
  }
  return s + ")";
}

SystemLayout concat(const SystemLayout& a, const SystemLayout& b) {
  std::vector<Subsystem> subs = a.subsystems();
  for (const Subsystem& s : b.subsystems()) {
    if (a.has_label(s.label))
      throw LabelCollision("label '" + s.label + "' present in both layouts");
    subs.push_back(s);
  }
  return SystemLayout(std::move(subs));
}

}  // namespace qcorr
