#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qcorr {

struct Subsystem {
  std::string label;
  std::size_t dim = 0;

  bool operator==(const Subsystem&) const = default;
};

/// Ordered list of labeled subsystem dimensions. The leftmost label varies
/// slowest in the composite basis index (most-significant-first).
class SystemLayout {
public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<Subsystem> subsystems);

  static SystemLayout single(const std::string& label, std::size_t dim) {
    return SystemLayout({{label, dim}});
  }

  const std::vector<Subsystem>& subsystems() const { return subs_; }
  std::size_t size() const { return subs_.size(); }
  std::size_t total_dim() const { return total_dim_; }

  bool has_label(const std::string& label) const;
  std::size_t position(const std::string& label) const;  // throws UnknownLabel
  std::size_t dim_of(const std::string& label) const;

  std::vector<std::string> labels() const;

  /// Strides of the mixed-radix composite index, one per subsystem.
  const std::vector<std::size_t>& strides() const { return strides_; }

  /// Composite index from per-subsystem digits (one digit per subsystem,
  /// in layout order).
  std::size_t index_of(const std::vector<std::size_t>& digits) const;
  /// Per-subsystem digits of a composite index.
  std::vector<std::size_t> digits_of(std::size_t index) const;

  bool operator==(const SystemLayout&) const = default;

  std::string to_string() const;

private:
  std::vector<Subsystem> subs_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

/// Concatenation; throws LabelCollision on shared labels.
SystemLayout concat(const SystemLayout& a, const SystemLayout& b);

}  // namespace qcorr
