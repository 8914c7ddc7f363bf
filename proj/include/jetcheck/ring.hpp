#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetcheck/errors.hpp"

namespace jetcheck {

/// Packed jet coordinate or parameter.
///
/// Dependents encode (roster index, derivative order); parameters carry the
/// high bit and ignore the order field. The numeric order of codes is the
/// canonical variable order: roster index first, then derivative order, with
/// all parameters after all dependents.
struct Var {
  static constexpr std::uint32_t kParamBit = 1u << 31;
  static constexpr int kMaxOrder = 255;

  std::uint32_t code = 0;

  static constexpr Var dependent(std::uint32_t index, int order) {
    return Var{(index << 8) | static_cast<std::uint32_t>(order)};
  }
  static constexpr Var parameter(std::uint32_t index) {
    return Var{kParamBit | (index << 8)};
  }

  constexpr bool is_param() const { return (code & kParamBit) != 0; }
  constexpr std::uint32_t index() const { return (code & ~kParamBit) >> 8; }
  constexpr int order() const { return static_cast<int>(code & 0xffu); }
  constexpr Var shifted(int by) const {
    return dependent(index(), order() + by);
  }

  friend constexpr bool operator==(Var a, Var b) { return a.code == b.code; }
  friend constexpr auto operator<=>(Var a, Var b) { return a.code <=> b.code; }
};

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

/// Names of the independent variable, dependents and parameters.
///
/// Rings are immutable. New dependents (test vectors, auxiliaries) are added
/// by `extend`, which creates a child ring whose roster has the parent's as a
/// prefix; expressions of an ancestor ring are valid in every descendant.
class Ring {
 public:
  static RingPtr make(std::string independent, std::vector<std::string> dependents,
                      std::vector<std::string> parameters = {"lambda"});
  static RingPtr extend(const RingPtr& base, const std::vector<std::string>& extra);

  const std::string& independent() const { return independent_; }
  const std::vector<std::string>& dependents() const { return dependents_; }
  const std::vector<std::string>& parameters() const { return parameters_; }
  const RingPtr& parent() const { return parent_; }

  std::optional<std::uint32_t> find_dependent(std::string_view name) const;
  std::optional<std::uint32_t> find_parameter(std::string_view name) const;
  std::uint32_t dependent_index(std::string_view name) const;
  Var jet(std::string_view name, int order = 0) const;
  Var param(std::string_view name) const;
  const std::string& name_of(Var v) const;

  /// True when `other` is this ring or one of its ancestors.
  bool descends_from(const Ring* other) const;

 private:
  Ring() = default;

  std::string independent_;
  std::vector<std::string> dependents_;
  std::vector<std::string> parameters_;
  RingPtr parent_;
};

/// The common ring of two operands, or ContextMismatch.
RingPtr unify(const RingPtr& a, const RingPtr& b);

}  // namespace jetcheck
