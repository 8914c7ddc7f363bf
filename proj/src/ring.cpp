#include "jetcheck/ring.hpp"

#include <algorithm>
#include <set>

namespace jetcheck {

namespace {

void require_unique(const std::vector<std::string>& deps, const std::vector<std::string>& params) {
  std::set<std::string> seen;
  for (const auto& n : deps) {
    if (n.empty() || !seen.insert(n).second) throw Error("duplicate or empty name in ring: " + n);
  }
  for (const auto& n : params) {
    if (n.empty() || !seen.insert(n).second) throw Error("duplicate or empty name in ring: " + n);
  }
}

}  // namespace

RingPtr Ring::make(std::string independent, std::vector<std::string> dependents,
                   std::vector<std::string> parameters) {
  if (independent != "x" && independent != "y") {
    throw Error("independent variable must be x or y, got " + independent);
  }
  require_unique(dependents, parameters);
  auto ring = std::shared_ptr<Ring>(new Ring());
  ring->independent_ = std::move(independent);
  ring->dependents_ = std::move(dependents);
  ring->parameters_ = std::move(parameters);
  return ring;
}

RingPtr Ring::extend(const RingPtr& base, const std::vector<std::string>& extra) {
  auto ring = std::shared_ptr<Ring>(new Ring());
  ring->independent_ = base->independent_;
  ring->dependents_ = base->dependents_;
  ring->dependents_.insert(ring->dependents_.end(), extra.begin(), extra.end());
  ring->parameters_ = base->parameters_;
  require_unique(ring->dependents_, ring->parameters_);
  ring->parent_ = base;
  return ring;
}

std::optional<std::uint32_t> Ring::find_dependent(std::string_view name) const {
  auto it = std::find(dependents_.begin(), dependents_.end(), name);
  if (it == dependents_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - dependents_.begin());
}

std::optional<std::uint32_t> Ring::find_parameter(std::string_view name) const {
  auto it = std::find(parameters_.begin(), parameters_.end(), name);
  if (it == parameters_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - parameters_.begin());
}

std::uint32_t Ring::dependent_index(std::string_view name) const {
  auto idx = find_dependent(name);
  if (!idx) throw UnknownName("unknown dependent: " + std::string(name));
  return *idx;
}

Var Ring::jet(std::string_view name, int order) const {
  if (order < 0 || order > Var::kMaxOrder) throw Error("derivative order out of range");
  return Var::dependent(dependent_index(name), order);
}

Var Ring::param(std::string_view name) const {
  auto idx = find_parameter(name);
  if (!idx) throw UnknownName("unknown parameter: " + std::string(name));
  return Var::parameter(*idx);
}

const std::string& Ring::name_of(Var v) const {
  if (v.is_param()) {
    if (v.index() >= parameters_.size()) throw UnknownName("parameter index out of range");
    return parameters_[v.index()];
  }
  if (v.index() >= dependents_.size()) throw UnknownName("dependent index out of range");
  return dependents_[v.index()];
}

bool Ring::descends_from(const Ring* other) const {
  for (const Ring* r = this; r != nullptr; r = r->parent_.get()) {
    if (r == other) return true;
  }
  return false;
}

RingPtr unify(const RingPtr& a, const RingPtr& b) {
  if (a == b) return a;
  if (!a) return b;
  if (!b) return a;
  if (a->descends_from(b.get())) return a;
  if (b->descends_from(a.get())) return b;
  throw ContextMismatch("operands belong to different rings");
}

}  // namespace jetcheck
