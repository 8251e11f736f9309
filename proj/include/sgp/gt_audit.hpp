#pragma once

#include <cstdint>

#include "sgp/geometry.hpp"

namespace sgp::gt_audit {

/// RAII marker for code regions that are allowed to read hidden ground
/// truth (evaluation, PLIR, recall). Reads outside any scope are counted as
/// violations of the self-supervision contract.
class EvalScope {
 public:
  EvalScope();
  ~EvalScope();
  EvalScope(const EvalScope&) = delete;
  EvalScope& operator=(const EvalScope&) = delete;
};

void record_read();
uint64_t total_reads();
uint64_t violation_count();
void reset();

}  // namespace sgp::gt_audit

namespace sgp {

/// Ground-truth transform attached to a pair for evaluation only. Every
/// dereference goes through the audit hook.
class HiddenTransform {
 public:
  HiddenTransform() = default;
  explicit HiddenTransform(const RigidTransform& value) : present_(true), value_(value) {}

  bool present() const { return present_; }

  /// Audited access; counts as a violation outside an EvalScope.
  const RigidTransform& value() const {
    gt_audit::record_read();
    return value_;
  }

 private:
  bool present_ = false;
  RigidTransform value_;
};

}  // namespace sgp
