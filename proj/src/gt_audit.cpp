#include "sgp/gt_audit.hpp"

#include <atomic>

namespace sgp::gt_audit {

namespace {
std::atomic<uint64_t> g_total_reads{0};
std::atomic<uint64_t> g_violations{0};
thread_local int t_scope_depth = 0;
}  // namespace

EvalScope::EvalScope() { ++t_scope_depth; }
EvalScope::~EvalScope() { --t_scope_depth; }

void record_read() {
  g_total_reads.fetch_add(1, std::memory_order_relaxed);
  if (t_scope_depth == 0) g_violations.fetch_add(1, std::memory_order_relaxed);
}

uint64_t total_reads() { return g_total_reads.load(); }
uint64_t violation_count() { return g_violations.load(); }

void reset() {
  g_total_reads.store(0);
  g_violations.store(0);
}

}  // namespace sgp::gt_audit
