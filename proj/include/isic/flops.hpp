#pragma once

#include <cstdint>

namespace isic::flops {

/// Operation tally for the instrumented kernels.
///
/// A complex multiply costs six real flops and a complex add two. Products of
/// a real scalar with a complex value are tallied separately (two flops each)
/// so that real-coefficient scalings are not billed as full complex multiplies.
/// Scalar bookkeeping that is O(1) per detection procedure is not tallied.
struct FlopCounter {
  std::uint64_t cmul = 0;
  std::uint64_t cadd = 0;
  std::uint64_t rmul = 0;

  [[nodiscard]] std::uint64_t flops() const noexcept { return 6 * cmul + 2 * cadd + 2 * rmul; }

  FlopCounter& operator+=(const FlopCounter& other) noexcept {
    cmul += other.cmul;
    cadd += other.cadd;
    rmul += other.rmul;
    return *this;
  }

  friend FlopCounter operator+(FlopCounter a, const FlopCounter& b) noexcept { return a += b; }
  friend bool operator==(const FlopCounter&, const FlopCounter&) = default;
};

namespace detail {
inline thread_local FlopCounter* active = nullptr;
}

/// Routes the current thread's tallies into `counter` for the lifetime of the
/// scope. Scopes nest; the innermost one wins and the previous target is
/// restored on exit. Counters are never shared between threads: merge
/// per-thread counters with operator+= after joining.
class Scope {
 public:
  explicit Scope(FlopCounter& counter) noexcept : previous_(detail::active) { detail::active = &counter; }
  ~Scope() { detail::active = previous_; }
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

 private:
  FlopCounter* previous_;
};

inline void count(std::uint64_t cmul, std::uint64_t cadd, std::uint64_t rmul = 0) noexcept {
  if (FlopCounter* c = detail::active) {
    c->cmul += cmul;
    c->cadd += cadd;
    c->rmul += rmul;
  }
}

}  // namespace isic::flops
