#include "nlspinn/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace nlspinn::kernels {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* initial_table() {
    Isa isa = supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    if (const char* env = std::getenv("NLSPINN_ISA")) {
        const std::string want(env);
        if (want == "scalar") isa = Isa::Scalar;
    }
    return &table(isa);
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{initial_table()};
    return slot;
}

}  // namespace

bool supported(Isa isa) {
    if (isa == Isa::Scalar) return true;
    static const bool avx2 = cpu_has_avx2();
    return avx2;
}

const KernelTable& table(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::Avx2 && supported(Isa::Avx2)) return detail::avx2_table();
#endif
    return scalar_table();
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

std::string_view name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace nlspinn::kernels
