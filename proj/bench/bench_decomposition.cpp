// Times the decomposition check: character-basis route, serial pointwise
// enumeration, and the OpenMP-parallel enumeration kernel.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "tloc/weilrep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tloc;

namespace {

double secs_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_instance(const char* name, const TowerParams& par, uint64_t seed) {
    TowerModel T = TowerModel::realize(par);
    ThetaFamily fam(T);
    Cocycle co = Cocycle::random_valid(T, seed);
    WeilQuotient W(T, fam, fam.theta(0), co);

    auto t0 = std::chrono::steady_clock::now();
    auto fast = W.verify_wedge_decomposition();
    double t_fast = secs_since(t0);

    if (!W.enumerable(2000000)) {
        std::printf("%-8s |G| = %lld  char-basis %.4fs (%s); quotient too large "
                    "to enumerate\n",
                    name, (long long)(T.gamma().order() * W.kx_size()), t_fast,
                    fast.equal ? "equal" : "MISMATCH");
        return;
    }

    t0 = std::chrono::steady_clock::now();
    auto ser = W.verify_wedge_decomposition_enumerated(false);
    double t_ser = secs_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto par_rep = W.verify_wedge_decomposition_enumerated(true);
    double t_par = secs_since(t0);

    bool agree = fast.equal && ser.equal && par_rep.equal && ser.checked == par_rep.checked;
    std::printf("%-8s |G| = %-8lld char-basis %8.4fs | serial %8.3fs | omp %8.3fs "
                "| speedup %.2fx | %s\n",
                name, (long long)ser.checked, t_fast, t_ser, t_par, t_ser / t_par,
                agree ? "all agree" : "DISAGREE");
}

} // namespace

int main(int argc, char** argv) {
    bool big = argc > 1 && std::strcmp(argv[1], "--big") == 0;
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp not enabled\n");
#endif
    bench_instance("A", {3, 1, 2, 1, 0, 4, TauKind::TotallyRamified}, 5);
    if (big) {
        bench_instance("B", {3, 1, 1, 2, 0, 4, TauKind::UnramifiedOverKPlus}, 5);
        bench_instance("C", {3, 1, 2, 2, 0, 4, TauKind::UnramifiedOverKPlus}, 5);
    }
    return 0;
}
