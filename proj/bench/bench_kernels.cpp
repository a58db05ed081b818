// Compares the OpenMP kernels against their serial reference implementations
// on a realistic instance and verifies that the outputs are identical.

#include "knead/subshift.hpp"
#include "knead/transfer_graph.hpp"

#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace knead;

namespace {

double now() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

} // namespace

int main(int argc, char** argv) {
    int k = (argc > 1) ? std::atoi(argv[1]) : 20;
#ifdef _OPENMP
    std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "threads: 1 (compiled without OpenMP)\n";
#endif
    IntervalConstraint ic = IntervalConstraint::make(parse_seq("0", 1), parse_seq("(10)", 1));
    const std::uint64_t budget = std::uint64_t(1) << 24;

    std::cout << "block scan, m=1, golden-mean constraint, k=" << k << "\n";
    double t0 = now();
    auto ser = allowed_blocks(ic, k, ExecPolicy::Serial, budget);
    double t1 = now();
    auto par = allowed_blocks(ic, k, ExecPolicy::Parallel, budget);
    double t2 = now();
    bool same = ser.size() == par.size();
    for (std::size_t i = 0; same && i < ser.size(); ++i) same = ser[i].syms == par[i].syms;
    std::cout << "  serial   " << (t1 - t0) * 1e3 << " ms  (" << ser.size() << " blocks)\n"
              << "  parallel " << (t2 - t1) * 1e3 << " ms  speedup " << (t1 - t0) / (t2 - t1)
              << "  identical: " << (same ? "yes" : "NO") << "\n";

    TransferGraph g = outer_sft(ic, k, ExecPolicy::Parallel, budget);
    std::cout << "matvec on the outer graph (" << g.vertex_count() << " vertices, " << g.edge_count()
              << " edges), 64 rounds\n";
    std::vector<std::uint32_t> offsets(g.vertex_count() + 1, 0), targets(g.edge_count());
    for (auto [u, v] : g.edges) ++offsets[u + 1];
    for (std::size_t i = 0; i < g.vertex_count(); ++i) offsets[i + 1] += offsets[i];
    {
        std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
        for (auto [u, v] : g.edges) targets[cursor[u]++] = v;
    }
    std::vector<mpz_class> v(g.vertex_count(), mpz_class(1)), w;
    double t3 = now();
    for (int r = 0; r < 64; ++r) {
        matvec_plus_identity(offsets, targets, v, w, ExecPolicy::Serial);
        v.swap(w);
    }
    double t4 = now();
    std::vector<mpz_class> vs = v;
    v.assign(g.vertex_count(), mpz_class(1));
    for (int r = 0; r < 64; ++r) {
        matvec_plus_identity(offsets, targets, v, w, ExecPolicy::Parallel);
        v.swap(w);
    }
    double t5 = now();
    std::cout << "  serial   " << (t4 - t3) * 1e3 << " ms\n"
              << "  parallel " << (t5 - t4) * 1e3 << " ms  speedup " << (t4 - t3) / (t5 - t4)
              << "  identical: " << (v == vs ? "yes" : "NO") << "\n";

    std::cout << "perron enclosure at 1e-12\n";
    double t6 = now();
    PerronResult ps = perron_lambda(g, parse_rational("1e-12"), ExecPolicy::Serial);
    double t7 = now();
    PerronResult pp = perron_lambda(g, parse_rational("1e-12"), ExecPolicy::Parallel);
    double t8 = now();
    std::cout << "  serial   " << (t7 - t6) * 1e3 << " ms (" << ps.iterations << " iterations)\n"
              << "  parallel " << (t8 - t7) * 1e3 << " ms  speedup " << (t7 - t6) / (t8 - t7)
              << "  identical: " << (ps.lambda == pp.lambda ? "yes" : "NO") << "\n";
    return (same && v == vs && ps.lambda == pp.lambda) ? 0 : 1;
}
