#pragma once

namespace uexp {

/// How an embarrassingly parallel loop is run. Both modes produce identical results;
/// Serial is the reference the parallel kernels are tested against.
struct Execution {
    bool parallel = false;
    int threads = 0;   // 0: OpenMP default

    static Execution serial() { return {}; }
    static Execution with_threads(int threads) { return {true, threads}; }
};

}  // namespace uexp
