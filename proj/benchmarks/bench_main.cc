/* bench_main.cc -- benchmark entry point */

#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
