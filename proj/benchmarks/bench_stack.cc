/* bench_stack.cc -- microbenchmarks for stack operations and milestones */

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cpg/stack.hh"

namespace {

using namespace cpg;

std::vector<Stack2> sample_stacks(int count, int ops) {
    std::mt19937 rng(12345);
    const std::vector<StackOp> all{clone2(), pop1(),     pop2(),     collapse(),
                                   push1("a"), push2("a"), push1("b"), push2("b")};
    std::uniform_int_distribution<size_t> pick(0, all.size() - 1);
    std::vector<Stack2> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Stack2 s = bottom_stack();
        for (int k = 0; k < ops; ++k) {
            auto t = apply_op(s, all[pick(rng)]);
            if (t && t->width() <= 8 && t->top2().size() <= 10) s = std::move(*t);
        }
        out.push_back(std::move(s));
    }
    return out;
}

void BM_ApplyOp(benchmark::State& state) {
    const auto stacks = sample_stacks(64, static_cast<int>(state.range(0)));
    const std::vector<StackOp> all{clone2(), pop1(), pop2(), collapse(), push1("a"), push2("a")};
    size_t i = 0;
    for (auto _ : state) {
        const Stack2& s = stacks[i % stacks.size()];
        for (const auto& op : all) benchmark::DoNotOptimize(apply_op(s, op));
        ++i;
    }
}
BENCHMARK(BM_ApplyOp)->Arg(8)->Arg(32);

void BM_Milestones(benchmark::State& state) {
    const auto stacks = sample_stacks(64, static_cast<int>(state.range(0)));
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(milestones(stacks[i % stacks.size()], true));
        ++i;
    }
}
BENCHMARK(BM_Milestones)->Arg(8)->Arg(32);

void BM_ValidStack(benchmark::State& state) {
    const auto stacks = sample_stacks(128, 32);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(valid_stack(stacks[i % stacks.size()]));
        ++i;
    }
}
BENCHMARK(BM_ValidStack);

}  // namespace
