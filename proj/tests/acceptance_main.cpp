// Acceptance suite: runs every quantitative criterion at its pinned tolerance
// and prints one PASS/FAIL line per criterion.  Exit code 0 iff all pass.

#include <algorithm>
#include <cstdio>

#include "sattn/experiment.hpp"

int main() {
    const auto results = sattn::exp::run_acceptance();
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %s - %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str(), r.seconds);
        std::fflush(stdout);
        all = all && r.pass;
    }
    std::printf("%s: %zu/%zu criteria passed\n", all ? "OK" : "FAILED",
                static_cast<std::size_t>(
                    std::count_if(results.begin(), results.end(), [](const auto& r) { return r.pass; })),
                results.size());
    return all ? 0 : 1;
}
