// Acceptance gate: runs every pinned pass/fail contract on the canonical
// configuration and prints one line per criterion. Exit 0 only if all pass.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "tunnelwave/acceptance.hpp"

int main(int argc, char** argv) {
    std::string out_dir = "acceptance_artifacts";
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--out") && i + 1 < argc) {
            out_dir = argv[++i];
        } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
            only.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--out DIR] [--only ID]...\n", argv[0]);
            return 1;
        }
    }

    bool all_pass = true;
    const auto results = tw::run_acceptance(
        out_dir,
        [&](const tw::CriterionResult& r) {
            std::printf("[%2d] %-58s %s (%.1f s)\n", r.id, r.name.c_str(),
                        r.pass ? "PASS" : "FAIL", r.seconds);
            if (!r.detail.empty()) std::printf("     %s\n", r.detail.c_str());
            std::fflush(stdout);
            all_pass = all_pass && r.pass;
        },
        only);

    std::printf("%zu/%zu criteria passed\n",
                static_cast<size_t>(
                    std::count_if(results.begin(), results.end(),
                                  [](const tw::CriterionResult& r) { return r.pass; })),
                results.size());
    return all_pass && !results.empty() ? 0 : 3;
}
