// Runs the case-study checks over many seed pairs to measure sensitivity.
// Usage: ufls_seed_sweep [count] [first]

#include <cstdlib>
#include <iostream>

#include "checks.hpp"

int main(int argc, char** argv) {
    const int count = argc > 1 ? std::atoi(argv[1]) : 20;
    const int first = argc > 2 ? std::atoi(argv[2]) : 1;
    int pass[3] = {0, 0, 0};
    for (int i = 0; i < count; ++i) {
        const auto seed = static_cast<std::uint64_t>(first + i);
        for (int c = 0; c < 3; ++c) {
            auto cfg = ufls::preset(ufls::preset_names()[static_cast<std::size_t>(c)]);
            cfg.noise.seed = 2 * seed - 1;
            cfg.filter.seed = 2 * seed;
            checks::Outcome o;
            if (c == 0) o = checks::case_i(ufls::run_scenario(cfg));
            if (c == 1) o = checks::case_ii(ufls::run_scenario(cfg));
            if (c == 2)
                o = checks::case_iii(ufls::run_scenario(cfg),
                                     ufls::run_scenario(checks::open_loop(cfg)));
            pass[c] += o.pass;
            std::cout << cfg.name << " seeds " << cfg.noise.seed << "/" << cfg.filter.seed << " "
                      << (o.pass ? "PASS" : "FAIL") << " " << o.detail << "\n";
        }
    }
    std::cout << "case-i " << pass[0] << "/" << count << ", case-ii " << pass[1] << "/" << count
              << ", case-iii " << pass[2] << "/" << count << "\n";
}
