#include <iostream>

#include "mfilm/acceptance.hpp"
#include "mfilm/errors.hpp"

// usage: acceptance [criterion-id ...]
int main(int argc, char** argv) {
    mfilm::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) opt.only.emplace_back(argv[i]);
    bool all = true;
    try {
        mfilm::run_acceptance(opt, [&](const mfilm::CriterionResult& r) {
            std::cout << mfilm::format_result_line(r) << std::endl;
            all = all && r.pass;
        });
    } catch (const mfilm::UsageError& e) {
        std::cerr << e.what() << "\nknown ids:";
        for (const auto& id : mfilm::acceptance_ids()) std::cerr << ' ' << id;
        std::cerr << '\n';
        return 2;
    }
    return all ? 0 : 1;
}
