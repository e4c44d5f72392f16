#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mfilm {

struct CriterionResult {
    std::string id;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<std::string> only;  // ids to run; empty runs all
};

std::vector<std::string> acceptance_ids();
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {},
                                            const std::function<void(const CriterionResult&)>& on_result = nullptr);
std::string format_result_line(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);

// reduced hexagonal coefficients on the N = 0 curve used by the hexagonal checks
struct HexReducedBase {
    double g, beta, kappa, K0, K2, N0;
};
HexReducedBase hex_reduced_base(double g = 14.0);

}  // namespace mfilm
