#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace szego {

/// Outcome of one acceptance criterion.
struct Verdict {
    std::string check_id;
    double observed = 0.0;
    double predicted = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

nlohmann::ordered_json to_json(const Verdict& v);

struct AcceptanceCheck {
    std::string id;
    std::string title;
    std::function<Verdict()> run;
};

const std::vector<AcceptanceCheck>& acceptance_checks();

/// Runs every check (or those whose id is listed), calling `report` after each.
std::vector<Verdict> run_acceptance(const std::vector<std::string>& only = {},
                                    const std::function<void(const Verdict&)>& report = {});

}  // namespace szego
