#include <cstdio>
#include <string>
#include <vector>

#include "szego/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> only(argv + 1, argv + argc);
    bool all = true;
    szego::run_acceptance(only, [&](const szego::Verdict& v) {
        all = all && v.pass;
        std::printf("%s %-22s observed=%.10g predicted=%.10g tol=%g  %s\n", v.pass ? "PASS" : "FAIL",
                    v.check_id.c_str(), v.observed, v.predicted, v.tolerance, v.detail.c_str());
        std::fflush(stdout);
    });
    return all ? 0 : 1;
}
