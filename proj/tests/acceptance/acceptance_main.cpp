// One line per criterion; exit status is non-zero if any criterion fails.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "chargefcs/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    bool ok = true;
    for (int id : ids.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9} : ids) {
        for (const auto& r : chargefcs::acceptance::run({id})) {
            std::cout << chargefcs::acceptance::format(r) << std::endl;
            ok = ok && r.passed;
        }
    }
    std::cout << (ok ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
    return ok ? 0 : 1;
}
