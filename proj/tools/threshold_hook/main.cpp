// Exec-hook classifier: one JSON query per input line, one JSON decision per
// output line. Default rule is s + N >= h; --always wanted|other answers a
// fixed decision.

#include "mforge/diagnostic.hpp"
#include "mforge/hooks.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Threshold classifier speaking the model-forge hook protocol", "threshold_hook"};
    std::string always;
    app.add_option("--always", always, "Answer every query with this decision")
        ->check(CLI::IsMember({"wanted", "other"}));
    CLI11_PARSE(app, argc, argv);

    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        mforge::sim::Decision d;
        try {
            const auto q = mforge::hooks::decode_request(line);
            if (always.empty()) d = mforge::sim::threshold_decision(q);
            else d = always == "wanted" ? mforge::sim::Decision::Wanted : mforge::sim::Decision::Other;
        } catch (const mforge::Failure& f) {
            std::cerr << "threshold_hook: " << f.what() << "\n";
            return 1;
        }
        std::cout << mforge::hooks::encode_reply(d) << std::endl;
    }
    return 0;
}
