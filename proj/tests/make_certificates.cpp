// Writes the oracle certification file read by the unit tests.

#include "bifront/io.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_certificates OUTPUT.json\n";
        return 1;
    }
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : bifront::oracle::certify()) {
        list.push_back(bifront::io::to_json(c));
    }
    std::ofstream out(argv[1]);
    if (!out) {
        std::cerr << "cannot write " << argv[1] << '\n';
        return 1;
    }
    out << list.dump(2) << '\n';
    return 0;
}
