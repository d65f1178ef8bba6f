#pragma once

#include "bifront/io.hpp"

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

namespace support {

using bifront::Model;

inline Model fisher_burgers(double alpha, double k = 1.0) {
    return Model(bifront::Logistic{k}, bifront::QuadraticConvection{alpha});
}

inline Model logistic_power() { return Model(bifront::Logistic{1.0}, bifront::PowerConvection{1.5, 1.0}); }

inline Model degenerate_fisher() { return Model(bifront::PowerLogistic{2.0, 1.0}, bifront::QuadraticConvection{1.0}); }

/// f = 0, h = v^2 (1 - v).
inline Model pure_convection() {
    return Model(bifront::ZeroReaction{}, bifront::PolynomialConvection{{0.0, 0.0, 1.0, -1.0}});
}

/// Certified values, loaded once from the file written at build time.
inline const bifront::oracle::Certification& cert(const std::string& id) {
    static const auto table = [] {
        std::ifstream in(BIFRONT_CERTIFICATES);
        if (!in) {
            throw std::runtime_error("certification file not found: " BIFRONT_CERTIFICATES);
        }
        const auto list = nlohmann::json::parse(in);
        std::map<std::string, bifront::oracle::Certification> m;
        for (const auto& e : list) {
            auto c = bifront::io::certification_from_json(e);
            m.emplace(c.quantity_id, c);
        }
        return m;
    }();
    const auto it = table.find(id);
    if (it == table.end()) {
        throw std::runtime_error("no certification for " + id);
    }
    return it->second;
}

inline double certified(const std::string& id) { return cert(id).value; }

} // namespace support
