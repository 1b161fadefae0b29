#pragma once

#include <json.hpp>

#include "spoofguard/common.hpp"
#include "spoofguard/distance.hpp"

namespace spoofguard {

inline nlohmann::json band_to_json(const BandSpec& b) {
    switch (b.kind()) {
        case BandSpec::Kind::Unbounded: return {{"kind", "unbounded"}};
        case BandSpec::Kind::Radius: return {{"kind", "radius"}, {"radius", b.fixed_radius()}};
        case BandSpec::Kind::Fraction: return {{"kind", "fraction"}, {"fraction", b.ratio()}};
    }
    return {};
}

inline BandSpec band_from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "unbounded") return BandSpec::unbounded();
    if (kind == "radius") return BandSpec::radius(j.at("radius").get<std::size_t>());
    if (kind == "fraction") return BandSpec::fraction(j.at("fraction").get<double>());
    throw Error(ErrorKind::Incompatible, "unknown band kind '" + kind + "'");
}

}  // namespace spoofguard
