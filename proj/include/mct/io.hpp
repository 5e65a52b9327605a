#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mct/alberti.hpp"
#include "mct/current.hpp"
#include "mct/derivation.hpp"
#include "mct/space.hpp"

namespace mct::io {

using nlohmann::json;

json read_file(const std::string& path);

/// Space file: {"points":[ids], "coords":[[..]]? , "dist":[[..]]?, "mu":[..]};
/// exactly one of coords/dist.
std::pair<SpacePtr, Measure> load_space(const json& j);

/// Functions file: {"name": [values...]} -> dictionary with basepoint 0 and
/// the constant entry prepended.
FnDict load_functions(const json& j, SpacePtr space);

/// Fragment file: {"domain":[t...], "trace":[ids]} or an array thereof.
Fragment load_fragment(const json& j);
std::vector<Fragment> load_fragments(const json& j);

/// Derivation: {"mu":[..]?, "carrier":[{"fragment": <index|object>, "P":..,
/// "nu":[..]}]}; fragment indices refer to a separately loaded list.
Derivation load_derivation(const json& j, SpacePtr space, const Measure& mu,
                           const std::vector<Fragment>& fragments);

/// Current file: {"k":int, "form":"fragments"|"precurrent", ...}.
Current load_current(const json& j, SpacePtr space, const Measure& mu,
                     const std::vector<Fragment>& fragments);

/// Representation file: {"P":[...], "nu":[[..]...], "fragments":[refs]}.
AlbertiRep load_rep(const json& j, SpacePtr space,
                    const std::vector<Fragment>& fragments);

json mass_report(const MassEstimate& me, const MetricSpace& X);
json to_json(const AlbertiRep& rep);
json fragment_json(const Fragment& g);

}  // namespace mct::io
