#include "mct/io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace mct::io {

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail_input("parse error in " + path + ": " + e.what());
  }
  return j;
}

std::pair<SpacePtr, Measure> load_space(const json& j) {
  if (!j.contains("points")) fail_input("space file: missing 'points'");
  std::vector<std::string> names;
  for (const auto& p : j.at("points"))
    names.push_back(p.is_string() ? p.get<std::string>()
                                  : std::to_string(p.get<long long>()));
  const bool has_coords = j.contains("coords");
  const bool has_dist = j.contains("dist");
  if (has_coords == has_dist)
    fail_input("space file: exactly one of 'coords'/'dist' required");
  SpacePtr space;
  if (has_coords) {
    auto coords = j.at("coords").get<std::vector<std::vector<double>>>();
    space = std::make_shared<MetricSpace>(
        MetricSpace::from_coords(std::move(names), std::move(coords)));
  } else {
    auto dist = j.at("dist").get<std::vector<std::vector<double>>>();
    space = std::make_shared<MetricSpace>(std::move(names), std::move(dist));
  }
  std::vector<double> mu(space->size(), 1.0);
  if (j.contains("mu")) mu = j.at("mu").get<std::vector<double>>();
  if ((int)mu.size() != space->size())
    fail_input("space file: 'mu' size mismatch");
  return {space, Measure(std::move(mu))};
}

FnDict load_functions(const json& j, SpacePtr space) {
  FnDict dict(space, 0);
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto vals = it.value().get<std::vector<double>>();
    if ((int)vals.size() != space->size())
      fail_input("functions file: '" + it.key() + "' size mismatch");
    dict.add(it.key(), std::move(vals));
  }
  return dict;
}

Fragment load_fragment(const json& j) {
  return Fragment(j.at("domain").get<std::vector<double>>(),
                  j.at("trace").get<std::vector<int>>());
}

std::vector<Fragment> load_fragments(const json& j) {
  std::vector<Fragment> out;
  for (const auto& f : j) out.push_back(load_fragment(f));
  return out;
}

namespace {

Fragment resolve_fragment(const json& j,
                          const std::vector<Fragment>& fragments) {
  if (j.is_number_integer()) {
    int idx = j.get<int>();
    if (idx < 0 || idx >= (int)fragments.size())
      fail_input("fragment reference out of range");
    return fragments[idx];
  }
  return load_fragment(j);
}

}  // namespace

Derivation load_derivation(const json& j, SpacePtr space, const Measure& mu,
                           const std::vector<Fragment>& fragments) {
  std::vector<CarrierPiece> carrier;
  for (const auto& c : j.at("carrier")) {
    CarrierPiece p;
    p.fragment = resolve_fragment(c.at("fragment"), fragments);
    p.P = c.value("P", 1.0);
    p.nu = c.at("nu").get<std::vector<double>>();
    carrier.push_back(std::move(p));
  }
  Measure m = mu;
  if (j.contains("mu")) m = Measure(j.at("mu").get<std::vector<double>>());
  return Derivation(std::move(space), std::move(m), std::move(carrier));
}

Current load_current(const json& j, SpacePtr space, const Measure& mu,
                     const std::vector<Fragment>& fragments) {
  int k = j.at("k").get<int>();
  std::string form = j.at("form").get<std::string>();
  if (form == "fragments") {
    if (k != 1) fail_input("current file: fragment form needs k = 1");
    std::vector<FragmentSummand> pieces;
    for (const auto& c : j.at("pieces")) {
      FragmentSummand s;
      s.fragment = resolve_fragment(c.at("fragment"), fragments);
      if (c.contains("nu"))
        s.nu = c.at("nu").get<std::vector<double>>();
      else
        s.nu = default_edge_measure(s.fragment);
      double sign = c.value("sign", 1.0);
      for (double& v : s.nu) v *= sign;
      pieces.push_back(std::move(s));
    }
    return Current::fragment_sum(std::move(space), std::move(pieces));
  }
  if (form == "precurrent") {
    KVector xi;
    for (const auto& d : j.at("basis"))
      xi.basis.push_back(std::make_shared<Derivation>(
          load_derivation(d, space, mu, fragments)));
    xi.k = k;
    xi.tuples = j.at("tuples").get<std::vector<std::vector<int>>>();
    xi.coeffs = j.at("coeffs").get<std::vector<std::vector<double>>>();
    if (xi.tuples.size() != xi.coeffs.size())
      fail_input("current file: tuples/coeffs size mismatch");
    Measure m = mu;
    if (j.contains("mu")) m = Measure(j.at("mu").get<std::vector<double>>());
    return Current::from_kvector(std::move(xi), std::move(m));
  }
  fail_input("current file: unknown form '" + form + "'");
}

AlbertiRep load_rep(const json& j, SpacePtr space,
                    const std::vector<Fragment>& fragments) {
  AlbertiRep rep;
  rep.space = std::move(space);
  for (const auto& f : j.at("fragments"))
    rep.fragments.push_back(resolve_fragment(f, fragments));
  rep.P = j.at("P").get<std::vector<double>>();
  rep.nu = j.at("nu").get<std::vector<std::vector<double>>>();
  if (rep.P.size() != rep.fragments.size() ||
      rep.nu.size() != rep.fragments.size())
    fail_input("representation file: array size mismatch");
  return rep;
}

json mass_report(const MassEstimate& me, const MetricSpace& X) {
  json witnesses = json::array();
  for (const auto& w : me.witnesses) {
    json names = json::array();
    for (int x : w.B) names.push_back(X.name(x));
    witnesses.push_back({{"B", names}, {"value", w.value}});
  }
  return json{{"lower_total", me.lower_total()},
              {"upper_total", me.upper_total()},
              {"lower", me.lower.weights()},
              {"upper", me.upper.weights()},
              {"upper_certified", me.upper_certified},
              {"uncovered_upper_mass", me.uncovered_upper_mass},
              {"witnesses", witnesses}};
}

json fragment_json(const Fragment& g) {
  return json{{"domain", g.domain}, {"trace", g.trace}};
}

json to_json(const AlbertiRep& rep) {
  json frags = json::array();
  for (const auto& g : rep.fragments) frags.push_back(fragment_json(g));
  return json{{"P", rep.P}, {"nu", rep.nu}, {"fragments", frags}};
}

}  // namespace mct::io
