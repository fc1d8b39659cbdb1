#include "topomatch/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "topomatch/error.hpp"

namespace topomatch {

namespace fs = std::filesystem;

namespace {

void write_value(const Json& value, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (value.type()) {
    case Json::value_t::number_float: {
      const double v = value.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      // Keep floats recognisable as floats after a round trip.
      if (std::string_view(buf).find_first_of(".eE") == std::string_view::npos) out += ".0";
      break;
    }
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write_value(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      break;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        break;
      }
      // Short arrays of scalars stay on one line.
      const bool flat = value.size() <= 4 && std::all_of(value.begin(), value.end(), [](const Json& e) {
        return e.is_primitive();
      });
      out += '[';
      bool first = true;
      for (const auto& e : value) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write_value(e, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      break;
    }
    default:
      out += value.dump();
  }
}

Json pixel_json(const Pixel& p) { return Json::array({p.row, p.col}); }

Pixel pixel_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("pixel must be [row, col]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  write_value(value, indent, 0, out);
  out += '\n';
  return out;
}

Json to_json(const PersistenceDiagram& diagram, const std::vector<double>& weights) {
  Json features = Json::array();
  for (std::size_t i = 0; i < diagram.size(); ++i) {
    const auto& f = diagram[i];
    Json j;
    j["b"] = f.birth_value;
    j["d"] = f.death_value;
    j["birth"] = pixel_json(f.birth_pixel);
    j["death"] = f.death_pixel ? pixel_json(*f.death_pixel) : Json(nullptr);
    j["essential"] = f.essential;
    if (!weights.empty()) j["weight"] = weights.at(i);
    features.push_back(std::move(j));
  }
  return features;
}

Json to_json(const PersistenceDiagram& diagram) { return to_json(diagram, {}); }

PersistenceDiagram diagram_from_json(const Json& value, int width, int height) {
  if (!value.is_array()) throw InputError("diagram JSON must be an array");
  PersistenceDiagram d{width, height, {}};
  try {
    for (const auto& j : value) {
      PersistenceFeature f;
      f.birth_value = j.at("b").get<double>();
      f.death_value = j.at("d").get<double>();
      f.birth_pixel = pixel_from(j.at("birth"));
      if (!j.at("death").is_null()) f.death_pixel = pixel_from(j.at("death"));
      f.essential = j.at("essential").get<bool>();
      d.features.push_back(f);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed diagram JSON: ") + e.what());
  }
  return d;
}

Json to_json(const PairMatchResult& result) {
  Json j;
  Json matches = Json::array();
  for (const auto& m : result.matches) {
    Json e;
    e["i"] = m.i;
    e["j"] = m.j;
    e["score"] = m.score;
    matches.push_back(std::move(e));
  }
  j["matches"] = std::move(matches);
  j["unmatched_1"] = result.unmatched_1;
  j["unmatched_2"] = result.unmatched_2;
  j["tau"] = result.threshold ? Json(*result.threshold) : Json(nullptr);
  return j;
}

PairMatchResult match_from_json(const Json& value) {
  PairMatchResult r;
  try {
    for (const auto& m : value.at("matches")) {
      r.matches.push_back({m.at("i").get<std::size_t>(), m.at("j").get<std::size_t>(),
                           m.at("score").get<double>()});
    }
    r.unmatched_1 = value.at("unmatched_1").get<std::vector<std::size_t>>();
    r.unmatched_2 = value.at("unmatched_2").get<std::vector<std::size_t>>();
    if (!value.at("tau").is_null()) r.threshold = value.at("tau").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed match JSON: ") + e.what());
  }
  return r;
}

Json to_json(const GlobalTracks& tracks, std::size_t min_support) {
  Json j;
  Json list = Json::array();
  for (const auto& t : tracks.tracks) {
    Json e;
    e["id"] = t.id;
    Json members = Json::array();
    for (const auto& v : t.members) members.push_back(Json::array({v.facet, v.feature}));
    e["members"] = std::move(members);
    e["support"] = t.support();
    list.push_back(std::move(e));
  }
  j["facets"] = tracks.facet_count;
  j["tracks"] = std::move(list);
  j["min_support"] = min_support;
  return j;
}

GlobalTracks tracks_from_json(const Json& value, std::size_t* min_support) {
  GlobalTracks tracks;
  try {
    std::size_t max_facet = 0;
    for (const auto& e : value.at("tracks")) {
      Track t;
      t.id = e.at("id").get<std::size_t>();
      for (const auto& m : e.at("members")) {
        if (!m.is_array() || m.size() != 2) throw InputError("track member must be [t, i]");
        t.members.push_back({m[0].get<std::size_t>(), m[1].get<std::size_t>()});
        max_facet = std::max(max_facet, t.members.back().facet + 1);
      }
      std::sort(t.members.begin(), t.members.end());
      tracks.tracks.push_back(std::move(t));
    }
    tracks.facet_count = value.contains("facets") ? value["facets"].get<std::size_t>() : max_facet;
    if (min_support) *min_support = value.at("min_support").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tracks JSON: ") + e.what());
  }
  return tracks;
}

namespace {

Json gradient_json(const GradientMap& gradient, const std::vector<int>& widths) {
  Json list = Json::array();
  for (const auto& [key, value] : gradient) {
    if (key.group >= widths.size() || widths[key.group] <= 0) {
      throw InvariantError("gradient entry for a group without a known width");
    }
    const auto w = static_cast<std::size_t>(widths[key.group]);
    Json e;
    e["group"] = key.group;
    e["facet"] = key.facet;
    e["pixel"] = pixel_json(Pixel{static_cast<int>(key.pixel / w), static_cast<int>(key.pixel % w)});
    e["grad"] = value;
    list.push_back(std::move(e));
  }
  return list;
}

}  // namespace

Json to_json(const LossReport& report, bool with_gradient) {
  Json j;
  j["l_sup"] = report.l_sup;
  j["l_cons"] = report.l_cons;
  j["l_intra"] = report.l_intra;
  j["l_temp"] = report.l_temp;
  j["l_total"] = report.l_total;
  j["lambda_cons"] = report.weights.cons;
  j["lambda_intra"] = report.weights.intra;
  j["lambda_temp"] = report.weights.temp;
  if (with_gradient) {
    j["intra_gradient"] = gradient_json(report.intra_gradient, report.intra_widths);
    j["temp_gradient"] = gradient_json(report.temp_gradient, report.temp_widths);
  }
  return j;
}

Json to_json(const MetricReport& report) {
  Json j;
  j["betti_error"] = report.betti_error;
  j["matched_feature_error"] = report.matched_feature_error;
  j["window"] = report.window;
  j["stride"] = report.stride;
  j["threshold"] = report.threshold;
  return j;
}

namespace {

template <typename Bytes>
void write_atomic(const fs::path& path, const Bytes& bytes) {
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw InputError("cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot write " + path.string() + ": " + ec.message());
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  write_atomic(path, contents);
}

void write_file_atomic(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  write_atomic(path, bytes);
}

}  // namespace topomatch
