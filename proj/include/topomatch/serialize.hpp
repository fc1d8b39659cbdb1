#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "topomatch/global_match.hpp"
#include "topomatch/matching.hpp"
#include "topomatch/metrics.hpp"
#include "topomatch/persistence.hpp"
#include "topomatch/topo_loss.hpp"

namespace topomatch {

using Json = nlohmann::ordered_json;

// Floats are printed with 17 significant digits so golden files round-trip.
std::string dump_json(const Json& value, int indent = 2);

Json to_json(const PersistenceDiagram& diagram, const std::vector<double>& weights);
Json to_json(const PersistenceDiagram& diagram);
PersistenceDiagram diagram_from_json(const Json& value, int width, int height);

Json to_json(const PairMatchResult& result);
PairMatchResult match_from_json(const Json& value);

Json to_json(const GlobalTracks& tracks, std::size_t min_support);
GlobalTracks tracks_from_json(const Json& value, std::size_t* min_support = nullptr);

Json to_json(const LossReport& report, bool with_gradient);
Json to_json(const MetricReport& report);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace topomatch
