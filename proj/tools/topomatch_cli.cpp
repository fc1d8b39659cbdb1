#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "topomatch/error.hpp"
#include "topomatch/field_io.hpp"
#include "topomatch/global_match.hpp"
#include "topomatch/matching.hpp"
#include "topomatch/metrics.hpp"
#include "topomatch/persistence.hpp"
#include "topomatch/serialize.hpp"
#include "topomatch/synth.hpp"
#include "topomatch/topo_loss.hpp"

namespace fs = std::filesystem;
using namespace topomatch;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInvariant = 3;

struct Options {
  std::string connectivity = "eight";
  std::string out;
};

Connectivity parse_connectivity(const std::string& name) {
  if (name == "eight" || name == "8") return Connectivity::Eight;
  if (name == "four" || name == "4") return Connectivity::Four;
  throw InputError("unknown connectivity '" + name + "' (use four or eight)");
}

const char* connectivity_name(Connectivity c) { return c == Connectivity::Eight ? "eight" : "four"; }

void emit(const Options& opts, const Json& value) {
  const std::string text = dump_json(value) + "\n";
  if (opts.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(opts.out, text);
  }
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// Optional typed field of a JSON object; a present value of the wrong type is an input error.
template <typename T>
std::optional<T> get_opt(const Json& obj, const char* key) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  try {
    return obj[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("manifest key '") + key + "' has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

BinaryMask load_mask(const fs::path& path) { return binarize(load_field(path), 0.5); }

// ---------------------------------------------------------------- diagram

int cmd_diagram(const Options& opts, const std::string& path) {
  const Connectivity conn = parse_connectivity(opts.connectivity);
  const ScalarField f = load_field(path);
  const PersistenceDiagram d = compute_diagram(f, conn);
  Json j;
  j["width"] = f.width();
  j["height"] = f.height();
  j["connectivity"] = connectivity_name(conn);
  j["total_persistence"] = total_finite_persistence(d);
  j["features"] = to_json(d, feature_weights(d));
  emit(opts, j);
  return 0;
}

// ---------------------------------------------------------------- match-pair

int cmd_match_pair(const Options& opts, const std::string& a, const std::string& b, double tau,
                   bool wasserstein) {
  const Connectivity conn = parse_connectivity(opts.connectivity);
  const ScalarField f1 = load_field(a), f2 = load_field(b);
  if (f1.width() != f2.width() || f1.height() != f2.height()) {
    throw InputError("fields differ in size: " + std::to_string(f1.width()) + "x" +
                     std::to_string(f1.height()) + " vs " + std::to_string(f2.width()) + "x" +
                     std::to_string(f2.height()));
  }
  const PairMatchResult r = wasserstein
                                ? wasserstein_match(compute_diagram(f1, conn), compute_diagram(f2, conn))
                                : match_pair(f1, f2, tau, conn);
  Json j;
  j["method"] = wasserstein ? "wasserstein" : "match_pair";
  j["connectivity"] = connectivity_name(conn);
  const Json body = to_json(r);
  for (const auto& [k, v] : body.items()) j[k] = v;
  emit(opts, j);
  return 0;
}

// ---------------------------------------------------------------- match-global

int cmd_match_global(const Options& opts, const std::vector<std::string>& paths, double tau,
                     std::size_t min_support) {
  if (paths.size() < 2) throw InputError("match-global needs at least two fields");
  const Connectivity conn = parse_connectivity(opts.connectivity);
  std::vector<ScalarField> fields;
  for (const auto& p : paths) fields.push_back(load_field(p));
  const GlobalMatchResult r = match_global(fields, tau, conn);
  const std::size_t support = min_support == 0 ? default_min_support(fields.size()) : min_support;
  const StabilityClassification cls = classify_stability(r.tracks, support);
  Json j = to_json(r.tracks, support);
  j["tau"] = tau;
  j["connectivity"] = connectivity_name(conn);
  j["matched_features"] = cls.matched.size();
  j["unmatched_features"] = cls.unmatched.size();
  emit(opts, j);
  return 0;
}

// ---------------------------------------------------------------- loss

std::set<Vertex> read_vertices(const Json& list, const char* key) {
  std::set<Vertex> out;
  if (!list.is_array()) throw InputError(std::string("'") + key + "' must be a list of [facet, feature]");
  for (const auto& v : list) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned()) {
      throw InputError(std::string("'") + key + "' entries must be [facet, feature]");
    }
    out.insert({v[0].get<std::size_t>(), v[1].get<std::size_t>()});
  }
  return out;
}

std::vector<FacetGroup> read_groups(const Json& manifest, const char* key, const fs::path& base,
                                    double tau, Connectivity conn, std::size_t min_support,
                                    std::vector<int>& widths) {
  std::vector<FacetGroup> groups;
  if (!manifest.contains(key)) return groups;
  const Json& list = manifest[key];
  if (!list.is_array()) throw InputError(std::string("'") + key + "' must be a list of groups");
  for (const auto& g : list) {
    if (!g.is_object() || !g.contains("facets") || !g["facets"].is_array() || g["facets"].empty()) {
      throw InputError(std::string("each entry of '") + key + "' needs a non-empty 'facets' list");
    }
    std::vector<ScalarField> fields;
    for (const auto& p : g["facets"]) {
      if (!p.is_string()) throw InputError("facet paths must be strings");
      fields.push_back(load_field(resolve(base, p.get<std::string>())));
    }
    widths.push_back(fields.front().width());
    if (g.contains("matched") || g.contains("unmatched")) {
      std::vector<PersistenceDiagram> diagrams;
      for (const auto& f : fields) diagrams.push_back(compute_diagram(f, conn));
      StabilityClassification cls;
      if (g.contains("matched")) cls.matched = read_vertices(g["matched"], "matched");
      if (g.contains("unmatched")) cls.unmatched = read_vertices(g["unmatched"], "unmatched");
      cls.min_support = min_support == 0 ? default_min_support(fields.size()) : min_support;
      groups.push_back(make_facet_group(std::move(fields), std::move(diagrams), std::move(cls)));
    } else {
      groups.push_back(make_facet_group(std::move(fields), tau, conn, min_support));
    }
  }
  return groups;
}

int cmd_loss(const Options& opts, const std::string& manifest_path, bool gradient_flag) {
  const Json m = read_json(manifest_path);
  if (!m.is_object()) throw InputError("manifest must be a JSON object");
  const fs::path base = fs::path(manifest_path).parent_path();
  const Connectivity conn =
      parse_connectivity(get_opt<std::string>(m, "connectivity").value_or(opts.connectivity));
  const double tau = get_opt<double>(m, "tau").value_or(kDefaultTauPrimary);
  const auto min_support = get_opt<std::size_t>(m, "min_support").value_or(0);

  LossReport report;
  const auto intra = read_groups(m, "groups_intra", base, tau, conn, min_support, report.intra_widths);
  const auto temp = read_groups(m, "groups_temp", base, tau, conn, min_support, report.temp_widths);
  if (!intra.empty()) {
    auto r = loss_intra(intra);
    report.l_intra = r.value;
    report.intra_gradient = std::move(r.gradient);
  }
  if (!temp.empty()) {
    auto r = loss_temp(temp);
    report.l_temp = r.value;
    report.temp_gradient = std::move(r.gradient);
  }
  if (m.contains("sup")) {
    const Json& s = m["sup"];
    const auto pred = get_opt<std::string>(s, "pred"), target = get_opt<std::string>(s, "target");
    if (!pred || !target) throw InputError("'sup' needs 'pred' and 'target'");
    report.l_sup = supervised_loss(load_field(resolve(base, *pred)), load_mask(resolve(base, *target)));
  }
  if (m.contains("cons")) {
    const Json& c = m["cons"];
    const auto student = get_opt<std::string>(c, "student"), teacher = get_opt<std::string>(c, "teacher");
    if (!student || !teacher) throw InputError("'cons' needs 'student' and 'teacher'");
    report.l_cons =
        cross_entropy_loss(load_field(resolve(base, *student)), load_field(resolve(base, *teacher)));
  }

  if (const auto l = get_opt<double>(m, "lambda_cons")) {
    report.weights.cons = *l;
  } else if (const auto it = get_opt<long>(m, "iteration")) {
    const auto total = get_opt<long>(m, "total_iterations");
    if (!total) throw InputError("'iteration' needs 'total_iterations'");
    report.weights.cons = ramp_up_weight(*it, *total, get_opt<double>(m, "ramp_k").value_or(kDefaultRampK));
  }
  report.weights.intra = get_opt<double>(m, "lambda_intra").value_or(kDefaultLambdaIntra);
  report.weights.temp = get_opt<double>(m, "lambda_temp").value_or(kDefaultLambdaTemp);
  report.l_total = total_loss(report.l_sup, report.l_cons, report.l_intra, report.l_temp, report.weights);

  const bool with_gradient = gradient_flag || get_opt<bool>(m, "gradient").value_or(false);
  emit(opts, to_json(report, with_gradient));
  return 0;
}

// ---------------------------------------------------------------- metrics

int cmd_metrics(const Options& opts, const std::string& pred_path, const std::string& gt_path,
                int window, int stride, double threshold, bool fit_window, double tau) {
  const Connectivity conn = parse_connectivity(opts.connectivity);
  const ScalarField pred = load_field(pred_path);
  const BinaryMask gt = load_mask(gt_path);
  if (fit_window) window = std::min({window, pred.width(), pred.height()});
  const MetricReport r = evaluate_metrics(pred, gt, window, stride, threshold, tau, conn);
  Json j = to_json(r);
  j["connectivity"] = connectivity_name(conn);
  emit(opts, j);
  return 0;
}

// ---------------------------------------------------------------- synth

Perturbation read_perturbation(const Json& p) {
  const auto type = get_opt<std::string>(p, "type");
  if (!type) throw InputError("perturbation needs a 'type'");
  if (*type == "gaussian_noise") return GaussianNoise{get_opt<double>(p, "sigma").value_or(0.0)};
  if (*type == "patch_dropout") {
    return PatchDropout{get_opt<double>(p, "rate").value_or(0.0), get_opt<int>(p, "patch").value_or(1)};
  }
  if (*type == "amplitude_jitter") return AmplitudeJitter{get_opt<double>(p, "delta").value_or(0.0)};
  if (*type == "translate") return Translate{get_opt<int>(p, "dx").value_or(0), get_opt<int>(p, "dy").value_or(0)};
  throw InputError("unknown perturbation type '" + *type + "'");
}

Json blob_json(const BlobSpec& b) {
  Json j;
  j["id"] = b.id;
  j["row"] = b.row;
  j["col"] = b.col;
  j["amplitude"] = b.amplitude;
  j["radius"] = b.radius;
  return j;
}

Json blobs_json(const std::vector<BlobSpec>& blobs) {
  Json list = Json::array();
  for (const auto& b : blobs) list.push_back(blob_json(b));
  return list;
}

BlobSpec read_blob(const Json& j, int index) {
  BlobSpec b;
  b.id = get_opt<int>(j, "id").value_or(index);
  const auto row = get_opt<double>(j, "row"), col = get_opt<double>(j, "col");
  if (!row || !col) throw InputError("blob needs 'row' and 'col'");
  b.row = *row;
  b.col = *col;
  b.amplitude = get_opt<double>(j, "amplitude").value_or(1.0);
  b.radius = get_opt<double>(j, "radius").value_or(1.0);
  return b;
}

std::string extension(FieldFormat f) {
  switch (f) {
    case FieldFormat::RawF32:
      return ".f32";
    case FieldFormat::Pgm:
      return ".pgm";
    case FieldFormat::Csv:
      break;
  }
  return ".csv";
}

void write_facet_set(const FacetSet& set, const fs::path& dir, FieldFormat format, const Json& extra) {
  const std::string ext = extension(format);
  save_field(set.base, dir / ("base" + ext), format);
  Json facets = Json::array();
  for (std::size_t t = 0; t < set.facets.size(); ++t) {
    const std::string name = "facet_" + std::to_string(t) + ext;
    save_field(set.facets[t], dir / name, format);
    Json f;
    f["file"] = name;
    f["seed"] = set.seeds[t];
    Json plan = Json::array();
    for (const auto& p : set.plans[t]) plan.push_back(describe(p));
    f["perturbations"] = std::move(plan);
    f["truth"] = set.truth[t];
    facets.push_back(std::move(f));
  }
  Json truth = extra;
  truth["base"] = "base" + ext;
  truth["blobs"] = blobs_json(set.blobs);
  truth["facets"] = std::move(facets);
  write_file_atomic(dir / "truth.json", dump_json(truth) + "\n");
}

int cmd_synth(const std::string& descriptor, std::optional<std::uint64_t> swap_seed,
              std::optional<std::uint64_t> consensus_seed, const std::string& out_dir,
              const std::string& format_name) {
  if (out_dir.empty()) throw InputError("synth needs --out-dir");
  const int modes = !descriptor.empty() + swap_seed.has_value() + consensus_seed.has_value();
  if (modes != 1) throw InputError("synth takes exactly one of a descriptor, --swap or --consensus");
  const FieldFormat format = parse_format(format_name);
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());

  if (swap_seed) {
    const SwapScenario s = swap_scenario(*swap_seed);
    const std::string ext = extension(format);
    save_field(s.first, dir / ("first" + ext), format);
    save_field(s.second, dir / ("second" + ext), format);
    Json truth;
    truth["scenario"] = "swap";
    truth["seed"] = *swap_seed;
    truth["first"] = "first" + ext;
    truth["second"] = "second" + ext;
    truth["blobs_first"] = blobs_json(s.blobs_first);
    truth["blobs_second"] = blobs_json(s.blobs_second);
    truth["correspondence"] = s.correspondence;
    write_file_atomic(dir / "truth.json", dump_json(truth) + "\n");
    return 0;
  }
  if (consensus_seed) {
    const ConsensusConfig config;
    Json extra;
    extra["scenario"] = "consensus";
    extra["seed"] = *consensus_seed;
    write_facet_set(consensus_facets(config, *consensus_seed), dir, format, extra);
    return 0;
  }

  const Json d = read_json(descriptor);
  const auto width = get_opt<int>(d, "width"), height = get_opt<int>(d, "height");
  if (!width || !height) throw InputError("descriptor needs 'width' and 'height'");
  std::vector<BlobSpec> blobs;
  if (d.contains("blobs")) {
    int index = 0;
    for (const auto& b : d["blobs"]) blobs.push_back(read_blob(b, index++));
  }
  if (!d.contains("facets") || !d["facets"].is_array()) throw InputError("descriptor needs a 'facets' list");
  std::vector<std::vector<Perturbation>> plans;
  std::vector<std::uint64_t> seeds;
  for (const auto& f : d["facets"]) {
    seeds.push_back(get_opt<std::uint64_t>(f, "seed").value_or(0));
    std::vector<Perturbation> plan;
    if (f.contains("perturbations")) {
      for (const auto& p : f["perturbations"]) plan.push_back(read_perturbation(p));
    }
    plans.push_back(std::move(plan));
  }
  ScalarField base = gen_blobs(*width, *height, blobs, get_opt<double>(d, "background").value_or(0.0));
  Json extra;
  extra["scenario"] = "descriptor";
  write_facet_set(make_facet_set(std::move(base), std::move(blobs), std::move(plans), std::move(seeds)),
                  dir, format, extra);
  return 0;
}

// ---------------------------------------------------------------- viz

constexpr std::array<std::array<std::uint8_t, 3>, 12> kPalette{{
    {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
    {245, 130, 48}, {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
    {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {170, 110, 40},
}};
constexpr std::array<std::uint8_t, 3> kGrey{128, 128, 128};

int cmd_viz(const Options& opts, const std::vector<std::string>& paths, const std::string& tracks_path,
            const std::string& out_dir, std::size_t min_support_override) {
  if (out_dir.empty()) throw InputError("viz needs --out-dir");
  const Connectivity conn = parse_connectivity(opts.connectivity);
  std::size_t min_support = 0;
  const GlobalTracks tracks = tracks_from_json(read_json(tracks_path), &min_support);
  if (min_support_override) min_support = min_support_override;
  if (tracks.facet_count != paths.size()) {
    throw InputError("tracks cover " + std::to_string(tracks.facet_count) + " facets but " +
                     std::to_string(paths.size()) + " fields were given");
  }
  std::vector<ScalarField> fields;
  std::vector<FeatureSet> sets;
  for (const auto& p : paths) {
    fields.push_back(load_field(p));
    sets.push_back(make_feature_set(fields.back(), conn));
  }
  // colour[t][i]: palette index, or -1 for grey.
  std::vector<std::vector<int>> colour(paths.size());
  std::vector<std::vector<char>> covered(paths.size());
  for (std::size_t t = 0; t < paths.size(); ++t) {
    colour[t].assign(sets[t].diagram.size(), -1);
    covered[t].assign(sets[t].diagram.size(), 0);
  }
  for (const auto& track : tracks.tracks) {
    const int c = track.support() >= min_support ? static_cast<int>(track.id % kPalette.size()) : -1;
    for (const auto& v : track.members) {
      if (v.facet >= paths.size() || v.feature >= sets[v.facet].diagram.size()) {
        throw InputError("track " + std::to_string(track.id) + " references missing feature (" +
                         std::to_string(v.facet) + ", " + std::to_string(v.feature) + ")");
      }
      if (covered[v.facet][v.feature]) throw InputError("feature listed in two tracks");
      covered[v.facet][v.feature] = 1;
      colour[v.facet][v.feature] = c;
    }
  }
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  Json written = Json::array();
  for (std::size_t t = 0; t < paths.size(); ++t) {
    const int w = fields[t].width(), h = fields[t].height();
    const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    const std::size_t offset = bytes.size();
    bytes.resize(offset + 3 * fields[t].size(), 0);
    std::vector<std::size_t> order(sets[t].masks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Larger masks first so nested features stay visible.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return sets[t].masks[a].pixels.size() > sets[t].masks[b].pixels.size();
    });
    for (const std::size_t i : order) {
      const auto& rgb = colour[t][i] < 0 ? kGrey : kPalette[static_cast<std::size_t>(colour[t][i])];
      for (const std::size_t p : sets[t].masks[i].pixels) {
        std::copy(rgb.begin(), rgb.end(), bytes.begin() + static_cast<std::ptrdiff_t>(offset + 3 * p));
      }
    }
    const std::string name = "facet_" + std::to_string(t) + ".ppm";
    write_file_atomic(dir / name, bytes);
    written.push_back(name);
  }
  Json j;
  j["images"] = std::move(written);
  j["min_support"] = min_support;
  emit(opts, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological matching of likelihood maps"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--connectivity", opts.connectivity, "Pixel adjacency: four or eight")
      ->capture_default_str();
  app.add_option("-o,--out", opts.out, "Write JSON here (atomically) instead of standard output");

  std::string field_a, field_b;
  auto* diagram = app.add_subcommand("diagram", "Persistence diagram of a field");
  diagram->add_option("field", field_a)->required();

  double tau = kDefaultTauPrimary;
  bool wasserstein = false;
  auto* pair = app.add_subcommand("match-pair", "Match the features of two fields");
  pair->add_option("first", field_a)->required();
  pair->add_option("second", field_b)->required();
  pair->add_option("--tau", tau, "Similarity threshold")->capture_default_str();
  pair->add_flag("--wasserstein", wasserstein, "Use the Wasserstein baseline instead");

  std::vector<std::string> paths;
  std::size_t min_support = 0;
  auto* global = app.add_subcommand("match-global", "Track features across facets");
  global->add_option("fields", paths, "Facet fields in order")->required();
  global->add_option("--tau", tau, "Similarity threshold")->capture_default_str();
  global->add_option("--min-support", min_support, "Stable track support (0 = ceil(3T/4))");

  std::string manifest;
  bool gradient = false;
  auto* loss = app.add_subcommand("loss", "Evaluate losses from a manifest");
  loss->add_option("manifest", manifest)->required();
  loss->add_flag("--gradient", gradient, "Include sparse gradients");

  int window = 256, stride = 0;
  double threshold = 0.5;
  bool fit_window = false;
  auto* metrics = app.add_subcommand("metrics", "Betti error and matched feature error");
  metrics->add_option("prediction", field_a)->required();
  metrics->add_option("ground_truth", field_b)->required();
  metrics->add_option("--window", window)->capture_default_str();
  metrics->add_option("--stride", stride, "Defaults to the window");
  metrics->add_option("--threshold", threshold)->capture_default_str();
  metrics->add_flag("--fit-window", fit_window, "Shrink the window to fit the image");
  metrics->add_option("--tau", tau)->capture_default_str();

  std::string descriptor, out_dir, format = "csv";
  std::optional<std::uint64_t> swap_seed, consensus_seed;
  auto* synth = app.add_subcommand("synth", "Generate synthetic facets");
  synth->add_option("descriptor", descriptor, "Scenario descriptor JSON");
  synth->add_option("--swap", swap_seed, "Write a two-blob swap scenario for this seed");
  synth->add_option("--consensus", consensus_seed, "Write a 4-facet consensus set for this seed");
  synth->add_option("--out-dir", out_dir)->required();
  synth->add_option("--format", format, "csv, raw-f32 or pgm")->capture_default_str();

  std::string tracks_path;
  auto* viz = app.add_subcommand("viz", "Render track identities as PPM images");
  viz->add_option("fields", paths)->required();
  viz->add_option("--tracks", tracks_path)->required();
  viz->add_option("--out-dir", out_dir)->required();
  viz->add_option("--min-support", min_support, "Override the tracks file's min_support");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*diagram) return cmd_diagram(opts, field_a);
    if (*pair) return cmd_match_pair(opts, field_a, field_b, tau, wasserstein);
    if (*global) return cmd_match_global(opts, paths, tau, min_support);
    if (*loss) return cmd_loss(opts, manifest, gradient);
    if (*metrics) return cmd_metrics(opts, field_a, field_b, window, stride, threshold, fit_window, tau);
    if (*synth) return cmd_synth(descriptor, swap_seed, consensus_seed, out_dir, format);
    if (*viz) return cmd_viz(opts, paths, tracks_path, out_dir, min_support);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitInput;
}
