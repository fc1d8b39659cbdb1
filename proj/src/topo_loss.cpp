#include "topomatch/topo_loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topomatch/error.hpp"

namespace topomatch {

namespace {

struct CriticalValues {
  double birth;       // P_b in g-scale
  double death;       // P_d in g-scale, 1 for essential features
  std::size_t birth_index;
  std::optional<std::size_t> death_index;
};

CriticalValues read_critical(const ScalarField& field, const PersistenceFeature& feature) {
  if (!field.contains(feature.birth_pixel) ||
      (feature.death_pixel && !field.contains(*feature.death_pixel))) {
    throw InputError("feature critical pixel outside the field");
  }
  CriticalValues v;
  v.birth_index = field.index(feature.birth_pixel.row, feature.birth_pixel.col);
  v.birth = filtration_value(field[v.birth_index]);
  if (feature.death_pixel) {
    v.death_index = field.index(feature.death_pixel->row, feature.death_pixel->col);
    v.death = filtration_value(field[*v.death_index]);
  } else {
    v.death = 1.0;
  }
  return v;
}

void check_same_shape(const ScalarField& a, int width, int height, const char* what) {
  if (a.width() != width || a.height() != height) {
    throw InputError(std::string(what) + ": dimension mismatch");
  }
}

ConsistencyLoss consistency_kernel(const std::vector<FacetGroup>& groups, const char* name) {
  if (groups.empty()) throw InputError(std::string(name) + " needs at least one group");
  ConsistencyLoss out;
  const double group_scale = 1.0 / static_cast<double>(groups.size());

  for (std::size_t b = 0; b < groups.size(); ++b) {
    const FacetGroup& group = groups[b];
    auto accumulate = [&](const std::set<Vertex>& members, TermKind kind) {
      if (members.empty()) return;
      const double scale = group_scale / static_cast<double>(members.size());
      double sum = 0.0;
      for (const Vertex& v : members) {
        const auto& field = group.fields.at(v.facet);
        const auto& feature = group.diagrams.at(v.facet).features.at(v.feature);
        const CriticalLossTerm term =
            kind == TermKind::Match ? loss_match(field, feature) : loss_diag(field, feature);
        sum += term.value;
        for (const auto& g : term.gradient) {
          out.gradient[{b, v.facet, g.pixel}] += scale * g.value;
        }
      }
      out.value += scale * sum;
    };
    accumulate(group.classification.matched, TermKind::Match);
    accumulate(group.classification.unmatched, TermKind::Diag);
  }
  return out;
}

}  // namespace

CriticalLossTerm loss_match(const ScalarField& field, const PersistenceFeature& feature) {
  const CriticalValues v = read_critical(field, feature);
  CriticalLossTerm term;
  term.kind = TermKind::Match;
  term.value = v.birth * v.birth + (1.0 - v.death) * (1.0 - v.death);
  // dg/df = -1 at every pixel.
  term.gradient.push_back({v.birth_index, -2.0 * v.birth});
  if (v.death_index) term.gradient.push_back({*v.death_index, 2.0 * (1.0 - v.death)});
  return term;
}

CriticalLossTerm loss_diag(const ScalarField& field, const PersistenceFeature& feature) {
  const CriticalValues v = read_critical(field, feature);
  CriticalLossTerm term;
  term.kind = TermKind::Diag;
  const double gap = v.birth - v.death;
  term.value = gap * gap;
  term.gradient.push_back({v.birth_index, -2.0 * gap});
  if (v.death_index) term.gradient.push_back({*v.death_index, 2.0 * gap});
  return term;
}

FacetGroup make_facet_group(std::vector<ScalarField> fields, double tau,
                            Connectivity connectivity, std::size_t min_support) {
  if (fields.empty()) throw InputError("a facet group needs at least one field");
  FacetGroup group;
  GlobalTracks tracks;
  if (fields.size() == 1) {
    group.diagrams.push_back(compute_diagram(fields.front(), connectivity));
    tracks.facet_count = 1;
    for (std::size_t i = 0; i < group.diagrams.front().size(); ++i) {
      tracks.tracks.push_back({i, {{0, i}}});
    }
  } else {
    GlobalMatchResult global = match_global(fields, tau, connectivity);
    for (auto& set : global.facets) group.diagrams.push_back(std::move(set.diagram));
    tracks = std::move(global.tracks);
  }
  group.classification = min_support == 0 ? classify_stability(tracks)
                                          : classify_stability(tracks, min_support);
  group.fields = std::move(fields);
  return group;
}

FacetGroup make_facet_group(std::vector<ScalarField> fields,
                            std::vector<PersistenceDiagram> diagrams,
                            StabilityClassification classification) {
  if (fields.empty() || fields.size() != diagrams.size()) {
    throw InputError("a facet group needs one diagram per field");
  }
  auto check = [&](const Vertex& v) {
    if (v.facet >= diagrams.size() || v.feature >= diagrams[v.facet].size()) {
      throw InputError("classification references feature [" + std::to_string(v.facet) + "," +
                       std::to_string(v.feature) + "] which does not exist");
    }
  };
  for (const auto& v : classification.matched) {
    check(v);
    if (classification.unmatched.count(v)) {
      throw InputError("feature listed as both matched and unmatched");
    }
  }
  for (const auto& v : classification.unmatched) check(v);
  for (std::size_t t = 0; t < fields.size(); ++t) {
    check_same_shape(fields[t], fields.front().width(), fields.front().height(), "facet group");
  }
  return {std::move(fields), std::move(diagrams), std::move(classification)};
}

ConsistencyLoss loss_intra(const std::vector<FacetGroup>& groups) {
  return consistency_kernel(groups, "loss_intra");
}

ConsistencyLoss loss_temp(const std::vector<FacetGroup>& groups) {
  return consistency_kernel(groups, "loss_temp");
}

double dice_loss(const ScalarField& prediction, const BinaryMask& target) {
  check_same_shape(prediction, target.width(), target.height(), "dice_loss");
  double intersection = 0.0, pred_sum = 0.0, target_sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double t = target[i] ? 1.0 : 0.0;
    intersection += prediction[i] * t;
    pred_sum += prediction[i];
    target_sum += t;
  }
  return 1.0 - (2.0 * intersection + kDiceEpsilon) / (pred_sum + target_sum + kDiceEpsilon);
}

double cross_entropy_loss(const ScalarField& prediction, const ScalarField& target) {
  check_same_shape(prediction, target.width(), target.height(), "cross_entropy_loss");
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double p = std::clamp(prediction[i], kLogEpsilon, 1.0 - kLogEpsilon);
    const double t = target[i];
    sum -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(prediction.size());
}

double cross_entropy_loss(const ScalarField& prediction, const BinaryMask& target) {
  check_same_shape(prediction, target.width(), target.height(), "cross_entropy_loss");
  return cross_entropy_loss(prediction, target.to_field());
}

double supervised_loss(const ScalarField& prediction, const BinaryMask& target) {
  return 0.5 * dice_loss(prediction, target) + 0.5 * cross_entropy_loss(prediction, target);
}

double ramp_up_weight(long iteration, long total, double k) {
  if (total <= 0) throw InputError("ramp_up_weight: total iterations must be positive");
  if (iteration < 0 || iteration > total) {
    throw InputError("ramp_up_weight: iteration " + std::to_string(iteration) +
                     " outside [0, " + std::to_string(total) + "]");
  }
  const double remaining = 1.0 - static_cast<double>(iteration) / static_cast<double>(total);
  return k * std::exp(-5.0 * remaining * remaining);
}

std::vector<double> ema_update(std::span<const double> teacher, std::span<const double> student,
                               double alpha) {
  if (teacher.size() != student.size()) {
    throw InputError("ema_update: teacher has " + std::to_string(teacher.size()) +
                     " parameters, student " + std::to_string(student.size()));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("ema_update: alpha outside [0,1]");
  std::vector<double> out(teacher.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = alpha * teacher[i] + (1.0 - alpha) * student[i];
  }
  return out;
}

double total_loss(double l_sup, double l_cons, double l_intra, double l_temp,
                  const LossWeights& weights) {
  return l_sup + weights.cons * l_cons + weights.intra * l_intra + weights.temp * l_temp;
}

double total_loss(double l_sup, double l_cons, double l_intra, double l_temp, double lambda_cons,
                  double lambda_intra, double lambda_temp) {
  return total_loss(l_sup, l_cons, l_intra, l_temp, {lambda_cons, lambda_intra, lambda_temp});
}

}  // namespace topomatch
