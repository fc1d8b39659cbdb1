#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "topomatch/field.hpp"
#include "topomatch/global_match.hpp"
#include "topomatch/persistence.hpp"

namespace topomatch {

inline constexpr double kDefaultLambdaIntra = 0.001;
inline constexpr double kDefaultLambdaTemp = 0.001;
inline constexpr double kDefaultRampK = 0.1;
inline constexpr double kDefaultEmaAlpha = 0.999;
inline constexpr double kDiceEpsilon = 1e-6;
inline constexpr double kLogEpsilon = 1e-7;

enum class TermKind { Match, Diag };

struct PixelGradient {
  std::size_t pixel = 0;  // row-major index
  double value = 0.0;     // d loss / d likelihood
};

struct CriticalLossTerm {
  std::size_t facet = 0;
  std::size_t feature = 0;
  TermKind kind = TermKind::Match;
  double value = 0.0;
  std::vector<PixelGradient> gradient;  // birth pixel first, death pixel second
};

// (P_b)^2 + (1 - P_d)^2 with P read in g = 1 - f. Essential features use
// P_d = 1 and get no death gradient.
CriticalLossTerm loss_match(const ScalarField& field, const PersistenceFeature& feature);

// (P_b - P_d)^2.
CriticalLossTerm loss_diag(const ScalarField& field, const PersistenceFeature& feature);

// The B facets of one image with their diagrams and stable/transient split.
struct FacetGroup {
  std::vector<ScalarField> fields;
  std::vector<PersistenceDiagram> diagrams;
  StabilityClassification classification;
};

// Runs MATCH-Global (or the trivial single-facet graph) and classifies
// features. `min_support` = 0 selects ceil(3T/4).
FacetGroup make_facet_group(std::vector<ScalarField> fields, double tau = kDefaultTauPrimary,
                            Connectivity connectivity = Connectivity::Eight,
                            std::size_t min_support = 0);

// Caller-supplied classification. Vertices must exist and must not appear in
// both sets; vertices in neither set are left out of the loss.
FacetGroup make_facet_group(std::vector<ScalarField> fields,
                            std::vector<PersistenceDiagram> diagrams,
                            StabilityClassification classification);

struct GradientKey {
  std::size_t group = 0;
  std::size_t facet = 0;
  std::size_t pixel = 0;

  friend auto operator<=>(const GradientKey&, const GradientKey&) = default;
};

using GradientMap = std::map<GradientKey, double>;

struct ConsistencyLoss {
  double value = 0.0;
  GradientMap gradient;
};

// mean over groups of [mean_matched L_match + mean_unmatched L_diag]; a mean
// over an empty set contributes 0. Throws InputError on zero groups.
ConsistencyLoss loss_intra(const std::vector<FacetGroup>& groups);
// Same kernel over temporal snapshot groups.
ConsistencyLoss loss_temp(const std::vector<FacetGroup>& groups);

// Soft Dice: 1 - (2 sum p g + eps) / (sum p + sum g + eps).
double dice_loss(const ScalarField& prediction, const BinaryMask& target);
// Mean binary cross-entropy, prediction clamped to [eps, 1 - eps] inside log.
double cross_entropy_loss(const ScalarField& prediction, const ScalarField& target);
double cross_entropy_loss(const ScalarField& prediction, const BinaryMask& target);
// 0.5 * Dice + 0.5 * CE.
double supervised_loss(const ScalarField& prediction, const BinaryMask& target);

// k * exp(-5 (1 - iteration/total)^2).
double ramp_up_weight(long iteration, long total, double k = kDefaultRampK);

// alpha * teacher + (1 - alpha) * student, elementwise.
std::vector<double> ema_update(std::span<const double> teacher, std::span<const double> student,
                               double alpha = kDefaultEmaAlpha);

struct LossWeights {
  double cons = 0.0;
  double intra = kDefaultLambdaIntra;
  double temp = kDefaultLambdaTemp;
};

double total_loss(double l_sup, double l_cons, double l_intra, double l_temp,
                  const LossWeights& weights);
double total_loss(double l_sup, double l_cons, double l_intra, double l_temp, double lambda_cons,
                  double lambda_intra = kDefaultLambdaIntra,
                  double lambda_temp = kDefaultLambdaTemp);

struct LossReport {
  double l_sup = 0.0;
  double l_cons = 0.0;
  double l_intra = 0.0;
  double l_temp = 0.0;
  double l_total = 0.0;
  LossWeights weights;
  GradientMap intra_gradient;
  GradientMap temp_gradient;
  // Image width of each group, used to print gradient pixels as [row, col].
  std::vector<int> intra_widths;
  std::vector<int> temp_widths;
};

}  // namespace topomatch
