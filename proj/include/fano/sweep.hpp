#ifndef FANO_SWEEP_HPP
#define FANO_SWEEP_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>
#include "fano/dispersion.hpp"

namespace fano
{

enum class SweepParameter
{
  Ed,
  G
};

std::string ToString(SweepParameter p);
SweepParameter ParseSweepParameter(const std::string &name);

struct TrajectoryPoint
{
  double param;
  DiscreteState state;
  bool collision = false;   // another branch within collision_tol (EP neighbourhood)
  bool bic_marker = false;  // exact BIC parameter value, z pinned to the real axis
};

struct Branch
{
  std::string label;
  std::vector<TrajectoryPoint> points;
};

struct Trajectory
{
  SweepParameter parameter = SweepParameter::Ed;
  std::vector<double> values;
  std::vector<Branch> branches;
};

struct TraceOptions
{
  // A sub-step is halved while the Newton correction exceeds this fraction of the predicted
  // move in z.
  double max_correction_ratio = 0.1;
  int max_halvings = 24;
  double collision_tol = 1e-6;
  RootOptions roots;
};

// Resonance trajectories under a sweep of E_d or g. Each branch is continued with the
// derivative identity dz/dE_d = N as predictor and Newton on eta as corrector. Branches are
// labelled (i), (ii), ... by ascending Re z at values.front(). Throws ModelError if values
// are not sorted.
Trajectory Trace(const ChainModel &model, SweepParameter parameter,
                 std::span<const double> values, const TraceOptions &opts = {});

// dz/dp for a root at the model's parameters.
Complex RootVelocity(const ChainModel &model, SweepParameter parameter, SheetedEnergy z);

// One predictor-corrector step of size h from a root of `model`; returns the corrected root
// and writes |corrected - predicted| to *correction.
DiscreteState ContinuationStep(const ChainModel &model, SweepParameter parameter,
                               const DiscreteState &from, double h, double *correction,
                               const RootOptions &opts = {});

struct EpSeed
{
  double g;
  double e_d;
  Complex z;
  double pair_distance;
};

struct EpResult
{
  double g;
  double e_d;
  Complex z;
  double res_eta;
  double res_eta_prime;
  int iterations = 0;
};

struct EpOptions
{
  double tol = 1e-10;
  int max_iterations = 100;
};

// Solves eta = 0, d eta / dz = 0 for (Re z, Im z, g, E_d) by damped Newton from a seed,
// with z on the resonance sheet. Throws NumericalError on non-convergence or if the
// iteration lands on g <= 0.
EpResult FindEp(const ChainModel &model, const EpSeed &seed, const EpOptions &opts = {});

// Newton seeds from a (g, E_d) grid scan. Nodes where the closest pair of resonances is a
// local minimum of the pair distance among the grid neighbours are moved towards the
// coalescence point within their neighbourhood (the squared splitting is linearised); those
// whose pair then comes within `threshold` are returned.
std::vector<EpSeed> ScanForEpSeeds(const ChainModel &model, std::pair<double, double> g_range,
                                   std::pair<double, double> ed_range, int g_points,
                                   int ed_points, double threshold = 0.02);

// Scan, refine every seed with FindEp, and drop duplicates. Seeds that fail to converge are
// skipped.
std::vector<EpResult> LocateEps(const ChainModel &model, std::pair<double, double> g_range,
                                std::pair<double, double> ed_range, int g_points,
                                int ed_points, double threshold = 0.02,
                                const EpOptions &opts = {});

// Distance between the two roots closest to the EP eigenvalue after shifting E_d by delta.
double PairSplitting(const ChainModel &model, const EpResult &ep, double delta);

}  // namespace fano

#endif  // FANO_SWEEP_HPP
