#ifndef FANO_DISPERSION_HPP
#define FANO_DISPERSION_HPP

#include <span>
#include <string>
#include <vector>
#include "fano/model.hpp"
#include "fano/selfenergy.hpp"

namespace fano
{

enum class StateClass
{
  BoundI,         // real, sheet I, outside the band
  Virtual,        // real, sheet II, outside the band (anti-bound)
  Resonance,      // Im z < 0, sheet II
  AntiResonance,  // Im z > 0, conjugate partner of a resonance
  BIC             // real, inside the band, zero width
};

std::string ToString(StateClass cls);
StateClass ParseStateClass(const std::string &name);

// One discrete root of eta^+(z) = z - E_d - g^2 Sigma^+(z) = 0.
struct DiscreteState
{
  SheetedEnergy z;
  StateClass cls = StateClass::Resonance;
  Complex norm = 0.0;  // filled by AttachWeights (states module)
  double residual = 0.0;
  bool near_degenerate = false;

  double Energy() const { return z.value.real(); }
  double Width() const { return -z.value.imag(); }
};

struct RootOptions
{
  // |eta| tolerance, relative to max(1, |z|) so that far-away nonanalytic roots at tiny g
  // are judged on the same footing as roots inside the band.
  double root_tol = 1e-12;
  double dedup_tol = 1e-9;
  double degenerate_tol = 1e-6;
  bool include_anti_resonances = false;
  int max_newton_iterations = 100;
};

// Real coefficients, in ascending powers of z, of the polynomial whose roots contain every
// discrete solution: degree 2 n_d for the semi-infinite chain, 4 for the infinite chain.
// Trailing zero coefficients are trimmed, so the leading coefficient is nonzero.
std::vector<double> PolynomialCoefficients(const ChainModel &model);

// eta^+(z) and its z-derivatives (order 0, 1, 2) on the tagged sheet.
Complex Eta(const ChainModel &model, SheetedEnergy z);
Complex EtaDeriv(const ChainModel &model, SheetedEnergy z, int order);

// Scale-aware residual used for root acceptance.
double ScaledResidual(const ChainModel &model, SheetedEnergy z);

// BIC impurity energies -cos(pi k / n_d), k = 1 .. n_d - 1, ascending. Throws ModelError
// for the infinite chain.
std::vector<double> BicEnergies(const ChainModel &model);

// Newton iteration on eta^+ from a seed, continuing the sheet tag along each step. Roots in
// `avoid` are deflated out (Newton-Maehly) so that close pairs are not merged. Throws
// NumericalError with the iterate trace if it does not converge.
DiscreteState PolishRoot(const ChainModel &model, SheetedEnergy seed,
                         const RootOptions &opts = {},
                         std::span<const Complex> avoid = {});

// Polishes each seed and classifies it; seeds keep their sheet tags.
std::vector<DiscreteState> PolishSeeds(const ChainModel &model,
                                       std::span<const SheetedEnergy> seeds,
                                       const RootOptions &opts = {});

// All discrete states: polynomial roots, polished on eta^+ with the sheet chosen by
// location, verified, deduplicated and classified. Sorted by class then Re z. Anti-resonances
// are dropped unless opts.include_anti_resonances is set.
std::vector<DiscreteState> DiscreteStates(const ChainModel &model, const RootOptions &opts = {});

// Resonances only, ascending Re z (the (i), (ii), ... labelling order).
std::vector<DiscreteState> Resonances(std::span<const DiscreteState> states);

}  // namespace fano

#endif  // FANO_DISPERSION_HPP
