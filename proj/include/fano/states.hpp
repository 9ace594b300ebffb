#ifndef FANO_STATES_HPP
#define FANO_STATES_HPP

#include <span>
#include <vector>
#include "fano/dispersion.hpp"

namespace fano
{

// Residue data of one discrete state.
//
// The normalization constant N = <d~|phi><d|phi> = (1 - g^2 Sigma'(z))^{-1} is also the
// derivative dz/dE_d of the eigenvalue with respect to the impurity level, so its real part
// drives the symmetric (Lorentzian) part of a resonance line and minus its imaginary part
// the antisymmetric part.
struct StateWeights
{
  Complex norm = 1.0;
  double d_eps_d_ed = 0.0;    // Re dz/dE_d
  double d_gamma_d_ed = 0.0;  // -Im dz/dE_d
  double bound_weight = 0.0;  // |<d|phi>|^2 for real states on sheet I (and BICs)
};

// Below this |1 - g^2 Sigma'| the state is treated as sitting on an exceptional point.
inline constexpr double ep_norm_floor = 1e-10;

// N = (1 - g^2 Sigma'(z))^{-1} on the state's sheet. Throws NumericalError at (or too near)
// an exceptional point, where the normalization diverges.
Complex Normalization(const ChainModel &model, const DiscreteState &state);

// Real positive residue of G_dd at a bound pole. Throws ModelError for other classes.
double BoundWeight(const ChainModel &model, const DiscreteState &state);

StateWeights Weights(const ChainModel &model, const DiscreteState &state);

// Fills DiscreteState::norm for every state.
std::vector<DiscreteState> AttachWeights(const ChainModel &model,
                                         std::span<const DiscreteState> states);

}  // namespace fano

#endif  // FANO_STATES_HPP
