#include "fano/states.hpp"

#include <cmath>

namespace fano
{

Complex Normalization(const ChainModel &model, const DiscreteState &state)
{
  if (model.g == 0.0)
  {
    return 1.0;
  }
  const Complex denom = EtaDeriv(model, state.z, 1);
  if (std::abs(denom) < ep_norm_floor)
  {
    throw NumericalError("normalization constant diverges: state is at or too near an "
                         "exceptional point (|1 - g^2 Sigma'| = " +
                         std::to_string(std::abs(denom)) + ")");
  }
  return 1.0 / denom;
}

double BoundWeight(const ChainModel &model, const DiscreteState &state)
{
  if (state.cls != StateClass::BoundI && state.cls != StateClass::BIC)
  {
    throw ModelError("bound weight requested for a " + ToString(state.cls) + " state");
  }
  // A BIC sits inside the band; Sigma' there is the real E + i0 boundary value because
  // Im Sigma vanishes quadratically at the BIC energy.
  return Normalization(model, {.z = {state.z.value, Sheet::I}, .cls = state.cls}).real();
}

StateWeights Weights(const ChainModel &model, const DiscreteState &state)
{
  StateWeights w;
  if (state.cls == StateClass::BoundI || state.cls == StateClass::BIC)
  {
    w.bound_weight = BoundWeight(model, state);
    w.norm = w.bound_weight;
  }
  else
  {
    w.norm = Normalization(model, state);
  }
  w.d_eps_d_ed = w.norm.real();
  w.d_gamma_d_ed = -w.norm.imag();
  return w;
}

std::vector<DiscreteState> AttachWeights(const ChainModel &model,
                                         std::span<const DiscreteState> states)
{
  std::vector<DiscreteState> out(states.begin(), states.end());
  for (auto &s : out)
  {
    s.norm = Weights(model, s).norm;
  }
  return out;
}

}  // namespace fano
