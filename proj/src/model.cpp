#include "fano/model.hpp"

#include <cmath>

namespace fano
{

ChainModel Validate(const ChainModel &model)
{
  auto finite = [](double x) { return std::isfinite(x); };
  if (model.IsSemiInfinite() && model.n_d < 1)
  {
    throw ModelError("n_d must be >= 1 for the semi-infinite chain (got " +
                     std::to_string(model.n_d) + ")");
  }
  if (!finite(model.e_d))
  {
    throw ModelError("e_d must be finite");
  }
  if (!finite(model.g) || model.g < 0.0)
  {
    throw ModelError("g must be finite and >= 0");
  }
  if (!finite(model.v) || model.v <= 0.0)
  {
    throw ModelError("v must be finite and > 0");
  }
  if (!finite(model.transition_weight) || model.transition_weight <= 0.0)
  {
    throw ModelError("transition_weight must be finite and > 0");
  }
  if (!finite(model.e_c))
  {
    throw ModelError("e_c must be finite");
  }
  return model;
}

ChainModel SemiInfiniteChain(int n_d, double e_d, double g, double v)
{
  ChainModel model;
  model.chain = ChainKind::SemiInfinite;
  model.n_d = n_d;
  model.e_d = e_d;
  model.g = g;
  model.v = v;
  return Validate(model);
}

ChainModel InfiniteChain(double e_d, double g, double v)
{
  ChainModel model;
  model.chain = ChainKind::Infinite;
  model.n_d = 0;
  model.e_d = e_d;
  model.g = g;
  model.v = v;
  return Validate(model);
}

ChainModel WithCoupling(ChainModel model, double g, double e_d)
{
  model.g = g;
  model.e_d = e_d;
  return model;
}

std::string ToString(ChainKind kind)
{
  return kind == ChainKind::SemiInfinite ? "SemiInfinite" : "Infinite";
}

ChainKind ParseChainKind(const std::string &name)
{
  if (name == "SemiInfinite" || name == "semi" || name == "semi-infinite")
  {
    return ChainKind::SemiInfinite;
  }
  if (name == "Infinite" || name == "infinite")
  {
    return ChainKind::Infinite;
  }
  throw ModelError("unknown chain variant \"" + name + "\"");
}

}  // namespace fano
