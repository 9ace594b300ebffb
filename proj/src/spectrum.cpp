#include "fano/spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace fano
{

std::vector<double> UniformGrid(int points, double lo, double hi)
{
  if (points < 1)
  {
    throw ModelError("grid needs at least one point");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1)
  {
    grid[0] = lo;
    return grid;
  }
  const double h = (hi - lo) / (points - 1);
  for (int i = 0; i < points; i++)
  {
    grid[static_cast<std::size_t>(i)] = lo + i * h;
  }
  grid.back() = hi;
  return grid;
}

double GreenSpectrum(const ChainModel &model, double omega)
{
  if (std::abs(omega) == band_edge)
  {
    throw BranchPointError("spectrum requested at the band edge");
  }
  if (std::abs(omega) > band_edge)
  {
    return 0.0;
  }
  const Complex eta = Eta(model, {Complex(omega, 0.0), Sheet::I});
  if (eta == 0.0)
  {
    return 0.0;
  }
  return -model.transition_weight / std::numbers::pi * (1.0 / eta).imag();
}

std::vector<double> GreenSpectrum(const ChainModel &model, std::span<const double> omega)
{
  std::vector<double> out;
  out.reserve(omega.size());
  for (double x : omega)
  {
    out.push_back(GreenSpectrum(model, x));
  }
  return out;
}

ResonanceComponent ResonanceLine(const ChainModel &model, const DiscreteState &state,
                                 std::span<const double> omega)
{
  if (state.cls != StateClass::Resonance)
  {
    throw ModelError("resonance component requested for a " + ToString(state.cls) + " state");
  }
  ResonanceComponent c;
  c.state = state;
  c.weights = Weights(model, state);
  c.state.norm = c.weights.norm;
  c.da = DegreeOfAsymmetry(c.weights.norm);
  c.q = FanoQ(c.da, c.weights.d_gamma_d_ed >= 0.0 ? 1 : -1);
  c.unreliable = state.near_degenerate;

  const double eps = state.Energy(), gamma = state.Width();
  const double pre = model.transition_weight / std::numbers::pi;
  c.f.reserve(omega.size());
  c.f_sym.reserve(omega.size());
  c.f_anti.reserve(omega.size());
  for (double x : omega)
  {
    const double dx = x - eps;
    const double den = dx * dx + gamma * gamma;
    const double fs = pre * gamma / den * c.weights.d_eps_d_ed;
    const double fa = pre * dx / den * c.weights.d_gamma_d_ed;
    c.f_sym.push_back(fs);
    c.f_anti.push_back(fa);
    c.f.push_back(fs + fa);
  }
  return c;
}

double DegreeOfAsymmetry(Complex norm)
{
  const double d_gamma = -norm.imag(), d_eps = norm.real();
  if (d_eps == 0.0)
  {
    return std::copysign(std::numeric_limits<double>::infinity(), d_gamma);
  }
  return d_gamma / d_eps;
}

double FanoQ(double da, int sign_dgamma)
{
  const double sign = sign_dgamma >= 0 ? 1.0 : -1.0;
  if (da == 0.0)
  {
    return std::numeric_limits<double>::infinity();
  }
  if (std::isinf(da))
  {
    return da > 0 ? sign : -sign;
  }
  return (1.0 + sign * std::sqrt(1.0 + da * da)) / da;
}

double FanoProfile(double x, double q)
{
  return (x + q) * (x + q) / (x * x + 1.0);
}

std::string RomanLabel(int index)
{
  static const std::pair<int, const char *> table[] = {
      {1000, "m"}, {900, "cm"}, {500, "d"}, {400, "cd"}, {100, "c"}, {90, "xc"}, {50, "l"},
      {40, "xl"},  {10, "x"},   {9, "ix"},  {5, "v"},    {4, "iv"},  {1, "i"}};
  std::string out;
  for (const auto &[value, numeral] : table)
  {
    while (index >= value)
    {
      out += numeral;
      index -= value;
    }
  }
  return out;
}

SpectrumGrid Decompose(const ChainModel &model, std::span<const double> omega,
                       const RootOptions &opts)
{
  const auto states = AttachWeights(model, DiscreteStates(model, opts));

  SpectrumGrid grid;
  grid.omega.assign(omega.begin(), omega.end());
  grid.total = GreenSpectrum(model, omega);
  grid.continuum_residual = grid.total;

  for (const auto &s : states)
  {
    if (s.cls == StateClass::BoundI || s.cls == StateClass::BIC)
    {
      grid.bound_lines.push_back({s.Energy(), s.norm.real() * model.transition_weight});
    }
  }

  int label = 1;
  for (const auto &s : Resonances(states))
  {
    auto c = ResonanceLine(model, s, omega);
    c.label = RomanLabel(label++);
    for (std::size_t i = 0; i < omega.size(); i++)
    {
      grid.continuum_residual[i] -= c.f[i];
    }
    grid.near_ep_warning = grid.near_ep_warning || c.unreliable;
    grid.resonances.push_back(std::move(c));
  }
  return grid;
}

}  // namespace fano
