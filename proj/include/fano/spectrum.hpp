#ifndef FANO_SPECTRUM_HPP
#define FANO_SPECTRUM_HPP

#include <span>
#include <string>
#include <vector>
#include "fano/dispersion.hpp"
#include "fano/states.hpp"

namespace fano
{

// Discrete (energy, weight) line from a real eigenstate; never broadened onto the grid.
struct BoundLine
{
  double energy;
  double weight;
};

// Contribution of one resonance to the absorption spectrum, split into the Lorentzian
// part f_sym (weight d eps / d E_d) and the dispersive part f_anti (weight d gamma / d E_d).
struct ResonanceComponent
{
  std::string label;  // i, ii, iii, ... by ascending Re z
  DiscreteState state;
  StateWeights weights;
  std::vector<double> f, f_sym, f_anti;
  double da = 0.0;
  double q = 0.0;
  bool unreliable = false;  // near-degenerate (close to an exceptional point)
};

struct SpectrumGrid
{
  std::vector<double> omega;
  std::vector<double> total;
  std::vector<ResonanceComponent> resonances;
  std::vector<double> continuum_residual;  // total - sum of resonance components
  std::vector<BoundLine> bound_lines;
  bool near_ep_warning = false;
};

// Uniform grid over [lo, hi]; the default resolves widths down to ~1e-3.
std::vector<double> UniformGrid(int points = 2001, double lo = -0.999, double hi = 0.999);

// F(Omega) = -(w / pi) Im 1 / (Omega - E_d - g^2 Sigma^+(Omega + i0)) for Omega inside the
// band, 0 outside it (that weight lives in the bound lines). Throws BranchPointError at +-1.
double GreenSpectrum(const ChainModel &model, double omega);
std::vector<double> GreenSpectrum(const ChainModel &model, std::span<const double> omega);

// f = f_sym + f_anti for a resonance state; the state's norm must already be attached or
// is computed here.
ResonanceComponent ResonanceLine(const ChainModel &model, const DiscreteState &state,
                                 std::span<const double> omega);

// DA = (d gamma / d E_d) / (d eps / d E_d) = -Im N / Re N. Signed infinity when Re N = 0.
double DegreeOfAsymmetry(Complex norm);

// q = (1 +- sqrt(1 + DA^2)) / DA, the sign following d gamma / d E_d. DA = 0 gives +inf
// (pure Lorentzian); DA = +-inf gives the limit +-1.
double FanoQ(double da, int sign_dgamma);

// (x + q)^2 / (x^2 + 1).
double FanoProfile(double x, double q);

// Lower-case roman numeral, 1 -> "i".
std::string RomanLabel(int index);

SpectrumGrid Decompose(const ChainModel &model, std::span<const double> omega,
                       const RootOptions &opts = {});

}  // namespace fano

#endif  // FANO_SPECTRUM_HPP
