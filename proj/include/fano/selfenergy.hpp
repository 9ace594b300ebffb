#ifndef FANO_SELFENERGY_HPP
#define FANO_SELFENERGY_HPP

#include <complex>
#include <stdexcept>
#include "fano/model.hpp"

namespace fano
{

using Complex = std::complex<double>;

//
// Two-sheeted evaluation of the self-energy over the branch cut [-1, 1].
//
// Sheet I is the physical sheet (Sigma -> 0 at infinity). Sheet II is what one reaches by
// continuing from the upper half of sheet I downward through the cut; resonance poles live
// there in the lower half plane. A real energy inside the band is always read as the
// E + i0 boundary value on the requested sheet.
//

enum class Sheet
{
  I,
  II
};

struct SheetedEnergy
{
  Complex value;
  Sheet sheet = Sheet::I;
};

class BranchPointError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// s(z) = sqrt(z - 1) sqrt(z + 1) on sheet I (s ~ z at infinity), -s(z) on sheet II.
Complex SqrtBranch(SheetedEnergy z);

// Analytic continuation of a sheet tag along the straight segment from z.value to target:
// crossing the real axis strictly inside (-1, 1) flips the sheet, crossing outside does not.
SheetedEnergy ContinueTo(SheetedEnergy z, Complex target);

// Sigma^+(z). Semi-infinite: V^2 / s [1 - (z - s)^{2 n_d}]; infinite: V^2 / s.
Complex SelfEnergy(const ChainModel &model, SheetedEnergy z);

// d^order Sigma / dz^order for order 1 or 2, from the differentiated closed form.
Complex SelfEnergyDeriv(const ChainModel &model, SheetedEnergy z, int order);

// Band dispersion E_k = -cos k, 0 <= k <= pi.
double BandEnergy(double k);

// Coupling V_k on [0, pi] such that Sigma(z) = int_0^pi V_k^2 / (z - E_k) dk. The infinite
// chain's +-k pair is folded onto [0, pi], giving the constant V / sqrt(pi).
double Coupling(const ChainModel &model, double k);

}  // namespace fano

#endif  // FANO_SELFENERGY_HPP
