#include "fano/selfenergy.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fano
{

namespace
{

Complex IntPow(Complex base, int exponent)
{
  Complex result = 1.0;
  while (exponent > 0)
  {
    if (exponent & 1)
    {
      result *= base;
    }
    base *= base;
    exponent >>= 1;
  }
  return result;
}

// Real values are read as +i0 limits, whatever the sign of the zero.
Complex AboveAxis(Complex z)
{
  return z.imag() == 0.0 ? Complex(z.real(), 0.0) : z;
}

bool Above(Complex z)
{
  return z.imag() >= 0.0;
}

// Pieces shared by Sigma and its derivatives: s, and W = (z - s)^{2 n_d}.
struct BranchTerms
{
  Complex z, s, w_pow;
};

BranchTerms Terms(const ChainModel &model, SheetedEnergy z)
{
  BranchTerms t;
  t.z = AboveAxis(z.value);
  t.s = SqrtBranch(z);
  if (model.IsSemiInfinite())
  {
    // (z - s)(z + s) = 1; pick the form without cancellation.
    const Complex minus = t.z - t.s, plus = t.z + t.s;
    const Complex w = std::abs(minus) < std::abs(plus) ? 1.0 / plus : minus;
    t.w_pow = IntPow(w, 2 * model.n_d);
  }
  else
  {
    t.w_pow = 0.0;
  }
  return t;
}

}  // namespace

Complex SqrtBranch(SheetedEnergy z)
{
  const Complex x = AboveAxis(z.value);
  if (x.imag() == 0.0 && std::abs(x.real()) == band_edge)
  {
    throw BranchPointError("z = " + std::to_string(x.real()) + " is a branch point");
  }
  const Complex s = std::sqrt(x - band_edge) * std::sqrt(x + band_edge);
  return z.sheet == Sheet::I ? s : -s;
}

SheetedEnergy ContinueTo(SheetedEnergy z, Complex target)
{
  const Complex from = AboveAxis(z.value), to = AboveAxis(target);
  SheetedEnergy out{to, z.sheet};
  if (Above(from) != Above(to))
  {
    const double t = from.imag() / (from.imag() - to.imag());
    const double x = from.real() + t * (to.real() - from.real());
    if (std::abs(x) < band_edge)
    {
      out.sheet = z.sheet == Sheet::I ? Sheet::II : Sheet::I;
    }
  }
  return out;
}

Complex SelfEnergy(const ChainModel &model, SheetedEnergy z)
{
  const auto t = Terms(model, z);
  const double v2 = model.v * model.v;
  return v2 * (1.0 - t.w_pow) / t.s;
}

Complex SelfEnergyDeriv(const ChainModel &model, SheetedEnergy z, int order)
{
  const auto t = Terms(model, z);
  const double v2 = model.v * model.v;
  const double n = model.IsSemiInfinite() ? model.n_d : 0.0;
  const Complex s2 = t.s * t.s, s3 = s2 * t.s;
  // dW/dz = -2 n W / s and ds/dz = z / s.
  switch (order)
  {
    case 1:
      return v2 * (2.0 * n * t.w_pow / s2 - (1.0 - t.w_pow) * t.z / s3);
    case 2:
    {
      const Complex s4 = s3 * t.s, s5 = s4 * t.s;
      return v2 * (-4.0 * n * n * t.w_pow / s3 - 6.0 * n * t.z * t.w_pow / s4 +
                   (1.0 - t.w_pow) * (2.0 * t.z * t.z + 1.0) / s5);
    }
    default:
      throw std::invalid_argument("SelfEnergyDeriv: order must be 1 or 2");
  }
}

double BandEnergy(double k)
{
  if (!(k >= 0.0 && k <= std::numbers::pi))
  {
    throw std::out_of_range("wavenumber k must lie in [0, pi]");
  }
  return -std::cos(k);
}

double Coupling(const ChainModel &model, double k)
{
  if (!(k >= 0.0 && k <= std::numbers::pi))
  {
    throw std::out_of_range("wavenumber k must lie in [0, pi]");
  }
  if (model.IsSemiInfinite())
  {
    return std::sqrt(2.0 / std::numbers::pi) * model.v * std::sin(model.n_d * k);
  }
  return model.v / std::sqrt(std::numbers::pi);
}

}  // namespace fano
