#include "fano/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <unsupported/Eigen/Polynomials>

namespace fano
{

namespace
{

using Poly = std::vector<double>;

Poly Add(const Poly &a, const Poly &b)
{
  Poly c(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); i++)
  {
    c[i] += a[i];
  }
  for (std::size_t i = 0; i < b.size(); i++)
  {
    c[i] += b[i];
  }
  return c;
}

Poly Mul(const Poly &a, const Poly &b)
{
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); i++)
  {
    for (std::size_t j = 0; j < b.size(); j++)
    {
      c[i + j] += a[i] * b[j];
    }
  }
  return c;
}

Poly Scale(Poly a, double factor)
{
  for (auto &x : a)
  {
    x *= factor;
  }
  return a;
}

// Chebyshev polynomial of the second kind U_m in the power basis.
Poly ChebyshevU(int m)
{
  Poly prev{1.0};
  if (m == 0)
  {
    return prev;
  }
  Poly cur{0.0, 2.0};
  for (int k = 1; k < m; k++)
  {
    Poly next = Add(Mul(Poly{0.0, 2.0}, cur), Scale(prev, -1.0));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

bool IsOutsideBandReal(Complex z)
{
  return std::abs(z.real()) > band_edge && std::abs(z.imag()) <= 1e-7 * std::max(1.0, std::abs(z));
}

int ClassRank(StateClass cls)
{
  switch (cls)
  {
    case StateClass::BoundI:
      return 0;
    case StateClass::Virtual:
      return 1;
    case StateClass::BIC:
      return 2;
    case StateClass::Resonance:
      return 3;
    case StateClass::AntiResonance:
      return 4;
  }
  return 5;
}

// Returns false for roots that cannot exist (complex roots on the physical sheet).
bool Classify(DiscreteState &state)
{
  const Complex z = state.z.value;
  if (z.imag() == 0.0)
  {
    if (std::abs(z.real()) > band_edge)
    {
      state.cls = state.z.sheet == Sheet::I ? StateClass::BoundI : StateClass::Virtual;
    }
    else
    {
      state.cls = StateClass::BIC;
    }
    return true;
  }
  if (state.z.sheet == Sheet::I)
  {
    return false;
  }
  state.cls = z.imag() < 0.0 ? StateClass::Resonance : StateClass::AntiResonance;
  return true;
}

std::string DescribeCandidates(const ChainModel &model, const std::vector<Complex> &roots)
{
  std::ostringstream os;
  os.precision(17);
  for (const auto &r : roots)
  {
    os << "\n  z = " << r.real() << (r.imag() < 0 ? " - " : " + ") << std::abs(r.imag())
       << "i, |eta_I| = " << std::abs(Eta(model, {r, Sheet::I}))
       << ", |eta_II| = " << std::abs(Eta(model, {r, Sheet::II}));
  }
  return os.str();
}

std::vector<Complex> PolynomialRoots(const Poly &coeffs)
{
  if (coeffs.size() < 2)
  {
    return {};
  }
  Eigen::VectorXd c(static_cast<Eigen::Index>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); i++)
  {
    c(static_cast<Eigen::Index>(i)) = coeffs[i];
  }
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(c);
  const auto &r = solver.roots();
  return {r.data(), r.data() + r.size()};
}

}  // namespace

std::string ToString(StateClass cls)
{
  switch (cls)
  {
    case StateClass::BoundI:
      return "bound";
    case StateClass::Virtual:
      return "virtual";
    case StateClass::Resonance:
      return "resonance";
    case StateClass::AntiResonance:
      return "anti-resonance";
    case StateClass::BIC:
      return "bic";
  }
  return "unknown";
}

StateClass ParseStateClass(const std::string &name)
{
  for (auto cls : {StateClass::BoundI, StateClass::Virtual, StateClass::Resonance,
                   StateClass::AntiResonance, StateClass::BIC})
  {
    if (ToString(cls) == name)
    {
      return cls;
    }
  }
  throw ModelError("unknown state class \"" + name + "\"");
}

std::vector<double> PolynomialCoefficients(const ChainModel &model)
{
  const double g2v2 = model.g * model.g * model.v * model.v;
  const Poly shifted{-model.e_d, 1.0};  // z - E_d
  Poly p;
  if (model.IsSemiInfinite())
  {
    // Squaring (z - E_d) s = g^2 V^2 (1 - (z - s)^{2n}) and dividing out (z^2 - 1) leaves
    // (z - E_d)^2 - 2 g^2 V^2 (z - E_d) U_{2n-1}(z) + 4 g^4 V^4 U_{n-1}(z)^2.
    const int n = model.n_d;
    const Poly u_odd = ChebyshevU(2 * n - 1);
    const Poly u_half = ChebyshevU(n - 1);
    p = Mul(shifted, shifted);
    p = Add(p, Scale(Mul(shifted, u_odd), -2.0 * g2v2));
    p = Add(p, Scale(Mul(u_half, u_half), 4.0 * g2v2 * g2v2));
  }
  else
  {
    // (z - E_d)^2 (z^2 - 1) - g^4 V^4
    p = Mul(Mul(shifted, shifted), Poly{-1.0, 0.0, 1.0});
    p[0] -= g2v2 * g2v2;
  }
  while (p.size() > 1 && p.back() == 0.0)
  {
    p.pop_back();
  }
  return p;
}

Complex Eta(const ChainModel &model, SheetedEnergy z)
{
  return z.value - model.e_d - model.g * model.g * SelfEnergy(model, z);
}

Complex EtaDeriv(const ChainModel &model, SheetedEnergy z, int order)
{
  switch (order)
  {
    case 0:
      return Eta(model, z);
    case 1:
      return 1.0 - model.g * model.g * SelfEnergyDeriv(model, z, 1);
    case 2:
      return -model.g * model.g * SelfEnergyDeriv(model, z, 2);
    default:
      throw std::invalid_argument("EtaDeriv: order must be 0, 1 or 2");
  }
}

double ScaledResidual(const ChainModel &model, SheetedEnergy z)
{
  return std::abs(Eta(model, z)) / std::max(1.0, std::abs(z.value));
}

std::vector<double> BicEnergies(const ChainModel &model)
{
  if (!model.IsSemiInfinite())
  {
    throw ModelError("no BIC in the infinite chain");
  }
  std::vector<double> e;
  for (int k = 1; k < model.n_d; k++)
  {
    e.push_back(std::sin(std::numbers::pi * (2 * k - model.n_d) / (2.0 * model.n_d)));
  }
  std::sort(e.begin(), e.end());
  return e;
}

DiscreteState PolishRoot(const ChainModel &model, SheetedEnergy seed, const RootOptions &opts,
                         std::span<const Complex> avoid)
{
  SheetedEnergy z = seed;
  std::vector<Complex> trace{z.value};
  bool converged = false;
  for (int it = 0; it < opts.max_newton_iterations; it++)
  {
    const Complex f = Eta(model, z);
    if (f == 0.0)
    {
      converged = true;
      break;
    }
    Complex df = EtaDeriv(model, z, 1);
    for (const auto &r : avoid)
    {
      df -= f / (z.value - r);
    }
    Complex step = f / df;
    const double scale = std::max(1.0, std::abs(z.value));
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
    {
      break;
    }
    // Damp steps that would leave the neighbourhood of the seed wholesale.
    if (std::abs(step) > 0.5 * scale)
    {
      step *= 0.5 * scale / std::abs(step);
    }
    z = ContinueTo(z, z.value - step);
    trace.push_back(z.value);
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * scale)
    {
      converged = true;
      break;
    }
  }
  DiscreteState state;
  state.z = z;
  if (z.value.imag() == 0.0)
  {
    state.z.value = Complex(z.value.real(), 0.0);
  }
  state.residual = std::abs(Eta(model, state.z));
  if (!converged && ScaledResidual(model, state.z) >= opts.root_tol)
  {
    std::ostringstream os;
    os.precision(17);
    os << "Newton iteration on eta did not converge; iterates:";
    const std::size_t first = trace.size() > 8 ? trace.size() - 8 : 0;
    for (std::size_t i = first; i < trace.size(); i++)
    {
      os << " (" << trace[i].real() << ", " << trace[i].imag() << ")";
    }
    throw NumericalError(os.str());
  }
  Classify(state);
  return state;
}

std::vector<DiscreteState> PolishSeeds(const ChainModel &model,
                                       std::span<const SheetedEnergy> seeds,
                                       const RootOptions &opts)
{
  std::vector<DiscreteState> out;
  for (const auto &seed : seeds)
  {
    auto state = PolishRoot(model, seed, opts);
    if (!Classify(state) || ScaledResidual(model, state.z) >= opts.root_tol)
    {
      throw NumericalError("seed did not polish to a root on its sheet");
    }
    out.push_back(state);
  }
  return out;
}

std::vector<DiscreteState> DiscreteStates(const ChainModel &model, const RootOptions &opts)
{
  Validate(model);
  std::vector<DiscreteState> accepted;

  if (model.g == 0.0)
  {
    // Uncoupled impurity: a single real level at E_d with unit weight.
    DiscreteState s;
    s.z = {Complex(model.e_d, 0.0), Sheet::I};
    s.cls = std::abs(model.e_d) > band_edge ? StateClass::BoundI : StateClass::BIC;
    s.norm = 1.0;
    return {s};
  }

  std::vector<Complex> candidates = PolynomialRoots(PolynomialCoefficients(model));
  const std::vector<Complex> all_candidates = candidates;

  // At a BIC energy z = E_d is an exact double root (resonance and anti-resonance merge).
  if (model.IsSemiInfinite())
  {
    for (double e_bic : BicEnergies(model))
    {
      if (std::abs(model.e_d - e_bic) <= 1e-13)
      {
        for (int k = 0; k < 2 && !candidates.empty(); k++)
        {
          auto it = std::min_element(candidates.begin(), candidates.end(),
                                     [&](Complex a, Complex b) {
                                       return std::abs(a - model.e_d) < std::abs(b - model.e_d);
                                     });
          candidates.erase(it);
        }
        DiscreteState s;
        s.z = {Complex(model.e_d, 0.0), Sheet::I};
        s.cls = StateClass::BIC;
        s.residual = std::abs(Eta(model, s.z));
        accepted.push_back(s);
      }
    }
  }

  // Roots to deflate against: same sheet and, inside the band, the same side of the cut,
  // since the two half planes of one sheet are different analytic functions there.
  auto neighbours = [&](Complex z, Sheet sheet) {
    std::vector<Complex> near;
    for (const auto &a : accepted)
    {
      const bool across_cut = std::abs(z.real()) < band_edge &&
                              (a.z.value.imag() >= 0.0) != (z.imag() >= 0.0);
      if (a.z.sheet == sheet && !across_cut && std::abs(a.z.value - z) < 1e-2 &&
          std::abs(a.z.value - z) > 0.0)
      {
        near.push_back(a.z.value);
      }
    }
    return near;
  };

  auto fail = [&](const std::string &why) -> NumericalError {
    return NumericalError(why + "; candidate roots:" + DescribeCandidates(model, all_candidates));
  };

  // Near-real candidates outside the band first so that genuine complex pairs can fall back.
  std::stable_sort(candidates.begin(), candidates.end(), [](Complex a, Complex b) {
    return IsOutsideBandReal(a) && !IsOutsideBandReal(b);
  });

  for (const Complex &c : candidates)
  {
    std::optional<DiscreteState> root;
    if (IsOutsideBandReal(c))
    {
      const Complex x(c.real(), 0.0);
      const Sheet sheet = std::abs(Eta(model, {x, Sheet::I})) <= std::abs(Eta(model, {x, Sheet::II}))
                              ? Sheet::I
                              : Sheet::II;
      try
      {
        auto avoid = neighbours(x, sheet);
        auto r = PolishRoot(model, {x, sheet}, opts, avoid);
        if (r.z.value.imag() == 0.0 && ScaledResidual(model, r.z) < opts.root_tol)
        {
          root = r;
        }
      }
      catch (const NumericalError &)
      {
      }
    }
    if (!root)
    {
      // The sheet-II roots come in conjugate pairs. Near a BIC the pair is almost degenerate and
      // the companion matrix resolves it only to about 1e-7, so take the partner directly.
      for (const auto &a : accepted)
      {
        const Complex partner = std::conj(a.z.value);
        const bool have = std::any_of(accepted.begin(), accepted.end(), [&](const DiscreteState &b) {
          return b.z.sheet == Sheet::II && b.z.value == partner;
        });
        if (a.z.sheet == Sheet::II && a.z.value.imag() != 0.0 && !have &&
            std::abs(partner - c) < 1e-6)
        {
          root = a;
          root->z.value = partner;
          root->residual = std::abs(Eta(model, root->z));
          break;
        }
      }
    }
    if (!root)
    {
      // Complex candidates live on sheet II: resonances below the axis, anti-resonances above.
      const Complex seed = c;
      try
      {
        auto avoid = neighbours(seed, Sheet::II);
        root = PolishRoot(model, {seed, Sheet::II}, opts, avoid);
      }
      catch (const NumericalError &e)
      {
        throw fail(e.what());
      }
    }
    // Next to a BIC the width falls below rounding and Im z is noise on either sheet; such a
    // root is the embedded state itself.
    const Complex zr = root->z.value;
    if (std::abs(zr.real()) < band_edge && zr.imag() != 0.0 &&
        std::abs(zr.imag()) <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(zr)))
    {
      root->z = {Complex(zr.real(), 0.0), Sheet::I};
    }
    if (!Classify(*root) || ScaledResidual(model, root->z) >= opts.root_tol)
    {
      throw fail("a polynomial root could not be verified on either sheet");
    }
    accepted.push_back(*root);
  }

  // Deduplicate on |dz| < dedup_tol with embedded states taking precedence; flag close pairs
  // as near-degenerate.
  std::stable_partition(accepted.begin(), accepted.end(),
                        [](const DiscreteState &s) { return s.cls == StateClass::BIC; });
  std::vector<DiscreteState> unique;
  for (const auto &s : accepted)
  {
    bool dup = false;
    for (auto &u : unique)
    {
      // A resonance and its conjugate anti-resonance are distinct however close they are.
      const bool same_kind = u.cls == s.cls || u.cls == StateClass::BIC || s.cls == StateClass::BIC;
      if (same_kind && std::abs(u.z.value - s.z.value) < opts.dedup_tol &&
          (u.z.sheet == s.z.sheet || u.cls == StateClass::BIC || s.cls == StateClass::BIC))
      {
        dup = true;
        break;
      }
    }
    if (!dup)
    {
      unique.push_back(s);
    }
  }
  for (std::size_t i = 0; i < unique.size(); i++)
  {
    for (std::size_t j = i + 1; j < unique.size(); j++)
    {
      if (std::abs(unique[i].z.value - unique[j].z.value) < opts.degenerate_tol)
      {
        unique[i].near_degenerate = unique[j].near_degenerate = true;
      }
    }
  }

  std::vector<DiscreteState> out;
  for (const auto &s : unique)
  {
    if (s.cls != StateClass::AntiResonance || opts.include_anti_resonances)
    {
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(), [](const DiscreteState &a, const DiscreteState &b) {
    if (ClassRank(a.cls) != ClassRank(b.cls))
    {
      return ClassRank(a.cls) < ClassRank(b.cls);
    }
    return a.z.value.real() < b.z.value.real();
  });
  return out;
}

std::vector<DiscreteState> Resonances(std::span<const DiscreteState> states)
{
  std::vector<DiscreteState> out;
  for (const auto &s : states)
  {
    if (s.cls == StateClass::Resonance)
    {
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(), [](const DiscreteState &a, const DiscreteState &b) {
    return a.z.value.real() < b.z.value.real();
  });
  return out;
}

}  // namespace fano
