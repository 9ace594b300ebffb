#include "fano/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <Eigen/Dense>
#include "fano/spectrum.hpp"
#include "fano/states.hpp"

namespace fano
{

namespace
{

ChainModel AtParameter(ChainModel model, SweepParameter parameter, double value)
{
  if (parameter == SweepParameter::Ed)
  {
    model.e_d = value;
  }
  else
  {
    model.g = value;
  }
  return model;
}

DiscreteState WithNorm(const ChainModel &model, DiscreteState s)
{
  try
  {
    s.norm = Weights(model, s).norm;
  }
  catch (const NumericalError &)
  {
    s.norm = std::numeric_limits<double>::infinity();
  }
  return s;
}

// Advances one branch from p to p + h with step halving.
DiscreteState Advance(const ChainModel &model, SweepParameter parameter, double p, double h,
                      DiscreteState state, const TraceOptions &opts)
{
  const double target = p + h;
  double pos = p, step = h;
  const double min_step = std::abs(h) * std::ldexp(1.0, -opts.max_halvings);
  while ((h > 0 && pos < target) || (h < 0 && pos > target))
  {
    step = h > 0 ? std::min(step, target - pos) : std::max(step, target - pos);
    const ChainModel here = AtParameter(model, parameter, pos);
    double correction = 0.0;
    bool accept = false;
    DiscreteState next;
    try
    {
      next = ContinuationStep(here, parameter, state, step, &correction, opts.roots);
      const Complex moved = RootVelocity(here, parameter, state.z) * step;
      accept = correction <= opts.max_correction_ratio * std::abs(moved) + 1e-13;
    }
    catch (const NumericalError &)
    {
      if (std::abs(step) <= min_step)
      {
        throw;
      }
    }
    catch (const std::domain_error &)
    {
      if (std::abs(step) <= min_step)
      {
        throw;
      }
    }
    if (!accept && std::abs(step) > min_step)
    {
      step *= 0.5;
      continue;
    }
    state = next;
    pos = (std::abs(target - (pos + step)) <= 1e-15 * std::max(1.0, std::abs(target)))
              ? target
              : pos + step;
    step *= 2.0;  // recover after a refined stretch
  }
  return state;
}

// The two resonances closest to each other, or (given a centre) the two nearest the centre.
std::optional<std::pair<Complex, Complex>> ClosestPair(const ChainModel &model,
                                                       std::optional<Complex> centre)
{
  std::vector<DiscreteState> res;
  try
  {
    res = Resonances(DiscreteStates(model));
  }
  catch (const std::exception &)
  {
    return std::nullopt;
  }
  if (res.size() < 2)
  {
    return std::nullopt;
  }
  if (centre)
  {
    std::sort(res.begin(), res.end(), [&](const DiscreteState &a, const DiscreteState &b) {
      return std::abs(a.z.value - *centre) < std::abs(b.z.value - *centre);
    });
    return std::make_pair(res[0].z.value, res[1].z.value);
  }
  std::pair<Complex, Complex> best{res[0].z.value, res[1].z.value};
  for (std::size_t a = 0; a < res.size(); a++)
  {
    for (std::size_t b = a + 1; b < res.size(); b++)
    {
      if (std::abs(res[a].z.value - res[b].z.value) < std::abs(best.first - best.second))
      {
        best = {res[a].z.value, res[b].z.value};
      }
    }
  }
  return best;
}

// The squared splitting of a root pair is analytic in (g, E_d) near a double root, so a few
// linearised steps on it move a coarse grid minimum next to the coalescence point. The seed is
// left unchanged if the pair cannot be followed or the step leaves the neighbourhood.
void RefineSeed(const ChainModel &model, EpSeed &seed, double dg, double de)
{
  const double span_g = 2.0 * std::max(dg, 1e-8), span_e = 2.0 * std::max(de, 1e-8);
  const double g0 = seed.g, e0 = seed.e_d;
  EpSeed cur = seed;
  for (int it = 0; it < 8; it++)
  {
    const double hg = 1e-3 * span_g, he = 1e-3 * span_e;
    auto splitting = [&](double g, double e) -> std::optional<Complex> {
      if (g <= 0.0)
      {
        return std::nullopt;
      }
      const auto p = ClosestPair(WithCoupling(model, g, e), cur.z);
      if (!p)
      {
        return std::nullopt;
      }
      const Complex d = p->first - p->second;
      return d * d;
    };
    const auto s0 = splitting(cur.g, cur.e_d);
    const auto sg = splitting(cur.g + hg, cur.e_d);
    const auto se = splitting(cur.g, cur.e_d + he);
    if (!s0 || !sg || !se)
    {
      break;
    }
    const Complex a = (*sg - *s0) / hg, b = (*se - *s0) / he;
    const double det = a.real() * b.imag() - a.imag() * b.real();
    if (det == 0.0)
    {
      break;
    }
    // Solve a x + b y = -s0 for real x, y.
    const double x = (-s0->real() * b.imag() + s0->imag() * b.real()) / det;
    const double y = (-a.real() * s0->imag() + a.imag() * s0->real()) / det;
    const double g = cur.g + x, e = cur.e_d + y;
    if (std::abs(g - g0) > span_g || std::abs(e - e0) > span_e || g <= 0.0)
    {
      break;
    }
    const auto p = ClosestPair(WithCoupling(model, g, e), cur.z);
    if (!p)
    {
      break;
    }
    const double d = std::abs(p->first - p->second);
    if (!(d < cur.pair_distance))
    {
      break;
    }
    cur = {g, e, 0.5 * (p->first + p->second), d};
  }
  seed = cur;
}

}  // namespace

std::string ToString(SweepParameter p)
{
  return p == SweepParameter::Ed ? "ed" : "g";
}

SweepParameter ParseSweepParameter(const std::string &name)
{
  if (name == "ed" || name == "e_d" || name == "Ed")
  {
    return SweepParameter::Ed;
  }
  if (name == "g")
  {
    return SweepParameter::G;
  }
  throw ModelError("unknown sweep parameter \"" + name + "\" (expected ed or g)");
}

Complex RootVelocity(const ChainModel &model, SweepParameter parameter, SheetedEnergy z)
{
  const Complex norm = 1.0 / EtaDeriv(model, z, 1);
  if (parameter == SweepParameter::Ed)
  {
    return norm;
  }
  return 2.0 * model.g * SelfEnergy(model, z) * norm;
}

DiscreteState ContinuationStep(const ChainModel &model, SweepParameter parameter,
                               const DiscreteState &from, double h, double *correction,
                               const RootOptions &opts)
{
  const Complex velocity = RootVelocity(model, parameter, from.z);
  const SheetedEnergy predicted = ContinueTo(from.z, from.z.value + h * velocity);
  const double p = parameter == SweepParameter::Ed ? model.e_d : model.g;
  const ChainModel next_model = AtParameter(model, parameter, p + h);
  DiscreteState next = PolishRoot(next_model, predicted, opts);
  if (ScaledResidual(next_model, next.z) >= opts.root_tol)
  {
    throw NumericalError("continuation corrector did not converge");
  }
  if (correction)
  {
    *correction = std::abs(next.z.value - predicted.value);
  }
  return next;
}

Trajectory Trace(const ChainModel &model, SweepParameter parameter,
                 std::span<const double> values, const TraceOptions &opts)
{
  Validate(model);
  if (!std::is_sorted(values.begin(), values.end()))
  {
    throw ModelError("sweep values must be sorted");
  }
  std::vector<double> bics;
  if (parameter == SweepParameter::Ed && model.IsSemiInfinite())
  {
    bics = BicEnergies(model);
  }
  auto bic_at = [&](double value) -> std::optional<double> {
    for (double e : bics)
    {
      if (std::abs(value - e) <= 1e-12)
      {
        return e;
      }
    }
    return std::nullopt;
  };

  // BIC parameter values inside the sweep are inserted as markers.
  std::vector<double> grid(values.begin(), values.end());
  if (!grid.empty())
  {
    for (double e : bics)
    {
      const bool present = std::any_of(grid.begin(), grid.end(),
                                       [&](double x) { return std::abs(x - e) <= 1e-12; });
      if (!present && e > grid.front() && e < grid.back())
      {
        grid.insert(std::upper_bound(grid.begin(), grid.end(), e), e);
      }
    }
  }

  Trajectory traj;
  traj.parameter = parameter;
  traj.values = grid;
  if (grid.empty())
  {
    return traj;
  }

  // Starting states: resonances plus a BIC if the sweep starts on one.
  const ChainModel start = AtParameter(model, parameter, grid.front());
  const auto initial = DiscreteStates(start, opts.roots);
  std::vector<DiscreteState> seeds;
  for (const auto &s : initial)
  {
    if (s.cls == StateClass::Resonance || (s.cls == StateClass::BIC && start.g > 0.0))
    {
      seeds.push_back(s);
    }
  }
  std::sort(seeds.begin(), seeds.end(), [](const DiscreteState &a, const DiscreteState &b) {
    return a.z.value.real() < b.z.value.real();
  });

  std::vector<DiscreteState> current;
  for (std::size_t b = 0; b < seeds.size(); b++)
  {
    Branch branch;
    branch.label = RomanLabel(static_cast<int>(b) + 1);
    TrajectoryPoint pt{grid.front(), WithNorm(start, seeds[b])};
    pt.bic_marker = seeds[b].cls == StateClass::BIC;
    branch.points.push_back(pt);
    traj.branches.push_back(std::move(branch));
    current.push_back(seeds[b]);
  }

  for (std::size_t j = 1; j < grid.size(); j++)
  {
    const double p = grid[j - 1], h = grid[j] - p;
    const ChainModel here = AtParameter(model, parameter, grid[j]);
    for (std::size_t b = 0; b < current.size(); b++)
    {
      if (h != 0.0)
      {
        current[b] = Advance(model, parameter, p, h, current[b], opts);
      }
    }
    std::vector<TrajectoryPoint> pts;
    for (const auto &s : current)
    {
      pts.push_back({grid[j], WithNorm(here, s)});
    }
    if (auto e_bic = bic_at(grid[j]); e_bic && here.g > 0.0)
    {
      // Pin the branch that reaches the BIC energy onto the real axis.
      std::size_t nearest = 0;
      for (std::size_t b = 1; b < current.size(); b++)
      {
        if (std::abs(current[b].z.value - *e_bic) < std::abs(current[nearest].z.value - *e_bic))
        {
          nearest = b;
        }
      }
      if (!current.empty())
      {
        DiscreteState bic;
        bic.z = {Complex(*e_bic, 0.0), Sheet::I};
        bic.cls = StateClass::BIC;
        bic.residual = std::abs(Eta(here, bic.z));
        current[nearest] = bic;
        pts[nearest].state = WithNorm(here, bic);
        pts[nearest].bic_marker = true;
      }
    }
    for (std::size_t a = 0; a < pts.size(); a++)
    {
      for (std::size_t b = a + 1; b < pts.size(); b++)
      {
        if (std::abs(pts[a].state.z.value - pts[b].state.z.value) < opts.collision_tol)
        {
          pts[a].collision = pts[b].collision = true;
        }
      }
    }
    for (std::size_t b = 0; b < pts.size(); b++)
    {
      traj.branches[b].points.push_back(pts[b]);
    }
  }
  return traj;
}

EpResult FindEp(const ChainModel &model, const EpSeed &seed, const EpOptions &opts)
{
  using Vec4 = Eigen::Matrix<double, 4, 1>;
  using Mat4 = Eigen::Matrix<double, 4, 4>;

  double g = seed.g, e_d = seed.e_d;
  SheetedEnergy z{seed.z, seed.z.imag() <= 0.0 ? Sheet::II : Sheet::I};

  auto residual = [&](double gg, double ee, SheetedEnergy zz) {
    const ChainModel m = WithCoupling(model, gg, ee);
    const Complex eta = Eta(m, zz), deta = EtaDeriv(m, zz, 1);
    Vec4 f;
    f << eta.real(), eta.imag(), deta.real(), deta.imag();
    return f;
  };

  Vec4 f = residual(g, e_d, z);
  int it = 0;
  for (; it < opts.max_iterations; it++)
  {
    if (std::abs(f(0)) + std::abs(f(1)) < 1e-14 && std::abs(f(2)) + std::abs(f(3)) < 1e-14)
    {
      break;
    }
    const ChainModel m = WithCoupling(model, g, e_d);
    const Complex sigma = SelfEnergy(m, z), dsigma = SelfEnergyDeriv(m, z, 1);
    const Complex eta_z = EtaDeriv(m, z, 1), deta_z = EtaDeriv(m, z, 2);
    const Complex eta_g = -2.0 * g * sigma, deta_g = -2.0 * g * dsigma;
    const Complex i(0.0, 1.0);
    // Columns: d/dRe z, d/dIm z, d/dg, d/dE_d (analytic in z, so d/dIm z = i d/dz).
    const Complex col_eta[4] = {eta_z, i * eta_z, eta_g, -1.0};
    const Complex col_deta[4] = {deta_z, i * deta_z, deta_g, 0.0};
    Mat4 jac;
    for (int c = 0; c < 4; c++)
    {
      jac(0, c) = col_eta[c].real();
      jac(1, c) = col_eta[c].imag();
      jac(2, c) = col_deta[c].real();
      jac(3, c) = col_deta[c].imag();
    }
    const Vec4 delta = jac.colPivHouseholderQr().solve(-f);
    if (!delta.allFinite())
    {
      break;
    }
    double alpha = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; k++, alpha *= 0.5)
    {
      const SheetedEnergy z_try = ContinueTo(z, z.value + alpha * Complex(delta(0), delta(1)));
      const double g_try = g + alpha * delta(2), e_try = e_d + alpha * delta(3);
      Vec4 f_try;
      try
      {
        f_try = residual(g_try, e_try, z_try);
      }
      catch (const std::domain_error &)
      {
        continue;
      }
      if (f_try.allFinite() && f_try.norm() < f.norm())
      {
        z = z_try;
        g = g_try;
        e_d = e_try;
        f = f_try;
        improved = true;
        break;
      }
    }
    if (!improved)
    {
      break;
    }
  }

  EpResult ep{g, e_d, z.value, std::hypot(f(0), f(1)), std::hypot(f(2), f(3)), it};
  if (!(ep.res_eta < opts.tol && ep.res_eta_prime < opts.tol))
  {
    std::ostringstream os;
    os.precision(6);
    os << "exceptional point search did not converge after " << it
       << " iterations: |eta| = " << ep.res_eta << ", |eta'| = " << ep.res_eta_prime
       << " at g = " << g << ", E_d = " << e_d;
    throw NumericalError(os.str());
  }
  if (ep.g <= 0.0)
  {
    throw NumericalError("exceptional point search converged to g <= 0");
  }
  return ep;
}

std::vector<EpSeed> ScanForEpSeeds(const ChainModel &model, std::pair<double, double> g_range,
                                   std::pair<double, double> ed_range, int g_points,
                                   int ed_points, double threshold)
{
  std::vector<EpSeed> seeds;
  if (g_points < 1 || ed_points < 1 || g_range.first > g_range.second ||
      ed_range.first > ed_range.second)
  {
    return seeds;
  }
  auto node = [](std::pair<double, double> r, int n, int i) {
    return n == 1 ? r.first : r.first + (r.second - r.first) * i / (n - 1);
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(g_points) * ed_points, inf);
  std::vector<Complex> mid(dist.size());
  auto at = [&](int i, int j) { return static_cast<std::size_t>(i) * ed_points + j; };

  for (int i = 0; i < g_points; i++)
  {
    for (int j = 0; j < ed_points; j++)
    {
      const auto pair = ClosestPair(
          WithCoupling(model, node(g_range, g_points, i), node(ed_range, ed_points, j)),
          std::nullopt);
      if (pair)
      {
        dist[at(i, j)] = std::abs(pair->first - pair->second);
        mid[at(i, j)] = 0.5 * (pair->first + pair->second);
      }
    }
  }

  const double dg = g_points > 1 ? (g_range.second - g_range.first) / (g_points - 1) : 0.0;
  const double de = ed_points > 1 ? (ed_range.second - ed_range.first) / (ed_points - 1) : 0.0;
  for (int i = 0; i < g_points; i++)
  {
    for (int j = 0; j < ed_points; j++)
    {
      const double d = dist[at(i, j)];
      if (!std::isfinite(d))
      {
        continue;
      }
      bool local_min = true;
      for (int di = -1; di <= 1 && local_min; di++)
      {
        for (int dj = -1; dj <= 1; dj++)
        {
          const int ii = i + di, jj = j + dj;
          if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= g_points || jj >= ed_points)
          {
            continue;
          }
          if (dist[at(ii, jj)] < d)
          {
            local_min = false;
            break;
          }
        }
      }
      if (!local_min)
      {
        continue;
      }
      EpSeed seed{node(g_range, g_points, i), node(ed_range, ed_points, j), mid[at(i, j)], d};
      RefineSeed(model, seed, dg, de);
      if (seed.pair_distance < threshold)
      {
        seeds.push_back(seed);
      }
    }
  }
  return seeds;
}

std::vector<EpResult> LocateEps(const ChainModel &model, std::pair<double, double> g_range,
                                std::pair<double, double> ed_range, int g_points,
                                int ed_points, double threshold, const EpOptions &opts)
{
  std::vector<EpResult> eps;
  for (const auto &seed :
       ScanForEpSeeds(model, g_range, ed_range, g_points, ed_points, threshold))
  {
    EpResult ep;
    try
    {
      ep = FindEp(model, seed, opts);
    }
    catch (const NumericalError &)
    {
      continue;
    }
    const bool dup = std::any_of(eps.begin(), eps.end(), [&](const EpResult &o) {
      return std::abs(o.g - ep.g) + std::abs(o.e_d - ep.e_d) + std::abs(o.z - ep.z) < 1e-6;
    });
    if (!dup)
    {
      eps.push_back(ep);
    }
  }
  std::sort(eps.begin(), eps.end(), [](const EpResult &a, const EpResult &b) {
    return a.g != b.g ? a.g < b.g : a.e_d < b.e_d;
  });
  return eps;
}

double PairSplitting(const ChainModel &model, const EpResult &ep, double delta)
{
  const ChainModel m = WithCoupling(model, ep.g, ep.e_d + delta);
  RootOptions opts;
  opts.include_anti_resonances = true;
  auto states = DiscreteStates(m, opts);
  if (states.size() < 2)
  {
    throw NumericalError("fewer than two roots near the exceptional point");
  }
  std::sort(states.begin(), states.end(), [&](const DiscreteState &a, const DiscreteState &b) {
    return std::abs(a.z.value - ep.z) < std::abs(b.z.value - ep.z);
  });
  return std::abs(states[0].z.value - states[1].z.value);
}

}  // namespace fano
