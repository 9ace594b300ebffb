#include "fano/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <CLI11.hpp>
#include <json.hpp>
#include "fano/dispersion.hpp"
#include "fano/spectrum.hpp"
#include "fano/states.hpp"
#include "fano/sweep.hpp"

namespace fano::cli
{

using nlohmann::json;

namespace
{

struct ModelFlags
{
  std::string model_file;
  std::string chain = "semi";
  int n_d = 1;
  double e_d = 0.0, g = 0.0, v = 1.0, weight = 1.0, e_c = 0.0;
};

struct OutputFlags
{
  std::string output;
  std::string format = "csv";
};

std::string Num(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string SheetName(Sheet s)
{
  return s == Sheet::I ? "I" : "II";
}

Sheet ParseSheet(const std::string &name)
{
  if (name == "I" || name == "1" || name == "i")
  {
    return Sheet::I;
  }
  if (name == "II" || name == "2" || name == "ii")
  {
    return Sheet::II;
  }
  throw ModelError("unknown sheet \"" + name + "\" (expected I or II)");
}

std::string ReadFile(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ModelError("cannot read " + path);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json ParseJson(const std::string &text, const std::string &what)
{
  try
  {
    return json::parse(text);
  }
  catch (const json::exception &e)
  {
    throw ModelError("malformed " + what + ": " + e.what());
  }
}

void AddModelFlags(CLI::App *app, ModelFlags &f)
{
  app->add_option("--model", f.model_file, "JSON model descriptor");
  app->add_option("--chain", f.chain, "semi or infinite");
  app->add_option("--nd", f.n_d, "impurity site n_d (semi-infinite chain)");
  app->add_option("--ed", f.e_d, "impurity level E_d");
  app->add_option("--g", f.g, "coupling constant g");
  app->add_option("--v", f.v, "potential amplitude V");
  app->add_option("--weight", f.weight, "transition weight mu^2 T_dc^2");
  app->add_option("--ec", f.e_c, "core level E_c");
}

void AddOutputFlags(CLI::App *app, OutputFlags &f)
{
  app->add_option("--output,-o", f.output, "output file (default: stdout)");
  app->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

bool Given(const CLI::App &sub, const std::string &flag)
{
  return sub.get_option(flag)->count() > 0;
}

// Explicit flags override fields read from --model.
ChainModel BuildModel(const CLI::App &sub, const ModelFlags &f)
{
  ChainModel m;
  if (!f.model_file.empty())
  {
    m = ModelFromJson(ReadFile(f.model_file));
  }
  if (Given(sub, "--chain"))
  {
    m.chain = ParseChainKind(f.chain);
    if (!m.IsSemiInfinite())
    {
      m.n_d = 0;
    }
    else if (m.n_d == 0)
    {
      m.n_d = 1;
    }
  }
  if (Given(sub, "--nd"))
  {
    if (!m.IsSemiInfinite())
    {
      throw ModelError("--nd does not apply to the infinite chain");
    }
    m.n_d = f.n_d;
  }
  if (Given(sub, "--ed"))
  {
    m.e_d = f.e_d;
  }
  if (Given(sub, "--g"))
  {
    m.g = f.g;
  }
  if (Given(sub, "--v"))
  {
    m.v = f.v;
  }
  if (Given(sub, "--weight"))
  {
    m.transition_weight = f.weight;
  }
  if (Given(sub, "--ec"))
  {
    m.e_c = f.e_c;
  }
  return Validate(m);
}

json ModelJson(const ChainModel &m)
{
  json j;
  j["variant"] = ToString(m.chain);
  if (m.IsSemiInfinite())
  {
    j["n_d"] = m.n_d;
  }
  j["e_d"] = m.e_d;
  j["g"] = m.g;
  j["v"] = m.v;
  j["transition_weight"] = m.transition_weight;
  j["e_c"] = m.e_c;
  return j;
}

// Resonances get (i), (ii), ... by ascending Re z; every other state is labelled by class
// and a running index.
std::vector<std::string> StateLabels(const std::vector<DiscreteState> &states)
{
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < states.size(); k++)
  {
    if (states[k].cls == StateClass::Resonance)
    {
      order.push_back(k);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return states[a].Energy() < states[b].Energy();
  });
  std::vector<std::string> labels(states.size());
  for (std::size_t r = 0; r < order.size(); r++)
  {
    labels[order[r]] = RomanLabel(static_cast<int>(r) + 1);
  }
  int other = 0;
  for (std::size_t k = 0; k < states.size(); k++)
  {
    if (labels[k].empty())
    {
      labels[k] = ToString(states[k].cls) + std::to_string(++other);
    }
  }
  return labels;
}

class Sink
{
public:
  Sink(const std::string &path, std::ostream &fallback) : stream_(&fallback)
  {
    if (!path.empty())
    {
      file_.open(path);
      if (!file_)
      {
        throw ModelError("cannot write " + path);
      }
      stream_ = &file_;
    }
  }
  std::ostream &operator*() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream *stream_;
};

struct RootsFlags
{
  std::string seeds;
  bool all = false;
  double root_tol = RootOptions{}.root_tol;
};

int RunRoots(const ChainModel &model, const RootsFlags &rf, const OutputFlags &of,
             std::ostream &out)
{
  RootOptions opts;
  opts.root_tol = rf.root_tol;
  opts.include_anti_resonances = rf.all;
  std::vector<DiscreteState> states;
  if (!rf.seeds.empty())
  {
    const json doc = ParseJson(ReadFile(rf.seeds), "seed file");
    const json &list = doc.is_object() ? doc.at("states") : doc;
    std::vector<SheetedEnergy> seeds;
    for (const auto &s : list)
    {
      seeds.push_back({Complex(s.at("re_z").get<double>(), s.at("im_z").get<double>()),
                       ParseSheet(s.value("sheet", std::string("II")))});
    }
    states = PolishSeeds(model, seeds, opts);
  }
  else
  {
    states = DiscreteStates(model, opts);
  }
  states = AttachWeights(model, states);
  const auto labels = StateLabels(states);

  Sink sink(of.output, out);
  if (of.format == "json")
  {
    json j;
    j["model"] = ModelJson(model);
    j["states"] = json::array();
    for (std::size_t k = 0; k < states.size(); k++)
    {
      const auto &s = states[k];
      j["states"].push_back({{"branch", labels[k]},
                             {"class", ToString(s.cls)},
                             {"sheet", SheetName(s.z.sheet)},
                             {"re_z", s.z.value.real()},
                             {"im_z", s.z.value.imag()},
                             {"re_norm", s.norm.real()},
                             {"im_norm", s.norm.imag()},
                             {"residual", s.residual},
                             {"near_degenerate", s.near_degenerate}});
    }
    *sink << j.dump(2) << "\n";
    return exit_ok;
  }
  *sink << "branch,class,re_z,im_z,re_norm,im_norm,residual\n";
  for (std::size_t k = 0; k < states.size(); k++)
  {
    const auto &s = states[k];
    *sink << labels[k] << ',' << ToString(s.cls) << ',' << Num(s.z.value.real()) << ','
          << Num(s.z.value.imag()) << ',' << Num(s.norm.real()) << ',' << Num(s.norm.imag())
          << ',' << Num(s.residual) << '\n';
  }
  return exit_ok;
}

int RunBic(const ChainModel &model, const OutputFlags &of, std::ostream &out)
{
  const auto bics = BicEnergies(model);
  Sink sink(of.output, out);
  if (of.format == "json")
  {
    *sink << json{{"n_d", model.n_d}, {"bic", bics}}.dump(2) << "\n";
    return exit_ok;
  }
  *sink << "e_d\n";
  for (double e : bics)
  {
    *sink << Num(e) << '\n';
  }
  return exit_ok;
}

struct SpectrumFlags
{
  int points = 2001;
  double omega_min = -0.999, omega_max = 0.999;
  std::string lines;
  bool relabel = false;
  double root_tol = RootOptions{}.root_tol;
};

int RunSpectrum(const ChainModel &model, const SpectrumFlags &sf, const OutputFlags &of,
                std::ostream &out, std::ostream &err)
{
  if (!(sf.omega_min < sf.omega_max) || std::abs(sf.omega_min) >= band_edge ||
      std::abs(sf.omega_max) >= band_edge)
  {
    throw ModelError("spectrum range must satisfy -1 < omega-min < omega-max < 1");
  }
  RootOptions opts;
  opts.root_tol = sf.root_tol;
  const auto grid = Decompose(model, UniformGrid(sf.points, sf.omega_min, sf.omega_max), opts);
  if (grid.near_ep_warning)
  {
    err << "warning: resonances are nearly degenerate (close to an exceptional point); "
           "their components are unreliable\n";
  }
  const double shift = sf.relabel ? model.e_c : 0.0;

  Sink sink(of.output, out);
  if (of.format == "json")
  {
    json j;
    j["model"] = ModelJson(model);
    j["axis"] = sf.relabel ? "omega" : "Omega";
    std::vector<double> axis;
    for (double x : grid.omega)
    {
      axis.push_back(x - shift);
    }
    j["omega"] = axis;
    j["total"] = grid.total;
    j["resonances"] = json::array();
    for (const auto &c : grid.resonances)
    {
      j["resonances"].push_back({{"label", c.label},
                                 {"re_z", c.state.z.value.real()},
                                 {"im_z", c.state.z.value.imag()},
                                 {"re_norm", c.weights.norm.real()},
                                 {"im_norm", c.weights.norm.imag()},
                                 {"da", c.da},
                                 {"q", c.q},
                                 {"unreliable", c.unreliable},
                                 {"f", c.f},
                                 {"f_sym", c.f_sym},
                                 {"f_anti", c.f_anti}});
    }
    j["continuum_residual"] = grid.continuum_residual;
    j["bound_lines"] = json::array();
    for (const auto &l : grid.bound_lines)
    {
      j["bound_lines"].push_back({{"energy", l.energy - shift}, {"weight", l.weight}});
    }
    j["near_ep_warning"] = grid.near_ep_warning;
    *sink << j.dump(2) << "\n";
    return exit_ok;
  }

  *sink << "omega,total";
  for (const auto &c : grid.resonances)
  {
    *sink << ",f_" << c.label << ",fS_" << c.label << ",fA_" << c.label;
  }
  *sink << ",continuum_residual\n";
  for (std::size_t i = 0; i < grid.omega.size(); i++)
  {
    *sink << Num(grid.omega[i] - shift) << ',' << Num(grid.total[i]);
    for (const auto &c : grid.resonances)
    {
      *sink << ',' << Num(c.f[i]) << ',' << Num(c.f_sym[i]) << ',' << Num(c.f_anti[i]);
    }
    *sink << ',' << Num(grid.continuum_residual[i]) << '\n';
  }

  std::string lines_path = sf.lines;
  if (lines_path.empty())
  {
    const std::filesystem::path base(of.output);
    lines_path = (of.output.empty() ? std::filesystem::path("lines.csv")
                                    : base.parent_path() / "lines.csv")
                     .string();
  }
  std::ofstream lines(lines_path);
  if (!lines)
  {
    throw ModelError("cannot write " + lines_path);
  }
  lines << "energy,weight\n";
  for (const auto &l : grid.bound_lines)
  {
    lines << Num(l.energy - shift) << ',' << Num(l.weight) << '\n';
  }
  return exit_ok;
}

struct TrajectoryFlags
{
  std::string param = "ed";
  double from = -0.99, to = 0.99;
  int steps = 200;
  double root_tol = RootOptions{}.root_tol;
};

int RunTrajectory(const ChainModel &model, const TrajectoryFlags &tf, const OutputFlags &of,
                  std::ostream &out)
{
  if (tf.steps < 1)
  {
    throw ModelError("--steps must be at least 1");
  }
  if (!(tf.from < tf.to))
  {
    throw ModelError("--from must be below --to");
  }
  const SweepParameter param = ParseSweepParameter(tf.param);
  if (param == SweepParameter::G && tf.from < 0.0)
  {
    throw ModelError("g sweep must start at g >= 0");
  }
  TraceOptions opts;
  opts.roots.root_tol = tf.root_tol;
  const auto values = UniformGrid(tf.steps + 1, tf.from, tf.to);
  const auto traj = Trace(model, param, values, opts);

  Sink sink(of.output, out);
  if (of.format == "json")
  {
    json j;
    j["model"] = ModelJson(model);
    j["parameter"] = ToString(param);
    j["branches"] = json::array();
    for (const auto &b : traj.branches)
    {
      json pts = json::array();
      for (const auto &p : b.points)
      {
        pts.push_back({{"param", p.param},
                       {"re_z", p.state.z.value.real()},
                       {"im_z", p.state.z.value.imag()},
                       {"class", ToString(p.state.cls)},
                       {"collision", p.collision},
                       {"bic", p.bic_marker}});
      }
      j["branches"].push_back({{"label", b.label}, {"points", pts}});
    }
    *sink << j.dump(2) << "\n";
    return exit_ok;
  }
  *sink << "param,branch,re_z,im_z\n";
  for (const auto &b : traj.branches)
  {
    for (const auto &p : b.points)
    {
      *sink << Num(p.param) << ',' << b.label << ',' << Num(p.state.z.value.real()) << ','
            << Num(p.state.z.value.imag()) << '\n';
    }
  }
  return exit_ok;
}

struct EpFlags
{
  std::vector<double> g_range{0.05, 0.3};
  std::vector<double> ed_range{-1.0, 1.0};
  std::vector<int> grid{61, 161};
  double threshold = 0.02;
  double ep_tol = EpOptions{}.tol;
};

int RunEp(const ChainModel &model, const EpFlags &ef, const OutputFlags &of, std::ostream &out)
{
  EpOptions opts;
  opts.tol = ef.ep_tol;
  const auto eps = LocateEps(model, {ef.g_range[0], ef.g_range[1]},
                             {ef.ed_range[0], ef.ed_range[1]}, ef.grid[0], ef.grid[1],
                             ef.threshold, opts);
  Sink sink(of.output, out);
  if (of.format == "json")
  {
    json j;
    j["model"] = ModelJson(model);
    j["eps"] = json::array();
    for (const auto &ep : eps)
    {
      j["eps"].push_back({{"g", ep.g},
                          {"ed", ep.e_d},
                          {"re_z", ep.z.real()},
                          {"im_z", ep.z.imag()},
                          {"res_eta", ep.res_eta},
                          {"res_etaprime", ep.res_eta_prime}});
    }
    *sink << j.dump(2) << "\n";
    return exit_ok;
  }
  *sink << "g,ed,re_z,im_z,res_eta,res_etaprime\n";
  for (const auto &ep : eps)
  {
    *sink << Num(ep.g) << ',' << Num(ep.e_d) << ',' << Num(ep.z.real()) << ','
          << Num(ep.z.imag()) << ',' << Num(ep.res_eta) << ',' << Num(ep.res_eta_prime) << '\n';
  }
  return exit_ok;
}

struct SelfEnergyFlags
{
  double re = 0.0, im = 0.0;
  std::string sheet = "I";
  int order = 0;
};

int RunSelfEnergy(const ChainModel &model, const SelfEnergyFlags &sf, const OutputFlags &of,
                  std::ostream &out)
{
  const SheetedEnergy z{Complex(sf.re, sf.im), ParseSheet(sf.sheet)};
  const Complex sigma = sf.order == 0 ? SelfEnergy(model, z) : SelfEnergyDeriv(model, z, sf.order);
  Sink sink(of.output, out);
  if (of.format == "json")
  {
    *sink << json{{"re_z", sf.re},
                  {"im_z", sf.im},
                  {"sheet", SheetName(z.sheet)},
                  {"order", sf.order},
                  {"re_sigma", sigma.real()},
                  {"im_sigma", sigma.imag()}}
                 .dump(2)
          << "\n";
    return exit_ok;
  }
  *sink << "re_z,im_z,sheet,order,re_sigma,im_sigma\n"
        << Num(sf.re) << ',' << Num(sf.im) << ',' << SheetName(z.sheet) << ',' << sf.order
        << ',' << Num(sigma.real()) << ',' << Num(sigma.imag()) << '\n';
  return exit_ok;
}

}  // namespace

ChainModel ModelFromJson(const std::string &text)
{
  const json j = ParseJson(text, "model descriptor");
  if (!j.is_object())
  {
    throw ModelError("model descriptor must be a JSON object");
  }
  ChainModel m;
  try
  {
    if (j.contains("variant"))
    {
      m.chain = ParseChainKind(j.at("variant").get<std::string>());
    }
    m.n_d = m.IsSemiInfinite() ? j.value("n_d", 1) : 0;
    m.e_d = j.value("e_d", m.e_d);
    m.g = j.value("g", m.g);
    m.v = j.value("v", m.v);
    m.transition_weight = j.value("transition_weight", m.transition_weight);
    m.e_c = j.value("e_c", m.e_c);
  }
  catch (const json::exception &e)
  {
    throw ModelError(std::string("bad model descriptor field: ") + e.what());
  }
  return m;
}

std::string ModelToJson(const ChainModel &model)
{
  return ModelJson(model).dump(2);
}

int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Discrete states and Fano spectra of an impurity on a tight-binding chain",
               "fano"};
  app.require_subcommand(1);

  ModelFlags mf;
  OutputFlags of;

  RootsFlags rf;
  auto *roots = app.add_subcommand("roots", "discrete states with normalization constants");
  AddModelFlags(roots, mf);
  AddOutputFlags(roots, of);
  roots->add_option("--seeds", rf.seeds, "JSON roots output to re-polish instead of solving");
  roots->add_flag("--all", rf.all, "also list anti-resonances (Im z > 0)");
  roots->add_option("--root-tol", rf.root_tol, "scaled residual tolerance");

  auto *bic = app.add_subcommand("bic", "impurity levels at which a BIC forms");
  AddModelFlags(bic, mf);
  AddOutputFlags(bic, of);

  SpectrumFlags sf;
  auto *spectrum = app.add_subcommand("spectrum", "absorption spectrum and its decomposition");
  AddModelFlags(spectrum, mf);
  AddOutputFlags(spectrum, of);
  spectrum->add_option("--points", sf.points, "grid points")->check(CLI::PositiveNumber);
  spectrum->add_option("--omega-min", sf.omega_min, "lower end of the Omega grid");
  spectrum->add_option("--omega-max", sf.omega_max, "upper end of the Omega grid");
  spectrum->add_option("--lines", sf.lines, "bound-line file (default lines.csv beside output)");
  spectrum->add_flag("--relabel", sf.relabel, "print omega = Omega - E_c on the energy axis");
  spectrum->add_option("--root-tol", sf.root_tol, "scaled residual tolerance");

  TrajectoryFlags tf;
  auto *trajectory = app.add_subcommand("trajectory", "resonance trajectories under a sweep");
  AddModelFlags(trajectory, mf);
  AddOutputFlags(trajectory, of);
  trajectory->add_option("--param", tf.param, "ed or g");
  trajectory->add_option("--from", tf.from, "first parameter value");
  trajectory->add_option("--to", tf.to, "last parameter value");
  trajectory->add_option("--steps", tf.steps, "number of intervals");
  trajectory->add_option("--root-tol", tf.root_tol, "scaled residual tolerance");

  EpFlags ef;
  auto *ep = app.add_subcommand("ep", "scan for and refine exceptional points");
  AddModelFlags(ep, mf);
  AddOutputFlags(ep, of);
  ep->add_option("--g-range", ef.g_range, "g interval")->expected(2);
  ep->add_option("--ed-range", ef.ed_range, "E_d interval")->expected(2);
  ep->add_option("--grid", ef.grid, "scan points in g and E_d")->expected(2);
  ep->add_option("--threshold", ef.threshold, "seed pair-distance threshold");
  ep->add_option("--ep-tol", ef.ep_tol, "residual tolerance for |eta| and |eta'|");

  SelfEnergyFlags sef;
  auto *selfenergy = app.add_subcommand("selfenergy", "evaluate the self-energy at one point");
  AddModelFlags(selfenergy, mf);
  AddOutputFlags(selfenergy, of);
  selfenergy->add_option("--re", sef.re, "Re z");
  selfenergy->add_option("--im", sef.im, "Im z");
  selfenergy->add_option("--sheet", sef.sheet, "I or II");
  selfenergy->add_option("--order", sef.order, "0 for Sigma, 1 or 2 for derivatives")
      ->check(CLI::Range(0, 2));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
  }
  catch (const CLI::CallForHelp &)
  {
    out << app.help();
    return exit_ok;
  }
  catch (const CLI::ParseError &e)
  {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_usage;
  }

  try
  {
    const ChainModel model = BuildModel(*app.get_subcommands().front(), mf);
    if (*roots)
    {
      return RunRoots(model, rf, of, out);
    }
    if (*bic)
    {
      return RunBic(model, of, out);
    }
    if (*spectrum)
    {
      return RunSpectrum(model, sf, of, out, err);
    }
    if (*trajectory)
    {
      return RunTrajectory(model, tf, of, out);
    }
    if (*ep)
    {
      return RunEp(model, ef, of, out);
    }
    return RunSelfEnergy(model, sef, of, out);
  }
  catch (const NumericalError &e)
  {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
  catch (const std::logic_error &e)
  {
    // ModelError, BranchPointError and other invalid requests.
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  catch (const std::runtime_error &e)
  {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
}

int Run(int argc, char **argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return Run(args, std::cout, std::cerr);
}

}  // namespace fano::cli
