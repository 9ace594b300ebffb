#ifndef FANO_MODEL_HPP
#define FANO_MODEL_HPP

#include <stdexcept>
#include <string>

namespace fano
{

// Energies are measured in units of the half-bandwidth B with the band centre at E_0 = 0,
// so the continuum always occupies [-1, 1] on the real axis.
inline constexpr double band_edge = 1.0;

enum class ChainKind
{
  SemiInfinite,
  Infinite
};

// Two-level impurity coupled to a tight-binding chain. For the semi-infinite chain the
// impurity sits at site n_d counted from the wall; the infinite chain has no n_d.
struct ChainModel
{
  ChainKind chain = ChainKind::SemiInfinite;
  int n_d = 1;
  double e_d = 0.0;
  double g = 0.0;
  double v = 1.0;
  double transition_weight = 1.0;  // mu^2 T_dc^2
  double e_c = 0.0;                // only relabels Omega = omega + E_c

  bool IsSemiInfinite() const { return chain == ChainKind::SemiInfinite; }
};

// Raised for invalid parameter sets (exit code 2 at the CLI level).
class ModelError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an iteration fails to converge or a root cannot be verified (exit code 3).
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Returns the model unchanged if every field constraint holds, otherwise throws ModelError
// naming the first violated constraint.
ChainModel Validate(const ChainModel &model);

ChainModel SemiInfiniteChain(int n_d, double e_d, double g, double v = 1.0);
ChainModel InfiniteChain(double e_d, double g, double v = 1.0);

// Copy of the model with (g, E_d) replaced; used by sweeps and EP searches.
ChainModel WithCoupling(ChainModel model, double g, double e_d);

std::string ToString(ChainKind kind);
ChainKind ParseChainKind(const std::string &name);

}  // namespace fano

#endif  // FANO_MODEL_HPP
