#ifndef FANO_CLI_HPP
#define FANO_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>
#include "fano/model.hpp"

namespace fano::cli
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

// Builds a model from a JSON descriptor with the fields variant, n_d, e_d, g, v,
// transition_weight and e_c. Missing fields keep their defaults.
ChainModel ModelFromJson(const std::string &text);
std::string ModelToJson(const ChainModel &model);

// Runs one subcommand (roots, bic, spectrum, trajectory, ep, selfenergy). args excludes the
// program name. Results go to the --output file or to `out`; diagnostics go to `err`.
int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

int Run(int argc, char **argv);

}  // namespace fano::cli

#endif  // FANO_CLI_HPP
