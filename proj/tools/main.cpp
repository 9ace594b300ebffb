#include "fano/cli.hpp"

int main(int argc, char **argv)
{
  return fano::cli::Run(argc, argv);
}
