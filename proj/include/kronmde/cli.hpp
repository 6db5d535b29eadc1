#pragma once

// Command-line front end.  cli_main is the whole program (the binary's main
// just forwards argv) so the test suite can drive every command in-process
// and assert on exit codes and emitted files.
//
// Exit codes, stable across releases:
//   0  success
//   2  input error (bad flags, unreadable/invalid model file, bad ranges)
//   3  solver non-convergence (the report is still written)
//   4  partial grid failure (NaN rows / UNKNOWN points; output still written)
//   5  verification failure (report still written)

#include <string>
#include <vector>

#include "kronmde/spectrum.hpp"

namespace kronmde {

// "a+bi" with optional whitespace; also accepts bare reals ("1.5"), bare
// imaginaries ("2i", "-i", "i"), and exponent notation in either part.
cx parse_complex(const std::string& text);

// "re_min:re_max:count,im_min:im_max:count"
GridSpec parse_grid(const std::string& text);

// args excludes the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace kronmde
