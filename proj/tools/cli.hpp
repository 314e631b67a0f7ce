#pragma once

// Command-line front end. run() is the whole program; main() only forwards to it
// so tests can drive the CLI in-process with captured streams.
//
// Exit codes: 0 success, 1 a verification suite or internal consistency check
// failed, 2 usage or domain error (message and usage on the error stream).

#include <iosfwd>

namespace qcvx::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcvx::cli
