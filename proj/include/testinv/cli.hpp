#pragma once

namespace testinv::cli {

/// Command-line entry point. Exit codes: 0 success, 2 parse/validation
/// error, 3 precision not stabilized, 4 unsupported torus/character/
/// class-number path, 1 internal error.
int run(int argc, char** argv);

} // namespace testinv::cli
