#pragma once

namespace relay {

// Full command line driver: subcommands exponent, simulate, sweep, verify,
// converse. Returns the process exit code: 0 on success, 1 on usage, config,
// or domain errors (including a failed verify), 2 when an internal
// consistency check fires. Lives in the library so tests can drive it.
int cli_main(int argc, const char* const* argv);

}  // namespace relay
