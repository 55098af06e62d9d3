#pragma once

namespace quadnet {

// Entry point behind the quadnet executable. Subcommands: gen-sample,
// gen-quads, featurize, train, eval, recommend. Exit codes: 0 success,
// 1 usage error, 2 data error, 3 numeric failure.
int run_cli(int argc, const char* const* argv);

}  // namespace quadnet
