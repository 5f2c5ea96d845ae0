#pragma once

namespace appealgate::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
int run(int argc, const char* const* argv);

} // namespace appealgate::cli
