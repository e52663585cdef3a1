#pragma once

#include <iosfwd>

namespace srk::cli {

/// Entry point of the `srk` tool. Returns 0 on success, 2 when flags fail
/// validation and 1 on runtime failure.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace srk::cli
