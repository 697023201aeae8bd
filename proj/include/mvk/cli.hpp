#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mvk {

// One command, with the library operations it exposes; every operation
// appears under exactly one command.
struct DispatchEntry {
  std::string command;
  std::vector<std::string> operations;
};

const std::vector<DispatchEntry>& dispatch_table();

// Runs the argument list (program name excluded). Returns 0 on
// success, 1 when a requested or implied check fails, 2 on usage or
// input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mvk
