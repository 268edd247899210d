#pragma once

#include <ostream>

namespace rrl {

// Exit codes: 0 success, 1 a check failed, 2 bad arguments or spec file,
// 3 a computation raised an error. Nothing is written unless the run completes.
int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rrl
