#pragma once

#include <stdexcept>
#include <string>

namespace wfl {

/// A size, memory or time budget would be exceeded; nothing was computed.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A checked identity or inequality failed. Always a bug or a counterexample.
struct ConsistencyFailure : std::logic_error {
    using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ConsistencyFailure(what);
}

}  // namespace wfl
