//===- locksets.hpp - Critical-section analysis -----------------*- C++ -*-===//

#pragma once

#include "ecdiff/frontend.hpp"

namespace ecdiff::detail {

/// Must-held lockset pass run at parse time. Only reports a `wait` whose
/// mutex is not held on every path; lock/unlock pairing is left to
/// computeRegions.
void checkWaits(const Program &P);

/// Region of every (statement, lock) pair whose lock is held on all paths.
/// Throws FrontendError on unbalanced or re-entrant locking.
CriticalSectionMap computeRegions(const Program &P);

} // namespace ecdiff::detail
