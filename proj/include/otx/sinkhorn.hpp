#pragma once

#include "otx/solver.hpp"

namespace otx {

/// Alternating marginal scaling on the kernel exp(-C / eta). Shares the
/// stopping rule, trace format and iteration accounting of solve(): one
/// iteration is a row sweep followed by a column sweep. Trace dual values use
/// alpha = eta (ln u + 1/2), beta = eta (ln v + 1/2), the dual point whose
/// primal_map equals diag(u) K diag(v).
SolveReport sinkhorn_solve(const RegularizedProblem& prob, const SolveOptions& opts);

} // namespace otx
