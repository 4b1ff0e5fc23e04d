#pragma once

#include "otx/core.hpp"

namespace otx {

/// Maps a nonnegative plan onto U(r, l): scale rows down to r, scale columns
/// down to l, then restore the missing mass with the rank-one patch
/// err_r err_l^T / ||err_r||_1. Moves at most 2 d(X) mass in l1.
TransportPlan round_to_polytope(const Matrix& plan, const Histogram& r, const Histogram& l);
TransportPlan round_to_polytope(const TransportPlan& plan, const Histogram& r, const Histogram& l);

} // namespace otx
