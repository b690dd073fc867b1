#pragma once

namespace flattop {

//! Bessel function of the first kind of order 2.
//!
//! Ascending series (extended precision) for |x| <= 12, Miller's backward
//! recurrence on (12, 25], Hankel asymptotic expansion beyond. Absolute
//! error stays below 1e-12 on [0, 30].
double bessel_j2(double x);

} // namespace flattop
