//! Mixed recursion–corecursion.
