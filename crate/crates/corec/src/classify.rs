//! Classification of definitions against the corecursion state.
