//! Coinduction up to congruence closure.
