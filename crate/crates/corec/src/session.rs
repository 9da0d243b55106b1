//! Session driver.
pub struct Session;
