use core::fmt;

/// Errors surfaced by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a mathematical precondition (κ ≤ 0, r < 1, ...).
    Domain(&'static str),
    /// Marked points (or a marked point and the driving value) closer than
    /// the configured floor; log-derivatives would be meaningless.
    CoincidentPoints,
    /// Parameters outside the finiteness window of the left-passage integral.
    Window(&'static str),
    /// A contour or conformal-map evaluation left its admissible region by
    /// more than the allowed tolerance.
    Branch(&'static str),
    /// Operation requested on a path/state that has already stopped.
    Stopped,
    /// A quadrature or iteration failed to reach its requested tolerance.
    Tolerance(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::CoincidentPoints => write!(f, "coincident points below separation floor"),
            Error::Window(what) => write!(f, "parameter window violation: {what}"),
            Error::Branch(what) => write!(f, "branch violation: {what}"),
            Error::Stopped => write!(f, "state is stopped"),
            Error::Tolerance(what) => write!(f, "tolerance not met: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
