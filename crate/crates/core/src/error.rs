use thiserror::Error;

/// Errors raised by the tunneling-time library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter failed validation before any computation ran.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The requested energy is not strictly between 0 and the barrier height.
    #[error("energy {eps} is outside the sub-barrier range (0, {u0})")]
    NotSubBarrier { eps: f64, u0: f64 },

    /// A quantity of one kind was passed where another kind was expected.
    #[error("quantity kind mismatch: expected {expected}, got {found}")]
    QuantityMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// Adaptive quadrature hit its depth bound before meeting the tolerance.
    #[error("quadrature did not converge on [{a}, {b}]: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureNotConverged {
        a: f64,
        b: f64,
        estimate: f64,
        tolerance: f64,
    },

    /// Synthesis of the time-dependent amplitude failed its error check at `t`.
    #[error("wave-packet synthesis did not converge at t = {t}: error estimate {estimate:e} exceeds {tolerance:e}")]
    SynthesisNotConverged { t: f64, estimate: f64, tolerance: f64 },

    /// A finite-difference stencil would leave the function's domain.
    #[error("difference stencil [{lo}, {hi}] leaves the domain ({domain_lo}, {domain_hi})")]
    DomainViolation {
        lo: f64,
        hi: f64,
        domain_lo: f64,
        domain_hi: f64,
    },

    /// Two adjacent samples differ in phase by too much to unwrap unambiguously.
    #[error("phase jump of {jump} rad between samples {index} and {next}; refine the sweep", next = .index + 1)]
    PhaseJump { index: usize, jump: f64 },

    /// A sample with zero modulus has no phase.
    #[error("sample {index} has zero modulus; phase undefined")]
    ZeroSample { index: usize },

    /// The discrete maximum sits on the first or last node.
    #[error("maximum at grid edge (index {index} of {len}); extend the grid")]
    EdgeMaximum { index: usize, len: usize },

    /// The time window does not let the density decay far enough.
    #[error("time window ending at {t_end} is too short: end density is {ratio:.3e} of the maximum")]
    WindowTooShort { t_end: f64, ratio: f64 },

    /// The tail of a mean-time integral carries too much weight.
    #[error("tail criterion unmet for window [0, {t_cut}]: tail share {tail_share:.3e} of the norm, {moment_share:.3e} of the first moment")]
    TailCriterion {
        t_cut: f64,
        tail_share: f64,
        moment_share: f64,
    },

    /// A requested synthesis lies outside the range the spectral grid was built for.
    #[error("spectral grid built for {what} <= {built}, requested {requested}")]
    GridTooCoarse {
        what: &'static str,
        built: f64,
        requested: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// `true` for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNotConverged { .. }
                | Error::SynthesisNotConverged { .. }
                | Error::PhaseJump { .. }
                | Error::EdgeMaximum { .. }
                | Error::WindowTooShort { .. }
                | Error::TailCriterion { .. }
                | Error::GridTooCoarse { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
