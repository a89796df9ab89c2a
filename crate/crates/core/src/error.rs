/// Solver-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("nonphysical material: E = {e} Pa, nu = {nu} (need E > 0 and -1 < nu < 0.5)")]
    Material { e: f64, nu: f64 },

    #[error("invalid geometry: need 0 < a < eps < b and h > 0 (a = {a}, eps = {eps}, b = {b}, h = {h})")]
    Geometry { a: f64, eps: f64, b: f64, h: f64 },

    #[error("negative load pressure p = {0} Pa")]
    NegativePressure(f64),

    #[error("mode index k = {0} is even; even modes vanish identically and are never constructed")]
    EvenMode(u32),

    #[error("series order must be odd and >= 3, got N = {0}")]
    BadSeriesOrder(u32),

    #[error("Wronskian numerically singular at rho = {rho} m (mode k = {k})")]
    SingularWronskian { k: u32, rho: f64 },

    #[error(
        "boundary system for mode k = {k} too ill-conditioned for double precision \
         (condition estimate {cond:.3e} > 1e15); enable extended_precision"
    )]
    IllConditioned { k: u32, cond: f64 },

    #[error("quadrature for mode k = {k} did not converge to {tol:.1e} relative ({panels} panels)")]
    QuadratureDivergence { k: u32, tol: f64, panels: usize },

    #[error("series order selection for mode k = {k} exceeded the ceiling N = {ceiling}")]
    OrderCeiling { k: u32, ceiling: u32 },

    #[error("truncation bound overflowed the representable range (k = {k}, N = {n})")]
    BoundOverflow { k: u32, n: u32 },

    #[error("collocation discretization singular (mode k = {k}, {n_mesh} mesh intervals)")]
    SingularDiscretization { k: u32, n_mesh: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("verification failed: max relative deviation {dev:.3e} exceeds {tol:.1e} (mode k = {k})")]
    VerificationFailed { k: u32, dev: f64, tol: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
