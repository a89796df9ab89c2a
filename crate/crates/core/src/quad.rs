//! Fixed Gauss–Legendre rules used by the particular-solution integral and the
//! axial-force diagnostic.
//!
//! Node/weight tables are precomputed to 36 significant digits so that they
//! parse losslessly into the extended-precision scalar type; composite panels
//! provide the adaptivity.

use crate::scalar::Scalar;

/// Positive half of the 16-point rule on [−1, 1]; nodes are symmetric and the
/// full rule is expanded at parse time.
const GL16_HALF: [(&str, &str); 8] = [
    (
        "0.0950125098376374401853193354249580631",
        "0.189450610455068496285396723208283105",
    ),
    (
        "0.281603550779258913230460501460496106",
        "0.182603415044923588866763667969219939",
    ),
    (
        "0.458016777657227386342419442983577574",
        "0.169156519395002538189312079030359962",
    ),
    (
        "0.617876244402643748446671764048791019",
        "0.149595988816576732081501730547478549",
    ),
    (
        "0.755404408355003033895101194847442268",
        "0.12462897125553387205247628219201642",
    ),
    (
        "0.865631202387831743880467897712393132",
        "0.0951585116824927848099251076022462264",
    ),
    (
        "0.944575023073232576077988415534608345",
        "0.0622535239386478928628438369943776943",
    ),
    (
        "0.989400934991649932596154173450332627",
        "0.0271524594117540948517805724560181035",
    ),
];

/// The 16-point rule as (node, weight) pairs in the scalar type `S`.
///
/// Decimal strings are split into a leading f64 and a residual correction so
/// the conversion keeps ~32 significant digits when `S` is extended.
pub fn gl16<S: Scalar>() -> Vec<(S, S)> {
    let mut rule = Vec::with_capacity(16);
    for &(x, w) in GL16_HALF.iter().rev() {
        rule.push((-parse_decimal::<S>(x), parse_decimal::<S>(w)));
    }
    for &(x, w) in GL16_HALF.iter() {
        rule.push((parse_decimal::<S>(x), parse_decimal::<S>(w)));
    }
    rule
}

/// Parses a positive decimal literal by digit accumulation in `S` arithmetic,
/// so the result carries the full precision of the scalar type (the stdlib
/// parser would round through f64 first).
fn parse_decimal<S: Scalar>(s: &str) -> S {
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    let ten = S::of_f64(10.0);
    let mut v = S::zero();
    for c in int_part.chars().chain(frac_part.chars()) {
        let d = c.to_digit(10).expect("decimal digit");
        v = v * ten + S::of_usize(d as usize);
    }
    let mut scale = S::one();
    for _ in 0..frac_part.len() {
        scale = scale * ten;
    }
    v / scale
}

/// Integrates `f` over [lo, hi] with a composite 16-point rule over `panels`
/// equal panels, using a caller-supplied rule table (so the table is built
/// once per mode, not per call).
pub fn integrate_panels<S: Scalar, F: FnMut(S) -> [S; 4]>(
    rule: &[(S, S)],
    lo: S,
    hi: S,
    panels: usize,
    mut f: F,
) -> [S; 4] {
    let half_total = (hi - lo) / S::of_usize(2 * panels);
    let mut acc = [S::zero(); 4];
    for p in 0..panels {
        let mid = lo + half_total * S::of_usize(2 * p + 1);
        for &(x, w) in rule {
            let v = f(mid + half_total * x);
            let ww = w * half_total;
            for i in 0..4 {
                acc[i] = acc[i] + ww * v[i];
            }
        }
    }
    acc
}

/// 64-point Gauss–Legendre rule on [−1, 1] (f64; used only for postprocessing
/// integrals).  Positive half; mirrored at use.
pub const GL64_HALF: [(f64, f64); 32] = [
    (0.02435029266342443, 0.04869095700913975),
    (0.07299312178779904, 0.048575467441503456),
    (0.12146281929612056, 0.048344762234802954),
    (0.1696444204239928, 0.04799938859645832),
    (0.21742364374000708, 0.0475401657148303),
    (0.2646871622087674, 0.04696818281621),
    (0.31132287199021097, 0.046284796581314375),
    (0.3572201583376681, 0.045491627927418114),
    (0.4022701579639916, 0.044590558163756545),
    (0.4463660172534641, 0.043583724529323464),
    (0.48940314570705296, 0.0424735151236536),
    (0.5312794640198946, 0.041262563242623486),
    (0.571895646202634, 0.03995374113272035),
    (0.6111553551723933, 0.03855015317861559),
    (0.6489654712546573, 0.03705512854024015),
    (0.6852363130542333, 0.03547221325688232),
    (0.7198818501716108, 0.03380516183714179),
    (0.7528199072605319, 0.03205792835485145),
    (0.7839723589433414, 0.030234657072402495),
    (0.8132653151227975, 0.028339672614259702),
    (0.8406292962525803, 0.026377469715054627),
    (0.8659993981540928, 0.024352702568710853),
    (0.8893154459951141, 0.022270173808383007),
    (0.9105221370785028, 0.020134823153530094),
    (0.9295691721319396, 0.0179517157756973),
    (0.9464113748584028, 0.015726030476025082),
    (0.9610087996520538, 0.013463047896718231),
    (0.973326827789911, 0.011168139460131466),
    (0.983336253884626, 0.008846759826364391),
    (0.9910133714767443, 0.006504457968979654),
    (0.9963401167719552, 0.004147033260562923),
    (0.9993050417357722, 0.0017832807216942152),
];

/// Integrates a scalar f64 function over [lo, hi] with the single-panel
/// 64-point rule.
pub fn integrate_gl64<F: FnMut(f64) -> f64>(lo: f64, hi: f64, mut f: F) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for &(x, w) in GL64_HALF.iter() {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}
