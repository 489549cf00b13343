//! Linear paired-comparison rating functions.
//!
//! A model maps a rating difference to an expected score through a
//! continuous, strictly increasing distribution symmetric about zero. Only
//! the scale is configurable; the location is pinned at zero.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};

pub const DEFAULT_ELO_SCALE: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelFamily {
    /// `1 / (1 + 10^(-x / scale))`
    EloLogistic,
    /// `1 / (1 + exp(-x / scale))`
    Logistic,
    /// Normal CDF with standard deviation `scale`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingModel {
    family: ModelFamily,
    scale: f64,
}

impl Default for RatingModel {
    fn default() -> Self {
        Self::elo()
    }
}

impl RatingModel {
    pub fn new(family: ModelFamily, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidModel(format!("scale {scale}")));
        }
        Ok(Self { family, scale })
    }

    pub fn elo() -> Self {
        Self {
            family: ModelFamily::EloLogistic,
            scale: DEFAULT_ELO_SCALE,
        }
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Default tolerance for merging near-equal ratings into a tie.
    pub fn default_tie_tol(&self) -> f64 {
        1e-6 * self.scale
    }

    /// `F_l(x)`: expected score at rating difference `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let z = x / self.scale;
        match self.family {
            ModelFamily::EloLogistic => logistic(z * std::f64::consts::LN_10),
            ModelFamily::Logistic => logistic(z),
            ModelFamily::Gaussian => 0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2),
        }
    }

    pub fn expected_score(&self, r_i: f64, r_j: f64) -> Result<f64> {
        for r in [r_i, r_j] {
            if !r.is_finite() {
                return Err(Error::NonFinite(r));
            }
        }
        Ok(self.cdf(r_i - r_j))
    }

    /// `F_l⁻¹(s)`, defined only for `s` strictly inside (0, 1).
    pub fn quantile(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::BoundaryScore {
                player: None,
                score: s,
            });
        }
        let z = match self.family {
            // ln(s / (1 - s)) without cancellation near either end
            ModelFamily::EloLogistic => logit(s) / std::f64::consts::LN_10,
            ModelFamily::Logistic => logit(s),
            ModelFamily::Gaussian => inverse_normal_cdf(s),
        };
        Ok(z * self.scale)
    }

    /// Whether `x` and `y` make identical predictions, i.e. differ by a constant
    /// shift up to `tol` in the sup norm.
    pub fn essentially_identical(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        tol: f64,
    ) -> Result<bool> {
        Ok(shift_distance(x, y)? <= tol)
    }
}

/// `min_λ ‖x - y - λe‖_∞`, attained at the midpoint of the extremes of `x - y`.
pub fn shift_distance(x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let diff = x - y;
    Ok(0.5 * (diff.max() - diff.min()))
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn logit(s: f64) -> f64 {
    s.ln() - (-s).ln_1p()
}

/// Inverse of the standard normal CDF.
///
/// Wichura's AS 241 (PPND16) rational approximations, accurate to about
/// 1e-16 relative over the whole open interval.
#[allow(clippy::excessive_precision)]
fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    fn ratio(num: &[f64; 8], den: &[f64; 8], r: f64) -> f64 {
        let horner = |c: &[f64; 8]| c.iter().rev().fold(0.0, |acc, &k| acc * r + k);
        horner(num) / horner(den)
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * ratio(&A, &B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let z = if r <= 5.0 {
        ratio(&C, &D, r - 1.6)
    } else {
        ratio(&E, &F, r - 5.0)
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}

impl fmt::Display for RatingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            ModelFamily::EloLogistic => "elo",
            ModelFamily::Logistic => "logistic",
            ModelFamily::Gaussian => "gaussian",
        };
        write!(f, "{name}:{}", self.scale)
    }
}

impl FromStr for RatingModel {
    type Err = Error;

    /// `elo`, `elo:<scale>`, `logistic:<scale>` or `gaussian:<sigma>`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidModel(text.to_string());
        let trimmed = text.trim();
        let (name, scale) = match trimmed.split_once(':') {
            Some((name, scale)) => (name, Some(scale)),
            None => (trimmed, None),
        };
        let family = match name.to_ascii_lowercase().as_str() {
            "elo" => ModelFamily::EloLogistic,
            "logistic" => ModelFamily::Logistic,
            "gaussian" => ModelFamily::Gaussian,
            _ => return Err(bad()),
        };
        let scale = match (family, scale) {
            (ModelFamily::EloLogistic, None) => DEFAULT_ELO_SCALE,
            (_, None) => return Err(bad()),
            (_, Some(s)) => s.trim().parse::<f64>().map_err(|_| bad())?,
        };
        RatingModel::new(family, scale).map_err(|_| bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_models() -> [RatingModel; 3] {
        [
            RatingModel::elo(),
            RatingModel::new(ModelFamily::Logistic, 1.7).unwrap(),
            RatingModel::new(ModelFamily::Gaussian, 200.0).unwrap(),
        ]
    }

    #[test]
    fn elo_reference_values() {
        let elo = RatingModel::elo();
        assert_eq!(elo.expected_score(1500.0, 1500.0).unwrap(), 0.5);
        assert!((elo.cdf(400.0) - 10.0 / 11.0).abs() < 1e-15);
        let q = elo.quantile(0.75).unwrap();
        assert!((q - 400.0 * 3f64.log10()).abs() < 1e-10);
        assert!((q - 190.848_501_887_864_9).abs() < 1e-9);
        assert!((elo.quantile(0.25).unwrap() + q).abs() < 1e-12);
    }

    #[test]
    fn medians_are_zero() {
        for m in all_models() {
            assert_eq!(m.quantile(0.5).unwrap(), 0.0);
            assert_eq!(m.cdf(0.0), 0.5);
        }
    }

    #[test]
    fn quantile_rejects_boundary() {
        let elo = RatingModel::elo();
        for s in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(elo.quantile(s), Err(Error::BoundaryScore { .. })));
        }
        assert!(matches!(
            elo.expected_score(f64::INFINITY, 0.0),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn gaussian_quantile_against_reference() {
        // scipy.special.ndtri, cross-checked with mpmath root finding
        let cases = [
            (0.975, 1.959_963_984_540_054),
            (0.1, -1.281_551_565_544_600_5),
            (1e-10, -6.361_340_902_404_056),
            (0.6, 0.253_347_103_135_799_7),
            (1e-300, -37.047_096_299_361_2),
        ];
        for (p, z) in cases {
            let got = inverse_normal_cdf(p);
            assert!(
                (got - z).abs() <= 1e-12 * z.abs().max(1.0),
                "p={p}: {got} vs {z}"
            );
        }
    }

    #[test]
    fn model_grammar() {
        assert_eq!("elo".parse::<RatingModel>().unwrap(), RatingModel::elo());
        let m: RatingModel = "elo:200".parse().unwrap();
        assert_eq!((m.family(), m.scale()), (ModelFamily::EloLogistic, 200.0));
        let m: RatingModel = "logistic:1".parse().unwrap();
        assert_eq!(m.family(), ModelFamily::Logistic);
        let m: RatingModel = "gaussian:300".parse().unwrap();
        assert_eq!((m.family(), m.scale()), (ModelFamily::Gaussian, 300.0));
        for bad in [
            "",
            "logistic",
            "gaussian:",
            "elo:-1",
            "elo:0",
            "glicko:3",
            "elo:abc",
        ] {
            assert!(bad.parse::<RatingModel>().is_err(), "{bad}");
        }
        let m: RatingModel = "gaussian:300".parse().unwrap();
        assert_eq!(m.to_string().parse::<RatingModel>().unwrap(), m);
    }

    #[test]
    fn essential_identity() {
        let elo = RatingModel::elo();
        let x = DVector::from_vec(vec![1.0, 2.0, -3.0]);
        let y = x.add_scalar(42.0);
        assert!(elo.essentially_identical(&x, &y, 1e-12).unwrap());
        let a = DVector::from_vec(vec![0.0, 0.0]);
        let b = DVector::from_vec(vec![0.0, 1.0]);
        assert!(!elo.essentially_identical(&a, &b, 1e-6).unwrap());
        assert_eq!(shift_distance(&a, &b).unwrap(), 0.5);
        assert!(elo
            .essentially_identical(&a, &DVector::zeros(3), 1.0)
            .is_err());
    }

    #[test]
    fn monotone_on_grid() {
        for m in all_models() {
            let s = m.scale();
            let mut prev = 0.0;
            for k in -600..=600 {
                let v = m.cdf(k as f64 * s / 100.0);
                assert!(v > prev, "{m} not increasing at {k}");
                prev = v;
            }
        }
    }

    // Round trip through an f64 probability loses what the representation of
    // `cdf(x)` loses: half an ulp of p divided by the density at x.
    fn representation_floor(m: &RatingModel, x: f64) -> f64 {
        let p = m.cdf(x);
        let h = 1e-6 * m.scale();
        let density = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
        0.5 * f64::EPSILON * p / density
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn round_trip(u in -6.0f64..6.0, which in 0usize..3) {
            let m = all_models()[which];
            let x = u * m.scale();
            let back = m.quantile(m.cdf(x)).unwrap();
            let bound = 1e-9 * m.scale() + 2.0 * representation_floor(&m, x);
            prop_assert!((back - x).abs() <= bound, "{m}: x={x} back={back} bound={bound}");
        }

        #[test]
        fn round_trip_lower_half(u in -10.0f64..0.0, which in 0usize..3) {
            let m = all_models()[which];
            let x = u * m.scale();
            let back = m.quantile(m.cdf(x)).unwrap();
            prop_assert!((back - x).abs() <= 1e-9 * m.scale(), "{m}: x={x} back={back}");
        }

        #[test]
        fn symmetric(u in -10.0f64..10.0, which in 0usize..3) {
            let m = all_models()[which];
            let x = u * m.scale();
            prop_assert!((m.cdf(x) + m.cdf(-x) - 1.0).abs() <= 1e-12);
            let (a, b) = (m.expected_score(x, 0.0).unwrap(), m.expected_score(0.0, x).unwrap());
            prop_assert!((a + b - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn quantile_increasing(a in 1e-6f64..0.999_999, b in 1e-6f64..0.999_999, which in 0usize..3) {
            let m = all_models()[which];
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(lo < hi);
            prop_assert!(m.quantile(lo).unwrap() < m.quantile(hi).unwrap());
        }
    }
}
