//! Known mixture densities used as ground truth: exact pdf/cdf, seeded
//! samplers and the ℓ1 distance from an estimate.

mod sampling;

pub use sampling::{normal_quantile, open_unit};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Continuous, ContinuousCDF, Gamma, Normal};

use crate::error::{Result, SurfError};
use crate::polynomial::PiecewiseEstimate;
use crate::quadrature::{integrate, Tolerance};

/// Relative tolerance of the per-piece quadrature in [`l1_error`].
pub const L1_REL_TOL: f64 = 1e-6;

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum Family {
    Beta {
        a: f64,
        b: f64,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
    /// Shape `k` and scale `θ`.
    Gamma {
        shape: f64,
        scale: f64,
    },
}

impl Family {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Family::Beta { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            Family::Gaussian { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            Family::Gamma { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SurfError::InvalidMixture(format!(
                "bad parameters in {self:?}"
            )))
        }
    }

    fn dist(&self) -> Dist {
        // parameters were validated on construction
        match *self {
            Family::Beta { a, b } => Dist::Beta(Beta::new(a, b).expect("valid beta")),
            Family::Gaussian { mean, sd } => {
                Dist::Normal(Normal::new(mean, sd).expect("valid gaussian"))
            }
            Family::Gamma { shape, scale } => {
                Dist::Gamma(Gamma::new(shape, 1.0 / scale).expect("valid gamma"))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Family::Beta { a, b } => a / (a + b),
            Family::Gaussian { mean, .. } => mean,
            Family::Gamma { shape, scale } => shape * scale,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Family::Beta { a, b } => sampling::beta(rng, a, b),
            Family::Gaussian { mean, sd } => mean + sd * sampling::standard_normal(rng),
            Family::Gamma { shape, scale } => scale * sampling::standard_gamma(rng, shape),
        }
    }
}

#[derive(Debug, Clone)]
enum Dist {
    Beta(Beta),
    Normal(Normal),
    Gamma(Gamma),
}

impl Dist {
    fn pdf(&self, x: f64) -> f64 {
        match self {
            Dist::Beta(d) => d.pdf(x),
            Dist::Normal(d) => d.pdf(x),
            Dist::Gamma(d) => d.pdf(x),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            Dist::Beta(d) => d.cdf(x.clamp(0.0, 1.0)),
            Dist::Normal(d) => d.cdf(x),
            Dist::Gamma(d) => d.cdf(x.max(0.0)),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match self {
            Dist::Beta(d) => d.sf(x.clamp(0.0, 1.0)),
            Dist::Normal(d) => d.sf(x),
            Dist::Gamma(d) => d.sf(x.max(0.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    #[serde(flatten)]
    pub family: Family,
}

/// A finite mixture with positive weights summing to one. Serialized as a
/// plain JSON list of components.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<Component>", into = "Vec<Component>")]
pub struct MixtureSpec {
    components: Vec<Component>,
    dists: Vec<Dist>,
}

impl PartialEq for MixtureSpec {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

impl TryFrom<Vec<Component>> for MixtureSpec {
    type Error = SurfError;

    fn try_from(components: Vec<Component>) -> Result<Self> {
        Self::new(components)
    }
}

impl From<MixtureSpec> for Vec<Component> {
    fn from(m: MixtureSpec) -> Self {
        m.components
    }
}

impl MixtureSpec {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(SurfError::InvalidMixture("no components".into()));
        }
        for c in &components {
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(SurfError::InvalidMixture(format!(
                    "weight {} is not positive",
                    c.weight
                )));
            }
            c.family.validate()?;
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(SurfError::InvalidMixture(format!(
                "weights sum to {total}, not 1"
            )));
        }
        let dists = components.iter().map(|c| c.family.dist()).collect();
        Ok(Self { components, dists })
    }

    /// A one-component mixture.
    pub fn single(family: Family) -> Result<Self> {
        Self::new(vec![Component {
            weight: 1.0,
            family,
        }])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.weighted(|d| d.pdf(x))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.weighted(|d| d.cdf(x))
    }

    /// `1 - cdf(x)` without cancellation.
    pub fn sf(&self, x: f64) -> f64 {
        self.weighted(|d| d.sf(x))
    }

    pub fn mean(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.family.mean())
            .sum()
    }

    fn weighted(&self, f: impl Fn(&Dist) -> f64) -> f64 {
        self.components
            .iter()
            .zip(&self.dists)
            .map(|(c, d)| c.weight * f(d))
            .sum()
    }

    /// `count` i.i.d. draws; the same seed gives the same array.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(SurfError::TooFewSamples { needed: 1, got: 0 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cum = Vec::with_capacity(self.components.len());
        let mut acc = 0.0;
        for c in &self.components {
            acc += c.weight;
            cum.push(acc);
        }
        let last = self.components.len() - 1;
        Ok((0..count)
            .map(|_| {
                let u = open_unit(&mut rng) * acc;
                let i = cum.partition_point(|&w| w <= u).min(last);
                self.components[i].family.draw(&mut rng)
            })
            .collect())
    }
}

fn beta(a: f64, b: f64) -> Family {
    Family::Beta { a, b }
}

fn gauss(mean: f64, sd: f64) -> Family {
    Family::Gaussian { mean, sd }
}

fn gam(shape: f64, scale: f64) -> Family {
    Family::Gamma { shape, scale }
}

const NAMES: [&str; 10] = [
    "beta-f1",
    "beta-f2",
    "beta-f3",
    "gauss-f1",
    "gauss-f2",
    "gamma-f1",
    "gamma-f2",
    "beta-comp",
    "gamma-comp",
    "gauss-comp",
];

fn catalog(name: &str) -> Option<Vec<(f64, Family)>> {
    Some(match name {
        "beta-f1" => vec![(0.4, beta(3.0, 4.0)), (0.6, beta(5.0, 2.0))],
        "beta-f2" => vec![(0.4, beta(10.0, 3.0)), (0.6, beta(2.0, 8.0))],
        "beta-f3" => vec![(1.0, beta(6.0, 6.0))],
        "gauss-f1" => vec![(0.3, gauss(0.4, 0.1)), (0.7, gauss(0.6, 0.2))],
        "gauss-f2" => vec![(0.4, gauss(0.3, 0.05)), (0.6, gauss(0.7, 0.15))],
        "gamma-f1" => vec![(0.2, gam(4.0, 0.04)), (0.8, gam(8.0, 0.06))],
        "gamma-f2" => vec![(0.4, gam(3.0, 0.05)), (0.6, gam(6.0, 0.075))],
        "beta-comp" => vec![(0.4, beta(0.8, 4.0)), (0.6, beta(2.0, 2.0))],
        "gamma-comp" => vec![(0.7, gam(2.0, 2.0)), (0.3, gam(7.5, 1.0))],
        "gauss-comp" => vec![(0.65, gauss(-0.45, 0.15)), (0.35, gauss(0.3, 0.2))],
        _ => return None,
    })
}

/// Names accepted by [`builtin`], in catalog order.
pub fn builtin_names() -> &'static [&'static str] {
    &NAMES
}

pub fn builtin(name: &str) -> Result<MixtureSpec> {
    let parts = catalog(name).ok_or_else(|| SurfError::UnknownSpec(name.to_string()))?;
    MixtureSpec::new(
        parts
            .into_iter()
            .map(|(weight, family)| Component { weight, family })
            .collect(),
    )
}

pub fn builtin_specs() -> Vec<(&'static str, MixtureSpec)> {
    NAMES
        .iter()
        .map(|&n| (n, builtin(n).expect("catalog entries are valid")))
        .collect()
}

/// `∫ |est - f|`: adaptive quadrature on each piece plus the mass `f`
/// places outside the estimate's hull.
pub fn l1_error(est: &PiecewiseEstimate, spec: &MixtureSpec) -> Result<f64> {
    let tol = Tolerance {
        rel: L1_REL_TOL,
        abs: 1e-13,
        max_segments: 4000,
    };
    let (lo, hi) = est.hull();
    let mut total = spec.cdf(lo) + spec.sf(hi);
    for p in est.pieces() {
        let len = p.length();
        total += integrate(
            |x| (p.local.eval((x - p.lo) / len) - spec.pdf(x)).abs(),
            p.lo,
            p.hi,
            tol,
        )?;
    }
    Ok(total)
}
