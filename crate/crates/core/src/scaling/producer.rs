use std::sync::Arc;

use crate::cutproject::{z_pure_point, CutProjectScheme};
use crate::numbertheory::z_squarefree;
use crate::riesz::{ln_distribution_at_scale, RieszError, RieszFactor, TmFourierSeries};
use crate::stochastic::{z_analytic, AnalyticModel};
use crate::{Error, FieldNumber};

/// Anything that yields ln Z(k) for k > 0.
pub trait ZProducer: Sync {
    fn id(&self) -> String;
    fn ln_z(&self, k: f64) -> Result<f64, Error>;
}

/// Wraps a closure; mostly for synthetic data.
pub struct FnProducer<F> {
    id: String,
    f: F,
}

impl<F: Fn(f64) -> Result<f64, Error> + Sync> FnProducer<F> {
    pub fn new(id: impl Into<String>, f: F) -> Self {
        Self { id: id.into(), f }
    }
}

impl<F: Fn(f64) -> Result<f64, Error> + Sync> ZProducer for FnProducer<F> {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn ln_z(&self, k: f64) -> Result<f64, Error> {
        (self.f)(k)
    }
}

/// Pure-point Z of a model set with window length `s`, peaks cut at |κκ⋆| ≤ `cut`.
pub struct PurePointProducer {
    scheme: CutProjectScheme,
    s: FieldNumber,
    cut: f64,
}

impl PurePointProducer {
    pub fn new(scheme: CutProjectScheme, s: FieldNumber, cut: f64) -> Self {
        Self { scheme, s, cut }
    }
}

impl ZProducer for PurePointProducer {
    fn id(&self) -> String {
        let o = self.scheme.order();
        format!("pure-point(t={},n={},s={:.6},cut={})", o.trace(), o.norm_parameter(), self.s.value(), self.cut)
    }

    fn ln_z(&self, k: f64) -> Result<f64, Error> {
        Ok(z_pure_point(&self.scheme, &self.s, k, self.cut)?.value.ln())
    }
}

/// Thue–Morse distribution function from its Fourier series.
pub struct TmFourierProducer {
    series: Arc<TmFourierSeries>,
}

impl TmFourierProducer {
    pub fn new(series: Arc<TmFourierSeries>) -> Self {
        Self { series }
    }
}

impl ZProducer for TmFourierProducer {
    fn id(&self) -> String {
        format!("thue-morse-fourier(M={})", self.series.terms())
    }

    fn ln_z(&self, k: f64) -> Result<f64, Error> {
        Ok(self.series.eval(k)?.ln_value)
    }
}

/// Nearest n with k ≈ b⁻ⁿ; k must be such a power to one part in 10⁹.
fn exact_level(k: f64, base: f64) -> Result<u32, RieszError> {
    let n = -k.ln() / base.ln();
    let r = n.round();
    if !(r >= 1.0) || (n - r).abs() > 1e-9 * n.max(1.0) {
        return Err(RieszError::Domain { what: "k (must be a power of the base)", value: k });
    }
    Ok(r as u32)
}

/// ln of the Thue–Morse upper bound 2⁻ⁿ f_n(2⁻ⁿ) at k = 2⁻ⁿ.
#[derive(Clone, Copy, Debug, Default)]
pub struct TmUpperBoundProducer;

impl ZProducer for TmUpperBoundProducer {
    fn id(&self) -> String {
        "thue-morse-upper-bound".into()
    }

    fn ln_z(&self, k: f64) -> Result<f64, Error> {
        let n = exact_level(k, 2.0)?;
        Ok(crate::riesz::tm_bounds(n)?.ln_upper)
    }
}

/// gTM distribution function at k = b⁻ⁿ by quadrature of the truncated Riesz product.
pub struct GtmProducer {
    factor: RieszFactor,
    extra: u32,
}

impl GtmProducer {
    pub fn new(p: u32, q: u32) -> Result<Self, RieszError> {
        let factor = RieszFactor::new(p, q)?;
        let extra = crate::riesz::default_extra_depth(factor.base());
        Ok(Self { factor, extra })
    }

    pub fn base(&self) -> u32 {
        self.factor.base()
    }
}

impl ZProducer for GtmProducer {
    fn id(&self) -> String {
        format!("gtm({},{})", self.factor.p(), self.factor.q())
    }

    fn ln_z(&self, k: f64) -> Result<f64, Error> {
        let n = exact_level(k, f64::from(self.factor.base()))?;
        Ok(ln_distribution_at_scale(&self.factor, n, self.extra))
    }
}

/// Square-free Z(k)/I(0) truncated to the first `generators` generators.
pub struct SquarefreeProducer {
    generators: usize,
}

impl SquarefreeProducer {
    pub fn new(generators: usize) -> Self {
        Self { generators }
    }
}

impl ZProducer for SquarefreeProducer {
    fn id(&self) -> String {
        format!("squarefree(S={})", self.generators)
    }

    fn ln_z(&self, k: f64) -> Result<f64, Error> {
        Ok(z_squarefree(k, self.generators)?.ln())
    }
}

/// Closed-form or quadrature Z of a stochastic reference model.
pub struct AnalyticProducer {
    model: AnalyticModel,
}

impl AnalyticProducer {
    pub fn new(model: AnalyticModel) -> Self {
        Self { model }
    }
}

impl ZProducer for AnalyticProducer {
    fn id(&self) -> String {
        self.model.to_string()
    }

    fn ln_z(&self, k: f64) -> Result<f64, Error> {
        Ok(z_analytic(&self.model, k)?.ln())
    }
}
