use zscale::stochastic::{AnalyticModel, Weighting};
use zscale::substitution::{catalogue, SubstitutionRule, CATALOGUE};

use crate::config::SystemArgs;
use crate::error::CliError;

/// Systems outside the substitution catalogue.
pub const EXTRA_SYSTEMS: &[(&str, &str)] = &[
    ("model-set", "cut-and-project set of the noble order p (default 1) with its natural window"),
    ("poisson", "Poisson process of unit intensity"),
    ("bernoulli", "lattice gas, occupation p, weights 0/1"),
    ("bernoulli-pm", "lattice gas, occupation p, weights ±1"),
    ("markov", "two-state Markov lattice gas with stay probabilities p (empty) and q (occupied)"),
    ("random-tiling", "binary random tiling with lengths u (probability p) and v"),
    ("rmt", "β-ensemble (beta = 1, 2, 4), analytic only"),
    ("rs-bernoulli", "Rudin–Shapiro ±1 weights, signs flipped with probability p"),
    ("tm", "Thue–Morse Riesz product distribution function"),
    ("squarefree", "square-free integers"),
];

pub fn help_text() -> String {
    let mut s = String::from("Systems:\n");
    for (name, desc) in CATALOGUE.iter().chain(EXTRA_SYSTEMS) {
        s.push_str(&format!("  {name:<20} {desc}\n"));
    }
    s
}

pub fn names() -> Vec<&'static str> {
    CATALOGUE.iter().chain(EXTRA_SYSTEMS).map(|(n, _)| *n).collect()
}

/// A resolved system.
pub enum System {
    Substitution(SubstitutionRule),
    ModelSet { p: u32 },
    Stochastic(AnalyticModel),
    ThueMorse,
    Squarefree,
}

fn integer(name: &str, x: f64) -> Result<u32, CliError> {
    if x >= 1.0 && x.fract() == 0.0 && x <= f64::from(u32::MAX) {
        Ok(x as u32)
    } else {
        Err(CliError::Config(format!("--{name} must be a positive integer for this system, got {x}")))
    }
}

fn required(name: &str, x: Option<f64>) -> Result<f64, CliError> {
    x.ok_or_else(|| CliError::Config(format!("this system needs --{name}")))
}

impl SystemArgs {
    pub fn resolve(&self) -> Result<System, CliError> {
        let name = self.system.as_str();
        Ok(match name {
            "noble" => System::Substitution(catalogue(name, &[integer("p", required("p", self.p)?)?])?),
            "gtm" => System::Substitution(catalogue(name, &[integer("p", required("p", self.p)?)?, integer("q", required("q", self.q)?)?])?),
            "tm" => System::ThueMorse,
            "model-set" => System::ModelSet { p: self.p.map(|p| integer("p", p)).transpose()?.unwrap_or(1) },
            "poisson" => System::Stochastic(AnalyticModel::Poisson),
            "bernoulli" => System::Stochastic(AnalyticModel::Bernoulli { p: required("p", self.p)?, weighting: Weighting::ZeroOne }),
            "bernoulli-pm" => System::Stochastic(AnalyticModel::Bernoulli { p: required("p", self.p)?, weighting: Weighting::PlusMinus }),
            "markov" => System::Stochastic(AnalyticModel::Markov { p: required("p", self.p)?, q: required("q", self.q)? }),
            "random-tiling" => System::Stochastic(AnalyticModel::RandomTiling {
                u: required("u", self.u)?,
                v: required("v", self.v)?,
                p: required("p", self.p)?,
            }),
            "rmt" => System::Stochastic(AnalyticModel::Rmt {
                beta: self.beta.ok_or_else(|| CliError::Config("this system needs --beta".into()))?,
            }),
            "rs-bernoulli" => System::Stochastic(AnalyticModel::RudinShapiro { p: self.p.unwrap_or(0.0) }),
            "squarefree" => System::Squarefree,
            _ if CATALOGUE.iter().any(|(n, _)| *n == name) => System::Substitution(catalogue(name, &[])?),
            _ => return Err(CliError::Config(format!("unknown system '{name}'; known systems: {}", names().join(", ")))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(system: &str) -> SystemArgs {
        SystemArgs { system: system.into(), p: None, q: None, u: None, v: None, beta: None }
    }

    #[test]
    fn every_listed_name_is_known() {
        for name in names() {
            let a = SystemArgs { p: Some(2.0), q: Some(1.0), u: Some(1.0), v: Some(2.0), beta: Some(2), ..args(name) };
            let a = if name == "markov" || name.starts_with("bernoulli") || name == "random-tiling" || name == "rs-bernoulli" {
                SystemArgs { p: Some(0.5), q: Some(0.5), ..a }
            } else {
                a
            };
            assert!(a.resolve().is_ok(), "{name}");
        }
    }

    #[test]
    fn family_parameters_are_validated() {
        assert!(args("noble").resolve().is_err());
        assert!(SystemArgs { p: Some(1.5), ..args("noble") }.resolve().is_err());
        assert!(SystemArgs { p: Some(0.3), ..args("markov") }.resolve().is_err());
        assert!(matches!(args("model-set").resolve(), Ok(System::ModelSet { p: 1 })));
        assert!(args("penrose").resolve().is_err());
    }
}
