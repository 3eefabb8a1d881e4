use rand::Rng;

use super::rule::SubstitutionRule;
use super::SubstitutionError;

/// Named rules with their parameter signatures.
pub const CATALOGUE: &[(&str, &str)] = &[
    ("fibonacci", "a→ab, b→a"),
    ("noble", "p ≥ 1: a→aᵖb, b→a"),
    ("period-doubling", "a→ab, b→aa"),
    ("limit-quasiperiodic", "a→aab, b→abab"),
    ("kolakoski", "a→abc, b→ab, c→b"),
    ("plastic", "a→b, b→c, c→ab"),
    ("thue-morse", "a→ab, b→ba"),
    ("gtm", "p, q ≥ 1: a→aᵖbᵠ, b→bᵖaᵠ"),
    ("rudin-shapiro", "a→ab, b→ac, c→db, d→dc"),
];

fn catalogue_names() -> String {
    CATALOGUE.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
}

fn param_error(name: &str, reason: impl Into<String>) -> SubstitutionError {
    SubstitutionError::Parameter { name: name.to_string(), reason: reason.into() }
}

fn expect_params<const N: usize>(name: &str, params: &[u32]) -> Result<[u32; N], SubstitutionError> {
    let arr: [u32; N] =
        params.try_into().map_err(|_| param_error(name, format!("expected {N} parameter(s), got {}", params.len())))?;
    if arr.contains(&0) {
        return Err(param_error(name, "parameters must be at least 1"));
    }
    Ok(arr)
}

/// Look up a named rule; `params` carries p (and q) for the parametrised families.
pub fn catalogue(name: &str, params: &[u32]) -> Result<SubstitutionRule, SubstitutionError> {
    let fixed = |images: &[&str]| -> Result<SubstitutionRule, SubstitutionError> {
        expect_params::<0>(name, params)?;
        SubstitutionRule::from_strings(name, images)
    };
    match name {
        "fibonacci" => fixed(&["ab", "a"]),
        "period-doubling" => fixed(&["ab", "aa"]),
        "limit-quasiperiodic" => fixed(&["aab", "abab"]),
        "kolakoski" => fixed(&["abc", "ab", "b"]),
        "plastic" => fixed(&["b", "c", "ab"]),
        "thue-morse" => fixed(&["ab", "ba"]),
        "rudin-shapiro" => fixed(&["ab", "ac", "db", "dc"]),
        "noble" => {
            let [p] = expect_params::<1>(name, params)?;
            let p = p as usize;
            SubstitutionRule::new(format!("noble-{p}"), vec![[vec![0; p], vec![1]].concat(), vec![0]])
        }
        "gtm" => {
            let [p, q] = expect_params::<2>(name, params)?;
            let (p, q) = (p as usize, q as usize);
            SubstitutionRule::new(
                format!("gtm-{p}-{q}"),
                vec![[vec![0; p], vec![1; q]].concat(), [vec![1; p], vec![0; q]].concat()],
            )
        }
        _ => Err(SubstitutionError::UnknownRule { name: name.to_string(), known: catalogue_names() }),
    }
}

/// First `n` Rudin–Shapiro weights: the one-sided fixed point of the four-letter rule from
/// `a`, projected by a, b ↦ +1 and c, d ↦ −1.
pub fn rudin_shapiro_weights(n: usize) -> Vec<i8> {
    let rule = catalogue("rudin-shapiro", &[]).expect("catalogue entry");
    let mut word = vec![0u8];
    while word.len() < n {
        word = rule.apply(&word);
    }
    word.truncate(n);
    word.into_iter().map(|l| if l < 2 { 1 } else { -1 }).collect()
}

/// Flip each sign independently with probability p.
pub fn bernoullise<R: Rng + ?Sized>(weights: &[i8], p: f64, rng: &mut R) -> Vec<i8> {
    let p = p.clamp(0.0, 1.0);
    weights.iter().map(|&w| if rng.random_bool(p) { -w } else { w }).collect()
}
