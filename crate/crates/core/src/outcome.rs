//! Outcome vocabulary and distributions shared by every engine.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

/// Exact probability. Every quantity the engines produce is dyadic.
pub type Prob = Ratio<u64>;

pub const DETECTOR_L: &str = "detector_L";
pub const DETECTOR_R: &str = "detector_R";
pub const NO_CLICK: &str = "no_click";
pub const LABEL_SEPARATOR: &str = " & ";

/// Joins the labels recorded during one run into its final outcome label.
pub fn join_labels<S: AsRef<str>>(labels: &[S]) -> String {
    if labels.is_empty() {
        return NO_CLICK.to_string();
    }
    labels.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(LABEL_SEPARATOR)
}

/// `"num/den"`, or just `"num"` for integers.
pub fn format_prob(p: &Prob) -> String {
    if *p.denom() == 1 {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

pub fn parse_prob(text: &str) -> Option<Prob> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: u64 = n.trim().parse().ok()?;
            let d: u64 = d.trim().parse().ok()?;
            (d != 0).then(|| Prob::new(n, d))
        }
        None => text.trim().parse().ok().map(Prob::from_integer),
    }
}

pub fn prob_to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// Adds `p` to the entry for `label`.
pub fn accumulate(map: &mut BTreeMap<String, Prob>, label: String, p: Prob) {
    if p.is_zero() {
        return;
    }
    *map.entry(label).or_insert_with(Prob::zero) += p;
}

/// Distribution over final outcome labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutcomeDistribution {
    Exact(BTreeMap<String, Prob>),
    Sampled { shots: u64, counts: BTreeMap<String, u64> },
}

impl OutcomeDistribution {
    pub fn exact(&self) -> Option<&BTreeMap<String, Prob>> {
        match self {
            OutcomeDistribution::Exact(m) => Some(m),
            OutcomeDistribution::Sampled { .. } => None,
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        match self {
            OutcomeDistribution::Exact(m) => m.keys().map(String::as_str).collect(),
            OutcomeDistribution::Sampled { counts, .. } => counts.keys().map(String::as_str).collect(),
        }
    }

    /// Probability or relative frequency of a label; 0 when absent.
    pub fn frequency(&self, label: &str) -> f64 {
        match self {
            OutcomeDistribution::Exact(m) => m.get(label).map(prob_to_f64).unwrap_or(0.0),
            OutcomeDistribution::Sampled { shots, counts } => {
                counts.get(label).copied().unwrap_or(0) as f64 / *shots as f64
            }
        }
    }

    /// Sum over labels containing `part` as one of their `&`-separated pieces.
    pub fn marginal(&self, part: &str) -> f64 {
        self.labels()
            .into_iter()
            .filter(|l| l.split(LABEL_SEPARATOR).any(|p| p == part))
            .map(|l| self.frequency(l))
            .sum()
    }

    pub fn exact_marginal(&self, part: &str) -> Option<Prob> {
        let m = self.exact()?;
        Some(
            m.iter()
                .filter(|(l, _)| l.split(LABEL_SEPARATOR).any(|p| p == part))
                .map(|(_, p)| *p)
                .sum(),
        )
    }

    pub fn total(&self) -> f64 {
        self.labels().into_iter().map(|l| self.frequency(l)).sum()
    }

    /// Exact probabilities become `"num/den"` strings; sampled output keeps
    /// raw counts next to the shot count.
    pub fn to_json(&self) -> Value {
        match self {
            OutcomeDistribution::Exact(m) => {
                Value::Object(m.iter().map(|(k, p)| (k.clone(), Value::String(format_prob(p)))).collect())
            }
            OutcomeDistribution::Sampled { shots, counts } => json!({
                "shots": shots,
                "counts": counts,
                "frequencies": counts
                    .iter()
                    .map(|(k, c)| (k.clone(), *c as f64 / *shots as f64))
                    .collect::<BTreeMap<_, _>>(),
            }),
        }
    }
}

impl fmt::Display for OutcomeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.labels().iter().map(|l| l.len()).max().unwrap_or(0).max(7);
        match self {
            OutcomeDistribution::Exact(m) => {
                writeln!(f, "{:<width$}  probability", "outcome")?;
                for (label, p) in m {
                    writeln!(f, "{label:<width$}  {}", format_prob(p))?;
                }
            }
            OutcomeDistribution::Sampled { shots, counts } => {
                writeln!(f, "{:<width$}  {:>10}  frequency", "outcome", "count")?;
                for (label, c) in counts {
                    writeln!(f, "{label:<width$}  {c:>10}  {:.6}", *c as f64 / *shots as f64)?;
                }
                writeln!(f, "shots: {shots}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prob_strings() {
        assert_eq!(format_prob(&Prob::from_integer(1)), "1");
        assert_eq!(format_prob(&Prob::new(2, 8)), "1/4");
        assert_eq!(parse_prob("1/4"), Some(Prob::new(1, 4)));
        assert_eq!(parse_prob("1"), Some(Prob::from_integer(1)));
        assert_eq!(parse_prob("1/0"), None);
    }

    #[test]
    fn labels_join() {
        assert_eq!(join_labels::<&str>(&[]), NO_CLICK);
        assert_eq!(join_labels(&["a+", DETECTOR_L]), "a+ & detector_L");
    }

    #[test]
    fn marginals_and_json() {
        let mut m = BTreeMap::new();
        accumulate(&mut m, "a+ & detector_L".into(), Prob::new(1, 2));
        accumulate(&mut m, "a- & detector_R".into(), Prob::new(1, 2));
        accumulate(&mut m, "never".into(), Prob::zero());
        let d = OutcomeDistribution::Exact(m);
        assert_eq!(d.exact_marginal(DETECTOR_L), Some(Prob::new(1, 2)));
        assert_eq!(d.labels().len(), 2);
        assert_eq!(d.to_json().to_string(), r#"{"a+ & detector_L":"1/2","a- & detector_R":"1/2"}"#);
    }
}
