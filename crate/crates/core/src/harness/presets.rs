//! The four reference experiments and their parameter choices.

use serde_json::{json, Value};

use crate::schemes::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    /// Smooth double-well accuracy test on `[0, 2π]²`.
    Ex1,
    /// Double-well Cahn–Hilliard from two squares on `[0, 6.4]²`.
    Ex2,
    /// Regularized Flory–Huggins from two disks on `[0, 2π]²`.
    Ex3,
    /// Regularized Flory–Huggins from random data.
    Ex4,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::Ex1, Example::Ex2, Example::Ex3, Example::Ex4];

    pub fn name(self) -> &'static str {
        match self {
            Example::Ex1 => "ex1",
            Example::Ex2 => "ex2",
            Example::Ex3 => "ex3",
            Example::Ex4 => "ex4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Example::Ex1 => "double-well, eps=1, gamma=0.1, S=6, phi0 = 1 + 0.5 sin x sin y on [0,2pi]^2",
            Example::Ex2 => "double-well Cahn-Hilliard, eps=0.04, gamma=0.01, S=3/eps^2, two squares on [0,6.4]^2",
            Example::Ex3 => "regularized Flory-Huggins, eps=0.04, beta=3, sigma=0.01, gamma=0.5, S=10/eps^2, two disks",
            Example::Ex4 => "as ex3 with phi0 = 0.5 + 0.2 Rand(x,y)",
        }
    }

    /// Additive constant keeping `∫F` positive.
    pub fn c_add(self, eps: f64) -> f64 {
        match self {
            Example::Ex1 => 0.0,
            Example::Ex2 => 1.0,
            Example::Ex3 | Example::Ex4 => 0.06 / (eps * eps),
        }
    }

    pub fn stabilization(self, eps: f64) -> f64 {
        match self {
            Example::Ex1 => 6.0,
            Example::Ex2 => 3.0 / (eps * eps),
            Example::Ex3 | Example::Ex4 => 10.0 / (eps * eps),
        }
    }

    fn base(self) -> Value {
        let two_pi = 2.0 * std::f64::consts::PI;
        match self {
            Example::Ex1 => json!({
                "grid": {"nx": 64, "ny": 64, "lx": two_pi, "ly": two_pi},
                "model": {"alpha": 0.0, "gamma": 0.1},
                "potential": {"kind": "double-well", "eps": 1.0, "c_add": "paper-preset"},
                "scheme": "isav-be",
                "S": "paper-preset",
                "tau": 0.00625,
                "t_end": 0.5,
                "init": {"kind": "ex1"}
            }),
            Example::Ex2 => json!({
                "grid": {"nx": 128, "ny": 128, "lx": 6.4, "ly": 6.4},
                "model": {"alpha": 1.0, "gamma": 0.01},
                "potential": {"kind": "double-well", "eps": 0.04, "c_add": "paper-preset"},
                "scheme": "isav-be",
                "S": "paper-preset",
                "tau": 0.01,
                "t_end": 1.0,
                "init": {"kind": "squares"}
            }),
            Example::Ex3 => json!({
                "grid": {"nx": 128, "ny": 128, "lx": two_pi, "ly": two_pi},
                "model": {"alpha": 1.0, "gamma": 0.5},
                "potential": {"kind": "flory-huggins-reg", "eps": 0.04, "beta": 3.0, "sigma": 0.01, "c_add": "paper-preset"},
                "scheme": "isav-be",
                "S": "paper-preset",
                "tau": 0.01,
                "t_end": 1.0,
                "init": {"kind": "disks"}
            }),
            Example::Ex4 => json!({
                "grid": {"nx": 128, "ny": 128, "lx": two_pi, "ly": two_pi},
                "model": {"alpha": 0.0, "gamma": 0.5},
                "potential": {"kind": "flory-huggins-reg", "eps": 0.04, "beta": 3.0, "sigma": 0.01, "c_add": "paper-preset"},
                "scheme": "isav-be",
                "S": "paper-preset",
                "tau": 0.01,
                "t_end": 1.0,
                "init": {"kind": "random", "seed": 1}
            }),
        }
    }
}

/// Every preset name: `exN` and `exN-<scheme>`.
pub fn preset_names() -> Vec<String> {
    let mut out = Vec::new();
    for ex in Example::ALL {
        out.push(ex.name().to_string());
        for s in Scheme::ALL {
            out.push(format!("{}-{}", ex.name(), s.name()));
        }
    }
    out
}

/// Base document for a preset name, or `None` if it is unknown.
pub fn preset_value(name: &str) -> Option<Value> {
    let (ex_name, scheme) = match name.split_once('-') {
        Some((ex, scheme)) => (ex, Some(scheme.parse::<Scheme>().ok()?)),
        None => (name, None),
    };
    let ex = Example::ALL.into_iter().find(|e| e.name() == ex_name)?;
    let mut v = ex.base();
    if let Some(s) = scheme {
        v["scheme"] = Value::String(s.name().to_string());
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_resolves() {
        for name in preset_names() {
            let doc = format!(r#"{{"preset": "{name}"}}"#);
            let cfg = crate::harness::RunConfig::from_json_str(&doc).unwrap();
            cfg.resolve().unwrap();
        }
        assert!(preset_value("ex2-rk4").is_none());
    }

    #[test]
    fn example_values() {
        assert_eq!(Example::Ex2.stabilization(0.04), 3.0 / 0.0016);
        assert_eq!(Example::Ex3.stabilization(0.04), 10.0 / 0.0016);
        assert_eq!(Example::Ex4.c_add(0.04), 0.06 / 0.0016);
        assert_eq!(Example::Ex2.c_add(0.01), 1.0);
    }
}
