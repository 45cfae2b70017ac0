//! Acceptance-probability estimation and the gap decision problem for
//! circuit families with a counting algorithm.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{estimate_size, EstimateReport, EstimatorConfig};
use crate::machine::{build_branching_tree, SelfReducible};
use crate::tree::BranchingTree;
use crate::problems::{
    cnf_complement, dnf_instance, monotone_instance, Circuit, CnfFormula, DnfFormula, MonotoneCircuit,
};

/// Inputs accepted by [`capp`]. General circuits are accepted only if they
/// turn out to be monotone.
#[derive(Debug, Clone)]
pub enum CappInput {
    Dnf(DnfFormula),
    Cnf(CnfFormula),
    Monotone(MonotoneCircuit),
    Circuit(Circuit),
}

impl CappInput {
    pub fn num_vars(&self) -> usize {
        match self {
            CappInput::Dnf(f) => f.num_vars(),
            CappInput::Cnf(f) => f.num_vars(),
            CappInput::Monotone(c) => c.num_inputs(),
            CappInput::Circuit(c) => c.num_inputs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Count solutions.
    Direct,
    /// Count non-solutions and subtract.
    Complement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CappResult {
    /// Estimated `Pr_x[C(x) = 1]`, in `[0, 1]`.
    pub p_hat: f64,
    pub epsilon: f64,
    pub confidence: f64,
    pub route: Route,
    pub num_vars: usize,
    /// The underlying size estimate (of the complement on that route).
    pub report: EstimateReport,
}

/// Default additive error.
pub const DEFAULT_EPSILON: f64 = 1.0 / 6.0;

fn fraction_of<P: SelfReducible>(problem: P, epsilon: f64, config: &EstimatorConfig) -> Result<EstimateReport> {
    let n = problem.num_vars();
    let tree = build_branching_tree(problem)?;
    // error ε · 2^n on a tree of height n' = n + 1 + c is ξ = ε 2^(n - n')
    let xi = epsilon * (n as f64 - tree.height() as f64).exp2();
    estimate_size(&tree, &EstimatorConfig { xi, ..*config })
}

/// Estimates the acceptance probability within `±ε` with probability about
/// `1 - δ`. CNFs go through the De Morgan complement.
pub fn capp(input: &CappInput, epsilon: f64, delta: f64, config: &EstimatorConfig) -> Result<CappResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("δ must lie in (0, 1), got {delta}")));
    }
    let config = EstimatorConfig { delta, ..*config };
    let n = input.num_vars();
    let (route, report) = match input {
        CappInput::Dnf(phi) => (Route::Direct, fraction_of(dnf_instance(phi), epsilon, &config)?),
        CappInput::Monotone(c) => (Route::Direct, fraction_of(monotone_instance(c), epsilon, &config)?),
        CappInput::Circuit(c) => {
            let mono = MonotoneCircuit::from_circuit(c.clone())?;
            (Route::Direct, fraction_of(monotone_instance(&mono), epsilon, &config)?)
        }
        CappInput::Cnf(phi) => (
            Route::Complement,
            fraction_of(dnf_instance(&cnf_complement(phi)), epsilon, &config)?,
        ),
    };
    let q = (report.estimate / (n as f64).exp2()).clamp(0.0, 1.0);
    let p_hat = match route {
        Route::Direct => q,
        Route::Complement => 1.0 - q,
    };
    Ok(CappResult {
        p_hat,
        epsilon,
        confidence: 1.0 - delta,
        route,
        num_vars: n,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Satisfiable,
    Unsatisfiable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapVerdict {
    pub verdict: Verdict,
    pub rho: f64,
    pub p_hat: f64,
    pub steps: u64,
}

/// Decides the promise problem "no solutions, or more than `ρ 2^n`" by
/// estimating with `ε = ρ/2` and comparing against `ρ/2`. Inputs outside
/// the promise get an arbitrary verdict.
pub fn gap_csat(input: &CappInput, rho: f64, delta: f64, config: &EstimatorConfig) -> Result<GapVerdict> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::param(format!("ρ must lie in (0, 1], got {rho}")));
    }
    let r = capp(input, rho / 2.0, delta, config)?;
    Ok(GapVerdict {
        verdict: if r.p_hat > rho / 2.0 {
            Verdict::Satisfiable
        } else {
            Verdict::Unsatisfiable
        },
        rho,
        p_hat: r.p_hat,
        steps: r.report.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Gate, GateOp, Lit};

    fn cfg(seed: u64) -> EstimatorConfig {
        EstimatorConfig::new(0.1, 0.1, seed)
    }

    #[test]
    fn cnf_goes_through_the_complement() {
        let phi = CnfFormula::new(2, vec![vec![Lit::pos(1), Lit::pos(2)]]).unwrap();
        let r = capp(&CappInput::Cnf(phi), 0.1, 0.1, &cfg(1)).unwrap();
        assert_eq!(r.route, Route::Complement);
        assert!((0.65..=0.85).contains(&r.p_hat), "{}", r.p_hat);
    }

    #[test]
    fn empty_dnf_is_never_true() {
        let phi = DnfFormula::new(4, vec![]).unwrap();
        let r = capp(&CappInput::Dnf(phi), 0.1, 0.1, &cfg(2)).unwrap();
        assert_eq!(r.p_hat, 0.0);
        assert!(r.report.exact);
    }

    #[test]
    fn monotone_or() {
        let c = MonotoneCircuit::new(2, vec![Gate { op: GateOp::Or, a: 0, b: 1 }], 2).unwrap();
        let r = capp(&CappInput::Monotone(c), 0.1, 0.1, &cfg(3)).unwrap();
        assert_eq!(r.route, Route::Direct);
        assert!((r.p_hat - 0.75).abs() <= 0.1, "{}", r.p_hat);
    }

    #[test]
    fn circuits_with_not_are_unsupported() {
        let c = Circuit::new(1, vec![Gate { op: GateOp::Not, a: 0, b: 0 }], 1).unwrap();
        let e = capp(&CappInput::Circuit(c), 0.1, 0.1, &cfg(4)).unwrap_err();
        assert!(matches!(e, Error::UnsupportedFamily(_)));
    }

    #[test]
    fn gap_verdicts() {
        let unsat = CnfFormula::new(1, vec![vec![Lit::pos(1)], vec![Lit::neg(1)]]).unwrap();
        let v = gap_csat(&CappInput::Cnf(unsat), 0.5, 0.01, &cfg(5)).unwrap();
        assert_eq!(v.verdict, Verdict::Unsatisfiable);
        let sat = DnfFormula::new(3, vec![vec![Lit::pos(1)]]).unwrap();
        let v = gap_csat(&CappInput::Dnf(sat), 0.4, 0.01, &cfg(6)).unwrap();
        assert_eq!(v.verdict, Verdict::Satisfiable);
    }

    #[test]
    fn parameter_ranges() {
        let phi = CappInput::Dnf(DnfFormula::new(2, vec![]).unwrap());
        assert!(capp(&phi, 0.0, 0.1, &cfg(0)).is_err());
        assert!(capp(&phi, 0.1, 1.0, &cfg(0)).is_err());
        assert!(gap_csat(&phi, 0.0, 0.1, &cfg(0)).is_err());
        assert!(gap_csat(&phi, 1.5, 0.1, &cfg(0)).is_err());
    }
}
