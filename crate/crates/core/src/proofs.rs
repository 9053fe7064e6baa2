//! End-to-end proofs: the three fixed points on `theta = pi/2` and the
//! covering chains of the built-in theorem tables, with JSON certificates.

use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hset::table::{Prelude, TheoremTable, BUILTIN};
use crate::hset::{
    chain_verify, ChainOptions, CoverSettings, CoveringCertificate, HSet, HyperionMap, PeriodicStatement, PlanarMap,
    Relation, SymbolicDynamics,
};
use crate::integrator::{Integrator, Settings};
use crate::interval::{decimal_add, decimal_mul, IMat, IVec, Interval};
use crate::model::{ModelParams, ParamError};
use crate::newton::{prove_symmetric_fixed_point, FixedPointProof};

/// Version tag of the certificate documents.
pub const CERTIFICATE_SCHEMA: &str = "hyperion-certificate/1";

/// Theorem selectors, in the order `all` runs them.
pub const THEOREMS: [&str; 6] = ["p1p2", "p1p1", "p2p2", "p3p3", "p1p3", "p2p3"];

/// Half-width of the seed boxes of the fixed-point proofs.
pub const SEED_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProofSettings {
    pub params: ModelParams,
    pub integrator: Settings,
    pub cover: CoverSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Proved,
    Failed,
}

impl Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Proved
        } else {
            Verdict::Failed
        }
    }
}

/// Wall time and work counters; kept out of the certificates so that those
/// are reproducible byte for byte.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub wall_seconds: f64,
    pub map_evaluations: u64,
    pub integration_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub name: String,
    /// The published enclosure of `phi`.
    pub table_phi: String,
    pub frame: String,
    pub proof: Option<FixedPointProof>,
    /// The enclosure of `phi` on `theta = pi/2` lies in the published interval.
    pub within_table: bool,
    pub hyperbolic: bool,
    /// Each eigenvector column intersects the corresponding frame column.
    pub eigenvectors_match: bool,
    pub verified: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointsReport {
    pub schema: String,
    pub settings: ProofSettings,
    pub points: Vec<FixedPointReport>,
    pub verdict: Verdict,
    #[serde(skip)]
    pub stats: RunStats,
}

impl FixedPointsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A consistency check between a chain and the fixed-point proofs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub statement: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofReport {
    pub schema: String,
    pub theorem: String,
    pub title: String,
    pub settings: ProofSettings,
    /// The h-sets of the table.
    pub sets: Vec<HSet>,
    /// Sets introduced by the symmetry closure.
    pub derived_sets: Vec<HSet>,
    pub chains: Vec<String>,
    pub relations: Vec<Relation>,
    pub certificates: Vec<CoveringCertificate>,
    pub symmetric_sets: Vec<(String, bool)>,
    pub symbolic: Option<SymbolicDynamics>,
    pub periodic: Vec<PeriodicStatement>,
    pub cross_checks: Vec<CrossCheck>,
    /// Images requested by all forward checks.
    pub map_calls: u64,
    /// Map evaluations made by the symmetry closure.
    pub symmetry_evaluations: u64,
    pub failures: Vec<String>,
    pub verdict: Verdict,
    #[serde(skip)]
    pub stats: RunStats,
}

impl ProofReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Outcome of a run that is expected to fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlReport {
    pub name: String,
    /// The run failed verification, as it should.
    pub failed_as_expected: bool,
    pub diagnostics: Vec<String>,
}

/// Rerun of a theorem with every box scaled by a factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub theorem: String,
    pub factor: String,
    pub verdict: Verdict,
    pub failures: Vec<String>,
}

/// Shares one map (and its image cache) between the proofs of a run.
#[derive(Debug)]
pub struct Prover {
    pub settings: ProofSettings,
    map: HyperionMap,
    prelude: Prelude,
    fixed: OnceLock<FixedPointsReport>,
}

impl Prover {
    pub fn new(settings: ProofSettings) -> Result<Self, ParamError> {
        settings.params.validate()?;
        let integ = Integrator::new(settings.params.clone(), settings.integrator.clone());
        Ok(Prover {
            settings,
            map: HyperionMap::new(integ),
            prelude: Prelude::builtin(),
            fixed: OnceLock::new(),
        })
    }

    pub fn integrator(&self) -> &Integrator {
        &self.map.integ
    }

    pub fn map(&self) -> &HyperionMap {
        &self.map
    }

    fn stats_since(&self, t0: Instant, evals0: u64, steps0: u64) -> RunStats {
        RunStats {
            wall_seconds: t0.elapsed().as_secs_f64(),
            map_evaluations: self.map.evaluations() - evals0,
            integration_steps: self.integrator().step_count() - steps0,
        }
    }

    /// Interval-Newton proofs of the three fixed points, computed once per
    /// prover.
    pub fn prove_fixed_points(&self) -> &FixedPointsReport {
        self.fixed.get_or_init(|| {
            let t0 = Instant::now();
            let steps0 = self.integrator().step_count();
            let points: Vec<FixedPointReport> = self
                .prelude
                .points
                .par_iter()
                .map(|(name, _)| self.fixed_point(name))
                .collect();
            let verdict = Verdict::from(points.iter().all(|p| p.verified));
            FixedPointsReport {
                schema: CERTIFICATE_SCHEMA.into(),
                settings: self.settings.clone(),
                points,
                verdict,
                stats: self.stats_since(t0, 0, steps0),
            }
        })
    }

    fn fixed_point(&self, name: &str) -> FixedPointReport {
        let pt = &self.prelude.points[name];
        let frame = format!("M{}", name.trim_start_matches('P'));
        let mut rep = FixedPointReport {
            name: name.into(),
            table_phi: pt.phi_text.clone(),
            frame: frame.clone(),
            proof: None,
            within_table: false,
            hyperbolic: false,
            eigenvectors_match: false,
            verified: false,
            diagnostics: Vec::new(),
        };
        let seed: f64 = pt.base.phi.parse().expect("validated decimal");
        let proof = match prove_symmetric_fixed_point(seed, 1, SEED_RADIUS, self.integrator()) {
            Ok(p) => p,
            Err(e) => {
                rep.diagnostics.push(format!("no fixed point proven near phi = {seed}: {e}"));
                return rep;
            }
        };
        match proof.axis_phi {
            Some(phi) => {
                rep.within_table = phi.subset(pt.phi_inward);
                if !rep.within_table {
                    rep.diagnostics
                        .push(format!("enclosure phi in {phi} is not inside the published {}", pt.phi_text));
                }
            }
            None => rep
                .diagnostics
                .push("the fixed point was not located on theta = pi/2".into()),
        }
        rep.hyperbolic = proof.hyperbolic;
        if !rep.hyperbolic {
            rep.diagnostics.push(format!(
                "not proven hyperbolic: eigenvalues {} and {}",
                proof.eigenvalues[0], proof.eigenvalues[1]
            ));
        }
        match (&proof.eigenvectors, self.prelude.matrices.get(&frame)) {
            (Some(v), Some(m)) => {
                rep.eigenvectors_match = columns_intersect(v, &m.enclosure);
                if !rep.eigenvectors_match {
                    rep.diagnostics.push(format!("eigenvectors {v:?} miss {frame}"));
                }
            }
            (None, _) => rep.diagnostics.push("no eigenvector enclosure".into()),
            (_, None) => rep.diagnostics.push(format!("no matrix {frame} to compare with")),
        }
        rep.verified = rep.within_table && rep.hyperbolic && rep.eigenvectors_match;
        rep.proof = Some(proof);
        rep
    }

    /// Verifies a built-in theorem by id.
    pub fn prove_theorem(&self, id: &str) -> Option<ProofReport> {
        TheoremTable::builtin(id).map(|t| self.prove_table(&t))
    }

    pub fn prove_theorem_p1p2(&self) -> ProofReport {
        self.prove_theorem("p1p2").expect("built-in")
    }

    pub fn prove_theorem_p1p1_p2p2(&self) -> (ProofReport, ProofReport) {
        (self.prove_theorem("p1p1").expect("built-in"), self.prove_theorem("p2p2").expect("built-in"))
    }

    pub fn prove_theorem_p3p3(&self) -> ProofReport {
        self.prove_theorem("p3p3").expect("built-in")
    }

    pub fn prove_theorem_p1p3(&self) -> ProofReport {
        self.prove_theorem("p1p3").expect("built-in")
    }

    pub fn prove_theorem_p2p3(&self) -> ProofReport {
        self.prove_theorem("p2p3").expect("built-in")
    }

    /// Runs the selected theorems in parallel; the reports come back in the
    /// order of `ids`.
    pub fn prove_many(&self, ids: &[&str]) -> Vec<Option<ProofReport>> {
        ids.par_iter().map(|id| self.prove_theorem(id)).collect()
    }

    pub fn prove_table(&self, t: &TheoremTable) -> ProofReport {
        let t0 = Instant::now();
        let evals0 = self.map.evaluations();
        let steps0 = self.integrator().step_count();
        let opts = ChainOptions {
            close_by_symmetry: t.close_by_symmetry,
            symmetric: t.symmetric.clone(),
            claim: t.claim.clone(),
        };
        let chain = chain_verify(&t.sets, &t.relations, &self.map, &self.settings.cover, &opts);
        let derived_sets: Vec<HSet> = chain.sets[t.sets.len()..].to_vec();
        let mut failures = chain.failures.clone();
        let cross_checks = self.cross_checks(t, &chain.periodic);
        for c in &cross_checks {
            if !c.holds {
                failures.push(format!("cross-check failed: {}", c.statement));
            }
        }
        let map_calls = chain.certificates.iter().map(|c| c.map_calls).sum();
        let verdict = Verdict::from(chain.verified && failures.is_empty());
        ProofReport {
            schema: CERTIFICATE_SCHEMA.into(),
            theorem: t.id.clone(),
            title: t.title.clone(),
            settings: self.settings.clone(),
            sets: t.sets.clone(),
            derived_sets,
            chains: t.chains.clone(),
            relations: t.relations.clone(),
            certificates: chain.certificates,
            symmetric_sets: chain.symmetric_sets,
            symbolic: chain.symbolic,
            periodic: chain.periodic,
            cross_checks,
            map_calls,
            symmetry_evaluations: chain.symmetry_evaluations,
            failures,
            verdict,
            stats: self.stats_since(t0, evals0, steps0),
        }
    }

    /// A loop `N => N` under `P` at a set based at a proven fixed point must
    /// contain that fixed point.
    fn cross_checks(&self, t: &TheoremTable, periodic: &[PeriodicStatement]) -> Vec<CrossCheck> {
        let mut out = Vec::new();
        for p in periodic.iter().filter(|p| p.period == 1 && p.cycle.len() == 1) {
            let Some(set) = t.set(&p.cycle[0]) else { continue };
            let Some((pname, _)) = self.prelude.points.iter().find(|(_, pt)| pt.base == set.p) else {
                continue;
            };
            let fixed = self.prove_fixed_points();
            let Some(fp) = fixed.points.iter().find(|r| &r.name == pname) else { continue };
            let holds = fp.proof.as_ref().is_some_and(|proof| {
                let w = set.chart().apply(&proof.enclosure);
                w.subset_interior(&IVec([Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0)]))
            });
            out.push(CrossCheck {
                statement: format!("the period-1 loop at {} contains the fixed point {pname}", set.name),
                holds,
            });
        }
        out
    }

    /// Reruns a theorem with all boxes scaled by `factor` (a decimal).
    pub fn robustness(&self, id: &str, factor: &str) -> Option<RobustnessReport> {
        let mut t = TheoremTable::builtin(id)?;
        for s in &mut t.sets {
            s.scale = decimal_mul(&s.scale, factor).ok()?;
        }
        let r = self.prove_table(&t);
        Some(RobustnessReport {
            theorem: id.into(),
            factor: factor.into(),
            verdict: r.verdict,
            failures: r.failures,
        })
    }

    /// Runs that must not verify: a different eccentricity, a rotated frame,
    /// a shrunk target and a set moved off the symmetry line.
    pub fn negative_controls(&self) -> Vec<ControlReport> {
        let mut out = Vec::new();
        let control = |name: &str, r: ProofReport| ControlReport {
            name: name.into(),
            failed_as_expected: r.verdict == Verdict::Failed,
            diagnostics: r.failures,
        };

        let mut s = self.settings.clone();
        s.params = ModelParams::new("0.3", &self.settings.params.omega2).expect("valid parameters");
        let other = Prover::new(s).expect("valid parameters");
        out.push(control("p1p2 with e = 0.3", other.prove_theorem_p1p2()));

        let mut t = TheoremTable::builtin("p1p2").expect("built-in");
        let n0 = t.sets.iter_mut().find(|s| s.name == "N0").expect("N0");
        n0.frame.m = rotate(n0.frame.m, 30.0);
        n0.frame.name = Some("M1 rotated by 30 degrees".into());
        out.push(control("p1p2 with the frame of N0 rotated by 30 degrees", self.prove_table(&t)));

        let mut t = TheoremTable::builtin("p1p2").expect("built-in");
        let n1 = t.sets.iter_mut().find(|s| s.name == "N1").expect("N1");
        n1.scale = decimal_mul(&n1.scale, "0.1").expect("decimal");
        out.push(control("p1p2 with N1 shrunk by 0.1", self.prove_table(&t)));

        let mut t = TheoremTable::builtin("p1p3").expect("built-in");
        let n0 = t.sets.iter_mut().find(|s| s.name == "N0").expect("N0");
        n0.p.theta.offset = decimal_add(&n0.p.theta.offset, "0.001").expect("decimal");
        out.push(control("p1p3 with N0 moved by 0.001 in theta", self.prove_table(&t)));
        out
    }
}

fn rotate(m: [[f64; 2]; 2], degrees: f64) -> [[f64; 2]; 2] {
    let (s, c) = degrees.to_radians().sin_cos();
    [
        [c * m[0][0] - s * m[1][0], c * m[0][1] - s * m[1][1]],
        [s * m[0][0] + c * m[1][0], s * m[0][1] + c * m[1][1]],
    ]
}

fn columns_intersect(v: &IMat<2>, m: &IMat<2>) -> bool {
    (0..2).all(|j| (0..2).all(|i| v[(i, j)].intersects(m[(i, j)])))
}

/// All built-in theorem ids.
pub fn theorem_ids() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(id, _)| *id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_by_zero_and_ninety() {
        let m = [[1.0, 2.0], [3.0, 4.0]];
        assert_eq!(rotate(m, 0.0), m);
        let r = rotate(m, 90.0);
        assert!((r[0][0] + 3.0).abs() < 1e-15 && (r[1][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn theorem_list_matches_tables() {
        let ids: Vec<&str> = theorem_ids().collect();
        assert_eq!(ids, THEOREMS);
    }

    #[test]
    fn verdict_json() {
        assert_eq!(serde_json::to_string(&Verdict::Proved).unwrap(), "\"proved\"");
    }
}
