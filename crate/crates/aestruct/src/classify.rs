//! Structural type detection at sampled points.
//!
//! Each predicate is a maximum residual over sampled points together with
//! the verdict "residual < tol". The verdicts are sampling-based: they
//! state that the defining condition holds at the sampled points within
//! tolerance, never that it holds globally.
//!
//! Predicates:
//!
//! * `kahler_type` — max |nabla_g J|;
//! * `quasi_kahler_type` — the sign-specific defining condition:
//!   for alpha*epsilon = +1 the cyclic sum
//!   g((nabla_X J)Y, Z) + g((nabla_Y J)Z, X) + g((nabla_Z J)X, Y),
//!   for alpha*epsilon = -1 the condition
//!   (nabla_X J)(JY) - (nabla_{JX} J)Y; either way the verdict is
//!   cross-checked against the vanishing of the second Nijenhuis tensor;
//! * `nearly_kahler_type` (alpha*epsilon = -1 only) — the polarized
//!   condition (nabla_X J)Y + (nabla_Y J)X;
//! * `integrable` — max |N_J|;
//! * `admits_skew_connection` — the skew-torsion existence residual.
//!
//! The report also carries verdict-level consistency checks: the
//! implications between the types, and the agreement of equivalent
//! residual formulations.

use crate::connections::skew_existence_residual;
use crate::structure::{
    frame_at, nijenhuis, second_nijenhuis, ManifoldSpec, PointFrame, SpecError,
};

#[derive(Clone, Debug)]
pub struct PredicateReport {
    pub name: String,
    pub max_residual: f64,
    /// True when `max_residual < tol`.
    pub verdict: bool,
    pub samples: usize,
}

/// One verdict-level consistency check; `ok = false` indicates an
/// internal inconsistency, never bad input data.
#[derive(Clone, Debug)]
pub struct ConsistencyEntry {
    pub name: String,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub spec_name: String,
    pub alpha: f64,
    pub epsilon: f64,
    pub samples: usize,
    pub tol: f64,
    pub predicates: Vec<PredicateReport>,
    pub consistency: Vec<ConsistencyEntry>,
}

impl ClassificationReport {
    pub fn predicate(&self, name: &str) -> Option<&PredicateReport> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.predicate(name).map(|p| p.verdict)
    }

    /// All consistency checks passed.
    pub fn consistent(&self) -> bool {
        self.consistency.iter().all(|c| c.ok)
    }
}

/// Residual of the sign-specific quasi-Kähler defining condition.
pub(crate) fn quasi_kahler_residual(frame: &PointFrame) -> f64 {
    let n = frame.n();
    let a = &frame.nabla_g_j;
    let mut worst = 0.0f64;
    if frame.alpha * frame.epsilon > 0.0 {
        // Cyclic sum of g((nabla_X J)Y, Z) over (X,Y,Z) = (d_i,d_j,d_z).
        let phi_d = |i: usize, j: usize, z: usize| -> f64 {
            (0..n).map(|m| a.get(&[m, i, j]) * frame.g.get(&[m, z])).sum()
        };
        for i in 0..n {
            for j in 0..n {
                for z in 0..n {
                    worst = worst.max((phi_d(i, j, z) + phi_d(j, z, i) + phi_d(z, i, j)).abs());
                }
            }
        }
    } else {
        // (nabla_{d_i} J)(J d_j) - (nabla_{J d_i} J) d_j.
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        v += a.get(&[k, i, m]) * frame.j.get(&[m, j])
                            - frame.j.get(&[m, i]) * a.get(&[k, m, j]);
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
    }
    worst
}

/// Residual of the sign-specific condition equivalent to the vanishing
/// of the Nijenhuis tensor, used as the paired formulation of the
/// `integrable` predicate.
pub(crate) fn integrability_characterization_residual(frame: &PointFrame) -> f64 {
    let n = frame.n();
    let a = &frame.nabla_g_j;
    let mut worst = 0.0f64;
    if frame.alpha * frame.epsilon < 0.0 {
        // (nabla_X J)Y + alpha (nabla_{JX} J)(JY).
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = a.get(&[k, i, j]);
                    for m in 0..n {
                        for p in 0..n {
                            v += frame.alpha
                                * frame.j.get(&[m, i])
                                * a.get(&[k, m, p])
                                * frame.j.get(&[p, j]);
                        }
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
    } else {
        // g((nabla_X J)Y, JZ) + g((nabla_Y J)Z, JX) + g((nabla_Z J)X, JY).
        let pair = |i: usize, j: usize, z: usize| -> f64 {
            let mut s = 0.0;
            for m in 0..n {
                for q in 0..n {
                    s += a.get(&[m, i, j]) * frame.j.get(&[q, z]) * frame.g.get(&[m, q]);
                }
            }
            s
        };
        for i in 0..n {
            for j in 0..n {
                for z in 0..n {
                    worst = worst.max((pair(i, j, z) + pair(j, z, i) + pair(z, i, j)).abs());
                }
            }
        }
    }
    worst
}

/// Classify the spec's structure from `samples` seeded points.
pub fn classify(
    spec: &ManifoldSpec,
    samples: usize,
    tol: f64,
) -> Result<ClassificationReport, SpecError> {
    let ae = spec.alpha * spec.epsilon;
    let mut kahler = 0.0f64;
    let mut quasi = 0.0f64;
    let mut nearly = 0.0f64;
    let mut integ = 0.0f64;
    let mut skew = 0.0f64;
    let mut ntilde = 0.0f64;
    let mut integ_char = 0.0f64;
    for point in spec.sample_points(samples, None) {
        let frame = frame_at(spec, &point)?;
        kahler = kahler.max(frame.nabla_g_j.max_abs());
        quasi = quasi.max(quasi_kahler_residual(&frame));
        integ = integ.max(nijenhuis(&frame).max_abs());
        skew = skew.max(skew_existence_residual(&frame));
        ntilde = ntilde.max(second_nijenhuis(&frame).max_abs());
        integ_char = integ_char.max(integrability_characterization_residual(&frame));
        if ae < 0.0 {
            let n = frame.n();
            let a = &frame.nabla_g_j;
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        nearly = nearly.max((a.get(&[k, i, j]) + a.get(&[k, j, i])).abs());
                    }
                }
            }
        }
    }

    let mut predicates = vec![
        PredicateReport {
            name: "kahler_type".into(),
            max_residual: kahler,
            verdict: kahler < tol,
            samples,
        },
        PredicateReport {
            name: "quasi_kahler_type".into(),
            max_residual: quasi,
            verdict: quasi < tol,
            samples,
        },
    ];
    if ae < 0.0 {
        predicates.push(PredicateReport {
            name: "nearly_kahler_type".into(),
            max_residual: nearly,
            verdict: nearly < tol,
            samples,
        });
    }
    predicates.push(PredicateReport {
        name: "integrable".into(),
        max_residual: integ,
        verdict: integ < tol,
        samples,
    });
    predicates.push(PredicateReport {
        name: "admits_skew_connection".into(),
        max_residual: skew,
        verdict: skew < tol,
        samples,
    });

    let v = |name: &str| predicates.iter().find(|p| p.name == name).unwrap().verdict;
    let k = v("kahler_type");
    let q = v("quasi_kahler_type");
    let i = v("integrable");
    let mut consistency = vec![
        ConsistencyEntry {
            name: "kahler_implies_quasi_kahler".into(),
            ok: !k || q,
        },
        ConsistencyEntry {
            name: "kahler_implies_integrable".into(),
            ok: !k || i,
        },
        ConsistencyEntry {
            name: "quasi_kahler_and_integrable_implies_kahler".into(),
            ok: !(q && i) || k,
        },
        ConsistencyEntry {
            name: "quasi_kahler_matches_second_nijenhuis".into(),
            ok: q == (ntilde < tol),
        },
        ConsistencyEntry {
            name: "integrability_characterization_matches_nijenhuis".into(),
            ok: i == (integ_char < tol),
        },
    ];
    if ae < 0.0 {
        consistency.push(ConsistencyEntry {
            name: "nearly_kahler_implies_quasi_kahler".into(),
            ok: !v("nearly_kahler_type") || q,
        });
    }

    Ok(ClassificationReport {
        spec_name: spec.name.clone(),
        alpha: spec.alpha,
        epsilon: spec.epsilon,
        samples,
        tol,
        predicates,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{catalog_spec, catalog_specs};
    use crate::{DEFAULT_SAMPLES, DEFAULT_TOL};

    fn report(name: &str) -> ClassificationReport {
        classify(&catalog_spec(name).unwrap(), DEFAULT_SAMPLES, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn flat_kahler_everything_holds_exactly() {
        let r = report("flat_kahler");
        for p in &r.predicates {
            assert!(p.verdict, "{}", p.name);
            assert_eq!(p.max_residual, 0.0, "{}", p.name);
        }
        assert!(r.consistent());
        // alpha*epsilon = -1 here, so the nearly-Kähler predicate is
        // present.
        assert!(r.predicate("nearly_kahler_type").is_some());
    }

    #[test]
    fn kahler_verdicts_across_catalog() {
        for spec in catalog_specs() {
            let kahler = matches!(
                spec.name.as_str(),
                "flat_kahler" | "flat_para_kahler" | "flat_norden" | "flat_product" | "hermitian2d"
            );
            let r = classify(&spec, 32, DEFAULT_TOL).unwrap();
            assert_eq!(r.verdict("kahler_type"), Some(kahler), "{}", spec.name);
        }
    }

    #[test]
    fn hermitian2d_is_kahler_with_nonconstant_fields() {
        let r = report("hermitian2d");
        assert_eq!(r.verdict("kahler_type"), Some(true));
        assert_eq!(r.verdict("integrable"), Some(true));
        assert_eq!(r.verdict("admits_skew_connection"), Some(true));
    }

    #[test]
    fn hermitian4d_fails_integrability_and_kahler() {
        let r = report("hermitian4d");
        assert_eq!(r.verdict("integrable"), Some(false));
        assert_eq!(r.verdict("kahler_type"), Some(false));
        assert!(r.predicate("integrable").unwrap().max_residual > 0.1);
        assert!(r.consistent());
    }

    #[test]
    fn norden2d_profile() {
        let r = report("norden2d");
        // alpha = -1 in dimension 2 forces the Nijenhuis tensor to
        // vanish, so J is integrable even though the chart is far from
        // Kähler.
        assert_eq!(r.verdict("integrable"), Some(true));
        assert_eq!(r.verdict("kahler_type"), Some(false));
        assert_eq!(r.verdict("quasi_kahler_type"), Some(false));
        assert_eq!(r.verdict("admits_skew_connection"), Some(false));
        // alpha*epsilon = +1: no nearly-Kähler predicate.
        assert!(r.predicate("nearly_kahler_type").is_none());
        assert!(r.consistent());
    }

    #[test]
    fn nearly_kahler_predicate_present_iff_negative_product() {
        for spec in catalog_specs() {
            let r = classify(&spec, 16, DEFAULT_TOL).unwrap();
            assert_eq!(
                r.predicate("nearly_kahler_type").is_some(),
                spec.alpha * spec.epsilon < 0.0,
                "{}",
                spec.name
            );
        }
    }

    #[test]
    fn consistency_holds_catalog_wide() {
        for spec in catalog_specs() {
            let r = classify(&spec, DEFAULT_SAMPLES, DEFAULT_TOL).unwrap();
            for c in &r.consistency {
                assert!(c.ok, "{}: {}", spec.name, c.name);
            }
        }
    }

    #[test]
    fn classification_is_deterministic() {
        let a = report("norden4d");
        let b = report("norden4d");
        for (pa, pb) in a.predicates.iter().zip(&b.predicates) {
            assert_eq!(pa.name, pb.name);
            assert_eq!(pa.max_residual.to_bits(), pb.max_residual.to_bits());
        }
    }
}
