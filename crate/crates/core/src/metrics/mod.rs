//! Overlap metrics for quorum systems.
//!
//! EQOS, the expected number of slots two randomly chosen quorums share, is
//! averaged three different ways in the literature, and the published
//! numbers only reproduce when each one is matched to its own convention:
//!
//! * **aligned**: ordered pairs `(G, H)` drawn independently, zero offset.
//!   This is how the AS-Grid and LPS-Grid worked values are computed.
//! * **unordered**: unordered pairs with repetition, uniform access. The
//!   cyclic and FPP rows of the comparison table use this.
//! * **rotational**: ordered pairs averaged over all `n` relative offsets.
//!   The grid and torus rows use this; it always equals `(Σ p|Q|)² / n`.
//!
//! [`MetricsReport`] carries all three, and attaches the closed form bound
//! to whichever convention it was derived under.

pub mod formulas;

use serde::{Deserialize, Serialize};

use crate::constructions::{fpp_order, DifferenceSet, SystemSpec};
use crate::error::{invalid, Error, Result};
use crate::scalar::{format_decimal, Scalar};
use crate::system::QuorumSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Aligned,
    Unordered,
    Rotational,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Aligned => "aligned",
            Convention::Unordered => "unordered",
            Convention::Rotational => "rotational",
        }
    }
}

fn weights<T: Scalar>(sys: &QuorumSystem) -> Vec<T> {
    sys.weights().iter().map(T::from_rational).collect()
}

/// `Σ_{G,H} p(G) p(H) |G ∩ H|`.
pub fn eqos_aligned<T: Scalar>(sys: &QuorumSystem) -> T {
    let qs = sys.quorums();
    if sys.is_uniform() {
        let total: u128 = qs
            .iter()
            .map(|g| qs.iter().map(|h| g.overlap(h) as u128).sum::<u128>())
            .sum();
        let m = qs.len() as i128;
        return T::from_ratio(total as i128, m * m);
    }
    let p = weights::<T>(sys);
    let mut acc = T::zero();
    for (g, pg) in qs.iter().zip(&p) {
        for (h, ph) in qs.iter().zip(&p) {
            acc = acc + pg.clone() * ph.clone() * T::from_count(g.overlap(h));
        }
    }
    acc
}

/// `Σ_{i ≤ j} |G_i ∩ G_j| / C(m + 1, 2)`. Defined for uniform access only.
pub fn eqos_unordered<T: Scalar>(sys: &QuorumSystem) -> Result<T> {
    if !sys.is_uniform() {
        return Err(Error::UnsupportedConvention(
            "unordered-pair EQOS is defined only for uniform access weights".into(),
        ));
    }
    let qs = sys.quorums();
    let total: u128 = qs
        .iter()
        .enumerate()
        .map(|(i, g)| qs[i..].iter().map(|h| g.overlap(h) as u128).sum::<u128>())
        .sum();
    let m = qs.len() as i128;
    Ok(T::from_ratio(total as i128, m * (m + 1) / 2))
}

/// `Σ_{G,H} p(G) p(H) (1/n) Σ_{i<n} |G ∩ rotate(H, i)|`.
///
/// Evaluated through the weighted slot coverage `A(s) = Σ_{G ∋ s} p(G)`:
/// the double sum becomes `(1/n) Σ_i Σ_s A(s) A(s − i)`, still enumerating
/// every offset.
pub fn eqos_rotational<T: Scalar>(sys: &QuorumSystem) -> T {
    let n = sys.n();
    if sys.is_uniform() {
        let mut cover = vec![0i128; n];
        for q in sys.quorums() {
            for &s in q.slots() {
                cover[s] += 1;
            }
        }
        let mut total = 0i128;
        for i in 0..n {
            for s in 0..n {
                total += cover[s] * cover[(s + n - i) % n];
            }
        }
        let m = sys.len() as i128;
        return T::from_ratio(total, n as i128 * m * m);
    }
    let mut cover = vec![T::zero(); n];
    for (q, p) in sys.quorums().iter().zip(weights::<T>(sys)) {
        for &s in q.slots() {
            cover[s] = cover[s].clone() + p.clone();
        }
    }
    let mut acc = T::zero();
    for i in 0..n {
        for s in 0..n {
            acc = acc + cover[s].clone() * cover[(s + n - i) % n].clone();
        }
    }
    acc / T::from_count(n)
}

/// Expected active ratio `Σ p(Q) |Q| / n`.
pub fn active_ratio<T: Scalar>(sys: &QuorumSystem) -> T {
    let n = sys.n() as i128;
    if sys.is_uniform() {
        let total: usize = sys.quorums().iter().map(|q| q.len()).sum();
        return T::from_ratio(total as i128, n * sys.len() as i128);
    }
    sys.quorums()
        .iter()
        .zip(weights::<T>(sys))
        .map(|(q, p)| p * T::from_count(q.len()))
        .sum::<T>()
        / T::from_ratio(n, 1)
}

/// `eqos / active_ratio`.
pub fn qer<T: Scalar>(eqos: T, active_ratio: T) -> Result<T> {
    if active_ratio.is_zero() {
        return Err(Error::ZeroActiveRatio);
    }
    Ok(eqos / active_ratio)
}

/// EQOS gain and active-ratio drop of AS-Grid when widening `w1 → w2` at fixed `t`:
/// `((w2 − w1)/t, (w2 − w1)(t − 1)/(t·w1·w2))`.
pub fn adaptive_deltas<T: Scalar>(t: usize, w1: usize, w2: usize) -> Result<(T, T)> {
    if t < 2 || w1 < 2 {
        return Err(invalid(format!(
            "adaptive deltas need t ≥ 2 and w1 ≥ 2, got t={t}, w1={w1}"
        )));
    }
    if w2 <= w1 {
        return Err(invalid(format!(
            "adaptive deltas need w2 > w1, got w1={w1}, w2={w2}"
        )));
    }
    let (t, w1, w2) = (t as i128, w1 as i128, w2 as i128);
    let k = w2 - w1;
    Ok((T::from_ratio(k, t), T::from_ratio(k * (t - 1), t * w1 * w2)))
}

/// Closed-form counterpart of a report, tagged with the convention it was
/// derived under.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm<T> {
    pub eqos: T,
    pub active_ratio: T,
    pub qer: T,
    pub convention: Convention,
}

/// Evaluates the printed formulas for `spec`.
///
/// Fails with [`Error::OutOfValidity`] where no formula applies: e-torus,
/// torus with `t ≠ w/2`, LPS-Grid with `t ∉ {3, 4}`, and cyclic sets whose
/// differences are not uniformly repeated.
pub fn closed_form_metrics<T: Scalar>(spec: &SystemSpec) -> Result<ClosedForm<T>> {
    use formulas::*;
    spec.validate()?;
    let cf = |eqos, active_ratio, qer, convention| ClosedForm {
        eqos,
        active_ratio,
        qer,
        convention,
    };
    Ok(match *spec {
        SystemSpec::Grid { n } => cf(
            grid_eqos(n)?,
            grid_active_ratio(n)?,
            grid_qer(n)?,
            Convention::Rotational,
        ),
        SystemSpec::Torus { t, w } => cf(
            torus_eqos(t, w)?,
            torus_active_ratio(t, w)?,
            torus_qer(t, w)?,
            Convention::Rotational,
        ),
        SystemSpec::ETorus { .. } => {
            return Err(Error::OutOfValidity(
                "no closed form is published for the e-torus".into(),
            ))
        }
        SystemSpec::Cyclic { n, ref set } => {
            let d = DifferenceSet::new(n, set.iter().copied())?;
            let lambda = d.uniform_multiplicity().ok_or_else(|| {
                Error::OutOfValidity(format!(
                    "{spec}: differences are not uniformly repeated, so pair overlaps are not constant"
                ))
            })?;
            let s = d.k_size();
            cf(
                cyclic_eqos(n, s, lambda)?,
                cyclic_active_ratio(n, s)?,
                cyclic_qer(n, s, lambda)?,
                Convention::Unordered,
            )
        }
        SystemSpec::Fpp { n } => {
            let s = fpp_order(n)?;
            cf(
                fpp_eqos(n, s)?,
                cyclic_active_ratio(n, s)?,
                cyclic_qer(n, s, 1)?,
                Convention::Unordered,
            )
        }
        SystemSpec::AsGrid { t, w } => cf(
            as_grid_eqos(t, w)?,
            as_grid_active_ratio(t, w)?,
            as_grid_qer(t, w)?,
            Convention::Aligned,
        ),
        SystemSpec::LpsGrid { t, w } => cf(
            lps_grid_eqos(t, w)?,
            lps_grid_active_ratio(t, w)?,
            lps_grid_qer(t, w)?,
            Convention::Aligned,
        ),
    })
}

/// Every metric of one system, brute force and closed form side by side.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport<T> {
    pub spec: SystemSpec,
    pub n: usize,
    pub quorum_count: usize,
    pub active_ratio: T,
    pub eqos_aligned: T,
    /// `None` for non-uniform access weights.
    pub eqos_unordered: Option<T>,
    pub eqos_rotational: T,
    pub qer_aligned: T,
    pub qer_rotational: T,
    pub closed_form: Option<ClosedForm<T>>,
}

pub const CSV_HEADER: &str = "spec,n,quorum_count,ar,eqos_aligned,eqos_unordered,eqos_rotational,\
qer_aligned,qer_rotational,cf_eqos,cf_ar,cf_qer,cf_convention";

impl<T: Scalar> MetricsReport<T> {
    /// Brute-force metrics of `sys` plus the closed form for `spec`, if one applies.
    pub fn compute(spec: &SystemSpec, sys: &QuorumSystem) -> Result<Self> {
        let ar: T = active_ratio(sys);
        let aligned: T = eqos_aligned(sys);
        let rotational: T = eqos_rotational(sys);
        let unordered = if sys.is_uniform() {
            Some(eqos_unordered(sys)?)
        } else {
            None
        };
        let closed_form = match closed_form_metrics(spec) {
            Ok(cf) => Some(cf),
            Err(Error::OutOfValidity(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            spec: spec.clone(),
            n: sys.n(),
            quorum_count: sys.len(),
            qer_aligned: qer(aligned.clone(), ar.clone())?,
            qer_rotational: qer(rotational.clone(), ar.clone())?,
            active_ratio: ar,
            eqos_aligned: aligned,
            eqos_unordered: unordered,
            eqos_rotational: rotational,
            closed_form,
        })
    }

    /// Brute-force EQOS under `convention`.
    pub fn eqos(&self, convention: Convention) -> Option<&T> {
        match convention {
            Convention::Aligned => Some(&self.eqos_aligned),
            Convention::Unordered => self.eqos_unordered.as_ref(),
            Convention::Rotational => Some(&self.eqos_rotational),
        }
    }

    /// Every disagreement between the closed form and the brute-force value
    /// of its own convention. Empty when they agree or no closed form applies.
    pub fn mismatches(&self) -> Vec<String> {
        let Some(cf) = &self.closed_form else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut check = |name: &str, oracle: Option<T>, formula: &T| match oracle {
            Some(o) if &o == formula => {}
            Some(o) => out.push(format!(
                "{}: {name} brute force {o} ≠ closed form {formula} ({})",
                self.spec,
                cf.convention.as_str()
            )),
            None => out.push(format!(
                "{}: {name} has no brute-force value under the {} convention",
                self.spec,
                cf.convention.as_str()
            )),
        };
        let eqos = self.eqos(cf.convention).cloned();
        check("eqos", eqos.clone(), &cf.eqos);
        check(
            "active ratio",
            Some(self.active_ratio.clone()),
            &cf.active_ratio,
        );
        let oracle_qer = eqos.map(|e| e / self.active_ratio.clone());
        check("qer", oracle_qer, &cf.qer);
        out
    }

    /// The [`CSV_HEADER`] columns, unquoted, values to 6 significant digits.
    pub fn csv_fields(&self) -> Vec<String> {
        let d = |x: &T| format_decimal(x.to_f64(), 6);
        let opt = |x: Option<&T>| x.map(d).unwrap_or_default();
        let cf = self.closed_form.as_ref();
        vec![
            self.spec.to_string(),
            self.n.to_string(),
            self.quorum_count.to_string(),
            d(&self.active_ratio),
            d(&self.eqos_aligned),
            opt(self.eqos_unordered.as_ref()),
            d(&self.eqos_rotational),
            d(&self.qer_aligned),
            d(&self.qer_rotational),
            opt(cf.map(|c| &c.eqos)),
            opt(cf.map(|c| &c.active_ratio)),
            opt(cf.map(|c| &c.qer)),
            cf.map(|c| c.convention.as_str())
                .unwrap_or_default()
                .to_string(),
        ]
    }

    /// One CSV line matching [`CSV_HEADER`]. Cyclic specs contain commas and
    /// are quoted.
    pub fn csv_row(&self) -> String {
        self.csv_fields()
            .iter()
            .map(|f| csv_field(f))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Flat JSON record with the CSV column names; values in the scalar's
    /// own notation (`49/16` for exact rationals).
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        let s = |x: &T| Value::String(x.to_string());
        let opt = |x: Option<&T>| x.map(s).unwrap_or(Value::Null);
        let cf = self.closed_form.as_ref();
        json!({
            "spec": self.spec.to_string(),
            "n": self.n,
            "quorum_count": self.quorum_count,
            "ar": s(&self.active_ratio),
            "eqos_aligned": s(&self.eqos_aligned),
            "eqos_unordered": opt(self.eqos_unordered.as_ref()),
            "eqos_rotational": s(&self.eqos_rotational),
            "qer_aligned": s(&self.qer_aligned),
            "qer_rotational": s(&self.qer_rotational),
            "cf_eqos": opt(cf.map(|c| &c.eqos)),
            "cf_ar": opt(cf.map(|c| &c.active_ratio)),
            "cf_qer": opt(cf.map(|c| &c.qer)),
            "cf_convention": cf.map(|c| Value::String(c.convention.as_str().into())).unwrap_or(Value::Null),
        })
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::*;
    use crate::quorum::Quorum;
    use crate::Rational;

    fn q(a: i128, b: i128) -> Rational {
        Rational::new(a, b)
    }

    /// Pairwise Σ p p (1/n) Σ_i |G ∩ rotate(H, i)| with explicit rotations.
    fn rotational_by_rotation(sys: &QuorumSystem) -> Rational {
        let n = sys.n();
        let mut acc = Rational::from_integer(0);
        for (g, pg) in sys.quorums().iter().zip(sys.weights()) {
            for (h, ph) in sys.quorums().iter().zip(sys.weights()) {
                let total: usize = (0..n)
                    .map(|i| g.intersection(&h.rotate(i as i64)).unwrap().len())
                    .sum();
                acc += pg * ph * q(total as i128, n as i128);
            }
        }
        acc
    }

    #[test]
    fn aligned_worked_values() {
        assert_eq!(
            eqos_aligned::<Rational>(&build_as_grid_system(5, 10).unwrap()),
            q(6, 1)
        );
        assert_eq!(
            eqos_aligned::<Rational>(&build_lps_grid_system(3, 5).unwrap()),
            q(24, 9)
        );
        assert_eq!(
            eqos_aligned::<Rational>(&build_lps_grid_system(4, 6).unwrap()),
            q(7, 2)
        );
    }

    #[test]
    fn unordered_worked_values() {
        let z7 = build_cyclic_system(&DifferenceSet::new(7, [1, 2, 4]).unwrap()).unwrap();
        assert_eq!(eqos_unordered::<Rational>(&z7).unwrap(), q(3, 2));
        let single = QuorumSystem::uniform(5, vec![Quorum::new(5, [0, 2, 3]).unwrap()]).unwrap();
        assert_eq!(eqos_unordered::<Rational>(&single).unwrap(), q(3, 1));
        assert_eq!(
            eqos_unordered::<Rational>(&build_as_grid_system(4, 4).unwrap()).unwrap(),
            q(48, 10)
        );
        let weighted = QuorumSystem::with_weights(
            2,
            vec![Quorum::new(2, [0]).unwrap(), Quorum::new(2, [1]).unwrap()],
            vec![q(1, 3), q(2, 3)],
        )
        .unwrap();
        assert!(matches!(
            eqos_unordered::<Rational>(&weighted),
            Err(Error::UnsupportedConvention(_))
        ));
    }

    #[test]
    fn rotational_worked_values() {
        assert_eq!(
            eqos_rotational::<Rational>(&build_grid_system(16).unwrap()),
            q(49, 16)
        );
        let full = QuorumSystem::uniform(9, vec![Quorum::full(9).unwrap()]).unwrap();
        assert_eq!(eqos_rotational::<Rational>(&full), q(9, 1));
        for t in 2..5 {
            let torus = build_torus_system(t, 2 * t, 512, 1).unwrap();
            assert_eq!(eqos_rotational::<Rational>(&torus), q(2, 1));
        }
    }

    #[test]
    fn rotational_matches_explicit_rotation_and_identity() {
        let systems = [
            build_grid_system(9).unwrap(),
            build_as_grid_system(3, 5).unwrap(),
            build_lps_grid_system(4, 3).unwrap(),
            build_e_torus_system(3, 4, 2).unwrap(),
            QuorumSystem::with_weights(
                6,
                vec![
                    Quorum::new(6, [0, 1, 3]).unwrap(),
                    Quorum::new(6, [2, 5]).unwrap(),
                ],
                vec![q(1, 4), q(3, 4)],
            )
            .unwrap(),
        ];
        for sys in &systems {
            let direct = rotational_by_rotation(sys);
            assert_eq!(eqos_rotational::<Rational>(sys), direct);
            let mean_size: Rational = sys
                .quorums()
                .iter()
                .zip(sys.weights())
                .map(|(g, p)| p * Rational::from_integer(g.len() as i128))
                .sum();
            assert_eq!(
                direct,
                mean_size * mean_size / Rational::from_integer(sys.n() as i128)
            );
        }
    }

    #[test]
    fn weighted_aligned_matches_uniform_path() {
        let sys = build_as_grid_system(4, 6).unwrap();
        let weighted =
            QuorumSystem::with_weights(24, sys.quorums().to_vec(), vec![q(1, 4); 4]).unwrap();
        assert_eq!(
            eqos_aligned::<Rational>(&weighted),
            eqos_aligned::<Rational>(&sys)
        );
        assert!((eqos_aligned::<f64>(&sys) - 4.75).abs() < 1e-12);
    }

    #[test]
    fn qer_examples() {
        assert_eq!(qer(q(49, 16), q(7, 16)).unwrap(), q(7, 1));
        assert_eq!(qer(q(3, 1), q(6, 16)).unwrap(), q(8, 1));
        assert_eq!(qer(q(2, 5), q(2, 5)).unwrap(), q(1, 1));
        assert_eq!(qer(q(1, 1), q(0, 1)), Err(Error::ZeroActiveRatio));
    }

    #[test]
    fn adaptive_delta_examples() {
        let (de, da) = adaptive_deltas::<Rational>(4, 4, 5).unwrap();
        assert_eq!((de, da), (q(1, 4), q(3, 80)));
        let (de, da) = adaptive_deltas::<Rational>(4, 5, 6).unwrap();
        assert_eq!((de, da), (q(1, 4), q(1, 40)));
        assert!(adaptive_deltas::<Rational>(4, 5, 5).is_err());
        for t in 2..7 {
            for w1 in 2..10 {
                for w2 in w1 + 1..14 {
                    let (de, da) = adaptive_deltas::<Rational>(t, w1, w2).unwrap();
                    let e1: Rational = formulas::as_grid_eqos(t, w1).unwrap();
                    let e2: Rational = formulas::as_grid_eqos(t, w2).unwrap();
                    let a1: Rational = formulas::as_grid_active_ratio(t, w1).unwrap();
                    let a2: Rational = formulas::as_grid_active_ratio(t, w2).unwrap();
                    assert_eq!(de, e2 - e1);
                    assert_eq!(da, a1 - a2);
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let cf = closed_form_metrics::<Rational>(&SystemSpec::AsGrid { t: 5, w: 10 }).unwrap();
        assert_eq!((cf.eqos, cf.active_ratio), (q(6, 1), q(14, 50)));
        let cf = closed_form_metrics::<Rational>(&SystemSpec::LpsGrid { t: 4, w: 6 }).unwrap();
        assert_eq!((cf.eqos, cf.active_ratio), (q(7, 2), q(8, 24)));
        let cf = closed_form_metrics::<f64>(&SystemSpec::Grid { n: 1_000_000 }).unwrap();
        assert!((cf.eqos - 3.996001).abs() < 1e-12);
        assert!(matches!(
            closed_form_metrics::<Rational>(&SystemSpec::LpsGrid { t: 5, w: 6 }),
            Err(Error::OutOfValidity(_))
        ));
        assert!(matches!(
            closed_form_metrics::<Rational>(&SystemSpec::Cyclic {
                n: 5,
                set: vec![0, 1, 2]
            }),
            Err(Error::OutOfValidity(_))
        ));
    }

    #[test]
    fn report_flags_and_renders() {
        let spec = SystemSpec::AsGrid { t: 5, w: 10 };
        let sys = build_system(&spec, &BuildOptions::default()).unwrap();
        let report = MetricsReport::<Rational>::compute(&spec, &sys).unwrap();
        assert!(report.mismatches().is_empty());
        assert_eq!(report.qer_aligned, q(150, 7));
        assert_eq!(
            report.csv_row(),
            "asgrid:5x10,50,5,0.28,6,7.33333,3.92,21.4286,14,6,0.28,21.4286,aligned"
        );
        assert_eq!(
            CSV_HEADER.split(',').count(),
            report.csv_row().split(',').count()
        );
        assert_eq!(report.to_json()["eqos_aligned"], "6");

        let spec = SystemSpec::Cyclic {
            n: 7,
            set: vec![0, 1, 3],
        };
        let sys = build_system(&spec, &BuildOptions::default()).unwrap();
        let row = MetricsReport::<Rational>::compute(&spec, &sys)
            .unwrap()
            .csv_row();
        assert!(row.starts_with("\"cyclic:7:[0,1,3]\",7,7,"), "{row}");

        let mut broken = report.clone();
        broken.closed_form.as_mut().unwrap().eqos = q(5, 1);
        assert_eq!(broken.mismatches().len(), 1);
    }
}
