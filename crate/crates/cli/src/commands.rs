use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use fpcx::complexity::construct::verify_witness;
use fpcx::complexity::family::MAX_SHATTER_WORK;
use fpcx::complexity::{complexity_exact_with_budget, theorem4_construct, theorem4_sweep, Family, FamilyKind, PartitionInstance};
use fpcx::curves::singular::exception_cap;
use fpcx::curves::{self, BilinearInstance};
use fpcx::field::{FiniteField, PrimeField};
use fpcx::measures::{measure_ck, measure_w};
use fpcx::par::Exec;
use fpcx::subsets::{construct_r, BalancedSeq};
use fpcx::sums::additive::{ehn_sum, expsum_eq4, inverse_complete_sum, lemma1_decomposition_check, SumSpec4};
use fpcx::sums::characters::{cauchy_schwarz_bound_check, char_sum_over_set, random_weil_instance, weil_lemma3_check, CharacterTable};
use fpcx::sums::fourier::{fourier_check, FourierCoeffs};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::polyexpr::parse_poly;
use crate::report::{Report, Table};
use crate::Opts;

pub const EXEC: Exec = Exec::Parallel;

pub fn rng(o: &Opts) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(o.seed)
}

pub fn measure(o: &Opts, r: &mut Report) -> Result<()> {
    let p = o.single_p()?;
    let field = PrimeField::new(p)?;
    let set = o.require_subset()?.realize(&field)?;
    let f = parse_poly(o.poly.as_deref().unwrap_or("X"), p)?;
    let k = o.k.unwrap_or(2);
    let rset = construct_r(&field, &f, &set);
    let seq = BalancedSeq::new(&rset);
    let w = r.timed("w", || measure_w(&seq, EXEC))?;
    r.set("p", p)?;
    r.set("poly", f.coeffs())?;
    r.set("subset", set.to_vec())?;
    r.set("r", rset.iter().collect::<Vec<_>>())?;
    r.set("r_size", rset.len())?;
    r.set("w", json!({ "num": w.value.num as i64, "den": w.value.den as i64, "value": w.value.to_f64(), "a": w.a, "b": w.b, "t": w.t }))?;
    if k as u64 <= p {
        let c = r.timed("ck", || measure_ck(&seq, k, EXEC))?;
        r.set("k", k)?;
        r.set("ck", json!({ "num": c.value.num as i64, "den": c.value.den as i64, "value": c.value.to_f64(), "m": c.m, "d": c.d }))?;
    }
    Ok(())
}

pub fn complexity(o: &Opts, r: &mut Report) -> Result<()> {
    let p = o.single_p()?;
    let field = PrimeField::new(p)?;
    let set = o.require_subset()?.realize(&field)?;
    let d = o.require_d()?;
    let k_max = o.k.unwrap_or(p as usize);
    let families = match o.family {
        Some(f) => vec![f],
        None => vec![Family::P1, Family::P2, Family::P3],
    };
    let mut ks = vec![];
    let mut reports = vec![];
    for fam in families {
        let kind = FamilyKind::new(fam, d)?;
        let rep = r.timed(&format!("{fam}"), || {
            complexity_exact_with_budget(&kind, &field, &set, k_max, o.budget.unwrap_or(MAX_SHATTER_WORK), EXEC)
        })?;
        if rep.failing_partition.is_some() {
            r.check(format!("{fam}: failing partition confirmed by direct search"), rep.failure_confirmed);
        }
        r.check(format!("{fam}: witness samples verified"), rep.witness_samples.iter().all(|w| w.verified));
        if fam == Family::P3 {
            r.check("P3: K within (d+1) log2 p", rep.clamp_holds);
        }
        let proper = !set.is_empty() && (set.len() as u64) < p;
        if fam == Family::P1 && proper && d < p as usize && !rep.partial && k_max > d {
            r.check("P1: K >= d + 1", rep.k > d);
        }
        ks.push(rep.k);
        reports.push(rep);
    }
    if ks.len() == 3 && reports.iter().all(|x| !x.partial) {
        r.check("K1 >= K2 >= K3", ks[0] >= ks[1] && ks[1] >= ks[2]);
    }
    r.set("partial", reports.iter().any(|x| x.partial))?;
    if reports.iter().any(|x| x.partial) {
        r.incomplete("the shattering search hit the work cap; reported values are lower bounds");
    }
    r.set("reports", &reports)?;
    Ok(())
}

pub fn construct(o: &Opts, sweep: bool, r: &mut Report) -> Result<()> {
    let d = o.require_d()?;
    if sweep {
        let mut rows = vec![];
        let mut out = vec![];
        for p in o.primes()? {
            let field = PrimeField::new(p)?;
            let set = o.require_subset()?.realize(&field)?;
            let rep = r.timed(&format!("sweep_{p}"), || theorem4_sweep(&field, &set, d, EXEC))?;
            r.check(format!("p = {p}: every partition has a verified witness"), rep.all_verified);
            r.check(format!("p = {p}: |R(v)| < p and within (d-1) + 2|S|"), rep.forbidden_within_bound);
            if rep.z_outside_field > 0 {
                r.finding(
                    "derivative_roots_outside_field",
                    format!("p = {p}: {} constructions had roots of f' outside F_p", rep.z_outside_field),
                    json!({ "p": p, "count": rep.z_outside_field }),
                );
            }
            for (b, n) in &rep.branch_counts {
                rows.push(vec![p.to_string(), serde_json::to_value(b)?.as_str().unwrap_or_default().to_string(), n.to_string()]);
            }
            out.push(rep);
        }
        r.set("sweeps", &out)?;
        r.table(Table { header: vec!["p".into(), "branch".into(), "count".into()], rows });
        return Ok(());
    }
    let p = o.single_p()?;
    let field = PrimeField::new(p)?;
    let set = o.require_subset()?.realize(&field)?;
    let part = PartitionInstance::new(p, o.b_points.clone().unwrap_or_default(), o.c_points.clone().unwrap_or_default())?;
    let (g, trace) = r.timed("construct", || theorem4_construct(&field, &set, &part, d))?;
    r.check("witness verified by evaluation and squarefree test", verify_witness(&field, &set, &part, d, &g));
    r.check("|R(v)| < p", (trace.forbidden.len() as u64) < p);
    if trace.z_outside_field {
        r.finding(
            "derivative_roots_outside_field",
            "f' has roots outside F_p; the avoidance set covers only roots in F_p",
            json!(trace.derivative_roots),
        );
    }
    r.set("witness", g.coeffs())?;
    r.set("values", part.b.iter().chain(&part.c).map(|&x| (x, g.eval(&field, x))).collect::<Vec<_>>())?;
    r.set("trace", &trace)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumKind {
    /// Σ_{x≠0} e_p(a/x).
    Inverse,
    /// Σ ψ(Σ d_j/(n + e_j)) over F_q with its bound.
    Ehn,
    /// Sum over d-subsets of F_p of e_p(Σ h_m Π (b_mj - a_j)⁻¹).
    Eq4,
    /// Completing the sum over the last variable of a single-frequency sum.
    Lemma1,
    /// Fourier coefficients of the indicator of [0, βp).
    Fourier,
    /// Character sums over S and the Cauchy–Schwarz bound.
    Chars,
    /// Character sums of a random factored polynomial.
    Lemma3,
}

pub fn expsum(kind: SumKind, o: &Opts, r: &mut Report) -> Result<()> {
    let p = o.single_p()?;
    let mut rng = rng(o);
    match kind {
        SumKind::Inverse => {
            let field = PrimeField::new(p)?;
            let a = o.a.unwrap_or(1);
            let acc = inverse_complete_sum(&field, a)?;
            let v = acc.value();
            r.set("value", [v.re, v.im])?;
            r.check("sum equals -1", (v - (-1.0)).norm() <= 1e-8);
        }
        SumKind::Ehn => with_field!(p, o.n, |field| {
            let q = field.order();
            let s = o.k.unwrap_or(2);
            let (d, e) = match (&o.dvec, &o.evec) {
                (Some(d), Some(e)) => {
                    (d.iter().map(|&x| field.element(x % q)).collect(), e.iter().map(|&x| field.element(x % q)).collect())
                }
                _ => {
                    let idx: Vec<u64> = (0..q).collect();
                    let e: Vec<_> = idx.choose_multiple(&mut rng, s).map(|&x| field.element(x)).collect();
                    let d: Vec<_> = (0..s).map(|_| field.element(rng.gen_range(1..q))).collect();
                    (d, e)
                }
            };
            let rep = ehn_sum(field, &d, &e)?;
            r.check("|sum| <= (2s - 2) sqrt(q) + 1", rep.holds);
            r.set("report", &rep)?;
        }),
        SumKind::Eq4 => {
            let field = PrimeField::new(p)?;
            let (k, d) = (o.k.unwrap_or(1), o.d.unwrap_or(2));
            let residues: Vec<u64> = (0..p).collect();
            let h: Vec<u64> = (0..k).map(|_| rng.gen_range(1..p)).collect();
            let mut cols: Vec<Vec<u64>> = (0..d).map(|_| residues.choose_multiple(&mut rng, k).copied().collect()).collect();
            let b: Vec<Vec<u64>> = (0..k).map(|m| cols.iter_mut().map(|c| c[m]).collect()).collect();
            let excluded: Vec<u64> = b.iter().flatten().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            let spec = SumSpec4 { h, b, excluded };
            let acc = r.timed("sum", || expsum_eq4(&field, &spec, EXEC))?;
            let v = acc.value();
            r.set("spec", &spec)?;
            r.set("value", [v.re, v.im])?;
            r.set("modulus", v.norm())?;
            r.set("terms", acc.terms())?;
        }
        SumKind::Lemma1 => {
            let field = PrimeField::new(p)?;
            let rep = lemma1_decomposition_check(&field, o.a.unwrap_or(1), o.at.unwrap_or(0), o.d.unwrap_or(2), EXEC)?;
            lemma1_findings(r, &rep);
            r.set("report", &rep)?;
        }
        SumKind::Fourier => {
            let beta = o.beta.unwrap_or(0.5);
            let rep = fourier_check(beta, p, 1e-6)?;
            fourier_checks(r, &rep);
            let fc = FourierCoeffs::new(beta, p)?;
            let half = (p as i64 - 1) / 2;
            let rows = (-half..=half).map(|h| {
                let a = fc.alpha(h);
                vec![h.to_string(), a.re.to_string(), a.im.to_string()]
            });
            r.table(Table { header: vec!["h".into(), "re".into(), "im".into()], rows: rows.collect() });
            r.set("report", &rep)?;
        }
        SumKind::Chars => {
            let field = PrimeField::new(p)?;
            let set = o.require_subset()?.realize(&field)?;
            let table = CharacterTable::new(&field)?;
            let sums: Vec<_> = (0..p - 1)
                .map(|a| {
                    let v = char_sum_over_set(&table, table.character(a), &set).value();
                    [v.re, v.im]
                })
                .collect();
            let rep = cauchy_schwarz_bound_check(&table, &set);
            r.check("second moment equals phi(p)|S \\ {0}|", rep.second_moment_holds);
            r.check("sum over nonprincipal characters within p sqrt(|S \\ {0}|)", rep.bound_holds);
            r.table(Table {
                header: vec!["a".into(), "re".into(), "im".into()],
                rows: sums.iter().enumerate().map(|(a, v)| vec![a.to_string(), v[0].to_string(), v[1].to_string()]).collect(),
            });
            r.set("character_sums", sums)?;
            r.set("report", &rep)?;
        }
        SumKind::Lemma3 => {
            let field = PrimeField::new(p)?;
            let table = CharacterTable::new(&field)?;
            let (f, chi) = random_weil_instance(&field, &table, &mut rng);
            let rep = weil_lemma3_check(&field, &table, &f, chi)?;
            r.check("|sum| <= (m - 1) sqrt(p)", rep.holds);
            r.set("polynomial", f.poly.coeffs())?;
            r.set("factors", f.factors.iter().map(|(g, m)| (g.coeffs().to_vec(), *m)).collect::<Vec<_>>())?;
            r.set("report", &rep)?;
        }
    }
    Ok(())
}

pub fn lemma1_findings(r: &mut Report, rep: &fpcx::sums::additive::Lemma1Report) {
    r.check(format!("p = {}, d = {}: counted identity d S = rhs", rep.p, rep.d), rep.counted_holds);
    if !rep.literal_holds {
        r.finding(
            "lemma1_multiplicity",
            "completing the last variable counts each d-subset d times: d S = -C(p-1, d-1) - (sum), so the main term is -C(p-1, d-1)/d",
            json!({ "p": rep.p, "d": rep.d, "literal_residual": rep.literal_residual, "counted_residual": rep.counted_residual, "ratio_counted_main_term": rep.ratio_counted_main_term }),
        );
    }
}

pub fn fourier_checks(r: &mut Report, rep: &fpcx::sums::fourier::FourierReport) {
    let tag = format!("p = {}, beta = {}", rep.p, rep.beta);
    r.check(format!("{tag}: alpha_0 = floor(beta p)/p"), rep.alpha0_exact);
    r.check(format!("{tag}: |alpha_h| <= 1/(2|h|)"), rep.coefficient_bound_holds);
    r.check(format!("{tag}: reconstruction within 1e-6"), rep.reconstruction_holds);
    if !rep.strict_real_mismatch.is_empty() {
        r.finding(
            "fourier_interval_endpoint",
            "the closed-form coefficients expand the indicator of [0, floor(beta p)); the condition r_p(x) < beta p also admits floor(beta p) when beta p is not an integer",
            json!({ "p": rep.p, "beta": rep.beta, "residues": rep.strict_real_mismatch }),
        );
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// N_n(λ) for every λ.
    Histogram,
    /// The bilinear sum and its bounds.
    Bilinear,
    /// Full versus torus part of the variety sum.
    Relation9,
    /// The φ-identity by full enumeration.
    Phi,
    /// Large deviations of N_n(λ) from q.
    Prop2,
    /// λ for which g_λ can be singular.
    Exceptional,
    /// Newton polygon of g_λ.
    Newton,
    /// Zeros of g_λ on the excluded lines.
    Lines,
}

/// The instance from `--bvec --cvec --dvec`, or a random one of size `--k`.
pub fn instance(o: &Opts, p: u64, rng: &mut ChaCha8Rng) -> Result<BilinearInstance> {
    match (&o.bvec, &o.cvec, &o.dvec) {
        (Some(b), Some(c), Some(d)) => Ok(BilinearInstance::new(p, b.clone(), c.clone(), d.clone())?),
        (None, None, None) => Ok(BilinearInstance::random(p, o.k.context("--k or --bvec/--cvec/--dvec is required")?, rng)?),
        _ => bail!("give all of --bvec, --cvec and --dvec, or none"),
    }
}

pub fn curve(kind: CurveKind, o: &Opts, r: &mut Report) -> Result<()> {
    let p = o.single_p()?;
    let mut rng = rng(o);
    let inst = instance(o, p, &mut rng)?;
    r.set("instance", &inst)?;
    with_field!(p, o.n, |field| {
        let q = field.order();
        match kind {
            CurveKind::Histogram => {
                let h = r.timed("histogram", || curves::histogram_nn(field, &inst, EXEC))?;
                r.check("total mass (q - k)^2", h.mass() == h.expected_mass());
                r.table(Table {
                    header: vec!["lambda".into(), "count".into()],
                    rows: h.counts.iter().enumerate().map(|(l, c)| vec![l.to_string(), c.to_string()]).collect(),
                });
                r.set("mass", h.mass())?;
                r.set("max_count", h.max_count())?;
                r.set("counts", &h.counts)?;
            }
            CurveKind::Bilinear => {
                let b = r.timed("bilinear", || curves::bilinear_sum(field, &inst, EXEC))?;
                let h = r.timed("histogram", || curves::histogram_nn(field, &inst, EXEC))?;
                let via = h.character_sum(field);
                r.check("sum agrees with sum over lambda of N(lambda) e(lambda)", (via - b.value).norm() <= 1e-6 * (q * q) as f64);
                r.check("|sum| <= min(44^(4k) q, (q - k)^2)", b.holds);
                r.set("via_histogram", [via.re, via.im])?;
                r.set("report", &b)?;
            }
            CurveKind::Relation9 => {
                let rep = r.timed("relation9", || curves::relation9_verify(field, &inst, EXEC))?;
                relation9_findings(r, &rep);
                r.set("report", &rep)?;
            }
            CurveKind::Phi => {
                let rep = r.timed("phi", || curves::phi_identity_verify(field, &inst, EXEC))?;
                r.check("phi identity", rep.holds);
                r.set("report", &rep)?;
            }
            CurveKind::Prop2 => {
                let h = r.timed("histogram", || curves::histogram_nn(field, &inst, EXEC))?;
                let rep = curves::prop2_verify(&h);
                r.check(format!("at most {} exceptions", exception_cap(inst.k())), rep.pass);
                r.set("report", &rep)?;
            }
            CurveKind::Exceptional => {
                let (norm, beta, gamma) = inst.normalized();
                let exc = r.timed("exceptional", || curves::exceptional_lambdas(field, &norm, EXEC))?;
                let h = r.timed("histogram", || curves::histogram_nn(field, &norm, EXEC))?;
                let p2 = curves::prop2_verify(&h);
                let cont = curves::containment_check(field, &p2, &exc);
                r.check("exceptional set within its bounds", exc.pass);
                r.check("large deviations occur only at exceptional lambda", cont.holds);
                r.set("shift", [beta, gamma])?;
                r.set("report", &exc)?;
                r.set("containment", &cont)?;
            }
            CurveKind::Newton => {
                let (norm, _, _) = inst.normalized();
                let lambda = field.element(o.lambda.unwrap_or(1) % q);
                let rep = curves::newton_check(field, &norm, lambda)?;
                let k = inst.k() as u64;
                r.check("nu = 2k^2 - 2k", rep.nu == 2 * k * k - 2 * k);
                r.check("commode", rep.commode);
                r.set("report", &rep)?;
            }
            CurveKind::Lines => {
                let (rep, _) = r.timed("lines", || curves::line_effect_check(field, &inst, EXEC))?;
                line_findings(r, &rep);
                r.table(Table {
                    header: vec!["lambda".into(), "line_zeros".into()],
                    rows: rep.line_zeros.iter().enumerate().map(|(l, c)| vec![l.to_string(), c.to_string()]).collect(),
                });
                r.set("report", &rep)?;
            }
        }
    });
    Ok(())
}

pub fn relation9_findings(r: &mut Report, rep: &fpcx::curves::variety::Relation9Report) {
    r.check(format!("q = {}, k = {}: S_n - S_n* = U + V - 1", rep.q, rep.k), rep.matches_expected);
    r.check(format!("q = {}, k = {}: S_n* equals the bilinear sum", rep.q, rep.k), rep.star_equals_bilinear);
    if !rep.matches_stated_constant {
        r.finding(
            "relation9_constant",
            "the points with a zero coordinate number U + V - 1 = 2(q - k + 1) - 1, not 2(q - 1) + 1, once k >= 2",
            json!({ "q": rep.q, "k": rep.k, "measured": rep.diff.re, "expected": rep.expected_diff, "stated": rep.stated_constant }),
        );
    }
}

pub fn line_findings(r: &mut Report, rep: &fpcx::curves::singular::LineEffectReport) {
    r.check(
        format!("q = {}, k = {}: N' - N = k(k - 1) for every lambda", rep.q, rep.k),
        rep.line_zeros.iter().all(|&d| d == rep.predicted_difference),
    );
    if !rep.bound_holds {
        r.finding(
            "line_zeros_exceed_2k",
            "every point (b_i, c_j) with i != j lies on every curve, so N' - N = k(k - 1), which exceeds 2k once k >= 4",
            json!({ "q": rep.q, "k": rep.k, "difference": rep.max_difference, "bound": rep.bound }),
        );
    }
}
